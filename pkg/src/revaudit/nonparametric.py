"""Matched-pair analysis: within-submission matching of cited vs uncited
reviewers on all covariates, a mean-difference statistic, a sign-flip
permutation test, and a percentile bootstrap interval.

Matching criteria per (cited, uncited) pair of reviewers of one submission:
equal self-reported expertise, equal self-reported confidence, text overlap
within the tolerance (default 0.1), bids either both 3 or both in {4, 5},
and the same seniority group.  Each submission contributes a maximum
matching, so no reviewer joins more than one triple per submission.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from itertools import product
from pathlib import Path

import numpy as np

from .errors import NoAnalyzableDataError, SampleSizeError, ValidationError
from .filtering import AnalysisDataset, AnalysisRecord

OVERLAP_TOLERANCE = 0.1
_TOL_EPS = 1e-9  # absolute slack so 0.65 - 0.55 <= 0.1 holds despite float repr


@dataclass(frozen=True)
class MatchedTriple:
    submission_id: str
    cited_reviewer_id: str
    uncited_reviewer_id: str
    score_cited: float
    score_uncited: float

    @property
    def difference(self) -> float:
        return self.score_cited - self.score_uncited


@dataclass(frozen=True)
class PermutationResult:
    statistic: float  # mean within-triple score difference
    n_triples: int
    p_two_sided: float
    ci95_bootstrap: tuple[float, float] | None
    iterations: int

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "n_triples": self.n_triples,
            "p_two_sided": self.p_two_sided,
            "ci95_bootstrap": list(self.ci95_bootstrap) if self.ci95_bootstrap else None,
            "iterations": self.iterations,
        }


def compatible(
    cited: AnalysisRecord,
    uncited: AnalysisRecord,
    overlap_tolerance: float = OVERLAP_TOLERANCE,
) -> bool:
    """All five matching criteria between a cited and an uncited record."""
    c, u = cited.covariates, uncited.covariates
    if c["sr_expertise"] != u["sr_expertise"]:
        return False
    if c["sr_confidence"] != u["sr_confidence"]:
        return False
    if abs(c["text_overlap"] - u["text_overlap"]) > overlap_tolerance + _TOL_EPS:
        return False
    bid_c, bid_u = c["bid"], u["bid"]
    if not ((bid_c == 3 and bid_u == 3) or (bid_c in (4, 5) and bid_u in (4, 5))):
        return False
    return c["seniority"] == u["seniority"]


def _max_matching_size(adj: list[list[int]], n_right: int) -> int:
    """Kuhn's augmenting-path maximum matching on a small bipartite graph."""
    match_right = [-1] * n_right

    def try_augment(left: int, visited: list[bool]) -> bool:
        for right in adj[left]:
            if visited[right]:
                continue
            visited[right] = True
            if match_right[right] == -1 or try_augment(match_right[right], visited):
                match_right[right] = left
                return True
        return False

    size = 0
    for left in range(len(adj)):
        if try_augment(left, [False] * n_right):
            size += 1
    return size


def _lexicographic_maximum_matching(
    cited: list[AnalysisRecord],
    uncited: list[AnalysisRecord],
    overlap_tolerance: float,
) -> list[tuple[AnalysisRecord, AnalysisRecord]]:
    """Maximum matching, ties broken toward lexicographically earliest pairs.

    Pairs are considered in (cited_id, uncited_id) order; a pair is kept iff
    some maximum matching contains it together with all pairs already kept.
    """
    adj = [
        [j for j, u in enumerate(uncited) if compatible(c, u, overlap_tolerance)]
        for c in cited
    ]
    target = _max_matching_size(adj, len(uncited))
    if target == 0:
        return []

    forced: list[tuple[int, int]] = []
    used_left: set[int] = set()
    used_right: set[int] = set()
    for i, j in sorted(
        ((i, j) for i in range(len(cited)) for j in adj[i]),
        key=lambda ij: (cited[ij[0]].reviewer_id, uncited[ij[1]].reviewer_id),
    ):
        if i in used_left or j in used_right or len(forced) == target:
            continue
        rest_adj = [
            [jj for jj in adj[ii] if jj not in used_right and jj != j]
            for ii in range(len(cited))
            if ii not in used_left and ii != i
        ]
        if len(forced) + 1 + _max_matching_size(rest_adj, len(uncited)) >= target:
            forced.append((i, j))
            used_left.add(i)
            used_right.add(j)
    return [(cited[i], uncited[j]) for i, j in forced]


def match(
    analysis: AnalysisDataset, overlap_tolerance: float = OVERLAP_TOLERANCE
) -> list[MatchedTriple]:
    """Build matched triples per submission via maximum bipartite matching.

    Submissions where no compatible (cited, uncited) pair exists contribute
    nothing.  Requires the ICML-like covariate set on every record.
    """
    triples: list[MatchedTriple] = []
    for sid in analysis.submissions():
        records = analysis.by_submission[sid]
        for record in records:
            if "bid" not in record.covariates:
                raise ValidationError(
                    f"record {record.pair} lacks matching covariates; "
                    "matching requires the ICML-like covariate set"
                )
        cited = sorted((r for r in records if r.cited), key=lambda r: r.reviewer_id)
        uncited = sorted((r for r in records if not r.cited), key=lambda r: r.reviewer_id)
        for c, u in _lexicographic_maximum_matching(cited, uncited, overlap_tolerance):
            triples.append(
                MatchedTriple(
                    submission_id=sid,
                    cited_reviewer_id=c.reviewer_id,
                    uncited_reviewer_id=u.reviewer_id,
                    score_cited=c.score,
                    score_uncited=u.score,
                )
            )
    return triples


def permutation_test(
    triples: list[MatchedTriple],
    iterations: int = 10_000,
    seed: int | None = None,
    bootstrap: bool = True,
) -> PermutationResult:
    """Sign-flip permutation test of the mean within-triple difference.

    Each iteration flips every triple's difference independently with
    probability one half; the two-sided p-value uses the add-one estimator
    (1 + #{|tau_perm| >= |tau|}) / (1 + iterations), so it is never zero.
    Deterministic for a given seed.  The bootstrap interval is attached when
    at least two triples exist, unless ``bootstrap`` is disabled.
    """
    k = len(triples)
    if k == 0:
        raise NoAnalyzableDataError("no matched triples; cannot run the permutation test")
    if iterations < 1:
        raise ValidationError("iterations must be positive")
    d = np.array([t.difference for t in triples], dtype=float)
    statistic = float(d.mean())

    rng = np.random.default_rng(None if seed is None else [seed, 0])
    signs = rng.integers(0, 2, size=(iterations, k)) * 2 - 1
    perm_stats = (signs * d).mean(axis=1)
    exceed = int(np.sum(np.abs(perm_stats) >= abs(statistic)))
    p = (1 + exceed) / (1 + iterations)

    ci = None
    if bootstrap and k >= 2:
        ci = bootstrap_ci(triples, iterations=iterations, seed=None if seed is None else seed)
    return PermutationResult(
        statistic=statistic, n_triples=k, p_two_sided=p,
        ci95_bootstrap=ci, iterations=iterations,
    )


def exact_permutation_p(differences: list[float]) -> float:
    """Two-sided p by full enumeration of all 2^K sign patterns (K <= 20)."""
    k = len(differences)
    if k == 0:
        raise NoAnalyzableDataError("no differences to enumerate")
    if k > 20:
        raise ValidationError(f"enumeration over 2^{k} patterns refused; use Monte Carlo")
    d = np.asarray(differences, dtype=float)
    observed = abs(d.mean())
    signs = np.array(list(product((-1.0, 1.0), repeat=k)))
    perm_stats = np.abs((signs * d).mean(axis=1))
    return float(np.sum(perm_stats >= observed) / len(perm_stats))


def bootstrap_ci(
    triples: list[MatchedTriple],
    iterations: int = 10_000,
    seed: int | None = None,
) -> tuple[float, float]:
    """Percentile 95% interval of the mean difference over triple resamples."""
    k = len(triples)
    if k < 2:
        raise SampleSizeError(f"bootstrap needs at least 2 triples, got {k}")
    if iterations < 1:
        raise ValidationError("iterations must be positive")
    d = np.array([t.difference for t in triples], dtype=float)
    rng = np.random.default_rng(None if seed is None else [seed, 1])
    idx = rng.integers(0, k, size=(iterations, k))
    resampled = d[idx].mean(axis=1)
    lo, hi = np.percentile(resampled, [2.5, 97.5])
    return (float(lo), float(hi))


def save_triples(triples: list[MatchedTriple], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["submission_id", "cited_reviewer_id", "uncited_reviewer_id",
             "score_cited", "score_uncited"]
        )
        for t in triples:
            writer.writerow(
                [t.submission_id, t.cited_reviewer_id, t.uncited_reviewer_id,
                 t.score_cited, t.score_uncited]
            )


def load_triples(path: Path | str) -> list[MatchedTriple]:
    triples = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            triples.append(
                MatchedTriple(
                    submission_id=row["submission_id"],
                    cited_reviewer_id=row["cited_reviewer_id"],
                    uncited_reviewer_id=row["uncited_reviewer_id"],
                    score_cited=float(row["score_cited"]),
                    score_uncited=float(row["score_uncited"]),
                )
            )
    return triples


def save_permutation_result(result: PermutationResult, path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(result.as_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_permutation_result(path: Path | str) -> PermutationResult:
    with Path(path).open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    ci = raw.get("ci95_bootstrap")
    return PermutationResult(
        statistic=raw["statistic"],
        n_triples=raw["n_triples"],
        p_two_sided=raw["p_two_sided"],
        ci95_bootstrap=tuple(ci) if ci else None,
        iterations=raw["iterations"],
    )
