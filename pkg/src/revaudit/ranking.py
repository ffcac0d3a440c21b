"""Score-shift interpretation: how far a one-point score increase moves a
submission in the mean-score ordering.

Ranks use midranks (expected rank under uniform random tie-breaking), so the
computation is exact instead of Monte Carlo.  Position 1 is the best-scored
submission; improvements are reported as percent of the submission count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import ReviewDataset
from .errors import NoAnalyzableDataError, ValidationError

Pair = tuple[str, str]

AVERAGE_OVER_PAIRS = "pairs"
AVERAGE_OVER_SUBMISSIONS = "submissions"


@dataclass(frozen=True)
class RankingOutcome:
    per_pair_improvement: dict[Pair, float]
    average_improvement: float
    n_submissions: int

    def as_dict(self) -> dict:
        return {
            "average_improvement": self.average_improvement,
            "n_submissions": self.n_submissions,
            "n_pairs": len(self.per_pair_improvement),
        }


def _expected_rank(value: float, others: np.ndarray) -> float:
    greater = int(np.sum(others > value))
    ties = int(np.sum(others == value))
    return 1.0 + greater + 0.5 * ties


def rank_improvement(
    dataset: ReviewDataset,
    cap: bool = True,
    average_over: str = AVERAGE_OVER_PAIRS,
) -> RankingOutcome:
    """Expected-rank gain from raising one reviewer's score by one point.

    For every (submission, reviewer) pair, the submission's mean initial
    score is recomputed with that reviewer one point higher (capped at the
    score ceiling unless ``cap`` is False) and the gain in expected rank is
    reported as a percent of the submission count.  ``average_over`` selects
    whether the average weights every pair equally or every submission
    equally.
    """
    if average_over not in (AVERAGE_OVER_PAIRS, AVERAGE_OVER_SUBMISSIONS):
        raise ValidationError(f"unknown averaging mode {average_over!r}")
    by_submission = dataset.reviews_by_submission()
    active = dataset.active_submissions()
    if not active:
        raise NoAnalyzableDataError("no submissions to rank")
    for submission in active:
        if not by_submission.get(submission.id):
            raise ValidationError(f"submission {submission.id!r} has no reviews")

    sids = [s.id for s in active]
    n = len(sids)
    means = np.array(
        [np.mean([r.score for r in by_submission[sid]]) for sid in sids], dtype=float
    )

    score_max = dataset.config.score_max
    per_pair: dict[Pair, float] = {}
    per_submission_gains: list[list[float]] = []
    for i, sid in enumerate(sids):
        others = np.delete(means, i)
        rank_before = _expected_rank(means[i], others)
        records = by_submission[sid]
        count = len(records)
        gains = []
        for record in records:
            new_score = record.score + 1
            if cap:
                new_score = min(new_score, score_max)
            new_mean = means[i] + (new_score - record.score) / count
            rank_after = _expected_rank(new_mean, others)
            improvement = (rank_before - rank_after) / n * 100.0
            per_pair[record.pair] = improvement
            gains.append(improvement)
        per_submission_gains.append(gains)

    if average_over == AVERAGE_OVER_PAIRS:
        all_gains = [g for gains in per_submission_gains for g in gains]
        average = float(np.mean(all_gains))
    else:
        average = float(np.mean([np.mean(gains) for gains in per_submission_gains]))

    return RankingOutcome(
        per_pair_improvement=per_pair,
        average_improvement=average,
        n_submissions=n,
    )


def save_ranking(outcome: RankingOutcome, json_path: Path | str, csv_path: Path | str) -> None:
    with Path(json_path).open("w", encoding="utf-8") as fh:
        json.dump(outcome.as_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    with Path(csv_path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["submission_id", "reviewer_id", "improvement_pct"])
        for pair in sorted(outcome.per_pair_improvement):
            writer.writerow([pair[0], pair[1], outcome.per_pair_improvement[pair]])
