"""Analysis-eligibility filtering: strata requirement, missing-value policy,
and exclusion of adjudicated missing-citation cases.

Order of operations is fixed: eligibility (both strata non-empty), then the
venue missing-value policy, then an eligibility re-check, then exclusion of
whole submissions with an adjudicated missing-citation complaint.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .citations import CitationRelation
from .dataset import ReviewDataset, VenueConfig, VenuePolicy, derive_covariates
from .errors import NoAnalyzableDataError, ValidationError

Pair = tuple[str, str]


@dataclass(frozen=True)
class AnalysisRecord:
    submission_id: str
    reviewer_id: str
    score: float
    cited: bool
    covariates: dict[str, float]

    @property
    def pair(self) -> Pair:
        return (self.submission_id, self.reviewer_id)


@dataclass(frozen=True)
class AnalysisDataset:
    """Filtered view ready for inference: per submission, both strata non-empty."""

    config: VenueConfig
    by_submission: dict[str, tuple[AnalysisRecord, ...]]

    @property
    def policy(self) -> VenuePolicy:
        return self.config.venue_policy

    @property
    def n_pairs(self) -> int:
        return sum(len(records) for records in self.by_submission.values())

    def submissions(self) -> list[str]:
        return sorted(self.by_submission)

    def reviewers(self) -> set[str]:
        return {r.reviewer_id for records in self.by_submission.values() for r in records}


@dataclass
class FilterReport:
    eligible_submissions: int
    dropped_missing: int
    excluded_submissions: list[str]
    retained_pairs: int

    def as_dict(self) -> dict:
        return {
            "eligible_submissions": self.eligible_submissions,
            "dropped_missing": self.dropped_missing,
            "excluded_submissions": self.excluded_submissions,
            "retained_pairs": self.retained_pairs,
        }


def _strata_ok(records, relation: CitationRelation) -> bool:
    cited = sum(1 for r in records if relation.indicator(r.pair))
    return cited >= 1 and cited < len(records)


def filter_dataset(
    dataset: ReviewDataset,
    relation: CitationRelation,
    scores: dict[Pair, float] | None = None,
) -> tuple[AnalysisDataset, FilterReport]:
    """Produce the analysis-eligible dataset and its audit report.

    Keeps submissions with at least one cited and one uncited assigned
    review; under the ICML-like policy drops pairs with any missing
    covariate (re-checking eligibility afterwards); removes every submission
    carrying an adjudicated missing-citation complaint.  ``scores`` can remap
    pair scores (e.g. to a generator's latent channel) without touching the
    stored dataset.
    """
    if dataset.derived is None:
        dataset = derive_covariates(dataset)
    policy = dataset.config.venue_policy
    by_submission = dataset.reviews_by_submission()

    eligible: dict[str, list] = {}
    for submission in dataset.active_submissions():
        records = by_submission.get(submission.id, [])
        if len(records) >= 2 and _strata_ok(records, relation):
            eligible[submission.id] = records

    dropped_missing = 0
    if policy == VenuePolicy.ICML_LIKE:
        recheck: dict[str, list] = {}
        for sid, records in eligible.items():
            kept = [r for r in records if not dataset.derived[r.pair].droppable]
            dropped_missing += len(records) - len(kept)
            if len(kept) >= 2 and _strata_ok(kept, relation):
                recheck[sid] = kept
        eligible = recheck

    excluded = sorted(
        sid
        for sid in eligible
        if any(r.exclusion_adjudicated for r in by_submission[sid])
    )
    for sid in excluded:
        del eligible[sid]

    if not eligible:
        raise NoAnalyzableDataError(
            "no analyzable data: no submission retains both cited and uncited reviews"
        )

    out: dict[str, tuple[AnalysisRecord, ...]] = {}
    for sid in sorted(eligible):
        rows = []
        for record in sorted(eligible[sid], key=lambda r: r.pair):
            vector = dataset.derived[record.pair].covariate_vector
            covariates = {name: value for name, value in vector}
            if any(v is None for v in covariates.values()):
                raise ValidationError(f"incomplete covariates survived filtering: {record.pair}")
            score = float(record.score)
            if scores is not None:
                score = float(scores[record.pair])
            rows.append(
                AnalysisRecord(
                    submission_id=sid,
                    reviewer_id=record.reviewer_id,
                    score=score,
                    cited=relation.indicator(record.pair),
                    covariates=covariates,
                )
            )
        out[sid] = tuple(rows)

    report = FilterReport(
        eligible_submissions=len(out),
        dropped_missing=dropped_missing,
        excluded_submissions=excluded,
        retained_pairs=sum(len(v) for v in out.values()),
    )
    return AnalysisDataset(config=dataset.config, by_submission=out), report


@dataclass(frozen=True)
class MissingnessReport:
    qualifying_pairs: int
    pairs_with_missing: int
    per_variable: dict[str, int]

    def format_text(self) -> str:
        lines = [
            f"Pairs qualifying for analysis:   {self.qualifying_pairs:,}",
            f"Pairs with any missing variable: {self.pairs_with_missing:,}",
        ]
        for name, count in self.per_variable.items():
            lines.append(f"  missing {name}: {count:,}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "qualifying_pairs": self.qualifying_pairs,
            "pairs_with_missing": self.pairs_with_missing,
            "per_variable": self.per_variable,
        }


def missingness_report(dataset: ReviewDataset, relation: CitationRelation) -> MissingnessReport:
    """Per-variable missing counts among pairs that qualify for analysis
    (both strata present, before any filtering)."""
    policy = dataset.config.venue_policy
    by_submission = dataset.reviews_by_submission()
    qualifying = []
    for submission in dataset.active_submissions():
        records = by_submission.get(submission.id, [])
        if len(records) >= 2 and _strata_ok(records, relation):
            qualifying.extend(records)

    if policy == VenuePolicy.ICML_LIKE:
        variables = ("sr_confidence", "text_overlap", "bid")
        missing = {
            name: sum(1 for r in qualifying if getattr(r, name) is None) for name in variables
        }
        any_missing = sum(
            1 for r in qualifying if any(getattr(r, name) is None for name in variables)
        )
    else:
        # EC encodes "not reported" as 0, so a stored 0 counts as missing.
        missing = {
            "preference_value": sum(
                1
                for r in qualifying
                if r.preference_value is None or r.preference_value == 0
            )
        }
        any_missing = missing["preference_value"]

    return MissingnessReport(
        qualifying_pairs=len(qualifying),
        pairs_with_missing=any_missing,
        per_variable=missing,
    )


def save_filter_report(report: FilterReport, path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(report.as_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_filter_report(path: Path | str) -> FilterReport:
    with Path(path).open("r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return FilterReport(**raw)


def save_exclusions_csv(dataset: ReviewDataset, path: Path | str) -> None:
    """Audit trail of adjudicated pairs driving submission exclusion."""
    rows = sorted(
        (r.submission_id, r.reviewer_id)
        for r in dataset.reviews
        if r.exclusion_adjudicated
    )
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["submission_id", "reviewer_id"])
        writer.writerows(rows)


def save_analysis_dataset(analysis: AnalysisDataset, path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for sid in analysis.submissions():
            for record in analysis.by_submission[sid]:
                obj = {
                    "submission_id": record.submission_id,
                    "reviewer_id": record.reviewer_id,
                    "score": record.score,
                    "cited": record.cited,
                    "covariates": record.covariates,
                }
                fh.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def load_analysis_dataset(path: Path | str, config: VenueConfig) -> AnalysisDataset:
    by_submission: dict[str, list[AnalysisRecord]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            record = AnalysisRecord(
                submission_id=obj["submission_id"],
                reviewer_id=obj["reviewer_id"],
                score=obj["score"],
                cited=obj["cited"],
                covariates=obj["covariates"],
            )
            by_submission.setdefault(record.submission_id, []).append(record)
    return AnalysisDataset(
        config=config,
        by_submission={sid: tuple(rows) for sid, rows in by_submission.items()},
    )
