"""Review-data model: ingestion, validation, serialization, and venue covariates.

The on-disk format is one directory holding ``venue.json`` plus three
JSON-Lines files (``reviewers.jsonl``, ``submissions.jsonl``,
``reviews.jsonl``), one object per line, optional fields omitted when absent.
An optional ``references.jsonl`` (submission_id -> list of reference-entry
strings) supplements submissions whose inline entries are empty.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterator

from .errors import ParseError, ReferentialError, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .citations import CitationRelation

VENUE_FILE = "venue.json"
REVIEWERS_FILE = "reviewers.jsonl"
SUBMISSIONS_FILE = "submissions.jsonl"
REVIEWS_FILE = "reviews.jsonl"
REFERENCES_FILE = "references.jsonl"


class VenuePolicy(str, Enum):
    """Which venue conventions govern covariates and filtering."""

    EC_LIKE = "EC_LIKE"
    ICML_LIKE = "ICML_LIKE"


# Covariate names entering the differenced regression, in model order.
EC_COVARIATES = ("sr_expertise", "pref_perc", "missing_pref", "seniority")
ICML_COVARIATES = ("sr_expertise", "sr_confidence", "text_overlap", "bid", "seniority")


def policy_covariates(policy: VenuePolicy) -> tuple[str, ...]:
    return EC_COVARIATES if policy == VenuePolicy.EC_LIKE else ICML_COVARIATES


@dataclass(frozen=True)
class VenueConfig:
    score_min: int
    score_max: int
    venue_policy: VenuePolicy
    expertise_scale: tuple[int, int] = (1, 4)
    bid_scale: tuple[int, int] | None = None
    preference_range: tuple[int, int] | None = None

    def __post_init__(self):
        if self.score_min >= self.score_max:
            raise ValidationError(
                f"score_min must be below score_max, got [{self.score_min}, {self.score_max}]"
            )

    @property
    def score_span(self) -> int:
        """Width of the admissible range of differenced statistics."""
        return self.score_max - self.score_min

    @classmethod
    def ec_like(cls, score_min: int = 1, score_max: int = 5) -> "VenueConfig":
        return cls(
            score_min=score_min,
            score_max=score_max,
            venue_policy=VenuePolicy.EC_LIKE,
            preference_range=(-100, 100),
        )

    @classmethod
    def icml_like(cls, score_min: int = 1, score_max: int = 6) -> "VenueConfig":
        return cls(
            score_min=score_min,
            score_max=score_max,
            venue_policy=VenuePolicy.ICML_LIKE,
            bid_scale=(2, 5),
        )


@dataclass(frozen=True)
class Reviewer:
    id: str
    last_name: str
    first_name: str
    seniority: int
    has_text_profile: bool = True

    def __post_init__(self):
        if not self.last_name:
            raise ValidationError(f"reviewer {self.id!r}: last_name must be non-empty")
        if self.seniority not in (0, 1):
            raise ValidationError(
                f"reviewer {self.id!r}: seniority must be 0 or 1, got {self.seniority!r}"
            )


@dataclass(frozen=True)
class Submission:
    id: str
    reference_entries: tuple[str, ...] = ()
    withdrawn: bool = False


@dataclass(frozen=True)
class ReviewRecord:
    submission_id: str
    reviewer_id: str
    score: int
    sr_expertise: int
    sr_confidence: int | None = None
    text_overlap: float | None = None
    bid: int | None = None
    preference_value: int | None = None
    missing_citation_flag: bool = False
    exclusion_adjudicated: bool = False

    def __post_init__(self):
        if self.text_overlap is not None and not 0.0 <= self.text_overlap <= 1.0:
            raise ValidationError(f"{self._tag()}: text_overlap must lie in [0, 1]")
        if self.exclusion_adjudicated and not self.missing_citation_flag:
            raise ValidationError(
                f"{self._tag()}: exclusion_adjudicated requires missing_citation_flag"
            )

    def _tag(self) -> str:
        return f"review ({self.submission_id!r}, {self.reviewer_id!r})"

    @property
    def pair(self) -> tuple[str, str]:
        return (self.submission_id, self.reviewer_id)


@dataclass(frozen=True)
class DerivedCovariates:
    """Per-pair regression inputs; ``covariate_vector`` follows model order."""

    pref_perc: float | None
    missing_pref: int | None
    covariate_vector: tuple[tuple[str, float | None], ...]

    @property
    def droppable(self) -> bool:
        return any(v is None for _, v in self.covariate_vector)


@dataclass(frozen=True)
class ReviewDataset:
    """Immutable container for one venue's reviewers, submissions, and reviews."""

    config: VenueConfig
    reviewers: dict[str, Reviewer]
    submissions: dict[str, Submission]
    reviews: tuple[ReviewRecord, ...]
    derived: dict[tuple[str, str], DerivedCovariates] | None = None

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.reviewers), len(self.submissions), len(self.reviews))

    def active_submissions(self) -> list[Submission]:
        """Submissions that were not withdrawn, in id order."""
        return [s for _, s in sorted(self.submissions.items()) if not s.withdrawn]

    def review_pairs(self) -> set[tuple[str, str]]:
        return {r.pair for r in self.reviews}

    def reviews_by_submission(self) -> dict[str, list[ReviewRecord]]:
        grouped: dict[str, list[ReviewRecord]] = {}
        for record in self.reviews:
            grouped.setdefault(record.submission_id, []).append(record)
        return grouped


@dataclass(frozen=True)
class SummaryTable:
    n_reviewers: int
    n_submissions: int
    n_with_cited_reviewer: int
    fraction_with_cited: float

    def as_dict(self) -> dict:
        return {
            "n_reviewers": self.n_reviewers,
            "n_submissions": self.n_submissions,
            "n_with_cited_reviewer": self.n_with_cited_reviewer,
            "fraction_with_cited": self.fraction_with_cited,
        }

    def format_text(self) -> str:
        pct = round(self.fraction_with_cited * 100)
        return "\n".join(
            [
                f"Reviewers:                                  {self.n_reviewers:,}",
                f"Submissions:                                {self.n_submissions:,}",
                f"Submissions with >=1 cited reviewer:        {self.n_with_cited_reviewer:,}",
                f"Fraction with >=1 cited reviewer:           {pct}%",
            ]
        )


def _json_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _read_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path.name}:{lineno}: malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(f"{path.name}:{lineno}: expected a JSON object")
            yield lineno, obj


def _build(cls, path: Path, lineno: int, obj: dict):
    try:
        return cls(**obj)
    except TypeError as exc:
        raise ParseError(f"{path.name}:{lineno}: {exc}") from exc
    except ValidationError as exc:
        raise ValidationError(f"{path.name}:{lineno}: {exc}") from exc


def load_venue_config(path: Path | str) -> VenueConfig:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path.name}: malformed JSON ({exc.msg})") from exc
    try:
        policy = VenuePolicy(raw["venue_policy"])
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"{path.name}: unknown venue_policy") from exc
    return VenueConfig(
        score_min=raw["score_min"],
        score_max=raw["score_max"],
        venue_policy=policy,
        expertise_scale=tuple(raw.get("expertise_scale", (1, 4))),
        bid_scale=tuple(raw["bid_scale"]) if "bid_scale" in raw else None,
        preference_range=tuple(raw["preference_range"]) if "preference_range" in raw else None,
    )


def load_dataset(path: Path | str, config: VenueConfig | None = None) -> ReviewDataset:
    """Load and validate a dataset directory.

    ``config`` defaults to the directory's ``venue.json``.  Raises
    :class:`ParseError` with a line number on malformed records,
    :class:`ReferentialError` on dangling ids, and :class:`ValidationError`
    on out-of-scale values.
    """
    root = Path(path)
    if config is None:
        config = load_venue_config(root / VENUE_FILE)

    reviewers: dict[str, Reviewer] = {}
    rev_path = root / REVIEWERS_FILE
    for lineno, obj in _read_jsonl(rev_path):
        reviewer = _build(Reviewer, rev_path, lineno, obj)
        if reviewer.id in reviewers:
            raise ValidationError(f"{rev_path.name}:{lineno}: duplicate reviewer id {reviewer.id!r}")
        reviewers[reviewer.id] = reviewer

    submissions: dict[str, Submission] = {}
    sub_path = root / SUBMISSIONS_FILE
    for lineno, obj in _read_jsonl(sub_path):
        if "reference_entries" in obj:
            obj["reference_entries"] = tuple(obj["reference_entries"])
        submission = _build(Submission, sub_path, lineno, obj)
        if submission.id in submissions:
            raise ValidationError(
                f"{sub_path.name}:{lineno}: duplicate submission id {submission.id!r}"
            )
        submissions[submission.id] = submission

    ref_path = root / REFERENCES_FILE
    if ref_path.exists():
        for lineno, obj in _read_jsonl(ref_path):
            sid = obj.get("submission_id")
            if sid not in submissions:
                raise ReferentialError(
                    f"{ref_path.name}:{lineno}: unknown submission id {sid!r}"
                )
            if not submissions[sid].reference_entries:
                submissions[sid] = replace(
                    submissions[sid], reference_entries=tuple(obj.get("entries", ()))
                )

    reviews: list[ReviewRecord] = []
    seen_pairs: set[tuple[str, str]] = set()
    review_path = root / REVIEWS_FILE
    for lineno, obj in _read_jsonl(review_path):
        record = _build(ReviewRecord, review_path, lineno, obj)
        if record.submission_id not in submissions:
            raise ReferentialError(
                f"{review_path.name}:{lineno}: review references unknown "
                f"submission {record.submission_id!r}"
            )
        if record.reviewer_id not in reviewers:
            raise ReferentialError(
                f"{review_path.name}:{lineno}: review references unknown "
                f"reviewer {record.reviewer_id!r}"
            )
        if record.pair in seen_pairs:
            raise ValidationError(
                f"{review_path.name}:{lineno}: duplicate review for pair {record.pair}"
            )
        seen_pairs.add(record.pair)
        _validate_scales(record, config, f"{review_path.name}:{lineno}")
        reviews.append(record)

    reviews.sort(key=lambda r: r.pair)
    return ReviewDataset(
        config=config, reviewers=reviewers, submissions=submissions, reviews=tuple(reviews)
    )


def _validate_scales(record: ReviewRecord, config: VenueConfig, where: str) -> None:
    if not config.score_min <= record.score <= config.score_max:
        raise ValidationError(
            f"{where}: {record._tag()} has score {record.score} outside "
            f"[{config.score_min}, {config.score_max}]"
        )
    lo, hi = config.expertise_scale
    if not lo <= record.sr_expertise <= hi:
        raise ValidationError(
            f"{where}: {record._tag()} has sr_expertise {record.sr_expertise} "
            f"outside [{lo}, {hi}]"
        )
    if record.sr_confidence is not None and not lo <= record.sr_confidence <= hi:
        raise ValidationError(
            f"{where}: {record._tag()} has sr_confidence {record.sr_confidence} "
            f"outside [{lo}, {hi}]"
        )
    if record.bid is not None and config.bid_scale is not None:
        blo, bhi = config.bid_scale
        if not blo <= record.bid <= bhi:
            raise ValidationError(
                f"{where}: {record._tag()} has bid {record.bid} outside [{blo}, {bhi}]"
            )
    if record.preference_value is not None and config.preference_range is not None:
        plo, phi = config.preference_range
        if not plo <= record.preference_value <= phi:
            raise ValidationError(
                f"{where}: {record._tag()} has preference_value {record.preference_value} "
                f"outside [{plo}, {phi}]"
            )


def _reviewer_dict(r: Reviewer) -> dict:
    return {
        "id": r.id,
        "last_name": r.last_name,
        "first_name": r.first_name,
        "seniority": r.seniority,
        "has_text_profile": r.has_text_profile,
    }


def _submission_dict(s: Submission) -> dict:
    return {
        "id": s.id,
        "reference_entries": list(s.reference_entries),
        "withdrawn": s.withdrawn,
    }


def _review_dict(r: ReviewRecord) -> dict:
    obj = {
        "submission_id": r.submission_id,
        "reviewer_id": r.reviewer_id,
        "score": r.score,
        "sr_expertise": r.sr_expertise,
        "missing_citation_flag": r.missing_citation_flag,
        "exclusion_adjudicated": r.exclusion_adjudicated,
    }
    for name in ("sr_confidence", "text_overlap", "bid", "preference_value"):
        value = getattr(r, name)
        if value is not None:
            obj[name] = value
    return obj


def venue_config_dict(config: VenueConfig) -> dict:
    obj = {
        "score_min": config.score_min,
        "score_max": config.score_max,
        "venue_policy": config.venue_policy.value,
        "expertise_scale": list(config.expertise_scale),
    }
    if config.bid_scale is not None:
        obj["bid_scale"] = list(config.bid_scale)
    if config.preference_range is not None:
        obj["preference_range"] = list(config.preference_range)
    return obj


def save_dataset(dataset: ReviewDataset, path: Path | str) -> None:
    """Write the canonical serialization; ``load_dataset`` round-trips it byte-identically."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    with (root / VENUE_FILE).open("w", encoding="utf-8") as fh:
        json.dump(venue_config_dict(dataset.config), fh, sort_keys=True, indent=2)
        fh.write("\n")
    with (root / REVIEWERS_FILE).open("w", encoding="utf-8") as fh:
        for _, reviewer in sorted(dataset.reviewers.items()):
            fh.write(_json_line(_reviewer_dict(reviewer)))
    with (root / SUBMISSIONS_FILE).open("w", encoding="utf-8") as fh:
        for _, submission in sorted(dataset.submissions.items()):
            fh.write(_json_line(_submission_dict(submission)))
    with (root / REVIEWS_FILE).open("w", encoding="utf-8") as fh:
        for record in sorted(dataset.reviews, key=lambda r: r.pair):
            fh.write(_json_line(_review_dict(record)))


def _ec_missing(value: int | None) -> bool:
    # The venue reserves a stored 0 for "not reported", so 0 counts as missing.
    return value is None or value == 0


def derive_covariates(dataset: ReviewDataset) -> ReviewDataset:
    """Attach per-pair covariates following the venue policy.

    EC-like: raw preferences become within-reviewer percentiles over that
    reviewer's positive preferences (0 = top choice, 100 = bottom; a single
    positive preference maps to 0), with missing preferences encoded as
    (pref_perc=0, missing_pref=1).  ICML-like: the covariate vector carries
    the raw variables and pairs missing any of them are marked droppable.

    Idempotent: re-deriving replaces the attached covariates with identical
    values.
    """
    policy = dataset.config.venue_policy
    derived: dict[tuple[str, str], DerivedCovariates] = {}

    if policy == VenuePolicy.EC_LIKE:
        by_reviewer: dict[str, list[int]] = {}
        for record in dataset.reviews:
            if record.preference_value is not None and record.preference_value > 0:
                by_reviewer.setdefault(record.reviewer_id, []).append(record.preference_value)
        for record in dataset.reviews:
            seniority = dataset.reviewers[record.reviewer_id].seniority
            pref = record.preference_value
            if _ec_missing(pref):
                pref_perc, missing = 0.0, 1
            elif pref < 0:
                warnings.warn(
                    f"{record._tag()}: assigned despite negative preference {pref}",
                    UserWarning,
                    stacklevel=2,
                )
                pref_perc, missing = 100.0, 0
            else:
                pool = by_reviewer[record.reviewer_id]
                greater = sum(1 for v in pool if v > pref)
                pref_perc = 0.0 if len(pool) == 1 else 100.0 * greater / (len(pool) - 1)
                missing = 0
            vector = (
                ("sr_expertise", float(record.sr_expertise)),
                ("pref_perc", pref_perc),
                ("missing_pref", float(missing)),
                ("seniority", float(seniority)),
            )
            derived[record.pair] = DerivedCovariates(
                pref_perc=pref_perc, missing_pref=missing, covariate_vector=vector
            )
    else:
        for record in dataset.reviews:
            seniority = dataset.reviewers[record.reviewer_id].seniority
            vector = (
                ("sr_expertise", float(record.sr_expertise)),
                (
                    "sr_confidence",
                    None if record.sr_confidence is None else float(record.sr_confidence),
                ),
                ("text_overlap", record.text_overlap),
                ("bid", None if record.bid is None else float(record.bid)),
                ("seniority", float(seniority)),
            )
            derived[record.pair] = DerivedCovariates(
                pref_perc=None, missing_pref=None, covariate_vector=vector
            )

    return replace(dataset, derived=derived)


def summarize(dataset: ReviewDataset, relation: "CitationRelation") -> SummaryTable:
    """Headline counts over non-withdrawn submissions and the citation relation."""
    active = dataset.active_submissions()
    by_submission = dataset.reviews_by_submission()
    n_cited = 0
    for submission in active:
        records = by_submission.get(submission.id, [])
        if any(relation.indicator(r.pair) for r in records):
            n_cited += 1
    fraction = n_cited / len(active) if active else 0.0
    return SummaryTable(
        n_reviewers=len(dataset.reviewers),
        n_submissions=len(active),
        n_with_cited_reviewer=n_cited,
        fraction_with_cited=fraction,
    )
