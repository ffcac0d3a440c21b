"""Paper-reviewer assignment maximizing similarity plus a weighted citation count.

The objective sum(sim) + lambda * sum(cited) is solved exactly as an integral
min-cost flow after scaling utilities to integers (x 1e6, round-half-even),
so optimality never hinges on float comparisons.  Reported quality is the
similarity sum at that integer resolution.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING

import networkx as nx

from .dataset import ReviewDataset, VenuePolicy
from .errors import InfeasibleAssignmentError, ValidationError

if TYPE_CHECKING:  # pragma: no cover
    from .citations import CitationRelation

Pair = tuple[str, str]

SCALE = 10**6


@dataclass(frozen=True)
class SimilarityMatrix:
    """Similarity in [0, 1] for every allowed pair; forbidden pairs are never assigned."""

    sim: dict[Pair, float]
    forbidden: frozenset[Pair] = frozenset()

    def __post_init__(self):
        for pair, value in self.sim.items():
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"similarity for {pair} must lie in [0, 1], got {value}")

    def papers(self) -> list[str]:
        return sorted({p for p, _ in self.sim} | {p for p, _ in self.forbidden})

    def reviewers(self) -> list[str]:
        return sorted({r for _, r in self.sim} | {r for _, r in self.forbidden})

    def allowed_pairs(self) -> list[Pair]:
        return sorted(pair for pair in self.sim if pair not in self.forbidden)


@dataclass(frozen=True)
class AssignmentSpec:
    paper_load: int
    reviewer_cap: int
    citation_weight: float  # the tunable lambda balancing quality vs cited pairs

    def __post_init__(self):
        if self.paper_load < 1 or self.reviewer_cap < 1:
            raise ValidationError("paper_load and reviewer_cap must be positive")
        if self.citation_weight < 0:
            raise ValidationError("the citation weight must be non-negative")


@dataclass(frozen=True)
class Assignment:
    pairs: frozenset[Pair]
    objective_quality: float
    cited_count: int

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)


@dataclass(frozen=True)
class SweepPoint:
    citation_weight: float
    objective_quality: float
    cited_count: int


def _cited(relation: "CitationRelation | None", pair: Pair) -> bool:
    return False if relation is None else relation.indicator(pair)


def _check_feasible(sim: SimilarityMatrix, spec: AssignmentSpec) -> tuple[list[str], list[str]]:
    papers = sim.papers()
    reviewers = sim.reviewers()
    if not papers or not reviewers:
        raise InfeasibleAssignmentError("no papers or no reviewers in the instance")
    allowed_per_paper: dict[str, int] = {p: 0 for p in papers}
    usable_reviewers: set[str] = set()
    for p, r in sim.allowed_pairs():
        allowed_per_paper[p] += 1
        usable_reviewers.add(r)
    for paper, count in allowed_per_paper.items():
        if count < spec.paper_load:
            raise InfeasibleAssignmentError(
                f"paper {paper!r} has only {count} allowed reviewers for load {spec.paper_load}"
            )
    demand = spec.paper_load * len(papers)
    capacity = spec.reviewer_cap * len(usable_reviewers)
    if demand > capacity:
        raise InfeasibleAssignmentError(
            f"total demand {demand} exceeds reviewer capacity {capacity} "
            f"({len(papers)} papers x load {spec.paper_load} vs "
            f"{len(usable_reviewers)} assignable reviewers x cap {spec.reviewer_cap})"
        )
    return papers, reviewers


def solve(
    sim: SimilarityMatrix,
    relation: "CitationRelation | None",
    spec: AssignmentSpec,
) -> Assignment:
    """Exact maximizer of sum(sim) + lambda * sum(cited) under load constraints.

    Deterministic: equal-objective solutions are broken toward
    lexicographically earlier (submission_id, reviewer_id) pairs via an
    integer rank perturbation below the objective's resolution.
    """
    papers, reviewers = _check_feasible(sim, spec)
    allowed = sim.allowed_pairs()
    lam_scaled = round(spec.citation_weight * SCALE)

    utilities: dict[Pair, int] = {}
    for pair in allowed:
        util = round(sim.sim[pair] * SCALE)
        if _cited(relation, pair):
            util += lam_scaled
        utilities[pair] = util

    # Rank perturbation: dominate by M so the true objective always wins,
    # then prefer assignments whose chosen pairs rank earlier.
    n_selected = spec.paper_load * len(papers)
    m_factor = n_selected * len(allowed) + 1

    graph = nx.DiGraph()
    graph.add_node("src", demand=-n_selected)
    graph.add_node("snk", demand=n_selected)
    for paper in papers:
        graph.add_node(("p", paper), demand=0)
        graph.add_edge("src", ("p", paper), weight=0, capacity=spec.paper_load)
    for reviewer in reviewers:
        graph.add_node(("r", reviewer), demand=0)
        graph.add_edge(("r", reviewer), "snk", weight=0, capacity=spec.reviewer_cap)
    for rank, pair in enumerate(allowed):
        paper, reviewer = pair
        weight = -utilities[pair] * m_factor + rank
        graph.add_edge(("p", paper), ("r", reviewer), weight=weight, capacity=1)

    try:
        flow = nx.min_cost_flow(graph)
    except nx.NetworkXUnfeasible as exc:
        raise InfeasibleAssignmentError(
            "no feasible assignment: forbidden pairs make the load constraints unsatisfiable"
        ) from exc

    chosen: set[Pair] = set()
    for paper in papers:
        for (kind, reviewer), used in flow[("p", paper)].items():
            if used:
                chosen.add((paper, reviewer))

    return _as_assignment(chosen, sim, relation, spec)


def _as_assignment(
    pairs: set[Pair],
    sim: SimilarityMatrix,
    relation: "CitationRelation | None",
    spec: AssignmentSpec,
) -> Assignment:
    validate_assignment(pairs, sim, spec)
    quality_scaled = sum(round(sim.sim[pair] * SCALE) for pair in pairs)
    cited_count = sum(1 for pair in pairs if _cited(relation, pair))
    return Assignment(
        pairs=frozenset(pairs),
        objective_quality=quality_scaled / SCALE,
        cited_count=cited_count,
    )


def validate_assignment(pairs: set[Pair], sim: SimilarityMatrix, spec: AssignmentSpec) -> None:
    """Check exact paper load, reviewer cap, and forbidden-pair avoidance."""
    for pair in pairs:
        if pair in sim.forbidden:
            raise ValidationError(f"assignment uses forbidden pair {pair}")
        if pair not in sim.sim:
            raise ValidationError(f"assignment uses pair {pair} with no similarity entry")
    per_paper: dict[str, int] = {p: 0 for p in sim.papers()}
    per_reviewer: dict[str, int] = {r: 0 for r in sim.reviewers()}
    for paper, reviewer in pairs:
        per_paper[paper] += 1
        per_reviewer[reviewer] += 1
    for paper, count in per_paper.items():
        if count != spec.paper_load:
            raise ValidationError(
                f"paper {paper!r} has {count} reviewers, expected {spec.paper_load}"
            )
    for reviewer, count in per_reviewer.items():
        if count > spec.reviewer_cap:
            raise ValidationError(
                f"reviewer {reviewer!r} carries {count} papers, cap is {spec.reviewer_cap}"
            )


def tradeoff_sweep(
    sim: SimilarityMatrix,
    relation: "CitationRelation | None",
    spec: AssignmentSpec,
    lambdas: list[float],
) -> list[SweepPoint]:
    """One exact solve per lambda; cited_count rises and quality falls along the sweep."""
    points = []
    for weight in lambdas:
        if weight < 0:
            raise ValidationError(f"the citation weight must be non-negative, got {weight}")
        result = solve(sim, relation, replace(spec, citation_weight=weight))
        points.append(
            SweepPoint(
                citation_weight=weight,
                objective_quality=result.objective_quality,
                cited_count=result.cited_count,
            )
        )
    return points


def citation_coverage(assignment: Assignment, relation: "CitationRelation | None") -> float:
    """Fraction of assigned papers with at least one cited reviewer."""
    papers = {p for p, _ in assignment.pairs}
    if not papers:
        return 0.0
    covered = {p for p, r in assignment.pairs if _cited(relation, (p, r))}
    return len(covered) / len(papers)


@dataclass(frozen=True)
class AssignmentEdit:
    action: str  # "add" or "remove"
    submission_id: str
    reviewer_id: str


def apply_edits(
    assignment: Assignment,
    edits: list[AssignmentEdit],
    sim: SimilarityMatrix,
    relation: "CitationRelation | None",
    spec: AssignmentSpec,
) -> Assignment:
    """Apply manual post-edits and re-validate against all constraints."""
    pairs = set(assignment.pairs)
    for edit in edits:
        pair = (edit.submission_id, edit.reviewer_id)
        if edit.action == "add":
            if pair in pairs:
                raise ValidationError(f"edit adds already-assigned pair {pair}")
            pairs.add(pair)
        elif edit.action == "remove":
            if pair not in pairs:
                raise ValidationError(f"edit removes unassigned pair {pair}")
            pairs.remove(pair)
        else:
            raise ValidationError(f"unknown edit action {edit.action!r}")
    return _as_assignment(pairs, sim, relation, spec)


def forbidden_from_bids(dataset: ReviewDataset) -> frozenset[Pair]:
    """Hard-forbidden pairs: bid 2 ("not willing") under ICML rules, negative
    preference under EC rules.  Missing values are not forbidden."""
    policy = dataset.config.venue_policy
    forbidden: set[Pair] = set()
    for record in dataset.reviews:
        if policy == VenuePolicy.ICML_LIKE and record.bid == 2:
            forbidden.add(record.pair)
        if (
            policy == VenuePolicy.EC_LIKE
            and record.preference_value is not None
            and record.preference_value < 0
        ):
            forbidden.add(record.pair)
    return frozenset(forbidden)


def load_similarity(path: Path | str, forbidden: frozenset[Pair] = frozenset()) -> SimilarityMatrix:
    sim: dict[Pair, float] = {}
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                pair = (row["submission_id"], row["reviewer_id"])
                sim[pair] = float(row["sim"])
            except (KeyError, ValueError) as exc:
                raise ValidationError(f"bad similarity row {row!r}") from exc
    return SimilarityMatrix(sim=sim, forbidden=frozenset(forbidden))


def save_assignment(assignment: Assignment, path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["submission_id", "reviewer_id"])
        writer.writerows(assignment.sorted_pairs())


def load_assignment_pairs(path: Path | str) -> set[Pair]:
    pairs: set[Pair] = set()
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            pairs.add((row["submission_id"], row["reviewer_id"]))
    return pairs


def load_edits(path: Path | str) -> list[AssignmentEdit]:
    edits = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            edits.append(
                AssignmentEdit(
                    action=row["action"].strip().lower(),
                    submission_id=row["submission_id"],
                    reviewer_id=row["reviewer_id"],
                )
            )
    return edits
