"""Exactness, tie handling, monotonicity, and constraint checks for the solver."""

from itertools import combinations, product

import numpy as np
import pytest

from revaudit.assignment import (
    SCALE,
    Assignment,
    AssignmentEdit,
    AssignmentSpec,
    SimilarityMatrix,
    apply_edits,
    citation_coverage,
    forbidden_from_bids,
    solve,
    tradeoff_sweep,
    validate_assignment,
)
from revaudit.citations import CitationRelation
from revaudit.dataset import VenueConfig
from revaudit.errors import InfeasibleAssignmentError, ValidationError
from conftest import build_dataset, review, reviewer, submission


def brute_force_best_objective(sim: SimilarityMatrix, relation, spec: AssignmentSpec):
    """Exhaustive enumeration over all feasible assignments (integer objective)."""
    papers = sim.papers()
    reviewers = sim.reviewers()
    allowed = set(sim.allowed_pairs())
    lam_scaled = round(spec.citation_weight * SCALE)
    per_paper = [
        [c for c in combinations(reviewers, spec.paper_load)
         if all((p, r) in allowed for r in c)]
        for p in papers
    ]
    best = None
    for combo in product(*per_paper):
        loads = {}
        feasible = True
        for chosen in combo:
            for r in chosen:
                loads[r] = loads.get(r, 0) + 1
                if loads[r] > spec.reviewer_cap:
                    feasible = False
        if not feasible:
            continue
        pairs = {(p, r) for p, chosen in zip(papers, combo) for r in chosen}
        quality = sum(round(sim.sim[pair] * SCALE) for pair in pairs)
        cited = sum(1 for pair in pairs if relation is not None and relation.indicator(pair))
        objective = quality + lam_scaled * cited
        if best is None or objective > best:
            best = objective
    return best


def objective_of(assignment: Assignment, sim, relation, spec) -> int:
    quality = sum(round(sim.sim[pair] * SCALE) for pair in assignment.pairs)
    cited = sum(1 for pair in assignment.pairs if relation is not None and relation.indicator(pair))
    return quality + round(spec.citation_weight * SCALE) * cited


TWO_BY_TWO = SimilarityMatrix(
    sim={("p1", "r1"): 0.9, ("p1", "r2"): 0.1, ("p2", "r1"): 0.2, ("p2", "r2"): 0.8}
)
TWO_BY_TWO_RELATION = CitationRelation(
    cited={("p1", "r2"): True, ("p1", "r1"): False, ("p2", "r1"): False, ("p2", "r2"): False}
)


def test_two_by_two_similarity_only():
    result = solve(TWO_BY_TWO, TWO_BY_TWO_RELATION, AssignmentSpec(1, 1, 0.0))
    assert result.pairs == {("p1", "r1"), ("p2", "r2")}
    assert result.objective_quality == pytest.approx(1.7)
    assert result.cited_count == 0


def test_two_by_two_citation_weight_flips_matching():
    result = solve(TWO_BY_TWO, TWO_BY_TWO_RELATION, AssignmentSpec(1, 1, 2.0))
    assert result.pairs == {("p1", "r2"), ("p2", "r1")}
    assert result.objective_quality == pytest.approx(0.3)
    assert result.cited_count == 1


def test_zero_lambda_equals_plain_similarity_maximizer():
    spec = AssignmentSpec(1, 1, 0.0)
    with_relation = solve(TWO_BY_TWO, TWO_BY_TWO_RELATION, spec)
    without = solve(TWO_BY_TWO, None, spec)
    assert with_relation.pairs == without.pairs
    assert with_relation.objective_quality == without.objective_quality


def random_instance(rng, max_side=4, max_load=2):
    n_papers = int(rng.integers(2, max_side + 1))
    n_reviewers = int(rng.integers(2, max_side + 1))
    k = int(rng.integers(1, max_load + 1))
    cap = int(rng.integers(1, 4))
    if k > n_reviewers or k * n_papers > cap * n_reviewers:
        return None
    papers = [f"p{i}" for i in range(n_papers)]
    reviewers = [f"r{j}" for j in range(n_reviewers)]
    sim = SimilarityMatrix(
        sim={(p, r): float(np.round(rng.random(), 6)) for p in papers for r in reviewers}
    )
    relation = CitationRelation(
        cited={(p, r): bool(rng.random() < 0.3) for p in papers for r in reviewers}
    )
    weight = float(rng.choice([0.0, 0.25, 1.0, 3.0]))
    return sim, relation, AssignmentSpec(k, cap, weight)


def test_exhaustive_optimality_on_small_instances():
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 60:
        instance = random_instance(rng)
        if instance is None:
            continue
        sim, relation, spec = instance
        result = solve(sim, relation, spec)
        assert objective_of(result, sim, relation, spec) == brute_force_best_objective(
            sim, relation, spec
        )
        validate_assignment(set(result.pairs), sim, spec)
        checked += 1


def test_determinism():
    rng = np.random.default_rng(7)
    instance = None
    while instance is None:
        instance = random_instance(rng)
    sim, relation, spec = instance
    assert solve(sim, relation, spec) == solve(sim, relation, spec)


def test_sweep_monotonicity_on_random_instance():
    rng = np.random.default_rng(99)
    papers = [f"p{i}" for i in range(6)]
    reviewers = [f"r{j}" for j in range(9)]
    sim = SimilarityMatrix(
        sim={(p, r): float(rng.random()) for p in papers for r in reviewers}
    )
    relation = CitationRelation(
        cited={(p, r): bool(rng.random() < 0.25) for p in papers for r in reviewers}
    )
    spec = AssignmentSpec(paper_load=2, reviewer_cap=2, citation_weight=0.0)
    lambdas = [round(0.15 * i, 2) for i in range(20)]
    points = tradeoff_sweep(sim, relation, spec, lambdas)
    for a, b in zip(points, points[1:]):
        assert b.cited_count >= a.cited_count
        assert b.objective_quality <= a.objective_quality + 1e-12


def test_large_lambda_attains_max_cited():
    rng = np.random.default_rng(5)
    papers = [f"p{i}" for i in range(4)]
    reviewers = [f"r{j}" for j in range(6)]
    sim = SimilarityMatrix(
        sim={(p, r): float(rng.random()) for p in papers for r in reviewers}
    )
    relation = CitationRelation(
        cited={(p, r): bool(rng.random() < 0.3) for p in papers for r in reviewers}
    )
    spec = AssignmentSpec(paper_load=2, reviewer_cap=2, citation_weight=0.0)
    big = solve(sim, relation, AssignmentSpec(2, 2, 10_000.0))
    # exhaustive max cited count
    best_cited = 0
    for combo in product(*[list(combinations(reviewers, 2))] * 4):
        loads = {}
        ok = True
        for chosen in combo:
            for r in chosen:
                loads[r] = loads.get(r, 0) + 1
                if loads[r] > 2:
                    ok = False
        if not ok:
            continue
        cited = sum(
            1 for p, chosen in zip(papers, combo) for r in chosen
            if relation.indicator((p, r))
        )
        best_cited = max(best_cited, cited)
    assert big.cited_count == best_cited


def test_ec_like_sweep_reaches_majority_coverage():
    # A venue-scale instance where a tuned citation weight should give more
    # than half the submissions a cited reviewer.
    rng = np.random.default_rng(17)
    papers = [f"p{i:03d}" for i in range(40)]
    reviewers = [f"r{j:03d}" for j in range(25)]
    sim = SimilarityMatrix(
        sim={(p, r): float(rng.random()) for p in papers for r in reviewers}
    )
    relation = CitationRelation(
        cited={(p, r): bool(rng.random() < 0.08) for p in papers for r in reviewers}
    )
    spec = AssignmentSpec(paper_load=3, reviewer_cap=6, citation_weight=0.0)
    coverages = []
    for weight in (0.0, 0.25, 0.5, 1.0, 2.0):
        result = solve(sim, relation, AssignmentSpec(3, 6, weight))
        coverages.append(citation_coverage(result, relation))
    assert max(coverages) > 0.5


def test_infeasible_paper_names_the_constraint():
    sim = SimilarityMatrix(
        sim={("p1", "r1"): 0.5},
        forbidden=frozenset({("p1", "r2")}),
    )
    with pytest.raises(InfeasibleAssignmentError, match="p1"):
        solve(sim, None, AssignmentSpec(2, 1, 0.0))


def test_infeasible_capacity_names_the_bound():
    sim = SimilarityMatrix(
        sim={(p, r): 0.5 for p in ("p1", "p2", "p3") for r in ("r1",)}
    )
    with pytest.raises(InfeasibleAssignmentError, match="capacity"):
        solve(sim, None, AssignmentSpec(1, 2, 0.0))


def test_capacity_counts_only_assignable_reviewers():
    # r2 exists but every pair of theirs is forbidden, so it adds no capacity.
    sim = SimilarityMatrix(
        sim={(p, "r1"): 0.5 for p in ("p1", "p2", "p3")},
        forbidden=frozenset({("p1", "r2"), ("p2", "r2"), ("p3", "r2")}),
    )
    with pytest.raises(InfeasibleAssignmentError, match="capacity"):
        solve(sim, None, AssignmentSpec(1, 2, 0.0))


def test_forbidden_pairs_never_assigned():
    sim = SimilarityMatrix(
        sim={("p1", "r1"): 0.9, ("p1", "r2"): 0.1, ("p2", "r1"): 0.9, ("p2", "r2"): 0.1},
        forbidden=frozenset({("p1", "r1")}),
    )
    result = solve(sim, None, AssignmentSpec(1, 1, 0.0))
    assert ("p1", "r1") not in result.pairs


def test_forbidden_from_bids_rules():
    ds_icml = build_dataset(
        VenueConfig.icml_like(),
        [reviewer("r1"), reviewer("r2")],
        [submission("s1")],
        [
            review("s1", "r1", 3, sr_expertise=2, bid=2),
            review("s1", "r2", 3, sr_expertise=2, bid=4),
        ],
    )
    assert forbidden_from_bids(ds_icml) == {("s1", "r1")}
    ds_ec = build_dataset(
        VenueConfig.ec_like(),
        [reviewer("r1"), reviewer("r2")],
        [submission("s1")],
        [
            review("s1", "r1", 3, sr_expertise=2, preference_value=-10),
            review("s1", "r2", 3, sr_expertise=2),
        ],
    )
    assert forbidden_from_bids(ds_ec) == {("s1", "r1")}


def test_manual_edits_revalidate():
    spec = AssignmentSpec(1, 1, 0.0)
    result = solve(TWO_BY_TWO, TWO_BY_TWO_RELATION, spec)
    swapped = apply_edits(
        result,
        [
            AssignmentEdit("remove", "p1", "r1"),
            AssignmentEdit("remove", "p2", "r2"),
            AssignmentEdit("add", "p1", "r2"),
            AssignmentEdit("add", "p2", "r1"),
        ],
        TWO_BY_TWO,
        TWO_BY_TWO_RELATION,
        spec,
    )
    assert swapped.pairs == {("p1", "r2"), ("p2", "r1")}
    assert swapped.cited_count == 1
    with pytest.raises(ValidationError):
        apply_edits(result, [AssignmentEdit("remove", "p1", "r1")], TWO_BY_TWO, None, spec)
