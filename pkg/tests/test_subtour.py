import itertools
import json
import math

import numpy as np
import pytest

from gaplab.exact import held_karp
from gaplab.instances import DomainError, pairwise_distances
from gaplab.lp_solver import DenseLp, LpStatus, solve
from gaplab.subtour import (
    CutRoundLimitError,
    EdgeValueMap,
    build_half_integral,
    closed_form_lp_value,
    closed_form_lp_value_variant,
    connected_components,
    edge_endpoints,
    separate,
    solve_subtour_lp,
    stoer_wagner,
)

from conftest import EQUILATERAL, UNIT_SQUARE, gline_instance


def edge_map_from_matrix(W):
    n = len(W)
    edges = {(i, j): float(W[i, j]) for i in range(n) for j in range(i + 1, n) if W[i, j] > 0}
    return EdgeValueMap(n_points=n, edges=edges, objective_value=0.0)


def exhaustive_min_cut(W):
    """Oracle: min over all proper nonempty subsets of the crossing weight."""
    n = len(W)
    best = math.inf
    for size in range(1, n):
        for S in itertools.combinations(range(n), size):
            mask = np.zeros(n, dtype=bool)
            mask[list(S)] = True
            best = min(best, float(W[mask][:, ~mask].sum()))
    return best


def test_solve_subtour_lp_reference_value():
    x, cuts = solve_subtour_lp(gline_instance(6, 3.0))
    assert x.objective_value == pytest.approx(3 * 6 - 4 + 9 + math.sqrt(10), abs=1e-5)
    assert x.max_degree_violation() <= 1e-6
    assert separate(x) is None
    assert all(0 < len(c.subset) < 18 and c.violation > 0 for c in cuts)


def test_solve_subtour_lp_triangle():
    x, _ = solve_subtour_lp(EQUILATERAL)
    assert x.objective_value == pytest.approx(3.0, abs=1e-6)


def test_solve_subtour_lp_unit_square():
    x, _ = solve_subtour_lp(UNIT_SQUARE)
    assert x.objective_value == pytest.approx(4.0, abs=1e-6)


def test_solve_subtour_lp_needs_three_points():
    with pytest.raises(DomainError):
        solve_subtour_lp(np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_separate_disconnected_support():
    W = np.zeros((6, 6))
    for tri in ([0, 1, 2], [3, 4, 5]):
        for i, j in itertools.combinations(tri, 2):
            W[i, j] = W[j, i] = 1.0
    S = separate(edge_map_from_matrix(W))
    assert S in (frozenset({0, 1, 2}), frozenset({3, 4, 5}))


def test_separate_hamiltonian_cycle_is_clean():
    n = 8
    W = np.zeros((n, n))
    for i in range(n):
        W[i, (i + 1) % n] = W[(i + 1) % n, i] = 1.0
    assert separate(edge_map_from_matrix(W)) is None


def test_separate_half_integral_witness():
    assert separate(build_half_integral(gline_instance(18, 3.0))) is None


def test_separate_finds_violated_cut():
    # two triangles joined by a single edge pair of weight 1/2 each: the
    # bridge cut has weight 1 < 2
    W = np.zeros((6, 6))
    for tri in ([0, 1, 2], [3, 4, 5]):
        for i, j in itertools.combinations(tri, 2):
            W[i, j] = W[j, i] = 1.0
    W[2, 3] = W[3, 2] = 0.5
    W[0, 5] = W[5, 0] = 0.5
    S = separate(edge_map_from_matrix(W))
    assert S is not None
    mask = np.zeros(6, dtype=bool)
    mask[list(S)] = True
    assert W[mask][:, ~mask].sum() < 2 - 1e-6


def test_stoer_wagner_matches_exhaustive_oracle(rng):
    for n in (4, 6, 8, 10, 12):
        W = rng.uniform(0.0, 1.0, size=(n, n))
        W = np.triu(W, 1)
        W = W + W.T
        W[W < 0.3] = 0.0
        value, side, _ = stoer_wagner(W)
        assert 0 < len(side) < n
        mask = np.zeros(n, dtype=bool)
        mask[list(side)] = True
        assert W[mask][:, ~mask].sum() == pytest.approx(value, abs=1e-9)
        assert value == pytest.approx(exhaustive_min_cut(W), abs=1e-9)


def test_stoer_wagner_on_lp_solutions(rng):
    pts = rng.uniform(0.0, 10.0, size=(9, 2))
    x, _ = solve_subtour_lp(pts)
    W = x.as_matrix()
    assert x.min_cut() == pytest.approx(exhaustive_min_cut(W), abs=1e-6)
    assert x.min_cut() >= 2 - 1e-6


def test_connected_components():
    adj = np.zeros((5, 5), dtype=bool)
    adj[0, 1] = adj[1, 0] = True
    adj[2, 3] = adj[3, 2] = True
    comps = connected_components(adj)
    assert comps == [[0, 1], [2, 3], [4]]


@pytest.mark.parametrize("n,d", [(3, 4.0), (6, 3.0), (18, 3.0)])
def test_half_integral_witness_invariants(n, d):
    witness = build_half_integral(gline_instance(n, d))
    assert witness.max_degree_violation() <= 1e-12
    assert witness.min_cut() >= 2 - 1e-12
    assert witness.objective_value == pytest.approx(closed_form_lp_value(n, d), abs=1e-9)
    assert set(witness.edges.values()) <= {0.5, 1.0}


def test_half_integral_reference_objectives():
    assert build_half_integral(gline_instance(18, 3.0)).objective_value \
        == pytest.approx(3 * 18 - 4 + 9 + math.sqrt(10), abs=1e-9)
    assert build_half_integral(gline_instance(3, 4.0)).objective_value \
        == pytest.approx(5 + 12 + math.sqrt(17), abs=1e-9)


def test_half_integral_rejects_foreign_points():
    with pytest.raises(DomainError):
        build_half_integral(UNIT_SQUARE)  # raw arrays are not instances
    inst = gline_instance(4, 4.0)
    tampered = inst.__class__(spec=inst.spec,
                              points=inst.points[::-1], roles=inst.roles)
    with pytest.raises(DomainError):
        build_half_integral(tampered)


def test_closed_form_values():
    assert closed_form_lp_value(18, math.sqrt(17)) \
        == pytest.approx(50 + 3 * math.sqrt(17) + math.sqrt(18), abs=1e-12)
    assert closed_form_lp_value(3, 4.0) == pytest.approx(17 + math.sqrt(17), abs=1e-12)
    assert closed_form_lp_value_variant(3, 4.0) == pytest.approx(18 + math.sqrt(17), abs=1e-12)
    with pytest.raises(DomainError):
        closed_form_lp_value(2, 1.0)


def test_lp_below_feasible_witness():
    inst = gline_instance(8, 4.0)
    x, _ = solve_subtour_lp(inst)
    assert x.objective_value <= build_half_integral(inst).objective_value + 1e-7


def test_lp_below_optimal_tour(rng):
    for n, d in ((3, 4.0), (4, 3.0), (5, 1.0), (6, 4.0)):
        inst = gline_instance(n, d)
        x, _ = solve_subtour_lp(inst)
        assert x.objective_value <= held_karp(inst).length + 1e-6
    for _ in range(4):
        pts = rng.uniform(0.0, 10.0, size=(8, 2))
        x, _ = solve_subtour_lp(pts)
        assert x.objective_value <= held_karp(pts).length + 1e-6


def test_construction_matches_lp_where_it_is_optimal():
    # spot checks of the closed form grid; the even-n d=1 exception is
    # documented in test_unit_spacing_even_n_is_integral below
    for n, d in ((3, 1.0), (5, 1.0), (7, 3.0), (9, 4.0), (10, 3.0)):
        x, _ = solve_subtour_lp(gline_instance(n, d))
        assert x.objective_value == pytest.approx(closed_form_lp_value(n, d), abs=1e-5)


def test_unit_spacing_even_n_is_integral():
    # at d = 1 and even n the 3xn grid has a Hamiltonian cycle of unit
    # edges, every pairwise distance is >= 1, and degree rows force
    # sum(x) = 3n, so the LP optimum is exactly 3n, strictly below the
    # half-integral construction value 3n - 1 + sqrt(2)
    for n in (4, 6, 8):
        inst = gline_instance(n, 1.0)
        x, _ = solve_subtour_lp(inst)
        assert x.objective_value == pytest.approx(3 * n, abs=1e-6)
        assert x.objective_value < closed_form_lp_value(n, 1.0) - 0.4
        if 3 * n <= 18:
            assert held_karp(inst).length == pytest.approx(3 * n, abs=1e-9)


def directed_subtour_optimum(points):
    """Independent oracle: the directed two-degree formulation with every
    subset row enumerated up front, solved as one dense LP."""
    dist = pairwise_distances(points)
    n = len(points)
    arcs = [(i, j) for i in range(n) for j in range(n) if i != j]
    idx = {a: k for k, a in enumerate(arcs)}
    nv = len(arcs)
    costs = np.array([dist[i, j] for i, j in arcs])
    eq = []
    for v in range(n):
        row = np.zeros(nv)
        for j in range(n):
            if j != v:
                row[idx[(v, j)]] = 1.0
        eq.append((row, 1.0))
    for v in range(n):
        row = np.zeros(nv)
        for j in range(n):
            if j != v:
                row[idx[(j, v)]] = 1.0
        eq.append((row, 1.0))
    ineq = []
    for size in range(2, n):
        for S in itertools.combinations(range(n), size):
            row = np.zeros(nv)
            for i, j in itertools.permutations(S, 2):
                row[idx[(i, j)]] = 1.0
            ineq.append((row, float(size - 1)))
    sol = solve(DenseLp(objective=costs, eq_rows=eq, ineq_rows=ineq,
                        var_bounds=[(0.0, 1.0)] * nv))
    assert sol.status is LpStatus.OPTIMAL
    return sol.objective_value


def test_directed_formulation_equivalence(rng):
    cases = [UNIT_SQUARE,
             gline_instance(2, 3.0).coords(),
             rng.uniform(0.0, 10.0, size=(7, 2)),
             rng.uniform(0.0, 10.0, size=(8, 2))]
    for pts in cases:
        x, _ = solve_subtour_lp(pts)
        assert x.objective_value == pytest.approx(directed_subtour_optimum(pts), abs=1e-6)


def test_edge_value_map_json():
    x, _ = solve_subtour_lp(EQUILATERAL)
    doc = json.loads(x.to_json())
    assert doc["objective"] == pytest.approx(3.0, abs=1e-6)
    assert sorted(tuple(e[:2]) for e in doc["edges"]) == [(0, 1), (0, 2), (1, 2)]


def test_cut_round_cap_raises(monkeypatch):
    import gaplab.subtour as sub
    monkeypatch.setattr(sub, "CUT_ROUND_FACTOR", 0)
    with pytest.raises(CutRoundLimitError):
        sub.solve_subtour_lp(gline_instance(6, 3.0))


def enumerated_subtour_optimum_scipy(points):
    """Second independent oracle: one LP with every subset row enumerated,
    solved by an external solver (HiGHS)."""
    linprog = pytest.importorskip("scipy.optimize").linprog
    dist = pairwise_distances(points)
    n = len(points)
    I, J = edge_endpoints(n)
    costs = dist[I, J]
    a_eq = np.zeros((n, len(costs)))
    for v in range(n):
        a_eq[v, (I == v) | (J == v)] = 1.0
    rows = []
    rhs = []
    for size in range(2, n - 1):
        for S in itertools.combinations(range(n), size):
            mask = np.zeros(n, dtype=bool)
            mask[list(S)] = True
            rows.append((mask[I] & mask[J]).astype(float))
            rhs.append(size - 1.0)
    res = linprog(costs, A_ub=np.array(rows), b_ub=np.array(rhs),
                  A_eq=a_eq, b_eq=np.full(n, 2.0),
                  bounds=[(0.0, 1.0)] * len(costs), method="highs")
    assert res.status == 0
    return res.fun


def test_cutting_plane_matches_enumerated_lp(rng):
    for n in (6, 7, 8, 9, 10, 11):
        pts = rng.uniform(0.0, 10.0, size=(n, 2))
        x, _ = solve_subtour_lp(pts)
        ref = enumerated_subtour_optimum_scipy(pts)
        assert x.objective_value == pytest.approx(ref, abs=1e-6), f"n={n}"


def test_cutting_plane_matches_enumerated_lp_on_grid_family():
    for n, d in ((3, 1.0), (4, 1.0), (4, 2.0)):
        inst = gline_instance(n, d)
        x, _ = solve_subtour_lp(inst)
        ref = enumerated_subtour_optimum_scipy(inst.coords())
        assert x.objective_value == pytest.approx(ref, abs=1e-6)


def test_clustered_points_heavily_degenerate(rng):
    # two tight clusters force a deep fractional optimum with many cuts
    a = rng.normal(0.0, 0.05, size=(7, 2))
    b = rng.normal(0.0, 0.05, size=(7, 2)) + [10.0, 0.0]
    pts = np.vstack([a, b])
    x, cuts = solve_subtour_lp(pts)
    assert x.max_degree_violation() <= 1e-6
    assert x.min_cut() >= 2 - 1e-6
    assert len(cuts) >= 1
    assert x.objective_value <= held_karp(pts, max_points=14).length + 1e-6


def test_solve_subtour_lp_deterministic(rng):
    pts = rng.uniform(0.0, 10.0, size=(9, 2))
    x1, cuts1 = solve_subtour_lp(pts)
    x2, cuts2 = solve_subtour_lp(pts)
    assert x1.objective_value == x2.objective_value
    assert x1.edges == x2.edges
    assert [c.subset for c in cuts1] == [c.subset for c in cuts2]


@pytest.mark.parametrize("n", [12, 14, 16, 20, 24])
def test_construction_stays_lp_optimal_into_the_proven_regime(n):
    # the sqrt(n-1) spacing regime: the cutting-plane optimum keeps landing
    # exactly on the closed form well beyond the small acceptance grid
    d = math.sqrt(n - 1)
    x, _ = solve_subtour_lp(gline_instance(n, d))
    assert x.objective_value == pytest.approx(closed_form_lp_value(n, d), abs=1e-7)
    assert x.min_cut() >= 2 - 1e-6


def test_half_integral_witness_in_other_metrics():
    # for p != 2 the witness is still a feasible point of that metric's LP,
    # so it upper-bounds the cutting-plane optimum
    from gaplab.instances import INF
    for p in (1, 3, INF):
        inst = gline_instance(5, 4.0, p=p)
        witness = build_half_integral(inst)
        assert witness.max_degree_violation() <= 1e-12
        x, _ = solve_subtour_lp(inst)
        assert x.objective_value <= witness.objective_value + 1e-7
