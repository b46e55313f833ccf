"""Torsion solver: closed forms, identities, witnesses, serialization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import (
    fem_rigidity,
    lasso_rigidity,
    sampled_sup,
    stower_rigidity,
    stower_rigidity_equilateral,
)
from graphtorsion import (
    CrossCheckMismatch,
    PiecewiseQuadratic,
    ValidationError,
    ZeroEnergy,
    dirichlet_energy,
    make_graph,
    polya_quotient,
    reorient,
    rigidity,
    solution_from_payload,
    solution_to_payload,
    solve_discrete_torsion,
    torsion_function,
)
from graphtorsion.families import (
    caterpillar,
    family_examples,
    flower,
    lasso,
    path_dd,
    path_dn,
    pumpkin_chain,
    random_graph,
    star,
    stower,
)
from graphtorsion.torsion import _require_close, edgewise_dirichlet_quadratics

REL = 1e-10


def T(g):
    return torsion_function(g).rigidity


# -- closed forms ---------------------------------------------------------


def test_interval_one_dirichlet_end():
    for a in (0.3, 1.0, 2.7):
        assert T(path_dn([a])) == pytest.approx(a ** 3 / 3.0, rel=REL)


def test_interval_two_dirichlet_ends():
    for a in (0.3, 1.0, 2.7):
        assert T(path_dd([a])) == pytest.approx(a ** 3 / 12.0, rel=REL)


def test_interval_sup_values():
    assert torsion_function(path_dn([1.0])).sup.value == pytest.approx(0.5, rel=REL)
    assert torsion_function(path_dd([1.0])).sup.value == pytest.approx(0.125, rel=REL)


def test_star_closed_form():
    for k in (1, 2, 3, 5):
        for total in (1.0, 3.0):
            g = star(k, [total / k] * k)
            assert T(g) == pytest.approx(total ** 3 / (3.0 * k * k), rel=REL)


def test_star_arbitrary_lengths():
    lengths = [0.4, 1.1, 2.3]
    g = star(3, lengths)
    want = math.fsum(x ** 3 for x in lengths) / 12.0 + math.fsum(
        lengths
    ) ** 2 / (4.0 * math.fsum(1.0 / x for x in lengths))
    assert T(g) == pytest.approx(want, rel=REL)


def test_lasso_values():
    sol = torsion_function(lasso(1.0, 1.0))
    assert sol.rigidity == pytest.approx(29.0 / 12.0, rel=REL)
    assert sol.sup.value == pytest.approx(13.0 / 8.0, rel=REL)
    # the maximum sits at the loop midpoint
    assert sol.sup.edge == "e2"
    assert sol.sup.offset == pytest.approx(0.5, rel=1e-9)


def test_lasso_random_parameters():
    rng = np.random.default_rng(21)
    for _ in range(20):
        l1, l2 = rng.uniform(0.2, 3.0, 2)
        assert T(lasso(l1, l2)) == pytest.approx(lasso_rigidity(l1, l2), rel=REL)


def test_stower_random_parameters():
    rng = np.random.default_rng(22)
    for _ in range(20):
        leaves = int(rng.integers(1, 4))
        petals = int(rng.integers(0, 4))
        lengths = rng.uniform(0.2, 3.0, leaves + petals)
        g = stower(leaves, petals, list(lengths))
        want = stower_rigidity(lengths[:leaves], lengths[leaves:])
        assert T(g) == pytest.approx(want, rel=REL)


def test_stower_equilateral_count_form():
    for leaves, petals in ((1, 1), (2, 2), (3, 1)):
        g = stower(leaves, petals, [1.0] * (leaves + petals))
        want = stower_rigidity_equilateral(leaves, petals, float(leaves + petals))
        assert T(g) == pytest.approx(want, rel=REL)


def test_flower_is_sum_of_loop_cubes():
    lengths = [0.5, 1.0, 2.0]
    assert T(flower(3, lengths)) == pytest.approx(
        math.fsum(x ** 3 for x in lengths) / 12.0, rel=REL
    )


def test_caterpillar_arbitrary_lengths():
    # T depends only on the total length, strands included
    g = pumpkin_chain([2, 2, 2], [0.3, 0.3, 1.0, 1.0, 0.7, 0.7])
    assert T(g) == pytest.approx(g.total_length() ** 3 / 12.0, rel=REL)
    c4 = caterpillar(4)
    assert T(c4) == pytest.approx(c4.total_length() ** 3 / 12.0, rel=REL)


# -- identities and invariants --------------------------------------------


def test_triple_identity_on_random_battery():
    rng = np.random.default_rng(42)
    for _ in range(120):
        g = random_graph(rng)
        sol = torsion_function(g)
        t_int = math.fsum(p.integral() for p in sol.edge_polys)
        t_energy = dirichlet_energy(sol)
        cubes = math.fsum(e.length ** 3 for e in g.edges) / 12.0
        t_formula = cubes + sol.discrete.discrete_rigidity / 4.0
        scale = max(abs(t_int), abs(t_energy), abs(t_formula))
        assert abs(t_int - t_energy) <= REL * scale
        assert abs(t_int - t_formula) <= REL * scale
        assert rigidity(sol) == pytest.approx(t_int, rel=REL)


def test_vertex_values_are_half_discrete():
    g = lasso(1.0, 1.0)
    disc = solve_discrete_torsion(g)
    sol = torsion_function(g)
    assert disc.values["v1"] == pytest.approx(3.0, rel=REL)
    assert sol.vertex_values["v1"] == pytest.approx(1.5, rel=REL)
    assert sol.vertex_values["v0"] == 0.0


def test_kirchhoff_residual_small():
    rng = np.random.default_rng(43)
    for _ in range(25):
        sol = torsion_function(random_graph(rng))
        assert sol.kirchhoff_residual <= 1e-10 * max(1.0, sol.sup.value)


def test_positivity_inside():
    rng = np.random.default_rng(44)
    for _ in range(25):
        g = random_graph(rng)
        sol = torsion_function(g)
        for p in sol.edge_polys:
            for x in np.linspace(0.0, p.length, 7)[1:-1]:
                assert p.value(float(x)) > 0.0


def test_sup_witness_matches_dense_sampling():
    rng = np.random.default_rng(45)
    for _ in range(15):
        sol = torsion_function(random_graph(rng))
        dense = sampled_sup(sol)
        assert sol.sup.value >= dense - 1e-12 * max(1.0, dense)
        assert sol.sup.value <= dense + 1e-4 * max(1.0, dense)


def test_orientation_invariance():
    g = lasso(1.3, 0.9)
    flipped = reorient(g, ["e1", "e2"])
    a, b = torsion_function(g), torsion_function(flipped)
    assert b.rigidity == pytest.approx(a.rigidity, rel=REL)
    assert b.sup.value == pytest.approx(a.sup.value, rel=REL)
    for vid, val in a.vertex_values.items():
        assert b.vertex_values[vid] == pytest.approx(val, rel=REL, abs=1e-15)


def test_cubic_scaling():
    g = random_graph(np.random.default_rng(46))
    c = 1.7
    scaled = make_graph(
        [(v.id, v.bc) for v in g.vertices],
        [(e.id, e.tail, e.head, c * e.length) for e in g.edges],
    )
    assert T(scaled) == pytest.approx(c ** 3 * T(g), rel=REL)


def test_degree_two_natural_vertex_is_invisible():
    # splitting an edge with a natural vertex changes nothing
    whole = path_dd([2.0])
    split = path_dd([0.6, 1.4])
    assert T(split) == pytest.approx(T(whole), rel=REL)


def test_fem_oracle_agreement():
    rng = np.random.default_rng(47)
    for _ in range(5):
        g = random_graph(rng, max_vertices=6, max_edges=8)
        h = min(e.length for e in g.edges) / 24.0
        exact = T(g)
        approx = fem_rigidity(g, h)
        assert approx == pytest.approx(exact, rel=5e-3)


# -- variational characterization -----------------------------------------


def test_polya_quotient_maximized_by_torsion():
    g = lasso(1.0, 1.0)
    sol = torsion_function(g)
    coeffs = {
        p.edge: (-0.5, p.b, p.c) for p in sol.edge_polys
    }
    q = polya_quotient(g, PiecewiseQuadratic(coeffs))
    assert q == pytest.approx(sol.rigidity, rel=REL)


def test_polya_quotient_other_functions_smaller():
    g = star(3, [1.0, 0.7, 1.5])
    t = T(g)
    base = edgewise_dirichlet_quadratics(g)
    q = polya_quotient(g, base)
    assert q < t
    # small admissible perturbations stay below the maximum
    sol = torsion_function(g)
    for bump in (0.9, 1.1):
        coeffs = {p.edge: (-0.5 * bump, p.b * bump, p.c * bump) for p in sol.edge_polys}
        assert polya_quotient(g, PiecewiseQuadratic(coeffs)) <= t + 1e-9 * t


def test_polya_quotient_rejects_discontinuous():
    g = path_dn([1.0, 1.0])
    coeffs = {"e1": (0.0, 0.0, 1.0), "e2": (0.0, 0.0, 5.0)}
    with pytest.raises(ValidationError):
        polya_quotient(g, PiecewiseQuadratic(coeffs))


def test_polya_quotient_rejects_nonvanishing_dirichlet():
    g = path_dn([1.0])
    coeffs = {"e1": (0.0, 0.0, 2.0)}
    with pytest.raises(ValidationError):
        polya_quotient(g, PiecewiseQuadratic(coeffs))


def test_polya_quotient_zero_function():
    g = path_dn([1.0])
    coeffs = {"e1": (0.0, 0.0, 0.0)}
    with pytest.raises(ZeroEnergy):
        polya_quotient(g, PiecewiseQuadratic(coeffs))


# -- plumbing -------------------------------------------------------------


def test_require_close_raises_on_gap():
    with pytest.raises(CrossCheckMismatch):
        _require_close("a", 1.0, "b", 1.0 + 1e-6)


def test_solution_payload_round_trip():
    sol = torsion_function(lasso(1.1, 0.6))
    back = solution_from_payload(solution_to_payload(sol))
    assert back.rigidity == sol.rigidity
    assert back.vertex_values == sol.vertex_values
    assert back.sup.value == sol.sup.value


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_rigidity_positive_and_bounded(seed):
    g = random_graph(seed)
    t = T(g)
    total = g.total_length()
    assert 0.0 < t < total ** 3 / 3.0 + 1e-12 * total ** 3
