"""Length derivatives of rigidity and projected-gradient length optimization."""

import json

import numpy as np
import pytest

from graphtorsion import (
    BadParameters,
    NonPositiveLength,
    dT_dlength,
    grad_check,
    gradient,
    optimize,
    torsion_function,
    with_lengths,
)
from graphtorsion.families import lasso, path_dd, path_dn, random_graph, star
from graphtorsion.shape_opt import (
    FLOOR_REACHED,
    MAX_ITERS_EXCEEDED,
    STATIONARY,
    hadamard_at,
)


# -- derivative values ----------------------------------------------------


def test_known_derivatives():
    assert dT_dlength(lasso(1.0, 1.0), "e1") == pytest.approx(4.0, rel=1e-12)
    assert dT_dlength(path_dn([1.0]), "e1") == pytest.approx(1.0, rel=1e-12)
    assert dT_dlength(path_dd([1.0]), "e1") == pytest.approx(0.25, rel=1e-12)


def test_gradient_positive_everywhere():
    rng = np.random.default_rng(271)
    for _ in range(100):
        g = random_graph(rng)
        grads = gradient(g)
        assert set(grads) == {e.id for e in g.edges}
        assert all(v > 0 for v in grads.values())


def test_derivative_point_independent():
    rng = np.random.default_rng(9)
    for _ in range(20):
        g = random_graph(rng)
        sol = torsion_function(g)
        for e in g.edges:
            poly = sol.poly(e.id)
            vals = [hadamard_at(poly, x) for x in rng.uniform(0, e.length, 5)]
            spread = max(vals) - min(vals)
            assert spread <= 1e-10 * max(1.0, abs(vals[0]))


def test_grad_check_error_profile():
    # rigidity of the one-Dirichlet interval is cubic, so the central
    # difference misses by exactly step^2 / 3
    analytic, fd, err = grad_check(path_dn([1.0]), "e1", 1e-3)
    assert analytic == pytest.approx(1.0, rel=1e-12)
    assert err == pytest.approx(1e-6 / 3.0, rel=1e-3)
    assert abs(fd - analytic) == pytest.approx(err, abs=1e-15)
    _, _, err_half = grad_check(path_dn([1.0]), "e1", 5e-4)
    assert 3.5 <= err / err_half <= 4.5


def test_grad_check_matches_fd_on_families():
    for g in (lasso(), star(3, [0.5, 1.0, 2.0]), path_dd([1.0, 2.0])):
        for e in g.edges:
            step = 1e-3 * e.length
            analytic, fd, err = grad_check(g, e.id, step)
            assert err <= 1e-5 * max(1.0, abs(analytic))
            assert fd == pytest.approx(analytic, rel=1e-4)


def test_grad_check_rejects_bad_step():
    with pytest.raises(BadParameters):
        grad_check(lasso(), "e1", 0.0)
    with pytest.raises(BadParameters):
        grad_check(lasso(), "e1", 0.5)


def test_with_lengths_replaces_only_lengths():
    g = lasso(1.0, 1.0)
    h = with_lengths(g, {"e1": 2.0, "e2": 3.0})
    assert h.edge("e1").length == 2.0
    assert h.edge("e2").length == 3.0
    assert {v.id for v in h.vertices} == {v.id for v in g.vertices}
    partial = with_lengths(g, {"e1": 2.0})
    assert partial.edge("e2").length == 1.0
    with pytest.raises(NonPositiveLength):
        with_lengths(g, {"e1": 2.0, "e2": -1.0})


# -- optimizer ------------------------------------------------------------


def test_equilateral_two_star_is_stationary():
    traj = optimize(star(2, [1.0, 1.0]))
    assert traj.stop_reason == STATIONARY
    assert len(traj.points) == 1
    assert traj.final().lengths == {"e1": 1.0, "e2": 1.0}


def test_three_star_max_concentrates_length():
    g = with_lengths(star(3, [1.0, 1.0, 1.0]), {"e1": 0.5, "e2": 0.5, "e3": 2.0})
    traj = optimize(g, objective="max", max_iters=500)
    assert traj.stop_reason == FLOOR_REACHED
    f = traj.floor
    lengths = traj.final().lengths
    ordered = sorted(lengths.values())
    assert ordered[0] == pytest.approx(f, rel=1e-6)
    assert ordered[1] == pytest.approx(f, rel=1e-6)
    assert ordered[2] == pytest.approx(3.0 - ordered[0] - ordered[1], rel=1e-12)

    long = ordered[2]
    expect = (long**3 + 2 * f**3) / 12.0 + 9.0 / (4.0 * (1.0 / long + 2.0 / f))
    assert traj.final().rigidity == pytest.approx(expect, rel=1e-9)

    # Saint-Venant ceiling, monotone ascent, conserved total length
    prev = -1.0
    for p in traj.points:
        assert p.rigidity <= 27.0 / 3.0
        assert p.rigidity >= prev * (1.0 - 1e-12)
        prev = p.rigidity
        assert sum(p.lengths.values()) == pytest.approx(3.0, abs=1e-12 * 3.0)


def test_minimize_descends():
    traj = optimize(lasso(1.0, 1.0), objective="min", max_iters=60)
    rigs = [p.rigidity for p in traj.points]
    assert all(b <= a * (1 + 1e-12) for a, b in zip(rigs, rigs[1:]))
    assert rigs[-1] < rigs[0]


def test_max_iters_flagged():
    g = with_lengths(star(3, [1.0, 1.0, 1.0]), {"e1": 0.5, "e2": 0.5, "e3": 2.0})
    traj = optimize(g, max_iters=2)
    assert traj.stop_reason == MAX_ITERS_EXCEEDED
    assert traj.final().iteration == 2


def test_optimize_rejects_bad_parameters():
    with pytest.raises(BadParameters):
        optimize(lasso(), objective="sideways")
    with pytest.raises(BadParameters):
        optimize(lasso(), floor=-1.0)
    with pytest.raises(BadParameters):
        optimize(lasso(), floor=5.0)


def test_trajectory_json_lines():
    traj = optimize(lasso(1.0, 1.0), objective="min", max_iters=5)
    lines = traj.to_json_lines().splitlines()
    rows = [json.loads(line) for line in lines]
    assert rows[-1]["stop_reason"] == traj.stop_reason
    assert rows[-1]["iterations"] == traj.final().iteration
    for row in rows[:-1]:
        assert set(row) == {"iteration", "lengths", "T"}
    assert rows[0]["T"] == pytest.approx(traj.points[0].rigidity, rel=1e-15)
