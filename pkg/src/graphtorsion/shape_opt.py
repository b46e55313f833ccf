"""Edge-length derivatives of the torsional rigidity and a simplex optimizer.

The derivative of T with respect to one edge length equals v'(x)^2 + 2 v(x)
at any point x of that edge; the combination is constant along the edge
because v'' = -1.  The optimizer moves edge lengths along the projected
gradient while keeping the total length fixed and every length above a floor.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import BadParameters, InconsistentInvariant
from .graph import Edge, MetricGraph
from .torsion import EdgePoly, TorsionSolution, torsion_function

POINT_TOL = 1e-10

STATIONARY = "stationary"
FLOOR_REACHED = "floor_reached"
LINE_SEARCH_FAILED = "line_search_failed"
MAX_ITERS_EXCEEDED = "max_iters_exceeded"


def hadamard_at(poly: EdgePoly, x: float) -> float:
    """v'(x)^2 + 2 v(x) on the edge of the given solution polynomial."""
    d = poly.derivative(x)
    return d * d + 2.0 * poly.value(x)


def dT_dlength(
    g: MetricGraph,
    edge_id: str,
    solution: TorsionSolution | None = None,
) -> float:
    """Derivative of the rigidity with respect to one edge length.

    Evaluated at the edge tail, with a midpoint re-evaluation that must
    agree to 1e-10 relative; disagreement signals a solver bug and raises
    InconsistentInvariant.  The value is always positive.
    """
    sol = solution if solution is not None else torsion_function(g)
    p = sol.poly(edge_id)
    at_tail = hadamard_at(p, 0.0)
    at_mid = hadamard_at(p, p.length / 2.0)
    scale = max(1.0, abs(at_tail), abs(at_mid))
    if abs(at_tail - at_mid) > POINT_TOL * scale:
        raise InconsistentInvariant(
            f"dT/dl on edge {edge_id!r} drifts along the edge: "
            f"tail {at_tail!r} vs midpoint {at_mid!r}"
        )
    return at_tail


def gradient(
    g: MetricGraph, solution: TorsionSolution | None = None
) -> dict[str, float]:
    """Per-edge dT/dl as a dict keyed by edge id."""
    sol = solution if solution is not None else torsion_function(g)
    return {e.id: dT_dlength(g, e.id, sol) for e in g.edges}


def with_lengths(g: MetricGraph, lengths: Mapping[str, float]) -> MetricGraph:
    """Copy of the graph with edge lengths replaced where the mapping says so."""
    return MetricGraph(
        g.vertices,
        tuple(
            Edge(e.id, e.tail, e.head, float(lengths.get(e.id, e.length)))
            for e in g.edges
        ),
    )


def grad_check(
    g: MetricGraph, edge_id: str, step: float
) -> tuple[float, float, float]:
    """Analytic derivative vs central finite difference for one edge.

    Returns (analytic, finite difference, absolute error).  The step must
    satisfy 0 < step < length/2 so both perturbed graphs stay valid.
    """
    e = g.edge(edge_id)
    if not (0.0 < step < e.length / 2.0):
        raise BadParameters(
            f"step {step!r} outside (0, {e.length / 2.0!r}) for edge {edge_id!r}"
        )
    analytic = dT_dlength(g, edge_id)
    plus = torsion_function(with_lengths(g, {edge_id: e.length + step})).rigidity
    minus = torsion_function(with_lengths(g, {edge_id: e.length - step})).rigidity
    fd = (plus - minus) / (2.0 * step)
    return analytic, fd, abs(fd - analytic)


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    lengths: dict[str, float]
    rigidity: float
    step: float


@dataclass(frozen=True)
class OptimizationTrajectory:
    points: tuple[TrajectoryPoint, ...]
    stop_reason: str
    objective: str
    floor: float

    def final(self) -> TrajectoryPoint:
        return self.points[-1]

    def to_json_lines(self) -> str:
        lines = [
            json.dumps(
                {"iteration": p.iteration, "lengths": p.lengths, "T": p.rigidity}
            )
            for p in self.points
        ]
        lines.append(
            json.dumps(
                {
                    "stop_reason": self.stop_reason,
                    "objective": self.objective,
                    "floor": self.floor,
                    "iterations": len(self.points) - 1,
                }
            )
        )
        return "\n".join(lines) + "\n"


def optimize(
    g: MetricGraph,
    objective: str = "max",
    floor: float | None = None,
    max_iters: int = 100,
    grad_tol: float = 1e-8,
) -> OptimizationTrajectory:
    """Projected-gradient ascent or descent of T over edge lengths.

    The feasible set is {lengths >= floor, total length fixed}.  Each
    iteration projects the gradient onto the zero-sum hyperplane, caps the
    step at the nearest floor face, and backtracks (factor 0.5, at most 40
    halvings) until T improves in the chosen direction.  Stops when the
    projected gradient drops below grad_tol, a length reaches the floor,
    a line search fails to improve, or max_iters runs out.
    """
    if objective not in ("max", "min"):
        raise BadParameters(f"objective must be 'max' or 'min', got {objective!r}")
    sign = 1.0 if objective == "max" else -1.0
    total = g.total_length()
    n = len(g.edges)
    if floor is None:
        floor = 1e-4 * total / n
    if floor <= 0.0:
        raise BadParameters(f"floor must be positive, got {floor!r}")
    if any(e.length < floor for e in g.edges):
        raise BadParameters("an edge is already below the floor")

    order = [e.id for e in g.edges]
    lengths = {e.id: e.length for e in g.edges}
    sol = torsion_function(g)
    value = sol.rigidity
    points = [TrajectoryPoint(0, dict(lengths), value, 0.0)]

    reason = MAX_ITERS_EXCEEDED
    for it in range(1, max_iters + 1):
        grad = gradient(with_lengths(g, lengths), sol)
        mean = math.fsum(grad[i] for i in order) / n
        direction = {i: sign * (grad[i] - mean) for i in order}
        norm = math.sqrt(math.fsum(direction[i] ** 2 for i in order))
        if norm < grad_tol:
            reason = STATIONARY
            break

        # cap the step where the first length would cross the floor
        t = 0.1 * total / norm
        for i in order:
            if direction[i] < 0.0:
                t = min(t, (lengths[i] - floor) / -direction[i])
        if t <= 0.0:
            reason = FLOOR_REACHED
            break

        improved = False
        for _ in range(41):
            trial = {
                i: max(lengths[i] + t * direction[i], floor) for i in order
            }
            trial_sol = torsion_function(with_lengths(g, trial))
            if sign * (trial_sol.rigidity - value) > 0.0:
                improved = True
                break
            t *= 0.5
        if not improved:
            reason = LINE_SEARCH_FAILED
            break

        lengths = trial
        sol = trial_sol
        value = trial_sol.rigidity
        points.append(TrajectoryPoint(it, dict(lengths), value, t))
        if min(lengths.values()) <= floor * (1.0 + 1e-9):
            reason = FLOOR_REACHED
            break

    return OptimizationTrajectory(tuple(points), reason, objective, floor)
