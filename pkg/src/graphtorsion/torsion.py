"""Torsion function and torsional rigidity of a metric graph.

The torsion function solves -v'' = 1 on every edge, vanishes at Dirichlet
vertices and satisfies continuity plus a zero-sum condition on inward
derivatives at natural vertices.  Its values at natural vertices come from a
small symmetric positive-definite vertex system; edgewise the function is the
quadratic v(x) = -x^2/2 + b x + c in the offset x from the edge tail.

Rigidity is computed two independent ways (vertex-system identity and exact
edgewise integration) and the two must agree to 1e-10 relative; a mismatch
raises rather than returning a number of unknown quality.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg

from .errors import (
    BadParameters,
    CrossCheckMismatch,
    SingularSystem,
    UnknownEdge,
    ValidationError,
    ZeroEnergy,
)
from .graph import DIRICHLET, MetricGraph

REL_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteSystem:
    """Vertex system over the natural vertices.

    matrix is symmetric positive definite; solving matrix @ g = weight gives
    the vertex unknowns.  weight[v] is the metric degree (loops twice),
    coupling[e] = 1/length for edges with both ends natural (loops included,
    though a loop couples a vertex to itself and cancels from the matrix),
    dirichlet_weight[v] sums 1/length over edges joining v to the Dirichlet set.
    """

    order: tuple[str, ...]
    matrix: np.ndarray
    weight: np.ndarray
    coupling: dict[str, float]
    dirichlet_weight: dict[str, float]


@dataclass(frozen=True)
class DiscreteTorsion:
    system: DiscreteSystem
    values: dict[str, float]
    discrete_rigidity: float


@dataclass(frozen=True)
class EdgePoly:
    """v(x) = -x^2/2 + b x + c for offsets x in [0, length] from the tail."""

    edge: str
    tail: str
    head: str
    length: float
    b: float
    c: float

    def value(self, x: float) -> float:
        return -0.5 * x * x + self.b * x + self.c

    def derivative(self, x: float) -> float:
        return self.b - x

    def integral(self) -> float:
        l = self.length
        return -(l ** 3) / 6.0 + 0.5 * self.b * l * l + self.c * l

    def energy(self) -> float:
        # integral of (b - x)^2 over [0, length]
        l = self.length
        return (self.b ** 3 - (self.b - l) ** 3) / 3.0

    def argmax(self) -> float:
        return min(max(self.b, 0.0), self.length)

    def max(self) -> float:
        return self.value(self.argmax())


@dataclass(frozen=True)
class SupWitness:
    value: float
    edge: str
    offset: float


@dataclass(frozen=True)
class TorsionSolution:
    vertex_values: dict[str, float]
    edge_polys: tuple[EdgePoly, ...]
    rigidity: float
    sup: SupWitness
    kirchhoff_residual: float = 0.0
    discrete: DiscreteTorsion | None = field(default=None, compare=False)

    def poly(self, edge_id: str) -> EdgePoly:
        for p in self.edge_polys:
            if p.edge == edge_id:
                return p
        raise UnknownEdge(f"no edge {edge_id!r} in solution")

    def value_at(self, edge_id: str, offset: float) -> float:
        return self.poly(edge_id).value(offset)

    def sup_norm(self) -> float:
        return self.sup.value


def assemble_discrete_system(g: MetricGraph) -> DiscreteSystem:
    order = g.natural_vertices
    idx = {vid: i for i, vid in enumerate(order)}
    n = len(order)
    mat = np.zeros((n, n))
    weight = np.array([g.metric_degree(v) for v in order])
    coupling: dict[str, float] = {}
    dirichlet_weight: dict[str, float] = {vid: 0.0 for vid in order}
    for e in g.edges:
        t_nat, h_nat = e.tail in idx, e.head in idx
        mu = 1.0 / e.length
        if t_nat and h_nat:
            coupling[e.id] = mu
            if not e.is_loop:
                i, j = idx[e.tail], idx[e.head]
                mat[i, i] += mu
                mat[j, j] += mu
                mat[i, j] -= mu
                mat[j, i] -= mu
        elif t_nat or h_nat:
            vid = e.tail if t_nat else e.head
            dirichlet_weight[vid] += mu
            mat[idx[vid], idx[vid]] += mu
        # both ends Dirichlet: no unknown touched
    return DiscreteSystem(order, mat, weight, coupling, dirichlet_weight)


def solve_discrete_torsion(g: MetricGraph) -> DiscreteTorsion:
    sys = assemble_discrete_system(g)
    n = len(sys.order)
    if n == 0:
        return DiscreteTorsion(sys, {}, 0.0)
    try:
        cho = scipy.linalg.cho_factor(sys.matrix)
        sol = scipy.linalg.cho_solve(cho, sys.weight)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem(f"vertex system not positive definite: {exc}") from None
    if not np.all(np.isfinite(sol)):
        raise SingularSystem("vertex system produced non-finite values")
    values = {vid: float(sol[i]) for i, vid in enumerate(sys.order)}
    return DiscreteTorsion(sys, values, float(sys.weight @ sol))


def torsion_function(g: MetricGraph) -> TorsionSolution:
    """Solve for the torsion function and package the edgewise quadratics."""
    disc = solve_discrete_torsion(g)
    vv = {v.id: (0.0 if v.bc == DIRICHLET else 0.5 * disc.values[v.id]) for v in g.vertices}
    polys = []
    for e in g.edges:
        vt, vh = vv[e.tail], vv[e.head]
        b = 0.5 * e.length + (vh - vt) / e.length
        polys.append(EdgePoly(e.id, e.tail, e.head, e.length, b, vt))
    polys = tuple(polys)

    residual = 0.0
    flux: dict[str, float] = {vid: 0.0 for vid in g.natural_vertices}
    for p in polys:
        if p.tail in flux:
            flux[p.tail] += p.derivative(0.0)
        if p.head in flux:
            flux[p.head] -= p.derivative(p.length)
    if flux:
        residual = max(abs(v) for v in flux.values())

    best: SupWitness | None = None
    for p in polys:
        x = p.argmax()
        val = p.value(x)
        if best is None or val > best.value:
            best = SupWitness(val, p.edge, x)

    t_edge = math.fsum(p.integral() for p in polys)
    t_formula = math.fsum(e.length ** 3 for e in g.edges) / 12.0 + 0.25 * disc.discrete_rigidity
    _require_close("rigidity (edgewise integral)", t_edge, "rigidity (vertex identity)", t_formula)
    scale = max(1.0, best.value)
    if residual > REL_TOL * scale:
        raise CrossCheckMismatch(
            f"Kirchhoff residual {residual:.3e} exceeds {REL_TOL * scale:.3e}"
        )
    return TorsionSolution(vv, polys, t_edge, best, residual, disc)


def _require_close(name_a: str, a: float, name_b: str, b: float) -> None:
    if abs(a - b) > REL_TOL * max(1.0, abs(a), abs(b)):
        raise CrossCheckMismatch(f"{name_a} = {a!r} disagrees with {name_b} = {b!r}")


def rigidity(sol: TorsionSolution) -> float:
    """Total integral of the torsion function, cross-checked along every route."""
    t_edge = math.fsum(p.integral() for p in sol.edge_polys)
    t_energy = math.fsum(p.energy() for p in sol.edge_polys)
    _require_close("rigidity (integral of v)", t_edge, "rigidity (energy of v)", t_energy)
    if sol.discrete is not None:
        t_formula = (
            math.fsum(p.length ** 3 for p in sol.edge_polys) / 12.0
            + 0.25 * sol.discrete.discrete_rigidity
        )
        _require_close("rigidity (integral of v)", t_edge, "rigidity (vertex identity)", t_formula)
    _require_close("rigidity (integral of v)", t_edge, "stored rigidity", sol.rigidity)
    return sol.rigidity


def sup_norm(sol: TorsionSolution) -> SupWitness:
    return sol.sup


def dirichlet_energy(sol: TorsionSolution) -> float:
    return math.fsum(p.energy() for p in sol.edge_polys)


# -- piecewise-quadratic test functions -----------------------------------


@dataclass(frozen=True)
class PiecewiseQuadratic:
    """Edgewise u(x) = a x^2 + b x + c, keyed by edge id, offsets from the tail."""

    coeffs: Mapping[str, tuple[float, float, float]]

    def value(self, g: MetricGraph, edge_id: str, x: float) -> float:
        a, b, c = self.coeffs[edge_id]
        return a * x * x + b * x + c

    @staticmethod
    def from_vertex_values(
        g: MetricGraph,
        values: Mapping[str, float],
        curvature: Mapping[str, float] | None = None,
    ) -> "PiecewiseQuadratic":
        """Continuous function matching the given vertex values, with optional
        per-edge quadratic coefficient (default 0, i.e. edgewise linear)."""
        coeffs = {}
        for e in g.edges:
            a = 0.0 if curvature is None else float(curvature.get(e.id, 0.0))
            vt, vh = values[e.tail], values[e.head]
            b = (vh - vt) / e.length - a * e.length
            coeffs[e.id] = (a, b, vt)
        return PiecewiseQuadratic(coeffs)


def polya_quotient(g: MetricGraph, u: PiecewiseQuadratic) -> float:
    """(integral of u)^2 / (integral of u'^2); maximized by the torsion function.

    The test function must be continuous across vertices and vanish at the
    Dirichlet set, both checked here to 1e-9 of its endpoint scale.
    """
    ends: dict[str, list[float]] = {v.id: [] for v in g.vertices}
    for e in g.edges:
        if e.id not in u.coeffs:
            raise BadParameters(f"test function has no coefficients for edge {e.id!r}")
        a, b, c = u.coeffs[e.id]
        ends[e.tail].append(c)
        ends[e.head].append(a * e.length * e.length + b * e.length + c)
    scale = max(1.0, max(abs(x) for vals in ends.values() for x in vals))
    for v in g.vertices:
        vals = ends[v.id]
        if v.bc == DIRICHLET:
            vals = vals + [0.0]
        if max(vals) - min(vals) > 1e-9 * scale:
            raise ValidationError(
                f"test function discontinuous or nonzero on Dirichlet vertex {v.id!r}"
            )
    total = 0.0
    energy = 0.0
    for e in g.edges:
        a, b, c = u.coeffs[e.id]
        l = e.length
        total += a * l ** 3 / 3.0 + b * l * l / 2.0 + c * l
        energy += 4.0 * a * a * l ** 3 / 3.0 + 2.0 * a * b * l * l + b * b * l
    if energy <= 0.0 or energy < 1e-28 * scale * scale:
        raise ZeroEnergy("test function has (numerically) zero Dirichlet energy")
    return total * total / energy


def edgewise_dirichlet_quadratics(g: MetricGraph) -> PiecewiseQuadratic:
    """The test function vanishing at every vertex that solves -u'' = 1 edgewise."""
    return PiecewiseQuadratic({e.id: (-0.5, 0.5 * e.length, 0.0) for e in g.edges})


# -- serialization --------------------------------------------------------


def solution_to_payload(sol: TorsionSolution) -> dict:
    return {
        "vertex_values": dict(sol.vertex_values),
        "edges": [
            {
                "id": p.edge,
                "tail": p.tail,
                "head": p.head,
                "length": p.length,
                "b": p.b,
                "c": p.c,
            }
            for p in sol.edge_polys
        ],
        "rigidity": sol.rigidity,
        "sup": {"value": sol.sup.value, "edge": sol.sup.edge, "offset": sol.sup.offset},
        "kirchhoff_residual": sol.kirchhoff_residual,
    }


def solution_from_payload(payload: dict) -> TorsionSolution:
    try:
        polys = tuple(
            EdgePoly(d["id"], d["tail"], d["head"], d["length"], d["b"], d["c"])
            for d in payload["edges"]
        )
        sup = SupWitness(**payload["sup"])
        return TorsionSolution(
            dict(payload["vertex_values"]),
            polys,
            payload["rigidity"],
            sup,
            payload.get("kirchhoff_residual", 0.0),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed torsion solution payload: {exc}") from None


def solution_dumps(sol: TorsionSolution, indent: int | None = 2) -> str:
    return json.dumps(solution_to_payload(sol), indent=indent)


def solution_loads(text: str) -> TorsionSolution:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return solution_from_payload(payload)
