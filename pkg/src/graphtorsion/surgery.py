"""Graph surgery operations with their predicted effect on torsional rigidity.

Each operation is a small frozen dataclass; apply() validates the operation's
precondition against the concrete graph and returns a new graph, never
mutating the input.  predicted_direction() reports which way the rigidity is
guaranteed to move.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import PreconditionViolated
from .graph import DIRICHLET, NATURAL, Edge, MetricGraph, Vertex
from .torsion import TorsionSolution, torsion_function


@dataclass(frozen=True)
class Glue:
    """Identify two vertices carrying the same condition kind."""

    v: str
    w: str


@dataclass(frozen=True)
class AddDirichlet:
    v: str


@dataclass(frozen=True)
class AttachPendant:
    """Graft a purely natural subgraph onto one natural vertex of the host.

    vertices lists the pendant's vertex ids (all natural), edges its
    (id, tail, head, length) tuples over those ids; the pendant vertex
    named by join is identified with the host vertex named by at.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, str, float], ...]
    join: str
    at: str


@dataclass(frozen=True)
class AddEdge:
    u: str
    w: str
    length: float
    edge_id: str | None = None


@dataclass(frozen=True)
class Lengthen:
    edge: str
    delta: float


@dataclass(frozen=True)
class Scale:
    factor: float


@dataclass(frozen=True)
class UnfoldParallel:
    """Replace two parallel edges by one edge carrying their total length."""

    first: str
    second: str


SurgeryOp = Union[Glue, AddDirichlet, AttachPendant, AddEdge, Lengthen, Scale, UnfoldParallel]


class Direction(str, Enum):
    NON_INCREASING = "non_increasing"
    NON_DECREASING = "non_decreasing"
    STRICT_INCREASE = "strict_increase"
    STRICT_DECREASE = "strict_decrease"
    EXACT_SCALE = "exact_scale"


@dataclass(frozen=True)
class Prediction:
    direction: Direction
    factor: float | None = None


def _need_vertex(g: MetricGraph, vid: str) -> None:
    if not any(v.id == vid for v in g.vertices):
        raise PreconditionViolated(f"vertex {vid!r} does not exist")


def _need_edge(g: MetricGraph, eid: str) -> Edge:
    for e in g.edges:
        if e.id == eid:
            return e
    raise PreconditionViolated(f"edge {eid!r} does not exist")


def apply(g: MetricGraph, op: SurgeryOp) -> MetricGraph:
    if isinstance(op, Glue):
        return _glue(g, op)
    if isinstance(op, AddDirichlet):
        return _add_dirichlet(g, op)
    if isinstance(op, AttachPendant):
        return _attach_pendant(g, op)
    if isinstance(op, AddEdge):
        return _add_edge(g, op)
    if isinstance(op, Lengthen):
        return _lengthen(g, op)
    if isinstance(op, Scale):
        return _scale(g, op)
    if isinstance(op, UnfoldParallel):
        return _unfold(g, op)
    raise PreconditionViolated(f"unknown operation {op!r}")


def predicted_direction(
    op: SurgeryOp,
    g: MetricGraph | None = None,
    solution: TorsionSolution | None = None,
    value_tol: float = 1e-9,
) -> Prediction | None:
    """Guaranteed direction of the rigidity change, or None when uncertified.

    AddEdge only carries a guarantee when the torsion takes equal values at the
    two endpoints; pass the graph (or a solved torsion) to certify that.
    """
    if isinstance(op, Glue):
        return Prediction(Direction.NON_INCREASING)
    if isinstance(op, AddDirichlet):
        return Prediction(Direction.STRICT_DECREASE)
    if isinstance(op, AttachPendant):
        return Prediction(Direction.NON_DECREASING)
    if isinstance(op, AddEdge):
        if op.u == op.w:
            return Prediction(Direction.NON_DECREASING)
        if solution is None:
            if g is None:
                return None
            solution = torsion_function(g)
        vu = solution.vertex_values.get(op.u)
        vw = solution.vertex_values.get(op.w)
        if vu is None or vw is None:
            return None
        if abs(vu - vw) <= value_tol * max(1.0, solution.sup.value):
            return Prediction(Direction.NON_DECREASING)
        return None
    if isinstance(op, Lengthen):
        return Prediction(Direction.STRICT_INCREASE)
    if isinstance(op, Scale):
        return Prediction(Direction.EXACT_SCALE, op.factor ** 3)
    if isinstance(op, UnfoldParallel):
        return Prediction(Direction.STRICT_INCREASE)
    return None


# -- the individual operations --------------------------------------------


def _glue(g: MetricGraph, op: Glue) -> MetricGraph:
    if op.v == op.w:
        raise PreconditionViolated("glue needs two distinct vertices")
    _need_vertex(g, op.v)
    _need_vertex(g, op.w)
    if g.vertex(op.v).bc != g.vertex(op.w).bc:
        raise PreconditionViolated(
            f"glue needs matching conditions, got {g.vertex(op.v).bc} and {g.vertex(op.w).bc}"
        )
    verts = tuple(v for v in g.vertices if v.id != op.w)
    sub = lambda x: op.v if x == op.w else x
    edges = tuple(Edge(e.id, sub(e.tail), sub(e.head), e.length) for e in g.edges)
    return MetricGraph(verts, edges)


def _add_dirichlet(g: MetricGraph, op: AddDirichlet) -> MetricGraph:
    _need_vertex(g, op.v)
    if g.is_dirichlet(op.v):
        raise PreconditionViolated(f"vertex {op.v!r} is already Dirichlet")
    verts = tuple(Vertex(v.id, DIRICHLET) if v.id == op.v else v for v in g.vertices)
    return MetricGraph(verts, g.edges)


def _attach_pendant(g: MetricGraph, op: AttachPendant) -> MetricGraph:
    _need_vertex(g, op.at)
    if g.is_dirichlet(op.at):
        raise PreconditionViolated("pendant must meet the host at a natural vertex")
    if op.join not in op.vertices:
        raise PreconditionViolated(f"join vertex {op.join!r} is not a pendant vertex")
    host_v = {v.id for v in g.vertices}
    host_e = {e.id for e in g.edges}
    new_ids = [x for x in op.vertices if x != op.join]
    clash = (set(new_ids) & host_v) | ({e[0] for e in op.edges} & host_e)
    if clash:
        raise PreconditionViolated(f"pendant ids collide with host ids: {sorted(clash)}")
    pend_set = set(op.vertices)
    for eid, t, h, _l in op.edges:
        if t not in pend_set or h not in pend_set:
            raise PreconditionViolated(f"pendant edge {eid!r} leaves the pendant vertex set")
    # the pendant must hang together through its join vertex
    adj: dict[str, set[str]] = {x: set() for x in op.vertices}
    for _eid, t, h, _l in op.edges:
        adj[t].add(h)
        adj[h].add(t)
    stack, seen = [op.join], {op.join}
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if seen != pend_set:
        raise PreconditionViolated("pendant subgraph is not connected to its join vertex")
    sub = lambda x: op.at if x == op.join else x
    verts = g.vertices + tuple(Vertex(x, NATURAL) for x in new_ids)
    edges = g.edges + tuple(Edge(eid, sub(t), sub(h), l) for eid, t, h, l in op.edges)
    return MetricGraph(verts, edges)


def _add_edge(g: MetricGraph, op: AddEdge) -> MetricGraph:
    _need_vertex(g, op.u)
    _need_vertex(g, op.w)
    if not (isinstance(op.length, (int, float)) and math.isfinite(op.length) and op.length > 0):
        raise PreconditionViolated(f"new edge length must be positive, got {op.length!r}")
    eid = op.edge_id
    if eid is None:
        used = {e.id for e in g.edges}
        k = len(used)
        while f"added{k}" in used:
            k += 1
        eid = f"added{k}"
    elif any(e.id == eid for e in g.edges):
        raise PreconditionViolated(f"edge id {eid!r} already in use")
    return MetricGraph(g.vertices, g.edges + (Edge(eid, op.u, op.w, float(op.length)),))


def _lengthen(g: MetricGraph, op: Lengthen) -> MetricGraph:
    e = _need_edge(g, op.edge)
    if not (isinstance(op.delta, (int, float)) and math.isfinite(op.delta) and op.delta > 0):
        raise PreconditionViolated(f"lengthen needs delta > 0, got {op.delta!r}")
    edges = tuple(
        Edge(x.id, x.tail, x.head, x.length + float(op.delta)) if x.id == e.id else x
        for x in g.edges
    )
    return MetricGraph(g.vertices, edges)


def _scale(g: MetricGraph, op: Scale) -> MetricGraph:
    if not (isinstance(op.factor, (int, float)) and math.isfinite(op.factor) and op.factor > 0):
        raise PreconditionViolated(f"scale needs a positive factor, got {op.factor!r}")
    c = float(op.factor)
    edges = tuple(Edge(e.id, e.tail, e.head, c * e.length) for e in g.edges)
    return MetricGraph(g.vertices, edges)


def _unfold(g: MetricGraph, op: UnfoldParallel) -> MetricGraph:
    if op.first == op.second:
        raise PreconditionViolated("unfold needs two distinct edges")
    e1 = _need_edge(g, op.first)
    e2 = _need_edge(g, op.second)
    if {e1.tail, e1.head} != {e2.tail, e2.head}:
        raise PreconditionViolated(
            f"edges {op.first!r} and {op.second!r} do not share both endpoints"
        )
    merged = Edge(e1.id, e1.tail, e1.head, e1.length + e2.length)
    edges = tuple(merged if x.id == e1.id else x for x in g.edges if x.id != e2.id)
    return MetricGraph(g.vertices, edges)


# -- reduction to a pumpkin chain -----------------------------------------


def reduce_to_pumpkin_chain(g: MetricGraph) -> MetricGraph:
    """Collapse the graph onto a pumpkin chain with one Dirichlet endpoint.

    All Dirichlet vertices are glued to a single vertex, then every level set
    of the distance function at a vertex distance or an edge interior peak is
    glued to a point.  Every edge piece between consecutive levels is monotone
    in distance, so the quotient is a genuine pumpkin chain; the inradius and
    the total length are preserved and the rigidity can only drop.
    """
    g1 = g.glue_dirichlet()
    field = g1.dirichlet_distances()
    raw = [field.values[v.id] for v in g1.vertices]
    for e in g1.edges:
        raw.append(0.5 * (field.values[e.tail] + field.values[e.head] + e.length))
    raw.sort()
    tol = 1e-9 * max(raw[-1], 1e-300)
    levels: list[float] = []
    for x in raw:
        if not levels or x - levels[-1] > tol:
            levels.append(x)

    def level_of(x: float) -> int:
        i = bisect.bisect_left(levels, x - tol)
        if i >= len(levels) or abs(levels[i] - x) > tol:
            raise AssertionError("distance value missed the level grid")
        return i

    mult = [0] * (len(levels) - 1)
    for e in g1.edges:
        iu = level_of(field.values[e.tail])
        iw = level_of(field.values[e.head])
        ip = level_of(0.5 * (field.values[e.tail] + field.values[e.head] + e.length))
        for j in range(iu, ip):
            mult[j] += 1
        for j in range(iw, ip):
            mult[j] += 1
    verts = [Vertex("q0", DIRICHLET)]
    verts += [Vertex(f"q{j}", NATURAL) for j in range(1, len(levels))]
    edges = []
    for j, m in enumerate(mult):
        ln = levels[j + 1] - levels[j]
        for k in range(m):
            edges.append(Edge(f"r{j}_{k}", f"q{j}", f"q{j + 1}", ln))
    return MetricGraph(tuple(verts), tuple(edges))
