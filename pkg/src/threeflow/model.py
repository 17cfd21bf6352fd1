"""Problem instances: embedded graph + holes + capacities + demands.

A demand pair lives on the boundary of one hole.  Instances are immutable;
derived boundary data (walk positions, occurrence slots) is computed lazily
and cached.  The Eulerian parity condition c(delta(v)) - d(rho(v)) even is
the entry ticket to the integer solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .embedding import EmbeddedGraph, GraphError

# demand key: (hole position 0-based, s, t) with s < t
DemandKey = tuple[int, int, int]


def demand_key(hole: int, s: int, t: int) -> DemandKey:
    a, b = (s, t) if s < t else (t, s)
    return (hole, a, b)


@dataclass(frozen=True)
class Hole:
    token: str  # stable identity across boundary growth
    face: int


@dataclass(frozen=True)
class BoundaryCycle:
    """Closed walk around a hole: (vertex, edge) pairs in trace order.

    ``edge_pos[e]`` is the walk position of boundary edge e (edges are all
    distinct once isthmus-free).  ``vertex_slot[v]`` is the first walk slot
    at which v occurs; vertices may occur more than once on boundaries with
    cut vertices.
    """
    hole: int
    walk: tuple[tuple[int, int], ...]  # (vertex, edge) pairs
    edge_pos: dict[int, int]
    vertex_slot: dict[int, int]

    def __len__(self) -> int:
        return len(self.walk)

    @property
    def edges(self) -> list[int]:
        return [e for _, e in self.walk]

    @property
    def vertices(self) -> list[int]:
        return [v for v, _ in self.walk]


@dataclass(frozen=True)
class Instance:
    graph: EmbeddedGraph
    holes: tuple[Hole, ...]
    capacities: dict[int, int]  # edge id -> nonnegative int
    demands: dict[DemandKey, int]  # (hole pos, s, t) -> positive int

    def __post_init__(self):
        if len(self.holes) > 3:
            raise GraphError("at most three holes are supported")

    @cached_property
    def boundaries(self) -> tuple[BoundaryCycle, ...]:
        return tuple(self._boundary(i) for i in range(len(self.holes)))

    def _boundary(self, i: int) -> BoundaryCycle:
        g = self.graph
        face = g.faces[self.holes[i].face]
        walk = tuple((g.dart_tail(d), d[0]) for d in face)
        edge_pos: dict[int, int] = {}
        vertex_slot: dict[int, int] = {}
        for pos, (v, e) in enumerate(walk):
            edge_pos.setdefault(e, pos)
            vertex_slot.setdefault(v, pos)
        return BoundaryCycle(i, walk, edge_pos, vertex_slot)

    def hole_boundary(self, i: int) -> BoundaryCycle:
        return self.boundaries[i]

    @cached_property
    def demands_by_hole(self) -> tuple[dict[tuple[int, int], int], ...]:
        per: list[dict[tuple[int, int], int]] = [dict() for _ in self.holes]
        for (h, s, t), val in self.demands.items():
            per[h][(s, t)] = val
        return tuple(per)

    def cap_at(self, v: int) -> int:
        return sum(self.capacities[e] for e in self.graph.incident_edges(v))

    def demand_at(self, v: int) -> int:
        return sum(val for (h, s, t), val in self.demands.items() if v in (s, t))

    def parity_defects(self) -> list[int]:
        """Vertices where c(delta(v)) - d(rho(v)) is odd."""
        return [v for v in range(self.graph.n)
                if (self.cap_at(v) - self.demand_at(v)) % 2 != 0]

    @property
    def is_eulerian(self) -> bool:
        return not self.parity_defects()

    def total_demand(self) -> int:
        return sum(self.demands.values())

    def with_values(self, capacities=None, demands=None) -> "Instance":
        return Instance(self.graph, self.holes,
                        dict(self.capacities if capacities is None else capacities),
                        dict(self.demands if demands is None else demands))


@dataclass(frozen=True)
class Multiflow:
    """Weighted D-paths: each path alternates vertex, edge, vertex, ..."""
    entries: tuple[tuple[tuple[int, ...], int], ...]

    def total_weight(self) -> int:
        return sum(w for _, w in self.entries)

    def edge_usage(self) -> dict[int, int]:
        usage: dict[int, int] = {}
        for path, w in self.entries:
            for e in path[1::2]:
                usage[e] = usage.get(e, 0) + w
        return usage

    def realized(self) -> dict[tuple[int, int], int]:
        """Total weight per unordered endpoint pair."""
        out: dict[tuple[int, int], int] = {}
        for path, w in self.entries:
            a, b = path[0], path[-1]
            key = (a, b) if a < b else (b, a)
            out[key] = out.get(key, 0) + w
        return out


EMPTY_FLOW = Multiflow(())


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    parity_defects: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and not self.parity_defects

    @property
    def eulerian(self) -> bool:
        return not self.parity_defects


def validate_instance(inst: Instance) -> ValidationReport:
    """Check hole sanity, demand placement and Eulerian parity."""
    rep = ValidationReport()
    faces = [h.face for h in inst.holes]
    if len(set(faces)) != len(faces):
        rep.errors.append("holes are not pairwise distinct faces")
    if inst.holes and inst.graph.outer_face is not None:
        if inst.graph.outer_face not in faces:
            rep.errors.append("outer face is not a hole")
        elif len(inst.holes) == 3 and inst.holes[2].face != inst.graph.outer_face:
            rep.errors.append("hole 3 must be the outer face")
    for e, c in inst.capacities.items():
        if c < 0:
            rep.errors.append(f"negative capacity on edge {e}")
    if set(inst.capacities) != set(inst.graph.edges):
        rep.errors.append("capacities must cover exactly the edge set")
    for (h, s, t), val in inst.demands.items():
        if val < 0:
            rep.errors.append(f"negative demand on pair {s},{t}")
        if s == t:
            rep.errors.append(f"demand pair with s = t = {s}")
            continue
        if h >= len(inst.holes):
            rep.errors.append(f"demand references hole {h + 1} which does not exist")
            continue
        onb = inst.boundaries[h].vertex_slot
        for w in (s, t):
            if w not in onb:
                rep.errors.append(f"demand endpoint {w} is not on the boundary of hole {h + 1}")
    rep.parity_defects = inst.parity_defects()
    return rep


@dataclass
class AdmissibilityReport:
    edge_slack: dict[int, int]
    pair_slack: dict[tuple[int, int], int]  # realized - demanded per endpoint pair
    path_errors: list[str]

    @property
    def ok(self) -> bool:
        return (not self.path_errors
                and all(s >= 0 for s in self.edge_slack.values())
                and all(s == 0 for s in self.pair_slack.values()))


def check_admissible(inst: Instance, flow: Multiflow) -> AdmissibilityReport:
    """Exact integer verification of capacity and demand constraints."""
    path_errors: list[str] = []
    demanded: dict[tuple[int, int], int] = {}
    for (h, s, t), val in inst.demands.items():
        demanded[(s, t)] = demanded.get((s, t), 0) + val

    for idx, (path, w) in enumerate(flow.entries):
        if w <= 0:
            path_errors.append(f"path {idx}: weight {w} is not positive")
        if len(path) < 3 or len(path) % 2 == 0:
            path_errors.append(f"path {idx}: malformed vertex/edge alternation")
            continue
        for k in range(1, len(path), 2):
            e, a, b = path[k], path[k - 1], path[k + 1]
            if e not in inst.graph.edges or set(inst.graph.edges[e]) != {a, b}:
                path_errors.append(f"path {idx}: edge {e} does not join {a} and {b}")
                break
        a, b = path[0], path[-1]
        key = (a, b) if a < b else (b, a)
        if key not in demanded:
            path_errors.append(f"path {idx}: endpoints {key} are not a demand pair")

    usage = flow.edge_usage()
    edge_slack = {e: inst.capacities[e] - usage.get(e, 0) for e in inst.graph.edges}
    realized = flow.realized()
    pair_slack = {key: realized.get(key, 0) - val for key, val in demanded.items()}
    for key, got in realized.items():
        if key not in demanded:
            pair_slack[key] = got
    return AdmissibilityReport(edge_slack, pair_slack, path_errors)
