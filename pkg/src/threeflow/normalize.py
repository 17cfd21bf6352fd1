"""Instance normalization: zero stripping, bridge splitting, hole surgery.

A hole boundary must not pass any edge twice (isthmus) before the dual
terminals can be built.  An isthmus is a bridge whose removal splits the
problem in two: the bridge capacity must cover the demand straddling it,
each straddling pair st is rerouted to (s, bridge end) and (other end, t),
and the two sides become independent Eulerian subproblems whose multiflows
glue back through the bridge.  Zero-capacity edges are deleted the same
way (their straddle allowance is zero).

The result of normalization is a binary tree whose leaves are clean
instances; solving the tree means solving each leaf and gluing upward.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cuts import CutCertificate
from .embedding import EmbeddedGraph, build_graph
from .flows import concat_through_edge, extract_subflow, merged, pair_up
from .model import EMPTY_FLOW, Hole, Instance, Multiflow, demand_key


class Infeasible(Exception):
    """Carries a negative-excess certificate."""

    def __init__(self, kind: str, certificate):
        super().__init__(f"{kind} condition violated: excess {certificate.value}")
        self.kind = kind
        self.certificate = certificate


@dataclass
class LeafNode:
    instance: Instance

    def leaves(self):
        return [self]

    def solve_with(self, leaf_fn) -> Multiflow:
        return leaf_fn(self.instance)


@dataclass
class SplitNode:
    edge: int
    u: int  # endpoint on the left side
    v: int
    straddles: list[tuple[int, int, int]]  # (s on left, t on right, value)
    left: "LeafNode | SplitNode"
    right: "LeafNode | SplitNode"
    left_back: dict[int, int]  # left child vertex -> this node's vertex
    right_back: dict[int, int]

    def leaves(self):
        return self.left.leaves() + self.right.leaves()

    def solve_with(self, leaf_fn) -> Multiflow:
        fl = _translate(self.left.solve_with(leaf_fn), self.left_back)
        fr = _translate(self.right.solve_with(leaf_fn), self.right_back)
        out = []
        for s, t, val in self.straddles:
            if s == self.u:
                lefts = [(None, val)]
            else:
                got, fl = extract_subflow(fl, s, self.u, val)
                lefts = got
            if t == self.v:
                rights = [(None, val)]
            else:
                got, fr = extract_subflow(fr, self.v, t, val)
                rights = got
            for lp, rp, w in _pair(lefts, rights):
                path = concat_through_edge(lp, self.edge, self.u, self.v, rp)
                out.append((path, w))
        out.extend(fl.entries)
        out.extend(fr.entries)
        return merged(out)


def _pair(lefts, rights):
    if lefts and lefts[0][0] is None:
        return [(None, rp, w) for rp, w in rights] or [(None, None, lefts[0][1])]
    if rights and rights[0][0] is None:
        return [(lp, None, w) for lp, w in lefts]
    return pair_up(lefts, rights)


def _translate(flow: Multiflow, vmap: dict[int, int]) -> Multiflow:
    entries = []
    for path, w in flow.entries:
        out = list(path)
        out[0::2] = [vmap[x] for x in out[0::2]]
        entries.append((tuple(out), w))
    return Multiflow(tuple(entries))


def strip_trivial_demands(inst: Instance) -> Instance:
    demands = {k: v for k, v in inst.demands.items() if v > 0 and k[1] != k[2]}
    if len(demands) == len(inst.demands):
        return inst
    return inst.with_values(demands=demands)


def find_hole_isthmus(inst: Instance) -> tuple[int, int] | None:
    """(hole position, edge) of some boundary edge passed twice, if any."""
    for i in range(len(inst.holes)):
        seen = set()
        for _, e in inst.boundaries[i].walk:
            if e in seen:
                return i, e
            seen.add(e)
    return None


def _component(graph: EmbeddedGraph, start: int, skip_edge: int) -> set[int]:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for e in graph.incident_edges(x):
            if e == skip_edge:
                continue
            a, b = graph.edges[e]
            w = b if a == x else a
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _restrict(inst: Instance, side: set[int], bridge: int):
    """Child instance on one side of a bridge, plus vertex maps."""
    g = inst.graph
    order = sorted(side)
    to_child = {v: k for k, v in enumerate(order)}
    to_parent = dict(enumerate(order))
    edges = {e: (to_child[u], to_child[v]) for e, (u, v) in g.edges.items()
             if e != bridge and u in side}
    rotation = {to_child[v]: tuple(e for e in g.rotation[v] if e != bridge)
                for v in order}
    child = build_graph(len(order), edges, rotation)

    bridge_face = g.dart_face[(bridge, 0)]

    def child_face_of(parent_face: int) -> int | None:
        found = None
        for dart in g.faces[parent_face]:
            if dart[0] == bridge or dart[0] not in edges:
                continue
            f = child.dart_face[dart]
            assert found is None or found == f, "face fragment split unexpectedly"
            found = f
        return found

    holes: list[Hole] = []
    pos_map: dict[int, int] = {}
    for i, h in enumerate(inst.holes):
        f = child_face_of(h.face)
        if f is not None:
            pos_map[i] = len(holes)
            token = h.token + ("'" if h.face == bridge_face else "")
            holes.append(Hole(token, f))
    outer = None
    if g.outer_face is not None:
        outer = child_face_of(g.outer_face)
    if outer is None:
        outer = child_face_of(bridge_face)
    if outer is None and len(child.faces) == 1:
        outer = 0
    child = child.with_outer(outer)

    caps = {e: inst.capacities[e] for e in edges}
    demands = {}
    for (h, s, t), val in inst.demands.items():
        if s in side and t in side:
            demands[demand_key(pos_map[h], to_child[s], to_child[t])] = val
    return child, tuple(holes), caps, demands, to_child, to_parent, pos_map


def split_at_bridge(inst: Instance, bridge: int, hole_pos: int | None):
    """Split an instance at a bridge; raises Infeasible if the cut fails."""
    g = inst.graph
    u, v = g.edges[bridge]
    side_u = _component(g, u, bridge)
    assert v not in side_u, f"edge {bridge} is not a bridge"
    straddles = []
    for (h, s, t), val in sorted(inst.demands.items()):
        if (s in side_u) != (t in side_u):
            a, b = (s, t) if s in side_u else (t, s)
            straddles.append((a, b, val))
            assert hole_pos is not None and h == hole_pos, \
                "straddling pair off the bridge's own hole"
    allowance = sum(val for _, _, val in straddles)
    if allowance > inst.capacities[bridge]:
        cert = CutCertificate("isthmus", inst.capacities[bridge] - allowance,
                              ((hole_pos if hole_pos is not None else -1,
                                bridge, bridge),), exact=True)
        raise Infeasible("cut", cert)

    lg, lh, lc, ld, l_to, l_back, lpos = _restrict(inst, side_u, bridge)
    side_v = set(range(g.n)) - side_u
    rg, rh, rc, rd, r_to, r_back, rpos = _restrict(inst, side_v, bridge)
    if hole_pos is not None:
        for s, t, val in straddles:
            if s != u:
                key = demand_key(lpos[hole_pos], l_to[s], l_to[u])
                ld[key] = ld.get(key, 0) + val
            if t != v:
                key = demand_key(rpos[hole_pos], r_to[v], r_to[t])
                rd[key] = rd.get(key, 0) + val
    left = Instance(lg, lh, lc, ld)
    right = Instance(rg, rh, rc, rd)
    assert left.is_eulerian and right.is_eulerian, "split broke parity"
    return (left, l_back), (right, r_back), straddles, u, v


def normalize_instance(inst: Instance):
    """Return a solve tree of clean leaves; raises Infeasible on a cut violation.

    Clean: no zero-value or degenerate demands, no zero-capacity edges,
    isthmus-free hole boundaries.
    """
    inst = strip_trivial_demands(inst)
    while True:
        zero = next((e for e in sorted(inst.capacities)
                     if inst.capacities[e] == 0), None)
        if zero is not None:
            if inst.graph.is_bridge(zero):
                face = inst.graph.dart_face[(zero, 0)]
                hp = next((i for i, h in enumerate(inst.holes) if h.face == face), None)
                return _split_tree(inst, zero, hp)
            inst, _ = delete_edge(inst, zero)
            continue
        isthmus = find_hole_isthmus(inst)
        if isthmus is not None:
            return _split_tree(inst, isthmus[1], isthmus[0])
        return LeafNode(inst)


def _split_tree(inst: Instance, bridge: int, hole_pos: int | None):
    (left, l_back), (right, r_back), straddles, u, v = split_at_bridge(inst, bridge, hole_pos)
    return SplitNode(bridge, u, v, straddles,
                     normalize_instance(left), normalize_instance(right),
                     l_back, r_back)


def normalize_isthmus(inst: Instance):
    """Spec surface: list of clean sub-instances plus the gluing tree."""
    tree = normalize_instance(inst)
    return [leaf.instance for leaf in tree.leaves()], tree


@dataclass(frozen=True)
class TopologyEvent:
    kind: str  # HOLES_MERGED | HOLE_GREW | INTERIOR
    holes: tuple[int, ...] = ()


def delete_edge(inst: Instance, edge: int):
    """Delete a zero-capacity non-bridge edge, merging its two faces.

    Returns (instance, TopologyEvent).  Hole tokens persist through growth;
    merged holes get a combined token.  Demand hole positions are remapped
    (merged holes pool their demand pairs).
    """
    if inst.capacities[edge] != 0:
        raise ValueError(f"refusing to delete edge {edge} with positive capacity")
    g, face_map = inst.graph.delete_edge(edge)
    fa, fb = inst.graph.edge_faces(edge)
    hole_of_face = {h.face: i for i, h in enumerate(inst.holes)}
    touched = [hole_of_face[f] for f in dict.fromkeys((fa, fb)) if f in hole_of_face]
    if len(touched) == 2:
        event = TopologyEvent("HOLES_MERGED", tuple(touched))
    elif len(touched) == 1:
        event = TopologyEvent("HOLE_GREW", tuple(touched))
    else:
        event = TopologyEvent("INTERIOR")

    holes: list[Hole] = []
    pos_map: dict[int, int] = {}
    for i, h in enumerate(inst.holes):
        if event.kind == "HOLES_MERGED" and i == max(touched):
            pos_map[i] = pos_map[min(touched)]
            continue
        pos_map[i] = len(holes)
        token = h.token
        if event.kind == "HOLES_MERGED" and i == min(touched):
            token = inst.holes[touched[0]].token + "+" + inst.holes[touched[1]].token
        holes.append(Hole(token, face_map[h.face]))
    caps = {e: c for e, c in inst.capacities.items() if e != edge}
    demands: dict = {}
    for (h, s, t), val in inst.demands.items():
        key = demand_key(pos_map[h], s, t)
        demands[key] = demands.get(key, 0) + val
    return Instance(g, tuple(holes), caps, demands), event


def withdraw_hole(inst: Instance, pos: int) -> Instance:
    """Turn a demand-free hole back into an ordinary face."""
    assert not any(h == pos for (h, _, _) in inst.demands), "hole still has demands"
    holes = tuple(h for i, h in enumerate(inst.holes) if i != pos)
    demands = {demand_key(h - (1 if h > pos else 0), s, t): val
               for (h, s, t), val in inst.demands.items()}
    return Instance(inst.graph, holes, dict(inst.capacities), demands)
