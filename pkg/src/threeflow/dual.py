"""Planar dual with hole vertices split into degree-1 terminals.

Every face of the primal graph becomes a dual vertex, except hole faces:
the dual vertex of hole i is split into one pendant terminal per boundary
edge, so paths between terminals can never sneak through a hole.  Dual edge
lengths are the primal capacities.  Distances between all terminals come
from one Dijkstra run per terminal, with exact integer arithmetic and
math.inf as the unreachable sentinel.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .model import Instance

INF = math.inf


@dataclass(frozen=True)
class DualGraph:
    """Modified dual: vertex ids 0..size-1, terminals last, grouped by hole.

    ``terminal_id[(i, p)]`` is the dual vertex of the terminal for boundary
    position p of hole i; ``adjacency[v]`` lists (neighbor, edge id).
    Lengths live outside (they change with capacities), keyed by edge id.
    """
    size: int
    adjacency: tuple[tuple[tuple[int, int], ...], ...]
    terminal_id: dict[tuple[int, int], int]
    face_vertex: dict[int, int]  # non-hole face -> dual vertex
    edge_ends: dict[int, tuple[int, int]]  # primal edge -> dual endpoints

    def terminals(self) -> list[int]:
        return sorted(self.terminal_id.values())


def build_dual(inst: Instance) -> DualGraph:
    """Construct the split-terminal dual for an instance.

    Hole boundaries must be isthmus-free so that each boundary edge carries
    exactly one terminal per hole.  A bridge between two copies of the same
    non-hole face yields a dual self-loop, which is kept in the edge map
    (the edge count stays |E|) but never enters any adjacency list.
    """
    g = inst.graph
    hole_faces = {h.face: i for i, h in enumerate(inst.holes)}
    face_vertex: dict[int, int] = {}
    nxt = 0
    for f in range(len(g.faces)):
        if f not in hole_faces:
            face_vertex[f] = nxt
            nxt += 1
    terminal_id: dict[tuple[int, int], int] = {}
    for i in range(len(inst.holes)):
        cycle = inst.boundaries[i]
        if len(set(cycle.edges)) != len(cycle.edges):
            raise ValueError(f"hole {i + 1} boundary has an isthmus; normalize first")
        for p in range(len(cycle)):
            terminal_id[(i, p)] = nxt
            nxt += 1

    def side_vertex(face: int, edge: int) -> int:
        if face in hole_faces:
            i = hole_faces[face]
            return terminal_id[(i, inst.boundaries[i].edge_pos[edge])]
        return face_vertex[face]

    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(nxt)]
    edge_ends: dict[int, tuple[int, int]] = {}
    for e in g.edges:
        fa, fb = g.edge_faces(e)
        a, b = side_vertex(fa, e), side_vertex(fb, e)
        edge_ends[e] = (a, b)
        if a != b:
            adjacency[a].append((b, e))
            adjacency[b].append((a, e))
    adjacency_t = tuple(tuple(sorted(nbrs)) for nbrs in adjacency)
    return DualGraph(nxt, adjacency_t, terminal_id, face_vertex, edge_ends)


@dataclass
class DistanceTable:
    """All-terminal shortest path distances with predecessor structure."""
    dual: DualGraph
    dist: dict[int, list]  # source dual vertex -> distances per dual vertex
    pred: dict[int, list]  # source -> predecessor dual vertex (or -1)
    hole_sizes: tuple[int, ...]

    def distance(self, i: int, p: int, j: int, q: int):
        """Exact distance between terminal (hole i, pos p) and (hole j, pos q)."""
        s = self.dual.terminal_id[(i, p)]
        t = self.dual.terminal_id[(j, q)]
        return self.dist[s][t]

    def matrix(self, i: int, j: int) -> np.ndarray:
        """Dense float matrix of terminal distances between holes i and j."""
        li, lj = self.hole_sizes[i], self.hole_sizes[j]
        out = np.empty((li, lj))
        for p in range(li):
            row = self.dist[self.dual.terminal_id[(i, p)]]
            for q in range(lj):
                out[p, q] = row[self.dual.terminal_id[(j, q)]]
        finite = out[np.isfinite(out)]
        if finite.size and finite.max() >= 2.0 ** 53:
            raise OverflowError("distances exceed exact float range")
        return out

    def path(self, i: int, p: int, j: int, q: int) -> list[int] | None:
        """Dual-vertex path realizing distance(i,p,j,q), for diagnostics."""
        s = self.dual.terminal_id[(i, p)]
        t = self.dual.terminal_id[(j, q)]
        if self.dist[s][t] == INF:
            return None
        out = [t]
        while out[-1] != s:
            out.append(self.pred[s][out[-1]])
        out.reverse()
        return out


def _dijkstra(dual: DualGraph, lengths: dict[int, int], source: int):
    dist: list = [INF] * dual.size
    pred: list[int] = [-1] * dual.size
    dist[source] = 0
    heap: list[tuple[int, int]] = [(0, source)]
    done = [False] * dual.size
    while heap:
        d, v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        for w, e in dual.adjacency[v]:
            nd = d + lengths[e]
            if nd < dist[w]:
                dist[w] = nd
                pred[w] = v
                heapq.heappush(heap, (nd, w))
            elif nd == dist[w] and not done[w] and v < pred[w]:
                pred[w] = v  # deterministic reported paths
    return dist, pred


def all_terminal_distances(inst: Instance, dual: DualGraph,
                           lengths: dict[int, int] | None = None) -> DistanceTable:
    """One label-setting run per terminal; exact integers, INF if unreachable."""
    if lengths is None:
        lengths = inst.capacities
    for e, c in lengths.items():
        if c < 0:
            raise ValueError(f"negative length on edge {e}")
    dist = {}
    pred = {}
    for s in dual.terminals():
        dist[s], pred[s] = _dijkstra(dual, lengths, s)
    sizes = tuple(len(inst.boundaries[i]) for i in range(len(inst.holes)))
    return DistanceTable(dual, dist, pred, sizes)
