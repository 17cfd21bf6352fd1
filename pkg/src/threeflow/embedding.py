"""Embedded planar multigraphs given by a rotation system.

A graph is described combinatorially: vertex count, undirected edges
(parallel edges allowed, self-loops rejected) and, for every vertex, the
clockwise cyclic order of its incident edges.  Faces are traced from the
rotation system; the Euler relation |V| - |E| + |F| = 2 certifies that the
rotation describes a sphere (planar) embedding.  The outer face is a
designation on top of the sphere embedding and is carried around by the
graph object.

All objects are immutable; topology edits (edge deletion) return new
graphs together with a face mapping.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class GraphError(ValueError):
    """Raised for inputs that do not describe a connected planar embedding."""


# A dart is a directed edge-end: (edge id, direction), direction 0 meaning
# u -> v as the edge endpoints were listed, 1 meaning v -> u.
Dart = tuple[int, int]


def _other_end(u: int, v: int, at: int) -> int:
    return v if at == u else u


@dataclass(frozen=True)
class EmbeddedGraph:
    n: int
    edges: dict[int, tuple[int, int]]  # edge id -> (u, v)
    rotation: dict[int, tuple[int, ...]]  # vertex -> clockwise edge ids
    faces: tuple[tuple[Dart, ...], ...] = field(default=())
    dart_face: dict[Dart, int] = field(default_factory=dict)
    outer_face: int | None = None

    # -- dart helpers -------------------------------------------------

    def dart_tail(self, dart: Dart) -> int:
        e, d = dart
        u, v = self.edges[e]
        return u if d == 0 else v

    def dart_head(self, dart: Dart) -> int:
        e, d = dart
        u, v = self.edges[e]
        return v if d == 0 else u

    def dart_for(self, edge: int, tail: int) -> Dart:
        u, v = self.edges[edge]
        if tail == u:
            return (edge, 0)
        if tail == v:
            return (edge, 1)
        raise GraphError(f"vertex {tail} is not an endpoint of edge {edge}")

    def edge_faces(self, edge: int) -> tuple[int, int]:
        """Faces on the two sides of an edge (left of u->v, left of v->u)."""
        return (self.dart_face[(edge, 0)], self.dart_face[(edge, 1)])

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return self.rotation[v]

    def face_vertices(self, face: int) -> set[int]:
        return {self.dart_tail(d) for d in self.faces[face]}

    def face_edges(self, face: int) -> list[int]:
        return [d[0] for d in self.faces[face]]

    def face_of_dart(self, edge: int, direction: int) -> int:
        return self.dart_face[(edge, direction)]

    def is_bridge(self, edge: int) -> bool:
        """An edge is a bridge exactly when the same face lies on both sides."""
        a, b = self.edge_faces(edge)
        return a == b

    def with_outer(self, face: int) -> "EmbeddedGraph":
        return EmbeddedGraph(self.n, self.edges, self.rotation,
                             self.faces, self.dart_face, face)

    # -- topology edit ------------------------------------------------

    def delete_edge(self, edge: int) -> tuple["EmbeddedGraph", dict[int, int]]:
        """Remove a non-bridge edge, merging its two incident faces.

        Returns the new graph plus a mapping old face id -> new face id
        (the two merged faces map to the same new id).  The outer face
        designation is carried through the mapping.
        """
        if edge not in self.edges:
            raise GraphError(f"no edge {edge}")
        if self.is_bridge(edge):
            raise GraphError(f"edge {edge} is a bridge; deletion would disconnect the face structure")
        u, v = self.edges[edge]
        edges = {e: uv for e, uv in self.edges.items() if e != edge}
        rotation = dict(self.rotation)
        rotation[u] = tuple(e for e in rotation[u] if e != edge)
        rotation[v] = tuple(e for e in rotation[v] if e != edge)
        new = build_graph(self.n, edges, rotation)
        face_map: dict[int, int] = {}
        for old_id, face in enumerate(self.faces):
            for dart in face:
                if dart[0] != edge:
                    face_map[old_id] = new.dart_face[dart]
                    break
            else:
                # face bounded solely by the deleted edge cannot occur for
                # a non-bridge edge (both sides would be the same face)
                raise GraphError("face with no surviving dart")
        if self.outer_face is not None:
            new = new.with_outer(face_map[self.outer_face])
        return new, face_map


def _trace_faces(n: int, edges: dict[int, tuple[int, int]],
                 rotation: dict[int, tuple[int, ...]]):
    rot_index = {}
    for vertex, order in rotation.items():
        for i, e in enumerate(order):
            rot_index[(vertex, e)] = i

    def next_dart(dart: Dart) -> Dart:
        e, _ = dart
        head = edges[e][1] if dart[1] == 0 else edges[e][0]
        order = rotation[head]
        idx = rot_index[(head, e)]
        f = order[(idx + 1) % len(order)]
        return (f, 0) if edges[f][0] == head else (f, 1)

    all_darts = sorted((e, d) for e in edges for d in (0, 1))
    seen: set[Dart] = set()
    faces: list[tuple[Dart, ...]] = []
    dart_face: dict[Dart, int] = {}
    for start in all_darts:
        if start in seen:
            continue
        walk = [start]
        seen.add(start)
        cur = next_dart(start)
        while cur != start:
            if cur in seen:
                raise GraphError("rotation system is not a valid embedding (face trace collided)")
            walk.append(cur)
            seen.add(cur)
            cur = next_dart(cur)
        idx = len(faces)
        faces.append(tuple(walk))
        for d in walk:
            dart_face[d] = idx
    return tuple(faces), dart_face


def build_graph(n: int, edges, rotation, outer_dart: Dart | None = None) -> EmbeddedGraph:
    """Build an embedded graph and trace its faces.

    ``edges`` is a mapping edge id -> (u, v) or an iterable of
    (id, u, v) triples; ``rotation`` maps each vertex to the clockwise
    order of its incident edge ids.  The face left of the dart u->v is
    continued by the edge that follows the reverse dart in the clockwise
    rotation at v.  Raises GraphError for disconnected graphs, rotations
    inconsistent with the edge list, self-loops, or rotation systems whose
    face count violates the Euler relation (non-planar input).
    """
    if isinstance(edges, dict):
        edges = {int(e): (int(u), int(v)) for e, (u, v) in edges.items()}
    else:
        edges = {int(e): (int(u), int(v)) for e, u, v in edges}
    if n < 1:
        raise GraphError("graph needs at least one vertex")
    for e, (u, v) in edges.items():
        if u == v:
            raise GraphError(f"edge {e} is a self-loop")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"edge {e} references a vertex outside 0..{n - 1}")

    rotation = {int(v): tuple(int(e) for e in order) for v, order in rotation.items()}
    expected: dict[int, set[int]] = {v: set() for v in range(n)}
    for e, (u, v) in edges.items():
        expected[u].add(e)
        expected[v].add(e)
    for v in range(n):
        order = rotation.get(v, ())
        if len(order) != len(set(order)) or set(order) != expected[v]:
            raise GraphError(f"rotation at vertex {v} does not list exactly its incident edges")
        rotation[v] = tuple(order)

    # connectivity
    if edges:
        adjacency: dict[int, list[int]] = {v: [] for v in range(n)}
        for u, v in edges.values():
            adjacency[u].append(v)
            adjacency[v].append(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != n:
            raise GraphError("graph is not connected")
    elif n > 1:
        raise GraphError("graph is not connected")

    if edges:
        faces, dart_face = _trace_faces(n, edges, rotation)
    else:
        faces, dart_face = ((),), {}

    if n - len(edges) + len(faces) != 2:
        raise GraphError(
            f"Euler relation fails: {n} - {len(edges)} + {len(faces)} != 2 "
            "(rotation is not a planar embedding)")

    g = EmbeddedGraph(n, edges, rotation, faces, dart_face)
    if outer_dart is not None:
        g = g.with_outer(g.dart_face[outer_dart])
    return g
