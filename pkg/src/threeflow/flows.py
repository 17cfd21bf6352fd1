"""Multiflow surgery: extraction, concatenation, cycle removal.

Paths are tuples alternating vertex, edge, vertex, ...; weights are
positive integers.  Extraction may split a weighted path in two; cycle
removal only ever lowers edge usage, so admissibility is preserved.
"""

from __future__ import annotations

from .model import Multiflow


def path_endpoints(path: tuple[int, ...]) -> tuple[int, int]:
    return path[0], path[-1]


def reverse_path(path: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(reversed(path))


def simplify_path(path: tuple[int, ...]) -> tuple[int, ...]:
    """Remove closed detours: keep the first visit of every repeated vertex."""
    out = list(path[:1])
    seen_at = {path[0]: 0}
    k = 1
    while k < len(path):
        edge, vert = path[k], path[k + 1]
        if vert in seen_at:
            del out[seen_at[vert] + 1:]
            for w in list(seen_at):
                if seen_at[w] > seen_at[vert]:
                    del seen_at[w]
        else:
            out.extend((edge, vert))
            seen_at[vert] = len(out) - 1
        k += 2
    return tuple(out)


def canonical_entry(path: tuple[int, ...], weight: int):
    a, b = path_endpoints(path)
    if a > b:
        path = reverse_path(path)
    return (path, weight)


def merged(entries) -> Multiflow:
    """Combine equal paths, drop zero weights, order deterministically."""
    acc: dict[tuple[int, ...], int] = {}
    for path, w in entries:
        if w == 0:
            continue
        p, _ = canonical_entry(path, w)
        acc[p] = acc.get(p, 0) + w
    return Multiflow(tuple(sorted(acc.items())))


def extract_subflow(flow: Multiflow, a: int, b: int, amount: int):
    """Split off ``amount`` units of a-b paths; returns (paths, remainder).

    The extracted list holds (path, weight) with every path oriented to
    start at ``a``.  Raises if the flow carries less than ``amount``.
    """
    if amount == 0:
        return [], flow
    want = {a, b}
    taken: list[tuple[tuple[int, ...], int]] = []
    rest: list[tuple[tuple[int, ...], int]] = []
    left = amount
    for path, w in flow.entries:
        if left > 0 and set(path_endpoints(path)) == want:
            use = min(w, left)
            oriented = path if path[0] == a else reverse_path(path)
            taken.append((oriented, use))
            left -= use
            if w > use:
                rest.append((path, w - use))
        else:
            rest.append((path, w))
    if left > 0:
        raise ValueError(f"subflow shortfall: needed {amount} units of {a}-{b}, "
                         f"missing {left}")
    return taken, Multiflow(tuple(rest))


def concat_through_edge(left: tuple[int, ...] | None, edge: int, u: int, v: int,
                        right: tuple[int, ...] | None) -> tuple[int, ...]:
    """Join an s->u path, the edge u-v, and a v->t path into one walk."""
    out: list[int] = list(left) if left else [u]
    assert out[-1] == u
    out.extend((edge, v))
    if right:
        assert right[0] == v
        out.extend(right[1:])
    return simplify_path(tuple(out))


def pair_up(lefts, rights):
    """Zip two weighted path lists of equal total weight, splitting as needed."""
    li, ri = 0, 0
    lefts = [list(x) for x in lefts]
    rights = [list(x) for x in rights]
    out = []
    while li < len(lefts) and ri < len(rights):
        lp, lw = lefts[li]
        rp, rw = rights[ri]
        w = min(lw, rw)
        out.append((tuple(lp), tuple(rp), w))
        lefts[li][1] -= w
        rights[ri][1] -= w
        if lefts[li][1] == 0:
            li += 1
        if rights[ri][1] == 0:
            ri += 1
    assert li == len(lefts) and ri == len(rights), "unbalanced path lists"
    return out
