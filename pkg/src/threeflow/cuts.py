"""Cut condition checkers via terminal distances in the modified dual.

mu1 is the exact minimum excess over regular sets meeting one hole
boundary; nu2 and nu3 are sound lower bounds for the type-2 and type-3
minima, each either exact or decomposing into smaller-type excesses.
All three only consume the distance table and the per-hole separated
demand matrices, so a full evaluation is a handful of vectorized scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dual import DistanceTable
from .model import Instance
from .tables import HoleDemandTable

INF = math.inf


@dataclass(frozen=True)
class CutCertificate:
    """Boundary-pair witness for a cut excess value.

    ``pairs`` holds one (hole position, edge, edge) triple per involved
    hole; ``exact`` is True for type 1 (and the isthmus degenerate case),
    False for the type-2/3 lower bounds.
    """
    kind: str  # "type1" | "type2" | "type3" | "isthmus"
    value: int
    pairs: tuple[tuple[int, int, int], ...]
    exact: bool


def build_demand_tables(inst: Instance, demands=None) -> list[HoleDemandTable]:
    if demands is None:
        demands = inst.demands
    per: list[dict[tuple[int, int], int]] = [dict() for _ in inst.holes]
    for (h, s, t), val in demands.items():
        if val:
            per[h][(s, t)] = per[h].get((s, t), 0) + val
    return [HoleDemandTable(inst.boundaries[i], per[i]) for i in range(len(inst.holes))]


def separated_demand(inst: Instance, i: int, e: int, g: int,
                     tables: list[HoleDemandTable] | None = None) -> int:
    """Total demand of hole-i pairs split by removing boundary edges e, g."""
    cycle = inst.boundaries[i]
    if e not in cycle.edge_pos or g not in cycle.edge_pos:
        raise ValueError(f"edges {e},{g} are not both on the boundary of hole {i + 1}")
    table = (tables or build_demand_tables(inst))[i]
    return table.separated(cycle.edge_pos[e], cycle.edge_pos[g])


def _pos_to_edge(inst: Instance, i: int, p: int) -> int:
    return inst.boundaries[i].walk[p][1]


def mu1(inst: Instance, dtable: DistanceTable,
        tables: list[HoleDemandTable] | None = None):
    """Exact type-1 minimum: same-hole terminal distance minus separated demand."""
    tables = tables or build_demand_tables(inst)
    best = INF
    cert = None
    for i in range(len(inst.holes)):
        dm = dtable.matrix(i, i) - tables[i].separated_matrix()
        np.fill_diagonal(dm, INF)
        if not np.isfinite(dm).any():
            continue
        flat = int(np.argmin(dm))
        p, q = divmod(flat, dm.shape[1])
        val = dm[p, q]
        if val < best:
            best = val
            cert = CutCertificate("type1", int(val),
                                  ((i, _pos_to_edge(inst, i, p), _pos_to_edge(inst, i, q)),),
                                  exact=True)
    return (int(best) if best != INF else INF), cert


def nu2(inst: Instance, dtable: DistanceTable,
        tables: list[HoleDemandTable] | None = None):
    """Type-2 lower bound: best of the two endpoint pairings per edge 4-tuple."""
    tables = tables or build_demand_tables(inst)
    best = INF
    cert = None
    nh = len(inst.holes)
    for i in range(nh):
        sep_i = tables[i].separated_matrix()
        for j in range(i + 1, nh):
            sep_j = tables[j].separated_matrix()
            d = dtable.matrix(i, j)
            # value[e, g, e', g'] over hole-i pair (e,g) and hole-j pair (e',g')
            straight = d[:, None, :, None] + d[None, :, None, :]
            crossed = d[:, None, None, :] + d[None, :, :, None]
            val = np.minimum(straight, crossed)
            val -= sep_i[:, :, None, None]
            val -= sep_j[None, None, :, :]
            li, lj = d.shape
            val[np.arange(li), np.arange(li), :, :] = INF
            val[:, :, np.arange(lj), np.arange(lj)] = INF
            if not np.isfinite(val).any():
                continue
            flat = int(np.argmin(val))
            e, g, e2, g2 = np.unravel_index(flat, val.shape)
            v = val[e, g, e2, g2]
            if v < best:
                best = v
                cert = CutCertificate(
                    "type2", int(v),
                    ((i, _pos_to_edge(inst, i, int(e)), _pos_to_edge(inst, i, int(g))),
                     (j, _pos_to_edge(inst, j, int(e2)), _pos_to_edge(inst, j, int(g2)))),
                    exact=False)
    return (int(best) if best != INF else INF), cert


def _minplus(a: np.ndarray, b: np.ndarray):
    """Min-plus matrix product with argmin bookkeeping."""
    # out[i, j] = min_k a[i, k] + b[k, j]
    stack = a[:, :, None] + b[None, :, :]
    arg = np.argmin(stack, axis=1)
    out = np.take_along_axis(stack, arg[:, None, :], axis=1)[:, 0, :]
    return out, arg


def nu3(inst: Instance, dtable: DistanceTable,
        tables: list[HoleDemandTable] | None = None):
    """Type-3 lower bound via a ring of three hole-pair path choices.

    State at hole i is the ordered pair (x_i, y_i) of boundary positions:
    x_i is the terminal used by the path toward hole i+1, y_i by the path
    from hole i-1; all six endpoints are distinct by x_i != y_i.
    """
    if len(inst.holes) != 3:
        raise ValueError("nu3 requires three holes")
    tables = tables or build_demand_tables(inst)
    A = []  # A_i[y, x] = -sep_i(x, y), diagonal masked
    B = []  # B_i[x, y'] = dist(hole i pos x, hole i+1 pos y')
    for i in range(3):
        sep = tables[i].separated_matrix().astype(float)
        a = -sep.T.copy()
        np.fill_diagonal(a, INF)
        A.append(a)
        B.append(dtable.matrix(i, (i + 1) % 3))
    m01, k01 = _minplus(A[0], B[0])
    m02, k02 = _minplus(m01, A[1])
    m03, k03 = _minplus(m02, B[1])
    m04, k04 = _minplus(m03, A[2])
    m05, k05 = _minplus(m04, B[2])
    diag = np.diagonal(m05)
    if not np.isfinite(diag).any():
        return INF, None
    y1 = int(np.argmin(diag))
    val = diag[y1]
    # backtrack along the chain A1.B1.A2.B2.A3.B3 at row y1
    x3 = int(k05[y1, y1])
    y3 = int(k04[y1, x3])
    x2 = int(k03[y1, y3])
    y2 = int(k02[y1, x2])
    x1 = int(k01[y1, y2])
    pe = _pos_to_edge
    cert = CutCertificate(
        "type3", int(val),
        ((0, pe(inst, 0, x1), pe(inst, 0, y1)),
         (1, pe(inst, 1, x2), pe(inst, 1, y2)),
         (2, pe(inst, 2, x3), pe(inst, 2, y3))),
        exact=False)
    return int(val), cert


def min_cut_excess(inst: Instance, dtable: DistanceTable,
                   tables: list[HoleDemandTable] | None = None):
    """(mu1, nu2, nu3) plus the overall cut verdict and best certificate."""
    tables = tables or build_demand_tables(inst)
    nh = len(inst.holes)
    m1, c1 = mu1(inst, dtable, tables)
    n2, c2 = nu2(inst, dtable, tables) if nh >= 2 else (INF, None)
    n3, c3 = nu3(inst, dtable, tables) if nh == 3 else (INF, None)
    value = min(m1, n2, n3)
    cert = None
    for v, c in ((m1, c1), (n2, c2), (n3, c3)):
        if v == value and c is not None:
            cert = c
            break
    return (m1, n2, n3), value, cert
