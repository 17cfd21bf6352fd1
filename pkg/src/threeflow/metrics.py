"""(2,3)-metric condition checker via boundary-edge quadruples.

For a triple of cyclically ordered boundary-edge quadruples, zeta is the
minimum total dual length of six cross-hole terminal paths whose endpoint
multiset is exactly the quadruples' terminals (two paths per hole pair).
The excess zeta - d(quadruples) lower-bounds the excess of every
(2,3)-metric cutting the boundaries at those edges, and its global minimum
equals the minimum excess over semi-regular (2,3)-metrics.

The global scan does not enumerate matchings per triple: by the uncrossing
structure, the minimum is attained with the two paths between consecutive
holes landing on consecutive quadruple slots, which turns the scan into a
min-plus product ring over per-hole quadruple tensors.  Both ring
orientations are taken since the chirality of the input rotation is not
observable.  Per-triple zeta keeps the honest full matching enumeration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dual import DistanceTable
from .model import Instance
from .tables import HoleDemandTable, lift_quadruple, quad_demand_value
from .cuts import build_demand_tables

INF = math.inf

Quad = tuple[int, int, int, int]
Triple = tuple[Quad, Quad, Quad]


class QuadCapExceeded(RuntimeError):
    """A hole boundary is longer than the quadruple-scan cap."""


@dataclass(frozen=True)
class MetricCertificate:
    triple: Triple  # edge-id quadruples, one per hole, clockwise order
    zeta: int
    demand: int
    excess: int
    matching: tuple[tuple[tuple[int, int], tuple[int, int]], ...]  # ((hole,pos),(hole,pos)) x6


def canonical_rotation(quad: Quad) -> Quad:
    rots = [quad[k:] + quad[:k] for k in range(4)]
    return min(rots)


def quad_demand(inst: Instance, i: int, b1: int, b2: int, b3: int, b4: int,
                tables: list[HoleDemandTable] | None = None) -> int:
    """Demand charge of a quadruple: neighbor segments once, opposite twice."""
    cycle = inst.boundaries[i]
    try:
        pos = tuple(cycle.edge_pos[b] for b in (b1, b2, b3, b4))
    except KeyError as exc:
        raise ValueError(f"edge {exc.args[0]} is not on the boundary of hole {i + 1}") from None
    table = (tables or build_demand_tables(inst))[i]
    return quad_demand_value(table, pos)


def _quad_positions(inst: Instance, i: int, quad: Quad) -> Quad:
    cycle = inst.boundaries[i]
    return tuple(cycle.edge_pos[b] for b in quad)


def zeta(inst: Instance, dtable: DistanceTable, triple: Triple,
         positions: bool = False):
    """Minimum six-path system cost for a quadruple triple, with matching.

    Enumerates every endpoint matching allowed by the degree count: per
    hole a 2+2 split of the four slots between the two other holes, then
    one of two pairings per hole pair (<= 6*6*6*2*2*2 assignments).
    Returns (value, matching) where value may be INF if some required hole
    pair is dual-disconnected.
    """
    pos = [quad if positions else _quad_positions(inst, i, quad)
           for i, quad in enumerate(triple)]
    terminals = [[(i, p) for p in pos[i]] for i in range(3)]
    splits = list(itertools.combinations(range(4), 2))
    best = INF
    best_matching = None
    for picks in itertools.product(splits, repeat=3):
        # picks[i] = slots of hole i paired toward hole i+1
        up = [list(picks[i]) for i in range(3)]
        down = [[k for k in range(4) if k not in picks[i]] for i in range(3)]
        for bits in itertools.product((0, 1), repeat=3):
            total = 0
            matching = []
            for i in range(3):
                j = (i + 1) % 3
                a0, a1 = up[i]
                b0, b1 = down[j] if not bits[i] else (down[j][1], down[j][0])
                for a, b in ((a0, b0), (a1, b1)):
                    ti, tj = terminals[i][a], terminals[j][b]
                    d = dtable.distance(ti[0], ti[1], tj[0], tj[1])
                    total += d
                    matching.append((ti, tj))
                if total == INF:
                    break
            if total < best:
                best = total
                best_matching = tuple(matching)
    return best, best_matching


def excess_tilde(inst: Instance, dtable: DistanceTable, triple: Triple,
                 tables: list[HoleDemandTable] | None = None):
    """zeta(triple) minus the quadruples' demand charges."""
    tables = tables or build_demand_tables(inst)
    z, _ = zeta(inst, dtable, triple)
    if z == INF:
        return INF
    d = sum(quad_demand(inst, i, *triple[i], tables=tables) for i in range(3))
    return int(z) - d


def _quad_tensor(table: HoleDemandTable) -> np.ndarray:
    """W[(a3,a4),(a1,a2)] = -d_i(a1..a4) for valid cyclic orders, else INF."""
    ln = table.length
    idx = np.arange(ln)
    a1 = idx[:, None, None, None]
    a2 = idx[None, :, None, None]
    a3 = idx[None, None, :, None]
    a4 = idx[None, None, None, :]
    valid, a1b, s2, s3, s4 = lift_quadruple((a1, a2, a3, a4), ln)
    vals = table.quad_value(np.broadcast_to(a1, valid.shape),
                            np.broadcast_to(s2, valid.shape),
                            np.broadcast_to(s3, valid.shape),
                            np.broadcast_to(s4, valid.shape))
    out = np.where(valid, -vals.astype(float), INF)
    return out.transpose(2, 3, 0, 1).reshape(ln * ln, ln * ln)


def _link_matrix(dmat: np.ndarray) -> np.ndarray:
    """L[(a1,a2)_i, (a3,a4)_j] = D[a1, a4] + D[a2, a3] between holes i, j."""
    li, lj = dmat.shape
    out = dmat[:, None, None, :] + dmat[None, :, :, None]
    return out.reshape(li * li, lj * lj)


def minplus(a: np.ndarray, b: np.ndarray, want_arg: bool,
            budget: int = 1 << 24):
    """Chunked min-plus matrix product, optionally with argmin table."""
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.empty((rows, cols))
    arg = np.empty((rows, cols), dtype=np.int32) if want_arg else None
    step = max(1, budget // max(1, inner * cols))
    for r0 in range(0, rows, step):
        r1 = min(rows, r0 + step)
        stack = a[r0:r1, :, None] + b[None, :, :]
        if want_arg:
            k = np.argmin(stack, axis=1)
            arg[r0:r1] = k
            out[r0:r1] = np.take_along_axis(stack, k[:, None, :], axis=1)[:, 0, :]
        else:
            out[r0:r1] = stack.min(axis=1)
    return out, arg


def _ring_scan(tensors: list[np.ndarray], links: list[np.ndarray], want_arg: bool):
    """Min over the ring product W0.L0.W1.L1.W2.L2; returns value + argmins."""
    mats = [tensors[0], links[0], tensors[1], links[1], tensors[2], links[2]]
    prod = mats[0]
    args = []
    for m in mats[1:]:
        prod, arg = minplus(prod, m, want_arg=want_arg)
        args.append(arg)
    diag = np.diagonal(prod)
    if not np.isfinite(diag).any():
        return INF, None
    r0 = int(np.argmin(diag))
    if not want_arg:
        return float(diag[r0]), None
    cols = [r0]
    col = r0
    for arg in reversed(args):
        col = int(arg[r0, col])
        cols.append(col)
    cols.reverse()
    # cols = [out0, in1, out1, in2, out2, in0]; in0 equals the diag row r0
    return float(diag[r0]), (r0, cols)


def _split(code: int, ln: int) -> tuple[int, int]:
    return code // ln, code % ln


def mu_hat(inst: Instance, dtable: DistanceTable,
           tables: list[HoleDemandTable] | None = None,
           max_quad: int | None = 16, want_certificate: bool = True):
    """Global minimum of excess_tilde over all quadruple triples.

    Runs the min-plus ring in both hole orders and rebuilds the winner's
    certificate through the full-matching zeta, asserting agreement.
    Raises QuadCapExceeded if a hole boundary exceeds ``max_quad``.
    """
    if len(inst.holes) != 3:
        raise ValueError("mu_hat requires three holes")
    tables = tables or build_demand_tables(inst)
    lens = [t.length for t in tables]
    if max_quad is not None and max(lens) > max_quad:
        raise QuadCapExceeded(
            f"hole boundary length {max(lens)} exceeds --max-quad {max_quad}")
    tensors = [_quad_tensor(t) for t in tables]

    best = INF
    best_triple: Triple | None = None
    for order in ((0, 1, 2), (0, 2, 1)):
        links = []
        for k in range(3):
            i, j = order[k], order[(k + 1) % 3]
            links.append(_link_matrix(dtable.matrix(i, j)))
        val, back = _ring_scan([tensors[i] for i in order], links, want_certificate)
        if val < best:
            best = val
            if want_certificate:
                r0, cols = back
                quads_pos: dict[int, Quad] = {}
                ins = [r0, cols[1], cols[3]]
                outs = [cols[0], cols[2], cols[4]]
                for k in range(3):
                    i = order[k]
                    a1, a2 = _split(outs[k], lens[i])
                    a3, a4 = _split(ins[k], lens[i])
                    quads_pos[i] = (a1, a2, a3, a4)
                best_triple = tuple(quads_pos[i] for i in range(3))
    if best == INF:
        return INF, None
    if not want_certificate:
        return int(best), None

    # rebuild the certificate honestly from the argmin triple
    edges_triple = tuple(
        tuple(inst.boundaries[i].walk[p][1] for p in best_triple[i])
        for i in range(3))
    z, matching = zeta(inst, dtable, best_triple, positions=True)
    d = sum(int(tables[i].quad_value(*_lift_or_raise(tables[i], best_triple[i])))
            for i in range(3))
    excess = int(z) - d
    assert excess == int(best), (
        f"full-matching excess {excess} disagrees with ring scan {best}")
    cert = MetricCertificate(edges_triple, int(z), d, excess, matching)
    return int(best), cert


def _lift_or_raise(table: HoleDemandTable, quad_pos: Quad):
    valid, a1, s2, s3, s4 = lift_quadruple(tuple(np.asarray(p) for p in quad_pos),
                                           table.length)
    if not bool(valid):
        raise AssertionError("ring scan produced a non-cyclic quadruple")
    return a1, s2, s3, s4
