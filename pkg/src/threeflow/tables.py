"""Boundary-indexed demand tables for the cut and metric checkers.

All queries reduce to rectangle sums over a doubled 2-D prefix table of the
pair-demand matrix of one hole boundary, so a separated-demand lookup or a
quadruple segment sum costs O(1) after an O(len^2) build.

Positions are walk slots of the hole boundary.  Demand endpoints are pinned
to their first occurrence slot; on boundaries where a vertex occurs twice,
edge pairs whose removal would put the occurrences in different arcs have
infinite dual distance anyway, so the pinned slot never affects a finite
checker value.
"""

from __future__ import annotations

import numpy as np

from .model import BoundaryCycle


class HoleDemandTable:
    """Prefix-sum machinery for one hole's demand pairs."""

    def __init__(self, cycle: BoundaryCycle, pairs: dict[tuple[int, int], int]):
        self.cycle = cycle
        self.length = len(cycle)
        ln = self.length
        pm = np.zeros((ln, ln), dtype=np.int64)
        self.pair_positions: list[tuple[int, int, int]] = []
        for (s, t), val in sorted(pairs.items()):
            a = cycle.vertex_slot[s]
            b = cycle.vertex_slot[t]
            pm[a, b] += val
            pm[b, a] += val
            self.pair_positions.append((a, b, val))
        doubled = np.tile(pm, (2, 2))
        # prefix[x, y] = sum of doubled[:x, :y]
        self.prefix = np.zeros((2 * ln + 1, 2 * ln + 1), dtype=np.int64)
        self.prefix[1:, 1:] = doubled.cumsum(axis=0).cumsum(axis=1)
        self.total = int(sum(pairs.values()))

    def interval_pair_sum(self, i1, i2, j1, j2):
        """Demand between slot intervals (i1, i2] and (j1, j2] (doubled coords).

        Intervals must be disjoint mod length; each straddling pair counts
        once.  Accepts scalars or broadcastable numpy arrays.
        """
        p = self.prefix
        return (p[i2 + 1, j2 + 1] - p[i1 + 1, j2 + 1]
                - p[i2 + 1, j1 + 1] + p[i1 + 1, j1 + 1])

    def separated(self, p: int, q: int) -> int:
        """Total demand of pairs split by removing boundary edges at p and q."""
        if p == q:
            return 0
        ln = self.length
        q2 = q if q > p else q + ln
        p2 = p + ln
        return int(self.interval_pair_sum(p, q2, q2, p2))

    def separated_matrix(self) -> np.ndarray:
        """Dense (len, len) matrix of separated()."""
        ln = self.length
        p = np.arange(ln)[:, None]
        q = np.arange(ln)[None, :]
        q2 = np.where(q > p, q, q + ln)
        out = self.interval_pair_sum(p, q2, q2, p + ln)
        np.fill_diagonal(out, 0)
        return out

    def quad_segments(self, a1: int, s2: int, s3: int, s4: int):
        """The four slot intervals cut out by a cyclically ordered quadruple.

        The quadruple is given as an anchor position a1 plus lifted offsets
        0 <= s2 <= s3 <= s4 <= len of the other three edges.  Segment q runs
        strictly between edge q and edge q+1 (endpoint slots included).
        """
        ln = self.length
        return ((a1, a1 + s2), (a1 + s2, a1 + s3),
                (a1 + s3, a1 + s4), (a1 + s4, a1 + ln))

    def quad_value(self, a1, s2, s3, s4):
        """d_i of a quadruple: neighbor segments once, opposite twice.

        Vectorized: arguments may be broadcastable integer arrays.
        """
        w1, w2, w3, w4 = self.quad_segments(a1, s2, s3, s4)
        ips = self.interval_pair_sum
        return (ips(*w1, *w2) + ips(*w2, *w3) + ips(*w3, *w4) + ips(*w4, *w1)
                + 2 * ips(*w1, *w3) + 2 * ips(*w2, *w4))


def lift_quadruple(positions, length: int):
    """Lift a cyclic quadruple of edge positions to offsets from its anchor.

    Returns (valid, a1, s2, s3, s4) where the s are monotone lifted offsets
    in [0, length].  A trailing entry equal to the anchor lifts to the full
    length when anything nonzero precedes it.  Works on scalars or arrays.
    """
    a1, a2, a3, a4 = positions
    r2 = (a2 - a1) % length
    r3 = (a3 - a1) % length
    r4 = (a4 - a1) % length
    s2 = r2
    s3 = np.where(r3 > 0, r3, np.where(s2 > 0, length, 0))
    s4 = np.where(r4 > 0, r4, np.where(s3 > 0, length, 0))
    valid = (s3 >= s2) & (s4 >= s3)
    return valid, a1, s2, s3, s4


def quad_demand_value(table: HoleDemandTable, quad_positions) -> int:
    """d_i for one concrete quadruple of boundary edge positions."""
    arr = tuple(np.asarray(p) for p in quad_positions)
    valid, a1, s2, s3, s4 = lift_quadruple(arr, table.length)
    if not bool(valid):
        raise ValueError("quadruple positions are not in cyclic boundary order")
    return int(table.quad_value(a1, s2, s3, s4))
