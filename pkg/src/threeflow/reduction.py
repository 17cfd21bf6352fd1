"""The solve loop: pick (hole, boundary edge, pair), reduce, recurse, unwind.

One iteration picks a boundary edge e = uv and a demand pair st of the
same hole, finds the largest amount eps by which capacity on e and demand
on st can be simultaneously reduced while the problem stays solvable, and
applies it, spawning compensation demands su and vt.  The maximum eps
needs at most three checker rounds: the first tentative reduction is the
trivial cap min{c(e), d(st)}; if the reduced state breaks, the violation
amount nu (always even) pulls eps back by nu/4 then nu/2 steps (for the
cut-only regime of at most two holes a single nu/2 step suffices).

Processed (edge, pair) combinations never become reducible again, so each
is tried at most once; the exhausted set survives topology events on the
same capacity profile.  Reductions are unwound LIFO into an integer
multiflow: each record concatenates eps units of s-u and v-t subflows
through its edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cuts import build_demand_tables, min_cut_excess, mu1, nu2, nu3
from .dual import all_terminal_distances, build_dual
from .flows import concat_through_edge, extract_subflow, merged, pair_up
from .metrics import mu_hat
from .model import EMPTY_FLOW, Instance, Multiflow, demand_key

INF = math.inf


@dataclass
class CheckReport:
    mu1: float
    nu2: float
    nu3: float
    mu_hat: float
    certs: dict = field(default_factory=dict)

    @property
    def minimum(self) -> float:
        return min(self.mu1, self.nu2, self.nu3, self.mu_hat)

    @property
    def cut_minimum(self) -> float:
        return min(self.mu1, self.nu2, self.nu3)

    def as_dict(self):
        return {"mu1": self.mu1, "nu2": self.nu2, "nu3": self.nu3,
                "mu_hat": self.mu_hat}


class CheckerContext:
    """Reusable dual topology for repeated checker rounds on one instance."""

    def __init__(self, inst: Instance, max_quad: int | None = 16,
                 use_metric: bool = True):
        self.instance = inst
        self.dual = build_dual(inst)
        self.max_quad = max_quad
        self.nholes = len(inst.holes)
        self.use_metric = use_metric and self.nholes == 3

    def evaluate(self, caps=None, demands=None, want_certs: bool = False,
                 eulerian: bool = True) -> CheckReport:
        inst = self.instance
        caps = inst.capacities if caps is None else caps
        demands = inst.demands if demands is None else demands
        dtable = all_terminal_distances(inst, self.dual, caps)
        tables = build_demand_tables(inst, demands)
        certs = {}
        m1, c1 = mu1(inst, dtable, tables)
        n2, c2 = (nu2(inst, dtable, tables) if self.nholes >= 2 else (INF, None))
        n3, c3 = (nu3(inst, dtable, tables) if self.nholes == 3 else (INF, None))
        mh, cm = (INF, None)
        if self.use_metric:
            mh, cm = mu_hat(inst, dtable, tables, self.max_quad,
                            want_certificate=want_certs)
        if want_certs:
            certs = {"mu1": c1, "nu2": c2, "nu3": c3, "mu_hat": cm}
        report = CheckReport(m1, n2, n3, mh, certs)
        if eulerian:
            for v in report.as_dict().values():
                assert v == INF or v % 2 == 0, f"odd excess {v} on Eulerian data"
        return report


def orient_pair(inst: Instance, hole: int, edge: int, pair) -> tuple[int, int, int, int]:
    """Label the reduction corners so s, u, v, t occur in boundary order.

    u -> v is the edge's traversal direction in the boundary walk; t is the
    first pair endpoint met continuing the walk from v (first occurrences
    break ties on boundaries that revisit vertices).
    """
    cycle = inst.boundaries[hole]
    s_or_t = set(pair)
    if edge not in cycle.edge_pos:
        raise ValueError(f"edge {edge} is not on the boundary of hole {hole + 1}")
    p = cycle.edge_pos[edge]
    k = len(cycle)
    u = cycle.walk[p][0]
    v = cycle.walk[(p + 1) % k][0]
    for off in range(k):
        w = cycle.walk[(p + 1 + off) % k][0]
        if w in s_or_t:
            t = w
            s = (set(pair) - {w}).pop() if len(s_or_t) == 2 else w
            return s, u, v, t
    raise ValueError(f"pair {pair} is not on the boundary of hole {hole + 1}")


def apply_reduction(caps: dict, demands: dict, hole: int, edge: int,
                    orient: tuple[int, int, int, int], eps: int):
    """Capacity/demand arithmetic of one reduction; returns fresh dicts."""
    s, u, v, t = orient
    caps = dict(caps)
    demands = dict(demands)
    key = demand_key(hole, s, t)
    if eps < 0 or eps > caps[edge] or eps > demands.get(key, 0):
        raise ValueError(f"reduction amount {eps} out of range")
    if eps == 0:
        return caps, demands
    caps[edge] -= eps
    demands[key] -= eps
    if demands[key] == 0:
        del demands[key]
    for a, b in ((s, u), (v, t)):
        if a != b:
            k2 = demand_key(hole, a, b)
            demands[k2] = demands.get(k2, 0) + eps
    return caps, demands


def max_feasible_eps(ctx: CheckerContext, caps: dict, demands: dict,
                     hole: int, edge: int, orient: tuple[int, int, int, int]):
    """Largest feasible reduction amount, in at most three checker rounds.

    Requires the current state solvable.  Returns (eps, rounds) where
    rounds logs (tentative eps, resulting minimum excess).
    """
    s, _, _, t = orient
    key = demand_key(hole, s, t)
    eps1 = min(caps[edge], demands[key])
    rounds = []

    def residual(eps):
        c2, d2 = apply_reduction(caps, demands, hole, edge, orient, eps)
        return ctx.evaluate(c2, d2).minimum

    nu_1 = residual(eps1)
    rounds.append((eps1, nu_1))
    if nu_1 >= 0:
        return eps1, rounds
    if ctx.use_metric:
        eps2 = eps1 + _floor_div(nu_1, 4)
        if eps2 <= 0:
            return 0, rounds
        nu_2 = residual(eps2)
        rounds.append((eps2, nu_2))
        if nu_2 >= 0:
            return eps2, rounds
        assert nu_2 % 2 == 0
        eps3 = eps2 + nu_2 // 2
    else:
        assert nu_1 % 2 == 0
        eps3 = eps1 + _floor_div(nu_1, 2)
    assert eps3 >= 0, "negative maximum reduction on a solvable state"
    return eps3, rounds


def _floor_div(a, b):
    return int(a) // b


@dataclass(frozen=True)
class ReductionRecord:
    edge: int
    orient: tuple[int, int, int, int]  # s, u, v, t
    eps: int


@dataclass
class SolveStats:
    iterations: int = 0
    reductions: int = 0
    restarts: int = 0


@dataclass
class TraceEntry:
    caps: dict
    demands: dict
    instance: Instance
    hole: int
    edge: int
    pair: tuple[int, int]
    eps: int
    rounds: list


def unwind(records: list[ReductionRecord], flow: Multiflow) -> Multiflow:
    """Replay reductions LIFO, concatenating subflows through each edge."""
    for rec in reversed(records):
        s, u, v, t = rec.orient
        entries = list(flow.entries)
        if s == u and v == t:
            flow = merged(entries + [((u, rec.edge, v), rec.eps)])
            continue
        if s == u:
            lefts = [(None, rec.eps)]
        else:
            lefts, flow = extract_subflow(flow, s, u, rec.eps)
        if v == t:
            rights = [(None, rec.eps)]
        else:
            rights, flow = extract_subflow(flow, v, t, rec.eps)
        if lefts and lefts[0][0] is None:
            combos = [(None, rp, w) for rp, w in rights]
        elif rights and rights[0][0] is None:
            combos = [(lp, None, w) for lp, w in lefts]
        else:
            combos = pair_up(lefts, rights)
        new_entries = [(concat_through_edge(lp, rec.edge, u, v, rp), w)
                       for lp, rp, w in combos]
        flow = merged(list(flow.entries) + new_entries)
    return flow


def _candidates(inst: Instance, demands: dict, exhausted: set, rr: int):
    """Next unexhausted (hole, edge, pair): holes round-robin, then lexicographic."""
    nh = len(inst.holes)
    per_hole: list[list[tuple[int, int]]] = [[] for _ in range(nh)]
    for (h, s, t), val in demands.items():
        if val > 0:
            per_hole[h].append((s, t))
    for off in range(nh):
        h = (rr + off) % nh
        if not per_hole[h]:
            continue
        token = inst.holes[h].token
        for e in sorted(set(inst.boundaries[h].edges)):
            for s, t in sorted(per_hole[h]):
                key = (token, e, s, t)
                if key not in exhausted:
                    return h, e, (s, t), key
    return None


def run_reduction_loop(inst: Instance, exhausted: set, stats: SolveStats,
                       solve_next, max_quad: int | None,
                       trace: list | None = None) -> Multiflow:
    """Reduce one clean instance until a topology event or demand exhaustion.

    ``solve_next(instance)`` solves the post-event instance (re-normalizing
    as needed) and returns its multiflow; records accumulated here are then
    unwound on top of it.  The current state is assumed solvable.
    """
    caps = dict(inst.capacities)
    demands = {k: v for k, v in inst.demands.items() if v > 0}
    ctx = CheckerContext(inst, max_quad)
    records: list[ReductionRecord] = []
    rr = 0
    while True:
        if not demands:
            return unwind(records, EMPTY_FLOW)
        pick = _candidates(inst, demands, exhausted, rr)
        if pick is None:
            raise AssertionError(
                "scheduler exhausted with demands remaining; contradicts the "
                "positive-reduction existence argument")
        h, e, pair, key = pick
        rr = (h + 1) % len(inst.holes)
        orient = orient_pair(inst, h, e, pair)
        eps, rounds = max_feasible_eps(ctx, caps, demands, h, e, orient)
        stats.iterations += 1
        exhausted.add(key)
        if trace is not None:
            trace.append(TraceEntry(dict(caps), dict(demands), inst, h, e,
                                    pair, eps, rounds))
        if eps == 0:
            continue
        stats.reductions += 1
        caps, demands = apply_reduction(caps, demands, h, e, orient, eps)
        records.append(ReductionRecord(e, orient, eps))
        if caps[e] == 0 or not any(k[0] == h for k in demands):
            stats.restarts += 1
            flow = solve_next(inst.with_values(caps, demands))
            return unwind(records, flow)
