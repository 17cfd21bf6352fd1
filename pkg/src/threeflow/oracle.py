"""Exponential-time ground truth: exhaustive cut and (2,3)-metric scans.

Cut side enumerates all vertex subsets; metric side enumerates all maps
of V into the five K_{2,3} classes in vectorized chunks.  Regularity is
decided combinatorially: a region is simply connected iff its complex is
connected with Euler characteristic 1 and stays clear of the outer face.
Size bounds are explicit arguments; exceeding them raises, never skips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .model import Instance, demand_key

INF = math.inf

# K_{2,3} vertex classes: codes 0,1 are the two-side (T1, T2),
# codes 2,3,4 are the three-side (S1, S2, S3).
K23_DIST = np.array([[0, 2, 1, 1, 1],
                     [2, 0, 1, 1, 1],
                     [1, 1, 0, 2, 2],
                     [1, 1, 2, 0, 2],
                     [1, 1, 2, 2, 0]], dtype=np.int64)


class SizeBoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SubsetDescriptor:
    vertices: frozenset[int]
    cut_capacity: int
    separated_demand: int
    excess: int
    regular: bool
    type: int | None  # |H(X)| when regular


@dataclass(frozen=True)
class SigmaAssignment:
    classes: tuple[int, ...]  # per-vertex K_{2,3} class code
    c_side: int
    d_side: int
    excess: int


def _occurrence_profile(flags: list[bool]) -> str:
    """Classify a cyclic boolean occurrence sequence.

    Returns 'empty', 'all', 'segment' (one contiguous proper arc) or
    'broken'.
    """
    k = len(flags)
    cnt = sum(flags)
    if cnt == 0:
        return "empty"
    if cnt == k:
        return "all"
    drops = sum(1 for i in range(k) if flags[i] and not flags[(i + 1) % k])
    return "segment" if drops == 1 else "broken"


def is_regular(inst: Instance, vertices) -> tuple[bool, int | None]:
    """Regularity of a vertex set: simply connected region, segment holes.

    Returns (regular?, type) with type = number of holes met properly.
    """
    X = set(vertices)
    g = inst.graph
    if not X or len(X) >= g.n:
        return False, None  # regular sets are proper nonempty subsets
    # induced subgraph connectivity
    induced: dict[int, list[int]] = {v: [] for v in X}
    e_count = 0
    for e, (u, v) in g.edges.items():
        if u in X and v in X:
            induced[u].append(v)
            induced[v].append(u)
            e_count += 1
    start = next(iter(X))
    seen = {start}
    stack = [start]
    while stack:
        for w in induced[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(X):
        return False, None
    # faces entirely inside [X]
    f_count = 0
    for f in range(len(g.faces)):
        verts = g.face_vertices(f)
        if verts and verts <= X:
            if f == g.outer_face:
                return False, None
            f_count += 1
    if len(X) - e_count + f_count != 1:
        return False, None
    typ = 0
    for i in range(len(inst.holes)):
        walk = inst.boundaries[i].vertices
        profile = _occurrence_profile([v in X for v in walk])
        if profile == "broken":
            return False, None
        if profile == "segment":
            typ += 1
    return True, typ


@dataclass
class CutProfile:
    """Bucketed exhaustive cut minima for one instance."""
    min_all: float
    min_all_set: SubsetDescriptor | None
    min_regular: float
    min_semi_regular: float
    min_by_type: dict[int, float]
    type1_by_hole: dict[int, float]  # hole position -> min type-1 excess there
    type2_by_pair: dict[tuple[int, int], float]
    best_regular: SubsetDescriptor | None


def _holes_met(inst: Instance, X: set[int]) -> list[int] | None:
    """Hole positions met properly, or None if some boundary trace is broken."""
    met = []
    for i in range(len(inst.holes)):
        walk = inst.boundaries[i].vertices
        profile = _occurrence_profile([v in X for v in walk])
        if profile == "broken":
            return None
        if profile == "segment":
            met.append(i)
    return met


def oracle_cut_profile(inst: Instance, bound: int = 12) -> CutProfile:
    n = inst.graph.n
    if n > bound:
        raise SizeBoundExceeded(f"cut oracle bound {bound} < n = {n}")
    edges = list(inst.graph.edges.items())
    caps = np.array([inst.capacities[e] for e, _ in edges], dtype=np.int64)
    eu = np.array([uv[0] for _, uv in edges], dtype=np.int64)
    ev = np.array([uv[1] for _, uv in edges], dtype=np.int64)
    pairs = [(s, t, val) for (h, s, t), val in sorted(inst.demands.items())]
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(n)) & 1
    cut = ((bits[:, eu] ^ bits[:, ev]) * caps).sum(axis=1) if edges else np.zeros(len(masks), dtype=np.int64)
    sep = np.zeros(len(masks), dtype=np.int64)
    for s, t, val in pairs:
        sep += (bits[:, s] ^ bits[:, t]) * val
    excess = cut - sep

    profile = CutProfile(INF, None, INF, INF, {1: INF, 2: INF, 3: INF}, {}, {}, None)
    order = np.argsort(excess, kind="stable")
    # full minimum over proper subsets (drop X = V)
    for k in order:
        if masks[k] == (1 << n) - 1:
            continue
        X = frozenset(v for v in range(n) if (masks[k] >> v) & 1)
        profile.min_all = int(excess[k])
        profile.min_all_set = SubsetDescriptor(X, int(cut[k]), int(sep[k]),
                                               int(excess[k]), *is_regular(inst, X))
        break
    for k in range(len(masks)):
        if masks[k] == (1 << n) - 1:
            continue
        X = set(v for v in range(n) if (masks[k] >> v) & 1)
        exc = int(excess[k])
        met = _holes_met(inst, X)
        if met is not None and exc < profile.min_semi_regular:
            profile.min_semi_regular = exc
        reg, typ = is_regular(inst, X)
        if not reg:
            continue
        if exc < profile.min_regular:
            profile.min_regular = exc
            profile.best_regular = SubsetDescriptor(frozenset(X), int(cut[k]),
                                                    int(sep[k]), exc, True, typ)
        if typ in profile.min_by_type and exc < profile.min_by_type[typ]:
            profile.min_by_type[typ] = exc
        if typ == 1:
            hole = met[0]
            if exc < profile.type1_by_hole.get(hole, INF):
                profile.type1_by_hole[hole] = exc
        elif typ == 2:
            key = tuple(sorted(met))
            if exc < profile.type2_by_pair.get(key, INF):
                profile.type2_by_pair[key] = exc
    return profile


def oracle_cut_min(inst: Instance, flt: str = "ALL", type_alpha: int | None = None,
                   bound: int = 12):
    """Minimum cut excess over subsets passing the filter."""
    prof = oracle_cut_profile(inst, bound)
    if flt == "ALL":
        return prof.min_all, prof.min_all_set
    if flt == "SEMI_REGULAR":
        return prof.min_semi_regular, None
    if flt == "REGULAR" and type_alpha is None:
        return prof.min_regular, prof.best_regular
    if flt == "REGULAR":
        return prof.min_by_type[type_alpha], None
    raise ValueError(f"unknown filter {flt}")


@dataclass
class MetricProfile:
    min_all: float
    min_semi_regular: float
    min_regular: float
    best_all: SigmaAssignment | None
    best_semi: SigmaAssignment | None
    best_regular: SigmaAssignment | None


def _sigma_chunks(n: int, chunk: int):
    total = 5 ** n
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        codes = np.arange(start, stop, dtype=np.int64)
        digits = np.empty((stop - start, n), dtype=np.int8)
        rem = codes.copy()
        for v in range(n):
            digits[:, v] = rem % 5
            rem //= 5
        yield codes, digits


def _segment_flags(member: np.ndarray) -> np.ndarray:
    """Per row of a cyclic boolean matrix: one contiguous proper arc?"""
    rolled = np.roll(member, -1, axis=1)
    drops = (member & ~rolled).sum(axis=1)
    cnt = member.sum(axis=1)
    k = member.shape[1]
    return (cnt > 0) & (cnt < k) & (drops == 1)


def oracle_metric_min(inst: Instance, flt: str = "ALL", bound: int = 10,
                      chunk: int = 1 << 19) -> tuple[float, SigmaAssignment | None]:
    """Minimum (2,3)-metric excess over sigma assignments passing the filter."""
    prof = oracle_metric_profile(inst, bound, chunk, need=(flt,))
    if flt == "ALL":
        return prof.min_all, prof.best_all
    if flt == "SEMI_REGULAR":
        return prof.min_semi_regular, prof.best_semi
    if flt == "REGULAR":
        return prof.min_regular, prof.best_regular
    raise ValueError(f"unknown filter {flt}")


def oracle_metric_profile(inst: Instance, bound: int = 10, chunk: int = 1 << 19,
                          need=("ALL", "SEMI_REGULAR", "REGULAR")) -> MetricProfile:
    n = inst.graph.n
    if n > bound:
        raise SizeBoundExceeded(f"metric oracle bound {bound} < n = {n}")
    g = inst.graph
    edges = list(g.edges.items())
    caps = np.array([inst.capacities[e] for e, _ in edges], dtype=np.int64)
    eu = np.array([uv[0] for _, uv in edges], dtype=np.int64)
    ev = np.array([uv[1] for _, uv in edges], dtype=np.int64)
    pairs = [(s, t, val) for (h, s, t), val in sorted(inst.demands.items())]
    walks = [np.array(inst.boundaries[i].vertices, dtype=np.int64)
             for i in range(len(inst.holes))]
    face_sets = [np.array(sorted(g.face_vertices(f)), dtype=np.int64)
                 for f in range(len(g.faces))]
    want_semi = "SEMI_REGULAR" in need or "REGULAR" in need
    want_reg = "REGULAR" in need and len(inst.holes) == 3

    best_all, best_all_code = INF, None
    best_semi, best_semi_code = INF, None
    reg_candidates: list[tuple[int, int]] = []  # (value, code)

    for codes, dig in _sigma_chunks(n, chunk):
        cvals = np.zeros(len(codes), dtype=np.int64)
        for k in range(len(edges)):
            cvals += caps[k] * K23_DIST[dig[:, eu[k]], dig[:, ev[k]]]
        dvals = np.zeros(len(codes), dtype=np.int64)
        for s, t, val in pairs:
            dvals += val * K23_DIST[dig[:, s], dig[:, t]]
        exc = cvals - dvals
        k_all = int(np.argmin(exc))
        if exc[k_all] < best_all:
            best_all = int(exc[k_all])
            best_all_code = tuple(int(x) for x in dig[k_all])
        if want_semi and len(inst.holes) == 3:
            semi = np.ones(len(codes), dtype=bool)
            for si in range(3):  # class code 2 + si is S_{si+1}
                semi &= (dig == 2 + si).any(axis=1)
            for j in range(3):
                onb = dig[:, walks[j]]
                for si in range(3):
                    member = onb == 2 + si
                    if si == j:
                        semi &= ~member.any(axis=1)
                    else:
                        semi &= _segment_flags(member)
            if semi.any():
                sub = np.where(semi)[0]
                k_s = sub[int(np.argmin(exc[sub]))]
                if exc[k_s] < best_semi:
                    best_semi = int(exc[k_s])
                    best_semi_code = tuple(int(x) for x in dig[k_s])
                if want_reg:
                    cand = semi & (dig == 0).any(axis=1) & (dig == 1).any(axis=1)
                    for si in range(3):
                        member = dig == 2 + si
                        size = member.sum(axis=1)
                        ecnt = np.zeros(len(codes), dtype=np.int64)
                        for k in range(len(edges)):
                            ecnt += member[:, eu[k]] & member[:, ev[k]]
                        fcnt = np.zeros(len(codes), dtype=np.int64)
                        for f, verts in enumerate(face_sets):
                            if len(verts) == 0:
                                continue
                            inside = member[:, verts].all(axis=1)
                            if f == g.outer_face:
                                cand &= ~inside
                            else:
                                fcnt += inside
                        cand &= (size - ecnt + fcnt) == 1
                    for k in np.where(cand)[0]:
                        reg_candidates.append((int(exc[k]), int(codes[k])))

    best_reg, best_reg_code = INF, None
    if want_reg:
        reg_candidates.sort()
        for val, code in reg_candidates:
            digits = tuple((code // 5 ** v) % 5 for v in range(n))
            if all(_class_connected(inst, digits, 2 + si) for si in range(3)):
                best_reg, best_reg_code = val, digits
                break

    def pack(value, code):
        if code is None:
            return None
        cls = tuple(code)
        cv = sum(inst.capacities[e] * int(K23_DIST[cls[u], cls[v]])
                 for e, (u, v) in g.edges.items())
        dv = sum(val * int(K23_DIST[cls[s], cls[t]])
                 for (h, s, t), val in inst.demands.items())
        return SigmaAssignment(cls, cv, dv, cv - dv)

    return MetricProfile(best_all, best_semi, best_reg,
                         pack(best_all, best_all_code),
                         pack(best_semi, best_semi_code),
                         pack(best_reg, best_reg_code))


def _class_connected(inst: Instance, classes, code: int) -> bool:
    members = {v for v in range(inst.graph.n) if classes[v] == code}
    if not members:
        return False
    adj: dict[int, list[int]] = {v: [] for v in members}
    for u, v in inst.graph.edges.values():
        if u in members and v in members:
            adj[u].append(v)
            adj[v].append(u)
    start = next(iter(members))
    seen = {start}
    stack = [start]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(members)


def oracle_solvable(inst: Instance, cut_bound: int = 12, metric_bound: int = 10) -> bool:
    """Theorem-level verdict: cut condition plus, for 3 holes, metric condition."""
    cut_min, _ = oracle_cut_min(inst, "ALL", bound=cut_bound)
    if cut_min < 0:
        return False
    if len(inst.holes) < 3:
        return True  # cut condition is sufficient for at most two holes
    metric_min, _ = oracle_metric_min(inst, "ALL", bound=metric_bound)
    return metric_min >= 0


def oracle_max_eps(inst: Instance, hole: int, edge: int, pair: tuple[int, int],
                   cut_bound: int = 12, metric_bound: int = 10,
                   assert_prefix: bool = False) -> int:
    """Largest feasible reduction amount, by search over oracle_solvable."""
    from .reduction import apply_reduction, orient_pair

    key = demand_key(hole, *pair)
    cap = inst.capacities[edge]
    dem = inst.demands.get(key, 0)
    hi = min(cap, dem)
    orient = orient_pair(inst, hole, edge, pair)

    def feasible(eps: int) -> bool:
        if eps == 0:
            return oracle_solvable(inst, cut_bound, metric_bound)
        caps, demands = apply_reduction(inst.capacities, inst.demands, hole,
                                        edge, orient, eps)
        return oracle_solvable(inst.with_values(caps, demands),
                               cut_bound, metric_bound)

    if assert_prefix and hi <= 8:
        flags = [feasible(k) for k in range(hi + 1)]
        first_bad = next((k for k, f in enumerate(flags) if not f), hi + 1)
        assert all(not f for f in flags[first_bad:]), "feasibility is not a prefix"
        return first_bad - 1
    lo, hi_bad = 0, hi + 1
    if feasible(hi):
        return hi
    while hi_bad - lo > 1:
        mid = (lo + hi_bad) // 2
        if feasible(mid):
            lo = mid
        else:
            hi_bad = mid
    return lo
