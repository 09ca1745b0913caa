"""Multiplicative-weights h-length multicommodity flow with a moving-cut dual.

Edge weights double as the dual moving cut: blockers for the current threshold
lambda route integral flow, every routed edge has its weight multiplied by
(1+eps0)^(flow/capacity), and lambda rises until it reaches 1.  The final
weights, normalized by the smallest pair distance they induce, round down to a
1/h-granular moving cut that every h-length terminal path crosses with total
value at least 1.
"""

from __future__ import annotations

import heapq
import math
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

from .blockers import (_Arena, _blocker_engine, floor_log2,
                       lightest_path_multi)
from .config import DEFAULT, Config
from .flows import Flow, flow_stats
from .graphs import INF, Graph, MovingCut, edge_key
from .parallel import parallel_map

_PREC = 60  # decimal digits used for exp/ln, well past 96 dyadic bits


def round_down_sig(x: Fraction, bits: int) -> Fraction:
    """Largest dyadic rational with `bits` significant bits that is <= x."""
    if x == 0:
        return Fraction(0)
    if x < 0:
        raise ValueError("negative values not supported")
    p, q = x.numerator, x.denominator
    shift = bits - 1 - floor_log2(x)
    if shift <= 0:
        return Fraction(((p // q) >> -shift) << -shift)
    return Fraction((p << shift) // q, 1 << shift)


def _ln(x: Fraction) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _PREC
        return (Decimal(x.numerator) / Decimal(x.denominator)).ln()


def _exp_fraction(y: Decimal) -> Fraction:
    with localcontext() as ctx:
        ctx.prec = _PREC
        return Fraction(y.exp())


def power_rounded_down(base: Fraction, exponent: Fraction, bits: int) -> Fraction:
    """base**exponent as a dyadic rational of `bits` significant bits, rounded
    down; exact when the exponent is an integer."""
    if exponent.denominator == 1:
        return base ** int(exponent)
    with localcontext() as ctx:
        ctx.prec = _PREC
        y = Decimal(exponent.numerator) / Decimal(exponent.denominator) * _ln(base)
    return round_down_sig(_exp_fraction(y), bits)


def _dyadic_to_float(x: Fraction) -> float:
    """float(x) for dyadic rationals, via ldexp (exactly the rounded value)."""
    q = x.denominator
    return math.ldexp(float(x.numerator), 1 - q.bit_length()) if q > 1 else float(x.numerator)


def _multi_source_lengths(g: Graph, sources) -> dict[int, int]:
    dist = {s: 0 for s in sources}
    pq = [(0, s) for s in sources]
    heapq.heapify(pq)
    while pq:
        d, u = heapq.heappop(pq)
        if d > dist.get(u, INF):
            continue
        for (v, e) in g.neighbors(u):
            nd = d + g.lengths[e]
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(pq, (nd, v))
    return dist


def _man_frac(m: int, ex: int) -> Fraction:
    """Exact value of a mantissa/exponent pair m * 2**ex."""
    return Fraction(m << ex) if ex >= 0 else Fraction(m, 1 << -ex)


class _Pair:
    """One (S, T) commodity restricted to the edges an h-length path can use."""

    __slots__ = ("index", "sources", "targets", "batch", "region", "caps",
                 "alive", "arena", "dcache", "xcheck")

    def __init__(self, index, sources, targets, batch, region, caps):
        self.index = index
        self.sources = sources
        self.targets = targets
        self.batch = batch
        self.region = region
        self.alive = region is not None and region.m > 0
        self.caps = caps
        self.arena = None
        self.xcheck = None
        # lower bound on the current lightest h-length weight: weights only
        # grow, so any previously observed distance keeps bounding from below
        self.dcache = 0.0


def _pair_region(g_pos: Graph, sources, targets, h: int, config: Config):
    """Subgraph of positive-capacity edges that some <=h-length S-T path uses."""
    from_s = _multi_source_lengths(g_pos, sources)
    from_t = _multi_source_lengths(g_pos, targets)
    keep = []
    for (u, v, l, c) in g_pos.edges:
        du, dv = from_s.get(u, INF), from_s.get(v, INF)
        tu, tv = from_t.get(u, INF), from_t.get(v, INF)
        if min(du + l + tv, dv + l + tu) <= h:
            keep.append((u, v, l, c))
    if not keep:
        return None
    return Graph(g_pos.n, keep, config)


def mwu_flow_cut(g: Graph, pairs: Sequence[tuple], h: int, eps,
                 batches: Sequence[int] | None = None,
                 batch_sep: int | None = None,
                 config: Config = DEFAULT):
    """Near-optimal feasible h-length flow for the terminal pairs plus a
    moving cut certifying near-optimality.

    pairs is a list of (sources, targets); batches optionally assigns a batch
    id per pair, and same-batch pairs must sit at least batch_sep (default 2h)
    apart.  Returns (flow, cut, report).
    """
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if h < 1:
        raise ValueError("h must be a positive integer")
    if batches is None:
        batches = list(range(len(pairs)))
    if len(batches) != len(pairs):
        raise ValueError("one batch id per pair required")
    if batch_sep is None:
        batch_sep = 2 * h
    _validate_batching(g, pairs, batches, batch_sep)

    eps0 = eps / 6
    zeta = (1 + 2 * eps0) / eps0 + 1
    m_eff = max(g.m, 2)
    bits = config.weight_precision_bits
    # eta = eps0 / ((1+eps0) * zeta * ln(m_eff)), rounded down
    with localcontext() as ctx:
        ctx.prec = _PREC
        eta_dec = (Decimal(eps0.numerator) / Decimal(eps0.denominator)) / (
            (Decimal((1 + eps0).numerator) / Decimal((1 + eps0).denominator))
            * (Decimal(zeta.numerator) / Decimal(zeta.denominator))
            * Decimal(m_eff).ln())
        eta = round_down_sig(Fraction(eta_dec), bits)

    pos_edges = [(u, v, l, c) for (u, v, l, c) in g.edges if c > 0]
    g_pos = Graph(g.n, pos_edges, config) if pos_edges else None

    lam0 = power_rounded_down(Fraction(1, m_eff), zeta, bits)
    # lambda lives as a truncated mantissa/exponent pair too: jumps round the
    # level down, which only keeps it further under the true distances, and
    # each jump still multiplies by nearly the full growth power
    lam_man, lam_exp = lam0.numerator, 1 - lam0.denominator.bit_length()
    growth = 1 + eps0

    pair_objs = []
    for i, (S, T) in enumerate(pairs):
        S = sorted(set(S))
        T = sorted(set(T))
        if not S or not T:
            raise ValueError("empty terminal set")
        if not set(S).isdisjoint(T):
            # a shared terminal puts the pair at distance 0, under any
            # positive threshold forever; self-demand routes for free anyway
            raise ValueError(f"pair {i}: sources and targets overlap")
        region = _pair_region(g_pos, S, T, h, config) if g_pos is not None else None
        caps = dict(region.capacities) if region is not None else {}
        pair_objs.append(_Pair(i, S, T, batches[i], region, caps))
    batch_order = sorted({b for b in batches})
    by_batch = {b: [p for p in pair_objs if p.batch == b] for b in batch_order}

    # weights live as truncated mantissa/exponent pairs; each pair's arena
    # mirrors them as floats and regrids them as integers on demand
    wman: dict[tuple[int, int], tuple[int, int]] = {}
    edge_entries: dict[tuple[int, int], list] = {}
    edge_owners: dict[tuple[int, int], list] = {}
    if g_pos is not None:
        lam0_f = _dyadic_to_float(lam0)
        if lam0_f <= 0.0:
            raise ValueError("initial weight underflows floats; raise eps "
                             "or shrink the graph")
        lam0_me = (lam_man, lam_exp)
        for e in g_pos.capacities:
            wman[e] = lam0_me

    p0, q0 = eps0.numerator, eps0.denominator
    mult_num = (None, q0 + p0, q0 + 2 * p0)

    def make_xcheck(ar):
        ekeys = ar.ekeys

        def xcheck(eids, mult):
            # exact verdict: chain weight <= (1 + mult*eps0) * lambda.  All
            # quantities are dyadic, so this is integer shifts and compares
            # on a per-arena common-exponent grid.
            grid = ar.wgrid
            if grid is None:
                mes = [wman[k] for k in ekeys]
                base = min(ex for _m, ex in mes)
                grid = ar.wgrid = ([m << (ex - base) for m, ex in mes], base)
            W, base = grid
            d = 0
            for ei in eids:
                d += W[ei]
            lhs = d * q0
            rhs = mult_num[mult] * lam_man
            sh = base - lam_exp
            return (lhs << sh) <= rhs if sh >= 0 else lhs <= (rhs << -sh)

        return xcheck

    for p in pair_objs:
        if not p.alive:
            continue
        p.arena = _Arena(p.region, h, p.sources, p.targets)
        p.xcheck = make_xcheck(p.arena)
        for row in p.arena.adj:
            for entry in row:
                entry[2] = lam0_f
        for ei, k in enumerate(p.arena.ekeys):
            edge_entries.setdefault(k, []).extend(p.arena.entries[ei])
            edge_owners.setdefault(k, []).append(p.arena)

    factor_cache: dict[tuple[int, int], tuple[int, int]] = {}
    jump_cache: dict[int, tuple[int, int]] = {}

    def bump(e, num: int, den: int):
        key = (num, den)
        fac = factor_cache.get(key)
        if fac is None:
            fr = round_down_sig(
                power_rounded_down(growth, Fraction(num, den), bits), bits)
            fac = factor_cache[key] = (fr.numerator,
                                       1 - fr.denominator.bit_length())
        m, ex = wman[e]
        m *= fac[0]
        ex += fac[1]
        s = m.bit_length() - bits
        if s > 0:  # keep `bits` significant bits, rounding down
            m >>= s
            ex += s
        wman[e] = (m, ex)
        wf = math.ldexp(float(m), ex)
        for entry in edge_entries[e]:
            entry[2] = wf
        for owner in edge_owners[e]:
            owner.wversion += 1
            owner.wgrid = None

    total_int: dict[tuple[int, ...], int] = {}
    blocker_calls = 0
    rep_overruns = 0
    phases = 0
    log_growth_n = math.ceil(math.log(max(g.n, 2)) / math.log(float(growth)))
    rep_budget = math.ceil(config.theta * h * log_growth_n / float(eps0))
    rep_hard_cap = max(64 * rep_budget, 64)
    blame_cap = 4 * max(1, math.ceil(math.log2(config.size_bound(g.n))))
    round_cap = config.blocker_round_factor * max(1, h) * max(
        1, math.ceil(math.log2(max(2, g.n))))
    f_light = float(1 + eps0)
    f_ext = float(1 + 2 * eps0)
    log_growth_f = math.log(float(growth))
    # round-0 tables stay exact this many levels past the thresholds, so the
    # lambda jump sees true distances for every step it realistically takes
    jump_window = float(growth) ** 8
    tf_light = tf_ext = cut0 = 0.0

    def run_blocker(p: _Pair):
        return _blocker_engine(
            p.arena, tf_light, tf_ext, None, None,
            blame_cap, round_cap, True, cut0, keep_seq=False,
            xcheck=p.xcheck)

    while lam_man.bit_length() + lam_exp <= 0 and any(p.alive for p in pair_objs):
        phases += 1
        lam_f = math.ldexp(float(lam_man), lam_exp)
        tf_light = lam_f * f_light
        tf_ext = lam_f * f_ext
        clear_f = tf_light * (1 + 1e-9)
        cut0 = tf_ext * jump_window
        for b in batch_order:
            # a stale bound above the threshold certifies the pair clear; the
            # engine's fresh round-0 check settles everything else, and a pair
            # that routed flow is re-run until it confirms blocked post-bump
            pending = [p for p in by_batch[b]
                       if p.alive and p.dcache <= clear_f]
            reps = 0
            while pending:
                reps += 1
                if reps > rep_hard_cap:
                    raise RuntimeError("weight updates failed to clear batch")
                if reps == rep_budget + 1:
                    rep_overruns += 1
                results = parallel_map(run_blocker, pending, config.threads)
                blocker_calls += len(pending)
                still = []
                for p, (tot, edged, _seq, d0) in zip(pending, results):
                    p.dcache = d0
                    if tot:
                        for path, val in tot.items():
                            total_int[path] = total_int.get(path, 0) + val
                        ar = p.arena
                        for ei, val in edged.items():
                            bump(ar.ekeys[ei], val, ar.caps[ei])
                        still.append(p)
                pending = still
        # all pairs clear: jump lambda as far as their distance bounds allow
        d_min_f = INF
        for p in pair_objs:
            if p.alive and p.dcache < d_min_f:
                d_min_f = p.dcache
        if d_min_f is INF:
            break
        step = math.floor((math.log(d_min_f * (1 - 1e-9)) - math.log(lam_f))
                          / log_growth_f - 1e-6)
        s = max(1, step)
        fac = jump_cache.get(s)
        if fac is None:
            fr = round_down_sig(growth ** s, bits)
            fac = jump_cache[s] = (fr.numerator, 1 - fr.denominator.bit_length())
        lam_man *= fac[0]
        lam_exp += fac[1]
        sh = lam_man.bit_length() - bits
        if sh > 0:
            lam_man >>= sh
            lam_exp += sh

    flow = Flow(g, {p: eta * v for p, v in total_int.items() if v > 0})
    weight = {e: _man_frac(*mv) for e, mv in wman.items()}
    cut, d_min, repairs = _extract_cut(g, g_pos, pair_objs, weight, h, config)
    stats = flow_stats(flow)
    if stats["congestion"] is not INF and stats["congestion"] > 1:
        raise AssertionError(f"flow congestion {stats['congestion']} exceeds 1")
    _check_cut_valid(g, pair_objs, cut, h)
    log_n = max(1, math.ceil(math.log2(config.size_bound(g.n))))
    report = {
        "flow_value": flow.value(),
        "cut_size": cut.size(g),
        "support": len(flow.paths),
        "c0": (len(flow.paths) / ((g.m + len(pairs)) * log_n ** 3)
               if g.m else 0.0),
        "phases": phases,
        "blocker_calls": blocker_calls,
        "rep_overruns": rep_overruns,
        "eta": eta,
        "lambda_final": _man_frac(lam_man, lam_exp),
        "congestion": stats["congestion"],
        "dilation": stats["dilation"],
        "d_min": d_min,
        "repairs": repairs,
    }
    return flow, cut, report


def _validate_batching(g: Graph, pairs, batches, batch_sep: int):
    groups: dict[int, list[int]] = {}
    for i, b in enumerate(batches):
        groups.setdefault(b, []).append(i)
    for b, idxs in groups.items():
        for pos, i in enumerate(idxs):
            if pos == 0 or batch_sep <= 0:
                continue
            si, ti = pairs[i]
            dist = _multi_source_lengths(g, sorted(set(si) | set(ti)))
            for j in idxs[:pos]:
                sj, tj = pairs[j]
                d = min((dist.get(v, INF) for v in set(sj) | set(tj)),
                        default=INF)
                if d < batch_sep:
                    raise ValueError(
                        f"pairs {j} and {i} share batch {b} but are {d} < "
                        f"{batch_sep} apart")


def _extract_cut(g: Graph, g_pos, pair_objs, weight, h: int, config: Config):
    """Normalize weights by the smallest pair distance, floor onto the 1/h
    grid, then repair any terminal path the flooring pushed below 1."""
    nums = {e: 0 for e in g.capacities}
    for e, c in g.capacities.items():
        if c == 0:
            nums[e] = h  # free separation: zero-capacity edges cost nothing
    dists = []
    for p in pair_objs:
        if p.region is None:
            dists.append(INF)
            continue
        d, _ = lightest_path_multi(p.region, weight, p.sources, p.targets, h)
        dists.append(d)
    finite = [d for d in dists if d is not INF]
    if not finite:
        return MovingCut(h, {e: v for e, v in nums.items() if v}), INF, 0
    d_min = min(finite)
    remainder = {}
    for e in g_pos.capacities:
        val = weight[e] / d_min
        if val > 1:
            val = Fraction(1)
        scaled = val * h
        nums[e] = scaled.numerator // scaled.denominator
        remainder[e] = scaled - nums[e]

    repairs = 0
    cap = config.blocker_round_factor * max(1, h) * max(
        1, math.ceil(math.log2(max(2, g.n)))) * max(1, len(pair_objs))
    cut_w = {e: Fraction(nums[e], h) for e in g_pos.capacities}
    while True:
        violated = None
        for p in pair_objs:
            if p.region is None:
                continue
            d, path = lightest_path_multi(p.region, cut_w, p.sources,
                                          p.targets, h)
            if d is not INF and d < 1:
                violated = path
                break
        if violated is None:
            break
        repairs += 1
        if repairs > cap:
            raise RuntimeError("cut repair failed to converge")
        candidates = [edge_key(a, b) for a, b in zip(violated, violated[1:])]
        candidates = [e for e in candidates if nums[e] < h]
        e = max(candidates,
                key=lambda e: (remainder.get(e, Fraction(0)),
                               -g.capacities[e], (-e[0], -e[1])))
        nums[e] += 1
        cut_w[e] = Fraction(nums[e], h)
    return MovingCut(h, {e: v for e, v in nums.items() if v}), d_min, repairs


def _check_cut_valid(g: Graph, pair_objs, cut: MovingCut, h: int):
    """Every h-length terminal path must cross total cut value >= 1."""
    vals = {e: cut.value(e) for e in g.capacities}
    for p in pair_objs:
        d, path = lightest_path_multi(g, vals, p.sources, p.targets, h)
        if d is not INF and d < 1:
            raise AssertionError(
                f"cut leaves pair {p.index} crossable via {path}")
