"""h-length sparse cutmatches between node-weighting pairs.

Each pair (A_i, A_i') is wired to a private super-source/sink through
unit-length virtual edges and routed by the multiplicative-weights flow at
boosted capacity ceil(U_e * B / phi).  Mass that routes integrally is matched;
a moving cut restricted to the real edges separates whatever remains, and its
size is charged against the unmatched mass.  When almost everything matched,
charging can fail, so matching repeats on the residual weightings (the
residual shrinks geometrically) until the charge goes through.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .blockers import lightest_path_multi
from .config import DEFAULT, Config
from .flows import Flow, flow_stats
from .graphs import Graph, INF, MovingCut, NodeWeighting, apply_cut, edge_key
from .mwu import _multi_source_lengths, mwu_flow_cut


class CutmatchResult:
    """Matched/unmatched support partitions per pair, the per-pair flows, the
    separating moving cut and its congestion/size accounting."""

    __slots__ = ("parts", "flows", "flow", "cut", "congestion", "report")

    def __init__(self, parts, flows, flow, cut, congestion, report):
        self.parts = parts          # per pair: (M_i, U_i, M_i', U_i')
        self.flows = flows          # per pair: Flow on the real graph
        self.flow = flow            # sum of the above
        self.cut = cut              # MovingCut at scale h
        self.congestion = congestion
        self.report = report

    def __repr__(self):
        return (f"CutmatchResult({len(self.parts)} pairs, "
                f"value {self.flow.value()}, cut size {self.report['cut_size']})")


def cutmatch(g: Graph, pairs: Sequence[tuple[NodeWeighting, NodeWeighting]],
             h: int, phi, eps, batching: Sequence[int] | None = None,
             config: Config = DEFAULT) -> CutmatchResult:
    phi = Fraction(phi)
    if phi <= 0:
        raise ValueError("phi must be positive")
    if h < 1:
        raise ValueError("h must be a positive integer")
    for idx, (a, ap) in enumerate(pairs):
        if a.size() != ap.size():
            raise ValueError(f"pair {idx}: weighting sizes differ "
                             f"({a.size()} vs {ap.size()})")
        overlap = set(a.support()) & set(ap.support())
        if overlap:
            raise ValueError(f"pair {idx}: supports overlap on {sorted(overlap)}")
    if batching is not None:
        if len(batching) != len(pairs):
            raise ValueError("one batch id per pair required")
        _validate_batching(g, pairs, batching, 2 * h)

    n, k = g.n, len(pairs)
    aux_cfg = config.with_(size_exponent=max(config.size_exponent, 8))
    boost = max(1, config.cutmatch_cap_factor)
    boosted = {e: -(-c * boost * phi.denominator // phi.numerator)
               for e, c in g.capacities.items()}

    sum_a = sum(a.size() for a, _ap in pairs)
    res_a = [dict(a.weights) for a, _ap in pairs]
    res_ap = [dict(ap.weights) for _a, ap in pairs]
    sent = [dict() for _ in pairs]
    received = [dict() for _ in pairs]
    pair_paths: list[dict] = [dict() for _ in pairs]
    val_total = 0
    nums: dict[tuple[int, int], int] = {}
    remainder: dict[tuple[int, int], Fraction] = {}
    mwu_report = {}

    round_cap = max(4, math.ceil(math.log2(sum_a + 2)) + 4)
    rounds = 0
    while True:
        rounds += 1
        if rounds > round_cap:
            raise RuntimeError("cutmatch failed to converge")
        active = [i for i in range(k) if sum(res_a[i].values()) > 0]
        if not active:
            nums, remainder = {}, {}
            break
        gk, sig, tau = _aux_graph(g, boosted, active, res_a, res_ap, aux_cfg)
        mpairs = [([sig[i]], [tau[i]]) for i in active]
        mbatches = [batching[i] for i in active] if batching is not None else None
        # Separation was already validated on the real graph.  Distances in the
        # auxiliary graph can only be checked with batch_sep 0: another pair's
        # super-source is a 2-hop shortcut between its support vertices, which
        # would make legitimate batchings look too close.
        mflow, mcut, mwu_report = mwu_flow_cut(
            gk, mpairs, h + 2, eps, batches=mbatches, batch_sep=0,
            config=aux_cfg)
        routed = _integral_extraction(gk, mflow, [(sig[i], tau[i]) for i in active], h + 2)
        for path, z in routed.items():
            i = active[(path[0] - n) // 2]
            u, v = path[1], path[-2]
            real = path[1:-1]
            pair_paths[i][real] = pair_paths[i].get(real, 0) + z
            sent[i][u] = sent[i].get(u, 0) + z
            received[i][v] = received[i].get(v, 0) + z
            res_a[i][u] -= z
            res_ap[i][v] -= z
            val_total += z
        nums = {e: (w * h) // (h + 2)
                for e, w in mcut.increase.items() if e in g.capacities}
        remainder = {e: Fraction(mcut.increase[e] * h, h + 2) - nums[e]
                     for e in nums}
        unmatched = [(sorted(u for u, w in res_a[i].items() if w > 0),
                      sorted(v for v, w in res_ap[i].items() if w > 0))
                     for i in range(k)]
        _repair_separation(g, nums, remainder, unmatched, h, config)
        size = MovingCut(h, {e: w for e, w in nums.items() if w}).size(g) \
            if nums else Fraction(0)
        if size <= phi * (sum_a - val_total):
            break
        # nearly everything matched but the cut still overcharges: match again
        # on the shrunken residual and rebuild the cut there

    cut = MovingCut(h, {e: w for e, w in nums.items() if w})
    flows = [Flow(g, {p: Fraction(z) for p, z in pair_paths[i].items()})
             for i in range(k)]
    combined: dict = {}
    for f in flows:
        for p, v in f.items():
            combined[p] = combined.get(p, Fraction(0)) + v
    flow = Flow(g, combined, validate=False)
    parts = []
    for i, (a, ap) in enumerate(pairs):
        m_i = tuple(u for u in a.support() if sent[i].get(u, 0) == a.weights[u])
        u_i = tuple(u for u in a.support() if u not in set(m_i))
        m_ip = tuple(v for v in ap.support()
                     if received[i].get(v, 0) == ap.weights[v])
        u_ip = tuple(v for v in ap.support() if v not in set(m_ip))
        parts.append((m_i, u_i, m_ip, u_ip))
    stats = flow_stats(flow)
    report = {
        "value": flow.value(),
        "cut_size": cut.size(g),
        "bound": phi * (sum_a - val_total),
        "congestion": stats["congestion"],
        "rounds": rounds,
        "boost": boost,
        "mwu": mwu_report,
    }
    result = CutmatchResult(parts, flows, flow, cut, stats["congestion"], report)
    _verify(result, g, pairs, h, phi)
    return result


def _aux_graph(g: Graph, boosted, active, res_a, res_ap, config):
    n = g.n
    sig = {i: n + 2 * j for j, i in enumerate(active)}
    tau = {i: n + 2 * j + 1 for j, i in enumerate(active)}
    edges = [(u, v, l, boosted[edge_key(u, v)]) for (u, v, l, _c) in g.edges]
    for i in active:
        for u, w in sorted(res_a[i].items()):
            if w > 0:
                edges.append((sig[i], u, 1, w))
        for v, w in sorted(res_ap[i].items()):
            if w > 0:
                edges.append((tau[i], v, 1, w))
    return Graph(n + 2 * len(active), edges, config), sig, tau


def _integral_extraction(gk: Graph, mflow: Flow, terminals, h_int: int):
    """Greedy integral rounding of the fractional flow's support paths in
    canonical order, completed by hop-limited augmentation."""
    res = dict(gk.capacities)
    out: dict[tuple, int] = {}

    def route(path, z):
        out[path] = out.get(path, 0) + z
        for a, b in zip(path, path[1:]):
            res[edge_key(a, b)] -= z

    for path in mflow.paths:
        z = min(res[edge_key(a, b)] for a, b in zip(path, path[1:]))
        if z > 0:
            route(path, z)
    for (s, t) in terminals:
        while True:
            _w, path = lightest_path_multi(gk, {}, [s], [t], h_int,
                                           edge_ok=lambda e: res[e] > 0)
            if path is None:
                break
            z = min(res[edge_key(a, b)] for a, b in zip(path, path[1:]))
            route(path, z)
    return out


def _repair_separation(g: Graph, nums, remainder, unmatched, h: int,
                       config: Config):
    """Raise cut values until every unmatched pair sits > h apart under
    lengths + h*C."""
    cap = config.blocker_round_factor * max(1, h) * max(
        1, math.ceil(math.log2(max(2, g.n)))) * max(1, len(unmatched))
    steps = 0
    while True:
        cut_g = apply_cut(g, MovingCut(h, {e: w for e, w in nums.items() if w})) \
            if any(nums.values()) else g
        offender = None
        for (us, vs) in unmatched:
            if not us or not vs:
                continue
            _w, path = lightest_path_multi(cut_g, {}, us, vs, h)
            if path is not None:
                offender = path
                break
        if offender is None:
            return
        steps += 1
        if steps > cap:
            raise RuntimeError("separation repair failed to converge")
        candidates = [e for e in (edge_key(a, b)
                                  for a, b in zip(offender, offender[1:]))
                      if nums.get(e, 0) < h]
        e = max(candidates,
                key=lambda e: (remainder.get(e, Fraction(0)),
                               -g.capacities[e], (-e[0], -e[1])))
        nums[e] = nums.get(e, 0) + 1


def _validate_batching(g: Graph, pairs, batching, sep: int):
    groups: dict[int, list[int]] = {}
    for i, b in enumerate(batching):
        groups.setdefault(b, []).append(i)
    for b, idxs in groups.items():
        for pos, i in enumerate(idxs):
            if pos == 0:
                continue
            a, ap = pairs[i]
            dist = _multi_source_lengths(g, sorted(set(a.support())
                                                   | set(ap.support())))
            for j in idxs[:pos]:
                aj, apj = pairs[j]
                d = min((dist.get(v, INF)
                         for v in set(aj.support()) | set(apj.support())),
                        default=INF)
                if d < sep:
                    raise ValueError(
                        f"pairs {j} and {i} share a batch but are {d} < {sep} apart")


def _verify(result: CutmatchResult, g: Graph, pairs, h: int, phi: Fraction):
    cut_g = apply_cut(g, result.cut) if not result.cut.is_zero() else g
    total = Fraction(0)
    for i, (a, ap) in enumerate(pairs):
        m_i, u_i, m_ip, u_ip = result.parts[i]
        if sorted(m_i + u_i) != a.support():
            raise AssertionError(f"pair {i}: source partition broken")
        if sorted(m_ip + u_ip) != ap.support():
            raise AssertionError(f"pair {i}: sink partition broken")
        sent: dict[int, Fraction] = {}
        recv: dict[int, Fraction] = {}
        for path, val in result.flows[i].items():
            if len(path) - 1 > h or sum(g.lengths[edge_key(x, y)]
                                        for x, y in zip(path, path[1:])) > h:
                raise AssertionError(f"pair {i}: path {path} longer than {h}")
            sent[path[0]] = sent.get(path[0], Fraction(0)) + val
            recv[path[-1]] = recv.get(path[-1], Fraction(0)) + val
            total += val
        for u in a.support():
            got = sent.get(u, Fraction(0))
            if got > a.weights[u] or (u in m_i) != (got == a.weights[u]):
                raise AssertionError(f"pair {i}: send load broken at {u}")
        for v in ap.support():
            got = recv.get(v, Fraction(0))
            if got > ap.weights[v] or (v in m_ip) != (got == ap.weights[v]):
                raise AssertionError(f"pair {i}: receive load broken at {v}")
        for u in u_i:
            dd = _multi_source_lengths(cut_g, [u])
            for v in u_ip:
                if dd.get(v, INF) <= h:
                    raise AssertionError(
                        f"pair {i}: unmatched {u},{v} only {dd.get(v)} apart")
    sum_a = sum(a.size() for a, _ap in pairs)
    leftover = Fraction(0)
    for i, (a, _ap) in enumerate(pairs):
        sent: dict[int, Fraction] = {}
        for path, val in result.flows[i].items():
            sent[path[0]] = sent.get(path[0], Fraction(0)) + val
        leftover += sum((a.weights[u] - sent.get(u, Fraction(0))
                         for u in a.support()), Fraction(0))
    if total + leftover != sum_a:
        raise AssertionError("matched value and unmatched mass do not add up")
    if result.cut.size(g) > phi * (sum_a - total):
        raise AssertionError("cut size exceeds phi * unmatched mass")
