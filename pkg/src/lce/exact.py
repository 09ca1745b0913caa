"""Exact small-instance references: h-length max-flow by rational LP, the
demand-size of a moving cut, and cut sparsities.

These are the ground truth the fast algorithms are compared against, so
everything here is exact rational arithmetic and brute-force enumeration with
hard caps.  Nothing in this module is shared with the approximate pipeline
beyond the core types.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import networkx as nx

from .config import DEFAULT, Config
from .flows import Flow
from .graphs import (INF, Demand, Graph, MovingCut, NodeWeighting, apply_cut,
                     distances_from, edge_key)
from .parallel import parallel_map


# ---------------------------------------------------------------------------
# path enumeration

def enumerate_h_paths(g: Graph, sources: Iterable[int], targets: Iterable[int],
                      h: int, cap: int, skip_zero_capacity: bool = True) -> list[tuple[int, ...]]:
    """All simple source->target paths of length <= h, in lexicographic order.

    Pruned DFS: a partial path is abandoned once even the shortest completion
    to the nearest target would overshoot the budget.  Raises if more than
    `cap` paths exist.
    """
    targets = sorted(set(targets))
    sources = sorted(set(sources))
    if not targets or not sources:
        return []
    # distance to the nearest target, for pruning
    aux = {}
    for t in targets:
        for v, d in distances_from(g, t).items():
            if v not in aux or d < aux[v]:
                aux[v] = d
    out: list[tuple[int, ...]] = []
    tset = set(targets)

    def dfs(path: list[int], used: set[int], length: int):
        v = path[-1]
        if v in tset and len(path) >= 2:
            out.append(tuple(path))
            if len(out) > cap:
                raise ValueError(f"more than {cap} candidate paths")
        for (w, e) in g.neighbors(v):
            if w in used:
                continue
            if skip_zero_capacity and g.capacities[e] == 0:
                continue
            nl = length + g.lengths[e]
            if nl + aux.get(w, INF) > h:
                continue
            path.append(w)
            used.add(w)
            dfs(path, used, nl)
            used.discard(w)
            path.pop()

    for s in sources:
        dfs([s], {s}, 0)
    return sorted(out)


# ---------------------------------------------------------------------------
# exact simplex:  maximize c·x  s.t.  A x <= b,  x >= 0,  b >= 0

def simplex_max(c: Sequence[Fraction], rows: Sequence[dict[int, Fraction]],
                b: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
    """Dense tableau primal simplex with Bland's rule (always terminates).

    rows[i] is the sparse i-th constraint {var index: coefficient}.  Starting
    basis is the slack identity, valid because b >= 0.
    """
    nv = len(c)
    nr = len(rows)
    width = nv + nr + 1
    tab = []
    for i in range(nr):
        if b[i] < 0:
            raise ValueError("rhs must be nonnegative for the slack start")
        row = [Fraction(0)] * width
        for j, a in rows[i].items():
            row[j] = Fraction(a)
        row[nv + i] = Fraction(1)
        row[-1] = Fraction(b[i])
        tab.append(row)
    # objective row holds -c so that positive entries mark improving columns
    obj = [Fraction(-x) for x in c] + [Fraction(0)] * (nr + 1)
    basis = [nv + i for i in range(nr)]

    while True:
        enter = -1
        for j in range(nv + nr):
            if obj[j] < 0:
                enter = j
                break
        if enter < 0:
            break
        leave, best = -1, None
        for i in range(nr):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave < 0:
            raise ValueError("unbounded linear program")
        piv = tab[leave][enter]
        tab[leave] = [x / piv for x in tab[leave]]
        for i in range(nr):
            if i != leave and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[leave])]
        if obj[enter] != 0:
            f = obj[enter]
            obj = [x - f * y for x, y in zip(obj, tab[leave])]
        basis[leave] = enter

    xs = [Fraction(0)] * nv
    for i, bi in enumerate(basis):
        if bi < nv:
            xs[bi] = tab[i][-1]
    value = sum(ci * xi for ci, xi in zip(c, xs))
    return value, xs


# ---------------------------------------------------------------------------
# oracle operations

def exact_hlength_maxflow(g: Graph, pairs: Sequence[tuple[Iterable[int], Iterable[int]]],
                          h: int, config: Config = DEFAULT) -> tuple[Fraction, Flow]:
    """Optimal fractional packing of length-<=h paths across all pairs."""
    all_paths: list[tuple[int, ...]] = []
    budget = config.oracle_path_cap
    chunks = parallel_map(
        lambda st: enumerate_h_paths(g, st[0], st[1], h, budget),
        [(tuple(s), tuple(t)) for (s, t) in pairs],
        threads=config.threads)
    for chunk in chunks:
        all_paths.extend(chunk)
        if len(all_paths) > budget:
            raise ValueError(f"more than {budget} candidate paths across pairs")
    if not all_paths:
        return Fraction(0), Flow.empty(g)

    edge_ids = {e: i for i, e in enumerate(sorted(g.capacities))}
    rows: list[dict[int, Fraction]] = [dict() for _ in edge_ids]
    for j, path in enumerate(all_paths):
        for a, bvert in zip(path, path[1:]):
            i = edge_ids[edge_key(a, bvert)]
            rows[i][j] = rows[i].get(j, Fraction(0)) + 1
    b = [Fraction(g.capacities[e]) for e in sorted(g.capacities)]
    c = [Fraction(1)] * len(all_paths)
    value, xs = simplex_max(c, rows, b)
    # the same path may be enumerated for two different pairs: merge values
    merged: dict[tuple[int, ...], Fraction] = {}
    for p, x in zip(all_paths, xs):
        if x > 0:
            merged[p] = merged.get(p, Fraction(0)) + x
    return value, Flow(g, merged)


def separated_pairs(g: Graph, c: MovingCut, a: NodeWeighting, h: int, s: int
                    ) -> list[tuple[int, int]]:
    """Ordered support pairs (u,v), u != v, with d_G(u,v) <= h and
    d_{G-C}(u,v) > h*s."""
    cut_g = apply_cut(g, c)
    sup = a.support()
    out = []
    for u in sup:
        base = distances_from(g, u)
        moved = distances_from(cut_g, u)
        for v in sup:
            if v == u:
                continue
            if base.get(v, INF) <= h and moved.get(v, INF) > h * s:
                out.append((u, v))
    return out


def demand_size(g: Graph, c: MovingCut, a: NodeWeighting, h: int, s: int
                ) -> tuple[Fraction, Demand]:
    """Largest A-respecting h-length demand that C separates to beyond h*s.

    Solved as a max-flow on the bipartite out/in-copy network: source->u_out
    with capacity A(u), free arc u_out->v_in per separated ordered pair,
    v_in->sink with capacity A(v).  Integer capacities, so the optimum is
    integral and networkx's max_flow is exact.
    """
    pairs = separated_pairs(g, c, a, h, s)
    if not pairs:
        return Fraction(0), Demand({})
    net = nx.DiGraph()
    big = a.size() + 1
    for u in a.support():
        net.add_edge("src", ("out", u), capacity=a[u])
        net.add_edge(("in", u), "snk", capacity=a[u])
    for (u, v) in pairs:
        net.add_edge(("out", u), ("in", v), capacity=big)
    val, fdict = nx.maximum_flow(net, "src", "snk")
    entries = {}
    for (u, v) in pairs:
        f = fdict.get(("out", u), {}).get(("in", v), 0)
        if f:
            entries[(u, v)] = Fraction(f)
    return Fraction(val), Demand(entries)


def cut_sparsity(g: Graph, c: MovingCut, a: NodeWeighting, h: int, s: int):
    """|C| / demand-size; INF when nothing can witness the cut."""
    dsize, _witness = demand_size(g, c, a, h, s)
    if dsize == 0:
        return INF
    return c.size(g) / dsize


# ---------------------------------------------------------------------------
# classic (non-length-constrained) cut sparsity

def _component_volumes(g: Graph, cut: set[tuple[int, int]],
                       vertices: Iterable[int] | None = None,
                       degrees_in: Graph | None = None) -> list[tuple[int, list[int]]]:
    """Components of (sub)graph minus cut, with volumes by degree in `degrees_in`
    (defaults to g).  Returned as (volume, sorted vertices), ordered by min id."""
    deg_g = degrees_in if degrees_in is not None else g
    vs = set(vertices) if vertices is not None else set(range(g.n))
    adj: dict[int, list[int]] = {v: [] for v in vs}
    for (u, v, _l, _c) in g.edges:
        if u in vs and v in vs and edge_key(u, v) not in cut and u != v:
            adj[u].append(v)
            adj[v].append(u)
    seen = set()
    comps = []
    for sstart in sorted(vs):
        if sstart in seen:
            continue
        comp, stack = [], [sstart]
        seen.add(sstart)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    degs = {}
    for (u, v, _l, _c) in deg_g.edges:
        degs[u] = degs.get(u, 0) + 1
        degs[v] = degs.get(v, 0) + 1
    return [(sum(degs.get(v, 0) for v in comp), comp) for comp in comps]


def classic_cut_sparsity(g: Graph, cut_edges: Iterable[tuple[int, int]],
                         vertices: Iterable[int] | None = None,
                         degrees_in: Graph | None = None) -> Fraction:
    """|C| / total volume of witness components.

    Witness components are all components of G - C except one of maximum
    volume; a volume tie is broken by keeping the smaller-id component as a
    witness (the larger-id one is the excluded maximum).
    """
    cut = {edge_key(*e) for e in cut_edges}
    for e in cut:
        if e not in g.capacities:
            raise ValueError(f"cut edge {e} not in graph")
    comps = _component_volumes(g, cut, vertices, degrees_in)
    if len(comps) < 2:
        raise ValueError("edge set does not disconnect the graph")
    # exclude the max-volume component; ties -> largest component id excluded
    drop = max(range(len(comps)), key=lambda i: (comps[i][0], comps[i][1][0]))
    witness_vol = sum(vol for i, (vol, _c) in enumerate(comps) if i != drop)
    if witness_vol == 0:
        return INF
    return Fraction(len(cut), witness_vol)
