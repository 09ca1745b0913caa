"""Core graph types: capacitated length-weighted graphs, node weightings,
demands, and moving cuts.

All types are immutable values.  Distances are exact integers (lengths are
integral); general edge weights are Fractions.  Infinity is represented by
the module-level INF sentinel, never by a large number.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Mapping

from .config import DEFAULT, Config

INF = float("inf")


def edge_key(u: int, v: int) -> tuple[int, int]:
    """Canonical undirected edge key (min, max)."""
    return (u, v) if u <= v else (v, u)


class Graph:
    """Undirected graph with positive integer lengths and nonnegative integer
    capacities.  Self-loops allowed, parallel edges are not.

    Edges are stored in canonical (min,max) order and indexed by key.
    """

    __slots__ = ("n", "edges", "_index", "_adj", "lengths", "capacities")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, int, int]],
                 config: Config = DEFAULT):
        self.n = n
        es = []
        index: dict[tuple[int, int], int] = {}
        for (u, v, length, cap) in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) outside vertex range 0..{n-1}")
            if length < 1:
                raise ValueError(f"edge ({u},{v}) has nonpositive length {length}")
            if cap < 0:
                raise ValueError(f"edge ({u},{v}) has negative capacity {cap}")
            k = edge_key(u, v)
            if k in index:
                raise ValueError(f"parallel edge {k}")
            index[k] = len(es)
            es.append((k[0], k[1], int(length), int(cap)))
        self.edges = tuple(es)
        self._index = index
        adj: list[list[tuple[int, tuple[int, int]]]] = [[] for _ in range(n)]
        for (u, v, _l, _c) in es:
            adj[u].append((v, (u, v)))
            if u != v:
                adj[v].append((u, (u, v)))
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self.lengths = {edge_key(u, v): l for (u, v, l, _c) in es}
        self.capacities = {edge_key(u, v): c for (u, v, _l, c) in es}
        total = n + len(es) + sum(l for (_, _, l, _) in es) + sum(c for (_, _, _, c) in es)
        if total > config.size_bound(n):
            raise ValueError(
                f"object size {total} exceeds polynomial bound {config.size_bound(n)}")

    @property
    def m(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return edge_key(u, v) in self._index

    def neighbors(self, u: int):
        return self._adj[u]

    def edge_length(self, u: int, v: int) -> int:
        return self.lengths[edge_key(u, v)]

    def edge_capacity(self, u: int, v: int) -> int:
        return self.capacities[edge_key(u, v)]

    def total_capacity(self) -> int:
        return sum(self.capacities.values())

    def degree(self, v: int) -> int:
        """Number of edge-endpoints at v (self-loop counts twice)."""
        d = 0
        for (u2, v2, _l, _c) in self.edges:
            if u2 == v:
                d += 1
            if v2 == v:
                d += 1
        return d

    def with_lengths(self, new_lengths: Mapping[tuple[int, int], int]) -> "Graph":
        es = [(u, v, new_lengths.get(edge_key(u, v), l), c)
              for (u, v, l, c) in self.edges]
        return Graph(self.n, es)

    def with_capacities(self, new_caps: Mapping[tuple[int, int], int]) -> "Graph":
        es = [(u, v, l, new_caps.get(edge_key(u, v), c))
              for (u, v, l, c) in self.edges]
        return Graph(self.n, es)

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by min vertex."""
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                x = stack.pop()
                comp.append(x)
                for (y, _e) in self._adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        stack.append(y)
            out.append(sorted(comp))
        return out

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))


class NodeWeighting:
    """Sparse map vertex -> nonnegative integer weight."""

    __slots__ = ("weights",)

    def __init__(self, weights: Mapping[int, int]):
        w = {}
        for v, a in weights.items():
            if a < 0:
                raise ValueError(f"negative weight at vertex {v}")
            if a > 0:
                w[int(v)] = int(a)
        self.weights = dict(sorted(w.items()))

    def __getitem__(self, v: int) -> int:
        return self.weights.get(v, 0)

    def size(self) -> int:
        return sum(self.weights.values())

    def support(self) -> list[int]:
        return list(self.weights)

    def restrict(self, vertices: Iterable[int]) -> "NodeWeighting":
        vs = set(vertices)
        return NodeWeighting({v: a for v, a in self.weights.items() if v in vs})

    def add(self, other: "NodeWeighting") -> "NodeWeighting":
        w = dict(self.weights)
        for v, a in other.weights.items():
            w[v] = w.get(v, 0) + a
        return NodeWeighting(w)

    def items(self):
        return self.weights.items()

    def __eq__(self, other):
        return isinstance(other, NodeWeighting) and self.weights == other.weights

    def __repr__(self):
        return f"NodeWeighting({self.weights})"

    @staticmethod
    def degrees(g: Graph) -> "NodeWeighting":
        return NodeWeighting({v: g.degree(v) for v in range(g.n)})


class Demand:
    """Sparse map over ordered vertex pairs -> nonnegative rational value."""

    __slots__ = ("entries",)

    def __init__(self, entries: Mapping[tuple[int, int], Fraction]):
        es = {}
        for (u, v), val in entries.items():
            val = Fraction(val)
            if val < 0:
                raise ValueError(f"negative demand on ({u},{v})")
            if val > 0:
                es[(int(u), int(v))] = val
        self.entries = dict(sorted(es.items()))

    def __getitem__(self, pair: tuple[int, int]) -> Fraction:
        return self.entries.get(pair, Fraction(0))

    def size(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def support(self):
        return list(self.entries)

    def scale(self, factor: Fraction) -> "Demand":
        f = Fraction(factor)
        return Demand({p: v * f for p, v in self.entries.items()})

    def add(self, other: "Demand") -> "Demand":
        es = dict(self.entries)
        for p, v in other.entries.items():
            es[p] = es.get(p, Fraction(0)) + v
        return Demand(es)

    def items(self):
        return self.entries.items()

    def __eq__(self, other):
        return isinstance(other, Demand) and self.entries == other.entries

    def __repr__(self):
        return f"Demand({len(self.entries)} pairs, size {self.size()})"


class MovingCut:
    """Per-edge length increase stored as integer numerators at scale h.

    C(e) = increase[e] / scale, each in [0,1].  Size = sum U_e * C(e), an exact
    rational.
    """

    __slots__ = ("scale", "increase")

    def __init__(self, scale: int, increase: Mapping[tuple[int, int], int]):
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        inc = {}
        for e, w in increase.items():
            w = int(w)
            if not (0 <= w <= scale):
                raise ValueError(f"numerator {w} for edge {e} outside [0, {scale}]")
            if w > 0:
                inc[edge_key(*e)] = w
        self.scale = int(scale)
        self.increase = dict(sorted(inc.items()))

    def value(self, e: tuple[int, int]) -> Fraction:
        return Fraction(self.increase.get(edge_key(*e), 0), self.scale)

    def size(self, g: Graph) -> Fraction:
        return sum((Fraction(g.capacities[e] * w, self.scale)
                    for e, w in self.increase.items()), Fraction(0))

    def support(self):
        return list(self.increase)

    def is_zero(self) -> bool:
        return not self.increase

    def combine(self, other: "MovingCut") -> "MovingCut":
        """Sum of cuts: integer length-increase maps add; scales add so that
        numerator <= scale stays valid."""
        inc = dict(self.increase)
        for e, w in other.increase.items():
            inc[e] = inc.get(e, 0) + w
        return MovingCut(self.scale + other.scale, inc)

    def __eq__(self, other):
        return (isinstance(other, MovingCut) and self.scale == other.scale
                and self.increase == other.increase)

    def __repr__(self):
        return f"MovingCut(scale={self.scale}, {len(self.increase)} edges)"

    @staticmethod
    def zero(scale: int = 1) -> "MovingCut":
        return MovingCut(scale, {})


def apply_cut(g: Graph, c: MovingCut) -> Graph:
    """G - C: every edge length grows by its integer numerator h*C(e)."""
    for e in c.increase:
        if e not in g._index:
            raise ValueError(f"cut touches unknown edge {e}")
    if c.is_zero():
        return g
    new_lengths = {e: l + c.increase.get(e, 0) for e, l in g.lengths.items()}
    return g.with_lengths(new_lengths)


def distance(g: Graph, u: int, v: int):
    """Shortest-path length under edge lengths; INF if disconnected."""
    if not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"vertex out of range: {u}, {v}")
    if u == v:
        return 0
    dist = {u: 0}
    pq = [(0, u)]
    while pq:
        d, x = heapq.heappop(pq)
        if x == v:
            return d
        if d > dist.get(x, INF):
            continue
        for (y, e) in g.neighbors(x):
            nd = d + g.lengths[e]
            if nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(pq, (nd, y))
    return INF


def distances_from(g: Graph, u: int) -> dict[int, int]:
    """Single-source shortest path lengths (only reachable vertices appear)."""
    dist = {u: 0}
    pq = [(0, u)]
    while pq:
        d, x = heapq.heappop(pq)
        if d > dist.get(x, INF):
            continue
        for (y, e) in g.neighbors(x):
            nd = d + g.lengths[e]
            if nd < dist.get(y, INF):
                dist[y] = nd
                heapq.heappush(pq, (nd, y))
    return dist


def lightest_h_path(g: Graph, weight: Mapping[tuple[int, int], Fraction],
                    u: int, v: int, h: int, config: Config = DEFAULT):
    """Minimum total `weight` over u-v paths of length at most h.

    Dynamic program over (vertex, residual length budget) states.  Returns
    (weight, path) with weight = INF and path = None when no path fits.
    """
    if h < 0:
        raise ValueError("length budget must be nonnegative")
    if h > config.hpath_budget_cap:
        raise ValueError(f"length budget {h} exceeds cap {config.hpath_budget_cap}")
    if u == v:
        return Fraction(0), (u,)
    # best[x] maps budget -> (weight, predecessor state); we sweep budgets
    # upward, relaxing edges, so each state is final when visited.
    best: list[dict[int, tuple[Fraction, tuple[int, int] | None]]] = [dict() for _ in range(g.n)]
    best[u][0] = (Fraction(0), None)
    # Dijkstra over (weight, budget) lexicographic would also work; the plain
    # budget sweep is simpler and exact for integer lengths.
    reachable = {u}
    for b in range(h + 1):
        for x in list(reachable):
            st = best[x].get(b)
            if st is None:
                continue
            w_here = st[0]
            for (y, e) in g.neighbors(x):
                nb = b + g.lengths[e]
                if nb > h:
                    continue
                cand = w_here + Fraction(weight.get(e, 0))
                cur = best[y].get(nb)
                if cur is None or cand < cur[0]:
                    best[y][nb] = (cand, (x, b))
                    reachable.add(y)
    target = None
    for b, (w, _pred) in best[v].items():
        if target is None or w < target[1] or (w == target[1] and b < target[0]):
            target = (b, w)
    if target is None:
        return INF, None
    # Walk predecessors back from the best (budget, weight) state at v.
    b, w = target
    path = [v]
    x = v
    while (x, b) != (u, 0):
        _w, pred = best[x][b]
        x, b = pred
        path.append(x)
    path.reverse()
    return w, tuple(path)


def separation(g: Graph, c: MovingCut, d: Demand, h: int) -> Fraction:
    """Amount of demand whose endpoints end up further than h apart in G - C."""
    cut_g = apply_cut(g, c)
    total = Fraction(0)
    cache: dict[int, dict[int, int]] = {}
    for (u, v), val in d.items():
        if u not in cache:
            cache[u] = distances_from(cut_g, u)
        if cache[u].get(v, INF) > h:
            total += val
    return total


def demand_report(d: Demand, a: NodeWeighting, g: Graph, h: int) -> dict:
    """Load, A-respecting, and h-length predicates for a demand."""
    out: dict[int, Fraction] = {}
    inc: dict[int, Fraction] = {}
    for (u, v), val in d.items():
        out[u] = out.get(u, Fraction(0)) + val
        inc[v] = inc.get(v, Fraction(0)) + val
    load = {v: max(out.get(v, Fraction(0)), inc.get(v, Fraction(0)))
            for v in set(out) | set(inc)}
    respecting = all(val <= a[v] for v, val in load.items())
    h_length = True
    cache: dict[int, dict[int, int]] = {}
    for (u, v) in d.support():
        if u not in cache:
            cache[u] = distances_from(g, u)
        if cache[u].get(v, INF) > h:
            h_length = False
            break
    return {"load": load, "respecting": respecting, "h_length": h_length}
