"""Neighborhood covers: collections of clusterings where every vertex's
h_cov-ball lies inside some cluster, clusters are low-diameter, and clusters
of one clustering are far apart.

Construction is randomized ball-carving; every produced cover is re-verified
exactly (the builder refuses to return a cover its own verifier rejects), so
downstream code can rely on measured parameters instead of worst-case ones.
"""

from __future__ import annotations

import math
from typing import Iterable

from .config import DEFAULT, Config
from .graphs import INF, Graph, distances_from
from .parallel import rng_for


class NeighborhoodCover:
    __slots__ = ("clusterings", "h_cov", "sep_factor", "h_diam", "centers")

    def __init__(self, clusterings, h_cov: int, sep_factor: int, h_diam: int,
                 centers=None):
        self.clusterings = [[sorted(c) for c in clustering]
                            for clustering in clusterings]
        self.h_cov = h_cov
        self.sep_factor = sep_factor
        self.h_diam = h_diam
        self.centers = centers or []

    @property
    def width(self) -> int:
        return len(self.clusterings)

    def all_clusters(self):
        for i, clustering in enumerate(self.clusterings):
            for cluster in clustering:
                yield i, cluster

    def __repr__(self):
        return (f"NeighborhoodCover(width={self.width}, h_cov={self.h_cov}, "
                f"s={self.sep_factor}, h_diam={self.h_diam})")


def default_diameter(n: int, h_cov: int, s: int) -> int:
    return 8 * s * h_cov * max(1, math.ceil(math.log2(n + 1)))


def build_cover(g: Graph, h_cov: int, s: int, eps: float = 0.1, seed: int = 0,
                h_diam: int | None = None, config: Config = DEFAULT) -> NeighborhoodCover:
    """Carve far-apart balls until every vertex's h_cov-ball is claimed.

    Each clustering processes still-uncovered vertices first (in seeded random
    order), carving a ball of radius h_cov + min(exponential draw, slack) and
    keeping it only when it sits >= s*h_diam away from the clustering's other
    balls.  The first carved ball always covers its center, so each clustering
    makes progress and the width stays finite.
    """
    if h_cov < 1 or s < 1:
        raise ValueError("need h_cov >= 1 and s >= 1")
    if h_diam is None:
        h_diam = default_diameter(g.n, h_cov, s)
    if h_diam < 2 * h_cov:
        raise ValueError(f"h_diam {h_diam} below 2*h_cov")
    max_width = config.cover_width_factor * max(1, math.ceil(math.log2(g.n + 2)))
    covered = [False] * g.n
    clusterings = []
    all_centers = []
    idx = 0
    while not all(covered):
        if idx >= max_width:
            raise RuntimeError(f"cover width exceeded {max_width} clusterings")
        rng = rng_for(seed, "cover", idx)
        uncovered = [v for v in range(g.n) if not covered[v]]
        rest = [v for v in range(g.n) if covered[v]]
        rng.shuffle(uncovered)
        rng.shuffle(rest)
        clusters: list[list[int]] = []
        centers: list[tuple[int, int]] = []
        claimed = [False] * g.n
        blocked: dict[int, int] = {}  # vertex -> distance to nearest chosen ball
        for c in uncovered + rest:
            if claimed[c]:
                continue
            slack = h_diam // 2 - h_cov
            r = h_cov + min(round(rng.expovariate(8.0 / h_diam)), slack)
            dists = distances_from(g, c)
            ball = [v for v, d in dists.items() if d <= r]
            # separation against already-chosen balls of this clustering
            if any(blocked.get(v, INF) < s * h_diam for v in ball):
                continue
            clusters.append(ball)
            centers.append((c, r))
            for v in ball:
                claimed[v] = True
                if dists[v] + h_cov <= r:
                    covered[v] = True
            # lazily extend the blocked map: distances from this new ball
            for v, d in _multi_source_distances(g, ball).items():
                if d < blocked.get(v, INF):
                    blocked[v] = d
        clusterings.append(clusters)
        all_centers.append(centers)
        idx += 1
    cover = NeighborhoodCover(clusterings, h_cov, s, h_diam, all_centers)
    rep = verify_cover(g, cover)
    if not rep["ok"]:
        raise RuntimeError(f"constructed cover failed verification: {rep}")
    return cover


def _multi_source_distances(g: Graph, sources: Iterable[int]) -> dict[int, int]:
    import heapq
    dist = {s: 0 for s in sources}
    pq = [(0, s) for s in dist]
    heapq.heapify(pq)
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


def verify_cover(g: Graph, cover: NeighborhoodCover) -> dict:
    """Exact check of the four cover properties, plus measured parameters."""
    h_cov = cover.h_cov
    report = {
        "covering": True, "diameter": True, "separation": True,
        "disjoint": True, "offending_vertex": None,
        "h_diam_measured": 0, "separation_measured": INF,
        "width": cover.width,
    }
    # disjointness + diameter per clustering
    for clustering in cover.clusterings:
        seen: set[int] = set()
        for cluster in clustering:
            cs = set(cluster)
            if seen & cs:
                report["disjoint"] = False
            seen |= cs
            for v in cluster:
                dv = distances_from(g, v)
                far = max((dv.get(u, INF) for u in cluster), default=0)
                if far is INF or far > cover.h_diam:
                    report["diameter"] = False
                report["h_diam_measured"] = max(
                    report["h_diam_measured"], 0 if far is INF else far)
        # pairwise separation
        for i in range(len(clustering)):
            di = _multi_source_distances(g, clustering[i])
            for j in range(i + 1, len(clustering)):
                d = min((di.get(u, INF) for u in clustering[j]), default=INF)
                report["separation_measured"] = min(report["separation_measured"], d)
                if d < cover.sep_factor * cover.h_diam:
                    report["separation"] = False
    # covering: every h_cov-ball inside some cluster
    cluster_sets = [set(c) for _i, c in cover.all_clusters()]
    for v in range(g.n):
        dv = distances_from(g, v)
        ball = {u for u, d in dv.items() if d <= h_cov}
        if not any(ball <= cs for cs in cluster_sets):
            report["covering"] = False
            if report["offending_vertex"] is None:
                report["offending_vertex"] = v
    report["ok"] = (report["covering"] and report["diameter"]
                    and report["separation"] and report["disjoint"])
    return report
