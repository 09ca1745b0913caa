"""Path-explicit multicommodity flows.

A Flow maps simple paths (vertex tuples) to positive rational values.  Keeping
paths explicit keeps congestion and dilation checks exact and makes projection
through embeddings a direct path-concatenation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .graphs import INF, Demand, Graph, edge_key


def _check_simple_path(g: Graph, path: tuple[int, ...]):
    if len(path) < 2:
        raise ValueError(f"flow path needs at least two vertices: {path}")
    if len(set(path)) != len(path):
        raise ValueError(f"flow path revisits a vertex: {path}")
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise ValueError(f"path step ({a},{b}) is not an edge")


class Flow:
    """Map from simple vertex-sequence paths to positive rational values.

    validate=False skips the per-path checks for flows assembled internally
    from already-checked paths; external callers should leave it on.
    """

    __slots__ = ("host", "paths", "_ef")

    def __init__(self, host: Graph, paths: Mapping[tuple[int, ...], Fraction],
                 validate: bool = True):
        if validate:
            ps = {}
            for path, val in paths.items():
                val = Fraction(val)
                if val < 0:
                    raise ValueError(f"negative flow on {path}")
                if val == 0:
                    continue
                path = tuple(path)
                _check_simple_path(host, path)
                ps[path] = val
        else:
            ps = {p: v for p, v in paths.items() if v}
        self.host = host
        self.paths = dict(sorted(ps.items()))
        self._ef = None

    def value(self) -> Fraction:
        return sum(self.paths.values(), Fraction(0))

    def edge_flow(self) -> dict[tuple[int, int], Fraction]:
        if self._ef is None:
            out: dict[tuple[int, int], Fraction] = {}
            for path, val in self.paths.items():
                for a, b in zip(path, path[1:]):
                    e = edge_key(a, b)
                    out[e] = out.get(e, Fraction(0)) + val
            self._ef = out
        return dict(self._ef)

    def add(self, other: "Flow") -> "Flow":
        ps = dict(self.paths)
        for path, val in other.paths.items():
            ps[path] = ps.get(path, Fraction(0)) + val
        return Flow(self.host, ps)

    def scale(self, factor: Fraction) -> "Flow":
        f = Fraction(factor)
        return Flow(self.host, {p: v * f for p, v in self.paths.items()})

    def items(self):
        return self.paths.items()

    def __repr__(self):
        return f"Flow({len(self.paths)} paths, value {self.value()})"

    @staticmethod
    def empty(host: Graph) -> "Flow":
        return Flow(host, {})


def flow_stats(f: Flow) -> dict:
    """Value, per-edge flow, congestion, dilation, step count, support size.

    Congestion is max_e F(e)/U_e, with INF when flow crosses a zero-capacity
    edge.  Dilation is the max path length under the host's edge lengths.
    """
    per_edge = f.edge_flow()
    congestion: Fraction | float = Fraction(0)
    for e, val in per_edge.items():
        cap = f.host.capacities[e]
        if cap == 0:
            congestion = INF
            break
        c = val / cap
        if c > congestion:
            congestion = c
    dilation = 0
    step = 0
    for path in f.paths:
        length = sum(f.host.lengths[edge_key(a, b)] for a, b in zip(path, path[1:]))
        dilation = max(dilation, length)
        step = max(step, len(path) - 1)
    return {
        "value": f.value(),
        "edge_flow": per_edge,
        "congestion": congestion,
        "dilation": dilation,
        "step": step,
        "support": len(f.paths),
    }


def routed_demand(f: Flow) -> Demand:
    """D_F(u,v): total flow on paths that start at u and end at v."""
    entries: dict[tuple[int, int], Fraction] = {}
    for path, val in f.paths.items():
        key = (path[0], path[-1])
        entries[key] = entries.get(key, Fraction(0)) + val
    return Demand(entries)


class Embedding:
    """Flows realizing each embedded edge inside a host graph.

    Maps embedded-graph edge key -> Flow in the host whose routed demand moves
    at least the edge's capacity between its endpoints.
    """

    __slots__ = ("host", "edge_flows")

    def __init__(self, host: Graph, edge_flows: Mapping[tuple[int, int], Flow]):
        self.host = host
        self.edge_flows = {edge_key(*e): fl for e, fl in edge_flows.items()}

    def check(self, embedded: Graph) -> dict:
        """Verify every embedded edge's capacity is actually routed."""
        missing, deficits = [], []
        for (u, v, _l, cap) in embedded.edges:
            if cap == 0:
                continue
            e = edge_key(u, v)
            fl = self.edge_flows.get(e)
            if fl is None:
                missing.append(e)
                continue
            routed = routed_demand(fl)
            got = routed[(u, v)] + routed[(v, u)]
            if got < cap:
                deficits.append((e, got, cap))
        return {"ok": not missing and not deficits,
                "missing": missing, "deficits": deficits}

    def total_edge_flow(self) -> dict[tuple[int, int], Fraction]:
        out: dict[tuple[int, int], Fraction] = {}
        for fl in self.edge_flows.values():
            for e, val in fl.edge_flow().items():
                out[e] = out.get(e, Fraction(0)) + val
        return out

    def max_dilation(self) -> int:
        dil = 0
        for fl in self.edge_flows.values():
            dil = max(dil, flow_stats(fl)["dilation"])
        return dil


def _shortcut(path: tuple[int, ...]) -> tuple[int, ...]:
    """Drop the loop between repeated visits, keeping the first occurrence."""
    out: list[int] = []
    pos: dict[int, int] = {}
    for v in path:
        if v in pos:
            del_from = pos[v] + 1
            for w in out[del_from:]:
                del pos[w]
            del out[del_from:]
        else:
            pos[v] = len(out)
            out.append(v)
    return tuple(out)


def project_flow(router_flow: Flow, embedding: Embedding) -> Flow:
    """Push a flow over an embedded graph down to the host.

    Each router path's value is split proportionally across the embedding
    flows of its edges (in canonical path order), then the per-edge host
    paths are concatenated.  Repeated vertices introduced by concatenation
    are shortcut away, which preserves value and endpoints and can only
    lower congestion and dilation.
    """
    host = embedding.host
    out: dict[tuple[int, ...], Fraction] = {}

    def walk(prefix: tuple[int, ...], at: int, remaining, val: Fraction):
        if val == 0:
            return
        if not remaining:
            path = _shortcut(prefix)
            if len(path) >= 2:
                out[path] = out.get(path, Fraction(0)) + val
            return
        (a, b), rest = remaining[0], remaining[1:]
        e = edge_key(a, b)
        fl = embedding.edge_flows.get(e)
        if fl is None:
            raise ValueError(f"router edge {e} has no embedding flow")
        usable = [(p, v) for p, v in fl.items() if {p[0], p[-1]} == {a, b}]
        total = sum(v for _p, v in usable)
        if total < val:
            raise ValueError(f"embedding value deficit on {e}: {total} < {val}")
        for p, v in usable:
            share = val * v / total
            hop = p if p[0] == at else tuple(reversed(p))
            walk(prefix + hop[1:], hop[-1], rest, share)

    for rpath, rval in router_flow.items():
        steps = tuple(zip(rpath, rpath[1:]))
        walk((rpath[0],), rpath[0], steps, rval)
    return Flow(host, out)
