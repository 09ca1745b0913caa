from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lce.blockers import (floor_log2, lightest_path_multi, make_blaming,
                          lightest_path_blocker)
from lce.config import DEFAULT
from lce.exact import enumerate_h_paths
from lce.flows import Flow
from lce.graphs import Graph, INF, edge_key

F = Fraction


def path_weight(weight, path):
    return sum((weight.get(edge_key(a, b), F(0)) for a, b in zip(path, path[1:])),
               F(0))


def test_floor_log2():
    assert floor_log2(F(1)) == 0
    assert floor_log2(F(3)) == 1
    assert floor_log2(F(4)) == 2
    assert floor_log2(F(1, 2)) == -1
    assert floor_log2(F(3, 8)) == -2
    assert floor_log2(F(7, 2)) == 1
    with pytest.raises(ValueError):
        floor_log2(F(0))


def test_lightest_path_multi_basic():
    g = Graph(4, [(0, 1, 1, 1), (1, 3, 1, 1), (0, 2, 1, 1), (2, 3, 2, 1)])
    w = {(0, 1): F(5), (1, 3): F(5), (0, 2): F(1), (2, 3): F(1)}
    wt, path = lightest_path_multi(g, w, [0], [3], 3)
    assert (wt, path) == (F(2), (0, 2, 3))
    # budget 2 rules out the cheap route
    wt, path = lightest_path_multi(g, w, [0], [3], 2)
    assert (wt, path) == (F(10), (0, 1, 3))
    wt, path = lightest_path_multi(g, w, [0], [3], 1)
    assert wt is INF and path is None
    # edge filter
    wt, path = lightest_path_multi(g, w, [0], [3], 3,
                                   edge_ok=lambda e: e != (0, 2))
    assert path == (0, 1, 3)


def test_make_blaming_single_path_rounds_up():
    g = Graph(3, [(0, 1, 1, 4), (1, 2, 1, 4)])
    f = Flow(g, {(0, 1, 2): F(3)})
    fhat, cert = make_blaming(f, g.capacities)
    assert fhat.paths == {(0, 1, 2): F(4)}
    assert cert.bucket == (2, 0)
    assert cert.blames == {(0, 1, 2): (0, 1)}
    assert cert.value_ratio == F(4, 3)


def test_make_blaming_shared_bottleneck_keeps_one():
    g = Graph(4, [(0, 2, 1, 8), (1, 2, 1, 8), (2, 3, 1, 2)])
    f = Flow(g, {(0, 2, 3): F(1), (1, 2, 3): F(1)})
    fhat, cert = make_blaming(f, g.capacities)
    assert fhat.paths == {(0, 2, 3): F(2)}
    assert cert.blames == {(0, 2, 3): (2, 3)}
    assert fhat.edge_flow()[(2, 3)] * 2 >= g.capacities[(2, 3)]


def test_make_blaming_empty():
    g = Graph(2, [(0, 1, 1, 1)])
    fhat, cert = make_blaming(Flow(g, {}), g.capacities)
    assert fhat.paths == {} and cert.blames == {}


def test_make_blaming_rejects_infeasible():
    g = Graph(3, [(0, 1, 1, 4), (1, 2, 1, 4)])
    with pytest.raises(ValueError):
        make_blaming(Flow(g, {(0, 1, 2): F(5)}), g.capacities)


def test_blocker_saturates_single_edge():
    g = Graph(2, [(0, 1, 1, 3)])
    w = {(0, 1): F(0)}
    flow, seq = lightest_path_blocker(g, w, g.capacities, [0], [1],
                                      h=1, eps=F(1, 2), lam=F(0))
    assert flow.edge_flow()[(0, 1)] == 3  # F(e) = U_e
    assert flow.value() == 3
    assert [sub.value() for sub, _c in seq] == [2, 1]


def test_blocker_vacuous_when_no_short_path():
    g = Graph(2, [(0, 1, 5, 3)])
    flow, seq = lightest_path_blocker(g, {(0, 1): F(1)}, g.capacities, [0], [1],
                                      h=1, eps=F(1, 2), lam=F(1))
    assert flow.paths == {} and seq == []


def test_blocker_leaves_heavy_route_untouched():
    # two disjoint s-t routes of weight lam and 3*lam; eps = 1/2
    g = Graph(4, [(0, 1, 1, 2), (1, 3, 1, 5), (0, 2, 1, 7), (2, 3, 1, 7)])
    w = {(0, 1): F(1, 2), (1, 3): F(1, 2), (0, 2): F(3, 2), (2, 3): F(3, 2)}
    flow, seq = lightest_path_blocker(g, w, g.capacities, [0], [3],
                                      h=2, eps=F(1, 2), lam=F(1))
    fe = flow.edge_flow()
    assert fe.get((0, 1)) == 2  # light route saturated at its bottleneck
    assert (0, 2) not in fe and (2, 3) not in fe
    for path in flow.paths:
        assert path_weight(w, path) <= 2  # (1 + 2*eps) * lam


def test_blocker_rejects_lambda_above_distance():
    g = Graph(2, [(0, 1, 1, 3)])
    with pytest.raises(ValueError):
        lightest_path_blocker(g, {(0, 1): F(1)}, g.capacities, [0], [1],
                              h=1, eps=F(1, 2), lam=F(2))


def test_blocker_round_cap_error_surfaces():
    g = Graph(2, [(0, 1, 1, 3)])
    cfg = DEFAULT.with_(blocker_round_factor=0)
    with pytest.raises(RuntimeError):
        lightest_path_blocker(g, {(0, 1): F(0)}, g.capacities, [0], [1],
                              h=1, eps=F(1, 2), lam=F(0), config=cfg)


def test_blocker_float_mirror_agrees_with_exact():
    g = Graph(5, [(0, 1, 1, 2), (1, 4, 1, 3), (0, 2, 1, 4), (2, 4, 2, 4),
                  (0, 3, 2, 1), (3, 4, 1, 6)])
    w = {(0, 1): F(1, 3), (1, 4): F(2, 3), (0, 2): F(1, 7), (2, 4): F(6, 7),
         (0, 3): F(1, 2), (3, 4): F(1, 2)}
    args = (g.capacities, [0], [4])
    kw = dict(h=3, eps=F(1, 4), lam=F(1))
    exact_flow, _ = lightest_path_blocker(g, w, *args, **kw)
    wf = {e: float(x) for e, x in w.items()}
    mirrored_flow, _ = lightest_path_blocker(g, w, *args, **kw, weight_float=wf)
    assert exact_flow.paths == mirrored_flow.paths


def check_blocker_contract(g, w, S, T, h, eps, lam):
    flow, seq = lightest_path_blocker(g, w, g.capacities, S, T, h, eps, lam)
    fe = flow.edge_flow()
    # integral and feasible
    for e, val in fe.items():
        assert val.denominator == 1 and val <= g.capacities[e]
    # support weight bound
    for path in flow.paths:
        assert path[0] in S and path[-1] in T
        assert path_weight(w, path) <= (1 + 2 * eps) * lam
    # blocking condition, via exhaustive path enumeration
    for path in enumerate_h_paths(g, S, T, h, 10_000, skip_zero_capacity=False):
        if path_weight(w, path) <= (1 + eps) * lam:
            assert any(fe.get(edge_key(a, b), F(0)) == g.capacities[edge_key(a, b)]
                       for a, b in zip(path, path[1:]))
    # decomposition adds back up, each step half-blaming its residuals
    residual = dict(g.capacities)
    acc = {}
    for sub, cert in seq:
        sub_fe = sub.edge_flow()
        assert set(cert.blames) == set(sub.paths)
        for path, e in cert.blames.items():
            assert e in {edge_key(a, b) for a, b in zip(path, path[1:])}
            assert sub_fe[e] * 2 >= residual[e]
        assert len(set(cert.blames.values())) == len(cert.blames)
        for e, val in sub_fe.items():
            assert val <= residual[e]
            residual[e] -= int(val)
        for path, val in sub.items():
            acc[path] = acc.get(path, F(0)) + val
    assert acc == flow.paths
    return flow


@settings(deadline=None, max_examples=40)
@given(st.data())
def test_blocker_contract_random(data):
    n = data.draw(st.integers(2, 5), label="n")
    possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(possible), unique=True,
                                min_size=1, max_size=min(7, len(possible))),
                       label="edges")
    edges = [(u, v, data.draw(st.integers(1, 2)), data.draw(st.integers(0, 4)))
             for (u, v) in chosen]
    g = Graph(n, edges)
    w = {edge_key(u, v): F(data.draw(st.integers(0, 6)), 3)
         for (u, v, _l, _c) in edges}
    h = data.draw(st.integers(1, 3), label="h")
    S, T = [0], [n - 1]
    d, _ = lightest_path_multi(g, w, S, T, h)
    lam = F(0) if d is INF or d == 0 else data.draw(
        st.sampled_from([F(0), d / 2, d]), label="lam")
    check_blocker_contract(g, w, S, T, h, F(1, 2), lam)
