from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lce.config import DEFAULT
from lce.exact import exact_hlength_maxflow
from lce.flows import flow_stats
from lce.graphs import Graph, INF, edge_key
from lce.mwu import mwu_flow_cut, power_rounded_down, round_down_sig

F = Fraction


def test_round_down_sig():
    assert round_down_sig(F(0), 96) == 0
    assert round_down_sig(F(5, 3), 4) == F(13, 8)  # 1.625 <= 5/3 < 1.6875
    assert round_down_sig(F(1000), 4) == 960  # 15 * 64
    x = F(12345, 67891)
    r = round_down_sig(x, 96)
    assert r <= x < r * (1 + F(1, 2**95))


def test_power_rounded_down_integer_exponent_exact():
    assert power_rounded_down(F(13, 12), F(3), 96) == F(13, 12) ** 3
    y = power_rounded_down(F(13, 12), F(1, 2), 96)
    assert y * y <= F(13, 12) < (y * (1 + F(1, 2**90))) ** 2


def test_single_edge_matches_oracle():
    g = Graph(2, [(0, 1, 1, 5)])
    flow, cut, report = mwu_flow_cut(g, [([0], [1])], h=1, eps=F(1, 10))
    val = flow.value()
    assert F(9, 2) <= val <= 5
    assert (1 - F(1, 10)) * cut.size(g) <= val
    assert report["congestion"] <= 1


def test_disconnected_pair_gives_zero():
    g = Graph(4, [(0, 1, 1, 3), (2, 3, 1, 3)])
    flow, cut, report = mwu_flow_cut(g, [([0], [2])], h=2, eps=F(1, 4))
    assert flow.value() == 0
    assert cut.size(g) == 0


def test_no_short_path_gives_zero_and_empty_cut():
    g = Graph(3, [(0, 1, 1, 1), (1, 2, 1, 1)])
    flow, cut, report = mwu_flow_cut(g, [([0], [2])], h=1, eps=F(1, 4))
    assert flow.value() == 0
    assert cut.is_zero()


def test_zero_capacity_edge_is_cut_for_free():
    g = Graph(2, [(0, 1, 1, 0)])
    flow, cut, report = mwu_flow_cut(g, [([0], [1])], h=2, eps=F(1, 4))
    assert flow.value() == 0
    assert cut.size(g) == 0
    assert cut.value((0, 1)) == 1  # separates despite costing nothing


def test_rejects_bad_batching():
    g = Graph(4, [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1)])
    with pytest.raises(ValueError):
        mwu_flow_cut(g, [([0], [1]), ([2], [3])], h=2, eps=F(1, 4),
                     batches=[0, 0])
    # separate batches are always fine
    mwu_flow_cut(g, [([0], [1]), ([2], [3])], h=2, eps=F(1, 4), batches=[0, 1])


def test_rejects_bad_eps():
    g = Graph(2, [(0, 1, 1, 1)])
    for bad in (0, 1, -1, F(3, 2)):
        with pytest.raises(ValueError):
            mwu_flow_cut(g, [([0], [1])], h=1, eps=bad)


def check_sandwich(g, pairs, h, eps):
    flow, cut, report = mwu_flow_cut(g, pairs, h, eps)
    opt, _ = exact_hlength_maxflow(g, pairs, h)
    val = flow.value()
    size = cut.size(g)
    assert val <= opt
    assert val >= (1 - eps) * opt
    assert size >= opt  # weak duality: any valid cut outweighs any flow
    assert (1 - eps) * size <= val
    stats = flow_stats(flow)
    assert stats["congestion"] is INF or stats["congestion"] <= 1
    assert stats["dilation"] <= h
    return flow, cut, report


def test_sandwich_diamond():
    g = Graph(4, [(0, 1, 1, 2), (1, 3, 1, 3), (0, 2, 1, 4), (2, 3, 2, 2)])
    check_sandwich(g, [([0], [3])], h=3, eps=F(1, 2))


def test_sandwich_two_pairs():
    g = Graph(5, [(0, 1, 1, 2), (1, 2, 1, 2), (2, 3, 1, 5), (3, 4, 1, 1),
                  (0, 2, 2, 1)])
    check_sandwich(g, [([0], [2]), ([1], [4])], h=3, eps=F(1, 2))


def test_support_does_not_track_h():
    g = Graph(6, [(0, 1, 1, 3), (1, 2, 1, 2), (2, 5, 1, 3), (0, 3, 1, 2),
                  (3, 4, 1, 4), (4, 5, 1, 2), (1, 4, 1, 1)])
    _, _, r1 = mwu_flow_cut(g, [([0], [5])], h=3, eps=F(1, 2))
    _, _, r2 = mwu_flow_cut(g, [([0], [5])], h=6, eps=F(1, 2))
    assert r1["support"] > 0
    assert r2["support"] < 2 * r1["support"]


def test_threads_do_not_change_output():
    g = Graph(6, [(0, 1, 1, 3), (1, 2, 1, 2), (2, 5, 1, 3), (0, 3, 1, 2),
                  (3, 4, 1, 4), (4, 5, 1, 2)])
    pairs = [([0], [5]), ([1], [2])]
    a = mwu_flow_cut(g, pairs, h=4, eps=F(1, 2))
    b = mwu_flow_cut(g, pairs, h=4, eps=F(1, 2),
                     config=DEFAULT.with_(threads=4))
    assert a[0].paths == b[0].paths
    assert a[1] == b[1]
    assert a[2] == b[2]


@settings(deadline=None, max_examples=12)
@given(st.data())
def test_sandwich_random(data):
    n = data.draw(st.integers(2, 5), label="n")
    possible = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(possible), unique=True,
                                min_size=1, max_size=min(6, len(possible))),
                       label="edges")
    edges = [(u, v, data.draw(st.integers(1, 2)), data.draw(st.integers(0, 3)))
             for (u, v) in chosen]
    g = Graph(n, edges)
    h = data.draw(st.integers(1, 3), label="h")
    check_sandwich(g, [([0], [n - 1])], h, F(1, 2))
