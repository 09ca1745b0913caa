from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lce.flows import Embedding, Flow, flow_stats, project_flow, routed_demand
from lce.graphs import INF, Graph


def line(n, cap=4):
    return Graph(n, [(i, i + 1, 1, cap) for i in range(n - 1)])


def test_flow_rejects_non_edges_and_revisits():
    g = line(3)
    with pytest.raises(ValueError):
        Flow(g, {(0, 2): Fraction(1)})
    with pytest.raises(ValueError):
        Flow(g, {(0,): Fraction(1)})


def test_stats_empty():
    st_ = flow_stats(Flow.empty(line(3)))
    assert st_["value"] == 0 and st_["congestion"] == 0 and st_["dilation"] == 0


def test_stats_single_path():
    g = line(3, cap=4)
    st_ = flow_stats(Flow(g, {(0, 1, 2): Fraction(3)}))
    assert st_["value"] == 3
    assert st_["congestion"] == Fraction(3, 4)
    assert st_["dilation"] == 2 and st_["step"] == 2 and st_["support"] == 1


def test_stats_shared_edge():
    g = Graph(4, [(0, 1, 1, 2), (1, 2, 1, 2), (1, 3, 1, 2)])
    f = Flow(g, {(0, 1, 2): Fraction(1), (3, 1, 2): Fraction(1)})
    assert flow_stats(f)["congestion"] == 1


def test_stats_zero_capacity_edge_is_infinite():
    g = Graph(2, [(0, 1, 1, 0)])
    assert flow_stats(Flow(g, {(0, 1): Fraction(1)}))["congestion"] == INF


def test_routed_demand():
    g = Graph(4, [(0, 1, 1, 2), (1, 2, 1, 2), (0, 3, 1, 2), (3, 2, 1, 2)])
    f = Flow(g, {(0, 1, 2): Fraction(1), (0, 3, 2): Fraction(1)})
    assert routed_demand(f)[(0, 2)] == 2
    assert routed_demand(Flow.empty(g)).size() == 0


def test_project_single_edge():
    host = Graph(3, [(0, 2, 1, 1), (2, 1, 1, 1)])
    router = Graph(2, [(0, 1, 1, 1)])
    emb = Embedding(host, {(0, 1): Flow(host, {(0, 2, 1): Fraction(1)})})
    rf = Flow(router, {(0, 1): Fraction(1)})
    out = project_flow(rf, emb)
    assert out.paths == {(0, 2, 1): Fraction(1)}


def test_project_two_step_concatenation():
    host = Graph(5, [(0, 3, 1, 1), (3, 1, 1, 1), (1, 4, 1, 1), (4, 2, 1, 1)])
    router = Graph(3, [(0, 1, 1, 1), (1, 2, 1, 1)])
    emb = Embedding(host, {
        (0, 1): Flow(host, {(0, 3, 1): Fraction(1)}),
        (1, 2): Flow(host, {(1, 4, 2): Fraction(1)}),
    })
    rf = Flow(router, {(0, 1, 2): Fraction(1)})
    out = project_flow(rf, emb)
    assert out.paths == {(0, 3, 1, 4, 2): Fraction(1)}
    assert routed_demand(out) == routed_demand(rf)


def test_project_zero_flow():
    host = Graph(2, [(0, 1, 1, 1)])
    router = Graph(2, [(0, 1, 1, 1)])
    emb = Embedding(host, {(0, 1): Flow(host, {(0, 1): Fraction(1)})})
    assert project_flow(Flow.empty(router), emb).paths == {}


def test_project_detects_deficit():
    host = Graph(2, [(0, 1, 1, 1)])
    router = Graph(2, [(0, 1, 1, 1)])
    emb = Embedding(host, {(0, 1): Flow(host, {(0, 1): Fraction(1, 2)})})
    with pytest.raises(ValueError):
        project_flow(Flow(router, {(0, 1): Fraction(1)}), emb)


def test_project_shortcuts_revisits():
    # both router edges embed through the same middle vertex; the concatenated
    # walk repeats it and must be shortcut back to a simple path
    host = Graph(4, [(0, 3, 1, 2), (3, 1, 1, 2), (3, 2, 1, 2)])
    router = Graph(3, [(0, 1, 1, 1), (1, 2, 1, 1)])
    emb = Embedding(host, {
        (0, 1): Flow(host, {(0, 3, 1): Fraction(1)}),
        (1, 2): Flow(host, {(1, 3, 2): Fraction(1)}),
    })
    out = project_flow(Flow(router, {(0, 1, 2): Fraction(1)}), emb)
    # walk 0-3-1-3-2 shortcuts to 0-3-2
    assert out.paths == {(0, 3, 2): Fraction(1)}
    assert routed_demand(out)[(0, 2)] == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=3), min_size=2, max_size=2))
def test_congestion_subadditive(vals):
    g = Graph(3, [(0, 1, 1, 2), (1, 2, 1, 2)])
    f1 = Flow(g, {(0, 1, 2): vals[0]})
    f2 = Flow(g, {(0, 1): vals[1]})
    lhs = flow_stats(f1.add(f2))["congestion"]
    assert lhs <= flow_stats(f1)["congestion"] + flow_stats(f2)["congestion"]
