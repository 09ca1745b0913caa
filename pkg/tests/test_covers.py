import pytest

from lce.covers import NeighborhoodCover, build_cover, verify_cover
from lce.graphs import Graph


def path_graph(n):
    return Graph(n, [(i, i + 1, 1, 1) for i in range(n - 1)])


def test_single_vertex():
    g = Graph(1, [])
    cover = build_cover(g, 1, 1, seed=3)
    assert cover.width == 1
    assert cover.clusterings[0] == [[0]]


def test_whole_clique_is_a_valid_cover():
    g = Graph(3, [(0, 1, 1, 1), (0, 2, 1, 1), (1, 2, 1, 1)])
    cover = NeighborhoodCover([[[0, 1, 2]]], h_cov=1, sep_factor=1, h_diam=2)
    assert verify_cover(g, cover)["ok"]


def test_p9_build_and_verify():
    g = path_graph(9)
    cover = build_cover(g, 1, 2, seed=0)
    rep = verify_cover(g, cover)
    assert rep["ok"]
    assert cover.width <= 8


def test_build_is_deterministic():
    g = path_graph(7)
    a = build_cover(g, 1, 2, seed=11)
    b = build_cover(g, 1, 2, seed=11)
    assert a.clusterings == b.clusterings


def test_verify_flags_missing_ball():
    g = path_graph(3)
    # cluster {0,1} misses vertex 2's ball and {2} misses ball(2,1)={1,2}
    cover = NeighborhoodCover([[[0, 1]], [[2]]], h_cov=1, sep_factor=1, h_diam=4)
    rep = verify_cover(g, cover)
    assert not rep["covering"]
    assert rep["offending_vertex"] is not None


def test_verify_flags_bad_separation():
    g = path_graph(4)
    cover = NeighborhoodCover([[[0, 1], [2, 3]]], h_cov=1, sep_factor=4, h_diam=1)
    rep = verify_cover(g, cover)
    assert not rep["separation"]


def test_rejects_bad_params():
    g = path_graph(3)
    with pytest.raises(ValueError):
        build_cover(g, 0, 1)
    with pytest.raises(ValueError):
        build_cover(g, 1, 1, h_diam=1)


def test_custom_diameter_respected():
    g = path_graph(12)
    cover = build_cover(g, 1, 1, seed=5, h_diam=6)
    rep = verify_cover(g, cover)
    assert rep["ok"]
    assert rep["h_diam_measured"] <= 6
