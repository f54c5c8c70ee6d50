import itertools
import subprocess
import sys

import numpy as np
import pytest

from horolab.errors import LabError, ResourceLimitError, UnknownVertexError
from horolab.graph import (
    FiniteGraph,
    GromovProduct,
    HalfInt,
    build_ball,
    distance,
    estimate_delta,
    estimate_delta_report,
    gromov_product,
    guard_in_space,
    is_guard,
)
from horolab.spaces import CustomAction, cycle_graph, free_product, path_graph

from oracles import brute_delta2, f2_ball_words, gromov_tree, label, nx_graph, nx_matrix, tree_dist


def test_halfint():
    h = HalfInt.of("3/2")
    assert h.doubled == 3 and str(h) == "3/2" and h.to_json() == 1.5
    assert HalfInt(4) == 2 and int(HalfInt(4)) == 2
    assert HalfInt(1) < 1 and HalfInt(3) > 1
    with pytest.raises(ValueError):
        HalfInt.of("1/3")
    with pytest.raises(ValueError):
        int(HalfInt(3))


def test_ball_examples(F2, coned_z3z4):
    b1 = build_ball(F2, 1)
    assert b1.n == 5 and len(b1.edges) == 4
    assert set(b1.labels) == {"e", "a", "A", "b", "B"}
    assert build_ball(F2, 2).n == 17
    z = build_ball(free_product([3, 4], names="st"), 0)
    assert z.n == 1 and len(z.edges) == 0


def test_ball_radius_and_negative(F2):
    b = build_ball(F2, 4)
    assert (b.base_row <= 4).all()
    with pytest.raises(ValueError):
        build_ball(F2, -1)
    with pytest.raises(ResourceLimitError):
        build_ball(F2, 6, max_vertices=100)


def test_distance_examples(F2_ball):
    b = F2_ball(3)
    assert distance(b, "a", "b") == 2
    assert distance(b, "ab", "ab") == 0
    assert distance(b, "ab", "ba") == 4


def test_distances_match_words(F2_ball):
    b = F2_ball(3)
    ws = f2_ball_words(3)
    for u, v in itertools.product(ws[::3], ws[::5]):
        assert b.distance(label(u), label(v)) == tree_dist(u, v)


def test_distances_match_networkx(coned_z3z4):
    b = build_ball(coned_z3z4, 2)
    D = nx_matrix(nx_graph(b), b.labels)
    assert np.array_equal(b.dist, D)
    assert (b.dist == b.dist.T).all() and (np.diag(b.dist) == 0).all()


def test_unknown_vertex(F2_ball):
    with pytest.raises(UnknownVertexError):
        F2_ball(2).distance("aaa", "e")


def test_gromov_product_examples(F2_ball):
    b = F2_ball(3)
    assert gromov_product(b, "a", "b", "e") == 0
    assert gromov_product(b, "ab", "ab", "e") == 2
    assert gromov_product(b, "ab", "aB", "e") == 1
    assert isinstance(gromov_product(b, "a", "b", "e"), GromovProduct)
    for x, y in [("ab", "abb"), ("aB", "AB"), ("bab", "ba")]:
        assert gromov_product(b, x, y, "e") == gromov_tree(x, y)


def test_guard_examples(F2_ball, coned_z3z4):
    assert is_guard(F2_ball(2), "a", "e", "ab")
    c4 = build_ball(cycle_graph(4), 2)
    assert not is_guard(c4, "v1", "v0", "v2")
    zc = build_ball(coned_z3z4, 1)
    assert is_guard(zc, "e", "s", "t")
    g = nx_graph(zc)
    import networkx as nx

    assert all("e" in p for p in nx.all_shortest_paths(g, "s", "t"))


def test_guard_endpoint_is_true(F2_ball):
    assert is_guard(F2_ball(2), "e", "e", "ab")


def test_guard_in_space_matches_deletion(coned_z3z4):
    b = build_ball(coned_z3z4, 3)
    inner = [v for v in b.vertices if b.level(v) <= 1]
    for x, z in itertools.combinations(inner, 2):
        for w in inner:
            if w in (x, z):
                continue
            assert guard_in_space(coned_z3z4, w, x, z) == is_guard(b, w, x, z)


def test_delta_examples(F2_ball, frozen, coned_z3z4):
    assert estimate_delta(F2_ball(3)) == 0
    single = FiniteGraph(["v"], [])
    assert estimate_delta(single) == 0
    fr = frozen["delta_coned_z3z4_r4"]
    b = build_ball(coned_z3z4, 4)
    assert b.n == fr["vertices"]
    assert estimate_delta(b).doubled == fr["doubled"]


def test_delta_small_brute(coned_z3z4):
    b = build_ball(coned_z3z4, 2)
    assert estimate_delta(b).doubled == brute_delta2(nx_matrix(nx_graph(b), b.labels))


def test_delta_sampled_deterministic(coned_z3z4):
    b = build_ball(coned_z3z4, 3)
    r1 = estimate_delta_report(b, 500, seed=3)
    r2 = estimate_delta_report(b, 500, seed=3)
    assert r1 == r2
    assert r1.value <= estimate_delta(b)


def test_geodesic_and_interval(F2_ball):
    b = F2_ball(3)
    assert b.geodesic("ab", "ba") == [b.vertex(x) for x in ["ab", "a", "e", "b", "ba"]]
    assert sorted(b.labels[i] for i in b.interval("e", "ab")) == sorted(["e", "a", "ab"])


def test_distances_to_outside_ball(F2_ball, F2):
    b = F2_ball(2)
    y = F2.group.parse("aaaaab")
    d = b.distances_to(y)
    for i, v in enumerate(b.labels):
        assert d[i] == tree_dist("" if v == "e" else v, "aaaaab")


def test_custom_graph_and_cap():
    p = path_graph(5)
    b = build_ball(p, 4)
    assert b.certified and b.distance("v0", "v4") == 4
    c = CustomAction(["x", "y"], [("x", "y")], {"r": {"x": "y", "y": "x"}})
    assert c.act(c.group.generator("r"), "x") == "y"
    with pytest.raises(LabError):
        CustomAction(["x", "y", "z"], [("x", "y")], {"r": {"x": "z", "z": "x", "y": "y"}})


def test_matrix_cap(F2):
    b = build_ball(F2, 7)
    with pytest.raises(ResourceLimitError):
        _ = b.dist
    assert b.row(0)[b.idx("aaaaaaa")] == 7


def test_pure_backend_in_subprocess():
    code = ("import horolab.kernels as k; from horolab.graph import build_ball; from horolab.spaces import free_group;"
            "b = build_ball(free_group(2), 3); print(k.BACKEND, int(b.dist.sum()))")
    out = subprocess.run([sys.executable, "-c", code], env={"HOROLAB_PURE": "1", "PATH": ""}, capture_output=True, text=True)
    backend, total = out.stdout.split()
    b = build_ball(__import__("horolab.spaces", fromlist=["free_group"]).free_group(2), 3)
    assert backend == "pure"
    assert int(total) == int(b.dist.sum())
