import numpy as np
import pytest

from horolab.actions import quasi_axis
from horolab.errors import (
    FixedClassError,
    InconclusiveError,
    LabError,
    MismatchedBallError,
    UnknownVertexError,
    VerificationFailure,
)
from horolab.graph import build_ball
from horolab.horoboundary import (
    HorofunctionPatch,
    accumulation_probe,
    axis_projection_of_patch,
    busemann_patch,
    constant_sequence,
    finite_difference,
    horofunction_of_point,
    is_dead_end,
    limit_along_sequence,
    local_minimum_map,
    minimal_class_probe,
    translate_value,
)
from horolab.spaces import CustomAction, path_graph

from oracles import busemann_tree, f2_ball_words, label, point_horofunction


def test_point_patch_examples(F2_ball):
    b = F2_ball(3)
    p = horofunction_of_point(b, "a")
    assert p["e"] == 0 and p["a"] == -1
    assert horofunction_of_point(b, "aaa")["b"] == 1


def test_point_patch_matches_oracle(F2_ball):
    b = F2_ball(3)
    for y in ["", "ab", "BaB", "bbb"]:
        p = horofunction_of_point(b, label(y))
        for x in f2_ball_words(3):
            assert p[label(x)] == point_horofunction(x, y)


def test_point_patch_unknown():
    with pytest.raises(UnknownVertexError):
        horofunction_of_point(build_ball(path_graph(3), 2), "zz")


def test_point_patch_outside_ball(F2_ball):
    p = horofunction_of_point(F2_ball(2), "aaaa")
    assert p["aa"] == -2 and p["b"] == 1


def test_patch_rejects_bad_values(F2_ball):
    b = F2_ball(1)
    with pytest.raises(VerificationFailure):
        HorofunctionPatch(b, np.array([1, 0, 0, 0, 0]))
    vals = np.zeros(b.n, dtype=np.int64)
    vals[b.idx("a")] = 2
    with pytest.raises(VerificationFailure):
        HorofunctionPatch(b, vals)
    with pytest.raises(VerificationFailure):
        HorofunctionPatch(b, np.full(b.n, 0.5))
    with pytest.raises(LabError):
        HorofunctionPatch(b, np.zeros(3))


def test_busemann_a_ray(F2_ball):
    b = F2_ball(8)
    p = limit_along_sequence(b, "a^n")
    for k in range(9):
        assert p["a" * k if k else "e"] == -k
        assert p["A" * k if k else "e"] == k
    idx = p.certificate.index
    assert (idx <= b.base_row + 1).all()


def test_busemann_matches_oracle(F2_ball):
    b = F2_ball(4)
    for tmpl, word in [("(ab)^n", "ab"), ("b^n", "b"), ("(aB)^n", "aB")]:
        p = limit_along_sequence(b, tmpl)
        for x in f2_ball_words(4):
            assert p[label(x)] == busemann_tree(x, word)
    assert limit_along_sequence(b, "(ab)^n")["a"] == -1


def test_constant_sequence_is_point(F2_ball, F2):
    b = F2_ball(3)
    assert limit_along_sequence(b, constant_sequence(F2, "ab")).agrees_with(horofunction_of_point(b, "ab"))


def test_finite_difference_examples(F2_ball):
    b = F2_ball(3)
    pa, paa = horofunction_of_point(b, "a"), horofunction_of_point(b, "aa")
    assert finite_difference(pa, pa).lower_bound == 0
    assert finite_difference(pa, paa).lower_bound == 2
    for R in (3, 5):
        br = F2_ball(R)
        assert finite_difference(busemann_patch(br, "a^n"), busemann_patch(br, "b^n")).lower_bound == 2 * R


def test_finite_difference_mismatch(F2_ball):
    with pytest.raises(MismatchedBallError):
        finite_difference(horofunction_of_point(F2_ball(2), "a"), horofunction_of_point(F2_ball(3), "a"))


def test_minimum_map_examples(F2_ball):
    b = F2_ball(4)
    for v in b.labels:
        assert local_minimum_map(horofunction_of_point(b, v)).min_set == (v,)
    rep = local_minimum_map(busemann_patch(F2_ball(8), "a^n"), 2)
    assert rep.kind == "infinite-descent"
    assert rep.descent[-1][0].startswith("aaaaaa")


def test_minimum_map_inconclusive():
    p = limit_along_sequence(build_ball(path_graph(12), 4), [f"v{i}" for i in range(1, 12)])
    rep = local_minimum_map(p, 2)
    assert rep.kind == "infinite-descent"
    cyc = CustomAction([f"v{i}" for i in range(6)], [(f"v{i}", f"v{(i + 1) % 6}") for i in range(6)], {})
    p = limit_along_sequence(build_ball(cyc, 3), ["v2"] * 4)
    assert local_minimum_map(p, 1).min_set == ("v2",)
    # shallow minimum reached near the boundary: neither criterion fires
    ball = build_ball(path_graph(8), 5)
    vals = [0, -1, 0, 0, -1, -1]
    flat = HorofunctionPatch(ball, np.array([vals[ball.level(v)] for v in ball.vertices]), provenance={"kind": "limit"})
    with pytest.raises(InconclusiveError):
        local_minimum_map(flat, 2)


def test_dead_end_examples(F2_ball):
    assert not is_dead_end(F2_ball(3), "e", "a").dead_end
    p = build_ball(path_graph(3), 2)
    rep = is_dead_end(p, "v0", "v2")
    assert rep.dead_end and rep.isolated


def test_truncated_tree_leaves_are_dead_ends(F2_ball):
    b = F2_ball(2)
    cut = CustomAction(list(b.labels), [(b.labels[i], b.labels[j]) for i, j in b.edge_array.tolist()], {}, basepoint="e")
    cb = build_ball(cut, 2)
    deg = {v: 0 for v in cb.labels}
    for i, j in cb.edge_array.tolist():
        deg[cb.labels[i]] += 1
        deg[cb.labels[j]] += 1
    for v in cb.labels:
        assert is_dead_end(cb, "e", v).dead_end == (deg[v] == 1 and v != "e")


def test_minimal_class_examples(F2_ball):
    b = F2_ball(3)
    rep = minimal_class_probe(b, "a^n", "a^2n")
    assert rep.holds and rep.hypothesis and rep.equal
    rep = minimal_class_probe(b, "a^n", "b^n")
    assert not rep.hypothesis and rep.counterexample == "e"
    assert minimal_class_probe(b, "(ab)^n", "(ab)^n").holds


def test_accumulation_trivial(F2_ball):
    b = F2_ball(3)
    assert accumulation_probe(b, "ab", [horofunction_of_point(b, "ab")]).converges
    assert not accumulation_probe(b, "ab", [horofunction_of_point(b, "a")] * 3).converges


def test_axis_projection_examples(F2, F2_ball):
    b = F2_ball(5)
    ax = quasi_axis(F2.isometry("a"), (-4, 4))
    assert axis_projection_of_patch(busemann_patch(b, "b^n"), ax).projection == ("e",)
    assert axis_projection_of_patch(horofunction_of_point(b, "aa"), ax).projection == ("aa",)
    rep = axis_projection_of_patch(busemann_patch(b, "(baB)^n"), ax)
    assert rep.projection == ("e",) and rep.coarse_continuity
    with pytest.raises(FixedClassError):
        axis_projection_of_patch(busemann_patch(b, "a^n"), ax)


def test_translate_value_identity(F2, F2_ball):
    b = F2_ball(5)
    p = busemann_patch(b, "(ab)^n")
    for g in ["b", "aB", "BB"]:
        el = F2.group.parse(g)
        gi = F2.group.inv(el)
        for y in ["e", "a", "ba", "bab"]:
            yy = F2.group.mul(gi, F2.group.parse(y))
            want = busemann_tree(F2.group.format(yy).replace("e", ""), "ab") - busemann_tree(F2.group.format(gi), "ab")
            assert translate_value(p, el, b.vertex(y)) == want
