"""Invariants as hypothesis properties, on small balls built once per module."""

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from horolab.actions import apply, measured_constant, stable_translation_length
from horolab.graph import HalfInt, build_ball, gromov_product
from horolab.groups import CyclicFreeProduct
from horolab.horoboundary import (
    busemann_patch,
    finite_difference,
    horofunction_of_point,
    limit_along_sequence,
    local_minimum_map,
    translate_value,
)
from horolab.projection import build_axis_family, interval_set
from horolab.spaces import free_group, free_product

from oracles import FreeProductOracle, busemann_tree, label, reduce_word, tree_dist

SET = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])

F2 = free_group(2)
G = F2.group
B4 = build_ball(F2, 4)
B5 = build_ball(F2, 5)
Z34 = free_product([3, 4], names="st", coned=True)
Z34_B3 = build_ball(Z34, 3)

raw_words = st.text(alphabet="aAbB", max_size=8)
short_words = st.text(alphabet="aAbB", max_size=4).map(reduce_word)
ball4_words = st.text(alphabet="aAbB", max_size=4).map(reduce_word)
periods = st.text(alphabet="aAbB", min_size=1, max_size=3).map(reduce_word).filter(
    lambda w: w and reduce_word(w + w) == w + w)


def lab(w):
    return label(w)


@SET
@given(raw_words)
def test_normal_form_idempotent(w):
    x = G.parse(w)
    assert G.parse(G.format(x)) == x
    assert G.format(x) == lab(reduce_word(w))


@SET
@given(raw_words, raw_words, raw_words)
def test_multiplication_associative(u, v, w):
    x, y, z = G.parse(u), G.parse(v), G.parse(w)
    assert G.mul(G.mul(x, y), z) == G.mul(x, G.mul(y, z))
    assert G.mul(x, G.inv(x)) == G.identity


@SET
@given(st.lists(st.integers(0, 3), min_size=1, max_size=8), st.sampled_from([[3, 4], [2, 3], [0, 3], [2, 2, 2]]))
def test_free_product_matches_oracle(steps, orders):
    H = CyclicFreeProduct(orders)
    P = FreeProductOracle(orders)
    gens_h = H.generating_set()
    gens_p = P.gens()
    x, y = H.identity, ()
    for s in steps:
        i = s % len(gens_h)
        x = H.mul(x, gens_h[i])
        y = P.mul(y, gens_p[i])
    assert H.length(x) == sum(P.syllable_cost(f, e) for f, e in y)


@SET
@given(short_words, short_words, short_words)
def test_apply_composes(g, h, v):
    gi, hi = F2.isometry(g or "e"), F2.isometry(h or "e")
    assert apply(gi, apply(hi, lab(v))) == apply(gi * hi, lab(v))


@SET
@given(ball4_words, ball4_words, ball4_words)
def test_distance_metric(u, v, w):
    d = B4.distance
    assert d(lab(u), lab(v)) == d(lab(v), lab(u)) == tree_dist(u, v)
    assert d(lab(u), lab(w)) <= d(lab(u), lab(v)) + d(lab(v), lab(w))


@SET
@given(ball4_words, ball4_words, ball4_words)
def test_gromov_product_symmetric_and_tree(u, v, w):
    p = gromov_product(B4, lab(u), lab(v), lab(w))
    assert p == gromov_product(B4, lab(v), lab(u), lab(w))
    assert 0 <= p <= min(B4.distance(lab(u), lab(w)), B4.distance(lab(v), lab(w)))
    assert p.doubled % 2 == 0  # a tree has integer products


@SET
@given(st.integers(-40, 40), st.integers(-40, 40))
def test_halfint_order_and_sum(a, b):
    x, y = HalfInt(a), HalfInt(b)
    assert (x < y) == (a < b)
    assert (x + y).doubled == a + b
    assert HalfInt.of(str(x)) == x


@SET
@given(ball4_words)
def test_point_patch_axioms(y):
    p = horofunction_of_point(B4, lab(y))
    assert p["e"] == 0
    assert local_minimum_map(p).min_set == (lab(y),)
    for i, j in B4.edge_array.tolist():
        assert abs(int(p.values[i]) - int(p.values[j])) <= 1


@SET
@given(periods)
def test_busemann_matches_tree(w):
    p = limit_along_sequence(B4, f"({w})^n")
    for x in ["", "a", "ab", "BB", "aBa"]:
        assert p[lab(x)] == busemann_tree(x, w)
    assert (p.certificate.index <= B4.base_row + 1 + 2 * len(w)).all()


@SET
@given(periods, ball4_words)
def test_basepoint_change(w, o2):
    # b^o(x) - b^{o'}(x) = b^o(o'), with b^{o'} the same limit normalised at o'
    p = limit_along_sequence(B4, f"({w})^n")
    q = limit_along_sequence(B4, f"({w})^n", basepoint=B4.vertex(lab(o2)))
    for x in ["", "b", "Ab", "aa"]:
        assert p[lab(x)] - q[lab(x)] == p[lab(o2)]


@SET
@given(periods, short_words.filter(lambda w: len(w) <= 1), ball4_words.filter(lambda w: len(w) <= 3))
def test_equivariance(w, g, y):
    p = busemann_patch(B5, f"({w})^n")
    el = G.parse(g or "e")
    lhs = translate_value(p, el, B5.vertex(lab(y)))
    moved = limit_along_sequence(B5, f"{g}({w})^n" if g else f"({w})^n")
    assert lhs == moved[lab(y)]


@SET
@given(periods, periods)
def test_finite_difference_symmetric_and_monotone(u, v):
    small, big = build_ball(F2, 3), B4
    pu, pv = limit_along_sequence(small, f"({u})^n"), limit_along_sequence(small, f"({v})^n")
    qu, qv = limit_along_sequence(big, f"({u})^n"), limit_along_sequence(big, f"({v})^n")
    f = finite_difference(pu, pv).lower_bound
    assert f == finite_difference(pv, pu).lower_bound
    assert f <= finite_difference(qu, qv).lower_bound


@SET
@given(periods, st.sampled_from(["a", "b", "A", "B", "ab"]))
def test_bounded_locus(w, c):
    # y_n = x_n c stays within d(o, c o) of x_n, so the limits differ by at most twice that
    C = len(c)
    xs = limit_along_sequence(B4, f"({w})^n")
    ys = limit_along_sequence(B4, f"({w})^n{c}")
    assert finite_difference(xs, ys).lower_bound <= 2 * C


@SET
@given(periods, st.integers(1, 3))
def test_translation_length_scaling(w, n):
    g = F2.isometry(w)
    assert stable_translation_length(g ** n, 3) == n * stable_translation_length(g, 3 * n)


@SET
@given(st.lists(ball4_words, min_size=2, max_size=6, unique=True))
def test_measured_constant_at_least_one(ws):
    path = [B4.vertex(lab(w)) for w in ws]
    c = measured_constant(path, F2.dist)
    n = len(path)
    for i in range(n):
        for j in range(i + 1, n):
            d = F2.dist(path[i], path[j])
            assert (j - i) / c - c <= d <= c * (j - i) + c


@pytest.fixture(scope="module")
def fam():
    return build_axis_family(F2, ["a"], ["e", "b", "bb", "bbb", "ab", "Ab"])


@SET
@given(st.data())
def test_projection_distance_properties(fam, data):
    n = len(fam)
    u, v, w, z = (data.draw(st.integers(0, n - 1)) for _ in range(4))
    if u in (v, w, z):
        return
    assert fam.d(u, v, w) == fam.d(u, w, v)
    assert fam.d(u, v, w) <= fam.d(u, v, z) + fam.d(u, z, w)


@SET
@given(st.data())
def test_interval_monotone(fam, data):
    n = len(fam)
    v = data.draw(st.integers(0, n - 1))
    w = data.draw(st.integers(0, n - 1).filter(lambda x: x != v))
    K = data.draw(st.integers(0, 4))
    assert set(interval_set(fam, v, w, K + 1)) <= set(interval_set(fam, v, w, K))


@SET
@given(st.integers(0, Z34_B3.n - 1), st.integers(0, Z34_B3.n - 1))
def test_coned_distance_bounds(i, j):
    u, v = Z34_B3.vertices[i], Z34_B3.vertices[j]
    if hasattr(u, "rep") or hasattr(v, "rep"):
        return
    H = Z34.group
    d = Z34_B3.distance(u, v)
    assert d <= H.length(H.mul(H.inv(u), v))
    for f in (0, 1):
        if H.cone_of(u, f) == H.cone_of(v, f):
            assert d <= 2
