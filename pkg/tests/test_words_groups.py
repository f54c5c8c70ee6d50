import pytest

from horolab import words
from horolab.errors import LabError
from horolab.groups import CyclicFreeProduct, Isometry
from horolab.spaces import free_group

from oracles import f2_ball_words, reduce_word


@pytest.fixture
def F():
    return CyclicFreeProduct([0, 0])


def test_parse_templates(F):
    assert F.format(F.parse("(ab)^n", 2)) == "abab"
    assert F.format(F.parse("ba^nB", 3)) == "baaaB"
    assert F.format(F.parse("a^2n", 2)) == "aaaa"
    assert F.format(F.parse("a^-3")) == "AAA"
    assert F.format(F.parse("(ab)^-n", 1)) == "BA"
    assert F.parse("e") == ()


def test_parameter_detection():
    assert words.has_parameter("(ab)^n")
    assert words.has_parameter("a^-2n")
    assert not words.has_parameter("ab^3")


def test_bad_template(F):
    with pytest.raises(ValueError):
        F.parse("a^(2n)", 1)
    with pytest.raises(ValueError):
        F.parse("a$b")


def test_free_reduction_matches_strings(F):
    for w in ["aAb", "abBA", "aabBBb", "BbAa", "abAB"]:
        assert F.format(F.parse(w)) == (reduce_word(w) or "e")


def test_finite_orders():
    G = CyclicFreeProduct([3, 4], names="st")
    s, t = G.generator("s"), G.generator("t")
    assert G.power(s, 3) == G.identity
    assert G.power(t, 4) == G.identity
    assert G.order_of(s) == 3 and G.order_of(t) == 4
    assert G.order_of(G.mul(s, t)) == 0
    assert G.format(G.power(t, 3)) == "T"
    assert G.length(G.power(t, 2)) == 2


def test_bad_orders():
    with pytest.raises(LabError):
        CyclicFreeProduct([1, 3])
    with pytest.raises(LabError):
        CyclicFreeProduct([])
    with pytest.raises(LabError):
        CyclicFreeProduct([0, 0], names="ae")


@pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
def test_ball_counts(F, r):
    assert len(F.ball(r)) == len(f2_ball_words(r)) == 2 * 3 ** r - 1


def test_isometry_ops():
    act = free_group(2)
    a, b = act.isometry("a"), act.isometry("b")
    assert (a * b).word == "ab"
    assert (a ** 3).word == "aaa"
    assert (~(a * b)).word == "BA"
    assert (a * a.inverse()).is_identity
    assert a(act.basepoint) == a.element
    assert isinstance(act.identity(), Isometry)
    assert sorted([b, a, a * b]) == [a, b, a * b]
