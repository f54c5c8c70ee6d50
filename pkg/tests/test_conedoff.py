import itertools

import networkx as nx
import pytest

from horolab.conedoff import (
    build_coned_off,
    coset_distance,
    coset_projection,
    cone_accumulation,
    confirm_guards_by_deletion,
    unique_minimum_scan,
    verify_bcp,
)
from horolab.errors import BoundedConjugatorError, LabError, UnknownCosetError
from horolab.graph import build_ball
from horolab.groups import Cone

from oracles import FreeProductOracle, brute_bcp, nx_graph


@pytest.fixture(scope="module")
def Z(coned_z3z4):
    return build_coned_off(coned_z3z4, 3)


def test_build_examples(coned_z3z4):
    g = build_coned_off(coned_z3z4, 2)
    P = FreeProductOracle([3, 4])
    want = {P.cone(x, f) for x in P.ball(2) for f in (0, 1)}
    assert len(g.cones) == len(want)
    assert len(g.elements) == len(P.ball(2))
    g0 = build_coned_off(coned_z3z4, 0)
    assert len(g0.elements) == 1 and len(g0.cones) == 2
    assert all(len(g0.coset_members(c)) == 1 for c in g0.cones)
    assert g.ball.distance("e", "s") == 1
    with pytest.raises(LabError):
        build_coned_off(__import__("horolab.spaces", fromlist=["free_group"]).free_group(2), 1)


def test_coned_distances_match_networkx(coned_z3z4):
    g = build_coned_off(coned_z3z4, 2)
    G = nx_graph(g.ball)
    for u in g.ball.labels[:20]:
        d = nx.single_source_shortest_path_length(G, u)
        for v in g.ball.labels:
            assert g.ball.distance(u, v) == d[v]


def test_coned_below_base(coned_z3z4):
    g = build_coned_off(coned_z3z4, 2)
    for u, v in itertools.combinations(g.elements, 2):
        assert g.ball.distance(u, v) <= g.base.distance(u, v)


def test_cone_degree_is_coset_size(Z):
    G = Z.group
    for c in Z.cones:
        members = Z.coset_members(c)
        assert all(G.coset_rep(x, c.factor) == c.rep for x in members)
        inside = [x for x in Z.elements if G.cone_of(x, c.factor) == c]
        assert len(members) == len(inside)


def test_projection_examples(Z):
    assert coset_projection(Z, "s", "c(<t>)").entry == ("e",)
    assert coset_projection(Z, "tt", "c(<t>)").entry == ("tt",)
    p = coset_projection(Z, "tts", "c(<t>)")
    assert p.entry == ("tt",)
    assert coset_distance(Z, "s", "tts", "c(<t>)") == 2
    with pytest.raises(UnknownCosetError):
        coset_projection(Z, "s", "c(ststst<t>)")
    with pytest.raises(UnknownCosetError):
        Z.cone("s")


def test_bcp_small_matches_oracle(coned_z3z4, frozen):
    rep = verify_bcp(coned_z3z4, scope=3)
    fr = frozen["bcp_z3z4"]["scope3"]
    assert (rep.K_least, rep.triples) == (fr["K"], fr["triples"])
    assert verify_bcp(coned_z3z4, 3, scope=3).passed


def test_bcp_vacuous_and_deletion(coned_z3z4):
    rep = verify_bcp(coned_z3z4, 2, scope=2)
    assert rep.passed
    checked, fails = confirm_guards_by_deletion(coned_z3z4, 2, 1)
    assert checked == fails > 0  # every coset distance above 1 is 2 = K*, and those fail
    assert confirm_guards_by_deletion(coned_z3z4, 2, 2) == (0, 0)
    assert brute_bcp([3, 4], 2) == (verify_bcp(coned_z3z4, scope=2).K_least, verify_bcp(coned_z3z4, scope=2).triples)


def test_bcp_same_coset(Z):
    # coset distances in Z/4 are at most 2; two elements of one coset sit at coned distance <= 2
    for c in Z.cones:
        for x, y in itertools.combinations(Z.coset_members(c), 2):
            assert Z.ball.distance(x, y) <= min(Z.base.distance(x, y), 2)


def test_bcp_needs_finite_factors(coned_zz3):
    with pytest.raises(LabError):
        verify_bcp(coned_zz3, scope=2)


def test_unique_minimum(coned_zz3):
    ball = build_ball(coned_zz3, 4)
    rep = unique_minimum_scan(ball, ["a^n", "ba^n"], ["e", "b"])
    assert rep.passed and rep.extended_elements
    assert rep.rows[0][1:] == ("finite-minimum", ["c(<a>)"])
    assert rep.rows[2] == ("b_e", "finite-minimum", ["e"])


def test_cone_accumulation(coned_zz3):
    ball = build_ball(coned_zz3, 5)
    rep = cone_accumulation(ball, "c(<a>)", ["a", "aaa", "aaaaa", "a^8"], "(ab)^n")
    assert rep.converges
    assert rep.agreement_radius[0] < rep.agreement_radius[-1]
    with pytest.raises(BoundedConjugatorError):
        cone_accumulation(ball, "c(<a>)", ["aa", "aa"], "(ab)^n")
    with pytest.raises(UnknownCosetError):
        cone_accumulation(ball, "a", ["a", "aa"], "(ab)^n")
