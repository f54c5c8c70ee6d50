"""Built-in experiment suites.

A suite takes an :class:`Context` and returns an :class:`Outcome`.  Outcomes
contain only deterministic data; wall time is recorded by the runner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .. import dynamics as dyn
from ..actions import acylindricity_probe
from ..conedoff import build_coned_off, cone_accumulation, unique_minimum_scan, verify_bcp
from ..errors import LabError, UncertifiedRegionError
from ..graph import build_ball, estimate_delta_report
from ..graphio import to_dot
from ..horoboundary import (
    busemann_patch,
    horofunction_of_point,
    is_dead_end,
    limit_along_sequence,
    local_minimum_map,
    translate_value,
)
from ..projection import (
    build_axis_family,
    build_complex,
    chain_family,
    connectivity_sweep,
    verify_bgit,
    verify_forcing,
    verify_projection_axioms,
)
from ..rays import Ray, word_rays
from ..spaces import action_from_spec
from . import svg

FREE2 = {"family": "free", "rank": 2}


@dataclass
class Context:
    instance: dict
    radius: int | None
    params: dict
    seed: int | None
    max_vertices: int

    @property
    def action(self):
        if not hasattr(self, "_action"):
            self._action = action_from_spec(self.instance)
        return self._action

    def ball(self, radius=None):
        r = self.radius if radius is None else radius
        return build_ball(self.action, r, self.max_vertices)

    def p(self, key, default):
        return self.params.get(key, default)

    def rng(self):
        return np.random.default_rng(self.seed)


@dataclass
class Outcome:
    checks: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    plots: dict = field(default_factory=dict)  # name -> svg text
    graphs: dict = field(default_factory=dict)  # name -> dot text

    def check(self, name, passed, witness=None, **detail):
        entry = {"name": name, "passed": bool(passed)}
        if not passed:
            entry["witness"] = witness if witness is not None else "none recorded"
        if detail:
            entry["detail"] = detail
        self.checks.append(entry)
        return passed

    def constant(self, name, value, operation):
        self.constants[name] = {"value": value, "operation": operation}


@dataclass(frozen=True)
class Suite:
    name: str
    run: object
    instance: dict
    radius: int | None
    seeded: bool = False
    summary: str = ""
    pins: dict = field(default_factory=dict)  # expected constants, used with the default instance only


# -- graph core and horofunctions ---------------------------------------------------------

def _tree_smoke(ctx: Context) -> Outcome:
    out = Outcome()
    ball = ctx.ball()
    act = ctx.action
    o = ball.basepoint
    bad = None
    for v in ball.vertices:
        try:
            horofunction_of_point(ball, v)
        except LabError as e:
            bad = (ball.label(v), str(e))
            break
    out.check("point patches satisfy the horofunction axioms", bad is None, bad, count=ball.n)

    templates = ctx.p("templates", None) or [r.template for r in word_rays(act, 2)] + [
        "a^n", "b^n", "A^n", "B^n", "(ab)^n", "(aB)^n", "(Ab)^n", "(AB)^n", "a^nb^n"]
    templates = templates[: ctx.p("limit_patches", 20)]
    failures = []
    for t in templates:
        try:
            limit_along_sequence(ball, t)
        except LabError as e:
            failures.append((t, str(e)))
    out.check("limit patches satisfy the horofunction axioms", not failures, failures[:3], count=len(templates))

    ray = ctx.p("stabilization_ray", "a^n")
    p = busemann_patch(ball, ray)
    lv = ball.base_row
    idx = p.certificate.index
    over = [ball.labels[i] for i in range(ball.n) if idx[i] > lv[i] + 1]
    out.check(f"stabilization index of lim {ray} is at most d(o,x)+1", not over, over[:5])
    hist = {}
    for i in range(ball.n):
        hist[int(idx[i])] = hist.get(int(idx[i]), 0) + 1
    out.tables["stabilization"] = (["index", "vertices"], sorted(hist.items()))
    out.plots["stabilization"] = svg.bar_chart(sorted(hist.items()), f"stabilization index of lim {ray}", "index", "vertices")
    out.constant("max_stabilization_index", p.certificate.max_index, "limit_along_sequence")

    rmin = min(ball.radius, ctx.p("minimum_radius", 6))
    small = ctx.ball(rmin) if rmin != ball.radius else ball
    wrong = [small.label(v) for v in small.vertices
             if local_minimum_map(horofunction_of_point(small, v)).min_set != (small.label(v),)]
    out.check("minimum map of b_x is {x}", not wrong, wrong[:5], radius=rmin)
    kinds = {t: local_minimum_map(busemann_patch(ball, t)).kind for t in ("a^n", "(ab)^n")}
    out.check("Busemann patches descend forever", all(k == "infinite-descent" for k in kinds.values()), kinds)

    dead = [ball.label(v) for v in ball.vertices[:1 + 4 * 3]
            if ball.level(v) < ball.radius and is_dead_end(ball, o, v).dead_end]
    out.check("no dead ends in the tree", not dead, dead)

    dr = ctx.p("delta_radius", 3)
    d = estimate_delta_report(ctx.ball(dr))
    out.check("four-point delta is 0", d.value == 0, d.witness)
    out.constant("delta", d.value.to_json(), "estimate_delta")
    if ctx.p("graph_radius", 2) >= 0:
        out.graphs["ball"] = to_dot(ctx.ball(ctx.p("graph_radius", 2)), "ball")
    return out


def _equivariance(ctx: Context) -> Outcome:
    """(g.b_xi)(y) against the patch of g.xi, on random triples."""
    out = Outcome()
    ball = ctx.ball()
    act = ctx.action
    G = act.group
    rng = ctx.rng()
    rays = [Ray.of(act, t) for t in ctx.p("templates", ["a^n", "b^n", "(ab)^n", "(aB)^n", "a^nb^n", "Ba^n", "(abb)^n", "AB^n"])]
    gs = G.ball(ctx.p("g_radius", 2))
    trials = ctx.p("trials", 1000)
    patches, moved = {}, {}
    bad, done, skipped = [], 0, 0
    while done < trials:
        xi = rays[int(rng.integers(len(rays)))]
        g = gs[int(rng.integers(len(gs)))]
        y = ball.vertices[int(rng.integers(ball.n))]
        if xi.template not in patches:
            patches[xi.template] = limit_along_sequence(ball, xi)
        try:
            lhs = translate_value(patches[xi.template], g, y)
        except UncertifiedRegionError:
            skipped += 1
            continue
        key = (xi.template, g)
        if key not in moved:
            moved[key] = limit_along_sequence(ball, xi.translate(g))
        rhs = moved[key][y]
        if lhs != rhs:
            bad.append((G.format(g), xi.label, ball.label(y), lhs, rhs))
        done += 1
    out.check("(g.b)(y) = b(g^-1 y) - b(g^-1 o)", not bad, bad[:3], trials=done, skipped=skipped)
    return out


def _delta(ctx: Context) -> Outcome:
    out = Outcome()
    d = estimate_delta_report(ctx.ball())
    out.constant("delta", d.value.to_json(), "estimate_delta")
    exp = ctx.p("expect", None)
    if exp is not None:
        out.check(f"delta equals {exp}", d.value == Fraction(str(exp)), d.witness)
    return out


def _acylindricity(ctx: Context) -> Outcome:
    out = Outcome()
    r, L, M = ctx.p("r", 2), ctx.p("L", 6), ctx.p("M", 8)
    rep = acylindricity_probe(ctx.action, r, L, M, ctx.max_vertices)
    out.constant("N", rep.N, "acylindricity_probe")
    exp = ctx.p("expect", None)
    if exp is not None:
        out.check(f"N equals {exp}", rep.N == exp, [str(w) for w in rep.witness])
    return out


# -- projection complexes ----------------------------------------------------------------------

def _projection_axioms(ctx: Context) -> Outcome:
    out = Outcome()
    fam = build_axis_family(ctx.action, ctx.p("seeds", ["a"]), ctx.p("translates", ["e", "b", "B", "bb", "ab", "Ab"]))
    rep = verify_projection_axioms(fam, ctx.p("kappa", None))
    out.constant("kappa", rep.kappa, "verify_projection_axioms")
    out.check("axiom (1): bounded projections", rep.bounded, rep.witnesses.get("bounded"))
    out.check("axiom (2): Behrstock inequality", rep.behrstock, rep.witnesses.get("behrstock"))
    out.check("axiom (3): finitely many large projections", rep.finite, rep.witnesses.get("finite"))
    if "expect_kappa" in ctx.params:
        out.check(f"kappa equals {ctx.params['expect_kappa']}", rep.kappa == ctx.params["expect_kappa"], rep.kappa)
    out.check("family has at least 6 members", len(fam) >= ctx.p("min_members", 6), len(fam), members=len(fam))
    out.tables["projections"] = (["U", "V", "W", "d_U(V,W)"],
                                 [(fam.names[u], fam.names[v], fam.names[w], fam.d(u, v, w))
                                  for u in range(len(fam)) for v in range(len(fam)) for w in range(v + 1, len(fam))
                                  if u not in (v, w)])
    return out


def _forcing(ctx: Context) -> Outcome:
    out = Outcome()
    fam = chain_family(ctx.action, ctx.p("f", "a"), ctx.p("step", "ba^3"), ctx.p("length", 7))
    K = ctx.p("K", 0)
    pc = build_complex(fam, K)
    rep = verify_forcing(pc, fam, ctx.p("Khat", None))
    out.constant("Khat", rep.least_Khat, "verify_forcing")
    out.check("every member of F_K(U,V) is a guard", rep.passed, rep.failures[:3], checked=rep.checked)
    names = fam.names
    # a path that stays at complex distance >= 3 from the last member
    path = pc.geodesic(names[0], names[-4]) if len(names) >= 4 else []
    bg = verify_bgit(pc, fam, path, names[-1], ctx.p("K0", None))
    out.constant("K0", bg.value, "verify_bgit")
    out.check("geodesic projections are bounded", bg.passed, bg.per_step)
    for key, val in (("expect_Khat", rep.least_Khat), ("expect_K0", bg.value)):
        if key in ctx.params:
            out.check(f"{key[7:]} equals {ctx.params[key]}", val == ctx.params[key], val)
    sweep = connectivity_sweep(fam, range(0, ctx.p("sweep_max", 4)))
    out.tables["connectivity"] = (["K", "connected", "edges"], [(k, bool(c), int(e)) for k, (c, e) in sorted(sweep.items())])
    out.graphs["complex"] = to_dot(pc, f"P_{K}")
    return out


# -- coned-off graphs ------------------------------------------------------------------------------

def _bcp(ctx: Context) -> Outcome:
    out = Outcome()
    K = ctx.p("K", None)
    rep = verify_bcp(ctx.action, K, scope=ctx.radius, slack=ctx.p("slack", 2))
    out.constant("K_star", rep.K_least, "verify_bcp")
    # without a given K the scan itself produces the least K; it passes by construction
    out.check("large coset distance forces the cone", rep.passed is not False, rep.witnesses[:3],
              pairs=rep.pairs, triples=rep.triples)
    if "expect_K" in ctx.params:
        out.check(f"K* equals {ctx.params['expect_K']}", rep.K_least == ctx.params["expect_K"], rep.K_least)
    out.tables["by_distance"] = (["coset_distance", "triples", "non_guards"],
                                 [(int(k), int(a), int(b)) for k, (a, b) in sorted(rep.by_distance.items())])
    if ctx.p("graph_radius", 1) >= 0:
        out.graphs["coned_ball"] = to_dot(build_coned_off(ctx.action, ctx.p("graph_radius", 1)).ball, "coned")
    return out


def _coned_lemmas(ctx: Context) -> Outcome:
    out = Outcome()
    ball = ctx.ball()
    seqs = ctx.p("sequences", ["a^n", "ba^n", "(ab)^n"])
    rep = unique_minimum_scan(ball, seqs, ctx.p("points", ["e", "b", "ab"]))
    out.check("each finite minimum is a single vertex", rep.passed, [r for r in rep.rows if r[1] == "finite-minimum"])
    out.tables["minima"] = (["sequence", "kind", "minimum"], [(a, k, " ".join(m)) for a, k, m in rep.rows])
    big = ctx.ball(ctx.p("accumulation_radius", ctx.radius + 1))
    cj = ctx.p("conjugators", ["a", "aaa", "aaaaa", "a^8"])
    acc = cone_accumulation(big, ctx.p("coset", "c(<a>)"), cj, ctx.p("xi", "(ab)^n"))
    out.check("conjugated patches accumulate on the cone patch", acc.converges, list(acc.differences),
              differences=list(acc.differences), agreement=list(acc.agreement_radius))
    return out


# -- dynamics -----------------------------------------------------------------------------------

def _north_south(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    g = act.isometry(ctx.p("g", "ab"))
    Ts = ctx.p("T", [1, 2, 3])
    n_max = ctx.p("n_max", 10)
    rows = []
    for T in Ts:
        sample = dyn.standard_sample(act, T, ctx.p("length", 4), avoid=Ray.repeller(g))
        rep = dyn.north_south_probe(g, sample, n_max)
        rows.append((T, len(sample), rep.n0 if rep.n0 is not None else -1))
        out.check(f"north-south at T={T}", rep.passed, rep.escaping[:5], rays=len(sample))
        out.constant(f"n0_T{T}", rep.n0, "north_south_probe")
    n0s = [r[2] for r in rows]
    out.check("n0 is monotone in T", all(a <= b for a, b in zip(n0s, n0s[1:])), n0s)
    out.tables["n0_vs_T"] = (["T", "rays", "n0"], rows)
    out.plots["n0_vs_T"] = svg.line_chart([(r[0], r[2]) for r in rows], f"n0 against T for {g.word}", "T", "n0")
    return out


def _extreme_proximality(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    T = ctx.p("T", 3)
    F = dyn.BoundarySample([Ray.of(act, t) for t in ctx.p("F", ["b^n", "(bab)^n"])], T)
    target = Ray.of(act, ctx.p("target", "a^n"))
    g = dyn.extreme_proximality_probe(F, target, T, ctx.p("depth", 2))
    ok = all(F.near(xi.translate(g), target) for xi in F.rays)
    out.check("gF lies in the target neighbourhood", ok, g.word, g=g.word)
    targets = ctx.p("pair", ["a^n", "b^n"])
    h = dyn.fixed_pair_density_probe(tuple(Ray.of(act, t) for t in targets), T)
    out.check("loxodromic with fixed points near both targets", True, None, g=h.word)
    return out


def _free_semigroup(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    A = [act.isometry(w) for w in ctx.p("A", ["a", "A"])]
    L = ctx.p("L", 10)
    try:
        c = dyn.free_semigroup_certificate(A, ctx.p("depth", 2), L)
    except LabError as e:
        out.check(f"products of <= {L} factors are distinct", False, str(e))
        return out
    out.check(f"products of <= {L} factors are distinct", True, None,
              f=c.f.word, generators=c.generators, comparisons=c.comparisons)
    out.constant("tau", c.tau, "free_semigroup_certificate")
    out.constant("power", c.power, "free_semigroup_certificate")
    return out


def _pnai(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    a, f = act.isometry(ctx.p("a", "b")), act.isometry(ctx.p("f", "ab"))
    tau = None
    if a.order():
        tau = dyn.bounded_axis_probe(a, f)
        out.constant("tau", tau, "bounded_axis_probe")
    L = ctx.p("L", 8)
    try:
        c = dyn.pnai_certificate(a, f, L, tau)
        out.check(f"no relation of length <= {L}", True, None, words=c.words)
    except LabError as e:
        out.check(f"no relation of length <= {L}", False, getattr(e, "witness", str(e)))
    return out


def _towers(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    D = [act.isometry(w) for w in ctx.p("D", ["a", "b", "A", "B"])]
    c = dyn.paradoxical_towers(D, radius=ctx.radius)
    out.check("a A_i pairwise disjoint", c.disjoint, c.witness, f0=c.f0, g=c.g)
    out.check(f"ball({c.radius}) covered by g_i A_i", c.covering, None, sizes=c.sizes)
    return out


def _myrberg(ctx: Context) -> Outcome:
    out = Outcome()
    rep = dyn.myrberg_ray(ctx.action, ctx.p("omega", [1, 2, 3]), ctx.p("L", ["ab"]))
    out.check("fellow-travel segments strictly increase", rep.increasing, rep.segments, word=rep.word)
    out.tables["segments"] = (["block", "h", "f", "power", "length"],
                              [(i, h, f, k, s) for i, ((h, f, k), s) in enumerate(zip(rep.factors, rep.segments))])
    return out


def _tamedness(ctx: Context) -> Outcome:
    out = Outcome()
    act = ctx.action
    rep = dyn.tamedness_probe(act.isometry(ctx.p("b", "a")), act.isometry(ctx.p("c", "baB")),
                              ctx.p("max_length", 4), ctx.p("T", 8))
    out.check("fixed pairs are disjoint or equal", rep.passed, rep.counterexamples[:3],
              sampled=rep.sampled, disjoint=rep.disjoint, equal=rep.equal)
    return out


CONED_Z3Z4 = {"family": "free_product", "orders": [3, 4], "names": "st", "coned": True}
CONED_ZZ3 = {"family": "free_product", "orders": [0, 3], "coned": True}

SUITES = {s.name: s for s in [
    Suite("tree-smoke", _tree_smoke, FREE2, 8, summary="horofunction invariants on the F2 tree"),
    Suite("equivariance", _equivariance, FREE2, 6, seeded=True, summary="translation identity on random triples"),
    Suite("delta", _delta, CONED_Z3Z4, 4, summary="four-point delta of a ball", pins={"expect": 1}),
    Suite("acylindricity", _acylindricity, FREE2, None, summary="acylindricity constant N", pins={"expect": 5}),
    Suite("projection-axioms", _projection_axioms, FREE2, None, summary="projection axioms for translated axes",
          pins={"expect_kappa": 0}),
    Suite("forcing", _forcing, FREE2, None, summary="guards in the projection complex of a chain",
          pins={"expect_Khat": 0, "expect_K0": 0}),
    Suite("bcp", _bcp, CONED_Z3Z4, 5, summary="bounded coset penetration on a coned-off graph", pins={"expect_K": 2}),
    Suite("coned-lemmas", _coned_lemmas, CONED_ZZ3, 4, summary="unique minima and cone accumulation"),
    Suite("north-south", _north_south, FREE2, None, summary="n0 against resolution for a loxodromic"),
    Suite("extreme-proximality", _extreme_proximality, FREE2, None, summary="moving finite sets into a neighbourhood"),
    Suite("free-semigroup", _free_semigroup, FREE2, None, summary="free semigroup by exhaustive comparison"),
    Suite("pnai", _pnai, CONED_ZZ3, None, summary="free products with an elliptic element"),
    Suite("towers", _towers, FREE2, 6, summary="paradoxical towers on a ball"),
    Suite("myrberg", _myrberg, FREE2, None, summary="Myrberg ray prefixes"),
    Suite("tamedness", _tamedness, FREE2, None, summary="fixed pairs in a normal closure sample"),
]}
