"""Boundary dynamics at finite scale.

Boundary points are rays (see :mod:`horolab.rays`); a basic neighbourhood of
a ray xi at resolution T is {eta : <eta, xi>_o >= T}, with products read off
points at distance ``reach`` along each ray.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

from .actions import (
    DEFAULT_FAMILY,
    classify,
    compose_loxodromic,
    extension_choice,
    label_path,
    projection_diameter,
    quasi_axis,
)
from .errors import (
    FixedPointsCollideError,
    LabError,
    OutOfBallError,
    PreconditionError,
    RelationFound,
    SearchExhaustedError,
    VerificationFailure,
)
from .groups import Isometry
from .rays import Ray, word_rays


@dataclass
class BoundarySample:
    rays: list
    T: int
    reach: int = 0

    def __post_init__(self):
        if not self.reach:
            self.reach = 4 * self.T + 8
        self._far = {}
        labels = [r.label for r in self.rays]
        if len(set(labels)) != len(labels):
            raise LabError("sample rays must be distinct")

    def far_point(self, xi: Ray):
        key = (xi.template, xi.left)
        p = self._far.get(key)
        if p is None:
            p = self._far[key] = xi.point(xi.depth_for(self.reach))
        return p

    def product(self, xi: Ray, eta: Ray) -> Fraction:
        act = xi.action
        return Fraction(act.gromov_product2(self.far_point(xi), self.far_point(eta), act.basepoint), 2)

    def near(self, xi: Ray, eta: Ray) -> bool:
        return self.product(xi, eta) >= self.T

    def __len__(self):
        return len(self.rays)


def standard_sample(action, T: int = 3, length: int = 4, reach: int = 0, avoid: Ray | None = None) -> BoundarySample:
    """Rays w x^n over reduced words of one length, dropping those near ``avoid``."""
    rays = word_rays(action, length)
    s = BoundarySample(rays, T, reach)
    if avoid is not None:
        s.rays = [r for r in rays if not s.near(r, avoid)]
    return s


# -- candidate loxodromics ---------------------------------------------------------

def conjugate_candidates(action, depth: int):
    """c x c^-1 for generators x and conjugators c of length <= depth, breadth-first, shortlex."""
    G = action.group
    gens = G.generating_set()
    seen = set()
    for c in G.ball(depth):
        ci = G.inv(c)
        for x in gens:
            el = G.mul(G.mul(c, x), ci)
            if el in seen:
                continue
            seen.add(el)
            iso = Isometry(action, el)
            if classify(iso).kind == "loxodromic":
                yield iso


# -- north-south -------------------------------------------------------------------

@dataclass
class NorthSouthReport:
    n0: int | None
    T: int
    n_max: int
    products: dict  # ray label -> [<g^n xi, g^+>_o for n = 0..n_max]
    escaping: list  # rays still outside the attractor neighbourhood at n_max

    @property
    def passed(self) -> bool:
        return self.n0 is not None


def north_south_probe(g: Isometry, sample: BoundarySample, n_max: int = 10) -> NorthSouthReport:
    """Least n0 with <g^n xi, g^+>_o >= T for all sampled xi and all n0 <= n <= n_max."""
    plus, minus = Ray.attractor(g), Ray.repeller(g)
    for xi in sample.rays:
        if sample.near(xi, minus):
            raise PreconditionError(f"{xi.label} lies in the resolution-{sample.T} neighbourhood of {minus.label}")
    table = {}
    good_from = 0
    for xi in sample.rays:
        row = []
        for n in range(n_max + 1):
            row.append(sample.product(xi.translate(g ** n), plus))
        table[xi.label] = row
        last_bad = max((n for n, v in enumerate(row) if v < sample.T), default=-1)
        good_from = max(good_from, last_bad + 1)
    n0 = good_from if good_from <= n_max else None
    esc = [lab for lab, row in table.items() if row[-1] < sample.T]
    return NorthSouthReport(n0, sample.T, n_max, table, esc)


# -- extreme proximality and density ---------------------------------------------------

def extreme_proximality_probe(F: BoundarySample, target: Ray, T: int | None = None, depth: int = 2, n_max: int = 12) -> Isometry:
    """Some g with g.F inside the resolution-T neighbourhood of ``target``.

    Candidates are conjugated loxodromics whose attractor is near the target
    and whose repeller avoids F; the power is the north-south n0.
    """
    T = F.T if T is None else T
    sample = BoundarySample(list(F.rays), T, F.reach)
    act = target.action
    if all(sample.near(xi, target) for xi in sample.rays):
        return act.identity()
    for h in conjugate_candidates(act, depth):
        if not sample.near(Ray.attractor(h), target):
            continue
        try:
            rep = north_south_probe(h, sample, n_max)
        except PreconditionError:
            continue
        if rep.n0 is None:
            continue
        for n in range(max(rep.n0, 1), n_max + 1):
            g = h ** n
            if all(sample.near(xi.translate(g), target) for xi in sample.rays):
                return g
    raise SearchExhaustedError(f"no conjugated loxodromic up to depth {depth} moves F into the target neighbourhood")


def _template_seeds(action, rays):
    """Elements w read off rays of the form (w)^n or (w)^-n with no left translate."""
    out = []
    G = action.group
    for r in rays:
        t = r.template
        if r.left != G.identity or not t.startswith("("):
            continue
        for suffix, sign in ((")^n", 1), (")^-n", -1)):
            if t.endswith(suffix):
                el = G.parse(t[1:-len(suffix)])
                out.append(Isometry(action, el if sign > 0 else G.inv(el)))
    return out


def fixed_pair_density_probe(targets, T: int = 3, depth: int = 2, n_max: int = 8, reach: int | None = None) -> Isometry:
    """Loxodromic g with <g^+, target1>_o >= T and <g^-, target2>_o >= T.

    Single candidates (elements named by the targets, then conjugated
    generators) are tried first; otherwise g = h^n k^n for the best-aimed h, k.
    """
    t1, t2 = targets
    act = t1.action
    s = BoundarySample([t1], T, reach or 4 * T + 8)
    if s.near(t1, t2):
        raise PreconditionError("targets must be distinct at the resolution")
    seeds = [h for h in _template_seeds(act, targets) if classify(h).kind == "loxodromic"]
    cands = list(conjugate_candidates(act, depth))
    for h in seeds + cands:
        if s.near(Ray.attractor(h), t1) and s.near(Ray.repeller(h), t2):
            return h
    key = act.group.word_key
    H = sorted(cands, key=lambda h: (-s.product(Ray.attractor(h), t1), key(h.element)))
    K = sorted(cands, key=lambda k: (-s.product(Ray.repeller(k), t2), key(k.element)))
    for h in H[:4]:
        for k in K[:4]:
            if h == k:
                continue
            for n in range(1, n_max + 1):
                g = compose_loxodromic(h, k, n).element
                if s.near(Ray.attractor(g), t1) and s.near(Ray.repeller(g), t2):
                    return g
    raise SearchExhaustedError("no h^n k^n reaches both targets")


# -- Myrberg rays -------------------------------------------------------------------

@dataclass
class MyrbergReport:
    word: str
    factors: list  # (h_i, f_i, 2 n_i)
    segments: list  # fellow-travel lengths, one per f-block
    increasing: bool
    endpoint: object = field(repr=False, default=None)
    guard_points: list = field(repr=False, default_factory=list)
    sequence: object = field(repr=False, default=None)


def myrberg_ray(action, omega, L, F=DEFAULT_FAMILY, R: int = 1) -> MyrbergReport:
    """Prefix W = prod h_i f_i^(2 n_i) with f_i from the extension lemma.

    For each block the report measures diam([o, W o] n N_R(g_i Ax(f_i))),
    g_i = h_1 f_1^(2n_1) ... h_i, where [o, W o] is a geodesic.
    """
    G = action.group
    Fam = [action.isometry(f) for f in F]
    Ls = [action.isometry(h) for h in L]
    omega = list(omega)
    if not omega:
        o = action.basepoint
        return MyrbergReport("e", [], [], True, o, [], Ray.of(action, "e^n"))
    if not Ls:
        raise LabError("need at least one loxodromic in L")
    hs = [Ls[i % len(Ls)] for i in range(len(omega))]
    factors, pieces = [], []
    for i, n in enumerate(omega):
        h = hs[i]
        nxt = hs[i + 1] if i + 1 < len(omega) else hs[i]
        f = extension_choice(Fam, h, nxt).f
        factors.append((h.word, f.word, 2 * n))
        pieces.append(h.element)
        pieces.extend([f.element] * (2 * n))
    W = G.identity
    for p in pieces:
        W = G.mul(W, p)
    o = action.basepoint
    p = action.orbit_point(W)
    geo = action.geodesic(o, p)
    segs, guards = [], []
    prefix = G.identity
    for (hw, fw, twice_n), h in zip(factors, hs):
        prefix = G.mul(prefix, h.element)
        f = action.isometry(fw)
        ax = quasi_axis(f, (-2, twice_n + 2)).translate(Isometry(action, prefix))
        near = [v for v in geo if min(action.dist(v, a) for a in ax.vertices) <= R]
        d = max((action.dist(a, b) for a in near for b in near), default=0)
        segs.append(d)
        if near:
            guards.append(near[len(near) // 2])
        prefix = G.mul(prefix, G.power(f.element, twice_n))
    inc = all(b > a for a, b in zip(segs, segs[1:]))
    word = G.format(W)
    seq = _prefix_sequence(action, pieces, word)
    return MyrbergReport(word, factors, segs, inc, p, guards, seq)


def _prefix_sequence(action, pieces, word):
    from .horoboundary import Sequence

    G = action.group
    pts = [action.basepoint]
    x = G.identity
    for p in pieces:
        x = G.mul(x, p)
        pts.append(action.orbit_point(x))

    def at(n):
        return pts[min(n, len(pts) - 1)]

    return Sequence(at, word)


# -- free semigroups and P_nai ------------------------------------------------------------

@dataclass
class SemigroupCertificate:
    f: Isometry
    tau: int
    power: int
    generators: list  # words of a f
    L: int
    products: int  # number of distinct products of <= L factors
    comparisons: int


def _axis_tau(a: Isometry, f: Isometry, i_range=(-4, 4)) -> int:
    ax = quasi_axis(f, i_range)
    act = f.action
    moved = [act.act(a.element, v) for v in ax.vertices]
    return projection_diameter(act, moved, ax.vertices)


def find_pingpong_element(A, depth: int = 2, tau_max: int = 2, i_range=(-4, 4)) -> tuple[Isometry, int]:
    """First conjugated loxodromic f (breadth-first) with diam pi_Ax(f)(a Ax(f)) <= tau_max for a in A."""
    A = list(A)
    act = A[0].action
    axis_len = None
    for f in conjugate_candidates(act, depth):
        ax = quasi_axis(f, i_range)
        axis_len = len(ax)
        taus = [_axis_tau(a, f, i_range) for a in A]
        if max(taus) <= tau_max and max(taus) < axis_len // 2:
            return f, max(taus)
    raise SearchExhaustedError(f"no conjugated loxodromic up to depth {depth} has bounded projections for A")


def free_semigroup_certificate(A, depth: int = 2, L: int = 10, tau_max: int = 2) -> SemigroupCertificate:
    """f with A f generating a free semigroup, certified by distinctness of all products of <= L factors."""
    A = [a for a in A]
    if not A or any(a.is_identity for a in A):
        raise PreconditionError("A must be a nonempty set of nontrivial elements")
    act = A[0].action
    G = act.group
    f, tau = find_pingpong_element(A, depth, tau_max)
    p = 1
    while act.dist(act.basepoint, act.orbit_point(G.power(f.element, p))) < 2 * tau + 2:
        p += 1
    fp = f ** p
    gens = [(a * fp).element for a in A]
    seen = {G.identity: ()}
    layer = [(G.identity, ())]
    comparisons = 0
    for _ in range(L):
        nxt = []
        for x, w in layer:
            for i, s in enumerate(gens):
                y = G.mul(x, s)
                comparisons += 1
                if y in seen:
                    raise RelationFound("two products of A f coincide", witness=(seen[y], w + (i,)))
                seen[y] = w + (i,)
                nxt.append((y, w + (i,)))
        layer = nxt
    return SemigroupCertificate(fp, tau, p, [G.format(g) for g in gens], L, len(seen), comparisons)


@dataclass
class PnaiCertificate:
    a: str
    f: str
    L: int
    words: int  # nontrivial free-product words checked
    tau: int | None


def pnai_certificate(a: Isometry, f: Isometry, L: int = 8, tau: int | None = None) -> PnaiCertificate:
    """No nontrivial reduced word of <a> * <f> of length <= L evaluates to the identity.

    Syllables of a run over nonzero exponents modulo its order; length is the
    sum of the syllable costs.
    """
    G = a.group
    oa, of = a.order(), f.order()

    def exps(order):
        if order:
            return [k for k in range(1, order)], (lambda k: min(k, order - k))
        return [k for r in range(1, L + 1) for k in (r, -r)], abs

    ea, ca = exps(oa)
    ef, cf = exps(of)
    count = 0
    powers = {}

    def pw(x, k):
        key = (id(x), k)
        if key not in powers:
            powers[key] = G.power(x.element, k)
        return powers[key]

    # words are generated in order of length so the first relation found is a shortest one
    heap = [(0, 0, G.identity, "", None)]
    tick = 1
    while heap:
        ln, _, el, word, last = heapq.heappop(heap)
        for which, es, cost, x, nm in ((0, ea, ca, a, "a"), (1, ef, cf, f, "f")):
            if which == last:
                continue
            for k in es:
                c = cost(k)
                if ln + c > L:
                    continue
                y = G.mul(el, pw(x, k))
                w = f"{word}{nm}^{k}"
                count += 1
                if y == G.identity:
                    raise RelationFound(f"{w} is trivial", witness=w)
                heapq.heappush(heap, (ln + c, tick, y, w, which))
                tick += 1
    return PnaiCertificate(a.word, f.word, L, count, tau)


def bounded_axis_probe(a: Isometry, h: Isometry, n_range=range(-3, 4), T: int = 3, i_range=(-4, 4)) -> int:
    """max over n != 0 of diam pi_Ax(h)(a^n Ax(h)); the fixed points of h must move off themselves."""
    s = BoundarySample([Ray.attractor(h), Ray.repeller(h)], T)
    for r in (Ray.attractor(h), Ray.repeller(h)):
        moved = r.translate(a)
        for q in (Ray.attractor(h), Ray.repeller(h)):
            if s.near(moved, q):
                raise FixedPointsCollideError(f"{a.word}.{r.label} is near {q.label}")
    ax = quasi_axis(h, i_range)
    act = h.action
    tau = 0
    for n in n_range:
        if n == 0:
            continue
        an = a ** n
        if an.is_identity:
            continue
        moved = [act.act(an.element, v) for v in ax.vertices]
        tau = max(tau, projection_diameter(act, moved, ax.vertices))
    return tau


# -- paradoxical towers -------------------------------------------------------------------

@dataclass
class TowerCertificate:
    D: list
    f0: str
    F: list
    g: list  # g_i = f_i^-1 f0^-1
    sizes: list  # |A_i| on the checked ball
    radius: int
    disjoint: bool
    covering: bool
    witness: object = None

    @property
    def passed(self) -> bool:
        return self.disjoint and self.covering


def paradoxical_towers(D, F=DEFAULT_FAMILY, radius: int = 6, depth: int = 2, max_power: int = 8) -> TowerCertificate:
    """A_i = {f0 f_b b : extension choice gives f_b = f_i}, g_i = f_i^-1 f0^-1, checked on ball(radius).

    f0 comes from the ping-pong search for D u D^-1 D; its power is raised
    until both conditions hold.
    """
    D = list(D)
    if not D or any(d.is_identity for d in D):
        raise PreconditionError("D must consist of nontrivial elements")
    act = D[0].action
    G = act.group
    Fam = [act.isometry(f) for f in F]
    ext = {d.inverse() * e for d in D for e in D} | set(D)
    ext = [x for x in ext if not x.is_identity]
    f, tau = find_pingpong_element(ext, depth)
    ball = G.ball(radius)
    last = None
    for p in range(1, max_power + 1):
        f0 = f ** p
        cache = _ExtensionCache(Fam, f0)
        assign = {}
        for b in ball:
            assign[b] = cache.choose(Isometry(act, b))
        A = {i: [G.mul(G.mul(f0.element, Fam[i].element), b) for b, j in assign.items() if j == i] for i in range(len(Fam))}
        gs = [(Fam[i].inverse() * f0.inverse()) for i in range(len(Fam))]
        owner = {}
        disjoint, witness = True, None
        for d in D:
            for i, Ai in A.items():
                for x in Ai:
                    y = G.mul(d.element, x)
                    if y in owner and owner[y] != (d.word, i):
                        disjoint = False
                        witness = (G.format(y), owner[y], (d.word, i))
                        break
                    owner[y] = (d.word, i)
                if not disjoint:
                    break
            if not disjoint:
                break
        covered = set()
        for i, Ai in A.items():
            covered.update(G.mul(gs[i].element, x) for x in Ai)
        covering = all(b in covered for b in ball)
        last = TowerCertificate([d.word for d in D], f0.word, [x.word for x in Fam], [g.word for g in gs],
                                [len(A[i]) for i in range(len(Fam))], radius, disjoint, covering, witness)
        if last.passed:
            return last
    return last


class _ExtensionCache:
    """extension_choice with the three axes and the g-side projections computed once."""

    def __init__(self, F, g):
        self.F = F
        self.g = g
        act = g.action
        self.act = act
        o = act.basepoint
        self.axes = [quasi_axis(f).vertices for f in F]
        seg_g = act.geodesic(o, act.orbit_point(g.inverse().element))
        self.gscore = [projection_diameter(act, seg_g, ax) for ax in self.axes]
        self.order = [f.group.word_key(f.element) for f in F]

    def choose(self, h: Isometry) -> int:
        act = self.act
        o = act.basepoint
        seg_h = act.geodesic(o, act.orbit_point(h.element))
        scored = sorted(range(len(self.F)),
                        key=lambda i: (max(self.gscore[i], projection_diameter(act, seg_h, self.axes[i])), self.order[i]))
        from .actions import DEFAULT_C, measured_constant

        for i in scored:
            path = label_path(act, [self.g.element, self.F[i].element, h.element])
            if measured_constant(path, act.dist) <= DEFAULT_C:
                return i
        raise VerificationFailure(f"no f in F makes {self.g.word}.f.{h.word} a quasi-geodesic")


# -- faithfulness and tamedness -------------------------------------------------------------

def strongly_faithful_probe(F, sample: BoundarySample, radius: int = 3):
    """First sampled ray moved by every f in F (the patches of xi and f xi differ on the ball)."""
    from .graph import build_ball
    from .horoboundary import finite_difference, limit_along_sequence

    F = list(F)
    if not sample.rays:
        raise SearchExhaustedError("empty sample")
    if not F:
        return sample.rays[0]
    act = sample.rays[0].action
    ball = build_ball(act, radius)
    for xi in sample.rays:
        p = limit_along_sequence(ball, xi)
        if all(finite_difference(p, limit_along_sequence(ball, xi.translate(f))).lower_bound > 0 for f in F):
            return xi
    raise SearchExhaustedError("no sampled ray is moved by every element of F")


@dataclass
class TamednessReport:
    sampled: int
    pairs: int
    disjoint: int
    equal: int
    counterexamples: list

    @property
    def passed(self) -> bool:
        return not self.counterexamples


def normal_closure_sample(b: Isometry, c: Isometry, max_length: int = 4, conj_length: int = 2) -> list[Isometry]:
    """Loxodromics of N(b, c) of word length <= max_length, breadth-first.

    Generated from conjugates w x w^-1 (x in b, c and inverses, |w| <= conj_length)
    and their pairwise products.
    """
    act = b.action
    G = act.group
    base, seen = [], set()
    for w in G.ball(conj_length):
        for x in (b, c, b.inverse(), c.inverse()):
            el = G.mul(G.mul(w, x.element), G.inv(w))
            if el not in seen:
                seen.add(el)
                base.append(el)
    out = list(base)
    for x in base:
        for y in base:
            el = G.mul(x, y)
            if el not in seen:
                seen.add(el)
                out.append(el)
    out = [el for el in out if el != G.identity and G.length(el) <= max_length]
    out.sort(key=G.word_key)
    isos = [Isometry(act, el) for el in out]
    return [g for g in isos if classify(g).kind == "loxodromic"]


def fixed_pair_relation(g: Isometry, f: Isometry, T: int = 8, sample: BoundarySample | None = None) -> str:
    """'disjoint', 'equal' (same pair, either orientation) or 'intermediate' at resolution T."""
    s = sample or BoundarySample([], T, 2 * T + 8)
    gp, gm = Ray.attractor(g), Ray.repeller(g)
    fp, fm = Ray.attractor(f), Ray.repeller(f)
    hits = [s.near(x, y) for x in (gp, gm) for y in (fp, fm)]
    if not any(hits):
        return "disjoint"
    if (hits[0] and hits[3]) or (hits[1] and hits[2]):
        return "equal"
    return "intermediate"


def tamedness_probe(b: Isometry, c: Isometry, max_length: int = 4, T: int = 8) -> TamednessReport:
    """Sampled loxodromics of N(b, c): each pair has disjoint or identical fixed-point pairs.

    Two fixed points are identified when their Gromov product is >= T.
    """
    sample = normal_closure_sample(b, c, max_length)
    s = BoundarySample([], T, 2 * T + 8)
    dis = eq = 0
    bad = []
    for i in range(len(sample)):
        for j in range(i + 1, len(sample)):
            rel = fixed_pair_relation(sample[i], sample[j], T, s)
            if rel == "disjoint":
                dis += 1
            elif rel == "equal":
                eq += 1
            else:
                bad.append((sample[i].word, sample[j].word))
    n = len(sample)
    return TamednessReport(n, n * (n - 1) // 2, dis, eq, bad)
