"""Isometries as words: classification, quasi-axes, projections, extension choices."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np

from .errors import NotLoxodromicError, OutOfBallError, ResourceLimitError, VerificationFailure
from .graph import GromovProduct, build_ball
from .groups import Isometry
from .rays import Ray

LOXODROMIC_THRESHOLD = Fraction(1, 2)
DEFAULT_C = Fraction(2)


def apply(iso: Isometry, v, ball=None):
    """Image of a vertex; with ``ball`` given, the image must lie in it."""
    act = iso.action
    if isinstance(v, str):
        v = act.parse_vertex(v)
    w = act.act(iso.element, v)
    if ball is not None and not ball.contains(w):
        raise OutOfBallError(f"{act.label(w)} = {iso.word}.{act.label(v)} is outside the ball of radius {ball.radius}")
    return w


def _orbit_distance(iso: Isometry, n: int) -> int:
    act = iso.action
    return act.dist(act.basepoint, act.orbit_point(iso.group.power(iso.element, n)))


def stable_translation_length(iso: Isometry, N: int, ball=None) -> Fraction:
    """d(o, g^N o) / N as an exact rational."""
    if N <= 0:
        raise ValueError("N must be positive")
    act = iso.action
    if ball is not None:
        apply(iso ** N, act.basepoint, ball)
    return Fraction(_orbit_distance(iso, N), N)


def max_power_in_radius(iso: Isometry, radius: int, cap: int = 256) -> int:
    """Largest N <= cap with g^k o inside the radius for all k <= N."""
    N = 0
    while N < cap and _orbit_distance(iso, N + 1) <= radius:
        N += 1
    return N


@dataclass(frozen=True)
class Classification:
    kind: str  # loxodromic | elliptic | undetermined
    N: int
    translation: Fraction
    reason: str


def classify(iso: Isometry, N: int | None = None, ball=None, radius: int = 24) -> Classification:
    """Tri-state type of an isometry from finite orbit data.

    Elliptic when the orbit of o returns to o within N steps or ``iso`` fixes a
    vertex of ``ball`` (bounded orbits either way); loxodromic when
    d(o, g^N o)/N >= 1/2; otherwise undetermined.
    """
    act = iso.action
    if N is None:
        N = max(1, max_power_in_radius(iso, ball.radius if ball is not None else radius))
    o = act.basepoint
    g = iso.group
    x = g.identity
    for k in range(1, N + 1):
        x = g.mul(x, iso.element)
        if act.orbit_point(x) == o:
            return Classification("elliptic", N, Fraction(0), f"order divides {k}")
    if ball is not None:
        for v in ball.vertices:
            if act.act(iso.element, v) == v:
                return Classification("elliptic", N, stable_translation_length(iso, N), f"fixes {act.label(v)}")
    t = stable_translation_length(iso, N)
    if t >= LOXODROMIC_THRESHOLD:
        return Classification("loxodromic", N, t, f"d(o,g^{N}o)/{N} = {t}")
    return Classification("undetermined", N, t, f"d(o,g^{N}o)/{N} = {t} below threshold")


def is_loxodromic(iso: Isometry, N: int = 16) -> bool:
    return classify(iso, N).kind == "loxodromic"


def measured_constant(path, dist) -> Fraction:
    """Least c in (1/100)Z, c >= 1, with |i-j|/c - c <= d(p_i, p_j) <= c|i-j| + c for all i<j."""
    n = len(path)
    need = 100  # c = need/100
    if n < 2:
        return Fraction(1)
    D = np.array([[dist(path[i], path[j]) for j in range(n)] for i in range(n)], dtype=np.int64)
    ii, jj = np.triu_indices(n, k=1)
    k = (jj - ii).astype(np.int64)
    d = D[ii, jj]
    # lower bound k/c - c <= d with c = m/100:  10000 k <= m^2 + 100 d m
    for kk, dd in {(int(a), int(b)) for a, b in zip(k, d)}:
        m = max(need, (-100 * dd + isqrt(10000 * dd * dd + 40000 * kk)) // 2 - 1)
        while m * m + 100 * dd * m < 10000 * kk:
            m += 1
        need = max(need, m)
    # upper bound d <= c k + c
    for kk, dd in {(int(a), int(b)) for a, b in zip(k, d)}:
        while 100 * dd > need * (kk + 1):
            need += 1
    return Fraction(need, 100)


@dataclass
class QuasiAxis:
    owner: Isometry
    vertices: list  # ordered path
    c: Fraction
    i_range: tuple
    marks: dict = field(default_factory=dict)  # i -> position of g^i b in the path
    base: object = None

    def __len__(self):
        return len(self.vertices)

    @property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def labels(self):
        act = self.owner.action
        return [act.label(v) for v in self.vertices]

    def translate(self, g: Isometry) -> "QuasiAxis":
        act = self.owner.action
        return QuasiAxis(g * self.owner * g.inverse(), [act.act(g.element, v) for v in self.vertices],
                         self.c, self.i_range, dict(self.marks), act.act(g.element, self.base))


def minimal_displacement_vertex(iso: Isometry, radius: int = 8):
    """Vertex of the ball minimising d(v, gv), ties broken by ball order."""
    act = iso.action
    best, bv = None, None
    for v in build_ball(act, radius).vertices:
        d = act.dist(v, act.act(iso.element, v))
        if best is None or d < best:
            best, bv = d, v
    return bv


def quasi_axis(iso: Isometry, i_range=(-3, 3), base="basepoint", check: bool = True, ball=None) -> QuasiAxis:
    """Concatenation of g^i [b, gb] for i in [lo, hi), b the basepoint by default.

    ``base="minimal"`` starts from a vertex of least displacement instead,
    which straightens the axis of conjugates such as b a b^-1.
    """
    act = iso.action
    if check:
        cls = classify(iso)
        if cls.kind != "loxodromic":
            raise NotLoxodromicError(f"{iso.word} is {cls.kind} ({cls.reason})")
    lo, hi = i_range
    if hi <= lo:
        raise ValueError("empty i_range")
    if base == "basepoint":
        b = act.basepoint
    elif base == "minimal":
        b = minimal_displacement_vertex(iso)
    else:
        b = act.parse_vertex(base) if isinstance(base, str) else base
    G = iso.group
    seg = act.geodesic(b, act.act(iso.element, b))
    path = []
    marks = {}
    for i in range(lo, hi):
        gi = G.power(iso.element, i)
        piece = [act.act(gi, v) for v in seg]
        if path:
            piece = piece[1:]
        marks[i] = len(path) if not path else len(path) - 1
        path.extend(piece)
    marks[hi] = len(path) - 1
    if ball is not None:
        for v in path:
            if not ball.contains(v):
                raise OutOfBallError(f"axis of {iso.word} leaves the ball at {act.label(v)}")
    c = measured_constant(path, act.dist)
    return QuasiAxis(iso, path, c, (lo, hi), marks, b)


def nearest_points(act, x, target) -> list:
    """All vertices of ``target`` (a finite vertex list) closest to x."""
    ds = [act.dist(x, t) for t in target]
    m = min(ds)
    return [t for t, d in zip(target, ds) if d == m]


def projection(act, source, target) -> list:
    """Union of nearest-point projections of every vertex of ``source`` to ``target``, in target order."""
    hit = set()
    for x in source:
        hit.update(nearest_points(act, x, target))
    return [t for t in target if t in hit]


def diameter(act, pts) -> int:
    pts = list(pts)
    return max((act.dist(p, q) for i, p in enumerate(pts) for q in pts[i + 1:]), default=0)


def projection_diameter(act, source, target) -> int:
    return diameter(act, projection(act, source, target))


def weakly_independent(f: Isometry, g: Isometry, tau: int, i_range=(-4, 4), base="basepoint") -> bool:
    """Both axes project to each other with diameter at most tau."""
    af = quasi_axis(f, i_range, base)
    ag = quasi_axis(g, i_range, base)
    act = f.action
    return (projection_diameter(act, af.vertices, ag.vertices) <= tau
            and projection_diameter(act, ag.vertices, af.vertices) <= tau)


def label_path(act, elements) -> list:
    """Path labelled by a product of elements: [o, x1 o] x1[o, x2 o] ...; joints not repeated."""
    G = act.group
    o = act.basepoint
    path = [o]
    prefix = G.identity
    for x in elements:
        seg = act.geodesic(o, act.orbit_point(x))
        path.extend(act.act(prefix, v) for v in seg[1:])
        prefix = G.mul(prefix, x)
    return path


@dataclass
class ExtensionChoice:
    f: Isometry
    c: Fraction  # measured constant of the labelled path g.f.h
    scores: dict  # word -> projection score
    path: list


DEFAULT_FAMILY = ("a", "baB", "bbaBB")


def extension_choice(F, g: Isometry, h: Isometry, c=DEFAULT_C, i_range=(-3, 3), base="basepoint") -> ExtensionChoice:
    """Pick f in F so that the path labelled g.f.h is a c-quasi-geodesic.

    Candidates are ranked by max(diam pi_Ax(f)[o, g^-1 o], diam pi_Ax(f)[o, h o]);
    ties go to the shortlex-least word.  The first candidate whose labelled
    path passes the measured-constant check is returned.
    """
    F = list(F)
    act = g.action
    o = act.basepoint
    seg_g = act.geodesic(o, act.orbit_point(g.inverse().element))
    seg_h = act.geodesic(o, act.orbit_point(h.element))
    scored = []
    for f in F:
        ax = quasi_axis(f, i_range, base).vertices
        s = max(projection_diameter(act, seg_g, ax), projection_diameter(act, seg_h, ax))
        scored.append((s, f.group.word_key(f.element), f))
    scored.sort(key=lambda t: (t[0], t[1]))
    scores = {f.word: s for s, _, f in scored}
    tried = []
    for s, _, f in scored:
        path = label_path(act, [g.element, f.element, h.element])
        cm = measured_constant(path, act.dist)
        if cm <= Fraction(c):
            return ExtensionChoice(f, cm, scores, path)
        tried.append((f.word, str(cm)))
    raise VerificationFailure(f"no f in F makes {g.word}.f.{h.word} a {c}-quasi-geodesic", witness=tried)


@dataclass
class CompositionReport:
    element: Isometry
    loxodromic: bool
    translation: Fraction
    attractor_product: GromovProduct  # <(h^n k^n)^+, h^+>_o
    repeller_product: GromovProduct  # <(h^n k^n)^-, k^->_o
    reach: int


def compose_loxodromic(h: Isometry, k: Isometry, n: int, reach: int | None = None) -> CompositionReport:
    """h^n k^n with its type and how close its fixed points sit to h^+ and k^-."""
    from .rays import ray_product2

    g = (h ** n) * (k ** n)
    cls = classify(g)
    if reach is None:
        reach = 8 * max(1, n) * max(1, h.length() + k.length())
    ap = ray_product2(Ray.attractor(g), Ray.attractor(h), reach)
    rp = ray_product2(Ray.repeller(g), Ray.repeller(k), reach)
    return CompositionReport(g, cls.kind == "loxodromic", cls.translation, GromovProduct(ap), GromovProduct(rp), reach)


@dataclass
class AcylindricityReport:
    N: int
    witness: tuple  # (x, y) labels attaining N
    r: int
    L: int
    M: int
    pairs_checked: int


def acylindricity_probe(action, r: int, L: int, M: int, max_vertices: int = 250_000) -> AcylindricityReport:
    """max over x, y in ball(M), d(x,y) > L, of #{g in ball(M): d(x,gx) <= r, d(y,gy) <= r}."""
    ball = build_ball(action, M, max_vertices)
    G = action.group
    elems = G.ball(M) if action.family != "custom" else [g for g in G.elements if G.length(g) <= M]
    if len(elems) > max_vertices:
        raise ResourceLimitError(f"{len(elems)} group elements exceed {max_vertices}")
    elem_set = set(elems)
    n = ball.n
    # movers[i] = elements of ball(M) moving vertex i by at most r
    movers = []
    if action.family in ("cayley",) and action.basepoint == G.identity:
        small = [u for u in G.ball(r)]
        for x in ball.vertices:
            xi = G.inv(x)
            s = set()
            for u in small:
                gx = G.mul(G.mul(x, u), xi)
                if gx in elem_set:
                    s.add(gx)
            movers.append(s)
    else:
        for x in ball.vertices:
            movers.append({g for g in elems if action.dist(x, action.act(g, x)) <= r})
    ident = G.identity
    checked = 0
    by_elem: dict = {}
    for i, s in enumerate(movers):
        for g in s:
            if g != ident:
                by_elem.setdefault(g, []).append(i)
    # every pair shares the identity; only pairs sharing some g != 1 can beat 1
    counts: dict = {}
    for g, idxs in by_elem.items():
        if len(idxs) < 2:
            continue
        arr = np.array(idxs)
        for a in range(len(arr)):
            ra = ball.row(int(arr[a]))
            far = arr[a + 1:][ra[arr[a + 1:]] > L]
            ia = int(arr[a])
            for b in far.tolist():
                key = (ia, b)
                counts[key] = counts.get(key, 0) + 1
    base_count = 1 if ident in elem_set else 0
    best, witness_idx = base_count, None
    for (i, j), c in sorted(counts.items()):
        checked += 1
        if c + base_count > best:
            best, witness_idx = c + base_count, (i, j)
    if witness_idx is None:
        far = np.flatnonzero(ball.base_row > L)
        if len(far):
            witness_idx = (ball.idx(action.basepoint), int(far[0]))
    witness = tuple(ball.labels[i] for i in witness_idx) if witness_idx else ()
    return AcylindricityReport(best, witness, r, L, M, checked)


def kernel_sample(action, rays, depth: int, radius: int = 3, tol: int = 0) -> list[Isometry]:
    """Elements of ball(depth) fixing every sampled ray up to finite difference ``tol``.

    ``g xi`` and ``xi`` are compared through their Busemann values on the
    radius-``radius`` ball, each read off a point far enough along the ray
    for the values to have stabilised.
    """
    G = action.group
    if action.family == "custom":
        elems = [g for g in G.elements if G.length(g) <= depth]
    else:
        elems = G.ball(depth)
    rays = list(rays)
    if not rays:
        return [Isometry(action, g) for g in elems]
    small = build_ball(action, radius).vertices
    o = action.basepoint
    reach = 2 * (radius + 2 * depth) + 4
    far = []
    for xi in rays:
        p = xi.point(xi.depth_for(reach))
        base = np.array([action.dist(x, p) for x in small]) - action.dist(o, p)
        far.append((xi, base))
    out = []
    for g in elems:
        ok = True
        for xi, base in far:
            q = xi.translate(g).point(xi.depth_for(reach))
            dq = action.dist(o, q)
            for x, bx in zip(small, base):
                if abs(action.dist(x, q) - dq - bx) > tol:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(Isometry(action, g))
    return out
