"""Horofunction patches on finite balls and the probes built from them.

A patch is the restriction of ``x -> d(x, y) - d(o, y)`` (or of a pointwise
limit of such functions) to the vertices of one ball.  Values are exact
integers computed from ambient distances; nothing is extrapolated past the
ball.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    FixedClassError,
    InconclusiveError,
    LabError,
    MismatchedBallError,
    NonConvergenceError,
    UncertifiedRegionError,
    VerificationFailure,
)
from .graph import guard_in_space
from .rays import Ray

DEFAULT_MARGIN = 2


# -- sequences ---------------------------------------------------------------

@dataclass(frozen=True)
class Sequence:
    """An indexed family of vertices y_0, y_1, ... with a printable name."""

    at: Callable[[int], object] = field(repr=False)
    name: str
    start: int = 0


def as_sequence(action, seq) -> Sequence:
    """Accept a word template, a Ray, a callable, a vertex list or a Sequence."""
    if isinstance(seq, Sequence):
        return seq
    if isinstance(seq, Ray):
        return Sequence(seq.point, seq.label)
    if isinstance(seq, str):
        G = action.group
        return Sequence(lambda n, t=seq: action.orbit_point(G.parse(t, n)), seq)
    if callable(seq):
        return Sequence(seq, getattr(seq, "__name__", "sequence"))
    pts = [action.parse_vertex(p) if isinstance(p, str) else p for p in seq]
    if not pts:
        raise LabError("empty sequence")

    def at(n, pts=pts):
        return pts[min(n, len(pts) - 1)]

    return Sequence(at, "[" + ",".join(action.label(p) for p in pts[:4]) + (",...]" if len(pts) > 4 else "]"))


def constant_sequence(action, y) -> Sequence:
    y = action.parse_vertex(y) if isinstance(y, str) else y
    return Sequence(lambda n: y, f"const({action.label(y)})")


# -- patches -------------------------------------------------------------------

@dataclass(frozen=True)
class StabilizationCertificate:
    """index[i]: first sequence index from which the value at vertex i stays constant up to the horizon."""

    index: np.ndarray = field(repr=False)
    horizon: int
    start: int

    @property
    def max_index(self) -> int:
        return int(self.index.max()) if len(self.index) else self.start


class HorofunctionPatch:
    """Integer values of a horofunction on the vertices of a ball.

    Construction asserts the three invariants: zero at the basepoint,
    integer values, and the 1-Lipschitz bound.  The bound is checked on ball
    edges, which implies it for all pairs since ball distances are path
    distances in the ball.
    """

    __slots__ = ("ball", "values", "basepoint", "provenance", "certificate", "sequence")

    def __init__(self, ball, values, basepoint=None, provenance=None, certificate=None, sequence=None):
        vals = np.asarray(values)
        if vals.shape != (ball.n,):
            raise LabError(f"patch needs {ball.n} values, got shape {vals.shape}")
        if not np.issubdtype(vals.dtype, np.integer):
            if not np.all(np.equal(np.mod(vals, 1), 0)):
                raise VerificationFailure("horofunction values must be integers")
        vals = vals.astype(np.int64)
        vals.setflags(write=False)
        self.ball = ball
        self.values = vals
        self.basepoint = ball.basepoint if basepoint is None else basepoint
        self.provenance = dict(provenance or {})
        self.certificate = certificate
        self.sequence = sequence
        self._check()

    def _check(self):
        b = self.ball
        if b.contains(self.basepoint) and self.values[b.idx(self.basepoint)] != 0:
            raise VerificationFailure("patch does not vanish at its basepoint", witness=b.label(self.basepoint))
        E = b.edge_array
        if len(E):
            jump = np.abs(self.values[E[:, 0]] - self.values[E[:, 1]])
            bad = np.flatnonzero(jump > 1)
            if len(bad):
                i, j = E[bad[0]]
                raise VerificationFailure("patch is not 1-Lipschitz", witness=(b.labels[i], b.labels[j]))

    def __repr__(self):
        return f"HorofunctionPatch({self.label}, radius={self.ball.radius})"

    @property
    def label(self) -> str:
        p = self.provenance
        if p.get("kind") == "point":
            return f"b_{p['point']}"
        return f"lim b_({p.get('sequence', '?')})"

    def __getitem__(self, v) -> int:
        return int(self.values[self.ball.idx(v)])

    value = __getitem__

    def as_dict(self) -> dict:
        return dict(zip(self.ball.labels, self.values.tolist()))

    def argmin(self) -> list:
        m = self.values.min()
        return [self.ball.vertices[i] for i in np.flatnonzero(self.values == m)]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "value"])
            w.writerows(zip(self.ball.labels, self.values.tolist()))

    def agrees_with(self, other) -> bool:
        _same_domain(self, other)
        return bool(np.array_equal(self.values, other.values))


def _basepoint_offset(ball, y, basepoint):
    space = ball.space
    o = ball.basepoint if basepoint is None else basepoint
    return space.dist(o, y) if space is not None else ball.distance(o, y)


def point_values(ball, y, basepoint=None) -> np.ndarray:
    return ball.distances_to(y) - _basepoint_offset(ball, y, basepoint)


def horofunction_of_point(ball, y, basepoint=None) -> HorofunctionPatch:
    """b_y(x) = d(x, y) - d(o, y) on every vertex x of the ball."""
    if isinstance(y, str):
        y = ball.vertex(y) if ball.contains(y) else ball.space.parse_vertex(y)
    elif not ball.contains(y) and ball.space is None:
        ball.idx(y)
    vals = point_values(ball, y, basepoint)
    lab = ball.space.label(y) if ball.space is not None else str(y)
    seq = Sequence(lambda n: y, f"const({lab})")
    return HorofunctionPatch(ball, vals, basepoint, {"kind": "point", "point": lab}, None, seq)


def default_horizon(ball, seq: Sequence, reach: int | None = None) -> int:
    """Least index whose point is at distance >= reach (default 2R + 2), plus one.

    Bounded sequences (inside a coned-off coset, say) never get there; they
    are run for 4 * reach + 8 steps instead.
    """
    space = ball.space
    o = ball.basepoint
    reach = 2 * ball.radius + 2 if reach is None else reach
    cap = seq.start + 4 * reach + 8
    n = seq.start
    while space.dist(o, seq.at(n)) < reach:
        n += 1
        if n >= cap:
            return cap
    return n + 1


def limit_along_sequence(ball, seq, horizon: int | None = None, basepoint=None) -> HorofunctionPatch:
    """Pointwise limit of b_{y_n} on the ball, with a stabilization certificate.

    Every value must agree at the last two indices; the certificate holds, per
    vertex, the first index after which the value never changes again.
    """
    space = ball.space
    seq = as_sequence(space, seq)
    if horizon is None:
        horizon = default_horizon(ball, seq)
    if horizon <= seq.start:
        raise ValueError("horizon must exceed the first index")
    last = point_values(ball, seq.at(horizon), basepoint)
    stable_from = np.full(ball.n, horizon, dtype=np.int64)
    alive = np.ones(ball.n, dtype=bool)
    for n in range(horizon - 1, seq.start - 1, -1):
        vals = point_values(ball, seq.at(n), basepoint)
        alive &= vals == last
        stable_from[alive] = n
        if not alive.any():
            break
    bad = np.flatnonzero(stable_from >= horizon)
    if len(bad):
        raise NonConvergenceError(
            f"{len(bad)} values of lim b_({seq.name}) still move at horizon {horizon}",
            witness=[ball.labels[i] for i in bad[:8]],
        )
    cert = StabilizationCertificate(stable_from, horizon, seq.start)
    prov = {"kind": "limit", "sequence": seq.name, "horizon": horizon}
    return HorofunctionPatch(ball, last, basepoint, prov, cert, seq)


def busemann_patch(ball, ray: Ray | str, horizon: int | None = None) -> HorofunctionPatch:
    if isinstance(ray, str):
        ray = Ray.of(ball.space, ray)
    return limit_along_sequence(ball, ray, horizon)


def tail(patch: HorofunctionPatch) -> list:
    """Sequence members from the stabilization index to the horizon."""
    if patch.certificate is None:
        return [patch.sequence.at(0)]
    c = patch.certificate
    return [patch.sequence.at(n) for n in range(c.max_index, c.horizon + 1)]


# -- comparisons ---------------------------------------------------------------

@dataclass(frozen=True)
class FiniteDifferenceBound:
    lower_bound: int
    radius: int
    witness: str | None  # first vertex (ball order) attaining the bound


def _same_domain(p, q):
    if p.ball is not q.ball and p.ball.vertices != q.ball.vertices:
        raise MismatchedBallError("patches live on different balls")
    if p.basepoint != q.basepoint:
        raise MismatchedBallError("patches use different basepoints")


def finite_difference(p: HorofunctionPatch, q: HorofunctionPatch) -> FiniteDifferenceBound:
    """sup |p - q| over the ball, a lower bound for the sup-norm distance of the horofunctions."""
    _same_domain(p, q)
    diff = np.abs(p.values - q.values)
    if not len(diff):
        return FiniteDifferenceBound(0, p.ball.radius, None)
    i = int(np.argmax(diff))
    m = int(diff[i])
    return FiniteDifferenceBound(m, p.ball.radius, p.ball.labels[i] if m else None)


def translate_value(p: HorofunctionPatch, g, y) -> int:
    """(g . b)(y) = b(g^-1 y) - b(g^-1 o); both preimages must lie in the ball."""
    space = p.ball.space
    gi = space.group.inv(getattr(g, "element", g))
    a = space.act(gi, y)
    b = space.act(gi, p.basepoint)
    for v in (a, b):
        if not p.ball.contains(v):
            raise UncertifiedRegionError(f"{space.label(v)} is outside the ball of radius {p.ball.radius}")
    return p[a] - p[b]


# -- minimum map -------------------------------------------------------------

@dataclass(frozen=True)
class MinimumReport:
    kind: str  # finite-minimum | infinite-descent
    min_value: int
    min_set: tuple = ()  # vertex labels
    descent: tuple = ()  # (label, value) along a geodesic from o to the deepest vertex
    margin: int = DEFAULT_MARGIN


def local_minimum_map(p: HorofunctionPatch, m: int = DEFAULT_MARGIN) -> MinimumReport:
    """Minimum set of a patch, or a witness that the infimum runs off to -infinity.

    Finite when every minimiser sits at depth <= R - m.  Infinite descent when
    the minimum is <= -(R - m) and is reached past depth R - m.  Point patches
    are exact: b_y attains its minimum -d(o, y) only at y.
    """
    ball = p.ball
    R = ball.radius
    if m >= R and p.provenance.get("kind") != "point":
        raise ValueError("margin must be smaller than the radius")
    lv = ball.base_row
    mv = int(p.values.min())
    idx = np.flatnonzero(p.values == mv)
    labels = tuple(ball.labels[i] for i in idx)
    if p.provenance.get("kind") == "point":
        return MinimumReport("finite-minimum", mv, labels, (), m)
    deep = idx[lv[idx] > R - m]
    if not len(deep):
        return MinimumReport("finite-minimum", mv, labels, (), m)
    if mv <= -(R - m):
        far = ball.vertices[int(deep[0])]
        path = ball.geodesic(ball.basepoint, far)
        return MinimumReport("infinite-descent", mv, (), tuple((ball.label(v), p[v]) for v in path), m)
    raise InconclusiveError(f"minimum {mv} reached near the boundary of a radius-{R} ball but not below -{R - m}")


# -- dead ends -----------------------------------------------------------------

@dataclass(frozen=True)
class DeadEndReport:
    dead_end: bool
    isolated: bool  # no other ball vertex y has b_y(x) = -d(o, x)
    witness: str | None  # a vertex extending the geodesic [o, x], if any


def is_dead_end(ball, o, x) -> DeadEndReport:
    """Dead end test in the ambient graph plus the isolation certificate on the ball."""
    space = ball.space
    if isinstance(x, str):
        x = ball.vertex(x)
    if isinstance(o, str):
        o = ball.vertex(o)
    if not ball.contains(x):
        raise UncertifiedRegionError(f"{space.label(x)} is outside the ball")
    dead = not space.extends(o, x)
    ix = ball.idx(x)
    ro = ball.distances_to(o) if o != ball.basepoint else ball.base_row.astype(np.int64)
    rx = ball.row(ix).astype(np.int64)
    hit = np.flatnonzero((rx - ro == -int(ro[ix])) & (np.arange(ball.n) != ix))
    witness = ball.labels[int(hit[0])] if len(hit) else None
    return DeadEndReport(dead, not len(hit), witness)


# -- guard criteria ----------------------------------------------------------------

@dataclass(frozen=True)
class MinimalClassReport:
    holds: bool
    hypothesis: bool
    equal: bool
    counterexample: str | None
    guards: dict = field(default_factory=dict, repr=False)  # z label -> index n of the guard x_n


def minimal_class_probe(ball, xs, ys, horizon: int | None = None, zs=None) -> MinimalClassReport:
    """Guard hypothesis of the minimal-class criterion, then equality of the two limits.

    For each z some x_n different from z must lie on every geodesic from z to
    y_m for every m from the stabilization index of (y_m) to the horizon.
    """
    space = ball.space
    xs = as_sequence(space, xs)
    ys = as_sequence(space, ys)
    px = limit_along_sequence(ball, xs, horizon)
    py = limit_along_sequence(ball, ys, horizon)
    m0, hy = py.certificate.max_index, py.certificate.horizon
    hx = px.certificate.horizon
    ym = [ys.at(m) for m in range(m0, hy + 1)]
    zs = ball.vertices if zs is None else [ball.vertex(z) for z in zs]
    guards = {}
    xcache = [xs.at(n) for n in range(xs.start, hx + 1)]
    for z in zs:
        found = None
        for n, xn in enumerate(xcache, start=xs.start):
            if xn == z:
                continue
            if all(guard_in_space(space, xn, z, y) for y in ym):
                found = n
                break
        if found is None:
            lab = space.label(z)
            return MinimalClassReport(False, False, px.agrees_with(py), lab, guards)
        guards[space.label(z)] = found
    equal = px.agrees_with(py)
    return MinimalClassReport(equal, True, equal, None, guards)


@dataclass(frozen=True)
class AccumulationReport:
    converges: bool
    differences: tuple  # sup |p_n - b_v| per patch
    agreement_radius: tuple  # largest r with p_n = b_v on the r-ball, per patch


def agreement_radius(p: HorofunctionPatch, q: HorofunctionPatch) -> int:
    lv = p.ball.base_row
    bad = lv[p.values != q.values]
    return int(bad.min()) - 1 if len(bad) else p.ball.radius


def accumulation_probe(ball, v, patches) -> AccumulationReport:
    """Do the patches converge pointwise to b_v on the ball?  Judged by the last patch."""
    bv = horofunction_of_point(ball, v)
    diffs = tuple(finite_difference(p, bv).lower_bound for p in patches)
    radii = tuple(agreement_radius(p, bv) for p in patches)
    return AccumulationReport(bool(diffs) and diffs[-1] == 0, diffs, radii)


# -- projection to an axis -------------------------------------------------------

@dataclass(frozen=True)
class AxisProjectionReport:
    projection: tuple  # vertex labels
    diameter: int
    coarse_continuity: bool
    perturbed: int  # number of perturbed points checked


def axis_projection_of_patch(p: HorofunctionPatch, axis, class_tol: int = 2) -> AxisProjectionReport:
    """Nearest-point projection of the defining sequence's tail onto a quasi-axis.

    Raises when p is within ``class_tol`` of either endpoint class of the axis
    owner.  Coarse continuity: each neighbour of a tail point must project
    within 2D of the projection, D its diameter (within 1 when D = 0).
    """
    from .actions import diameter, nearest_points, projection

    space = p.ball.space
    owner = axis.owner
    if p.provenance.get("kind") == "limit":
        for r in (Ray.attractor(owner), Ray.repeller(owner)):
            q = limit_along_sequence(p.ball, r)
            if finite_difference(p, q).lower_bound <= class_tol:
                raise FixedClassError(f"{p.label} is in the class of {r.label}")
    pts = tail(p)
    proj = projection(space, pts, axis.vertices)
    D = diameter(space, proj)
    slack = max(2 * D, 1)
    ok = True
    count = 0
    for y in pts:
        for u in space.neighbors(y):
            count += 1
            for w in nearest_points(space, u, axis.vertices):
                if min(space.dist(w, q) for q in proj) > slack:
                    ok = False
    return AxisProjectionReport(tuple(space.label(v) for v in proj), D, ok, count)
