"""Axis families with set-valued projections and the projection complex built on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .actions import QuasiAxis, quasi_axis
from .errors import LabError, OutOfBallError, PreconditionError, SameMemberError, VerificationFailure
from .graph import FiniteGraph, guard_in_space, is_guard
from .groups import Isometry


class AxisFamily:
    """Finite family of quasi-axes with exhaustive nearest-point projections.

    ``proj[u][v]`` is the sorted index list (into member u's path) of the
    nearest-point projection of member v onto member u.  Full sets are kept.
    """

    def __init__(self, action, members: list[QuasiAxis], names=None):
        self.action = action
        self.members = list(members)
        self.names = list(names) if names is not None else [f"U{i}" for i in range(len(self.members))]
        sets = [m.vertex_set for m in self.members]
        for i in range(len(sets)):
            for j in range(i):
                if sets[i] == sets[j]:
                    raise LabError(f"members {self.names[j]} and {self.names[i]} have the same vertex set")
        n = len(self.members)
        act = action
        # distance tables inside each member, and projections
        self._inner = []
        for m in self.members:
            vs = m.vertices
            self._inner.append(np.array([[act.dist(a, b) for b in vs] for a in vs], dtype=np.int64))
        self.proj: list[list] = [[None] * n for _ in range(n)]
        for u in range(n):
            U = self.members[u].vertices
            for v in range(n):
                if u == v:
                    continue
                hit = set()
                for x in self.members[v].vertices:
                    ds = np.array([act.dist(x, t) for t in U])
                    hit.update(np.flatnonzero(ds == ds.min()).tolist())
                self.proj[u][v] = sorted(hit)
        self.kappa = max((self.diam(u, self.proj[u][v]) for u in range(n) for v in range(n) if u != v), default=0)

    def __len__(self):
        return len(self.members)

    def index(self, U) -> int:
        if isinstance(U, (int, np.integer)):
            return int(U)
        return self.names.index(U)

    def diam(self, u: int, idxs) -> int:
        idxs = list(idxs)
        if not idxs:
            return 0
        sub = self._inner[u][np.ix_(idxs, idxs)]
        return int(sub.max())

    def projection_labels(self, U, V) -> list[str]:
        u, v = self.index(U), self.index(V)
        vs = self.members[u].vertices
        return [self.action.label(vs[i]) for i in self.proj[u][v]]

    def d(self, U, V, W) -> int:
        """d_U(V, W) = diam(pi_U(V) u pi_U(W))."""
        u, v, w = self.index(U), self.index(V), self.index(W)
        if u in (v, w):
            raise SameMemberError("d_U(V, W) needs U different from V and W")
        return self.diam(u, set(self.proj[u][v]) | set(self.proj[u][w]))

    def d_table(self) -> np.ndarray:
        """T[u, v, w] = d_u(v, w), -1 where undefined."""
        n = len(self)
        T = np.full((n, n, n), -1, dtype=np.int64)
        for u in range(n):
            for v in range(n):
                for w in range(n):
                    if u != v and u != w:
                        T[u, v, w] = self.d(u, v, w)
        return T


class _AxisDeduper:
    """Recognises translates t.Ax(f) lying on an axis already kept.

    Each kept member also stores the same translate of a window four times as
    long; a new member duplicates it when its vertices all lie on that window.
    """

    def __init__(self, f: Isometry, i_range):
        lo, hi = i_range
        self.long = quasi_axis(f, (4 * lo, 4 * hi), check=False)
        self.kept = []

    def fresh(self, t: Isometry) -> bool:
        cand = self.long.translate(t).vertex_set
        short_mid = t.action.orbit_point(t.element)
        for big in self.kept:
            if short_mid in big and len(cand & big) * 2 >= len(cand):
                return False
        self.kept.append(cand)
        return True


def build_axis_family(action, seeds, translates, i_range=(-4, 4), base="basepoint", ball=None, dedupe=False) -> AxisFamily:
    """Members t . Ax(s) for every translate t and seed s, in that order."""
    members, names = [], []
    for s in seeds:
        s = action.isometry(s)
        ax = quasi_axis(s, i_range, base, ball=None)
        dd = _AxisDeduper(s, i_range)
        for t in translates:
            t = action.isometry(t)
            m = ax.translate(t)
            if ball is not None:
                for v in m.vertices:
                    if not ball.contains(v):
                        raise OutOfBallError(f"axis {t.word}.Ax({s.word}) leaves the ball at {action.label(v)}")
            if not dd.fresh(t) and dedupe:
                continue
            members.append(m)
            names.append(f"{t.word}.Ax({s.word})" if not t.is_identity else f"Ax({s.word})")
    return AxisFamily(action, members, names)


def chain_family(action, f="a", step="ba^3", length=5, i_range=(-4, 4)) -> AxisFamily:
    """U_i = step^i . Ax(f) for i = 0..length-1."""
    f = action.isometry(f)
    h = action.isometry(step)
    ax = quasi_axis(f, i_range)
    members = [ax.translate(h ** i) for i in range(length)]
    return AxisFamily(action, members, [f"U{i}" for i in range(length)])


@dataclass
class AxiomReport:
    kappa: int
    bounded: bool  # axiom 1
    behrstock: bool  # axiom 2
    finite: bool  # axiom 3
    max_large_count: int  # max over pairs of #{U : d_U(V, W) > kappa}
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.bounded and self.behrstock and self.finite


def verify_projection_axioms(fam: AxisFamily, kappa: int | None = None) -> AxiomReport:
    """Axioms (1)-(3) at the family's least kappa (or a given one), exhaustively over triples."""
    k = fam.kappa if kappa is None else kappa
    n = len(fam)
    T = fam.d_table()
    wit = {}
    bounded = True
    for u in range(n):
        for v in range(n):
            if u != v and fam.diam(u, fam.proj[u][v]) > k:
                bounded = False
                wit.setdefault("bounded", (fam.names[u], fam.names[v]))
    behrstock = True
    for u, v, w in permutations(range(n), 3):
        if T[u, v, w] > k and T[v, u, w] > k:
            behrstock = False
            wit.setdefault("behrstock", (fam.names[u], fam.names[v], fam.names[w]))
    counts = [int(np.sum(T[:, v, w] > k)) for v in range(n) for w in range(n) if v != w]
    big = max(counts, default=0)
    # finite family: the count is bounded by n - 2 by construction; report it
    return AxiomReport(k, bounded, behrstock, big <= max(n - 2, 0), big, wit)


def interval_set(fam: AxisFamily, V, W, K: int) -> list[str]:
    """F_K(V, W) = {U : d_U(V, W) > K}, V and W excluded."""
    v, w = fam.index(V), fam.index(W)
    if v == w:
        raise SameMemberError("interval_set needs two different members")
    return [fam.names[u] for u in range(len(fam)) if u not in (v, w) and fam.d(u, v, w) > K]


class ProjectionComplexGraph(FiniteGraph):
    """P_K: members joined when their interval F_K is empty."""

    def __init__(self, fam: AxisFamily, K: int):
        n = len(fam)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if not interval_set(fam, i, j, K)]
        super().__init__(list(range(n)), edges, basepoint=0 if n else None, labels=list(fam.names))
        self.K = K
        self.family = fam
        self.connected = self.is_connected()

    def pc_distance(self, U, V) -> int:
        fam = self.family
        return int(self.row(fam.index(U))[fam.index(V)])


def build_complex(fam: AxisFamily, K: int) -> ProjectionComplexGraph:
    return ProjectionComplexGraph(fam, K)


def connectivity_sweep(fam: AxisFamily, Ks) -> dict:
    """K -> (connected, edge count) for each K."""
    out = {}
    for K in Ks:
        pc = build_complex(fam, K)
        out[int(K)] = (pc.connected, len(pc.edge_array))
    return out


@dataclass
class ForcingReport:
    Khat: int
    passed: bool
    least_Khat: int
    checked: int
    failures: list = field(default_factory=list)


def _forcing_failures(pc, fam, Khat):
    fails, checked = [], 0
    n = len(fam)
    for u in range(n):
        for v in range(u + 1, n):
            for w in range(n):
                if w in (u, v) or fam.d(w, u, v) <= Khat:
                    continue
                checked += 1
                if not is_guard(pc, w, u, v):
                    fails.append((fam.names[u], fam.names[v], fam.names[w]))
    return fails, checked


def verify_forcing(pc: ProjectionComplexGraph, fam: AxisFamily, Khat: int | None = None) -> ForcingReport:
    """Every W in F_Khat(U, V) lies on every pc-geodesic from U to V (deletion test)."""
    n = len(fam)
    top = max((fam.d(w, u, v) for u in range(n) for v in range(n) for w in range(n)
               if len({u, v, w}) == 3), default=0)
    least = top
    for k in range(top, -1, -1):
        if _forcing_failures(pc, fam, k)[0]:
            break
        least = k
    if Khat is None:
        Khat = least
    fails, checked = _forcing_failures(pc, fam, Khat)
    return ForcingReport(Khat, not fails, least, checked, fails)


@dataclass
class BgitReport:
    value: int  # max_i d_V(U_0, U_i)
    K0: int | None
    passed: bool
    per_step: list


def verify_bgit(pc: ProjectionComplexGraph, fam: AxisFamily, path, V, K0: int | None = None) -> BgitReport:
    """max_i d_V(U_0, U_i) along a pc-path staying at pc-distance >= 3 from V."""
    v = fam.index(V)
    idx = [fam.index(U) for U in path]
    for a, b in zip(idx, idx[1:]):
        if pc.row(a)[b] != 1:
            raise PreconditionError(f"{fam.names[a]} and {fam.names[b]} are not adjacent in P_{pc.K}")
    for i in idx:
        if pc.row(v)[i] < 3:
            raise PreconditionError(f"{fam.names[i]} is within distance 2 of {fam.names[v]}")
    if not idx:
        return BgitReport(0, K0, True, [])
    steps = [0] + [fam.d(v, idx[0], i) for i in idx[1:]]
    val = max(steps)
    return BgitReport(val, K0, K0 is None or val <= K0, steps)


@dataclass
class MinimalLoxodromicReport:
    element: Isometry
    members: int
    chain_geodesic: bool
    forcing: ForcingReport | None
    guard_condition: bool
    deviation: int  # max |d_pc(U_i, U_j) - |i - j||, the measured Morse defect


def minimal_loxodromic_construct(g, f, n: int, K: int = 1, span: int = 3, i_range=(-4, 4), ball=None) -> MinimalLoxodromicReport:
    """h = g f^n with the chain U_i = h^i Ax(f), i in [-span, span], checked in P_K.

    Also checks the guard condition behind the minimal-class criterion: for
    sampled z in the ball some orbit point h^k o is a guard from z to every far
    point h^m o and h^m s o (s a generator).
    """
    act = g.action
    h = g * (f ** n)
    ax = quasi_axis(f, i_range)
    mems = []
    dd = _AxisDeduper(f, i_range)
    for i in range(-span, span + 1):
        if dd.fresh(h ** i):
            mems.append(ax.translate(h ** i))
    fam = AxisFamily(act, mems, [f"U{i}" for i in range(len(mems))])
    pc = build_complex(fam, K)
    k = len(fam)
    dev = 0
    for i in range(k):
        for j in range(k):
            dev = max(dev, abs(int(pc.row(i)[j]) - abs(i - j)))
    forcing = verify_forcing(pc, fam) if k > 2 else None
    guard_ok = True
    if ball is not None and k > 1:
        G = act.group
        o = act.basepoint
        far = 2 * ball.radius + 4
        ms = [m for m in range(1, 64) if act.dist(o, act.orbit_point(G.power(h.element, m))) >= far][:2]
        targets = []
        for m in ms:
            hm = G.power(h.element, m)
            targets.append(act.orbit_point(hm))
            targets.extend(act.orbit_point(G.mul(hm, s)) for s in G.generating_set())
        ks = range(1, ms[0]) if ms else ()
        for z in ball.vertices:
            if not any(all(guard_in_space(act, act.orbit_point(G.power(h.element, kk)), z, y) for y in targets)
                       for kk in ks):
                guard_ok = False
                break
    return MinimalLoxodromicReport(h, k, dev == 0, forcing, guard_ok, dev)


@dataclass
class MyrbergInjectivityReport:
    guard_chain: bool
    agree: list  # competitor labels matching the ray patch
    rejected: list  # (label, finite difference) for competitors in other classes
    mismatched: list  # same direction but a different patch: a counterexample

    @property
    def passed(self) -> bool:
        return self.guard_chain and not self.mismatched


def myrberg_injectivity_probe(ball, ray_report, competitors, direction_reach: int | None = None) -> MyrbergInjectivityReport:
    """Guard chain along a Myrberg-type prefix, then competitors in its direction must share its patch.

    ``ray_report`` is what :func:`horolab.dynamics.myrberg_ray` returns.  A
    competitor is in the ray's direction when its tail points have Gromov
    product with the prefix endpoint at least ``direction_reach``.
    """
    from .horoboundary import HorofunctionPatch, finite_difference, limit_along_sequence, tail

    act = ball.space
    o = act.basepoint
    p = ray_report.endpoint
    chain = ray_report.guard_points
    ok = all(guard_in_space(act, w, o, p) for w in chain)
    for a, b in zip(chain, chain[1:]):
        ok = ok and guard_in_space(act, a, o, b)
    reach = ball.radius + 2 if direction_reach is None else direction_reach
    base = limit_along_sequence(ball, ray_report.sequence)
    agree, rejected, bad = [], [], []
    for q in competitors:
        if not isinstance(q, HorofunctionPatch):
            q = limit_along_sequence(ball, q)
        t = tail(q)[-1]
        same = act.gromov_product2(t, p, o) >= 2 * reach
        fd = finite_difference(base, q).lower_bound
        if same and fd == 0:
            agree.append(q.label)
        elif same:
            bad.append((q.label, fd))
        else:
            rejected.append((q.label, fd))
    return MyrbergInjectivityReport(ok, agree, rejected, bad)


def check_family_triangle(fam: AxisFamily) -> bool:
    """d_U is symmetric and satisfies the triangle inequality on all tested tuples."""
    T = fam.d_table()
    n = len(fam)
    for u in range(n):
        others = [x for x in range(n) if x != u]
        for v in others:
            for w in others:
                if T[u, v, w] != T[u, w, v]:
                    return False
                for z in others:
                    if T[u, v, w] > T[u, v, z] + T[u, z, w]:
                        return False
    return True


def require(cond: bool, message: str, witness=None):
    if not cond:
        raise VerificationFailure(message, witness)


def least_passing_n(g, f, n_max: int = 6, K: int = 1, ball=None) -> tuple[int | None, list]:
    """Sweep n = 1..n_max and return the first n whose report passes, with all reports."""
    reports = []
    for n in range(1, n_max + 1):
        r = minimal_loxodromic_construct(g, f, n, K=K, ball=ball)
        reports.append(r)
        if r.chain_geodesic and r.guard_condition and (r.forcing is None or r.forcing.passed):
            return n, reports
    return None, reports
