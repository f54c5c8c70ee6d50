"""Coned-off Cayley graphs of free products: coset projections, BCP, cone-point lemmas."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundedConjugatorError, LabError, UnknownCosetError
from .graph import build_ball, is_guard
from .groups import Cone
from .spaces import ConedOffAction, GroupAction, free_product


class ConedOffGraph:
    """Word ball of the Cayley graph plus one cone per peripheral coset meeting it.

    ``ball`` is the coned graph (exact distances); ``base`` is the plain
    Cayley ball on the same group elements.
    """

    def __init__(self, action: ConedOffAction, radius: int, max_vertices: int = 250_000):
        if not isinstance(action, ConedOffAction):
            raise LabError("build_coned_off needs a coned-off free product action")
        self.action = action
        self.group = action.group
        self.radius = radius
        self.ball = build_ball(action, radius, max_vertices)
        from .spaces import CayleyAction

        self.base = build_ball(CayleyAction(action.group), radius, max_vertices)
        self.cones = [v for v in self.ball.vertices if isinstance(v, Cone)]
        self.elements = [v for v in self.ball.vertices if not isinstance(v, Cone)]

    def __repr__(self):
        return f"ConedOffGraph(radius={self.radius}, elements={len(self.elements)}, cones={len(self.cones)})"

    def cone(self, coset) -> Cone:
        if isinstance(coset, Cone):
            c = coset
        else:
            try:
                c = self.action.parse_vertex(coset)
            except Exception as exc:
                raise UnknownCosetError(str(coset)) from exc
        if not isinstance(c, Cone) or not self.ball.contains(c):
            raise UnknownCosetError(f"no cone for {coset!r} in the ball")
        return c

    def d_S(self, u, v) -> int:
        """Word metric of the group (used on coset elements)."""
        G = self.group
        return G.length(G.mul(G.inv(u), v))

    def coset_members(self, c: Cone) -> list:
        i = self.ball.idx(c)
        return [self.ball.vertices[j] for j in self.ball.neighbor_indices(i)]


def build_coned_off(action, radius: int, max_vertices: int = 250_000) -> ConedOffGraph:
    """Accepts a coned-off action or a tuple of cyclic orders."""
    if isinstance(action, GroupAction) and not isinstance(action, ConedOffAction):
        raise LabError("build_coned_off needs a coned-off free product action or a list of orders")
    if not isinstance(action, ConedOffAction):
        action = free_product(action, coned=True)
    return ConedOffGraph(action, radius, max_vertices)


@dataclass(frozen=True)
class CosetProjection:
    coset: str
    entry: tuple  # labels of coset elements on geodesics from x to the cone
    diameter: int  # in the word metric d_S


def _entry_indices(g: ConedOffGraph, x, c: Cone) -> list[int]:
    ball = g.ball
    ic = ball.idx(c)
    rx = ball.row(ball.idx(x))
    nb = ball.neighbor_indices(ic)
    return [int(u) for u in nb if rx[u] == rx[ic] - 1]


def coset_projection(g: ConedOffGraph, x, coset) -> CosetProjection:
    """Coset elements adjacent to c(gP) lying on some geodesic from x to c(gP)."""
    c = g.cone(coset)
    if isinstance(x, str):
        x = g.ball.vertex(x)
    if x == c:
        raise LabError("x must differ from the cone vertex")
    ent = [g.ball.vertices[i] for i in _entry_indices(g, x, c)]
    diam = max((g.d_S(a, b) for a in ent for b in ent), default=0)
    return CosetProjection(g.action.label(c), tuple(g.action.label(v) for v in ent), diam)


def coset_distance(g: ConedOffGraph, x, y, coset) -> int:
    """d_gP(x, y): d_S-diameter of the union of the two projections."""
    c = g.cone(coset)
    x = g.ball.vertex(x) if isinstance(x, str) else x
    y = g.ball.vertex(y) if isinstance(y, str) else y
    ent = [g.ball.vertices[i] for i in set(_entry_indices(g, x, c)) | set(_entry_indices(g, y, c))]
    return max((g.d_S(a, b) for a in ent for b in ent), default=0)


# -- BCP ------------------------------------------------------------------------

@dataclass
class BcpReport:
    K_least: int
    K: int | None
    passed: bool | None
    radius: int
    pairs: int
    triples: int  # (x, y, coset) triples with positive coset distance
    witnesses: list = field(default_factory=list)  # non-guard triples attaining K_least
    by_distance: dict = field(default_factory=dict)  # d_gP -> [guarded, not guarded]

    def to_json(self) -> dict:
        return {"K_least": self.K_least, "witnesses": self.witnesses, "radius": self.radius}


def _diam_table(G, factor: int, m: int):
    """diam_S of every subset (bitmask over exponents 0..m-1) of a finite coset."""
    T = np.zeros(1 << m, dtype=np.int64)
    for mask in range(1 << m):
        ks = [k for k in range(m) if mask >> k & 1]
        T[mask] = max((G.syllable_length(factor, (b - a) % m) for a in ks for b in ks), default=0)
    return T


def verify_bcp(action_or_graph, K: int | None = None, scope: int = 5, slack: int = 2,
               confirm: bool = True) -> BcpReport:
    """Exhaustive BCP scan: x, y range over the scope-radius coned ball.

    Distances come from a ball built ``slack`` steps further so every
    geodesic between scanned vertices is present.  The cone c(gP) is a guard
    from x to y iff it is alone in its distance layer of the interval; the
    triples that fix K_least are re-checked with the deletion test.
    """
    if isinstance(action_or_graph, ConedOffGraph):
        act = action_or_graph.action
    else:
        act = action_or_graph
        if isinstance(act, GroupAction) and not isinstance(act, ConedOffAction):
            raise LabError("the BCP scan needs a coned-off free product action")
        if not isinstance(act, ConedOffAction):
            act = free_product(act, coned=True)
    G = act.group
    if any(G.orders[f] == 0 for f in act.peripheral):
        raise LabError("the BCP scan needs finite peripheral factors")
    big = build_ball(act, scope + slack)
    inner = build_ball(act, scope)
    D = big.dist.astype(np.int64)
    scan = np.array([big.idx(v) for v in inner.vertices], dtype=np.int64)
    ns = len(scan)
    Ds = D[np.ix_(scan, scan)]
    iu = np.triu_indices(ns, k=1)
    tables = {f: _diam_table(G, f, G.orders[f]) for f in act.peripheral}
    K_least = 0
    witnesses = []
    triples = 0
    by_d: dict = {}
    for c in inner.vertices:
        if not isinstance(c, Cone):
            continue
        ic = big.idx(c)
        m = G.orders[c.factor]
        nbrs = big.neighbor_indices(ic)
        # bit k of mask[x]: coset element rep * p^k lies on a geodesic from x to c
        mask = np.zeros(ns, dtype=np.int64)
        for u in nbrs:
            w = G.mul(G.inv(c.rep), big.vertices[u])
            k = w[0][1] % m if w else 0
            mask |= (D[scan, u] == D[scan, ic] - 1).astype(np.int64) << k
        dgp = tables[c.factor][mask[:, None] | mask[None, :]]
        a, b = iu
        vals = dgp[a, b]
        keep = (vals > 0) & (scan[a] != ic) & (scan[b] != ic)
        a, b, vals = a[keep], b[keep], vals[keep]
        triples += len(vals)
        if not len(vals):
            continue
        xa, yb = scan[a], scan[b]
        dxy = Ds[a, b]
        dxc, dcy = D[xa, ic], D[ic, yb]
        on = dxc + dcy == dxy
        guard = np.zeros(len(vals), dtype=bool)
        idx_on = np.flatnonzero(on)
        for s in range(0, len(idx_on), 2048):
            sl = idx_on[s:s + 2048]
            I = (D[xa[sl]] + D[yb[sl]]) == dxy[sl, None]
            layer = I & (D[xa[sl]] == dxc[sl, None])
            guard[sl] = layer.sum(axis=1) == 1
        for d in np.unique(vals):
            sel = vals == d
            g_, ng = int(guard[sel].sum()), int((~guard[sel]).sum())
            cur = by_d.setdefault(int(d), [0, 0])
            cur[0] += g_
            cur[1] += ng
        bad = np.flatnonzero(~guard)
        if len(bad):
            top = int(vals[bad].max())
            if top > K_least:
                K_least = top
                witnesses = []
            if top == K_least and len(witnesses) < 5:
                for t in bad[vals[bad] == top][: 5 - len(witnesses)]:
                    witnesses.append([big.labels[xa[t]], big.labels[yb[t]], big.labels[ic]])
    if confirm:
        for x, y, c in witnesses:
            if is_guard(big, c, x, y):
                raise LabError(f"layer test and deletion test disagree on {x}, {y}, {c}")
    passed = None if K is None else K >= K_least
    return BcpReport(K_least, K, passed, scope, ns * (ns - 1) // 2, triples, witnesses, dict(sorted(by_d.items())))


def confirm_guards_by_deletion(action, scope: int, K: int, slack: int = 2, limit: int | None = None) -> tuple[int, int]:
    """Deletion-test every triple with d_gP > K; returns (checked, failures)."""
    big = build_ball(action, scope + slack)
    inner = build_ball(action, scope)
    g = ConedOffGraph.__new__(ConedOffGraph)
    g.action, g.group, g.ball, g.radius = action, action.group, big, scope + slack
    checked = fails = 0
    verts = inner.vertices
    for c in verts:
        if not isinstance(c, Cone):
            continue
        for i, x in enumerate(verts):
            for y in verts[i + 1:]:
                if c in (x, y):
                    continue
                if coset_distance(g, x, y, c) > K:
                    checked += 1
                    fails += not is_guard(big, c, x, y)
                    if limit is not None and checked >= limit:
                        return checked, fails
    return checked, fails


# -- horofunction lemmas ----------------------------------------------------------

@dataclass
class UniqueMinimumReport:
    rows: list  # (sequence, kind, min_set) per sample
    passed: bool
    extended_elements: bool  # every interior group element has a neighbour one lower


def unique_minimum_scan(ball, sequences, points=()) -> UniqueMinimumReport:
    """For each sample: a finite minimum must be a single cone vertex (a single point for b_x)."""
    from .horoboundary import horofunction_of_point, limit_along_sequence, local_minimum_map

    act = ball.space
    rows = []
    ok = True
    ext = True
    for seq in sequences:
        p = limit_along_sequence(ball, seq)
        r = local_minimum_map(p)
        rows.append((p.provenance["sequence"], r.kind, list(r.min_set)))
        if r.kind == "finite-minimum":
            mins = [ball.vertex(v) for v in r.min_set]
            ok &= len(mins) == 1 and isinstance(mins[0], Cone)
        lv = ball.base_row
        for i, v in enumerate(ball.vertices):
            if isinstance(v, Cone) or lv[i] >= ball.radius:
                continue
            nb = ball.neighbor_indices(i)
            if not (p.values[nb] == p.values[i] - 1).any():
                ext = False
    for y in points:
        p = horofunction_of_point(ball, y)
        r = local_minimum_map(p)
        rows.append((p.label, r.kind, list(r.min_set)))
        ok &= list(r.min_set) == [ball.label(y)]
    return UniqueMinimumReport(rows, ok and ext, ext)


@dataclass
class ConeAccumulationReport:
    converges: bool
    differences: tuple
    agreement_radius: tuple
    conjugators: tuple


def cone_accumulation(ball, coset, conjugators, xi) -> ConeAccumulationReport:
    """Patches of g p_n g^-1 . xi against b_{c(gP)}; the p_n must grow in the peripheral factor."""
    from .horoboundary import accumulation_probe, limit_along_sequence
    from .rays import Ray

    act = ball.space
    G = act.group
    c = act.parse_vertex(coset) if isinstance(coset, str) else coset
    if not isinstance(c, Cone):
        raise UnknownCosetError(str(coset))
    ps = [G.parse(p) if isinstance(p, str) else getattr(p, "element", p) for p in conjugators]
    for p in ps:
        if p and (len(p) != 1 or p[0][0] != c.factor):
            raise LabError(f"{G.format(p)} is not in the peripheral factor of {act.label(c)}")
    lens = [G.length(p) for p in ps]
    if len(ps) < 2 or any(b <= a for a, b in zip(lens, lens[1:])):
        raise BoundedConjugatorError("conjugators must grow strictly in the peripheral factor")
    if isinstance(xi, str):
        xi = Ray.of(act, xi)
    gr = c.rep
    patches = []
    for p in ps:
        conj = G.mul(G.mul(gr, p), G.inv(gr))
        patches.append(limit_along_sequence(ball, xi.translate(conj)))
    rep = accumulation_probe(ball, c, patches)
    return ConeAccumulationReport(rep.converges, rep.differences, rep.agreement_radius,
                                  tuple(G.format(p) for p in ps))
