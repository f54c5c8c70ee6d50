"""Group actions on graphs with exact ambient distances.

Three families are supported:

* :class:`CayleyAction` -- a free product of cyclic groups (free groups
  included) acting on its Cayley graph by left multiplication;
* :class:`ConedOffAction` -- the same group acting on the coned-off Cayley
  graph where every coset of a peripheral factor gets a cone vertex;
* :class:`CustomAction` -- a finite graph with a group of automorphisms.

Every action knows the distance between any two vertices of its (possibly
infinite) graph.  For the free-product families this comes from normal forms:
the Cayley and coned-off graphs are trees of blocks, so a geodesic crosses the
cosets named by the syllables of ``u^-1 v`` one after another.
"""

from __future__ import annotations

import csv
import json
import re
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigError, LabError, OutOfBallError, UnknownVertexError
from .groups import Cone, CyclicFreeProduct, Isometry, PermutationGroup


class _LoopTable:
    def __init__(self, action, xs):
        self.action, self.xs = action, xs

    def to(self, y):
        return self.action.dist_to_many(self.xs, y)


class _ConedTable:
    def __init__(self, action, xs):
        self.action, self.xs = action, xs
        self.table = SyllableTable(action.group, xs, {f: 2 for f in action.peripheral})

    def to(self, y):
        if isinstance(y, Cone):
            return self.action.dist_to_many(self.xs, y)
        d = self.table.to(y)
        d[[i for i, x in enumerate(self.xs) if x == y]] = 0
        return d


class _MatrixTable:
    def __init__(self, action, xs):
        self.action = action
        self.rows = np.array([action._index[x] for x in xs], dtype=np.int64)

    def to(self, y):
        try:
            j = self.action._index[y]
        except KeyError:
            raise UnknownVertexError(y) from None
        return self.action._D[self.rows, j].astype(np.int64)


class GroupAction:
    """Common surface of the three families."""

    family: str
    group: object
    basepoint: object
    exact_balls = True  # ball distances equal ambient distances for all pairs

    def isometry(self, word) -> Isometry:
        if isinstance(word, Isometry):
            return word
        return Isometry(self, self.group.parse(word))

    def identity(self) -> Isometry:
        return Isometry(self, self.group.identity)

    def orbit_point(self, element):
        return self.act(element, self.basepoint)

    def gromov_product2(self, x, y, z) -> int:
        """Doubled Gromov product of x, y at z."""
        return self.dist(x, z) + self.dist(y, z) - self.dist(x, y)

    def dist_to_many(self, xs, y) -> np.ndarray:
        return np.fromiter((self.dist(x, y) for x in xs), dtype=np.int64, count=len(xs))

    def distance_table(self, xs):
        """Object whose ``to(y)`` returns distances from each of ``xs`` to y."""
        return _LoopTable(self, list(xs))

    def extends(self, o, x) -> bool:
        """Is there a neighbour of x one step further from o?"""
        d = self.dist(o, x)
        return any(self.dist(o, y) == d + 1 for y in self.neighbors(x))

    def interval_successors(self, v, y):
        d = self.dist(v, y)
        return [u for u in self.neighbors(v) if self.dist(u, y) == d - 1]

    def geodesic(self, u, v) -> list:
        """A geodesic from u to v; the first successor in neighbour order is taken at each step."""
        path = [u]
        while path[-1] != v:
            nxt = self.interval_successors(path[-1], v)
            if not nxt:
                raise LabError(f"no geodesic step from {self.label(path[-1])} toward {self.label(v)}")
            path.append(nxt[0])
        return path


class SyllableTable:
    """Normal forms of a fixed vertex list packed into arrays, for fast distances to one far vertex.

    ``cap`` maps factor index to the most a syllable of that factor may cost
    (2 for coned peripherals).  Cone vertices are stored by their coset
    representative and pay 1 for the cone edge, after the leading syllable of
    their own factor is absorbed.
    """

    def __init__(self, group, vertices, cap=None):
        self.group = group
        self.orders = np.array(group.orders, dtype=np.int64)
        nf = len(group.orders)
        self.cap = np.array([(cap or {}).get(f, 1 << 30) for f in range(nf)], dtype=np.int64)
        n = len(vertices)
        words, cone = [], np.full(n, -1, dtype=np.int64)
        for i, v in enumerate(vertices):
            if isinstance(v, Cone):
                cone[i] = v.factor
                words.append(v.rep)
            else:
                words.append(v)
        width = max((len(w) for w in words), default=0) + 1
        self.F = np.full((n, width), -1, dtype=np.int64)
        self.E = np.zeros((n, width), dtype=np.int64)
        self.count = np.array([len(w) for w in words], dtype=np.int64)
        for i, w in enumerate(words):
            for j, (f, e) in enumerate(w):
                self.F[i, j] = f
                self.E[i, j] = e
        L = self._len(self.F, self.E)
        # suffix sums: S[i, k] = cost of syllables k.. of word i
        self.S = np.concatenate([np.cumsum(L[:, ::-1], axis=1)[:, ::-1], np.zeros((n, 1), np.int64)], axis=1)
        self.cone = cone
        self.width = width

    def _len(self, F, E):
        out = np.zeros(F.shape, dtype=np.int64)
        ok = F >= 0
        f = np.where(ok, F, 0)
        m = self.orders[f]
        r = np.where(m > 0, np.mod(E, np.where(m > 0, m, 1)), E)
        ln = np.where(m > 0, np.minimum(r, m - r), np.abs(E))
        ln = np.minimum(ln, self.cap[f])
        out[ok] = ln[ok]
        return out

    def to(self, y) -> np.ndarray:
        """Distances from every stored vertex to the group element ``y``."""
        n, W = self.F.shape
        q = len(y)
        yF = np.array([f for f, _ in y] + [-1] * (W + 1), dtype=np.int64)
        yE = np.array([e for _, e in y] + [0] * (W + 1), dtype=np.int64)
        yL = self._len(yF[None, :], yE[None, :])[0]
        yS = np.concatenate([np.cumsum(yL[::-1])[::-1], [0]])
        # k = length of the common syllable prefix
        eq = (self.F == yF[None, :W]) & (self.E == yE[None, :W]) & (self.F >= 0)
        k = np.argmin(np.concatenate([eq, np.zeros((n, 1), bool)], axis=1), axis=1)
        rows = np.arange(n)
        xf = self.F[rows, np.minimum(k, W - 1)]
        xf = np.where(k < self.count, xf, -1)
        xe = self.E[rows, np.minimum(k, W - 1)]
        yf, ye = yF[k], yE[k]
        d = self.S[rows, k] + yS[np.minimum(k, q)]
        merge = (xf >= 0) & (xf == yf)
        if merge.any():
            mf = np.where(merge, xf, 0)
            merged = self._len(mf[:, None], (ye - xe)[:, None])[:, 0]
            d = np.where(merge, d - self._len(mf[:, None], xe[:, None])[:, 0] - yL[k] + merged, d)
        cones = self.cone >= 0
        if cones.any():
            # whole representative cancelled: the next syllable of y may sit in the cone's coset
            absorb = cones & (k == self.count) & (yf == self.cone)
            d = np.where(cones, d + 1, d)
            d = np.where(absorb, d - yL[k], d)
        return d


class CayleyAction(GroupAction):
    family = "cayley"

    def __init__(self, group: CyclicFreeProduct):
        self.group = group
        self.basepoint = group.identity
        self._gens = group.generating_set()

    def __repr__(self):
        return f"CayleyAction({self.group!r})"

    @property
    def tag(self):
        return self.group.family

    def act(self, g, v):
        return self.group.mul(g, v)

    def dist(self, u, v) -> int:
        if u == v:
            return 0
        return self.group.length(self.group.mul(self.group.inv(u), v))

    def distance_table(self, xs) -> SyllableTable:
        return SyllableTable(self.group, xs)

    def neighbors(self, v):
        return [self.group.mul(v, s) for s in self._gens]

    def label(self, v) -> str:
        return self.group.format(v)

    def parse_vertex(self, text):
        if not isinstance(text, str):
            return text
        return self.group.parse(text)

    def is_vertex(self, v) -> bool:
        return isinstance(v, tuple) and not isinstance(v, Cone)

    def ball_structure(self, radius: int, limit: int | None = None):
        verts = self.group.ball(radius, limit=limit)
        if limit is not None and len(verts) > limit:
            return verts, None
        index = {v: i for i, v in enumerate(verts)}
        edges = []
        for i, v in enumerate(verts):
            for s in self._gens:
                j = index.get(self.group.mul(v, s))
                if j is not None and i < j:
                    edges.append((i, j))
        return verts, edges


class ConedOffAction(GroupAction):
    """Coned-off Cayley graph; ``peripheral`` lists the coned factors (default all)."""

    family = "coned_off"

    def __init__(self, group: CyclicFreeProduct, peripheral=None):
        self.group = group
        if peripheral is None:
            peripheral = range(len(group.orders))
        self.peripheral = tuple(sorted(group.names.index(p) if isinstance(p, str) else int(p) for p in peripheral))
        self.basepoint = group.identity
        self._gens = group.generating_set()

    def __repr__(self):
        names = ",".join(self.group.names[f] for f in self.peripheral)
        return f"ConedOffAction({self.group!r}; cones on {names})"

    @property
    def tag(self):
        return self.group.family

    # coned length: peripheral syllables cost at most 2 (through the cone)
    def _clen(self, x) -> int:
        g = self.group
        total = 0
        for f, e in x:
            c = g.syllable_length(f, e)
            total += min(c, 2) if f in self.peripheral else c
        return total

    def act(self, g, v):
        if isinstance(v, Cone):
            return self.group.cone_of(self.group.mul(g, v.rep), v.factor)
        return self.group.mul(g, v)

    def dist(self, u, v) -> int:
        if u == v:
            return 0
        G = self.group
        if isinstance(u, Cone) and isinstance(v, Cone):
            w = G.mul(G.inv(u.rep), v.rep)
            if w and w[0][0] == u.factor:
                w = w[1:]
            if w and w[-1][0] == v.factor:
                w = w[:-1]
            return 2 + self._clen(w)
        if isinstance(v, Cone):
            u, v = v, u
        if isinstance(u, Cone):
            w = G.mul(G.inv(u.rep), v)
            if w and w[0][0] == u.factor:
                w = w[1:]
            return 1 + self._clen(w)
        return self._clen(G.mul(G.inv(u), v))

    def distance_table(self, xs):
        return _ConedTable(self, list(xs))

    def coset_projection_point(self, cone: Cone, y):
        """The coset element of ``cone`` closest to y (unique: blocks are joined at cut vertices)."""
        G = self.group
        rep = cone.rep
        if isinstance(y, Cone):
            if y == cone:
                raise LabError("a cone vertex has no projection onto its own coset")
            w = G.mul(G.inv(rep), y.rep)
            if w and w[0][0] == cone.factor:
                rest = w[1:]
                if not (y.factor == cone.factor and not rest):
                    return G.mul(rep, (w[0],))
            return rep
        w = G.mul(G.inv(rep), y)
        if w and w[0][0] == cone.factor:
            return G.mul(rep, (w[0],))
        return rep

    def coset_elements(self, cone: Cone, window=None):
        """Elements of the coset; infinite factors are cut to exponents in ``window``."""
        m = self.group.orders[cone.factor]
        if m:
            ks = range(m)
        else:
            lo, hi = window if window is not None else (-3, 3)
            ks = range(lo, hi + 1)
        out = []
        for k in ks:
            out.append(self.group.mul(cone.rep, ((cone.factor, k),) if k else ()))
        return out

    def neighbors(self, v):
        G = self.group
        if isinstance(v, Cone):
            return self.coset_elements(v)
        out = [G.mul(v, s) for s in self._gens]
        out.extend(G.cone_of(v, f) for f in self.peripheral)
        return out

    def extends(self, o, x) -> bool:
        if not isinstance(x, Cone) or self.group.orders[x.factor]:
            return super().extends(o, x)
        # infinite coset: distances from o are constant outside a window around o's projection
        p = self.coset_projection_point(x, o) if o != x else x.rep
        k0 = self._coset_exponent(x, p)
        d = self.dist(o, x)
        return any(self.dist(o, y) == d + 1 for y in self.coset_elements(x, (k0 - 3, k0 + 3)))

    def _coset_exponent(self, cone: Cone, p) -> int:
        w = self.group.mul(self.group.inv(cone.rep), p)
        return w[0][1] if w else 0

    def interval_successors(self, v, y):
        if isinstance(v, Cone):
            if y == v:
                return []
            p = self.coset_projection_point(v, y)
            return [p] if self.dist(p, y) == self.dist(v, y) - 1 else []
        return super().interval_successors(v, y)

    def label(self, v) -> str:
        if isinstance(v, Cone):
            return self.group.format_cone(v)
        return self.group.format(v)

    _CONE = re.compile(r"^c\((?P<rep>[^<]*)<(?P<f>[a-z])>\)$")

    def parse_vertex(self, text):
        if not isinstance(text, str):
            return text
        text = text.strip()
        m = self._CONE.match(text)
        if m:
            f = self.group.names.index(m.group("f"))
            if f not in self.peripheral:
                raise UnknownVertexError(text)
            rep = self.group.parse(m.group("rep") or "e")
            return self.group.cone_of(rep, f)
        return self.group.parse(text)

    def is_vertex(self, v) -> bool:
        return isinstance(v, Cone) or isinstance(v, tuple)

    def ball_structure(self, radius: int, limit: int | None = None):
        """Cayley ball of the given word radius plus one cone per coset meeting it."""
        G = self.group
        elems = G.ball(radius, limit=limit)
        if limit is not None and len(elems) > limit:
            return elems, None
        verts = list(elems)
        index = {v: i for i, v in enumerate(verts)}
        edges = []
        for i, v in enumerate(elems):
            for s in self._gens:
                j = index.get(G.mul(v, s))
                if j is not None and i < j:
                    edges.append((i, j))
        for v in elems:
            i = index[v]
            for f in self.peripheral:
                c = G.cone_of(v, f)
                j = index.get(c)
                if j is None:
                    j = index[c] = len(verts)
                    verts.append(c)
                edges.append((i, j))
        return verts, edges


class CustomAction(GroupAction):
    """A finite connected graph with explicit automorphisms."""

    family = "custom"
    tag = "custom"
    exact_balls = False  # induced balls may lose shortcuts through the outside

    def __init__(self, vertices, edges, automorphisms=None, basepoint=None):
        self.vertices = [str(v) for v in vertices]
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise ConfigError("duplicate vertex ids in custom graph")
        adj = [set() for _ in self.vertices]
        for u, v in edges:
            u, v = str(u), str(v)
            if u not in self._index or v not in self._index:
                raise UnknownVertexError(u if u not in self._index else v)
            if u == v:
                continue
            adj[self._index[u]].add(self._index[v])
            adj[self._index[v]].add(self._index[u])
        self._adj = [sorted(a) for a in adj]
        self.edges = sorted({(min(i, j), max(i, j)) for i, a in enumerate(self._adj) for j in a})
        indptr = np.zeros(len(self.vertices) + 1, dtype=np.int32)
        indptr[1:] = np.cumsum([len(a) for a in self._adj])
        indices = np.array([j for a in self._adj for j in a], dtype=np.int32)
        self._D = kernels.distance_matrix(indptr, indices)
        automorphisms = automorphisms or {}
        self.group = PermutationGroup(self.vertices, automorphisms)
        for nm in self.group.names:
            g = self.group.generator(nm)
            for i, j in self.edges:
                if g[j] not in self._adj[g[i]]:
                    raise ConfigError(f"map {nm!r} is not a graph automorphism",
                                      diagnostics=[f"edge {self.vertices[i]}-{self.vertices[j]} not preserved"])
        self.basepoint = str(basepoint) if basepoint is not None else self.vertices[0]
        if self.basepoint not in self._index:
            raise UnknownVertexError(self.basepoint)

    def __repr__(self):
        return f"CustomAction({len(self.vertices)} vertices, {len(self.edges)} edges)"

    @classmethod
    def from_csv(cls, path, automorphisms=None, basepoint=None):
        """Read an adjacency CSV with header ``u,v``."""
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [h.strip() for h in reader.fieldnames[:2]] != ["u", "v"]:
                raise ConfigError(f"{path}: expected header 'u,v'")
            edges = [(row["u"].strip(), row["v"].strip()) for row in reader]
        verts = []
        seen = set()
        for u, v in edges:
            for w in (u, v):
                if w not in seen:
                    seen.add(w)
                    verts.append(w)
        return cls(verts, edges, automorphisms, basepoint)

    def act(self, g, v):
        return self.group.act(g, v)

    def dist(self, u, v) -> int:
        try:
            d = int(self._D[self._index[u], self._index[v]])
        except KeyError as exc:
            raise UnknownVertexError(exc.args[0]) from None
        if d < 0:
            raise LabError(f"{u} and {v} lie in different components")
        return d

    def neighbors(self, v):
        return [self.vertices[j] for j in self._adj[self._index[v]]]

    def distance_table(self, xs):
        return _MatrixTable(self, xs)

    def label(self, v) -> str:
        return v

    def parse_vertex(self, text):
        text = str(text)
        if text not in self._index:
            raise UnknownVertexError(text)
        return text

    def is_vertex(self, v) -> bool:
        return v in self._index

    def ball_structure(self, radius: int, limit: int | None = None):
        o = self._index[self.basepoint]
        row = self._D[o]
        order = sorted((i for i in range(len(self.vertices)) if 0 <= row[i] <= radius), key=lambda i: (row[i], i))
        if limit is not None and len(order) > limit:
            return order, None
        pos = {i: k for k, i in enumerate(order)}
        edges = []
        for i, j in self.edges:
            if i in pos and j in pos:
                a, b = pos[i], pos[j]
                edges.append((min(a, b), max(a, b)))
        return [self.vertices[i] for i in order], sorted(edges)


def path_graph(n: int) -> CustomAction:
    verts = [f"v{i}" for i in range(n)]
    return CustomAction(verts, list(zip(verts, verts[1:])))


def cycle_graph(n: int) -> CustomAction:
    verts = [f"v{i}" for i in range(n)]
    return CustomAction(verts, [(verts[i], verts[(i + 1) % n]) for i in range(n)])


def _cyclic_orders(spec):
    if spec["family"] == "free":
        rank = int(spec.get("rank", 2))
        return [0] * rank
    orders = spec.get("orders")
    if orders is None:
        raise ConfigError("free_product needs 'orders'", diagnostics=["params.orders: missing"])
    return [int(m) for m in orders]


def action_from_spec(spec: dict, base: Path | None = None) -> GroupAction:
    """Build an action from a group-specification mapping.

    ``{"family": "free", "rank": 2}``,
    ``{"family": "free_product", "orders": [3, 4], "names": "st", "coned": true}``,
    ``{"family": "custom", "edges": [["u","v"], ...], "automorphisms": {"r": {...}}}``
    (``"edges_csv"`` and ``"automorphisms_csv"`` read files instead).
    """
    fam = spec.get("family")
    if fam in ("free", "free_product"):
        orders = _cyclic_orders(spec)
        names = spec.get("names")
        group = CyclicFreeProduct(orders, list(names) if names else None)
        if spec.get("coned"):
            return ConedOffAction(group, spec.get("peripheral"))
        return CayleyAction(group)
    if fam == "custom":
        autos = spec.get("automorphisms") or {}
        if "automorphisms_csv" in spec:
            autos = read_permutation_csv(_resolve(spec["automorphisms_csv"], base))
        if "edges_csv" in spec:
            return CustomAction.from_csv(_resolve(spec["edges_csv"], base), autos, spec.get("basepoint"))
        edges = spec.get("edges", [])
        verts = spec.get("vertices")
        if verts is None:
            verts = []
            for e in edges:
                for w in e:
                    if str(w) not in verts:
                        verts.append(str(w))
        return CustomAction(verts, edges, autos, spec.get("basepoint"))
    raise ConfigError(f"unknown group family {fam!r}", diagnostics=[f"family: {fam!r}"])


def _resolve(p, base):
    p = Path(p)
    if base is not None and not p.is_absolute():
        p = Path(base) / p
    return p


def read_permutation_csv(path) -> dict:
    """Automorphisms as CSV rows ``name,vertex,image``."""
    out: dict[str, dict] = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames[:3]] != ["name", "vertex", "image"]:
            raise ConfigError(f"{path}: expected header 'name,vertex,image'")
        for row in reader:
            out.setdefault(row["name"].strip(), {})[row["vertex"].strip()] = row["image"].strip()
    return out


def load_group_spec(path) -> GroupAction:
    path = Path(path)
    return action_from_spec(json.loads(path.read_text()), path.parent)


def require_in_ball(ball, v):
    if not ball.contains(v):
        raise OutOfBallError(f"{ball.space.label(v)} is outside the working ball (radius {ball.radius})")
    return v


def free_group(rank: int = 2) -> CayleyAction:
    return CayleyAction(CyclicFreeProduct([0] * rank))


def free_product(orders, names=None, coned: bool = False, peripheral=None) -> GroupAction:
    group = CyclicFreeProduct(orders, names)
    return ConedOffAction(group, peripheral) if coned else CayleyAction(group)
