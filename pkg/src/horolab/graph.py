"""Finite graphs with exact distances: balls, Gromov products, guards, delta."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

import numpy as np

from . import kernels
from .errors import LabError, ResourceLimitError, UnknownVertexError

DEFAULT_MAX_VERTICES = 250_000
MATRIX_CAP = 4000  # full distance matrix only below this many vertices
_ROW_CACHE = 4096


@total_ordering
class HalfInt:
    """Exact half-integer stored as twice its value."""

    __slots__ = ("doubled",)

    def __init__(self, doubled: int):
        self.doubled = int(doubled)

    @classmethod
    def of(cls, value) -> "HalfInt":
        f = Fraction(value)
        if (2 * f).denominator != 1:
            raise ValueError(f"{value} is not a half-integer")
        return cls(int(2 * f))

    @property
    def value(self) -> Fraction:
        return Fraction(self.doubled, 2)

    def __float__(self):
        return self.doubled / 2

    def __int__(self):
        if self.doubled % 2:
            raise ValueError(f"{self} is not an integer")
        return self.doubled // 2

    def _other(self, other):
        if isinstance(other, HalfInt):
            return other.doubled
        f = Fraction(other)
        return 2 * f

    def __eq__(self, other):
        try:
            return self.doubled == self._other(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.doubled < self._other(other)

    def __hash__(self):
        return hash(self.value)

    def __add__(self, other):
        return HalfInt(self.doubled + int(self._other(other)))

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def __str__(self):
        return str(self.doubled // 2) if self.doubled % 2 == 0 else f"{self.doubled}/2"

    def to_json(self):
        return self.doubled // 2 if self.doubled % 2 == 0 else self.doubled / 2


class GromovProduct(HalfInt):
    __slots__ = ()


class FiniteGraph:
    """Unit-length graph on a finite vertex list with CSR adjacency and lazy BFS rows.

    ``vertices`` are the objects of the ambient space (group elements, cone
    vertices or string ids); ``labels`` render them.  Distance rows are
    computed on demand; :attr:`dist` builds the whole matrix for small graphs.
    """

    def __init__(self, vertices, edges, *, basepoint=None, radius=0, space=None, labels=None, certified=True):
        self.space = space
        self.vertices = list(vertices)
        self.n = len(self.vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != self.n:
            raise LabError("duplicate vertices")
        if labels is None:
            labels = [space.label(v) if space is not None else str(v) for v in self.vertices]
        self.labels = list(labels)
        self._label_index = {lab: i for i, lab in enumerate(self.labels)}
        pairs = set()
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                continue
            pairs.add((min(i, j), max(i, j)))
        self._edges = np.array(sorted(pairs), dtype=np.int32).reshape(-1, 2)
        deg = np.zeros(self.n + 1, dtype=np.int32)
        if len(self._edges):
            np.add.at(deg, self._edges[:, 0] + 1, 1)
            np.add.at(deg, self._edges[:, 1] + 1, 1)
        self.indptr = np.cumsum(deg, dtype=np.int64).astype(np.int32)
        nbrs = [[] for _ in range(self.n)]
        for i, j in self._edges.tolist():
            nbrs[i].append(j)
            nbrs[j].append(i)
        self.indices = np.array([j for lst in nbrs for j in sorted(lst)], dtype=np.int32)
        self.basepoint = self.vertices[0] if basepoint is None and self.n else basepoint
        self.radius = int(radius)
        self.certified = bool(certified)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._matrix = None
        self._table = None

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, edges={len(self._edges)}, radius={self.radius})"

    def __len__(self):
        return self.n

    # -- lookup ----------------------------------------------------------------
    def idx(self, v) -> int:
        i = self.index.get(v)
        if i is None and isinstance(v, str):
            i = self._label_index.get(v)
            if i is None and self.space is not None:
                try:
                    i = self.index.get(self.space.parse_vertex(v))
                except (LabError, ValueError, KeyError):
                    i = None
        if i is None:
            raise UnknownVertexError(v if isinstance(v, str) else self._safe_label(v))
        return i

    def _safe_label(self, v):
        try:
            return self.space.label(v) if self.space is not None else str(v)
        except Exception:
            return repr(v)

    def vertex(self, v):
        return self.vertices[self.idx(v)]

    def label(self, v) -> str:
        return self.labels[self.idx(v)]

    def contains(self, v) -> bool:
        try:
            self.idx(v)
        except UnknownVertexError:
            return False
        return True

    @property
    def edges(self) -> list[tuple]:
        return [(self.vertices[i], self.vertices[j]) for i, j in self._edges.tolist()]

    @property
    def edge_array(self) -> np.ndarray:
        return self._edges

    def neighbor_indices(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, v) -> int:
        i = self.idx(v)
        return int(self.indptr[i + 1] - self.indptr[i])

    # -- distances -------------------------------------------------------------
    def row(self, v) -> np.ndarray:
        i = v if isinstance(v, (int, np.integer)) and not isinstance(v, bool) else self.idx(v)
        i = int(i)
        if self._matrix is not None:
            return self._matrix[i]
        r = self._rows.get(i)
        if r is None:
            r = kernels.bfs_row(self.indptr, self.indices, i)
            r.setflags(write=False)
            self._rows[i] = r
            if len(self._rows) > _ROW_CACHE:
                self._rows.popitem(last=False)
        else:
            self._rows.move_to_end(i)
        return r

    @property
    def base_row(self) -> np.ndarray:
        return self.row(self.idx(self.basepoint))

    @property
    def dist(self) -> np.ndarray:
        if self._matrix is None:
            if self.n > MATRIX_CAP:
                raise ResourceLimitError(f"distance matrix of {self.n} vertices exceeds cap {MATRIX_CAP}; use rows")
            m = kernels.distance_matrix(self.indptr, self.indices)
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def distance(self, u, v) -> int:
        d = int(self.row(self.idx(u))[self.idx(v)])
        if d < 0:
            raise LabError(f"{self.label(u)} and {self.label(v)} are disconnected")
        return d

    def distances_to(self, y) -> np.ndarray:
        """Ambient distances from every ball vertex to y; y may lie outside the ball."""
        i = self.index.get(y)
        if i is not None and self.space is not None and self.space.exact_balls:
            return self.row(i).astype(np.int64)
        if self.space is None:
            return self.row(self.idx(y)).astype(np.int64)
        if self._table is None:
            self._table = self.space.distance_table(self.vertices)
        return self._table.to(y)

    def level(self, v) -> int:
        return int(self.base_row[self.idx(v)])

    def distance_without(self, u, v, banned) -> int:
        """Distance from u to v after deleting ``banned``; -1 if disconnected."""
        return int(kernels.bfs_pair_avoiding(self.indptr, self.indices, self.idx(u), self.idx(v), self.idx(banned)))

    def geodesic(self, u, v) -> list:
        """One geodesic, choosing the first neighbour in index order at each step."""
        iu, iv = self.idx(u), self.idx(v)
        rv = self.row(iv)
        if rv[iu] < 0:
            raise LabError("disconnected")
        path = [iu]
        cur = iu
        while cur != iv:
            for j in self.neighbor_indices(cur):
                if rv[j] == rv[cur] - 1:
                    cur = int(j)
                    break
            path.append(cur)
        return [self.vertices[i] for i in path]

    def interval(self, u, v) -> np.ndarray:
        """Indices of vertices on some geodesic from u to v."""
        ru, rv = self.row(self.idx(u)), self.row(self.idx(v))
        d = ru[self.idx(v)]
        return np.flatnonzero((ru + rv == d) & (ru >= 0) & (rv >= 0))

    def is_connected(self) -> bool:
        return self.n == 0 or bool((self.row(0) >= 0).all())


class BallGraph(FiniteGraph):
    """Induced subgraph on the radius-R ball around the basepoint of an action."""


def build_ball(action, radius: int, max_vertices: int = DEFAULT_MAX_VERTICES) -> BallGraph:
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    verts, edges = action.ball_structure(radius, limit=max_vertices)
    if edges is None:
        raise ResourceLimitError(f"ball of radius {radius} exceeds {max_vertices} vertices")
    ball = BallGraph(verts, edges, basepoint=action.basepoint, radius=radius, space=action)
    if action.family == "custom":
        ball.certified = _check_custom_certificate(ball, action)
    return ball


def _check_custom_certificate(ball, action) -> bool:
    lv = ball.base_row
    for i in range(ball.n):
        row = ball.row(i)
        for j in range(ball.n):
            if lv[i] + lv[j] <= ball.radius and row[j] != action.dist(ball.vertices[i], ball.vertices[j]):
                return False
    return True


def distance(g: FiniteGraph, u, v) -> int:
    return g.distance(u, v)


def gromov_product(g: FiniteGraph, x, y, z) -> GromovProduct:
    ix, iy, iz = g.idx(x), g.idx(y), g.idx(z)
    rz = g.row(iz)
    return GromovProduct(int(rz[ix]) + int(rz[iy]) - int(g.row(ix)[iy]))


def is_guard(g: FiniteGraph, w, x, z) -> bool:
    """Deletion test: w lies on every geodesic from x to z."""
    iw, ix, iz = g.idx(w), g.idx(x), g.idx(z)
    if iw == ix or iw == iz:
        return True
    d = int(g.row(ix)[iz])
    d2 = int(kernels.bfs_pair_avoiding(g.indptr, g.indices, ix, iz, iw))
    return d2 < 0 or d2 > d


def guard_in_space(space, w, x, z) -> bool:
    """Guard test in the ambient graph using exact distances.

    Every geodesic meets each distance layer of the interval exactly once,
    so w lies on all of them iff it is alone in its layer.
    """
    if w == x or w == z:
        return True
    dxw, dwz, dxz = space.dist(x, w), space.dist(w, z), space.dist(x, z)
    if dxw + dwz != dxz:
        return False
    layer = {x}
    for _ in range(dxw):
        nxt = set()
        for v in layer:
            nxt.update(space.interval_successors(v, z))
            if len(nxt) > 1:
                return False
        layer = nxt
    return layer == {w}


@dataclass(frozen=True)
class DeltaEstimate:
    value: HalfInt
    witness: tuple  # vertex labels of a worst quadruple, empty when delta is 0
    quadruples: int  # number examined; -1 means all


def estimate_delta(g: FiniteGraph, sample="exhaustive", seed: int = 0) -> HalfInt:
    return estimate_delta_report(g, sample, seed).value


def estimate_delta_report(g: FiniteGraph, sample="exhaustive", seed: int = 0) -> DeltaEstimate:
    """Four-point defect: for each quadruple, (largest - middle) of the three pair sums, halved."""
    if g.n < 4:
        return DeltaEstimate(HalfInt(0), (), -1)
    D = np.ascontiguousarray(g.dist, dtype=np.int32)
    if sample == "exhaustive":
        best, arg = kernels.four_point_max(D)
        count = -1
    else:
        count = int(sample)
        rng = np.random.default_rng(seed)
        quads = np.stack([rng.choice(g.n, 4, replace=False) for _ in range(count)]).astype(np.int32) if count else np.zeros((0, 4), np.int32)
        best, arg = kernels.four_point_sampled(D, np.ascontiguousarray(quads))
    witness = tuple(g.labels[i] for i in arg) if best > 0 else ()
    return DeltaEstimate(HalfInt(best), witness, count)
