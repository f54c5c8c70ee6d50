"""Independent reference computations.

Nothing here imports the distance or group code under test: free reduction
works on strings, cyclic free products on plain tuples, and graph distances
come from networkx.
"""

from __future__ import annotations

import itertools

import networkx as nx
import numpy as np

INV = {"a": "A", "A": "a", "b": "B", "B": "b"}


def reduce_word(w: str) -> str:
    out = []
    for ch in w:
        if ch == "e":
            continue
        if out and out[-1] == INV[ch]:
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def inverse_word(w: str) -> str:
    return "".join(INV[c] for c in reversed(w) if c != "e")


def tree_dist(u: str, v: str) -> int:
    return len(reduce_word(inverse_word(u) + v))


def f2_ball_words(radius: int) -> list[str]:
    out = [""]
    frontier = [""]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for c in "aAbB":
                if w and w[-1] == INV[c]:
                    continue
                nxt.append(w + c)
        out.extend(nxt)
        frontier = nxt
    return out


def label(w: str) -> str:
    return w or "e"


def point_horofunction(x: str, y: str) -> int:
    return tree_dist(x, y) - tree_dist("", y)


def busemann_tree(x: str, ray_word: str, n: int = 64) -> int:
    """lim_k d(x, w^k) - d(o, w^k) by taking k large; exact in the tree once k > |x|."""
    y = reduce_word(ray_word * n)
    return tree_dist(x, y) - len(y)


def gromov_tree(x: str, y: str, z: str = "") -> float:
    return (tree_dist(x, z) + tree_dist(y, z) - tree_dist(x, y)) / 2


def nx_graph(ball) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(ball.labels)
    g.add_edges_from((ball.labels[i], ball.labels[j]) for i, j in ball.edge_array.tolist())
    return g


def nx_matrix(g: nx.Graph, order) -> np.ndarray:
    pos = {v: i for i, v in enumerate(order)}
    D = np.full((len(order), len(order)), -1, dtype=np.int64)
    for s, row in nx.all_pairs_shortest_path_length(g):
        for t, d in row.items():
            D[pos[s], pos[t]] = d
    return D


def brute_delta2(D: np.ndarray) -> int:
    """Twice the four-point defect, exhaustive over quadruples."""
    n = len(D)
    best = 0
    for i, j, k in itertools.combinations(range(n), 3):
        ls = np.arange(k + 1, n)
        if not len(ls):
            continue
        s = np.sort(np.stack([D[i, j] + D[k, ls], D[i, k] + D[j, ls], D[i, ls] + D[j, k]]), axis=0)
        best = max(best, int((s[2] - s[1]).max()))
    return best


def all_geodesics_pass(g: nx.Graph, x, z, w) -> bool:
    return all(w in p for p in nx.all_shortest_paths(g, x, z))


def brute_acylindricity_f2(r: int, L: int, M: int) -> int:
    """Exhaustive count with string reduction: movers matrix, then pair counts as a product."""
    words = f2_ball_words(M)
    n = len(words)
    pos = {w: i for i, w in enumerate(words)}
    mov = np.zeros((n, n), dtype=np.int64)  # mov[g, x] = 1 iff d(x, gx) <= r
    for gi, g in enumerate(words):
        for xi, x in enumerate(words):
            if len(reduce_word(inverse_word(x) + g + x)) <= r:
                mov[gi, xi] = 1
    counts = mov.T @ mov
    D = np.array([[tree_dist(u, v) for v in words] for u in words])
    far = D > L
    return int(counts[far].max()) if far.any() else 0


# -- cyclic free products on tuples ----------------------------------------------------------

class FreeProductOracle:
    """Normal forms as tuples of (factor, exponent): exponents in 1..m-1, or nonzero integers for m = 0."""

    def __init__(self, orders):
        self.orders = orders

    def gens(self):
        out = []
        for f, m in enumerate(self.orders):
            out.append(((f, 1),))
            out.append(((f, m - 1 if m else -1),))
        return sorted(set(out))

    def mul(self, x, y):
        out = list(x)
        for f, e in y:
            if out and out[-1][0] == f:
                m = self.orders[f]
                e2 = (out[-1][1] + e) % m if m else out[-1][1] + e
                out.pop()
                if e2:
                    out.append((f, e2))
            else:
                out.append((f, e))
        return tuple(out)

    def ball(self, radius):
        seen = {()}
        frontier = [()]
        for _ in range(radius):
            nxt = []
            for x in frontier:
                for s in self.gens():
                    y = self.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def syllable_cost(self, f, e):
        m = self.orders[f]
        return min(e % m, m - e % m) if m else abs(e)

    def cone(self, x, f):
        return ("c", x[:-1] if x and x[-1][0] == f else x, f)

    def act(self, g, node):
        """Left multiplication on ("g", x) and ("c", rep, f) nodes."""
        if node[0] == "g":
            return ("g", self.mul(g, node[1]))
        return self.cone(self.mul(g, node[1]), node[2])

    def coned_graph(self, radius):
        """Cayley ball of the given word radius plus a cone for every coset g<s_f> it meets."""
        els = self.ball(radius)
        g = nx.Graph()
        for x in els:
            g.add_node(("g", x))
            for s in self.gens():
                y = self.mul(x, s)
                if y in els:
                    g.add_edge(("g", x), ("g", y))
        for x in els:
            for f in range(len(self.orders)):
                g.add_edge(("g", x), self.cone(x, f))
        return g

    def coset_members(self, rep, f):
        return [self.mul(rep, ((f, k),)) if k else rep for k in range(self.orders[f])]

    def d_S(self, f, i, j):
        return self.syllable_cost(f, i - j)


def brute_bcp(orders, scope: int, slack: int = 2) -> tuple[int, int]:
    """(least K, triples with positive coset distance) by deletion tests in networkx."""
    P = FreeProductOracle(orders)
    G = P.coned_graph(scope + slack)
    inner = {("g", x) for x in P.ball(scope)}
    inner_nodes = [v for v in G.nodes if v in inner or (v[0] == "c" and any(("g", m) in inner for m in P.coset_members(v[1], v[2])))]
    # cones inside the scope ball: attached to an element of the scope ball
    D = dict(nx.all_pairs_shortest_path_length(G))
    scan = sorted(inner_nodes, key=repr)
    cones = [v for v in scan if v[0] == "c"]
    K = 0
    triples = 0
    for c in cones:
        _, rep, f = c
        members = P.coset_members(rep, f)
        expo = {("g", m): k for k, m in enumerate(members)}
        nb = [u for u in G.neighbors(c)]

        def entry(x):
            return {expo[u] for u in nb if D[x][u] == D[x][c] - 1}

        ent = {x: entry(x) for x in scan if x != c}
        H = G.copy()
        H.remove_node(c)
        for x, y in itertools.combinations([v for v in scan if v != c], 2):
            pts = ent[x] | ent[y]
            dist = max((P.d_S(f, i, j) for i in pts for j in pts), default=0)
            if dist <= 0:
                continue
            triples += 1
            if dist <= K:
                continue
            try:
                d2 = nx.shortest_path_length(H, x, y)
            except nx.NetworkXNoPath:
                d2 = None
            guard = d2 is None or d2 > D[x][y]
            if not guard:
                K = dist
    return K, triples


# -- projection complex of a chain of axes in the tree -------------------------------------------

def tree_geodesic(u: str, v: str) -> list[str]:
    step = reduce_word(inverse_word(u) + v)
    return [reduce_word(u + step[:k]) for k in range(len(step) + 1)]


def axis_window(f: str, lo: int, hi: int, left: str = "") -> list[str]:
    """Union of tree geodesics between consecutive orbit points left f^k o, k in [lo, hi]."""
    pts = [reduce_word(left + (f * k if k >= 0 else inverse_word(f) * (-k))) for k in range(lo, hi + 1)]
    out = [pts[0]]
    for p, q in zip(pts, pts[1:]):
        out.extend(tree_geodesic(p, q)[1:])
    return out


def chain_oracle(step: str = "baaa", f: str = "a", length: int = 5, window: int = 4):
    members = [axis_window(f, -window, window, step * i) for i in range(length)]
    n = len(members)

    def proj(u, v):
        hit = set()
        for x in members[v]:
            ds = [tree_dist(x, t) for t in members[u]]
            m = min(ds)
            hit.update(t for t, d in zip(members[u], ds) if d == m)
        return hit

    P = {(u, v): proj(u, v) for u in range(n) for v in range(n) if u != v}

    def d(u, v, w):
        pts = list(P[u, v] | P[u, w])
        return max((tree_dist(p, q) for p in pts for q in pts), default=0)

    def complex_graph(K):
        g = nx.Graph()
        g.add_nodes_from(range(n))
        for a, b in itertools.combinations(range(n), 2):
            if not any(d(w, a, b) > K for w in range(n) if w not in (a, b)):
                g.add_edge(a, b)
        return g

    def forcing_holds(K):
        g = complex_graph(K)
        for a, b in itertools.combinations(range(n), 2):
            if not nx.has_path(g, a, b):
                return False
            for w in range(n):
                if w not in (a, b) and d(w, a, b) > K and not all_geodesics_pass(g, a, b, w):
                    return False
        return True

    top = max(d(w, a, b) for a, b in itertools.permutations(range(n), 2) for w in range(n) if w not in (a, b))
    Khat = next(K for K in range(top + 1) if forcing_holds(K))
    return {"d": d, "complex": complex_graph, "Khat": Khat, "members": members}


# -- boundary points of the tree as infinite reduced words ---------------------------------------------

def infinite_word(prefix: str, period: str, length: int = 60) -> str:
    """First ``length`` letters of the reduced infinite word prefix.period^inf."""
    w = reduce_word(prefix + period * (length + len(prefix)))
    return w[:length]


def common_prefix(u: str, v: str) -> int:
    k = 0
    for a, b in zip(u, v):
        if a != b:
            break
        k += 1
    return k


def north_south_oracle(g: str, words: list[str], T: int, n_max: int) -> int | None:
    """Least n0 with |common prefix of g^n w x^inf and g^inf| >= T for n0 <= n <= n_max."""
    plus = infinite_word("", g)
    last_bad = -1
    for w in words:
        for n in range(n_max + 1):
            if common_prefix(infinite_word(g * n + w, w[-1]), plus) < T:
                last_bad = max(last_bad, n)
    n0 = last_bad + 1
    return n0 if n0 <= n_max else None


def reduced_words(length: int) -> list[str]:
    return [w for w in f2_ball_words(length) if len(w) == length]


def myrberg_segments(factors, R: int = 1) -> list[int]:
    """Fellow-travel lengths of [o, W o] with g_i . window(f_i) for W = prod h_i f_i^(2 n_i)."""
    W = reduce_word("".join(h + f * k for h, f, k in factors))
    geo = [W[:i] for i in range(len(W) + 1)]
    out = []
    prefix = ""
    for h, f, k in factors:
        prefix = reduce_word(prefix + h)
        win = axis_window(f, -2, k + 2, prefix)
        near = [i for i, p in enumerate(geo) if min(tree_dist(p, a) for a in win) <= R]
        out.append(max(near) - min(near) if near else 0)
        prefix = reduce_word(prefix + f * k)
    return out


def bounded_axis_tau(orders, axis_nodes, a, n_range, radius: int = 12) -> int:
    """max over n != 0, a^n != 1, of diam of the projection of a^n.axis onto axis, in the coned graph."""
    P = FreeProductOracle(orders)
    G = P.coned_graph(radius)
    D = {}

    def dist(u, v):
        if u not in D:
            D[u] = nx.single_source_shortest_path_length(G, u)
        return D[u][v]

    tau = 0
    for n in n_range:
        an = ()
        for _ in range(abs(n)):
            an = P.mul(an, a if n > 0 else tuple((f, (P.orders[f] - e) if P.orders[f] else -e) for f, e in reversed(a)))
        if n == 0 or an == ():
            continue
        moved = [P.act(an, v) for v in axis_nodes]
        hit = set()
        for x in moved:
            ds = [dist(x, t) for t in axis_nodes]
            m = min(ds)
            hit.update(t for t, d in zip(axis_nodes, ds) if d == m)
        hit = list(hit)
        tau = max(tau, max((dist(p, q) for p in hit for q in hit), default=0))
    return tau
