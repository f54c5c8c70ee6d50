"""Marked groups with exact normal forms.

:class:`CyclicFreeProduct` covers every infinite family the lab works with:
free groups (all factors infinite cyclic), ``Z/m * Z/n`` and mixtures such as
``Z * Z/3``.  Elements are tuples of syllables ``(factor, exponent)``; for a
finite factor of order ``m`` the exponent lives in ``1..m-1``.

:class:`PermutationGroup` is the finite group generated by explicit
automorphisms of a custom graph.
"""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass
from functools import total_ordering
from typing import NamedTuple

from . import words
from .errors import LabError

Element = tuple  # tuple[tuple[int, int], ...]


class Cone(NamedTuple):
    """Cone vertex ``c(rep * <factor>)``; ``rep`` has no trailing syllable in ``factor``."""

    rep: tuple
    factor: int


class CyclicFreeProduct:
    def __init__(self, orders, names=None):
        orders = tuple(int(m) for m in orders)
        if not orders:
            raise LabError("a free product needs at least one factor")
        if any(m < 0 or m == 1 for m in orders):
            raise LabError(f"cyclic factor orders must be 0 (infinite) or >= 2, got {orders}")
        if names is None:
            pool = [c for c in string.ascii_lowercase if c != "e"]
            names = pool[: len(orders)]
        names = tuple(names)
        if len(names) != len(orders) or len(set(names)) != len(names):
            raise LabError("need one distinct generator name per factor")
        for nm in names:
            if len(nm) != 1 or not nm.islower() or nm == "e":
                raise LabError(f"generator names must be single lower-case letters other than 'e': {nm!r}")
        self.orders = orders
        self.names = names
        self._index = {nm: i for i, nm in enumerate(names)}
        self.family = "free" if all(m == 0 for m in orders) else "free_product"
        self.identity: Element = ()

    def __repr__(self):
        parts = ["Z" if m == 0 else f"Z/{m}" for m in self.orders]
        return f"CyclicFreeProduct({' * '.join(parts)}; {','.join(self.names)})"

    # -- syllable arithmetic -------------------------------------------------
    def _norm(self, factor: int, exp: int) -> int:
        m = self.orders[factor]
        return exp % m if m else exp

    def syllable_length(self, factor: int, exp: int) -> int:
        m = self.orders[factor]
        if m == 0:
            return abs(exp)
        return min(exp, m - exp)

    def generator(self, name: str) -> Element:
        i = self._index[name]
        return ((i, 1),)

    def generating_set(self) -> list[Element]:
        """Symmetric generating set S, inverses folded for involutions."""
        out = []
        for i, m in enumerate(self.orders):
            out.append(((i, 1),))
            if m != 2:
                out.append(((i, -1 if m == 0 else m - 1),))
        return out

    def mul(self, x: Element, y: Element) -> Element:
        if not x:
            return y
        if not y:
            return x
        i = len(x)
        j = 0
        carry = None
        while i > 0 and j < len(y) and x[i - 1][0] == y[j][0]:
            f = y[j][0]
            e = self._norm(f, x[i - 1][1] + y[j][1])
            i -= 1
            j += 1
            if e != 0:
                carry = (f, e)
                break
        if carry is None:
            return x[:i] + y[j:]
        return x[:i] + (carry,) + y[j:]

    def inv(self, x: Element) -> Element:
        return tuple((f, self._norm(f, -e)) for f, e in reversed(x))

    def power(self, x: Element, k: int) -> Element:
        if k < 0:
            x, k = self.inv(x), -k
        result: Element = ()
        while k:
            if k & 1:
                result = self.mul(result, x)
            x = self.mul(x, x)
            k >>= 1
        return result

    def length(self, x: Element) -> int:
        return sum(self.syllable_length(f, e) for f, e in x)

    def coned_length(self, x: Element) -> int:
        return sum(min(self.syllable_length(f, e), 2) for f, e in x)

    def order_of(self, x: Element) -> int:
        """0 for infinite order."""
        if not x:
            return 1
        # a conjugate of a single syllable has that syllable's order
        k = len(x)
        i = 0
        while 2 * i + 1 < k and x[i][0] == x[k - 1 - i][0] and self._norm(x[i][0], x[i][1] + x[k - 1 - i][1]) == 0:
            i += 1
        core = x[i:k - i]
        if len(core) == 1:
            f, e = core[0]
            m = self.orders[f]
            if m == 0:
                return 0
            from math import gcd

            return m // gcd(m, e)
        return 0

    # -- words -----------------------------------------------------------------
    def parse(self, word: str, n: int | None = None) -> Element:
        word = word.strip()
        if word in ("", "e", "1"):
            return ()
        return words.evaluate(word, (), self.generator, self.mul, self.inv, n)

    def format(self, x: Element) -> str:
        if not x:
            return "e"
        out = []
        for f, e in x:
            nm = self.names[f]
            m = self.orders[f]
            if m == 0:
                out.append(nm * e if e > 0 else nm.upper() * (-e))
            elif e <= m - e:
                out.append(nm * e)
            else:
                out.append(nm.upper() * (m - e))
        return "".join(out)

    def word_key(self, x: Element):
        """Shortlex key: word length, then the rendered word."""
        return (self.length(x), self.format(x))

    def ball(self, radius: int, limit: int | None = None) -> list[Element]:
        """All elements of word length <= radius in breadth-first order."""
        seen = {(): 0}
        order = [()]
        frontier = [()]
        gens = self.generating_set()
        for r in range(radius):
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mul(x, s)
                    if y not in seen:
                        seen[y] = r + 1
                        nxt.append(y)
                        order.append(y)
                        if limit is not None and len(order) > limit:
                            return order
            frontier = nxt
        return order

    # -- cosets of the cyclic factors -----------------------------------------
    def coset_rep(self, x: Element, factor: int) -> Element:
        if x and x[-1][0] == factor:
            return x[:-1]
        return x

    def cone_of(self, x: Element, factor: int) -> Cone:
        return Cone(self.coset_rep(x, factor), factor)

    def format_cone(self, c: Cone) -> str:
        rep = "" if not c.rep else self.format(c.rep)
        return f"c({rep}<{self.names[c.factor]}>)"


class PermutationGroup:
    """Finite group generated by permutations of a vertex list."""

    family = "custom"

    def __init__(self, points, generators: dict[str, dict]):
        self.points = list(points)
        self._pos = {p: i for i, p in enumerate(self.points)}
        n = len(self.points)
        self.names = tuple(generators)
        for nm in self.names:
            if len(nm) != 1 or not nm.islower() or nm == "e":
                raise LabError(f"automorphism names must be single lower-case letters other than 'e': {nm!r}")
        self._gens = {}
        for nm, mapping in generators.items():
            perm = list(range(n))
            for src, dst in mapping.items():
                perm[self._pos[src]] = self._pos[dst]
            if sorted(perm) != list(range(n)):
                raise LabError(f"automorphism {nm!r} is not a permutation")
            self._gens[nm] = tuple(perm)
        self.identity = tuple(range(n))
        self._enumerate()

    def _enumerate(self):
        # shortlex spanning tree of the Cayley graph gives canonical words
        words_of = {self.identity: ""}
        queue = deque([self.identity])
        gens = []
        for nm in self.names:
            gens.append((nm, self._gens[nm]))
            inv = self.inv(self._gens[nm])
            if inv != self._gens[nm]:
                gens.append((nm.upper(), inv))
        while queue:
            x = queue.popleft()
            for sym, s in gens:
                y = self.mul(x, s)
                if y not in words_of:
                    words_of[y] = words_of[x] + sym
                    queue.append(y)
        self._words = words_of
        self.elements = sorted(words_of, key=lambda g: (len(words_of[g]), words_of[g]))

    def generator(self, name: str):
        return self._gens[name]

    def generating_set(self):
        out = []
        for nm in self.names:
            g = self._gens[nm]
            out.append(g)
            if self.inv(g) != g:
                out.append(self.inv(g))
        return out

    @staticmethod
    def mul(x, y):
        # (x*y)(p) = x(y(p)): act by y first
        return tuple(x[i] for i in y)

    @staticmethod
    def inv(x):
        out = [0] * len(x)
        for i, j in enumerate(x):
            out[j] = i
        return tuple(out)

    def power(self, x, k):
        if k < 0:
            x, k = self.inv(x), -k
        r = self.identity
        for _ in range(k):
            r = self.mul(r, x)
        return r

    def length(self, x) -> int:
        return len(self._words[x])

    def order_of(self, x) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def parse(self, word: str, n: int | None = None):
        word = word.strip()
        if word in ("", "e", "1"):
            return self.identity
        return words.evaluate(word, self.identity, self.generator, self.mul, self.inv, n)

    def format(self, x) -> str:
        return self._words[x] or "e"

    def word_key(self, x):
        w = self._words[x]
        return (len(w), w or "e")

    def ball(self, radius: int, limit: int | None = None):
        return [g for g in self.elements if len(self._words[g]) <= radius]

    def act(self, g, point):
        return self.points[g[self._pos[point]]]


@total_ordering
@dataclass(frozen=True, eq=False)
class Isometry:
    """A group element acting on the space of ``action``; compared by normal form."""

    action: object
    element: object

    @property
    def group(self):
        return self.action.group

    @property
    def word(self) -> str:
        return self.group.format(self.element)

    def __repr__(self):
        return f"Isometry({self.word})"

    def __str__(self):
        return self.word

    def __eq__(self, other):
        return isinstance(other, Isometry) and other.action is self.action and other.element == self.element

    def __lt__(self, other):
        return self.group.word_key(self.element) < other.group.word_key(other.element)

    def __hash__(self):
        return hash(self.element)

    def __mul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.action, self.group.mul(self.element, other.element))

    def __pow__(self, k: int) -> "Isometry":
        return Isometry(self.action, self.group.power(self.element, k))

    def inverse(self) -> "Isometry":
        return Isometry(self.action, self.group.inv(self.element))

    def __invert__(self):
        return self.inverse()

    def __call__(self, vertex):
        return self.action.act(self.element, vertex)

    @property
    def is_identity(self) -> bool:
        return self.element == self.group.identity

    def length(self) -> int:
        return self.group.length(self.element)

    def order(self) -> int:
        return self.group.order_of(self.element)
