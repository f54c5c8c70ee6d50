"""Boundary points represented by escaping sequences.

A :class:`Ray` is a word template with one parameter, e.g. ``"(ab)^n"`` or
``"Ba^n"``, optionally translated on the left by a group element.  Its k-th
point is ``g * template(k) * o``.  Nothing here is ever a completed boundary
object: comparisons are Gromov products of far points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import words
from .errors import LabError


@dataclass(frozen=True)
class Ray:
    action: object = field(repr=False, compare=False)
    template: str
    left: tuple = ()  # group element applied on the left
    name: str = ""

    def __post_init__(self):
        if not words.has_parameter(self.template):
            raise LabError(f"ray template {self.template!r} must mention n")

    @classmethod
    def of(cls, action, template: str, name: str | None = None) -> "Ray":
        return cls(action, template, action.group.identity, name or template.replace("^n", "^inf"))

    @classmethod
    def attractor(cls, iso) -> "Ray":
        """Orbit ray g^n o of an isometry (its attracting fixed point when loxodromic)."""
        w = iso.word
        return cls(iso.action, f"({w})^n", iso.action.group.identity, f"({w})^+")

    @classmethod
    def repeller(cls, iso) -> "Ray":
        w = iso.word
        return cls(iso.action, f"({w})^-n", iso.action.group.identity, f"({w})^-")

    def element(self, k: int):
        G = self.action.group
        return G.mul(self.left, G.parse(self.template, k))

    def point(self, k: int):
        return self.action.orbit_point(self.element(k))

    def points(self, ks):
        return [self.point(k) for k in ks]

    def translate(self, g) -> "Ray":
        """The ray g * self; ``g`` is an Isometry or a raw element."""
        el = getattr(g, "element", g)
        G = self.action.group
        word = G.format(el)
        nm = f"{word}.{self.name}" if word != "e" else self.name
        return Ray(self.action, self.template, G.mul(el, self.left), nm)

    @property
    def label(self) -> str:
        return self.name or self.template

    def depth_for(self, distance: int, cap: int = 4096) -> int:
        """Least k with d(o, point(k)) >= distance."""
        o = self.action.basepoint
        k = 0
        while self.action.dist(o, self.point(k)) < distance:
            k += 1
            if k > cap:
                raise LabError(f"ray {self.label} does not escape (stuck below distance {distance})")
        return k

    def escapes(self, horizon: int = 64) -> bool:
        o = self.action.basepoint
        d = [self.action.dist(o, self.point(k)) for k in (horizon // 2, horizon)]
        return d[1] > d[0]


def ray_product2(xi: Ray, eta: Ray, reach: int) -> int:
    """Doubled Gromov product at o of the first points of xi, eta at distance >= reach."""
    act = xi.action
    p = xi.point(xi.depth_for(reach))
    q = eta.point(eta.depth_for(reach))
    return act.gromov_product2(p, q, act.basepoint)


def ray_product(xi: Ray, eta: Ray, reach: int):
    from .graph import GromovProduct

    return GromovProduct(ray_product2(xi, eta, reach))


def word_rays(action, length: int) -> list[Ray]:
    """Rays ``w x^n`` for every reduced word w of the given length, x its last letter.

    Only for free groups: these rays have pairwise distinct length-``length``
    prefixes.
    """
    G = action.group
    if any(m != 0 for m in G.orders):
        raise LabError("word_rays needs a free group")
    out = []
    for el in G.ball(length):
        if G.length(el) != length:
            continue
        w = G.format(el)
        out.append(Ray.of(action, f"{w}{w[-1]}^n", f"{w}{w[-1]}^inf"))
    return out
