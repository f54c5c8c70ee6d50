"""Word templates: ``"(ab)^n"``, ``"ba^nB"``, ``"t^2s"``, ``"a^-3"``.

Lower-case letters are generators, upper-case letters their inverses.  A
template may mention a single integer parameter ``n`` inside exponents
(``^n``, ``^-n``, ``^2n``); evaluating it with a concrete ``n`` yields a
group element.  ``e`` denotes the identity when it is not a generator name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

_TOKEN = re.compile(r"\s*(?:(?P<letter>[A-Za-z])|(?P<open>\()|(?P<close>\))|(?P<caret>\^)"
                    r"|(?P<exp>-?\d*n|-?\d+)|(?P<skip>[*.·]))")

_EXPONENT = re.compile(r"\s*(-?\d*n|-?\d+)")


@dataclass(frozen=True)
class Letter:
    name: str  # lower-case generator name
    inverse: bool


@dataclass(frozen=True)
class Power:
    body: tuple  # tuple of nodes
    coeff: int  # exponent = coeff * n + const
    const: int


class TemplateSyntaxError(ValueError):
    pass


def _parse_exponent(text: str) -> tuple[int, int]:
    if text.endswith("n"):
        head = text[:-1]
        if head in ("", "+"):
            return 1, 0
        if head == "-":
            return -1, 0
        return int(head), 0
    return 0, int(text)


@lru_cache(maxsize=4096)
def parse(template: str) -> tuple:
    """Parse a template into a tuple of :class:`Letter` / :class:`Power` nodes."""
    pos = 0
    stack: list[list] = [[]]
    while pos < len(template):
        m = _TOKEN.match(template, pos)
        if m is None or m.end() == pos:
            if template[pos:].strip() == "":
                break
            raise TemplateSyntaxError(f"unexpected character {template[pos]!r} in {template!r}")
        pos = m.end()
        if m.group("letter"):
            ch = m.group("letter")
            stack[-1].append(Letter(ch.lower(), ch.isupper()))
        elif m.group("open"):
            stack.append([])
        elif m.group("close"):
            if len(stack) == 1:
                raise TemplateSyntaxError(f"unbalanced ')' in {template!r}")
            body = tuple(stack.pop())
            stack[-1].append(Power(body, 0, 1))
        elif m.group("caret"):
            m2 = _EXPONENT.match(template, pos)
            if m2 is None:
                raise TemplateSyntaxError(f"missing exponent in {template!r}")
            pos = m2.end()
            if not stack[-1]:
                raise TemplateSyntaxError(f"exponent without base in {template!r}")
            base = stack[-1].pop()
            coeff, const = _parse_exponent(m2.group(1))
            if isinstance(base, Power) and base.coeff == 0 and base.const == 1:
                stack[-1].append(Power(base.body, coeff, const))
            else:
                stack[-1].append(Power((base,), coeff, const))
        elif m.group("exp"):
            raise TemplateSyntaxError(f"stray exponent {m.group('exp')!r} in {template!r}")
    if len(stack) != 1:
        raise TemplateSyntaxError(f"unbalanced '(' in {template!r}")
    return tuple(stack[0])


def has_parameter(template: str) -> bool:
    def walk(nodes):
        for node in nodes:
            if isinstance(node, Power) and (node.coeff or walk(node.body)):
                return True
        return False

    return walk(parse(template))


def evaluate(template: str, one, letter, mul, inv, n: int | None = None):
    """Fold a template into a group using the supplied operations.

    ``letter(name)`` returns the generator called ``name`` (or raises
    ``KeyError``); ``e`` is read as the identity when it is not a generator.
    """

    def power(x, k):
        if k < 0:
            x, k = inv(x), -k
        result = one
        while k:
            if k & 1:
                result = mul(result, x)
            x = mul(x, x)
            k >>= 1
        return result

    def walk(nodes):
        acc = one
        for node in nodes:
            if isinstance(node, Letter):
                try:
                    g = letter(node.name)
                except KeyError:
                    if node.name == "e" and not node.inverse:
                        continue
                    raise TemplateSyntaxError(f"unknown generator {node.name!r} in {template!r}") from None
                acc = mul(acc, inv(g) if node.inverse else g)
            else:
                if node.coeff and n is None:
                    raise TemplateSyntaxError(f"template {template!r} needs a value for n")
                k = node.coeff * (n or 0) + node.const
                acc = mul(acc, power(walk(node.body), k))
        return acc

    return walk(parse(template))
