"""Ordinals below omega^omega in Cantor normal form.

An ordinal is a coefficient vector: ``coeffs[i]`` multiplies omega^i. Natural
(Hessenberg) sum and product are then coefficientwise addition and
polynomial convolution, because finite exponents add as integers.
omega^omega itself is not representable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .defect import Cmp
from .errors import ArgumentError


@total_ordering
@dataclass(frozen=True)
class OrdinalCNF:
    coeffs: tuple = ()

    def __post_init__(self):
        c = tuple(int(x) for x in self.coeffs)
        if any(x < 0 for x in c):
            raise ArgumentError(f"negative coefficient in {c}")
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def finite(cls, n: int) -> "OrdinalCNF":
        return cls((n,))

    @property
    def degree(self) -> int:
        """Exponent of the leading omega power; -1 for zero."""
        return len(self.coeffs) - 1

    def __lt__(self, other):
        if not isinstance(other, OrdinalCNF):
            return NotImplemented
        return compare_ordinals(self, other) is Cmp.LESS

    def __str__(self):
        return format_ordinal(self)


ZERO = OrdinalCNF()
ONE = OrdinalCNF((1,))


def nat_sum(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    n = max(len(a.coeffs), len(b.coeffs))
    pa = a.coeffs + (0,) * (n - len(a.coeffs))
    pb = b.coeffs + (0,) * (n - len(b.coeffs))
    return OrdinalCNF(tuple(x + y for x, y in zip(pa, pb)))


def nat_prod(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    if not a.coeffs or not b.coeffs:
        return ZERO
    out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x:
            for j, y in enumerate(b.coeffs):
                out[i + j] += x * y
    return OrdinalCNF(tuple(out))


def compare_ordinals(a: OrdinalCNF, b: OrdinalCNF) -> Cmp:
    if len(a.coeffs) != len(b.coeffs):
        return Cmp.of(len(a.coeffs), len(b.coeffs))
    for x, y in zip(reversed(a.coeffs), reversed(b.coeffs)):
        if x != y:
            return Cmp.of(x, y)
    return Cmp.EQUAL


def omega_power(k: int) -> OrdinalCNF:
    if k < 0:
        raise ArgumentError(f"exponent must be nonnegative, got {k}")
    return OrdinalCNF((0,) * k + (1,))


def format_ordinal(a: OrdinalCNF) -> str:
    """Render as e.g. ``ω^3·2 + ω·5 + 7``."""
    if not a.coeffs:
        return "0"
    terms = []
    for i in range(len(a.coeffs) - 1, -1, -1):
        c = a.coeffs[i]
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
            continue
        base = "ω" if i == 1 else f"ω^{i}"
        terms.append(base if c == 1 else f"{base}·{c}")
    return " + ".join(terms)


_TERM = re.compile(r"^(?:(?P<w>[ωw])(?:\^(?P<exp>\d+))?(?:[·*](?P<coef>\d+))?|(?P<num>\d+))$")


def parse_ordinal(text: str) -> OrdinalCNF:
    """Inverse of ``format_ordinal``; also accepts ``w`` for ω and ``*`` for ·.

    Terms may come in any order and repeated exponents are summed.
    """
    text = text.strip()
    if text == "0":
        return ZERO
    coeffs: dict[int, int] = {}
    for raw in text.split("+"):
        m = _TERM.match(raw.replace(" ", ""))
        if not m:
            raise ArgumentError(f"cannot parse ordinal term {raw.strip()!r} in {text!r}")
        if m["num"] is not None:
            exp, coef = 0, int(m["num"])
        else:
            exp = int(m["exp"]) if m["exp"] is not None else 1
            coef = int(m["coef"]) if m["coef"] is not None else 1
        coeffs[exp] = coeffs.get(exp, 0) + coef
    top = max(coeffs)
    return OrdinalCNF(tuple(coeffs.get(i, 0) for i in range(top + 1)))
