"""Low-defect polynomials and pairs.

Polynomials are built from three node kinds:

* ``Const(k)``: the constant k >= 1
* ``Product(left, right)``: left(x_1..x_s) * right(x_{s+1}..x_r)
* ``Extend(base, c)``: base(x_1..x_{r-1}) * x_r + c

Variables are numbered 1..r left to right in tree order, so each node owns a
contiguous block and an ``Extend`` node's own variable is the last one of its
block. Every polynomial is evaluated at powers of three: a tuple of
exponents (n_1, ..., n_r) stands for x_i = 3^{n_i}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from math import ceil, log
from typing import Iterator, Optional, Union

from .complexity import ComplexityTable
from .defect import DefectKey
from .errors import ArgumentError, ValidationError

Coeffs = dict[frozenset, int]


@dataclass(frozen=True)
class Const:
    value: int
    degree: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.value, int) or self.value < 1:
            raise ValidationError(f"constant must be a positive integer, got {self.value!r}")


@dataclass(frozen=True)
class Product:
    left: "Expr"
    right: "Expr"
    degree: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "degree", self.left.degree + self.right.degree)


@dataclass(frozen=True)
class Extend:
    base: "Expr"
    addend: int
    degree: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.addend, int) or self.addend < 1:
            raise ValidationError(f"addend must be a positive integer, got {self.addend!r}")
        object.__setattr__(self, "degree", self.base.degree + 1)


Expr = Union[Const, Product, Extend]


@dataclass(frozen=True)
class LowDefectPair:
    expr: Expr
    base_complexity: int

    @property
    def degree(self) -> int:
        return self.expr.degree

    def __str__(self):
        return f"({format_poly(self.expr)}, {self.base_complexity})"


def _certify(table: Optional[ComplexityTable], k: int, budget: int, what: str) -> None:
    if table is None:
        return
    table.check_range(k)
    if budget < table[k]:
        raise ArgumentError(f"{what} {budget} below ||{k}|| = {table[k]}")


def make_const(k: int, C: int, table: Optional[ComplexityTable] = None) -> LowDefectPair:
    _certify(table, k, C, "base complexity")
    return LowDefectPair(Const(k), C)


def tensor_expr(f: Expr, g: Expr) -> Expr:
    if isinstance(f, Const) and isinstance(g, Const):
        return Const(f.value * g.value)
    return Product(f, g)


def tensor(p1: LowDefectPair, p2: LowDefectPair) -> LowDefectPair:
    return LowDefectPair(tensor_expr(p1.expr, p2.expr), p1.base_complexity + p2.base_complexity)


def extend(p: LowDefectPair, c: int, D: int, table: Optional[ComplexityTable] = None) -> LowDefectPair:
    _certify(table, c, D, "addend complexity")
    return LowDefectPair(Extend(p.expr, c), p.base_complexity + D)


# --- structure ---------------------------------------------------------------


def _coeffs(f: Expr, offset: int) -> Coeffs:
    if isinstance(f, Const):
        return {frozenset(): f.value}
    if isinstance(f, Product):
        left = _coeffs(f.left, offset)
        right = _coeffs(f.right, offset + f.left.degree)
        out: Coeffs = {}
        for s, a in left.items():
            for t, b in right.items():
                out[s | t] = out.get(s | t, 0) + a * b
        return out
    if isinstance(f, Extend):
        var = offset + f.degree
        out = {s | {var}: a for s, a in _coeffs(f.base, offset).items()}
        out[frozenset()] = out.get(frozenset(), 0) + f.addend
        return out
    raise ValidationError(f"not a polynomial node: {f!r}")


def coefficients(f: Expr) -> Coeffs:
    """Multilinear coefficient map {variable set: coefficient}, zero terms omitted."""
    out = {s: a for s, a in _coeffs(f, 0).items() if a}
    r = f.degree
    every = frozenset(range(1, r + 1))
    if any(a < 0 for a in out.values()):
        raise ValidationError("negative coefficient")
    if not out.get(frozenset()):
        raise ValidationError("constant term vanishes")
    if not out.get(every):
        raise ValidationError("leading coefficient vanishes")
    if any(not s <= every for s in out):
        raise ValidationError("variable index outside 1..degree")
    return out


def leading_coefficient(f: Expr) -> int:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Product):
        return leading_coefficient(f.left) * leading_coefficient(f.right)
    return leading_coefficient(f.base)


def canonical_form(coeffs: Coeffs) -> tuple:
    """Coefficient map up to renaming of variables, as a hashable tuple."""
    variables = sorted(set().union(*coeffs)) if coeffs else []
    best = None
    for perm in permutations(range(1, len(variables) + 1)):
        rename = dict(zip(variables, perm))
        form = tuple(sorted((tuple(sorted(rename[v] for v in s)), a) for s, a in coeffs.items()))
        if best is None or form < best:
            best = form
    return best if best is not None else ()


def canonical_key(f: Expr) -> tuple:
    return canonical_form(coefficients(f))


def format_coefficients(coeffs: Coeffs) -> str:
    terms = []
    for s, a in sorted(coeffs.items(), key=lambda t: (-len(t[0]), sorted(t[0]))):
        mono = "".join(f"x{v}" for v in sorted(s))
        if not mono:
            terms.append(str(a))
        else:
            terms.append(mono if a == 1 else f"{a}{mono}")
    return " + ".join(terms) if terms else "0"


def format_poly(f: Expr) -> str:
    return format_coefficients(coefficients(f))


# --- evaluation --------------------------------------------------------------


def _check_exponents(f: Expr, e, extra: int = 0) -> tuple:
    e = tuple(e)
    if len(e) != f.degree + extra:
        raise ArgumentError(f"expected {f.degree + extra} exponents, got {len(e)}")
    if any((not isinstance(x, int)) or x < 0 for x in e):
        raise ArgumentError(f"exponents must be nonnegative integers: {e}")
    return e


def _eval(f: Expr, e: tuple) -> int:
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Product):
        s = f.left.degree
        return _eval(f.left, e[:s]) * _eval(f.right, e[s:])
    return _eval(f.base, e[:-1]) * 3 ** e[-1] + f.addend


def evaluate(f: Expr, e) -> int:
    """f(3^{e_1}, ..., 3^{e_r}) exactly."""
    return _eval(f, _check_exponents(f, e))


def augment_evaluate(p: Union[LowDefectPair, Expr], e) -> int:
    """The augmented form: f(3^{e_1}, ..., 3^{e_r}) * 3^{e_{r+1}}."""
    f = p.expr if isinstance(p, LowDefectPair) else p
    e = _check_exponents(f, e, extra=1)
    return _eval(f, e[:-1]) * 3 ** e[-1]


def evaluate_coefficients(coeffs: Coeffs, e) -> int:
    """Evaluate a coefficient map at x_i = 3^{e[i-1]}."""
    total = 0
    for s, a in coeffs.items():
        total += a * 3 ** sum(e[v - 1] for v in s)
    return total


def delta_of_pair(p: LowDefectPair) -> DefectKey:
    """delta(f, C) = C - 3 log_3 a, a the leading coefficient, as an exact key."""
    return DefectKey(p.base_complexity, leading_coefficient(p.expr))


def delta_fC(p: LowDefectPair, e) -> DefectKey:
    """C + 3 sum(e) - 3 log_3 f(3^e), as the exact key (C + 3 sum(e), f(3^e))."""
    e = _check_exponents(p.expr, e)
    return DefectKey(p.base_complexity + 3 * sum(e), _eval(p.expr, e))


def delta_coefficients(coeffs: Coeffs, C: int, e, skip: int) -> DefectKey:
    """delta for a coefficient map that ignores variable ``skip``."""
    spent = sum(x for i, x in enumerate(e, 1) if i != skip)
    return DefectKey(C + 3 * spent, evaluate_coefficients(coeffs, e))


# --- decomposition -------------------------------------------------------------


def decompose_maxvar(f: Expr) -> tuple[Expr, Expr, int]:
    """Write f = h (x) (g (x) x + c) where x is f's last variable."""
    if f.degree == 0:
        raise ArgumentError("cannot decompose a constant")
    if isinstance(f, Extend):
        return Const(1), f.base, f.addend
    if f.right.degree > 0:
        h, g, c = decompose_maxvar(f.right)
        return tensor_expr(f.left, h), g, c
    h, g, c = decompose_maxvar(f.left)
    return tensor_expr(h, f.right), g, c


def recompose(h: Expr, g: Expr, c: int) -> Expr:
    return tensor_expr(h, Extend(g, c))


def drop_variable(f: Expr, i: int) -> Coeffs:
    """Coefficient of x_i in f (f is linear in x_i), keeping the other variable names."""
    if not 1 <= i <= f.degree:
        raise ArgumentError(f"variable {i} outside 1..{f.degree}")
    return {s - {i}: a for s, a in coefficients(f).items() if i in s}


# --- 3-representations -----------------------------------------------------------


def _enum(f: Expr, bound: int, cap: int) -> Iterator[tuple[tuple, int]]:
    if isinstance(f, Const):
        if f.value <= bound:
            yield (), f.value
        return
    if isinstance(f, Product):
        low_right = _eval(f.right, (0,) * f.right.degree)
        for tl, vl in _enum(f.left, bound // low_right, cap):
            for tr, vr in _enum(f.right, bound // vl, cap):
                yield tl + tr, vl * vr
        return
    low_base = _eval(f.base, (0,) * f.base.degree)
    n, p = 0, 1
    while n <= cap and low_base * p + f.addend <= bound:
        for tb, vb in _enum(f.base, (bound - f.addend) // p, cap):
            yield tb + (n,), vb * p + f.addend
        n += 1
        p *= 3


def enumerate_values(f: Expr, bound: int, cap: Optional[int] = None) -> list[tuple[tuple, int]]:
    """All (exponents, value) with value <= bound, sorted by exponent tuple.

    f is strictly increasing in every variable, so the search is finite.
    """
    if cap is None:
        cap = _default_cap(bound)
    return sorted(_enum(f, bound, cap))


def _default_cap(N: int) -> int:
    cap = max(0, ceil(log(N, 3))) if N > 1 else 0
    while 3**cap < N:
        cap += 1
    return cap


def _reps(f: Expr, N: int, cap: int) -> Iterator[tuple]:
    if isinstance(f, Const):
        if f.value == N:
            yield ()
        return
    if isinstance(f, Product):
        if f.left.degree == 0:
            v = f.left.value if isinstance(f.left, Const) else _eval(f.left, ())
            if N % v == 0:
                for tr in _reps(f.right, N // v, cap):
                    yield tr
            return
        for tl, vl in _enum(f.left, N, cap):
            if N % vl == 0:
                for tr in _reps(f.right, N // vl, cap):
                    yield tl + tr
        return
    rest = N - f.addend
    if rest <= 0:
        return
    n, q = 0, rest
    while n <= cap:
        for tb in _reps(f.base, q, cap):
            yield tb + (n,)
        if q % 3:
            break
        q //= 3
        n += 1


def find_3_representations(
    f: Union[LowDefectPair, Expr], N: int, exponent_cap: Optional[int] = None, augmented: bool = False
) -> list[tuple]:
    """All exponent tuples e with f(3^e) = N (times 3^{e_{r+1}} when augmented), ascending."""
    f = f.expr if isinstance(f, LowDefectPair) else f
    if N < 1:
        raise ArgumentError(f"N must be positive, got {N}")
    cap = _default_cap(N) if exponent_cap is None else exponent_cap
    if not augmented:
        return sorted(set(_reps(f, N, cap)))
    out = set()
    j, M = 0, N
    while j <= cap:
        out.update(t + (j,) for t in _reps(f, M, cap))
        if M % 3:
            break
        M //= 3
        j += 1
    return sorted(out)


def is_efficiently_represented(
    table: ComplexityTable, p: LowDefectPair, N: int, use_augmented: bool = False
) -> tuple[bool, Optional[tuple]]:
    """Whether some tuple e represents N with ||N|| = C + 3 sum(e); returns (flag, witness)."""
    table.check_range(N)
    target = table[N] - p.base_complexity
    if target < 0 or target % 3:
        return False, None
    for e in find_3_representations(p, N, augmented=use_augmented):
        if 3 * sum(e) == target:
            return True, e
    return False, None


# --- JSON ------------------------------------------------------------------------

_JSON_INT_LIMIT = 2**53


def _num(k: int):
    return k if k < _JSON_INT_LIMIT else str(k)


def _int(x) -> int:
    if isinstance(x, bool):
        raise ValidationError(f"expected integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str) and x.isdigit():
        return int(x)
    raise ValidationError(f"expected integer, got {x!r}")


def expr_to_json(f: Expr) -> dict:
    if isinstance(f, Const):
        return {"kind": "const", "value": _num(f.value)}
    if isinstance(f, Product):
        return {"kind": "product", "left": expr_to_json(f.left), "right": expr_to_json(f.right)}
    return {"kind": "extend", "base": expr_to_json(f.base), "addend": _num(f.addend)}


def expr_from_json(obj) -> Expr:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError(f"malformed polynomial node: {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "const":
            return Const(_int(obj["value"]))
        if kind == "product":
            return Product(expr_from_json(obj["left"]), expr_from_json(obj["right"]))
        if kind == "extend":
            return Extend(expr_from_json(obj["base"]), _int(obj["addend"]))
    except KeyError as exc:
        raise ValidationError(f"{kind} node missing field {exc}") from exc
    raise ValidationError(f"unknown node kind {kind!r}")


def pair_to_json(p: LowDefectPair) -> dict:
    return {"poly": expr_to_json(p.expr), "base_complexity": _num(p.base_complexity)}


def pair_from_json(obj) -> LowDefectPair:
    if not isinstance(obj, dict) or "poly" not in obj or "base_complexity" not in obj:
        raise ValidationError(f"malformed pair: {obj!r}")
    f = expr_from_json(obj["poly"])
    coefficients(f)
    return LowDefectPair(f, _int(obj["base_complexity"]))


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))
