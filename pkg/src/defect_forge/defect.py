"""Exact defects, leaders, stability and defect-set enumeration.

A defect delta(n) = ||n|| - 3 log_3 n is carried as the integer pair
``DefectKey(c, n)``. Two defects compare by the integer inequality
3^c1 * n2^3 <= 3^c2 * n1^3, so no ordering decision depends on rounding.

Bulk scans over a table use a float prefilter: a float64 defect is within
1e-12 of the true value for every n the tables can hold, so anything
farther than ``FLOAT_MARGIN`` from a threshold is decided correctly by the
float and everything closer is re-decided exactly.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Optional

import numpy as np

from .complexity import ComplexityTable, selfridge_E
from .errors import ArgumentError

LOG3 = math.log(3)
MAX_DENOMINATOR = 1024
FLOAT_MARGIN = 1e-9
EXCLUDED = "Excluded"


class Cmp(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, a: int, b: int) -> "Cmp":
        return cls((a > b) - (a < b))


@dataclass(frozen=True)
class DefectKey:
    """delta = c - 3 log_3 n, held exactly."""

    c: int
    n: int

    @property
    def value(self) -> float:
        return self.c - 3 * math.log(self.n) / LOG3

    def __str__(self):
        return f"{self.value:.6f}"


@dataclass(frozen=True)
class DefectThreshold:
    """Rational bound p/q, used as the strict test delta < p/q."""

    p: int
    q: int = 1

    def __post_init__(self):
        if self.q < 1 or self.p < 0:
            raise ArgumentError(f"threshold needs p >= 0, q >= 1; got {self.p}/{self.q}")
        g = math.gcd(self.p, self.q) or 1
        object.__setattr__(self, "p", self.p // g)
        object.__setattr__(self, "q", self.q // g)
        if self.q > MAX_DENOMINATOR:
            raise ArgumentError(f"threshold denominator {self.q} exceeds {MAX_DENOMINATOR}")

    @classmethod
    def parse(cls, text) -> "DefectThreshold":
        if isinstance(text, DefectThreshold):
            return text
        if isinstance(text, (int, Fraction)):
            f = Fraction(text)
        else:
            try:
                f = Fraction(str(text).strip())
            except (ValueError, ZeroDivisionError) as exc:
                raise ArgumentError(f"cannot parse threshold {text!r}") from exc
        return cls(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __float__(self):
        return self.p / self.q

    def __str__(self):
        return f"{self.p}/{self.q}"


def defect_key(table: ComplexityTable, n: int) -> DefectKey:
    table.check_range(n)
    return DefectKey(int(table.entries[n]), n)


def defect_value(table: ComplexityTable, n: int) -> float:
    return defect_key(table, n).value


def compare_defects(k1: DefectKey, k2: DefectKey) -> Cmp:
    return Cmp.of(3**k1.c * k2.n**3, 3**k2.c * k1.n**3)


def defect_less_than(key: DefectKey, r: DefectThreshold) -> bool:
    # c - 3 log3 n < p/q  <=>  3^(qc) < 3^p * n^(3q)
    return 3 ** (r.q * key.c) < 3**r.p * key.n ** (3 * r.q)


def defect_floor(key: DefectKey) -> int:
    """Exact floor of the defect value."""

    def at_most_defect(m):
        # m <= c - 3 log3 n  <=>  n^3 <= 3^(c - m)
        return m <= key.c and key.n**3 <= 3 ** (key.c - m)

    m = math.floor(key.value) + 1
    while not at_most_defect(m):
        m -= 1
    while at_most_defect(m + 1):
        m += 1
    return m


def defect_is_integer(key: DefectKey) -> bool:
    """True iff 3^c / n^3 is an integral power of 3, i.e. n is a power of 3."""
    n = key.n
    while n % 3 == 0:
        n //= 3
    return n == 1


def is_leader(table: ComplexityTable, n: int) -> bool:
    table.check_range(n)
    if n % 3:
        return True
    e = table.entries
    return int(e[n]) < 3 + int(e[n // 3])


def defect_class(table: ComplexityTable, n: int):
    table.check_range(n)
    if n == 1:
        return EXCLUDED
    return int(table.entries[n]) % 3


# --- vectorised helpers over a table prefix -------------------------------


def _float_defects(table: ComplexityTable, bound: int) -> np.ndarray:
    n = np.arange(1, bound + 1, dtype=np.float64)
    return table.entries[1 : bound + 1].astype(np.float64) - 3 * np.log(n) / LOG3


def leader_mask(table: ComplexityTable, bound: int) -> np.ndarray:
    """Boolean array indexed 0..bound, true at leaders."""
    table.check_range(bound)
    e = table.entries[: bound + 1].astype(np.int16)
    mask = np.ones(bound + 1, dtype=bool)
    mask[0] = False
    m = np.arange(3, bound + 1, 3)
    mask[m] = e[m] < 3 + e[m // 3]
    return mask


def below_threshold_mask(table: ComplexityTable, r: DefectThreshold, bound: int) -> np.ndarray:
    """Boolean array indexed 0..bound, true where delta(n) < r (exact)."""
    table.check_range(bound)
    d = _float_defects(table, bound)
    rf = float(r)
    mask = np.zeros(bound + 1, dtype=bool)
    mask[1:] = d < rf - FLOAT_MARGIN
    for i in np.flatnonzero(np.abs(d - rf) <= FLOAT_MARGIN):
        n = int(i) + 1
        mask[n] = defect_less_than(DefectKey(int(table.entries[n]), n), r)
    return mask


def enumerate_A_r(table: ComplexityTable, r: DefectThreshold, bound: int) -> list[int]:
    r = DefectThreshold.parse(r)
    return np.flatnonzero(below_threshold_mask(table, r, bound)).tolist()


def enumerate_B_r(table: ComplexityTable, r: DefectThreshold, bound: int) -> list[int]:
    r = DefectThreshold.parse(r)
    mask = below_threshold_mask(table, r, bound) & leader_mask(table, bound)
    return np.flatnonzero(mask).tolist()


# --- stability -------------------------------------------------------------


class Verdict(enum.Enum):
    STABLE_WITHIN_HORIZON = "StableWithinHorizon"
    UNSTABLE_PROVEN = "UnstableProven"
    HORIZON_EXHAUSTED = "HorizonExhausted"


@dataclass(frozen=True)
class StabilityStatus:
    verdict: Verdict
    k_checked: int
    witness: Optional[int] = None

    @property
    def stable(self) -> bool:
        return self.verdict is Verdict.STABLE_WITHIN_HORIZON


def _horizon(table: ComplexityTable, n: int) -> int:
    k, m = 0, n * 3
    while m <= table.limit:
        k += 1
        m *= 3
    return k


def stability(table: ComplexityTable, n: int) -> StabilityStatus:
    """Check ||3^k n|| = 3k + ||n|| for every k with 3^k n <= limit."""
    table.check_range(n)
    horizon = _horizon(table, n)
    if horizon == 0:
        return StabilityStatus(Verdict.HORIZON_EXHAUSTED, 0)
    e = table.entries
    base = int(e[n])
    m = n
    for k in range(1, horizon + 1):
        m *= 3
        if int(e[m]) < 3 * k + base:
            return StabilityStatus(Verdict.UNSTABLE_PROVEN, horizon, witness=k)
    return StabilityStatus(Verdict.STABLE_WITHIN_HORIZON, horizon)


def stability_verdicts(table: ComplexityTable, bound: int) -> np.ndarray:
    """Vectorised ``stability`` for 1..bound, as an object array of Verdicts (index 0 unused)."""
    table.check_range(bound)
    e = table.entries.astype(np.int16)
    n = np.arange(1, bound + 1, dtype=np.int64)
    unstable = np.zeros(bound, dtype=bool)
    checkable = n * 3 <= table.limit
    m = n.copy()
    k = 0
    while True:
        k += 1
        m = m * 3
        ok = m <= table.limit
        if not ok.any():
            break
        idx = np.flatnonzero(ok)
        unstable[idx] |= e[m[idx]] < 3 * k + e[n[idx]]
    out = np.empty(bound + 1, dtype=object)
    out[0] = None
    out[1:] = Verdict.STABLE_WITHIN_HORIZON
    out[1:][unstable] = Verdict.UNSTABLE_PROVEN
    out[1:][~checkable] = Verdict.HORIZON_EXHAUSTED
    return out


def _chain(table: ComplexityTable, n: int) -> list[int]:
    """||3^k n|| - 3k for k = 0..horizon."""
    e = table.entries
    out, m, k = [], n, 0
    while m <= table.limit:
        out.append(int(e[m]) - 3 * k)
        m *= 3
        k += 1
    return out


def stable_complexity(table: ComplexityTable, n: int) -> tuple[int, StabilityStatus]:
    """min_k ||3^k n|| - 3k over checkable k.

    The status describes the first minimising point: StableWithinHorizon when
    the sequence is seen to stay constant after it (``k_checked`` counts the
    trailing steps), HorizonExhausted when the minimum sits at the last
    checkable k and so is not certified.
    """
    table.check_range(n)
    seq = _chain(table, n)
    value = min(seq)
    k_star = seq.index(value)
    trailing = len(seq) - 1 - k_star
    if trailing:
        return value, StabilityStatus(Verdict.STABLE_WITHIN_HORIZON, trailing)
    return value, StabilityStatus(Verdict.HORIZON_EXHAUSTED, 0)


def stable_defect_key(table: ComplexityTable, n: int) -> DefectKey:
    table.check_range(n)
    seq = _chain(table, n)
    k_star = seq.index(min(seq))
    m = n * 3**k_star
    return DefectKey(int(table.entries[m]), m)


# --- sorted defect lists -----------------------------------------------------


@dataclass(frozen=True)
class DefectEntry:
    key: DefectKey
    leader: int
    cls: object
    status: Verdict


def _exact_sort(keys: list[DefectKey], floats: np.ndarray) -> list[int]:
    """Indices sorting ``keys`` by exact defect.

    Sort by float, then re-sort exactly every run of neighbours whose float
    gaps are within the margin; runs separated by a larger gap are already
    in the true order.
    """
    order = np.argsort(floats, kind="stable")
    out: list[int] = []
    run = [int(order[0])] if len(order) else []
    exact = cmp_to_key(lambda i, j: compare_defects(keys[i], keys[j]) or (i > j) - (i < j))
    for prev, cur in zip(order[:-1], order[1:]):
        if floats[cur] - floats[prev] <= FLOAT_MARGIN:
            run.append(int(cur))
        else:
            out.extend(sorted(run, key=exact) if len(run) > 1 else run)
            run = [int(cur)]
    out.extend(sorted(run, key=exact) if len(run) > 1 else run)
    return out


def sorted_defects(
    table: ComplexityTable,
    bound: int,
    cls: Optional[int] = None,
    stable_only: bool = False,
    threshold: Optional[DefectThreshold] = None,
) -> list[DefectEntry]:
    """Distinct defect values among n <= bound, each represented by its leader.

    ``cls`` keeps residues ||n|| mod 3 (n = 1 is never in a class);
    ``stable_only`` keeps chains whose leader is StableWithinHorizon.
    """
    table.check_range(bound)
    mask = leader_mask(table, bound)
    if threshold is not None:
        mask &= below_threshold_mask(table, DefectThreshold.parse(threshold), bound)
    e = table.entries
    if cls is not None:
        if cls not in (0, 1, 2):
            raise ArgumentError(f"class must be 0, 1 or 2, got {cls}")
        mask[1:] &= e[1 : bound + 1] % 3 == cls
        mask[1] = False
    verdicts = stability_verdicts(table, bound)
    if stable_only:
        mask &= verdicts == Verdict.STABLE_WITHIN_HORIZON
    leaders = np.flatnonzero(mask)
    keys = [DefectKey(int(e[n]), int(n)) for n in leaders]
    floats = _float_defects(table, bound)[leaders - 1] if len(leaders) else np.array([])
    out = []
    prev = None
    for i in _exact_sort(keys, floats):
        key = keys[i]
        if prev is not None and compare_defects(prev, key) is Cmp.EQUAL:
            # Distinct leaders never share a defect; keep the smaller leader regardless.
            continue
        n = key.n
        out.append(DefectEntry(key, n, EXCLUDED if n == 1 else key.c % 3, verdicts[n]))
        prev = key
    return out


CSV_COLUMNS = ("n", "complexity", "defect_float", "class", "stable_status")


def write_defects_csv(entries: Iterable[DefectEntry], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for ent in entries:
        w.writerow([ent.leader, ent.key.c, f"{ent.key.value:.6f}", ent.cls, ent.status.value])


def defect_via_selfridge(c: int, n: int) -> float:
    """delta(n) from 3 log_3(E(||n||)/n) plus the residue correction (n > 1)."""
    d2 = 2 - 3 * math.log(2) / LOG3
    base = 3 * (math.log(selfridge_E(c)) - math.log(n)) / LOG3
    return base + (0.0, 2 * d2, d2)[c % 3]
