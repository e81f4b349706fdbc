"""Finite covering sets of low-defect pairs.

``build_S_k_alpha`` follows the inductive construction: level 1 is the set of
leaders with defect below alpha, and level k+1 is assembled from earlier
levels by products, extensions by solid addends, multiples by level-1
leaders, and the small exceptional set T_alpha. ``verify_cover`` checks the
result against a complexity table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import floor
from typing import Optional

import numpy as np

from .complexity import ComplexityTable, good_addition_splits, good_factorizations, selfridge_E
from .defect import (
    DefectThreshold,
    below_threshold_mask,
    defect_floor,
    enumerate_B_r,
    leader_mask,
    stable_complexity,
)
from .errors import ArgumentError, HorizonError, RangeError, ValidationError
from .ldp import (
    LowDefectPair,
    canonical_key,
    delta_of_pair,
    enumerate_values,
    extend,
    is_efficiently_represented,
    make_const,
    pair_from_json,
    pair_to_json,
    tensor,
)
from .ordinal import OrdinalCNF, omega_power, nat_prod

BASE = "Base-BAlpha"
CASE1 = "Case1-Product"
CASE2 = "Case2-Extend"
CASE3 = "Case3-TimesV"
CASE4 = "Case4-TAlpha"
CASE5 = "Case5-TAlphaTimesV"
PROVENANCE = (BASE, CASE1, CASE2, CASE3, CASE4, CASE5)

# Base leaders must stay out of the top two ternary orders of magnitude of the
# table before the enumeration counts as complete.
HORIZON_HEADROOM = 9


def is_solid(table: ComplexityTable, n: int) -> bool:
    """No split n = a + b with ||a|| + ||b|| = ||n||."""
    table.check_range(n)
    return n == 1 or not good_addition_splits(table, n)


def is_m_irreducible(table: ComplexityTable, n: int) -> bool:
    """No factorization n = ab with ||a|| + ||b|| = ||n||."""
    table.check_range(n)
    return n == 1 or not good_factorizations(table, n)


def _as_alpha(alpha) -> Fraction:
    a = DefectThreshold.parse(alpha).fraction
    if not 0 < a < 1:
        raise ArgumentError(f"alpha must lie in (0, 1), got {a}")
    return a


def t_alpha_size_bound(alpha) -> int:
    """Largest n >= 2 with 1/(n-1) > 3^((1-alpha)/3) - 1."""
    a = _as_alpha(alpha)
    p, q = a.numerator, a.denominator
    # (n/(n-1))^(3q) > 3^(q-p)
    n = 2
    while (n + 1) ** (3 * q) > 3 ** (q - p) * n ** (3 * q):
        n += 1
    return n


def compute_T_alpha(table: ComplexityTable, alpha) -> list[int]:
    nmax = t_alpha_size_bound(alpha)
    if nmax > table.limit:
        raise RangeError(f"T_alpha needs the table up to {nmax}, limit is {table.limit}")
    e = table.entries
    solid = [False] + [is_solid(table, b) for b in range(1, nmax // 2 + 1)]
    out = [1]
    for n in range(2, nmax + 1):
        if not is_m_irreducible(table, n):
            continue
        if any(solid[b] and e[n] == int(e[n - b]) + int(e[b]) for b in range(2, n // 2 + 1)):
            continue
        out.append(n)
    return out


def solid_addends(table: ComplexityTable, level: int, alpha) -> list[int]:
    """Solid b with ||b|| < level * alpha + 3 log_3 2, decided exactly."""
    a = _as_alpha(alpha)
    p, q = a.numerator, a.denominator

    def fits(c):
        # c < level p/q + 3 log3 2  <=>  3^(qc) < 3^(level p) 2^(3q)
        return 3 ** (q * c) < 3 ** (level * p) * 2 ** (3 * q)

    cmax = 0
    while fits(cmax + 1):
        cmax += 1
    if cmax == 0:
        return []
    top = selfridge_E(cmax)
    if top > table.limit:
        raise RangeError(f"solid addends need the table up to {top}, limit is {table.limit}")
    e = table.entries
    return [b for b in range(1, top + 1) if e[b] <= cmax and is_solid(table, b)]


def base_leaders(table: ComplexityTable, alpha) -> list[int]:
    """B_alpha enumerated over the whole table, with an empirical completeness check."""
    a = _as_alpha(alpha)
    found = enumerate_B_r(table, DefectThreshold(a.numerator, a.denominator), table.limit)
    if found and found[-1] * HORIZON_HEADROOM > table.limit:
        raise HorizonError(
            f"B_{a} has an element {found[-1]} within a factor {HORIZON_HEADROOM} of the table limit "
            f"{table.limit}; enumeration may be incomplete"
        )
    return found


@dataclass
class CoverSet:
    r: DefectThreshold
    k: int
    alpha: Fraction
    pairs: list[LowDefectPair]
    provenance: list[str]
    enumeration_bound: int

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair):
        key = canonical_key(pair.expr)
        return any(
            p.base_complexity == pair.base_complexity and canonical_key(p.expr) == key for p in self.pairs
        )

    @property
    def max_degree(self) -> int:
        return max((p.degree for p in self.pairs), default=0)

    def to_json(self) -> dict:
        return {
            "r": str(self.r),
            "k": self.k,
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "enumeration_bound": self.enumeration_bound,
            "pairs": [
                {**pair_to_json(p), "provenance": tag} for p, tag in zip(self.pairs, self.provenance)
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, obj) -> "CoverSet":
        try:
            pairs = [pair_from_json(p) for p in obj["pairs"]]
            tags = [p.get("provenance", "") for p in obj["pairs"]]
            bad = [t for t in tags if t not in PROVENANCE]
            if bad:
                raise ValidationError(f"unknown provenance tags {sorted(set(bad))}")
            return cls(
                r=DefectThreshold.parse(obj["r"]),
                k=int(obj["k"]),
                alpha=Fraction(obj["alpha"]),
                pairs=pairs,
                provenance=tags,
                enumeration_bound=int(obj.get("enumeration_bound", 0)),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed cover file: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> "CoverSet":
        return cls.from_json(json.loads(text))


@dataclass
class _Level:
    """Pairs at one level, deduplicated by polynomial up to variable renaming."""

    best: dict = field(default_factory=dict)

    def add(self, pair: LowDefectPair, tag: str) -> None:
        key = canonical_key(pair.expr)
        rank = (pair.base_complexity, json.dumps(pair_to_json(pair), separators=(",", ":")))
        old = self.best.get(key)
        if old is None or rank < old[0]:
            self.best[key] = (rank, pair, tag)

    def items(self) -> list[tuple[LowDefectPair, str]]:
        rows = sorted(self.best.values(), key=lambda t: (t[1].degree, t[0]))
        return [(pair, tag) for _, pair, tag in rows]


def _levels(table: ComplexityTable, k: int, alpha: Fraction) -> dict[int, list[tuple[LowDefectPair, str]]]:
    e = table.entries
    B = base_leaders(table, alpha)
    base = [make_const(v, int(e[v])) for v in B]
    levels = {1: [(p, BASE) for p in base]}
    if k == 1:
        return levels
    T = compute_T_alpha(table, alpha)
    for m in range(1, k):
        nxt = _Level()
        if m + 1 == 2:
            consts = [p for p, _ in levels[1]]
            for f1, f2 in combinations_with_replacement(consts, 2):
                nxt.add(tensor(f1, f2), CASE1)
            for f1, f2, f3 in combinations_with_replacement(consts, 3):
                nxt.add(tensor(tensor(f1, f2), f3), CASE1)
        else:
            for i in range(2, m + 1):
                j = m + 2 - i
                if not 2 <= j <= m:
                    continue
                for f, _ in levels[i]:
                    for g, _ in levels[j]:
                        nxt.add(tensor(f, g), CASE1)
        for b in solid_addends(table, m + 1, alpha):
            for f, _ in levels[m]:
                ext = extend(f, b, int(e[b]))
                nxt.add(ext, CASE2)
                for v in base:
                    nxt.add(tensor(v, ext), CASE3)
        for n in T:
            nxt.add(make_const(n, int(e[n])), CASE4)
            for v in B:
                vn = v * n
                table.check_range(vn)
                nxt.add(make_const(vn, int(e[vn])), CASE5)
        levels[m + 1] = nxt.items()
    return levels


def build_S_k_alpha(table: ComplexityTable, k: int, alpha) -> CoverSet:
    """Finite set of pairs covering the leaders of defect below k * alpha."""
    if k < 1:
        raise ArgumentError(f"k must be positive, got {k}")
    a = _as_alpha(alpha)
    rows = _levels(table, k, a)[k]
    r = DefectThreshold.parse(k * a)
    return CoverSet(
        r=r,
        k=k,
        alpha=a,
        pairs=[p for p, _ in rows],
        provenance=[t for _, t in rows],
        enumeration_bound=table.limit,
    )


def build_S_r(table: ComplexityTable, r) -> CoverSet:
    r = DefectThreshold.parse(r)
    if r.p == 0:
        raise ArgumentError("r must be positive")
    k = floor(r.fraction) + 1
    cover = build_S_k_alpha(table, k, r.fraction / k)
    cover.r = r
    return cover


@dataclass
class CoverReport:
    checked: int
    covered: int
    failures: list[dict]
    extraneous_hits: int
    pair_hits: list[int]
    bound: int

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "covered": self.covered,
            "failures": self.failures,
            "extraneous_hits": self.extraneous_hits,
            "bound": self.bound,
            "pair_hits": self.pair_hits,
        }


def verify_cover(table: ComplexityTable, cover: CoverSet, bound: int) -> CoverReport:
    """Check every leader N <= bound with delta(N) < r is efficiently 3-represented
    by some pair, and every N <= bound with delta(N) < r by some augmented pair.

    Numbers 3-represented by a pair but of defect >= r are counted as
    extraneous hits; they are expected and not failures.
    """
    table.check_range(bound)
    if bound > cover.enumeration_bound and cover.enumeration_bound:
        raise RangeError(f"bound {bound} exceeds the cover's enumeration bound {cover.enumeration_bound}")
    e = table.entries
    below = below_threshold_mask(table, cover.r, bound)
    leaders = leader_mask(table, bound)
    plain_targets = below & leaders
    plain_hit = np.zeros(bound + 1, dtype=bool)
    aug_hit = np.zeros(bound + 1, dtype=bool)
    represented = np.zeros(bound + 1, dtype=bool)
    pair_hits = []
    for pair in cover.pairs:
        hits = 0
        for exps, v in enumerate_values(pair.expr, bound):
            represented[v] = True
            cost = pair.base_complexity + 3 * sum(exps)
            if e[v] == cost and plain_targets[v]:
                hits += 1
            if e[v] == cost:
                plain_hit[v] = True
            m, j = v, 0
            while m <= bound:
                if e[m] == cost + 3 * j:
                    aug_hit[m] = True
                m *= 3
                j += 1
        pair_hits.append(hits)
    failures = [{"n": int(n), "form": "plain"} for n in np.flatnonzero(plain_targets & ~plain_hit)]
    failures += [{"n": int(n), "form": "augmented"} for n in np.flatnonzero(below & ~aug_hit)]
    checked = int(plain_targets.sum() + below.sum())
    return CoverReport(
        checked=checked,
        covered=checked - len(failures),
        failures=failures,
        extraneous_hits=int((represented & ~below).sum()),
        pair_hits=pair_hits,
        bound=bound,
    )


def order_type_bound(pair: LowDefectPair) -> OrdinalCNF:
    """omega^r * (floor(delta(f, C)) + 1), r the degree."""
    fl = defect_floor(delta_of_pair(pair))
    return nat_prod(omega_power(pair.degree), OrdinalCNF.finite(fl + 1))


def f3k(k: int) -> LowDefectPair:
    """(...((3x_1 + 1)x_2 + 1)...)x_k + 1 with base complexity 3 + k."""
    p = make_const(3, 3)
    for _ in range(k):
        p = extend(p, 1, 1)
    return p


@dataclass
class ExceptionalReport:
    total: int
    flagged: list[tuple]
    uncertain: list[tuple]


def exceptional_tuples(table: ComplexityTable, pair: LowDefectPair, bound: int) -> ExceptionalReport:
    """Tuples whose value has stable complexity below C + 3 sum(e).

    Only meaningful for pairs with delta(f, C) < degree + 1. Tuples whose
    stable complexity is not certified within the table are listed as
    uncertain rather than flagged.
    """
    table.check_range(bound)
    flagged, uncertain = [], []
    rows = enumerate_values(pair.expr, bound)
    for exps, v in rows:
        st, status = stable_complexity(table, v)
        if st < pair.base_complexity + 3 * sum(exps):
            flagged.append(exps)
        elif not status.stable:
            uncertain.append(exps)
    return ExceptionalReport(total=len(rows), flagged=flagged, uncertain=uncertain)


def find_covering_pair(table: ComplexityTable, cover: CoverSet, N: int, augmented: bool = False) -> Optional[int]:
    """Index of the first pair efficiently 3-representing N, if any."""
    for i, p in enumerate(cover.pairs):
        ok, _ = is_efficiently_represented(table, p, N, use_augmented=augmented)
        if ok:
            return i
    return None
