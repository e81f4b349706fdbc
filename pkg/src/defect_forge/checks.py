"""Acceptance checks, runnable from pytest or ``defect-forge selftest``.

Each ``check_*`` function takes a table and an ``AcceptanceConfig`` and
returns a ``CheckResult``. ``AcceptanceConfig.quick`` scales every bound
down to what a small table supports.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from .complexity import ComplexityTable, E_from_table, build_table, oracle_complexity, selfridge_E
from .cover import build_S_r, f3k, order_type_bound, verify_cover
from .defect import (
    Cmp,
    DefectKey,
    Verdict,
    compare_defects,
    defect_key,
    stability,
    stable_complexity,
    stable_defect_key,
)
from .ldp import (
    Const,
    Extend,
    LowDefectPair,
    Product,
    coefficients,
    delta_coefficients,
    delta_fC,
    delta_of_pair,
    drop_variable,
    extend,
    make_const,
)
from .ordinal import OrdinalCNF, compare_ordinals, nat_prod, nat_sum, omega_power


@dataclass(frozen=True)
class AcceptanceConfig:
    oracle_bound: int = 5000
    big_limit: int = 1_200_000
    integer_defect_bound: int = 10**6
    cover_bounds: tuple = (("1/2", 10**5), ("1", 10**5), ("3/2", 10**4))
    random_pairs: int = 1000
    grid_max: int = 6
    max_degree: int = 3
    limit_exponent: int = 30
    stable_bound: int = 10**4
    stable_limit: int = 10**6
    ordinal_triples: int = 1000
    f3k_max: int = 5
    seed: int = 1729

    @classmethod
    def quick(cls, limit: int) -> "AcceptanceConfig":
        return cls(
            oracle_bound=min(2000, limit),
            big_limit=limit,
            integer_defect_bound=limit,
            cover_bounds=tuple((r, min(b, limit // 10)) for r, b in cls.cover_bounds),
            random_pairs=100,
            stable_bound=min(1000, limit // 100),
            stable_limit=limit,
            ordinal_triples=200,
        )


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.criterion}: {self.name} ({self.seconds:.2f}s) {self.detail}"

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("data")
        return out


def _timed(criterion: int, name: str):
    def wrap(fn: Callable[..., tuple[bool, str]]):
        def run(*args, **kwargs) -> CheckResult:
            t0 = time.perf_counter()
            try:
                passed, detail = fn(*args, **kwargs)
            except Exception as exc:  # a crash is a failed check, not a crashed selftest
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return CheckResult(criterion, name, passed, detail, time.perf_counter() - t0)

        run.criterion = criterion
        run.__name__ = fn.__name__
        return run

    return wrap


@_timed(1, "oracle equivalence")
def check_oracle(table: ComplexityTable, cfg: AcceptanceConfig):
    bound = cfg.oracle_bound
    if table.limit < bound:
        return False, f"table limit {table.limit} below oracle bound {bound}"
    oracle = oracle_complexity(bound)
    bad = [n for n in range(1, bound + 1) if oracle[n] != table[n]]
    return not bad, f"n <= {bound}, mismatches {bad[:5]}"


@_timed(2, "known values")
def check_known_values(table: ComplexityTable, cfg: AcceptanceConfig):
    problems = []
    if table.limit < cfg.big_limit:
        return False, f"table limit {table.limit} below required {cfg.big_limit}"
    expect = {11: 8}
    if 5**6 <= table.limit:
        expect[5**6] = 29
    k = 1
    while 2**k <= table.limit and k <= 20:
        expect[2**k] = 2 * k
        k += 1
    k = 1
    while 3**k <= table.limit:
        expect[3**k] = 3 * k
        k += 1
    for n, v in expect.items():
        if table[n] != v:
            problems.append((n, table[n], v))
    return not problems, f"{len(expect)} values checked, wrong {problems[:5]}"


@_timed(3, "E(k) closed form")
def check_selfridge(table: ComplexityTable, cfg: AcceptanceConfig):
    ks = [k for k in range(2, 38) if selfridge_E(k) <= table.limit]
    if cfg.big_limit >= 1_200_000 and ks[-1:] != [37]:
        return False, f"table limit {table.limit} cannot reach E(37)"
    bad = [k for k in ks if E_from_table(table, k) != selfridge_E(k)]
    return not bad, f"k in 2..{ks[-1]}, mismatches {bad}"


def _integer_defect(c: int, n: int) -> bool:
    # delta = d in Z  <=>  3^c / n^3 = 3^d, an integral power of three.
    num = 3**c
    den = n**3
    if num % den:
        return False
    q = num // den
    while q % 3 == 0:
        q //= 3
    return q == 1


@_timed(4, "integer defects")
def check_integer_defects(table: ComplexityTable, cfg: AcceptanceConfig):
    bound = min(cfg.integer_defect_bound, table.limit)
    if bound < cfg.integer_defect_bound:
        return False, f"table limit {table.limit} below {cfg.integer_defect_bound}"
    e = table.entries
    found = [n for n in range(1, bound + 1) if _integer_defect(int(e[n]), n)]
    expected = [1] + [3**k for k in range(1, 40) if 3**k <= bound]
    # the integer value itself: ||3^k|| - 3k
    values = {n: int(e[n]) - 3 * (len(_ternary(n)) - 1) for n in found}
    ok_values = all(v == (1 if n == 1 else 0) for n, v in values.items())
    return found == expected and ok_values, f"n <= {bound}: integer-defect n = {found}"


def _ternary(n: int) -> str:
    s = ""
    while n:
        s = str(n % 3) + s
        n //= 3
    return s or "0"


@_timed(5, "covering sets")
def check_covers(table: ComplexityTable, cfg: AcceptanceConfig):
    lines = []
    ok = True
    for r, bound in cfg.cover_bounds:
        cover = build_S_r(table, r)
        report = verify_cover(table, cover, bound)
        deg_ok = cover.max_degree <= int(cover.r.fraction)
        ok &= report.ok and deg_ok
        lines.append(f"r={r}: {len(cover)} pairs, checked {report.checked} to {bound}, "
                     f"failures {len(report.failures)}, max degree {cover.max_degree}")
    s1 = build_S_r(table, "1")
    members = [extend(make_const(16, 8), 1, 1), make_const(9, 6), make_const(27, 9)]
    missing = [str(p) for p in members if p not in s1]
    ok &= not missing
    lines.append(f"S_1 missing {missing}")
    return ok, "; ".join(lines)


def random_expr(rng: random.Random, degree: int, max_const: int = 12):
    if degree == 0:
        return Const(rng.randint(1, max_const))
    if degree >= 2 and rng.random() < 0.4:
        d = rng.randint(1, degree - 1)
        return Product(random_expr(rng, d, max_const), random_expr(rng, degree - d, max_const))
    if rng.random() < 0.2:
        return Product(Const(rng.randint(1, max_const)), random_expr(rng, degree, max_const))
    return Extend(random_expr(rng, degree - 1, max_const), rng.randint(1, max_const))


def certified_complexity(table: ComplexityTable, f) -> int:
    """Sum of ||k|| over constants and addends: a valid base complexity for f."""
    if isinstance(f, Const):
        return table[f.value]
    if isinstance(f, Product):
        return certified_complexity(table, f.left) + certified_complexity(table, f.right)
    return certified_complexity(table, f.base) + table[f.addend]


def random_pair(rng: random.Random, table: ComplexityTable, max_degree: int = 3) -> LowDefectPair:
    f = random_expr(rng, rng.randint(0, max_degree))
    return LowDefectPair(f, certified_complexity(table, f) + rng.choice((0, 0, 0, 1, 2)))


def _grid(r: int, top: int):
    if r == 0:
        yield ()
        return
    for head in _grid(r - 1, top):
        for x in range(top + 1):
            yield head + (x,)


def pair_violations(table: ComplexityTable, pair: LowDefectPair, grid_max: int, far: int) -> list[str]:
    """Violations of the complexity upper bound, both defect bounds,
    per-variable strict monotonicity and the limit formula on the grid."""
    out = []
    f, C, r = pair.expr, pair.base_complexity, pair.degree
    coefficients(f)
    top = delta_of_pair(pair)
    for e in _grid(r, grid_max):
        key = delta_fC(pair, e)
        N = key.n
        if N <= table.limit:
            cN = table[N]
            if cN > key.c:
                out.append(f"complexity bound at {e}")
            if compare_defects(DefectKey(cN, N), key) is Cmp.GREATER:
                out.append(f"defect bound (1) at {e}")
        cmp = compare_defects(key, top)
        if cmp is Cmp.GREATER or (r >= 1 and cmp is not Cmp.LESS):
            out.append(f"defect bound (2) at {e}")
        for i in range(r):
            if e[i] < grid_max:
                up = e[:i] + (e[i] + 1,) + e[i + 1 :]
                if compare_defects(key, delta_fC(pair, up)) is not Cmp.LESS:
                    out.append(f"monotonicity in x{i + 1} at {e}")
            pushed = e[:i] + (far,) + e[i + 1 :]
            lim = delta_coefficients(drop_variable(f, i + 1), C, pushed, skip=i + 1)
            if abs(delta_fC(pair, pushed).value - lim.value) >= 1e-6:
                out.append(f"limit in x{i + 1} at {e}")
    return out


@_timed(6, "defect functional properties")
def check_pair_properties(table: ComplexityTable, cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed)
    violations = []
    degrees = [0] * (cfg.max_degree + 1)
    for _ in range(cfg.random_pairs):
        pair = random_pair(rng, table, cfg.max_degree)
        degrees[pair.degree] += 1
        violations += [f"{pair}: {v}" for v in pair_violations(table, pair, cfg.grid_max, cfg.limit_exponent)]
    return not violations, f"{cfg.random_pairs} pairs by degree {degrees}, violations {violations[:3]}"


@_timed(7, "stable defects")
def check_stable_defects(table: ComplexityTable, cfg: AcceptanceConfig):
    if table.limit < cfg.stable_limit:
        return False, f"table limit {table.limit} below {cfg.stable_limit}"
    table = table.prefix(cfg.stable_limit)  # the horizon depends on the limit
    bad = []
    for n in range(1, cfg.stable_bound + 1):
        d = defect_key(table, n)
        st = stable_defect_key(table, n)
        st_cpx, _ = stable_complexity(table, n)
        # min over checkable k of delta(3^k n), by exact comparison
        best, m = d, n
        while m * 3 <= table.limit:
            m *= 3
            cand = defect_key(table, m)
            if compare_defects(cand, best) is Cmp.LESS:
                best = cand
        if compare_defects(st, best) is not Cmp.EQUAL:
            bad.append((n, "min"))
        if compare_defects(DefectKey(st_cpx, n), st) is not Cmp.EQUAL:
            bad.append((n, "complexity route"))
        rel = compare_defects(st, d)
        status = stability(table, n)
        if rel is Cmp.GREATER:
            bad.append((n, "above"))
        if (rel is Cmp.EQUAL) != (status.verdict is Verdict.STABLE_WITHIN_HORIZON):
            bad.append((n, "equality"))
    return not bad, f"n <= {cfg.stable_bound}, problems {bad[:5]}"


def _random_ordinal(rng: random.Random) -> OrdinalCNF:
    return OrdinalCNF(tuple(rng.randint(0, 6) for _ in range(rng.randint(0, 4))))


@_timed(8, "ordinal algebra")
def check_ordinals(table: ComplexityTable, cfg: AcceptanceConfig):
    rng = random.Random(cfg.seed + 8)
    bad = []
    for _ in range(cfg.ordinal_triples):
        a, b, c = (_random_ordinal(rng) for _ in range(3))
        if nat_sum(a, b) != nat_sum(b, a) or nat_prod(a, b) != nat_prod(b, a):
            bad.append(("commute", a, b))
        if nat_sum(nat_sum(a, b), c) != nat_sum(a, nat_sum(b, c)):
            bad.append(("sum assoc", a, b, c))
        if nat_prod(nat_prod(a, b), c) != nat_prod(a, nat_prod(b, c)):
            bad.append(("prod assoc", a, b, c))
        if nat_prod(a, nat_sum(b, c)) != nat_sum(nat_prod(a, b), nat_prod(a, c)):
            bad.append(("distrib", a, b, c))
        if b.coeffs and compare_ordinals(nat_sum(a, b), a) is not Cmp.GREATER:
            bad.append(("sum mono", a, b))
        if a.coeffs and b != c:
            lo, hi = sorted((b, c))
            if compare_ordinals(nat_prod(a, lo), nat_prod(a, hi)) is not Cmp.LESS:
                bad.append(("prod mono", a, lo, hi))
    for k in range(cfg.f3k_max + 1):
        want = nat_prod(omega_power(k), OrdinalCNF.finite(k + 1))
        got = order_type_bound(f3k(k))
        if got != want:
            bad.append(("f3k", k, str(got)))
    return not bad, f"{cfg.ordinal_triples} triples, f3k k <= {cfg.f3k_max}, problems {bad[:3]}"


@_timed(9, "determinism")
def check_determinism(table: ComplexityTable, cfg: AcceptanceConfig):
    again = build_table(table.limit)
    same_table = again.to_bytes() == table.to_bytes() and build_table(table.limit).to_bytes() == again.to_bytes()
    diffs = []
    for r, _ in cfg.cover_bounds:
        if build_S_r(again, r).dumps() != build_S_r(again, r).dumps():
            diffs.append(r)
    return same_table and not diffs, f"table rebuild identical: {same_table}; cover JSON differs for {diffs}"


ALL_CHECKS = (
    check_oracle,
    check_known_values,
    check_selfridge,
    check_integer_defects,
    check_covers,
    check_pair_properties,
    check_stable_defects,
    check_ordinals,
    check_determinism,
)


def run_checks(table: ComplexityTable, cfg: AcceptanceConfig | None = None, log=None) -> list[CheckResult]:
    cfg = cfg or AcceptanceConfig()
    results = []
    for check in ALL_CHECKS:
        res = check(table, cfg)
        if log:
            log(res.line())
        results.append(res)
    return results


def summary(results: list[CheckResult]) -> dict:
    passed = sum(r.passed for r in results)
    return {
        "checks_run": len(results),
        "passed": passed,
        "failed": len(results) - passed,
        "results": [r.to_json() for r in results],
    }

