"""``defect-forge`` command line.

Exit codes: 0 success, 1 check failure (or IO/format error), 2 usage
error, 3 range error.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import checks
from .complexity import build_table, load_table
from .cover import CoverSet, build_S_r, verify_cover
from .defect import (
    DefectThreshold,
    defect_class,
    defect_key,
    enumerate_A_r,
    enumerate_B_r,
    is_leader,
    sorted_defects,
    stability,
    write_defects_csv,
)
from .errors import ArgumentError, DefectForgeError, RangeError
from .ldp import LowDefectPair, evaluate, augment_evaluate, expr_from_json, find_3_representations
from .ldp import format_poly, is_efficiently_represented, pair_from_json
from .ordinal import compare_ordinals, format_ordinal, nat_prod, nat_sum, parse_ordinal

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_RANGE = 0, 1, 2, 3
ENV_TABLE = "DEFECT_FORGE_TABLE"
DEFAULT_TABLE = "defect_forge.ict"
DEFAULT_LIMIT = 10**6


@dataclass(frozen=True)
class RunConfig:
    table_path: Path = Path(DEFAULT_TABLE)
    limit: int = DEFAULT_LIMIT
    threads: int = 1
    output_format: str = "text"

    def __post_init__(self):
        if self.threads < 1:
            raise ArgumentError(f"threads must be >= 1, got {self.threads}")
        if self.output_format not in ("json", "csv", "text"):
            raise ArgumentError(f"unknown output format {self.output_format!r}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        path = os.environ.get(ENV_TABLE) or args.table
        return cls(
            table_path=Path(path),
            limit=getattr(args, "limit", None) or DEFAULT_LIMIT,
            threads=args.threads,
            output_format=args.format or "text",
        )

    def load(self, minimum: int = 1):
        table = load_table(self.table_path)
        if table.limit < minimum:
            raise ArgumentError(f"table limit {table.limit} too small (need >= {minimum})")
        return table


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {v}")
    return v


def _fmt(d) -> str:
    return f"{d:.6f}"


def _emit(obj, cfg: RunConfig, text: str) -> None:
    if cfg.output_format == "json":
        print(json.dumps(obj, ensure_ascii=False))
    else:
        print(text)


# --- subcommands ------------------------------------------------------------


def cmd_build(args, cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    table = build_table(args.limit, paranoid=args.paranoid)
    seconds = time.perf_counter() - t0
    out = Path(args.out) if args.out else cfg.table_path
    table.save(out)
    info = {"limit": table.limit, "path": str(out), "seconds": round(seconds, 3), "sha256": table.checksum()}
    _emit(info, cfg, f"built limit={table.limit} in {seconds:.2f}s -> {out}\nsha256 {info['sha256']}")
    return EXIT_OK


def query_record(table, n: int) -> dict:
    key = defect_key(table, n)
    st = stability(table, n)
    return {
        "n": n,
        "complexity": key.c,
        "defect": _fmt(key.value),
        "class": defect_class(table, n),
        "leader": is_leader(table, n),
        "stability": {"verdict": st.verdict.value, "k_checked": st.k_checked, "witness": st.witness},
    }


def cmd_query(args, cfg: RunConfig) -> int:
    table = cfg.load()
    for n in args.n:
        rec = query_record(table, n)
        st = rec["stability"]
        text = (f"n={n} complexity={rec['complexity']} defect={rec['defect']} class={rec['class']} "
                f"leader={str(rec['leader']).lower()} stability={st['verdict']}(k={st['k_checked']})")
        _emit(rec, cfg, text)
    return EXIT_OK


def cmd_defects(args, cfg: RunConfig) -> int:
    table = cfg.load(3)
    bound = args.bound or table.limit
    threshold = DefectThreshold.parse(args.max_defect) if args.max_defect else None
    entries = sorted_defects(table, bound, cls=args.cls, stable_only=args.stable, threshold=threshold)
    if cfg.output_format == "csv":
        buf = io.StringIO()
        write_defects_csv(entries, buf)
        sys.stdout.write(buf.getvalue())
    elif cfg.output_format == "json":
        rows = [{"n": e.leader, "complexity": e.key.c, "defect": _fmt(e.key.value),
                 "class": e.cls, "stable_status": e.status.value} for e in entries]
        print(json.dumps(rows))
    else:
        for e in entries:
            print(f"{e.leader}\t{e.key.c}\t{_fmt(e.key.value)}\t{e.cls}\t{e.status.value}")
    return EXIT_OK


def cmd_leaders(args, cfg: RunConfig) -> int:
    table = cfg.load(3)
    bound = args.bound or table.limit
    r = DefectThreshold.parse(args.max_defect)
    ns = enumerate_A_r(table, r, bound) if args.all else enumerate_B_r(table, r, bound)
    if cfg.output_format == "json":
        print(json.dumps({"r": str(r), "bound": bound, "numbers": ns}))
    else:
        print(" ".join(map(str, ns)))
    return EXIT_OK


def cmd_cover(args, cfg: RunConfig) -> int:
    table = cfg.load(3)
    cover = build_S_r(table, args.r)
    text = cover.dumps()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{len(cover)} pairs, max degree {cover.max_degree} -> {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify_cover(args, cfg: RunConfig) -> int:
    table = cfg.load(3)
    cover = CoverSet.loads(Path(args.cover).read_text(encoding="utf-8"))
    report = verify_cover(table, cover, args.bound)
    out = report.to_json()
    out.pop("pair_hits")
    print(json.dumps(out))
    return EXIT_OK if report.ok else EXIT_CHECK


def _load_poly(text: str):
    obj = json.loads(text)
    if isinstance(obj, dict) and "poly" in obj:
        return pair_from_json(obj)
    return expr_from_json(obj)


def _exps(text: str) -> tuple:
    text = text.strip()
    return tuple(int(x) for x in text.split(",")) if text else ()


def cmd_poly(args, cfg: RunConfig) -> int:
    try:
        poly = _load_poly(args.poly)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"--poly is not valid JSON: {exc}")
    expr = poly.expr if isinstance(poly, LowDefectPair) else poly
    if args.action == "eval":
        e = _exps(args.at)
        value = augment_evaluate(expr, e) if args.augmented else evaluate(expr, e)
        _emit({"poly": format_poly(expr), "at": list(e), "value": str(value)}, cfg, str(value))
        return EXIT_OK
    if args.n is None:
        raise ArgumentError("poly represent needs --n")
    reps = find_3_representations(expr, args.n, augmented=args.augmented)
    rec = {"poly": format_poly(expr), "n": args.n, "representations": [list(t) for t in reps]}
    if args.efficient:
        if not isinstance(poly, LowDefectPair):
            raise ArgumentError("--efficient needs a pair with base_complexity")
        ok, witness = is_efficiently_represented(cfg.load(), poly, args.n, use_augmented=args.augmented)
        rec["efficient"] = ok
        rec["witness"] = list(witness) if witness is not None else None
    _emit(rec, cfg, " ".join("(" + ",".join(map(str, t)) + ")" for t in reps) or "none")
    return EXIT_OK


def cmd_ordinal(args, cfg: RunConfig) -> int:
    a, b = parse_ordinal(args.a), parse_ordinal(args.b)
    if args.op == "cmp":
        c = int(compare_ordinals(a, b))
        _emit({"cmp": c}, cfg, str(c))
        return EXIT_OK
    res = nat_sum(a, b) if args.op == "sum" else nat_prod(a, b)
    _emit({"result": format_ordinal(res), "coeffs": list(res.coeffs)}, cfg, format_ordinal(res))
    return EXIT_OK


def cmd_selftest(args, cfg: RunConfig) -> int:
    table = cfg.load()
    acfg = checks.AcceptanceConfig.quick(table.limit) if args.quick else checks.AcceptanceConfig()
    log = (lambda line: print(line, file=sys.stderr)) if cfg.output_format == "json" else print
    results = checks.run_checks(table, acfg, log=log)
    summary = checks.summary(results)
    if cfg.output_format == "json":
        print(json.dumps(summary))
    else:
        print(json.dumps({k: summary[k] for k in ("checks_run", "passed", "failed")}))
    return EXIT_OK if summary["failed"] == 0 else EXIT_CHECK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", default=DEFAULT_TABLE, help=f"table cache (env {ENV_TABLE} wins)")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)

    p = _Parser(prog="defect-forge", description="Integer complexity tables, defects and low-defect covers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("build", parents=[common], help="build and cache a complexity table")
    s.add_argument("--limit", type=_positive, default=DEFAULT_LIMIT)
    s.add_argument("--out", help="output path (default: --table)")
    s.add_argument("--paranoid", action="store_true", help="disable addition-split pruning")
    s.set_defaults(func=cmd_build)

    s = sub.add_parser("query", parents=[common], help="complexity, defect and stability of n")
    s.add_argument("n", type=_positive, nargs="+")
    s.set_defaults(func=cmd_query)

    s = sub.add_parser("defects", parents=[common], help="sorted distinct defects")
    s.add_argument("--class", dest="cls", type=int, choices=(0, 1, 2))
    s.add_argument("--stable", action="store_true", help="only StableWithinHorizon leaders")
    s.add_argument("--max-defect", help="keep defects below p/q")
    s.add_argument("--bound", type=_positive)
    s.set_defaults(func=cmd_defects)

    s = sub.add_parser("leaders", parents=[common], help="leaders with defect below p/q")
    s.add_argument("--max-defect", required=True)
    s.add_argument("--bound", type=_positive)
    s.add_argument("--all", action="store_true", help="every n, not only leaders")
    s.set_defaults(func=cmd_leaders)

    s = sub.add_parser("cover", parents=[common], help="build the covering set for defect < r")
    s.add_argument("--r", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("verify-cover", parents=[common], help="check a cover file up to a bound")
    s.add_argument("--cover", required=True)
    s.add_argument("--bound", type=_positive, required=True)
    s.set_defaults(func=cmd_verify_cover)

    s = sub.add_parser("poly", parents=[common], help="evaluate or 3-represent a polynomial")
    s.add_argument("action", choices=("eval", "represent"))
    s.add_argument("--poly", required=True, help="expression or pair JSON")
    s.add_argument("--at", default="", help="comma separated exponents for eval")
    s.add_argument("--n", type=_positive)
    s.add_argument("--augmented", action="store_true")
    s.add_argument("--efficient", action="store_true", help="also test efficiency against the table")
    s.set_defaults(func=cmd_poly)

    s = sub.add_parser("ordinal", parents=[common], help="natural sum, product or comparison")
    s.add_argument("op", choices=("sum", "prod", "cmp"))
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_ordinal)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance checks")
    s.add_argument("--quick", action="store_true", help="scale bounds to the table")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_args(args)
        return args.func(args, cfg)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except RangeError as exc:
        print(f"defect-forge: range error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except ArgumentError as exc:
        print(f"defect-forge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DefectForgeError, OSError, ValueError) as exc:
        print(f"defect-forge: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
