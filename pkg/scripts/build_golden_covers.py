"""Regenerate tests/golden/S_r_*.json from a 10^6 table.

Run after an intentional change to the cover construction, then review the diff.
"""

import argparse
import time
from pathlib import Path

from defect_forge import build_S_r, build_table, verify_cover

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"
RADII = {"1/2": 10**5, "1": 10**5, "3/2": 10**4}


def golden_name(r: str) -> str:
    return "S_r_" + r.replace("/", "_") + ".json"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--limit", type=int, default=10**6)
    ap.add_argument("--out", type=Path, default=GOLDEN)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    table = build_table(args.limit)
    for r, bound in RADII.items():
        t0 = time.perf_counter()
        cover = build_S_r(table, r)
        report = verify_cover(table, cover, bound)
        if not report.ok:
            raise SystemExit(f"r={r}: cover fails at {report.failures[:5]}; not writing")
        (args.out / golden_name(r)).write_text(cover.dumps(), encoding="utf-8")
        print(f"r={r}: {len(cover)} pairs, verified to {bound}, {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
