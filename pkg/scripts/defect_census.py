"""Census of small defects: leader counts below thresholds, per class, plus stability stats.

    python scripts/defect_census.py --limit 1000000 --max-defect 2 --step 1/4
"""

import argparse
import json
import time
from collections import Counter
from fractions import Fraction

from defect_forge import DefectThreshold, build_table, enumerate_B_r, sorted_defects, stability_verdicts


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--limit", type=int, default=10**6)
    ap.add_argument("--bound", type=int, help="largest n counted (default limit // 9)")
    ap.add_argument("--max-defect", type=Fraction, default=Fraction(2))
    ap.add_argument("--step", type=Fraction, default=Fraction(1, 4))
    args = ap.parse_args()
    bound = args.bound or args.limit // 9

    t0 = time.perf_counter()
    table = build_table(args.limit)
    print(f"# table to {args.limit} in {time.perf_counter() - t0:.2f}s; counting n <= {bound}")

    rows = []
    r = args.step
    while r <= args.max_defect:
        leaders = enumerate_B_r(table, DefectThreshold.parse(r), bound)
        rows.append({"r": str(r), "leaders": len(leaders), "largest": leaders[-1] if leaders else None})
        r += args.step
    for row in rows:
        print(json.dumps(row))

    entries = sorted_defects(table, bound, threshold=DefectThreshold.parse(args.max_defect))
    by_class = Counter(str(e.cls) for e in entries)
    verdicts = stability_verdicts(table, bound)
    by_verdict = Counter(v.value for v in verdicts[1:])
    print(json.dumps({"distinct_defects_below": str(args.max_defect), "by_class": dict(sorted(by_class.items()))}))
    print(json.dumps({"stability": dict(sorted(by_verdict.items()))}))


if __name__ == "__main__":
    main()
