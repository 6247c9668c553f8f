"""Classify every catalog weight and print its certificates and constant bounds."""

import argparse
import json
import math
import sys

from hardyrellich.admissibility import UnsupportedGeometry, classify
from hardyrellich.profiles import catalog_lookup, catalog_names


def report(names, exhaustive):
    rows = []
    for name in names:
        entry = catalog_lookup(name)
        try:
            v = classify(entry.weight, entry.domain, exhaustive=exhaustive)
        except UnsupportedGeometry as exc:
            rows.append({"weight": name, "status": "unsupported", "detail": str(exc)})
            continue
        rows.append({
            "weight": name,
            "domain": entry.domain.kind.value,
            "dimension": entry.domain.dimension,
            "status": v.status.value,
            "criterion": None if v.criterion is None else v.criterion.value,
            "certificate": v.certificate_value,
            "constant_bound": v.constant_bound,
            "checked": {r.criterion.value: r.value for r in v.details},
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", help="catalog names (default: all)")
    ap.add_argument("--exhaustive", action="store_true", help="evaluate every criterion, not just the first")
    ap.add_argument("--json", action="store_true", help="print JSON instead of a table")
    args = ap.parse_args()
    rows = report(args.names or catalog_names(), args.exhaustive)
    if args.json:
        json.dump(rows, sys.stdout, indent=2, default=lambda x: str(x))
        print()
        return
    for r in rows:
        if r["status"] == "unsupported":
            print(f"{r['weight']:<32} unsupported: {r['detail']}")
            continue
        bound = r["constant_bound"]
        bound_s = "-" if bound is None else (f"{bound:.6g}" if math.isfinite(bound) else "inf")
        print(f"{r['weight']:<32} N={r['dimension']} {r['domain']:<9} {r['status']:<14} "
              f"{r['criterion'] or '-':<22} cert={r['certificate']:.6g} bound={bound_s}")


if __name__ == "__main__":
    main()
