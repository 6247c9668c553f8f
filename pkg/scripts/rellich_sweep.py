"""Finite-element estimates of the best weighted Rellich constant under mesh refinement and truncation."""

import argparse
import time

from hardyrellich.profiles import catalog_lookup
from hardyrellich.verifier import clamped_ball_constant, rellich_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", default="power:alpha=4,N=5", help="catalog name")
    ap.add_argument("--elements", type=int, nargs="+", default=[500, 1000, 2000, 4000])
    ap.add_argument("--truncations", type=float, nargs="+", default=[1e1, 1e2, 1e3])
    ap.add_argument("--r-min", type=float, default=1e-7)
    args = ap.parse_args()

    entry = catalog_lookup(args.weight)
    start = time.perf_counter()
    sweep = rellich_sweep(entry.weight, entry.domain, args.truncations, args.elements, args.r_min,
                          reference_trunc=max(args.truncations))
    elapsed = time.perf_counter() - start
    print(f"weight {entry.weight.name} on {entry.domain.kind.value}, N={entry.domain.dimension}")
    for ne, est in zip(sweep["elements"], sweep["estimates_per_mesh"]):
        print(f"  elements {ne:>6}: {est:.8f}")
    for rt, est in zip(sweep["r_truncs"], sweep["estimates_per_trunc"]):
        print(f"  truncation {rt:>8g}: {est:.8f}")
    if args.weight.startswith("constant") and entry.domain.bounded:
        ref = clamped_ball_constant(entry.domain.dimension, entry.domain.outer_radius)
        print(f"  clamped-ball reference 1/k^4: {ref:.8f}")
    print(f"  {elapsed:.1f} s")


if __name__ == "__main__":
    main()
