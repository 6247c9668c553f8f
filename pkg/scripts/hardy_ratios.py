"""Empirical Hardy ratios lhs/rhs over random step functions, relative to the Muckenhoupt constant A."""

import argparse

import numpy as np

from hardyrellich.muckenhoupt import Direction, empirical_max_ratio, lemma_pairs, power_pair
from hardyrellich.profiles import catalog_lookup


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--weight", default="power:alpha=4,N=5", help="catalog name whose two pairs are tested")
    ap.add_argument("--candidates", type=int, default=500)
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--classical", action="store_true",
                    help="also test u = s^-2, v = 1 on (0, inf), whose best constant is exactly 4A")
    args = ap.parse_args()

    entry = catalog_lookup(args.weight)
    pairs = list(lemma_pairs(entry.weight, entry.domain))
    if args.classical:
        pairs.append(power_pair(-2.0, 0.0, float("inf"), Direction.FROM_ZERO))
    for hp in pairs:
        ratios = []
        for seed in range(args.seeds):
            res = empirical_max_ratio(hp, n_candidates=args.candidates, seed=seed)
            ratios.append(res.max_ratio / res.constant)
        print(f"{hp.name:<40} A={res.constant:.6g}  max ratio/A over seeds: "
              f"{np.max(ratios):.4f} (min {np.min(ratios):.4f})")


if __name__ == "__main__":
    main()
