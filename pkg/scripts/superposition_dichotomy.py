"""Ratio and mixed statistics of g -> f o g for a few outer functions.

    python3 scripts/superposition_dichotomy.py --m 1 --k 1
"""

import argparse

from zygmund.corpus import make_function
from zygmund.superposition import SuperpositionExperiment, classify_superposition, lipschitz_ratio_test

OUTER = ["sin", "exp", "power_abs:alpha=1/2,p=2", "antideriv:m=2,method=closed(weierstrass:depth=20)"]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=1)
    ap.add_argument("--k", type=int, default=1)
    args = ap.parse_args()
    print("f,ratio_growth,mixed_growth,predicted,measured")
    for spec in OUTER:
        f = make_function(spec)
        rep = lipschitz_ratio_test(SuperpositionExperiment(f, m=args.m, k=args.k))
        res = classify_superposition(f, args.m, args.k)
        print(f'"{spec}",{rep.ratio_fit["growth"]:.4f},{rep.mixed_fit["growth"]:.4f},'
              f'{res["predicted"]},{res["measured"]}')


if __name__ == "__main__":
    main()
