"""Seed sweep of the curve test: how often a composite disagrees with the
direct verdict.

    python3 scripts/boman_sweep.py --curves 32 --seeds 0 1 2 3
"""

import argparse
import time

from zygmund.corpus import make_function
from zygmund.curvelab import boman_test, random_polynomial_family

W1 = "antideriv:m=1,method=closed(weierstrass:depth=20)"
CASES = [
    ("tensor(poly:1,-2,0,3, poly:0,1,1)", 0, "zygmund"),
    (f"tensor({W1}, {W1})", 1, "zygmund"),
    ("tensor(power_abs:alpha=0.5, poly:0,0,1)", 0, "holder(0.5)"),
    ("tensor(power_abs:alpha=0.25, sin)", 0, "lipschitz"),
    ("tensor(cos, power_abs:alpha=0.25)", 0, "zygmund"),
    ("tensor(tlog, const:0)", 0, "lipschitz"),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--curves", type=int, default=32)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2, 3])
    ap.add_argument("--curve-grid", type=int, default=1048577)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    print("function,criterion,seed,direct,composites_yes,curves,agreement,seconds")
    for spec, m, crit in CASES:
        f = make_function(spec)
        for seed in args.seeds:
            t0 = time.time()
            fam = random_polynomial_family(args.curves, f.domain, degree=3, seed=seed)
            rep = boman_test(f, fam, m, crit, curve_n=args.curve_grid, threads=args.threads)
            yes = sum(c["verdict"] for c in rep.curves)
            print(f'"{spec}",{crit},{seed},{rep.direct},{yes},{len(rep.curves)},'
                  f"{rep.agreement},{time.time() - t0:.1f}", flush=True)


if __name__ == "__main__":
    main()
