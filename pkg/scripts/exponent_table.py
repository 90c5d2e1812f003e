"""Fitted exponents and verdicts for every corpus member.

    python3 scripts/exponent_table.py --grid 65537
"""

import argparse

from zygmund.corpus import CORPUS, make_function
from zygmund.seminorm import SampledFn, classify, estimate_exponent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=65537)
    args = ap.parse_args()
    print("spec,m,s_hat_n1,s_hat_n2,verdicts_match_label")
    for spec in CORPUS:
        f = make_function(spec)
        m = getattr(f.label, "order", None) or 0
        S = SampledFn.sample(f, f.domain, n=args.grid, order=m)
        s1 = estimate_exponent(S, 1).exponent
        s2 = estimate_exponent(S, 2).exponent
        alphas = f.label.probe_alphas
        ok = classify(S, m, alphas=alphas).verdicts == f.label.verdicts(m, alphas)
        print(f'"{spec}",{m},{s1:.4f},{s2:.4f},{ok}')


if __name__ == "__main__":
    main()
