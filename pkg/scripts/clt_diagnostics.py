#!/usr/bin/env python3
"""Monte Carlo diagnostics for the digit-driven CLT machinery.

For a chosen family: normality of Z_n / sqrt(n), the scaled Phi-expectation
against its limit constant, transition frequencies vs the exact chain
(odd b, tent), and the predictable-QV slope (trig).
"""

import argparse
import math

from phivar import critical, tent, trig
from phivar import stochastic as st
from phivar.theory import phi_limit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--base", choices=("tent", "trig"), default="tent")
    ap.add_argument("--b", type=int, default=3)
    ap.add_argument("--sign", type=int, choices=(1, -1), default=1)
    ap.add_argument("--n", type=int, nargs="+", default=[100, 400])
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    base = tent() if args.base == "tent" else trig(1, 0)
    spec = critical(base, args.b, args.sign)
    limit = phi_limit(spec)
    print(f"family: {args.base} b={args.b} sign={args.sign:+d}  "
          f"sigma2={limit.sigma2:.6f}  limit={limit.value:.7f}")

    for n in args.n:
        ens = st.sample_paths(spec, n, args.count, args.seed)
        z = ens.z_final()
        ks = st.ks_normal(z / math.sqrt(n), limit.sigma2)
        scaled = st.clt_scaled_expectation(spec, n, mc_count=args.count, seed=args.seed)
        print(f"n={n:>5}: mean={z.mean():+.4f}  var/n={z.var() / n:.4f}  "
              f"KS={ks:.4f}  b^n E Phi(b^-n|Z|)={scaled:.5f}  "
              f"(/limit={scaled / limit.value:.4f})")

    if args.base == "tent" and args.b % 2 == 1:
        counts = st.transition_counts(ens)
        freq = counts / counts.sum(axis=1, keepdims=True)
        print("empirical transition frequencies (signed states -1,0,+1):")
        for row in freq:
            print("   ", "  ".join(f"{p:.4f}" for p in row))

    if args.base == "trig":
        path = st.sample_paths(spec, max(args.n), 1, args.seed)[0]
        qv = st.predictable_qv(spec, path)
        print(f"predictable QV: <Z>_n/n = {qv[-1] / len(qv):.4f} "
              f"(target {limit.sigma2:.4f})")


if __name__ == "__main__":
    main()
