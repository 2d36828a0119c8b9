#!/usr/bin/env python3
"""Convergence of the partition Phi-variation toward its closed-form limit.

Runs exhaustive enumeration for the three built-in critical families and
prints per-level values, limit ratios, and q-variation columns.
"""

import argparse
import time

from phivar import convergence_report, critical, tent, trig

FAMILIES = {
    "takagi-b2": critical(tent(), 2, 1),
    "takagi-b3+": critical(tent(), 3, 1),
    "takagi-b3-": critical(tent(), 3, -1),
    "weierstrass-b2": critical(trig(1, 0), 2, 1),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="+", default=None,
                    help="partition levels (default: family-appropriate ramp)")
    ap.add_argument("--q", type=float, nargs="*", default=[1.0, 2.0])
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    for name, spec in FAMILIES.items():
        levels = args.levels or ([4, 8, 12, 16, 20] if spec.b == 2 else [3, 6, 9, 13])
        t0 = time.time()
        rep = convergence_report(spec, levels, [1.0], args.q, threads=args.threads)
        print(f"\n# {name}  (b={spec.b}, sign={spec.alpha_sign:+d})")
        header = ["n", "V_phi", "ratio"] + [f"V_q[{q:g}]" for q in args.q]
        print("  ".join(f"{h:>12}" for h in header))
        for row in rep.rows:
            cells = [f"{row.n:>12d}", f"{row.v_phi:>12.7f}", f"{row.ratio:>12.5f}"]
            cells += [f"{row.v_q[q]:>12.6f}" for q in args.q]
            print("  ".join(cells))
        print(f"  elapsed: {time.time() - t0:.2f}s")


if __name__ == "__main__":
    main()
