#!/usr/bin/env python3
"""Temporal-convergence tables: Error_tau against N for each benchmark.

Error_tau is the maximum over a window time grid (plus the quoted time)
of the L2 distance to the exact solution, or to an N_ref-node reference
when no closed form exists.
"""

import argparse
import sys

from cimfem.bench import ExperimentSpec, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--example", default="ex3_1d_case1")
    ap.add_argument("--betas", default="0.25,0.5,0.75")
    ap.add_argument("--n-list", default="20,40,60,80,100")
    ap.add_argument("--m", type=int, default=128, help="mesh intervals (fixed)")
    ap.add_argument("--t", type=float, default=0.8, help="quoted table time")
    ap.add_argument("--reference", default="numeric", choices=("exact", "numeric"))
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    spec = ExperimentSpec(
        mode="sweep-time",
        example_id=args.example,
        betas=tuple(float(b) for b in args.betas.split(",")),
        n_list=tuple(int(n) for n in args.n_list.split(",")),
        m_list=(args.m,),
        eval_times=(args.t,),
        reference=args.reference,
        output_path=args.out,
        threads=args.threads,
    )
    report = run(spec)
    if args.out is None:
        sys.stdout.write(report.to_csv())
    for failure in report.failures:
        print(f"row failed: {failure}", file=sys.stderr)
    return 1 if report.failures else 0


if __name__ == "__main__":
    sys.exit(main())
