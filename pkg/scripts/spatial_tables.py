#!/usr/bin/env python3
"""Spatial-convergence tables: L2 error and observed order against M.

With an exact solution the error is computed by quadrature; otherwise
the halved-mesh solution prolongated to the fine mesh serves as the
reference (second-order convergence makes the surrogate reliable).
"""

import argparse
import sys

from cimfem.bench import ExperimentSpec, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--example", default="ex3_1d_case1")
    ap.add_argument("--betas", default="0.25,0.5,0.75")
    ap.add_argument("--m-list", default="32,64,128,256")
    ap.add_argument("--n", type=int, default=60, help="contour nodes (fixed)")
    ap.add_argument("--t", type=float, default=0.6)
    ap.add_argument("--reference", default="numeric", choices=("exact", "numeric"))
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    spec = ExperimentSpec(
        mode="sweep-space",
        example_id=args.example,
        betas=tuple(float(b) for b in args.betas.split(",")),
        n_list=(args.n,),
        m_list=tuple(int(m) for m in args.m_list.split(",")),
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
