"""Run the kn >= d sweep over simplex, cube and cross-polytope and write one CSV.

    python3 scripts/run_theorem_sweep.py --max-dim 4 --max-n 4 --out sweep.csv
"""
import argparse
import sys
import time

from skelbary.experiments import ExperimentReport, ExperimentSpec, run_theorem_sweep


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-dim", type=int, default=4)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--parallel", action="store_true")
    ap.add_argument("--no-timing", action="store_true")
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    report = ExperimentReport()
    for gen in ("simplex", "cube", "cross_polytope"):
        for d in range(1, args.max_dim + 1):
            for k in range(1, d + 1):
                n_lo = -(-d // k)
                if n_lo > args.max_n:
                    continue
                spec = ExperimentSpec(gen, d, (n_lo, args.max_n), (k, k), seed=args.seed)
                report.rows += run_theorem_sweep(spec, parallel=args.parallel).rows
    text = report.to_csv(timing=not args.no_timing)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"{len(report.rows)} instances {report.summary()} in {time.perf_counter() - t0:.1f}s",
          file=sys.stderr)
    return 1 if report.violation_count else 0


if __name__ == "__main__":
    sys.exit(main())
