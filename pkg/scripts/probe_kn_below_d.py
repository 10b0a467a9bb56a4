"""Random interior targets with kn < d on seeded random hulls.

Feasible draws are printed as anomalies together with their witness.
"""
import argparse
import sys

from skelbary.experiments import ExperimentSpec, probe_infeasible


def main(argv=None) -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--trials3", type=int, default=20)
    ap.add_argument("--trials4", type=int, default=10)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    reports = [probe_infeasible(ExperimentSpec("random_hull", 3, (2, 2), (1, 1),
                                               trials=args.trials3, seed=args.seed)),
               probe_infeasible(ExperimentSpec("random_hull", 4, (2, 3), (1, 1),
                                               trials=args.trials4, seed=args.seed + 1))]
    rows = [r for rep in reports for r in rep.rows]
    for r in rows:
        if r["status"] == "feasible":
            print(f"anomaly d={r['d']} n={r['n']} trial={r['trial']}: {r['witness']}", file=sys.stderr)
    text = "".join(rep.to_csv() if i == 0 else rep.to_csv().split("\n", 1)[1]
                   for i, rep in enumerate(reports))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    counts = {}
    for r in rows:
        counts[r["status"]] = counts.get(r["status"], 0) + 1
    print(counts, file=sys.stderr)
    return 0 if set(counts) <= {"infeasible", "feasible"} else 1


if __name__ == "__main__":
    sys.exit(main())
