"""Accuracy tables: RMSE and max error per kernel at the canonical shapes.

For each kernel family the experiment runs at its best-known shape value on
both benchmark sizes and reports RMSE, max error, fit time, and the
ill-conditioned-solve count on the 11^3 evaluation lattice.
"""

import argparse

from cubepu.bench import ExperimentSpec, run_experiment

CANONICAL_SHAPES = {"g": 2.7, "m4": 2.6, "w4": 0.54}
SIZES = [(4913, 512), (35937, 4096)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--function", default="f1", choices=("f1", "f2"))
    ap.add_argument("--mmax", type=int, default=None,
                    help="optional cap on nodes per subdomain")
    args = ap.parse_args()

    header = (f"{'kernel':>6} {'shape':>6} {'n':>8} {'d':>6} "
              f"{'rmse':>12} {'max_err':>12} {'fit_s':>8} {'illcond':>8}")
    print(f"test function {args.function}")
    print(header)
    print("-" * len(header))
    for fam, shape in CANONICAL_SHAPES.items():
        for n, d in SIZES:
            res = run_experiment(ExperimentSpec(
                n, d, fam, shape=shape, function=args.function, m_max=args.mmax))
            print(f"{fam:>6} {shape:>6g} {n:>8} {d:>6} "
                  f"{res.rmse:>12.4e} {res.max_abs_error:>12.4e} "
                  f"{res.fit_seconds:>8.3f} {res.illconditioned_solves:>8}")


if __name__ == "__main__":
    main()
