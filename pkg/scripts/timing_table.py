"""Timing table: cube-partition search vs plain scan at benchmark sizes.

Runs the same fit/evaluate experiment under both search engines and prints
fit times, the speedup ratio, and a bit-identity check of the RMSE columns.
The default sizes run in seconds; --full adds the large 274625-node case,
which can take minutes on a laptop.
"""

import argparse

from cubepu.bench import ExperimentSpec, compare_search

SIZES = [(4913, 512), (35937, 4096)]
FULL_SIZE = (274625, 32768)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--kernel", default="w4", choices=("g", "m4", "w4"))
    ap.add_argument("--shape", type=float, default=0.54)
    ap.add_argument("--function", default="f1", choices=("f1", "f2"))
    ap.add_argument("--full", action="store_true",
                    help="include the 274625-node / 32768-subdomain case")
    args = ap.parse_args()

    sizes = SIZES + ([FULL_SIZE] if args.full else [])
    header = f"{'n':>8} {'d':>6} {'q':>3} {'fit_cube':>10} {'fit_scan':>10} {'ratio':>7}  identical"
    print(f"kernel {args.kernel} shape {args.shape:g} on {args.function}")
    print(header)
    print("-" * len(header))
    for n, d in sizes:
        spec = ExperimentSpec(n, d, args.kernel, shape=args.shape,
                              function=args.function)
        cube, scan = compare_search(spec)
        same = cube.rmse == scan.rmse and cube.max_abs_error == scan.max_abs_error
        ratio = scan.fit_seconds / cube.fit_seconds if cube.fit_seconds else float("inf")
        print(f"{n:>8} {d:>6} {cube.q:>3} {cube.fit_seconds:>9.3f}s "
              f"{scan.fit_seconds:>9.3f}s {ratio:>6.2f}x  {same}")


if __name__ == "__main__":
    main()
