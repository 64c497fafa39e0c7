"""Shape-parameter sweeps: RMSE curves per kernel family.

Sweeps each kernel's shape parameter over its customary range at the small
benchmark size, prints the best value per family, and writes one
`sweep_<kernel>.csv` curve (shape, rmse) per family for plotting.
"""

import argparse
import os

from cubepu.bench import ExperimentSpec, sweep_shape

DEFAULT_RANGES = {
    "g": (1.0, 10.0, 19),
    "m4": (1.0, 10.0, 19),
    "w4": (0.1, 1.9, 19),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=4913)
    ap.add_argument("--subdomains", type=int, default=512)
    ap.add_argument("--function", default="f1", choices=("f1", "f2"))
    ap.add_argument("--points", type=int, default=19,
                    help="sweep points per kernel (default 19)")
    ap.add_argument("--outdir", default=".", help="directory for the curve CSVs")
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    for fam, (lo, hi, _) in DEFAULT_RANGES.items():
        spec = ExperimentSpec(args.nodes, args.subdomains, fam,
                              shape_range=(lo, hi, args.points),
                              function=args.function)
        swp = sweep_shape(spec)
        path = os.path.join(args.outdir, f"sweep_{fam}.csv")
        with open(path, "w") as fh:
            fh.write("shape,rmse\n")
            for s, r in swp.points:
                fh.write(f"{s:.17g},{r:.17g}\n")
        print(f"{fam:>3}: best shape {swp.best_shape:g} "
              f"rmse {swp.best_rmse:.4e}  ({len(swp.points)} points -> {path})")


if __name__ == "__main__":
    main()
