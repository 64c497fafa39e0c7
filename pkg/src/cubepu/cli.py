"""Command line for fitting, benchmarking, sweeping, and search comparison.

Four subcommands:

    fit             interpolate a point set and tabulate the surface
    bench           one benchmark experiment (fixed kernel shape)
    sweep           error curve over a range of shape values
    compare-search  same experiment under cube search and plain scan

Point sources are written `halton:<n>`, `grid:<side>`, or `file:<path>`.
Point files are plain text, one point per line, whitespace- or
comma-separated, `x y z` or `x y z value`, with `#` comments.  Results go to
stdout or --out as CSV (default) or JSON; floats are emitted with 17
significant digits so a write/read round trip is exact.

Exit codes: 0 success, 1 usage, 2 input data, 3 numerical failure.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import bench, pu
from .errors import (
    EmptySubdomainError,
    OutOfDomainError,
    PointFileError,
    RadiusTooLargeError,
    SingularSystemError,
    UncoveredPointError,
    UsageError,
)
from .geometry import DataSite, Point3
from .halton import HaltonConfig, generate
from .rbf import KERNEL_FAMILIES, KernelSpec

RESULT_COLUMNS = (
    "n", "d", "q", "kernel", "shape", "function", "mmax", "mode",
    "rmse", "max_err", "fit_s", "eval_s", "total_s",
    "warn_uncovered", "warn_illcond", "warn_empty",
)

DEFAULT_KERNEL = "w4"
DEFAULT_SHAPE = 0.54


@dataclass(frozen=True)
class FitRequest:
    nodes: tuple
    eval_points: tuple
    centers: str | None
    subdomains: int | None
    kernel: str
    shape: float
    m_max: int | None
    search: str
    function: str | None


@dataclass(frozen=True)
class CliRequest:
    command: str
    experiment: bench.ExperimentSpec | None
    fit: FitRequest | None
    out: str | None
    fmt: str


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_point_source(text):
    """Split a `halton:<n>` / `grid:<side>` / `file:<path>` source string."""
    kind, _, rest = text.partition(":")
    if kind == "halton":
        n = _int_field(rest, "halton count")
        if n < 1:
            raise UsageError(f"halton count must be >= 1, got {rest}")
        return ("halton", n)
    if kind == "grid":
        side = _int_field(rest, "grid side")
        if side < 2:
            raise UsageError(f"grid side must be >= 2, got {rest}")
        return ("grid", side)
    if kind == "file":
        if not rest:
            raise UsageError("file source needs a path: file:<path>")
        return ("file", rest)
    raise UsageError(
        f"bad point source {text!r}; expected halton:<n>, grid:<side>, or file:<path>"
    )


def _int_field(text, what):
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"bad {what}: {text!r}") from None


def parse_shape_range(text):
    """`lo:hi:count` -> (float, float, int)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"bad range {text!r}; expected lo:hi:count")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"bad range bounds in {text!r}") from None
    count = _int_field(parts[2], "range count")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo <= 0 or hi < lo:
        raise UsageError(f"range must satisfy 0 < lo <= hi, got {text!r}")
    if count < 1:
        raise UsageError(f"range count must be >= 1, got {count}")
    return (lo, hi, count)


def read_points(path):
    """Parse a point file into Point3 (3 columns) or DataSite (4 columns) rows.

    Blank lines and `#` comments are skipped.  The first data row fixes the
    column count; mixed arity, non-numeric or non-finite fields, and
    coordinates outside [0, 1]^3 all raise with the offending line number.
    """
    out = []
    arity = None
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.replace(",", " ").split()
            if arity is None:
                if len(fields) not in (3, 4):
                    raise PointFileError(
                        path, line_no, f"expected 3 or 4 columns, got {len(fields)}"
                    )
                arity = len(fields)
            elif len(fields) != arity:
                raise PointFileError(
                    path,
                    line_no,
                    f"row has {len(fields)} columns but the file started with {arity}",
                )
            try:
                nums = [float(t) for t in fields]
            except ValueError:
                bad = next(t for t in fields if not _is_float(t))
                raise PointFileError(path, line_no, f"non-numeric field {bad!r}") from None
            if not all(math.isfinite(v) for v in nums):
                raise PointFileError(path, line_no, "non-finite value")
            x, y, z = nums[:3]
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0 and 0.0 <= z <= 1.0):
                raise PointFileError(
                    path, line_no, f"coordinate outside the unit cube: ({x}, {y}, {z})"
                )
            p = Point3(x, y, z)
            out.append(DataSite(p, nums[3]) if arity == 4 else p)
    return out


def _is_float(token):
    try:
        float(token)
        return True
    except ValueError:
        return False


def load_point_source(source, what="points"):
    """Materialize a parsed source as (points array, values array or None)."""
    kind, arg = source
    if kind == "halton":
        return generate(HaltonConfig(arg)), None
    if kind == "grid":
        return bench.eval_grid(arg), None
    rows = read_points(arg)
    if not rows:
        raise PointFileError(arg, 0, f"no {what} in file")
    if isinstance(rows[0], DataSite):
        pts = np.array([r.position for r in rows])
        vals = np.array([r.value for r in rows])
        return pts, vals
    return np.array(rows, dtype=np.float64), None


def _num(v):
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _result_row(res):
    return (
        res.n, res.d, res.q, res.kernel, res.shape, res.function, res.m_max,
        res.mode, res.rmse, res.max_abs_error, res.fit_seconds,
        res.eval_seconds, res.total_seconds, res.uncovered_points,
        res.illconditioned_solves, res.empty_subdomains,
    )


def _result_dict(res):
    row = _result_row(res)
    return {
        k: (None if v is None else (v if isinstance(v, str) else
            int(v) if isinstance(v, (int, np.integer)) else float(v)))
        for k, v in zip(RESULT_COLUMNS, row)
    }


def render_results(results, fmt):
    """CSV (fixed header) or JSON for one or more experiment results."""
    results = [results] if isinstance(results, bench.ExperimentResult) else list(results)
    if fmt == "json":
        payload = [_result_dict(r) for r in results]
        return json.dumps(payload[0] if len(payload) == 1 else payload, indent=2) + "\n"
    lines = [",".join(RESULT_COLUMNS)]
    for r in results:
        lines.append(",".join(_num(v) for v in _result_row(r)))
    return "\n".join(lines) + "\n"


def render_sweep(sweep, fmt):
    if fmt == "json":
        return json.dumps(
            {
                "curve": [[s, r] for s, r in sweep.points],
                "best_shape": sweep.best_shape,
                "best_rmse": sweep.best_rmse,
            },
            indent=2,
        ) + "\n"
    lines = ["shape,rmse"]
    for s, r in sweep.points:
        lines.append(f"{_num(s)},{_num(r)}")
    return "\n".join(lines) + "\n"


def render_values(points, values, fmt):
    if fmt == "json":
        rows = [[float(p[0]), float(p[1]), float(p[2]), float(v)]
                for p, v in zip(points, values)]
        return json.dumps(rows) + "\n"
    lines = ["x,y,z,value"]
    for p, v in zip(points, values):
        lines.append(f"{_num(float(p[0]))},{_num(float(p[1]))},{_num(float(p[2]))},{_num(float(v))}")
    return "\n".join(lines) + "\n"


def write_text(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _add_common(p, needs_shape):
    p.add_argument("--nodes", required=True, help="node source (halton:<n>, grid:<side>, file:<path>)")
    p.add_argument("--subdomains", type=int, default=None,
                   help="subdomain count d (default: n/8 rounded)")
    p.add_argument("--kernel", choices=KERNEL_FAMILIES, default=None)
    if needs_shape:
        p.add_argument("--shape", type=float, default=None)
    p.add_argument("--function", choices=tuple(bench.TEST_FUNCTIONS), default=None)
    p.add_argument("--mmax", type=int, default=None, help="cap on nodes per subdomain")
    p.add_argument("--no-cube", action="store_true",
                   help="use the plain scan instead of the cube search")
    p.add_argument("--eval", dest="eval_src", default="grid:11",
                   help="evaluation points (default grid:11)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    top = _Parser(prog="cubepu",
                  description="Partition-of-unity RBF interpolation on the unit cube")
    sub = top.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a point set and tabulate the surface")
    _add_common(p_fit, needs_shape=True)
    p_fit.add_argument("--centers", default="halton",
                       help="center source: halton, grid, or file:<path>")

    p_bench = sub.add_parser("bench", help="one benchmark experiment")
    _add_common(p_bench, needs_shape=True)
    p_bench.add_argument("--centers", default="halton", help="center source: halton or grid")

    p_sweep = sub.add_parser("sweep", help="error curve over a shape range")
    _add_common(p_sweep, needs_shape=False)
    p_sweep.add_argument("--range", dest="shape_range", required=True,
                         help="shape range lo:hi:count")
    p_sweep.add_argument("--centers", default="halton", help="center source: halton or grid")

    p_cmp = sub.add_parser("compare-search",
                           help="run the same experiment with and without the cube search")
    _add_common(p_cmp, needs_shape=True)
    p_cmp.add_argument("--centers", default="halton", help="center source: halton or grid")

    return top


def _default_subdomains(n):
    return max(1, round(n / 8))


def _experiment_spec(args, shape=None, shape_range=None):
    source = parse_point_source(args.nodes)
    if source[0] != "halton":
        raise UsageError(
            f"{args.command} regenerates its nodes and needs --nodes halton:<n>"
        )
    n = source[1]
    eval_src = parse_point_source(args.eval_src)
    if eval_src[0] != "grid":
        raise UsageError(f"{args.command} evaluates on a lattice; use --eval grid:<side>")
    if args.centers not in ("halton", "grid"):
        raise UsageError(f"{args.command} supports --centers halton or grid")
    if args.kernel is None:
        raise UsageError("--kernel is required here")
    if shape is None and shape_range is None:
        raise UsageError("--shape is required here")
    return bench.ExperimentSpec(
        node_count=n,
        subdomain_count=args.subdomains or _default_subdomains(n),
        kernel_family=args.kernel,
        shape=shape,
        shape_range=shape_range,
        function=args.function or "f1",
        eval_grid_side=eval_src[1],
        m_max=args.mmax,
        search="no_cube" if args.no_cube else "cube",
        center_source=args.centers,
    )


def parse_args(argv=None):
    """Parse argv into a CliRequest (experiment description or fit request)."""
    args = build_parser().parse_args(argv)
    if args.mmax is not None and args.mmax < 1:
        raise UsageError(f"--mmax must be >= 1, got {args.mmax}")
    if args.subdomains is not None and args.subdomains < 1:
        raise UsageError(f"--subdomains must be >= 1, got {args.subdomains}")
    if args.command == "fit":
        req = FitRequest(
            nodes=parse_point_source(args.nodes),
            eval_points=parse_point_source(args.eval_src),
            centers=args.centers,
            subdomains=args.subdomains,
            kernel=args.kernel or DEFAULT_KERNEL,
            shape=args.shape if args.shape is not None else DEFAULT_SHAPE,
            m_max=args.mmax,
            search="no_cube" if args.no_cube else "cube",
            function=args.function,
        )
        if req.shape <= 0:
            raise UsageError(f"--shape must be positive, got {req.shape}")
        return CliRequest("fit", None, req, args.out, args.format)
    if args.command == "sweep":
        spec = _experiment_spec(args, shape_range=parse_shape_range(args.shape_range))
        return CliRequest("sweep", spec, None, args.out, args.format)
    if args.shape is None or args.shape <= 0:
        raise UsageError(f"--shape must be a positive number, got {args.shape}")
    spec = _experiment_spec(args, shape=args.shape)
    return CliRequest(args.command, spec, None, args.out, args.format)


def _run_fit(req, out, fmt):
    nodes, values = load_point_source(req.nodes, "nodes")
    if values is None:
        if req.function is None:
            raise UsageError(
                "node source carries no values; pass --function to sample a test field"
            )
        values = bench.TEST_FUNCTIONS[req.function](nodes)
    n = nodes.shape[0]

    if req.centers in ("halton", "grid"):
        d = req.subdomains or _default_subdomains(n)
        config = pu.PUConfig(
            kernel=KernelSpec(req.kernel, req.shape),
            subdomain_count=d,
            m_max=req.m_max,
            center_source=req.centers,
        )
    else:
        kind, path = parse_point_source(req.centers)
        if kind != "file":
            raise UsageError(f"bad center source {req.centers!r}")
        centers, _ = load_point_source((kind, path), "centers")
        if req.subdomains is not None and req.subdomains != centers.shape[0]:
            raise UsageError(
                f"--subdomains {req.subdomains} does not match {centers.shape[0]} centers in {path}"
            )
        config = pu.PUConfig(
            kernel=KernelSpec(req.kernel, req.shape),
            subdomain_count=centers.shape[0],
            m_max=req.m_max,
            center_source="explicit",
            centers=centers,
        )

    model = pu.fit(nodes, values, config, search=req.search)
    eval_pts, _ = load_point_source(req.eval_points, "evaluation points")
    report = pu.evaluate_report(model, eval_pts)
    if report.uncovered:
        print(
            f"warning: {report.uncovered} evaluation points outside every "
            f"subdomain (nearest-center fallback used)",
            file=sys.stderr,
        )
    if model.illconditioned_solves:
        print(
            f"warning: {model.illconditioned_solves} ill-conditioned local solves",
            file=sys.stderr,
        )
    write_text(render_values(eval_pts, report.values, fmt), out)


def _run_bench(spec, out, fmt):
    res = bench.run_experiment(spec)
    write_text(render_results(res, fmt), out)


def _run_sweep(spec, out, fmt):
    sweep = bench.sweep_shape(spec)
    print(
        f"best shape {sweep.best_shape:g} with rmse {sweep.best_rmse:.6e}",
        file=sys.stderr,
    )
    write_text(render_sweep(sweep, fmt), out)


def _run_compare(spec, out, fmt):
    res_cube, res_scan = bench.compare_search(spec)
    match = (res_cube.rmse == res_scan.rmse
             and res_cube.max_abs_error == res_scan.max_abs_error)
    speedup = res_scan.fit_seconds / res_cube.fit_seconds if res_cube.fit_seconds else float("inf")
    print(
        f"cube fit {res_cube.fit_seconds:.3f}s, scan fit {res_scan.fit_seconds:.3f}s "
        f"(x{speedup:.2f}); results identical: {match}",
        file=sys.stderr,
    )
    if fmt == "json":
        payload = {
            "cube": _result_dict(res_cube),
            "no_cube": _result_dict(res_scan),
            "results_match": bool(match),
            "fit_speedup": float(speedup),
        }
        write_text(json.dumps(payload, indent=2) + "\n", out)
    else:
        write_text(render_results([res_cube, res_scan], fmt), out)


def main(argv=None):
    try:
        req = parse_args(argv)
        if req.command == "fit":
            _run_fit(req.fit, req.out, req.fmt)
        elif req.command == "bench":
            _run_bench(req.experiment, req.out, req.fmt)
        elif req.command == "sweep":
            _run_sweep(req.experiment, req.out, req.fmt)
        else:
            _run_compare(req.experiment, req.out, req.fmt)
        return 0
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (PointFileError, OutOfDomainError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"input error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 2
    except (EmptySubdomainError, SingularSystemError, RadiusTooLargeError,
            UncoveredPointError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
