"""Command-line front end: ``varlearn <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 input or parse error, 3 numerical
failure (capacity exceeded or degenerate sample).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .dimension import ESTIMATORS, dimension_diagram
from .equations import ToleranceRule, find_equations
from .errors import CapacityError, DegenerateSampleError, InvalidInputError
from .pointcloud import Ambient, distance_matrix, read_csv, write_csv
from .polynomials import PolynomialSet, format_polynomial, homogenize, read_polynomials, round_coefficients
from .samplers import VARIETIES, Noise, SamplerConfig, sample
from .svg import barcode_svg, diagram_svg
from .topology import SCALES, vietoris_rips_barcode
from .varietygeom import corank_dimension, ellipsoid_distance_matrix, empirical_reach, tangent_spaces
from .volume import real_degree_hypersurface

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=False) + "\n"


def _finite_or_str(x: float):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _parse_rule(text: str | None, min_gap: float | None):
    if text is None or text == "gap":
        return ToleranceRule("gap", min_gap=min_gap) if min_gap is not None else None
    if text == "machine":
        return ToleranceRule("machine")
    try:
        return ToleranceRule("fixed", tau=float(text))
    except ValueError:
        raise InvalidInputError(f"--tol must be 'gap', 'machine' or a number, got {text!r}") from None


def _load_cloud(args, projective: bool | None = None):
    proj = args.projective if projective is None else projective
    return read_csv(
        args.input,
        columns_are_points=args.columns_are_points,
        ambient=Ambient.PROJECTIVE if proj else Ambient.EUCLIDEAN,
    )


def _emit(args, text: str, outputs: list[str]) -> None:
    if args.output:
        Path(args.output).write_text(text)
        outputs.append(args.output)
    else:
        sys.stdout.write(text)


# -- subcommands ---------------------------------------------------------------


def _cmd_sample(args, outputs):
    params = {}
    if args.variety in ("lowrank", "segre"):
        params.update(p=args.p, q=args.q, r=args.r if args.variety == "lowrank" else 1)
    if args.variety == "toric" and args.matrix:
        params["A"] = np.loadtxt(args.matrix, delimiter=",", ndmin=2).astype(int)
    if args.noise == "round":
        noise = Noise.round_digits(args.digits)
    elif args.noise == "gaussian":
        noise = Noise.gaussian(args.sigma)
    else:
        noise = Noise()
    cloud = sample(SamplerConfig(args.variety, args.m, args.seed, params, noise))
    if args.output:
        write_csv(cloud, args.output)
        outputs.append(args.output)
    else:
        np.savetxt(sys.stdout, cloud.points, delimiter=",", fmt="%.17g")


def _cmd_dimdiag(args, outputs):
    cloud = _load_cloud(args)
    names = args.estimators.split(",") if args.estimators else None
    diag = dimension_diagram(cloud, names, args.grid, seed=args.seed)
    _emit(args, diag.dumps() + "\n", outputs)
    if args.svg:
        Path(args.svg).write_text(diagram_svg(diag))
        outputs.append(args.svg)
    if args.band:
        lo, hi = (float(x) for x in args.band.split(","))
        for name, med in diag.band_median(lo, hi).items():
            sys.stderr.write(f"{name}\t{'none' if med is None else f'{med:.4g}'}\n")


def _cmd_equations(args, outputs):
    cloud = _load_cloud(args)
    rule = _parse_rule(args.tol, args.min_gap)
    result = find_equations(cloud, args.degree, args.homogeneous, args.method, rule, return_details=True)
    F = result.polynomials
    if args.round is not None:
        F = PolynomialSet([round_coefficients(f, args.round) for f in F], F.nvars)
    if args.singular_values:
        with open(args.singular_values, "w") as fh:
            fh.write("index,log10_sigma\n")
            floor = np.finfo(float).tiny
            for i, s in enumerate(result.singular_values):
                fh.write(f"{i},{math.log10(max(float(s), floor))!r}\n")
        outputs.append(args.singular_values)
    if args.format == "text":
        _emit(args, "".join(format_polynomial(f) + "\n" for f in F), outputs)
        return
    obj = F.to_json()
    obj.update(
        count=len(F),
        method=result.method.value if hasattr(result.method, "value") else str(result.method),
        rank=int(result.rank),
        tau=float(result.tau),
        basis_size=len(result.basis),
    )
    _emit(args, _dump(obj), outputs)


def _cmd_tangent(args, outputs):
    cloud = _load_cloud(args, projective=False)
    F = read_polynomials(args.eqs, cloud.n)
    rule = _parse_rule(args.tol, None)
    result = corank_dimension(F, cloud, rule, return_histogram=True)
    obj = {
        "dimension": result.mode,
        "histogram": {str(k): v for k, v in result.histogram.items()},
    }
    if args.bases:
        obj["tangents"] = [t.to_json() for t in tangent_spaces(F, cloud, rule)]
    _emit(args, _dump(obj), outputs)


def _cmd_reach(args, outputs):
    cloud = _load_cloud(args, projective=False)
    F = read_polynomials(args.eqs, cloud.n)
    tau = empirical_reach(cloud, F, _parse_rule(args.tol, None))
    _emit(args, _dump({"reach": _finite_or_str(tau), "m": cloud.m}), outputs)


def _cmd_barcode(args, outputs):
    if args.ellipsoid:
        if not args.eqs:
            raise UsageError("--ellipsoid requires --eqs")
        if args.projective:
            raise UsageError("--ellipsoid works on Euclidean samples only")
        cloud = _load_cloud(args)
        F = read_polynomials(args.eqs, cloud.n)
        D = ellipsoid_distance_matrix(cloud, F, args.lam)
    else:
        D = distance_matrix(_load_cloud(args))
    bc = vietoris_rips_barcode(D, args.max_dim, args.max_scale, scale=args.scale)
    if args.longest is not None:
        bc = bc.longest(args.longest, None if args.longest_dim is None else args.longest_dim)
    _emit(args, bc.dumps() + "\n", outputs)
    if args.svg:
        Path(args.svg).write_text(barcode_svg(bc, args.max_scale))
        outputs.append(args.svg)


def _cmd_volume(args, outputs):
    F = read_polynomials(args.poly)
    if len(F) != 1:
        raise InvalidInputError(f"{args.poly}: expected exactly one polynomial, got {len(F)}")
    f = F[0]
    if args.homogenize:
        f = homogenize(f)
    if not f.is_homogeneous():
        raise InvalidInputError(f"{args.poly}: polynomial is not homogeneous (use --homogenize)")
    est = real_degree_hypersurface(f, args.trials, args.seed)
    _emit(args, _dump(est.to_json()), outputs)


# -- parser ----------------------------------------------------------------------


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _unit_interval(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1], got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="varlearn", description="Learn the geometry of a variety from samples.")
    parser.add_argument("--version", action="version", version=f"varlearn {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, *, needs_input=True):
        p.add_argument("-o", "--output", help="output file (default: standard output)")
        p.add_argument("--threads", type=_positive_int, default=1)
        if needs_input:
            p.add_argument("-i", "--input", required=True, help="CSV sample, one point per row")
            p.add_argument("--columns-are-points", action="store_true")

    p = sub.add_parser("sample", help="draw a sample from a model variety")
    common(p, needs_input=False)
    p.add_argument("--variety", required=True, choices=VARIETIES)
    p.add_argument("--m", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=_positive_int, default=2)
    p.add_argument("--q", type=_positive_int, default=3)
    p.add_argument("--r", type=_positive_int, default=1)
    p.add_argument("--matrix", help="CSV integer matrix for the toric sampler")
    p.add_argument("--noise", choices=("none", "round", "gaussian"), default="none")
    p.add_argument("--digits", type=int, default=4)
    p.add_argument("--sigma", type=float, default=0.0)
    p.set_defaults(run=_cmd_sample)

    p = sub.add_parser("dimdiag", help="dimension diagram over a grid of scales")
    common(p)
    p.add_argument("--grid", type=int, default=25)
    p.add_argument("--estimators", help=f"comma-separated subset of {','.join(ESTIMATORS)}")
    p.add_argument("--projective", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--band", help="'lo,hi': print per-estimator medians over this range")
    p.add_argument("--svg")
    p.set_defaults(run=_cmd_dimdiag)

    p = sub.add_parser("equations", help="polynomials vanishing on the sample")
    common(p)
    p.add_argument("--degree", type=_positive_int, required=True)
    p.add_argument("--homogeneous", action="store_true")
    p.add_argument("--projective", action="store_true")
    p.add_argument("--method", choices=("svd", "qr", "rref"), default="svd")
    p.add_argument("--tol", help="'gap' (default), 'machine' or a fixed threshold")
    p.add_argument("--min-gap", type=float, help="smallest accepted gap in decades")
    p.add_argument("--round", type=int, help="round coefficients to this many digits")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--singular-values", help="write the log10 spectrum as CSV")
    p.set_defaults(run=_cmd_equations)

    for name, fn, text in (("tangent", _cmd_tangent, "tangent spaces and corank"), ("reach", _cmd_reach, "empirical reach")):
        p = sub.add_parser(name, help=text)
        common(p)
        p.add_argument("--eqs", required=True, help="polynomial file")
        p.add_argument("--tol")
        if name == "tangent":
            p.add_argument("--bases", action="store_true", help="include tangent bases")
        p.set_defaults(run=fn, projective=False)

    p = sub.add_parser("barcode", help="Vietoris-Rips barcode")
    common(p)
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--max-scale", type=_unit_interval, default=1.0)
    p.add_argument("--scale", choices=SCALES, default="radius")
    p.add_argument("--projective", action="store_true")
    p.add_argument("--ellipsoid", action="store_true")
    p.add_argument("--eqs")
    p.add_argument("--lambda", dest="lam", type=_unit_interval, default=0.01)
    p.add_argument("--longest", type=int)
    p.add_argument("--longest-dim", type=int)
    p.add_argument("--svg")
    p.set_defaults(run=_cmd_barcode)

    p = sub.add_parser("volume", help="real degree and volume of a hypersurface")
    common(p, needs_input=False)
    p.add_argument("--poly", required=True, help="file with one homogeneous polynomial")
    p.add_argument("--trials", type=_positive_int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--homogenize", action="store_true")
    p.set_defaults(run=_cmd_volume)
    return parser


def _manifest(args, argv, outputs, wall, started) -> dict:
    config = {k: v for k, v in vars(args).items() if k != "run"}
    return {
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "seed": getattr(args, "seed", None),
        "inputs": [x for x in (getattr(args, "input", None), getattr(args, "eqs", None), getattr(args, "poly", None)) if x],
        "outputs": outputs,
        "started_at": started,
        "wall_time_s": wall,
        "version": __version__,
    }


def _fail(code: int, kind: str, message) -> int:
    text = " ".join(str(message).split())
    sys.stderr.write(f"varlearn: {kind}: {text}\n")
    return code


def run(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    outputs: list[str] = []
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    try:
        with threadpool_limits(limits=args.threads):
            args.run(args, outputs)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except (CapacityError, DegenerateSampleError, np.linalg.LinAlgError) as exc:
        return _fail(EXIT_NUMERIC, "numerical", exc)
    except (InvalidInputError, ValueError, OSError) as exc:
        return _fail(EXIT_INPUT, "input", exc)
    wall = time.perf_counter() - t0
    if outputs:
        text = _dump(_manifest(args, argv, outputs, wall, started))
        for out in outputs:
            Path(out + ".manifest.json").write_text(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
