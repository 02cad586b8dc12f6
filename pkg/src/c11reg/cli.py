"""Command-line front end: ``c11reg <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 malformed input file, 3 domain
violation (for instance ``u < v`` in ``pinch``).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import analysis, circle, envelope, regularize
from .grid import GridSpec, fp_tolerance, generate, GENERATORS
from .io import (
    GridFormatError, _jsonable, emit_plot_data, file_digest, read_circle, read_grid,
    write_circle, write_grid, write_json,
)

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _range(text: str) -> tuple[float, float, float]:
    """``a:h:b`` -> (a, h, b)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:h:b, got {text!r}")
    try:
        a, h, b = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:h:b, got {text!r}")
    if not h > 0 or b <= a:
        raise argparse.ArgumentTypeError(f"need h > 0 and b > a in {text!r}")
    return a, h, b


def _positive(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not x > 0 or not np.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return x


def _spec_from_ranges(ranges) -> GridSpec:
    specs = []
    for a, h, b in ranges:
        try:
            specs.append(GridSpec.from_bounds(a, b, h))
        except ValueError as exc:
            raise UsageError(str(exc))
    if len(specs) > 2:
        raise UsageError("at most two --grid axes")
    return GridSpec(tuple(s.origin[0] for s in specs), tuple(s.spacing[0] for s in specs),
                    tuple(s.shape[0] for s in specs))


class _Run:
    """Collects report fields while a subcommand executes."""

    def __init__(self, args, operation):
        self.args = args
        self.report = {"operation": operation, "inputs": {}, "parameters": {},
                       "tolerances": {}, "timings": {}}

    def read(self, name, path, loader=read_grid):
        t0 = time.perf_counter()
        obj = loader(path)
        self.report["inputs"][name] = {"path": str(path), "sha256": file_digest(path)}
        self.report["timings"][f"read_{name}"] = time.perf_counter() - t0
        return obj

    def timed(self, label, func, *a, **kw):
        t0 = time.perf_counter()
        out = func(*a, **kw)
        self.report["timings"][label] = time.perf_counter() - t0
        return out

    def finish(self, output=None, metadata=None, circle_out=False):
        args = self.args
        if output is not None:
            if args.output:
                (write_circle if circle_out else write_grid)(args.output, output, metadata)
            if getattr(args, "csv", None):
                emit_plot_data(output, args.csv)
        if getattr(args, "report", None):
            write_json(args.report, self.report)
        return EXIT_OK


def _output_args(p, required=True):
    p.add_argument("-o", "--output", required=required, help="output file")
    p.add_argument("--csv", help="also write comma-separated plot data here")
    p.add_argument("--report", help="write a JSON report here")


def cmd_gen(args):
    run = _Run(args, "gen")
    spec = _spec_from_ranges(args.grid)
    g = run.timed("generate", generate, args.kind, args.params, spec, seed=args.seed)
    run.report["parameters"] = {"kind": args.kind, "params": args.params, "seed": args.seed}
    return run.finish(g, {"generator": args.kind, "params": ",".join(map(repr, args.params)),
                          "seed": str(args.seed)})


def cmd_envelope(args):
    run = _Run(args, f"envelope:{args.mode}")
    u = run.read("u", args.input)
    t = args.t
    run.report["parameters"] = {"t": t, "mode": args.mode, "brute_force": args.brute_force}
    if args.brute_force:
        if args.mode not in ("inf", "sup"):
            raise UsageError("--brute-force applies to --mode inf or sup")
        sign = 1.0 if args.mode == "inf" else -1.0
        src = u if sign > 0 else -u
        brute = run.timed("brute_force", envelope.inf_convolve_bruteforce, src, t, force=args.force)
        fast = run.timed("fast", envelope.inf_convolve, src, t)
        run.report["defects"] = {"max_abs_diff_fast_vs_brute":
                                 float(np.abs(brute.values - fast.values).max())}
        run.report["tolerances"]["oracle"] = fp_tolerance(u)
        out = brute if sign > 0 else -brute
    else:
        op = {"inf": envelope.inf_convolve, "sup": envelope.sup_convolve,
              "open": envelope.opening, "close": envelope.closing}[args.mode]
        out = run.timed(args.mode, op, u, t)
    return run.finish(out, {"operation": f"envelope:{args.mode}", "t": repr(t)})


def _regularity(run, w, t):
    if w.is_finite():
        rep = analysis.c11_report(w, t)
        run.report["regularity"] = rep.as_dict()
        run.report["tolerances"]["c11_slack"] = fp_tolerance(w)


def cmd_regularize(args):
    run = _Run(args, f"regularize:{args.op}")
    f = run.read("f", args.input)
    run.report["parameters"] = {"t": args.t, "s": args.s}
    if args.op == "bernard":
        w = run.timed("bernard_r", regularize.bernard_r, f, args.t)
        _regularity(run, w, args.t)
    else:
        if args.s is None:
            raise UsageError("lasry-lions needs --s")
        w = run.timed("lasry_lions", regularize.lasry_lions, f, args.s, args.t)
        run.report["regularity"] = analysis.c11_report(w, args.s).as_dict()
    return run.finish(w, {"operation": args.op, "t": repr(args.t)})


def cmd_pinch(args):
    run = _Run(args, "pinch")
    u = run.read("u", args.u)
    v = run.read("v", args.v)
    f = run.read("f", args.f) if args.f else None
    k = args.k
    if k != "auto":
        try:
            k = float(k)
        except ValueError:
            raise UsageError(f"--k must be 'auto' or a number, got {k!r}")
    res = run.timed("ilmanen_sandwich", regularize.ilmanen_sandwich, u, v, f, k)
    run.report["parameters"] = {"k": args.k, "t_used": res.t_used,
                                "k_upper": res.k_upper, "k_lower": res.k_lower}
    run.report["defects"] = {"sandwich_defect": res.sandwich_defect}
    run.report["tolerances"]["sandwich"] = fp_tolerance(u, v)
    _regularity(run, res.w, res.t_used)
    return run.finish(res.w, {"operation": "pinch", "t_used": repr(res.t_used)})


def cmd_analyze(args):
    run = _Run(args, "analyze")
    u = run.read("u", args.input)
    out = {
        "k_semiconcave": analysis.semiconcavity_constant(u),
        "k_semiconvex": analysis.semiconvexity_constant(u),
        "grad_lipschitz": analysis.gradient_lipschitz_estimate(u),
    }
    if args.t is not None:
        out["c11"] = analysis.c11_report(u, args.t).as_dict()
        if u.dim == 1:
            table = analysis.modulus_of_continuity(u)
            exact, closed = analysis.epsilon_bound(table, args.t)
            out["epsilon_exact"], out["epsilon_closed_form"] = exact, closed
    run.report["parameters"] = {"t": args.t}
    run.report["regularity"] = out
    run.report["tolerances"]["fp"] = fp_tolerance(u)
    print(json.dumps(_jsonable(out), indent=1))
    return run.finish()


def cmd_conjugate(args):
    run = _Run(args, "conjugate")
    u = run.read("u", args.input)
    if args.bidual:
        if args.t is None:
            raise UsageError("--bidual needs --t")
        w = run.timed("quadratic_bidual", envelope.quadratic_bidual, u, args.t)
        run.report["parameters"] = {"t": args.t}
        return run.finish(w, {"operation": "quadratic_bidual", "t": repr(args.t)})
    if args.slopes is None:
        raise UsageError("conjugate needs --slopes (a:h:b or a comma list) or --bidual")
    text = args.slopes
    if ":" in text:
        a, h, b = _range(text)
        slopes = GridSpec.from_bounds(a, b, h).axis(0)
    else:
        slopes = np.array(_floats(text))
    table = run.timed("legendre_conjugate", envelope.legendre_conjugate, u, slopes)
    if args.output:
        write_json(args.output, {"slopes": table.slopes, "values": table.values})
    return run.finish()


_SAMPLES = {"sin": np.sin, "cos": np.cos, "abs-sin": lambda th: np.abs(np.sin(th))}


def cmd_circle(args):
    run = _Run(args, "circle")
    atlas = run.timed("build_atlas", circle.build_atlas, args.n_charts, args.nodes_per_chart)
    if args.input:
        f = run.read("f", args.input, read_circle)
        if f.n != atlas.n:
            raise UsageError(f"circle file has {f.n} nodes; the atlas has {atlas.n}")
    else:
        f = circle.CircleFunction.sample(_SAMPLES[args.sample], atlas.n)
    u = run.read("u", args.u, read_circle) if args.u else circle.CircleFunction(f.values + args.band)
    v = run.read("v", args.v, read_circle) if args.v else circle.CircleFunction(f.values - args.band)
    eps = fp_tolerance(u.values, v.values)
    if (v.values - u.values).max() > eps or (f.values - u.values).max() > eps \
            or (v.values - f.values).max() > eps:
        raise regularize.DomainViolation("need u >= f >= v on the circle")
    atlas = run.timed("localization_constants", circle.localization_constants, atlas, u, v)
    g = run.timed("g_t_apply", circle.g_t_apply, atlas, f, args.t)
    run.report["parameters"] = {"t": args.t, "n_charts": args.n_charts,
                                "nodes_per_chart": args.nodes_per_chart, "a": list(atlas.a)}
    run.report["defects"] = {
        "max_abs_change": float(np.abs(g.values - f.values).max()),
        "sandwich_defect": max(0.0, float((g.values - u.values).max()),
                               float((v.values - g.values).max())),
    }
    return run.finish(g, {"operation": "circle", "t": repr(args.t)}, circle_out=True)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="c11reg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="sample a test function")
    p.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    p.add_argument("--params", type=_floats, required=True)
    p.add_argument("--grid", type=_range, action="append", required=True,
                   help="axis as a:h:b; repeat for 2D")
    p.add_argument("--seed", type=int)
    _output_args(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("envelope", help="inf/sup convolution, opening, closing")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--mode", choices=["inf", "sup", "open", "close"], default="inf")
    p.add_argument("--t", type=_positive, required=True)
    p.add_argument("--brute-force", action="store_true", help="use the quadratic-cost oracle")
    p.add_argument("--force", action="store_true", help="lift the oracle size guard")
    _output_args(p)
    p.set_defaults(func=cmd_envelope)

    p = sub.add_parser("regularize", help="symmetric or Lasry-Lions regularization")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--op", choices=["bernard", "lasry-lions"], default="bernard")
    p.add_argument("--t", type=_positive, required=True)
    p.add_argument("--s", type=_positive)
    _output_args(p)
    p.set_defaults(func=cmd_regularize)

    p = sub.add_parser("pinch", help="C^{1,1} function between u and v")
    p.add_argument("-u", required=True)
    p.add_argument("-v", required=True)
    p.add_argument("-f")
    p.add_argument("--k", default="auto")
    _output_args(p)
    p.set_defaults(func=cmd_pinch)

    p = sub.add_parser("analyze", help="regularity constants of a grid function")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--t", type=_positive)
    p.add_argument("--report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("conjugate", help="discrete Legendre conjugate or quadratic bidual")
    p.add_argument("-i", "--input", required=True)
    p.add_argument("--slopes")
    p.add_argument("--bidual", action="store_true")
    p.add_argument("--t", type=_positive)
    _output_args(p, required=False)
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("circle", help="partition-of-unity regularization on the circle")
    p.add_argument("--n-charts", type=int, default=3)
    p.add_argument("--nodes-per-chart", type=int, default=256)
    src = p.add_mutually_exclusive_group()
    src.add_argument("-i", "--input", help="circle file with the function f")
    src.add_argument("--sample", choices=sorted(_SAMPLES), default="sin")
    p.add_argument("--u", help="circle file with the upper bound (default f + band)")
    p.add_argument("--v", help="circle file with the lower bound (default f - band)")
    p.add_argument("--band", type=float, default=0.0)
    p.add_argument("--t", type=_positive, required=True)
    _output_args(p)
    p.set_defaults(func=cmd_circle)
    return parser


_VALUE_OPTIONS = ("--grid", "--params", "--slopes")


def _glue_values(argv):
    """Join ``--grid -1:0.1:1`` into ``--grid=-1:0.1:1`` so leading minus signs parse."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv=None) -> int:
    argv = _glue_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except GridFormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except ValueError as exc:
        print(f"domain violation: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
