"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 degenerate sample set,
4 resource limit, 5 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .diagram_metrics import bottleneck
from .errors import CDPersistenceError, ConfigError, ParseError
from .persistence import PersistenceDiagram
from .pipeline import KINDS, RunConfig, cmd_compare, cmd_compute, cmd_resolution_sweep, cmd_snr_table, write_diagram
from .plot import diagram_svg
from .pointcloud import ShapeSpec, load_measure
from .presets import PRESETS, preset
from .transport import wasserstein

log = logging.getLogger("cdpersistence")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise ParseError(f"cannot write {path}: {exc}") from exc


def _shape_arg(value: str) -> dict:
    """A preset name, an inline JSON object or a path to a JSON file."""
    if value in PRESETS:
        return preset(value).to_dict()
    text = value if value.lstrip().startswith("{") else _read(value)
    try:
        return ShapeSpec.from_dict(json.loads(text)).to_dict()
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad shape description: {exc}") from exc


def _run_config(args) -> RunConfig:
    cfg = RunConfig.from_json(_read(args.config)) if args.config else RunConfig()
    changes = {}
    if args.input:
        changes["input"] = args.input
    if args.shape:
        changes["input"] = _shape_arg(args.shape)
    for name in ("degree", "resolution", "eps", "kind", "max_degree", "basis", "out"):
        value = getattr(args, name, None)
        if value is not None:
            changes[name] = value
    if args.seed is not None:
        changes["rng_seed"] = args.seed
    cfg = replace(cfg, **changes)
    if not cfg.input:
        raise ConfigError("no input: give --input, --shape or a config with an input field")
    return cfg


def _add_run_flags(p: argparse.ArgumentParser, kind: bool = True) -> None:
    p.add_argument("--config", help="RunConfig JSON file; flags below override its fields")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="cloud file (.csv or .json)")
    src.add_argument("--shape", help=f"preset ({', '.join(sorted(PRESETS))}), inline JSON or JSON file")
    p.add_argument("--degree", type=int, help="polynomial degree d")
    p.add_argument("--resolution", type=int, help="grid resolution m (default 250, or 50 for 3D clouds)")
    p.add_argument("--eps", type=float, help="moment-matrix regularization")
    if kind:
        p.add_argument("--kind", choices=KINDS)
    p.add_argument("--max-degree", type=int, dest="max_degree", help="highest homology degree")
    p.add_argument("--basis", choices=("chebyshev-tensor", "monomial"))
    p.add_argument("--seed", type=int, help="RNG seed for shape sampling")
    p.add_argument("--out", help="diagram output (.json or .csv)")
    p.add_argument("--report", help="write the full report JSON here")


def _emit_report(report, args) -> None:
    if args.report:
        _write(args.report, report.to_json())
    t = report.timings
    log.info("timings: %s", ", ".join(f"{k}={v:.3f}s" for k, v in t.items()))


def do_compute(args) -> None:
    cfg = _run_config(args)
    report = cmd_compute(cfg)
    dgm = report.diagrams["diagram"]
    if args.svg:
        _write(args.svg, diagram_svg(dgm, f"{cfg.kind}, d={cfg.degree}, m={dgm.meta['resolution']}"))
    if not cfg.out:
        sys.stdout.write(dgm.to_json() + "\n")
    _emit_report(report, args)


def do_compare(args) -> None:
    base = _run_config(args)
    a = replace(base, kind="christoffel", out=None)
    b = replace(base, kind="distance-function", out=None)
    report = cmd_compare(a, b)
    if base.out:
        stem = Path(base.out)
        write_diagram(report.diagrams["a"], str(stem.with_name(stem.stem + "-christoffel" + stem.suffix)))
        write_diagram(report.diagrams["b"], str(stem.with_name(stem.stem + "-distance" + stem.suffix)))
    for p, value in report.statistics["bottleneck(a,b)"].items():
        print(f"H{p} bottleneck(christoffel, distance) = {value:.6g}")
    _emit_report(report, args)


def do_snr_table(args) -> None:
    if args.full:
        degrees, levels, trials = (6, 8, 10), (0, 25, 50, 100, 250, 500, 1000), 100
    else:
        degrees, levels, trials = tuple(args.degrees), tuple(args.noise), args.trials
    shape = ShapeSpec.from_dict(_shape_arg(args.shape)) if args.shape else preset("cube-skeleton")

    def progress(method, M, t, ratio):
        log.info("%s M=%d trial %d: %.3g", method, M, t, ratio)

    table = cmd_snr_table(shape, degrees, levels, trials, resolution=args.resolution,
                          true_count=args.true_count, seed=args.seed, progress=progress)
    text = table.to_csv()
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)


def do_sweep(args) -> None:
    cfg = _run_config(args)
    ms = list(range(args.start, args.stop + 1, args.step)) if args.resolutions is None else args.resolutions
    report = cmd_resolution_sweep(cfg, ms, lipschitz=args.lipschitz)
    for entry in report.statistics["deltas"]:
        deltas = "  ".join(f"H{p}={v:.6g}" for p, v in entry["bottleneck"].items())
        bound = f"  bound={entry['bound']:.6g}" if "bound" in entry else ""
        print(f"m {entry['from']:>4} -> {entry['to']:>4}: {deltas}{bound}")
    _emit_report(report, args)


def do_plot(args) -> None:
    text = _read(args.diagram)
    dgm = PersistenceDiagram.from_csv(text) if args.diagram.endswith(".csv") else PersistenceDiagram.from_json(text)
    _write(args.output, diagram_svg(dgm, args.title))


def do_wasserstein(args) -> None:
    a = load_measure(args.a)
    b = load_measure(args.b)
    dist, plan = wasserstein(a, b, max_support_size=args.max_support)
    print(f"{dist:.12g}")
    if args.plan:
        rows = [[i, j, m] for (i, j), m in sorted(plan.entries.items())]
        _write(args.plan, json.dumps({"cost": dist, "entries": rows}))


def do_bottleneck(args) -> None:
    d1 = PersistenceDiagram.from_json(_read(args.a))
    d2 = PersistenceDiagram.from_json(_read(args.b))
    degrees = [args.degree] if args.degree is not None else sorted(set(d1.degrees) | set(d2.degrees))
    for p in degrees:
        value, matching = bottleneck(d1, d2, p)
        print(f"H{p} {value:.12g}")
        if args.matching:
            _write(f"{args.matching}.H{p}.json", matching.to_json())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress and stage timings")
    parser = argparse.ArgumentParser(prog="cdpersistence", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="diagram of one cloud")
    _add_run_flags(p)
    p.add_argument("--svg", help="also render the diagram to this SVG file")
    p.set_defaults(func=do_compute)

    p = sub.add_parser("compare", parents=[common], help="Christoffel vs distance-function diagrams on the same grid")
    _add_run_flags(p, kind=False)
    p.set_defaults(func=do_compare)

    p = sub.add_parser("snr-table", parents=[common], help="median H1 signal-to-noise ratios under uniform noise")
    p.add_argument("--shape", help="shape (default: cube-skeleton preset)")
    p.add_argument("--degrees", type=int, nargs="+", default=[6])
    p.add_argument("--noise", type=int, nargs="+", default=[25, 250], help="uniform-noise counts M")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--resolution", type=int, default=50)
    p.add_argument("--true-count", type=int, default=5, dest="true_count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--full", action="store_true", help="all degrees and noise levels, 100 trials (hours)")
    p.add_argument("--out", help="CSV output")
    p.set_defaults(func=do_snr_table)

    p = sub.add_parser("sweep", parents=[common], help="bottleneck deltas between consecutive resolutions")
    _add_run_flags(p)
    p.add_argument("--resolutions", type=int, nargs="+")
    p.add_argument("--start", type=int, default=50)
    p.add_argument("--stop", type=int, default=250)
    p.add_argument("--step", type=int, default=50)
    p.add_argument("--lipschitz", type=float, help="Lipschitz constant estimate for the PL error bound")
    p.set_defaults(func=do_sweep)

    p = sub.add_parser("plot", parents=[common], help="render a diagram file to SVG")
    p.add_argument("diagram")
    p.add_argument("output")
    p.add_argument("--title")
    p.set_defaults(func=do_plot)

    p = sub.add_parser("wasserstein", parents=[common], help="exact W1 distance between two clouds")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--max-support", type=int, dest="max_support")
    p.add_argument("--plan", help="write the transport plan JSON here")
    p.set_defaults(func=do_wasserstein)

    p = sub.add_parser("bottleneck", parents=[common], help="bottleneck distance between two diagram JSON files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--degree", type=int)
    p.add_argument("--matching", help="prefix for matching JSON files")
    p.set_defaults(func=do_bottleneck)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except CDPersistenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ParseError.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
