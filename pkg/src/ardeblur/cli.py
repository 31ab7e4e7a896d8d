"""Command-line entry point: ``ardeblur {blur,restore,sweep,table}``.

Settings come from an optional ``key = value`` config file (``--config``)
and are overridden by repeated ``--set KEY=VALUE`` flags.  Run
``ardeblur show-config`` to print every key with its default.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .blur import BlurOperator, BoundaryCondition
from .experiment import (
    ExperimentConfig,
    SummaryWriter,
    _atomic_write,
    _write_data,
    _write_rows,
    alpha_sweep,
    format_table,
    parse_config_text,
    run_experiment,
    synthesize,
    write_metadata,
)
from .image import load_image, write_pgm
from .precond import PreconditionerSpec, build_tikhonov
from .psf import load_psf
from .solvers import (
    DivergenceError,
    FixedIterations,
    MinRre,
    SolverConfig,
    d_landweber,
    landweber,
    write_history_csv,
)


def _config(args) -> ExperimentConfig:
    pairs = parse_config_text(Path(args.config).read_text()) if args.config else {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise SystemExit(f"--set expects KEY=VALUE, got {item!r}")
        pairs[key] = value
    return ExperimentConfig.from_pairs(pairs)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.epilog = CONFIG_HELP
    p.formatter_class = argparse.RawDescriptionHelpFormatter
    p.add_argument("--config", metavar="FILE", help="key = value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (repeatable), e.g. --set bcs=reflective")
    p.add_argument("--out", metavar="DIR", default="results", help="output directory (default: results)")


def cmd_blur(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    psf = cfg.make_psf()
    write_metadata(out, cfg, psf)
    if cfg.generation == "honest":
        g, f = synthesize(cfg, psf=psf)
        _write_data(out, g, f)
    else:
        for bc in cfg.bcs:
            g, f = synthesize(cfg, bc, psf)
            _write_data(out, g, f, suffix=f"_{bc}")
    print(f"wrote blurred data to {out}")
    return 0


def cmd_restore(args) -> int:
    g = load_image(args.blurred)
    psf = load_psf(args.psf)
    truth = load_image(args.true) if args.true else None
    bc = BoundaryCondition.parse(args.bc)
    op = BlurOperator(psf, bc, g.shape)
    if truth is not None and not args.fixed:
        stop = MinRre()
    else:
        stop = FixedIterations(args.iters)
    cfg = SolverConfig(args.iters, args.tau, stop, truth)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        if args.method == "landweber":
            run = landweber(op, g, cfg)
        else:
            d = build_tikhonov(psf, PreconditionerSpec.for_bc(bc, args.alpha), g.shape)
            run = d_landweber(op, d, g, cfg)
    except DivergenceError as exc:
        write_history_csv(out / "history.csv", exc.run)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    write_pgm(out / "restored.pgm", run.restored)
    write_history_csv(out / "history.csv", run)
    msg = f"{bc.value} {args.method}: {run.iterations_executed} iterations"
    if run.rre_history:
        msg += f", best RRE {run.best_rre:.6g} at iteration {run.best_iteration}"
    print(msg)
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    psf = cfg.make_psf()
    write_metadata(out, cfg, psf)
    summary = SummaryWriter(out / "summary.csv", cfg.record_timing)
    rows = []
    for bc in cfg.bcs:
        g, f = synthesize(cfg, bc, psf)
        best, cells = alpha_sweep(cfg, psf, bc, g, f)
        rows.extend(c.row(cfg.record_timing) for c in cells)
        summary.add(best)
        print(f"{bc}: best alpha {best.alpha:.4g}, RRE {best.run.best_rre:.6g} at iteration {best.run.best_iteration}")
    _atomic_write(out / "sweep.csv", lambda p: _write_rows(p, rows))
    return 0


def cmd_table(args) -> int:
    cfg = _config(args)
    rows = run_experiment(cfg, args.out)
    print(format_table(rows), end="")
    return 0


def cmd_show_config(args) -> int:
    print(_config(args).to_text(), end="")
    return 0


CONFIG_HELP = """\
config keys (file lines 'key = value', or --set key=value):
  image          'synthetic' or a PGM / text-matrix path (default synthetic)
  size           field of view of the synthetic scene, e.g. 128x128
  psf            'gaussian' or a PSF file (text with 'q1 q2' header, or PGM)
  psf_sigma      Gaussian sigma, one value or 'sy,sx' (default 1.5)
  psf_q          mask half-widths, one value or 'q1,q2' (default 4)
  psf_offset     Gaussian center shift in pixels 'dy,dx' (default 0.3,0.18)
  bcs            comma list of zero, periodic, reflective, antireflective
  methods        comma list of landweber, d-landweber
  noise_level    relative Gaussian noise level (default 0.001)
  seed           noise seed (default 1)
  generation     honest (blur a larger scene, crop) or inverse_crime
  tau            step length (default 1)
  max_iters      Landweber iteration cap (default 8000)
  d_max_iters    D-Landweber iteration cap (default 1000)
  stop           min_rre, fixed:K or residual:EPS (default min_rre)
  alpha          Tikhonov alpha when no sweep is given (default 0.01)
  alpha_sweep    'min,max,count' log-spaced alphas, or none (default 1e-3,1,7)
  record_timing  false leaves the seconds column empty for byte-stable CSVs
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ardeblur",
        description="Deblurring experiments with Zero, Periodic, Reflective and "
                    "Anti-Reflective boundary conditions.",
        epilog=CONFIG_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("blur", help="synthesize blurred, noisy data from a config")
    _add_common(p)
    p.set_defaults(func=cmd_blur)

    p = sub.add_parser("restore", help="restore one blurred image")
    p.add_argument("--blurred", required=True, help="blurred image (PGM or text matrix)")
    p.add_argument("--psf", required=True, help="PSF file (text with 'q1 q2' header, or PGM)")
    p.add_argument("--bc", required=True, help="zero, periodic, reflective or antireflective")
    p.add_argument("--method", choices=["landweber", "d-landweber"], default="landweber")
    p.add_argument("--alpha", type=float, default=0.01, help="Tikhonov alpha for d-landweber (default 0.01)")
    p.add_argument("--iters", type=int, default=1000, help="maximum iterations (default 1000)")
    p.add_argument("--tau", type=float, default=1.0, help="step length (default 1)")
    p.add_argument("--true", help="true image; enables RRE tracking and min-RRE stopping")
    p.add_argument("--fixed", action="store_true", help="run exactly --iters iterations even with --true")
    p.add_argument("--out", default="restored", help="output directory (default: restored)")
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("sweep", help="D-Landweber alpha sweep for each configured BC")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("table", help="full comparison table: every BC and method")
    _add_common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("show-config", help="print the effective configuration")
    _add_common(p)
    p.set_defaults(func=cmd_show_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
