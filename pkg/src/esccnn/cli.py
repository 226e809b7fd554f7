"""Command line entry point.

    esccnn generate --n 500 --seed 0 --out ar1.csv
    esccnn run --config ar1.cfg --set repeats=3 --set models=esc,es --out runs/ar1
    esccnn report runs/ar1

Exit status of ``run``: 0 when every cell succeeds, 2 when some cells failed,
1 when nothing succeeded or the run could not start.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dataset import DataError, generate_ar1
from .harness.config import ConfigError, load_config
from .harness.experiment import run_experiment
from .harness.reports import emit_reports, fmt, reemit_summary


def _parse_sets(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v
    return out


def cmd_generate(args) -> int:
    s = generate_ar1(args.n, args.alpha, args.noise, args.x0, args.seed)
    lines = ["t,value"] + [f"{i + 1},{fmt(v)}" for i, v in enumerate(s.values)]
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {len(s)} values to {args.out}")
    return 0


def cmd_run(args) -> int:
    overrides = _parse_sets(args.set)
    for key in ("repeats", "models", "H", "T", "seed"):
        val = getattr(args, key.lower(), None)
        if val is not None:
            overrides[key] = val
    if args.out is not None:
        overrides["output_dir"] = args.out
    cfg = load_config(args.config, overrides).validate()

    def progress(cell):
        best = f"best test rmse {fmt(cell.best('rmse'))}" if cell.trajectory else cell.error
        logging.info("%-4s repeat %d: %s units, %s (%.1fs)", cell.model, cell.repeat,
                     len(cell.trajectory), best, cell.seconds)

    report = run_experiment(cfg, progress)
    paths = emit_reports(report, cfg.output_dir)
    summary = report.summary()
    print(f"{'model':<6}{'MAPE':>12}{'SMAPE':>12}{'RMSE':>12}")
    for model, vals in summary.items():
        print(f"{model:<6}{vals['mape']:>12.4f}{vals['smape']:>12.4f}{vals['rmse']:>12.4f}")
    print(f"reports in {paths['summary.csv'].parent} ({report.wall_clock:.1f}s)")
    if not summary:
        print("no cell succeeded", file=sys.stderr)
        return 1
    if report.failed:
        for c in report.failed:
            print(f"failed: {c.model} repeat {c.repeat}: {c.error}", file=sys.stderr)
        return 2
    return 0


def cmd_report(args) -> int:
    path = reemit_summary(args.run_dir, args.out)
    print(path.read_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="esccnn", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic AR1 series to CSV")
    g.add_argument("--n", type=int, default=500)
    g.add_argument("--alpha", type=float, default=0.01)
    g.add_argument("--noise", type=float, default=0.25, help="uniform noise half-width")
    g.add_argument("--x0", type=float, default=0.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default="-", help="output path, '-' for stdout")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run an experiment from a config file")
    r.add_argument("--config", help="flat key = value config file")
    r.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config field")
    r.add_argument("--repeats")
    r.add_argument("--models")
    r.add_argument("--H", dest="h")
    r.add_argument("--T", dest="t")
    r.add_argument("--seed")
    r.add_argument("--out", help="output directory")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="rebuild summary.csv from a run directory")
    rep.add_argument("run_dir")
    rep.add_argument("--out", help="write summary here instead of the run directory")
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DataError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
