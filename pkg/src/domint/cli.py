"""Command line entry point.

    domint dominant-cdf [CONFIG] [--seed N] [--trials N] [--out FILE] [--dump FILE] [--plot FILE]
    domint outage       [CONFIG] ...
    domint qos          [CONFIG] [--out FILE] [--plot FILE]
    domint verify       [CONFIG] [--seed N] [--trials N] [--out FILE]

Exit status: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager
from pathlib import Path

from . import experiments, verify
from .experiments import ConfigError

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    return "nan" if math.isnan(v) else f"{v:.12g}"


@contextmanager
def _sink(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_table(fh, header, rows) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])


def _decision_path(out: str | None) -> str | None:
    if out in (None, "-"):
        return None
    p = Path(out)
    return str(p.with_name(f"{p.stem}_decisions{p.suffix or '.csv'}"))


def _run_figure(command: str, cfg, args) -> int:
    build = {
        "dominant-cdf": experiments.dominant_cdf_table,
        "outage": experiments.outage_table,
        "qos": experiments.qos_table,
    }[command]
    table = build(cfg)
    with _sink(args.out) as fh:
        write_table(fh, table.header, table.rows)
        if table.extra and _decision_path(args.out) is None:
            for block in table.extra:
                fh.write("\n")
                write_table(fh, block.header, block.rows)
    if table.extra and _decision_path(args.out) is not None:
        with open(_decision_path(args.out), "w", newline="") as fh:
            for block in table.extra:
                write_table(fh, block.header, block.rows)
    if args.dump:
        from .simulator import dump_samples

        dump_samples(table.samples, args.dump)
    if args.plot:
        from .plotting import save_figure

        save_figure(command, table, args.plot)
    return EXIT_OK


def _run_verify(cfg, args) -> int:
    trials = args.trials
    settings = verify.VerifySettings.from_mapping(
        cfg.verify,
        seed=args.seed,
        workers=cfg.sim.workers,
        cdf_trials=trials,
        moment_trials=trials,
        outage_trials=trials,
    )
    criteria = experiments.parse_criteria(cfg.verify.get("criteria", "1-9"))
    results = verify.run(settings, criteria)
    with _sink(args.out) as fh:
        write_table(fh, verify.CHECK_HEADER, verify.check_rows(results))
    for line in verify.summary_lines(results):
        print(line, file=sys.stderr)
    ok = all(verify.passed(c) for c in results.values())
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="domint",
        description="Dominant interference in sectored Poisson networks: figure tables and verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("dominant-cdf", "CDF of the n-th strongest interference power"),
        ("outage", "outage probability against the reception angle"),
        ("qos", "total error against the queue bound, with rate decisions"),
        ("verify", "run the acceptance checks"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", help="INI configuration file (defaults when omitted)")
        p.add_argument("--seed", type=int, help="master seed of the simulations")
        p.add_argument("--trials", type=int, help="Monte Carlo trials per simulation")
        p.add_argument("--out", help="CSV output path (stdout by default)")
        if name != "verify":
            p.add_argument("--dump", help="write per-trial simulation records to this CSV")
            p.add_argument("--plot", help="also render the figure to this PNG file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.trials is not None and args.trials < 1:
            raise ConfigError("--trials must be >= 1")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be a 64-bit unsigned integer")
        cfg = experiments.load_config(args.config).with_overrides(seed=args.seed, trials=args.trials)
        if args.command == "verify":
            verify.VerifySettings.from_mapping(cfg.verify)
            experiments.parse_criteria(cfg.verify.get("criteria", "1-9"))
        elif args.command == "qos" and args.dump:
            raise ConfigError("qos runs no simulation; --dump is not available")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "verify":
        return _run_verify(cfg, args)
    return _run_figure(args.command, cfg, args)


if __name__ == "__main__":
    sys.exit(main())
