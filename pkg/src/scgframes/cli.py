"""Command line front end: ``scgframes run`` and ``scgframes generate``.

Exit codes: 0 when every check passes, 1 when a verification fails,
2 on configuration or I/O errors.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError
from .experiments import KINDS, atomic_write, generate, load_config, output_paths, run_config

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("scgframes")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scgframes", description="Verify g-frame identities, bounds and perturbation results.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true", help="suppress the summary on stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("config", help="path to the experiment JSON")
    run.add_argument("--tol", type=float, default=None, help="override the config tolerance")
    run.add_argument("--jobs", type=int, default=1, help="max parallel trials (default: %(default)s)")
    run.add_argument("--report", default=None, help="report path (default: next to the config)")
    run.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    gen = sub.add_parser("generate", help="write a reproducible config and fixture files")
    gen.add_argument("kind", help="one of: " + ", ".join(KINDS))
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dim", type=int, default=4)
    gen.add_argument("--out", default=".", help="output directory (default: %(default)s)")
    gen.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    return parser


def _run(args) -> int:
    config_path = Path(args.config)
    config, raw = load_config(config_path)
    if args.tol is not None and not args.tol > 0:
        raise ConfigError("--tol must be positive")
    report = run_config(config, raw, config_path.parent, tol=args.tol, jobs=max(1, args.jobs))
    report_path, summary_path = output_paths(config, config_path)
    if args.report:
        report_path = Path(args.report)
    summary = report.summary()
    try:
        atomic_write(report_path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        atomic_write(summary_path, summary)
    except OSError as exc:
        raise ConfigError(f"cannot write report: {exc}") from exc
    if not args.quiet:
        sys.stdout.write(summary)
    return EXIT_OK if report.passed else EXIT_FAIL


def _generate(args) -> int:
    if not 0 <= args.seed < 2**64:
        raise ConfigError("--seed must be a 64-bit unsigned integer")
    path = generate(args.kind, args.seed, args.dim, args.out)
    if not args.quiet:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "run":
            return _run(args)
        return _generate(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
