import argparse
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from app.controllers import (
    algebra_controller,
    bibundle_controller,
    bimodule_controller,
    bornology_controller,
    catalog_controller,
    mollifier_controller,
    torus_controller,
    validate_controller,
)
from app.core.config import settings
from app.core.exceptions import CommandError
from app.core.logger import configure_logging
from app.schemas.report import to_jsonable

CONTROLLERS = (
    validate_controller,
    algebra_controller,
    bibundle_controller,
    bimodule_controller,
    bornology_controller,
    mollifier_controller,
    torus_controller,
    catalog_controller,
)


def build_parser() -> argparse.ArgumentParser:
    """Command parser with every controller included."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for randomized suites (catalog default: GRPD_CONV_SEED or 0)")
    common.add_argument("--out", help="also write the report to this file")
    common.add_argument("--timings", action="store_true", help="add wall-clock timings (reports are no longer byte-identical)")
    common.add_argument("--log-level", help="logging level name (default: GRPD_CONV_LOG_LEVEL or WARNING)")

    parser = argparse.ArgumentParser(
        prog="grpd-conv",
        description="Exact finite models of groupoid convolution algebras and Morita bimodules, with numerical labs.",
    )
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for controller in CONTROLLERS:
        controller.register(subparsers, [common])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; 0 iff every certificate passed, 1 on failure, 2 on usage or schema errors."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    configure_logging(args.log_level)
    args.argv = argv
    start = time.perf_counter()
    try:
        report = args.handler(args)
    except CommandError as exc:
        print(json.dumps(to_jsonable(exc.detail), sort_keys=True), file=sys.stderr)
        return exc.exit_code
    if args.timings and report.timings is None:
        report.timings = {"total": round(time.perf_counter() - start, 3)}
    text = report.render()
    sys.stdout.write(text)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    return 0 if report.passed else 1


def cli() -> None:
    sys.exit(main())


if __name__ == "__main__":
    cli()
