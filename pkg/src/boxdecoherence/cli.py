"""Command-line entry point: ``boxdecoherence run`` and ``boxdecoherence sweep``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import load_config, parse_overrides
from .errors import ConfigError
from .pipeline import run_pipeline, sweep


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--out", metavar="DIR", help="output directory (default: config output_dir)")
    p.add_argument("--no-decoherence", action="store_true", help="analyze the pure state only")
    p.add_argument("--reversal-check", action="store_true",
                   help="fail if the forward/backward evolution fidelity drops below 1 - 1e-9")
    p.add_argument("--dump-top-k", type=int, metavar="K", help="write the K leading eigenvectors")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxdecoherence",
        description="Gaussian packet in an infinite well, decohered; eigenstate localization analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="single pipeline run"))
    sp = sub.add_parser("sweep", help="one run per value of a config key")
    _common(sp)
    sp.add_argument("--axis", required=True, metavar="KEY")
    sp.add_argument("--values", required=True, metavar="V1,V2,...")
    sp.add_argument("--jobs", type=int, default=1, help="parallel sweep items")
    return parser


def _config_from_args(args):
    overrides = parse_overrides(args.overrides)
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.no_decoherence:
        overrides["no_decoherence"] = True
    if args.reversal_check:
        overrides["reversal_check"] = True
    if args.dump_top_k is not None:
        overrides["dump_top_k"] = args.dump_top_k
    return load_config(args.config, overrides)


def _parse_values(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values: expected comma-separated numbers, got {text!r}") from None


def _fail(exc: BaseException, code: int) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config_from_args(args)
        if args.command == "run":
            manifest = run_pipeline(cfg)
            print(json.dumps({"output_dir": manifest.output_dir, **manifest.derived}))
            return 0
        result = sweep(cfg, args.axis, _parse_values(args.values), jobs=args.jobs)
        for value, err in zip(result.values, result.errors):
            if err is not None:
                print(json.dumps({"error": "SweepItemFailed", "axis": args.axis, "value": value,
                                  "message": err}), file=sys.stderr)
        return 0 if result.ok else 1
    except ConfigError as exc:
        return _fail(exc, 2)
    except Exception as exc:  # noqa: BLE001 - one-line error contract
        return _fail(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
