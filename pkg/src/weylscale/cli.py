"""Command-line batch runner.

Subcommands map one-to-one onto the experiment suites; each run reads one
config file, executes the suite, and writes one self-contained report to the
output path (standard output by default).  Exit codes: 0 when every cell
meets its contract, 2 on configuration errors, 3 when cells fail (the
failing cells are listed on standard error).
"""

from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig
from .errors import ConfigInvalid
from .report import failing_cells, record_passes, render
from .runner import SUITES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weylscale",
        description="Batch experiments on Weyl-algebra states under Planck-constant rescaling.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "positivity-scan": "Gram-kernel positivity and the two-point criterion over an h grid",
        "kms-verify": "KMS boundary residuals for unrescaled, rescaled and restricted dynamics",
        "gns-check": "truncated Fock-space simulator against Gaussian closed forms",
        "rescale-fock": "rescaled Fock family: occupation numbers, quasi-equivalence, mixtures",
        "restrict-scan": "spectral restriction beyond the admissible scale bound",
    }
    for name, help_text in descriptions.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", required=True, help="path to the YAML experiment config")
        sub.add_argument("--out", default=None, help="report path (default: standard output)")
        sub.add_argument(
            "--format", choices=("object", "table"), default=None, help="report format override"
        )
        sub.add_argument("--seed", type=int, default=None, help="random seed override")
        sub.add_argument(
            "--tol", type=float, default=None, help="override for the suite's primary tolerance"
        )
    return parser


_PRIMARY_TOLERANCE = {
    "positivity-scan": "gram",
    "kms-verify": "residual",
    "gns-check": "gns",
    "rescale-fock": "pointwise",
    "restrict-scan": "residual",
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_file(args.config)
        if args.seed is not None:
            config.seed = args.seed
        if args.tol is not None:
            config.tolerances[_PRIMARY_TOLERANCE[args.command]] = args.tol
        if args.format is not None:
            config.output_format = args.format
        record = SUITES[args.command](config)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    text = render(record, config.output_format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    if record.timing_seconds is not None:
        print(f"{args.command}: {record.timing_seconds:.3f}s", file=sys.stderr)
    if not record_passes(record):
        for cell in failing_cells(record):
            print(f"contract violation: {cell}", file=sys.stderr)
        for key, value in record.summary.items():
            if key.endswith("_ok") and not value:
                print(f"contract violation: summary.{key}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
