"""``ccrkit check <model.json>``: run a suite and write its report."""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .model import SUITES, ModelError, load_model
from .report import emit_report, run_suite
from .sampling import DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccrkit", description=__doc__)
    p.add_argument("--version", action="version", version=f"ccrkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("check", help="run a verification suite on a model file")
    c.add_argument("model", help="path to the model JSON file")
    c.add_argument("--suite", default="all", choices=[*SUITES, "all"])
    c.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"seed for randomized checks (default {DEFAULT_SEED})")
    c.add_argument("--cutoff", type=int, default=None,
                   help="override the truncation cutoff N")
    c.add_argument("--format", dest="fmt", default="json", choices=["json", "text"])
    c.add_argument("--out", default=None, help="write the report here instead of stdout")
    c.add_argument("--timings", action="store_true",
                   help="add runtime_ms to each record (breaks byte-identical reruns)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        model = load_model(args.model)
    except OSError as e:
        print(f"ccrkit: cannot read {args.model}: {e.strerror}", file=sys.stderr)
        return 2
    except ModelError as e:
        print(f"ccrkit: {e}", file=sys.stderr)
        return 2
    report = run_suite(model, args.suite, args.seed, args.cutoff, args.timings)
    text = emit_report(report, args.fmt)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            print(f"ccrkit: cannot write {args.out}: {e.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
