"""Command-line interface.

Exit codes: 0 success, 1 usage or configuration error, 2 invalid log,
3 pipeline stage error (``encode`` only).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .demo import read_demonstration
from .detector import DetectorParams
from .encoder import default_knowledge_base, load_knowledge_base
from .evaluation import DEFAULT_BIN_WIDTH, DEFAULT_MAX_GAP, evaluate, write_errors_csv
from .exceptions import ConfigError, SchemaError, ValidationError
from .language import default_lexicons, load_lexicons
from .pipeline import run_pipeline
from .synth import SynthConfig, generate_log, load_synth_config

log = logging.getLogger("verbal_foa")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_STAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_pipeline_options(p):
    p.add_argument("--lexicons", type=Path, help="lexicon config (JSON)")
    p.add_argument("--kb", type=Path, help="task knowledge base (JSON)")
    p.add_argument("--voxel-size", type=float, help="override the log's cell size")
    p.add_argument("--distance-threshold", type=float, help="hand-object gate (required for 2-D logs)")
    p.add_argument("--existence-criterion", type=float, default=0.5)
    p.add_argument("--smoothing-fraction", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="verbal-foa", description="Verbal focus-of-attention pipeline")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="compute FoA filters and events for one log")
    run.add_argument("log", type=Path)
    _add_pipeline_options(run)
    run.add_argument("--out", type=Path, help="report path (default: stdout)")

    enc = sub.add_parser("encode", help="like run, but a task model is required")
    enc.add_argument("log", type=Path)
    _add_pipeline_options(enc)
    enc.add_argument("--out", type=Path)

    syn = sub.add_parser("synth", help="generate synthetic demonstration logs")
    syn.add_argument("--config", type=Path, help="synth config (JSON); defaults built in")
    syn.add_argument("--seed", type=int, default=0)
    syn.add_argument("--count", type=int, default=1)
    syn.add_argument("--out-dir", type=Path, default=Path("."))

    ev = sub.add_parser("eval", help="timing-error evaluation over a directory of logs")
    ev.add_argument("--logs", type=Path, required=True)
    _add_pipeline_options(ev)
    ev.add_argument("--max-gap", type=float, default=DEFAULT_MAX_GAP)
    ev.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    ev.add_argument("--paper-exclusion", action="store_true",
                    help="drop demos with a missed event from the statistics")
    ev.add_argument("--out", type=Path, help="summary JSON (default: stdout)")
    ev.add_argument("--csv", type=Path, help="per-event errors CSV")
    return parser


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _pipeline_config(args):
    lexicons = load_lexicons(_read(args.lexicons)) if args.lexicons else default_lexicons()
    kb = load_knowledge_base(_read(args.kb)) if args.kb else default_knowledge_base()
    params = DetectorParams(args.distance_threshold, args.existence_criterion, args.smoothing_fraction)
    if args.voxel_size is not None and not args.voxel_size > 0:
        raise ConfigError("--voxel-size must be positive")
    return lexicons, kb, params, args.voxel_size


def _load_log(path: Path):
    if not path.is_file():
        raise UsageError(f"no such log: {path}")
    return read_demonstration(path)


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def cmd_run(args, require_model=False) -> int:
    lexicons, kb, params, cell = _pipeline_config(args)
    demo = _load_log(args.log)
    report = run_pipeline(demo, lexicons, kb, params, cell)
    _emit(report.to_json(), args.out)
    if report.stage_error is not None:
        log.warning("%s stage failed: %s: %s", report.stage_error.stage,
                    report.stage_error.error, report.stage_error.message)
        if require_model:
            return EXIT_STAGE
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = load_synth_config(_read(args.config)) if args.config else SynthConfig()
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        path = args.out_dir / f"demo_{seed:06d}.json"
        path.write_text(generate_log(cfg, seed))
        print(path)
    return EXIT_OK


def cmd_eval(args) -> int:
    lexicons, kb, params, cell = _pipeline_config(args)
    if not args.logs.is_dir():
        raise UsageError(f"not a directory: {args.logs}")
    paths = sorted(args.logs.glob("*.json"))
    if not paths:
        raise UsageError(f"no *.json logs in {args.logs}")
    demos = []
    for path in paths:
        try:
            demos.append((path.stem, read_demonstration(path)))
        except (SchemaError, ValidationError) as exc:
            raise type(exc)(f"{path}: {exc}") from None
    summary, rows = evaluate(demos, lexicons=lexicons, kb=kb, params=params, cell_size=cell,
                             max_gap=args.max_gap, bin_width=args.bin_width,
                             paper_exclusion=args.paper_exclusion)
    doc = {
        "config": {
            "max_gap": args.max_gap, "bin_width": args.bin_width,
            "paper_exclusion": args.paper_exclusion, "voxel_size": cell, **params.to_dict(),
        },
        **summary.to_dict(),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    if args.csv is not None:
        with open(args.csv, "w", newline="") as fh:
            write_errors_csv(fh, rows)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "encode":
            return cmd_run(args, require_model=True)
        if args.command == "synth":
            return cmd_synth(args)
        return cmd_eval(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SchemaError, ValidationError) as exc:
        print(f"invalid log: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
