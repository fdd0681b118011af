"""Command-line interface.

    tasklens ingest  --events LOG [LOG ...]
    tasklens analyze --events LOG [LOG ...] [--config FILE] [--workers N]
    tasklens report  --events LOG [LOG ...] --format {json,csv,table} [--out DIR]

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import date
from pathlib import Path

from .config import BadConfig, load_config
from .events import build_timelines, deduplicate, read_events
from .report import REPORT_FORMATS, UnknownFormat, ZeroEvents, render_report, run_pipeline

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _parse_date(text: str) -> date:
    try:
        return date.fromisoformat(text[:10])
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a date: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tasklens", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--events", nargs="+", required=True, metavar="PATH",
                       help="JSONL event log(s)")
        p.add_argument("--config", metavar="PATH", help="YAML config file")
        p.add_argument("--window-start", type=_parse_date, metavar="DATE",
                       help="ignore events before this local date")
        p.add_argument("--window-end", type=_parse_date, metavar="DATE",
                       help="ignore events after this local date")
        p.add_argument("--workers", type=int, default=1, metavar="N",
                       help="parallel per-user analysis workers (default 1)")

    common(sub.add_parser("ingest", help="validate the log and show dedup stats"))
    common(sub.add_parser("analyze", help="run the full pipeline, print a text report"))
    report = sub.add_parser("report", help="run the pipeline and emit a report")
    common(report)
    report.add_argument("--format", choices=REPORT_FORMATS, default="json")
    report.add_argument("--out", metavar="DIR", help="directory to write report files into")
    return parser


def _cmd_ingest(args) -> int:
    config = load_config(args.config)
    missing = [p for p in args.events if not Path(p).exists()]
    if missing:
        print(f"error: no such file: {missing[0]}", file=sys.stderr)
        return DATA_ERROR
    ingest = read_events(args.events)
    deduped = deduplicate(ingest.events, config.dedup_window_seconds)
    timelines = build_timelines(deduped)
    print(f"files            {len(args.events)}")
    print(f"events           {len(ingest.events)}")
    print(f"malformed lines  {ingest.malformed_lines}")
    print(f"duplicates       {len(ingest.events) - len(deduped)}")
    print(f"users            {len(timelines)}")
    if not ingest.events:
        print("error: no parseable events", file=sys.stderr)
        return DATA_ERROR
    return 0


def _run(args):
    config = load_config(args.config)
    missing = [p for p in args.events if not Path(p).exists()]
    if missing:
        raise ZeroEvents(f"no such file: {missing[0]}")
    return run_pipeline(
        args.events,
        config,
        window_start=args.window_start,
        window_end=args.window_end,
        workers=max(1, args.workers),
    )


def _cmd_analyze(args) -> int:
    report = _run(args)
    sys.stdout.write(render_report(report, "table")["report.txt"].decode("utf-8"))
    return 0


def _cmd_report(args, parser) -> int:
    report = _run(args)
    files = render_report(report, args.format)
    if args.out is None:
        if args.format == "csv":
            parser.error("--format csv requires --out DIR")
        sys.stdout.write(next(iter(files.values())).decode("utf-8"))
        return 0
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, blob in files.items():
        (out_dir / name).write_bytes(blob)
        print(f"wrote {out_dir / name}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_report(args, parser)
    except (ZeroEvents, BadConfig, UnknownFormat, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
