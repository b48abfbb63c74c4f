"""Command-line front end.

Subcommands:
  run SCRIPT       execute a pipeline script (exit 0 ok, 1 script error, 2 I/O error)
  check SCRIPT     parse a script without executing it
  analyze          flag-driven batch pipeline over one export or workspace file
  serve            start the local analysis service (and host the UI if built)
"""

import argparse
import sys
from pathlib import Path

from . import dedupe, exports, spectra, workspace as store
from .errors import RpyscopeError
from .ingest import ImportConfig, YearWindow, import_file
from .scripting import ScriptSyntaxError, parse_script, run_script_file

EXIT_OK = 0
EXIT_SCRIPT_ERROR = 1
EXIT_IO_ERROR = 2

_KEEP_WORDS = {"keep-missing", "keep", "true"}
_DROP_WORDS = {"drop-missing", "drop", "false"}


def parse_window(text: str, default_keep: bool = False) -> YearWindow:
    """Parse the LO:HI[:keep-missing] flag syntax."""
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"window {text!r} is not LO:HI or LO:HI:keep-missing")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window bounds in {text!r} must be integers") from exc
    keep = default_keep
    if len(parts) == 3:
        word = parts[2].strip().lower()
        if word in _KEEP_WORDS:
            keep = True
        elif word in _DROP_WORDS:
            keep = False
        else:
            raise argparse.ArgumentTypeError(
                f"third window part must be keep-missing or drop-missing, got {parts[2]!r}"
            )
    try:
        return YearWindow(lo, hi, keep)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_count_range(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"range {text!r} is not LO:HI")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"range bounds in {text!r} must be integers") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpyscope",
        description="Reference publication year spectroscopy workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a pipeline script")
    p_run.add_argument("script", help="script file (UTF-8)")
    p_run.add_argument("--workdir", help="directory file arguments resolve against "
                       "(default: the script's directory)")

    p_check = sub.add_parser("check", help="parse a script and report errors without running it")
    p_check.add_argument("script")

    p_serve = sub.add_parser("serve", help="start the local analysis service")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--open", action="store_true", help="open a browser tab once started")
    p_serve.add_argument("--static", help="directory of built UI assets to host at /")
    p_serve.add_argument("--max-upload", type=int, default=None, help="upload cap in bytes")

    p_an = sub.add_parser("analyze", help="flag-driven batch analysis")
    src = p_an.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="tagged export file to import")
    src.add_argument("--load", help="previously saved workspace file")
    p_an.add_argument("--rpy", type=parse_window, default=None,
                      help="reference-year window LO:HI[:keep-missing]")
    p_an.add_argument("--py", type=parse_window, default=None,
                      help="record-year window LO:HI[:keep-missing]")
    p_an.add_argument("--max-cr", type=int, default=0, help="cap on CR lines per record (0 = unlimited)")
    p_an.add_argument("--marker", action="append", default=[],
                      help='marker spec "author=Liu,rpy=1960,volume=4,page=1" (repeatable)')
    p_an.add_argument("--marker-mode", choices=["any", "all"], default="any")
    p_an.add_argument("--cluster-threshold", type=float, default=None,
                      help="similarity threshold; presence enables cluster+merge")
    p_an.add_argument("--cluster-use", default="volume,page",
                      help="comma list from {volume,page,doi} enabled as merge constraints")
    p_an.add_argument("--remove-ncr", type=parse_count_range, default=None,
                      help="drop variants whose citation count lies in LO:HI")
    p_an.add_argument("--peaks-min-dev", type=float, default=1.0)
    p_an.add_argument("--top-share", type=float, default=None,
                      help="print peak-year references above this strict share threshold")
    p_an.add_argument("--export-cr", help="write the variant table CSV here")
    p_an.add_argument("--export-graph", help="write the per-year spectrum CSV here")
    p_an.add_argument("--export-peaks", help="write the detected-peaks CSV here")
    p_an.add_argument("--save", help="write the workspace file here")

    return parser


def _cmd_run(args) -> int:
    try:
        workdir = Path(args.workdir) if args.workdir else None
        report = run_script_file(args.script, workdir)
    except ScriptSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT_ERROR
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    sys.stdout.write(report.render())
    if report.error is not None:
        return EXIT_IO_ERROR if report.error.io_error else EXIT_SCRIPT_ERROR
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        source = Path(args.script).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    try:
        prog = parse_script(source)
    except ScriptSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT_ERROR
    print(f"ok: {len(prog.commands)} commands")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import DEFAULT_MAX_UPLOAD, create_app

    app = create_app(
        max_upload_bytes=args.max_upload or DEFAULT_MAX_UPLOAD,
        static_dir=args.static,
    )
    if args.open:
        import threading
        import webbrowser

        threading.Timer(0.5, webbrowser.open, (f"http://{args.host}:{args.port}/",)).start()
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _print_info(label: str, ws) -> None:
    i = store.info(ws)
    span = f"{i.rpy_span[0]}-{i.rpy_span[1]}" if i.rpy_span else "-"
    print(f"{label}: records={i.records} cr_mentions={i.cr_mentions} "
          f"variants={i.distinct_variants} rpy_span={span}")


def _cmd_analyze(args) -> int:
    if args.load:
        ws = store.load_workspace(args.load)
        _print_info("loaded", ws)
    else:
        cfg = ImportConfig(
            rpy_window=args.rpy or YearWindow(1000, 2999, keep_missing=True),
            py_window=args.py or YearWindow(1000, 2999, keep_missing=True),
            max_cr_per_record=args.max_cr,
        )
        records, report = import_file(args.input, cfg)
        ws = store.aggregate(records, cfg)
        _print_info("imported", ws)
        if report.malformed_lines:
            print(f"  note: {len(report.malformed_lines)} malformed lines skipped", file=sys.stderr)

    if args.marker:
        markers = [spectra.MarkerSpec.from_string(m) for m in args.marker]
        ws = spectra.cocitation_filter(ws, markers, args.marker_mode)
        _print_info("marker-filtered", ws)

    if args.cluster_threshold is not None:
        enabled = {part.strip() for part in args.cluster_use.split(",") if part.strip()}
        unknown = enabled - {"volume", "page", "doi"}
        if unknown:
            raise ValueError(f"--cluster-use: unknown constraints {sorted(unknown)}")
        params = dedupe.ClusterParams(
            threshold=args.cluster_threshold,
            use_volume="volume" in enabled,
            use_page="page" in enabled,
            use_doi="doi" in enabled,
        )
        ws, assignment = dedupe.cluster(ws, params)
        ws = dedupe.merge(ws, assignment)
        _print_info("clustered+merged", ws)

    if args.remove_ncr is not None:
        ws = store.remove_by_ncr(ws, *args.remove_ncr)
        _print_info("after remove-ncr", ws)

    window = ws.config.rpy_window
    if args.export_peaks or args.top_share is not None:
        points = spectra.spectrum(ws, window.lo, window.hi)
        years = spectra.detect_peaks(points, args.peaks_min_dev)
        print(f"peaks (min_dev={args.peaks_min_dev:g}): {', '.join(map(str, years)) or 'none'}")
        if args.export_peaks:
            exports.write_peaks(points, years, args.export_peaks)
        if args.top_share is not None:
            for year in years:
                rows = spectra.top_contributors(ws, year, args.top_share)
                for variant, share in rows:
                    print(f"  {year}  ncr={variant.ncr:<4d} share={share:.3f}  {variant.raw}")

    if args.export_cr:
        exports.write_cr_table(ws, args.export_cr)
    if args.export_graph:
        exports.write_graph(ws, args.export_graph)
    if args.save:
        store.save_workspace(ws, args.save)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "check": _cmd_check,
        "serve": _cmd_serve,
        "analyze": _cmd_analyze,
    }
    try:
        return handlers[args.command](args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO_ERROR
    except (RpyscopeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCRIPT_ERROR


if __name__ == "__main__":
    sys.exit(main())
