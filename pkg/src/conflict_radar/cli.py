"""Command line interface.

Exit codes: `conflicts` reports severity through its exit status
(0 clear, 1 awareness only, 2 conflicts); `parse` and `diff` exit 1 on
unparseable input; `demo` exits 2 naming the first failed step.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
import time
from pathlib import Path

from .detect import DetectOptions, detect
from .distill import extract_changes, rename_aliases
from .model import ChangeSet, Severity, canonical_json, render_path_id
from .syntax.lexer import LexError
from .syntax.parser import ParseError, parse_unit
from .sync import DEFAULT_PORT, ClientCore, DashboardBridge, RelayClient, RelayServer
from .workspace import (
    WorkspaceAgent,
    load_config,
    measure_detect,
    run_demo,
    scaling_rows,
    write_scaling,
    write_timeline,
)


def _stamp() -> str:
    return time.strftime("%H:%M:%S")


def _read_source(path_arg: str) -> str:
    return Path(path_arg).read_text(encoding="utf-8")


# -- parse -------------------------------------------------------------


def cmd_parse(args) -> int:
    label = args.path or Path(args.file).name
    try:
        tree = parse_unit(_read_source(args.file), label)
    except (LexError, ParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    if args.emit_tree:
        print(canonical_json(tree.to_json()))
        return 0
    classes = list(tree.walk_classes())
    fields = sum(len(decl.fields) for _, decl in classes)
    methods = sum(len(decl.methods) for _, decl in classes)
    print(f"{label}: {len(classes)} classes, {fields} fields, {methods} methods")
    return 0


# -- diff --------------------------------------------------------------


def cmd_diff(args) -> int:
    label = args.path or Path(args.new).name
    try:
        old_tree = parse_unit(_read_source(args.old), label)
        new_tree = parse_unit(_read_source(args.new), label)
    except (LexError, ParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 1
    delta = extract_changes(
        old_tree, new_tree, args.author, args.revision,
        project=args.project, at_millis=int(time.time() * 1000),
    )
    if args.json:
        print(canonical_json(delta.to_json()))
        return 0
    for change in delta.changes:
        print("\t".join([
            str(change.seq),
            change.kind.value,
            render_path_id(change.path),
            f"{change.old_value or ''} -> {change.new_value or ''}".strip(" ->") or "-",
        ]))
    return 0


# -- conflicts ---------------------------------------------------------


def _load_change_set(path_arg: str) -> ChangeSet:
    return ChangeSet.from_json(json.loads(_read_source(path_arg)))


def cmd_conflicts(args) -> int:
    local = _load_change_set(args.local)
    remotes = [_load_change_set(p) for p in args.remote]
    aliases = [a for s in (local, *remotes) for a in rename_aliases(s)]
    reports = detect(
        local, remotes, aliases=aliases,
        options=DetectOptions(suppress_identical=args.suppress_identical),
    )
    if args.json:
        print(canonical_json([r.to_json() for r in reports]))
    else:
        for r in reports:
            print("\t".join([
                r.severity.value,
                r.path_id,
                ",".join(sorted(r.remote_authors)),
                ",".join(sorted(k.value for k in r.remote_kinds)),
            ]))
    if any(r.severity == Severity.CONFLICT for r in reports):
        return 2
    return 1 if reports else 0


# -- watch -------------------------------------------------------------


def cmd_watch(args) -> int:
    config = load_config(
        Path(args.root),
        project=args.project,
        author=args.author,
        server=args.server,
        port=args.port,
        debounce_millis=args.debounce,
        revision_provider=args.revision_provider,
        include=tuple(args.include) if args.include else None,
    )

    def show_reports(reports):
        if not reports:
            print(f"[{_stamp()}] radar clear")
            return
        for r in reports:
            authors = ", ".join(sorted(r.remote_authors))
            print(f"[{_stamp()}] {r.severity.value.upper():9s} {r.path_id} ({authors})")

    core = ClientCore(config.author)
    client = RelayClient(
        core, config.project_name, config.server_host, config.server_port,
        on_reports=show_reports,
    )
    agent = WorkspaceAgent(
        config, client, on_status=lambda line: print(f"[{_stamp()}] {line}"),
    )
    print(
        f"[{_stamp()}] watching {config.root_dir} as {config.author!r}, "
        f"relay {config.server_host}:{config.server_port}"
    )
    if not client.connect(timeout=5):
        print(f"[{_stamp()}] relay unreachable; retrying in the background",
              file=sys.stderr)
    stop = threading.Event()
    try:
        agent.run(stop)
    except KeyboardInterrupt:
        stop.set()
    finally:
        client.close()
    return 0


# -- serve -------------------------------------------------------------


def cmd_serve(args) -> int:
    server = RelayServer(args.host, args.port)
    port = server.start()
    static_dir = Path(args.dashboard) if args.dashboard else None
    bridge = DashboardBridge(server, static_dir=static_dir)
    ws_port = bridge.start()
    print(f"relay listening on {args.host}:{port}")
    print(f"websocket feed on ws://{args.host}:{ws_port}/ws")
    if static_dir is not None:
        print(f"dashboard assets from {static_dir}")
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        pass
    finally:
        bridge.stop()
        server.stop()
    return 0


# -- demo --------------------------------------------------------------


def cmd_demo(args) -> int:
    script = None
    if args.script:
        script = json.loads(_read_source(args.script))

    def show(event):
        if event.kind != "status" or args.verbose:
            print(f"[{event.at_millis:6d} ms] {event.member:8s} {event.kind:8s} {event.detail}")

    run = run_demo(script, settle_seconds=args.settle, on_event=show)
    png, csv_path = write_timeline(run.timeline, Path(args.out))
    print(f"timeline figure: {png}")
    print(f"timeline data: {csv_path}")
    if run.ok:
        print(f"demo ok in {run.duration_millis} ms")
        return 0
    print(f"demo failed: {run.message}", file=sys.stderr)
    return 2


# -- bench -------------------------------------------------------------


def cmd_bench(args) -> int:
    totals = (200, 2_000) if args.quick else (1_000, 10_000)
    desk_each = 100 if args.quick else 1_000
    desk = measure_detect(args.members, desk_each, repeats=5)
    print(f"desk scale: {args.members} members x {desk_each} changes "
          f"-> {desk:.1f} ms per detection pass")
    rows = scaling_rows(n_members=args.members, totals=totals, repeats=3)
    for total, members, millis in rows:
        print(f"{total}\t{members}\t{millis:.2f}")
    png, csv_path = write_scaling(rows, Path(args.out))
    print(f"scaling figure: {png}")
    print(f"scaling data: {csv_path}")
    return 0


# -- wiring ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conflict-radar",
        description="semantic-element merge-conflict radar",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse one source file")
    p.add_argument("file")
    p.add_argument("--path", help="file label to parse under (default: file name)")
    p.add_argument("--emit-tree", action="store_true",
                   help="print the element tree as canonical JSON")
    p.set_defaults(handler=cmd_parse)

    p = sub.add_parser("diff", help="distill semantic changes between two snapshots")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--path", help="file label both snapshots share (default: NEW's name)")
    p.add_argument("--author", default="local")
    p.add_argument("--project", default="local")
    p.add_argument("--revision", type=int, default=0)
    p.add_argument("--json", action="store_true", help="emit the change set as JSON")
    p.set_defaults(handler=cmd_diff)

    p = sub.add_parser("conflicts",
                       help="match change-set files; exit 2 on conflicts, 1 on awareness")
    p.add_argument("--local", required=True, help="local change-set JSON file")
    p.add_argument("--remote", required=True, action="append",
                   help="remote change-set JSON file (repeatable)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--suppress-identical", action="store_true",
                   help="downgrade byte-identical double edits")
    p.set_defaults(handler=cmd_conflicts)

    p = sub.add_parser("watch", help="watch a workspace and publish to a relay")
    p.add_argument("--root", default=".")
    p.add_argument("--project")
    p.add_argument("--author")
    p.add_argument("--server", help="relay address host[:port]")
    p.add_argument("--port", type=int)
    p.add_argument("--debounce", type=int, help="debounce in milliseconds")
    p.add_argument("--revision-provider", choices=["file", "git"])
    p.add_argument("--include", action="append", help="glob to watch (repeatable)")
    p.set_defaults(handler=cmd_watch)

    p = sub.add_parser("serve", help="run a relay session")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--dashboard", nargs="?", const="frontend/dist",
                   help="serve dashboard assets from DIR (default frontend/dist)")
    p.set_defaults(handler=cmd_serve)

    p = sub.add_parser("demo", help="run a scripted multi-agent rehearsal")
    p.add_argument("script", nargs="?", help="script JSON (default: built-in scenario)")
    p.add_argument("--out", default="radar-demo", help="directory for figure and CSV")
    p.add_argument("--settle", type=float, default=2.0,
                   help="seconds to wait for each expectation")
    p.add_argument("--verbose", action="store_true", help="include agent status lines")
    p.set_defaults(handler=cmd_demo)

    p = sub.add_parser("bench", help="measure detection cost and scaling")
    p.add_argument("--out", default="radar-bench", help="directory for figure and CSV")
    p.add_argument("--members", type=int, default=10)
    p.add_argument("--quick", action="store_true", help="smaller volumes for smoke runs")
    p.set_defaults(handler=cmd_bench)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (OSError, ValueError) as exc:
        # 3 keeps input errors apart from the conflicts exit code 2
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
