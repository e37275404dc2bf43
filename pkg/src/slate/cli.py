"""Command line entry point.

    slate <data-files...> [--mode annotate|adjudicate] [--kind label|text|link]
          [--scope char|token|line|doc] [--config PATH] [--anno PATH]...
          [--output PATH] [--overwrite] [--file-list PATH]

Exit codes: 0 on a clean quit, 2 for usage errors and unreadable files,
3 when no terminal is available.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from slate import standoff
from slate.adjudication import Adjudication
from slate.config import ConfigError, load_config, parse_keyseq
from slate.core import Scope, tokenize
from slate.session import ADJUDICATE, ANNOTATE, FileState, Session
from slate.store import AnnotationStore, Kind

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_TERMINAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunPlan:
    data: list[Path]
    mode: str = ANNOTATE
    kind: Kind = Kind.LABEL
    scope: Scope = Scope.TOKEN
    config: Path | None = None
    anno: list[Path] = field(default_factory=list)
    output: Path | None = None
    overwrite: bool = False
    script: Path | None = None
    size: tuple[int, int] = (24, 80)

    def annotator_files(self, data: Path) -> list[Path]:
        """Each annotator's file for ``data``; directories hold
        ``<name>.annotations`` files named after the data file."""
        out = []
        for anno in self.anno:
            if anno.is_dir():
                out.append(standoff.annotation_path(anno / data.name))
            else:
                out.append(anno)
        return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slate", description="Annotate text in the terminal.")
    p.add_argument("data", nargs="*", type=Path, help="text files to annotate")
    p.add_argument("--mode", choices=[ANNOTATE, ADJUDICATE], default=ANNOTATE)
    p.add_argument("--kind", choices=[k.value for k in Kind], default=Kind.LABEL.value)
    p.add_argument("--scope", choices=["char", "token", "line", "doc"], default="token")
    p.add_argument("--config", type=Path, help="config file (default ./slate.config if present)")
    p.add_argument("--anno", type=Path, action="append", default=[],
                   help="annotator file or directory to adjudicate (repeat for each annotator)")
    p.add_argument("--output", type=Path, help="where to write annotations for a single data file")
    p.add_argument("--overwrite", action="store_true", help="ignore existing annotation files")
    p.add_argument("--file-list", type=Path, help="file with one data path per line")
    p.add_argument("--script", type=Path, help=argparse.SUPPRESS)
    p.add_argument("--size", default="24x80", help=argparse.SUPPRESS)
    return p


def read_manifest(path: Path) -> list[Path]:
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        entry = Path(line)
        out.append(entry if entry.is_absolute() else path.parent / entry)
    return out


def parse_args(argv) -> RunPlan:
    args = build_parser().parse_args(argv)
    data = list(args.data)
    if args.file_list is not None:
        try:
            data.extend(read_manifest(args.file_list))
        except OSError as err:
            raise UsageError(f"cannot read file list {args.file_list}: {err.strerror}") from None
    if not data:
        raise UsageError("no data files given")
    missing = [str(p) for p in data if not p.is_file()]
    if missing:
        raise UsageError("missing data file(s): " + ", ".join(missing))
    if args.mode == ADJUDICATE:
        if len(args.anno) < 2:
            raise UsageError("adjudicate mode needs at least two --anno files")
        if len(data) > 1 and not all(a.is_dir() for a in args.anno):
            raise UsageError("with several data files, each --anno must be a directory")
    elif args.anno:
        raise UsageError("--anno is only used in adjudicate mode")
    if args.output is not None and len(data) > 1:
        raise UsageError("--output needs exactly one data file")
    try:
        rows, cols = (int(x) for x in args.size.lower().split("x"))
    except ValueError:
        raise UsageError(f"bad --size {args.size!r}") from None
    plan = RunPlan(
        data=data,
        mode=args.mode,
        kind=Kind(args.kind),
        scope=Scope.from_name(args.scope),
        config=args.config,
        anno=list(args.anno),
        output=args.output,
        overwrite=args.overwrite,
        script=args.script,
        size=(rows, cols),
    )
    if plan.mode == ADJUDICATE:
        for d in plan.data:
            absent = [str(a) for a in plan.annotator_files(d) if not a.is_file()]
            if absent:
                raise UsageError("missing annotation file(s): " + ", ".join(absent))
    return plan


def read_script(text: str) -> list[str]:
    """Keys from a script: whitespace-separated key names, ``+`` chords,
    runs of digits as repeat counts, ``#`` comment lines."""
    keys = []
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            continue
        for word in line.split():
            if word.isdigit():
                keys.extend(word)
            else:
                keys.extend(parse_keyseq(word))
    return keys


def _read_text(path: Path) -> str:
    with open(path, encoding="utf-8", newline="") as f:
        return f.read()


def load_session(plan: RunPlan) -> Session:
    """Build the session; OSError and ValueError propagate to ``run``."""
    config = load_config(plan.config)
    files = []
    for data in plan.data:
        doc = tokenize(_read_text(data))
        adjudicating = plan.mode == ADJUDICATE
        out = plan.output or standoff.annotation_path(data, adjudicated=adjudicating)
        existing = out.is_file() and not plan.overwrite
        store = None
        if existing:
            try:
                store = standoff.load(out, doc)
            except standoff.FormatError as err:
                raise ValueError(f"{out}: {err} (use --overwrite to start afresh)") from None
        if adjudicating:
            paths = plan.annotator_files(data)
            stores = []
            for p in paths:
                try:
                    stores.append(standoff.load(p, doc))
                except standoff.FormatError as err:
                    raise ValueError(f"{p}: {err}") from None
            adj = Adjudication(doc, stores, [p.name for p in paths], resolution=store)
            files.append(FileState(data, doc, adj.resolution, plan.scope, output=out,
                                   adjudication=adj, on_disk=existing))
        else:
            files.append(FileState(data, doc, store or AnnotationStore(), plan.scope, output=out))
    return Session(files, config, kind=plan.kind, scope=plan.scope, mode=plan.mode)


def run(plan: RunPlan, out=None) -> int:
    out = out or sys.stdout
    try:
        session = load_session(plan)
    except ConfigError as err:
        print(f"slate: config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError, ValueError) as err:
        print(f"slate: {err}", file=sys.stderr)
        return EXIT_USAGE

    if plan.script is not None:
        from slate.render import render

        try:
            keys = read_script(_read_text(plan.script))
        except (OSError, ValueError) as err:
            print(f"slate: script: {err}", file=sys.stderr)
            return EXIT_USAGE
        session.feed(keys)
        screen = render(session, plan.size)
        out.write(screen.dump())
        return EXIT_OK

    if not (sys.stdin.isatty() and sys.stdout.isatty()):
        print("slate: a terminal is required", file=sys.stderr)
        return EXIT_TERMINAL
    import curses

    from slate import terminal

    try:
        terminal.run(session)
    except curses.error as err:
        print(f"slate: terminal unavailable: {err}", file=sys.stderr)
        return EXIT_TERMINAL
    return EXIT_OK


def main(argv=None) -> int:
    try:
        plan = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as err:
        build_parser().print_usage(sys.stderr)
        print(f"slate: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    return run(plan)


def console() -> None:
    """Entry for launchers that ignore return values (zipapp)."""
    sys.exit(main())


if __name__ == "__main__":
    console()
