"""Headless script runner for scripted modeling sessions.

A script is plain text, one user turn per line.  Directive lines start
with ``@``:

    @select N        resolve a pending ingredient/skeleton selection
    @apply N         apply rule N
    @revert N        revert rule N's latest application
    @feedback N TXT  submit correction TXT for history turn N
    @automatic TXT   run automatic mode on the description TXT

Lines starting with ``#`` and blank lines are skipped.  The exit status
is 0 only if every turn succeeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .engine.scene import export_obj, save_scene
from .service.catalog import load_catalog
from .service.config import ServiceConfig
from .service.sessions import Session, TurnOutcome
from .translator import InvalidCorrection, MockBackend, PromptStore, RemoteBackend


class ScriptError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_directive(line: str, line_no: int) -> tuple[str, str]:
    parts = line[1:].split(None, 1)
    if not parts:
        raise ScriptError(line_no, "empty directive")
    name = parts[0].lower()
    arg = parts[1].strip() if len(parts) > 1 else ""
    if name not in ("select", "apply", "revert", "feedback", "automatic"):
        raise ScriptError(line_no, f"unknown directive @{name}")
    if name in ("select", "apply", "revert") and not arg.isdigit():
        raise ScriptError(line_no, f"@{name} needs an integer argument")
    if name == "feedback":
        bits = arg.split(None, 1)
        if len(bits) < 2 or not bits[0].isdigit():
            raise ScriptError(line_no, "@feedback needs a turn index and a correction")
    if name == "automatic" and not arg:
        raise ScriptError(line_no, "@automatic needs a model description")
    return name, arg


def run_script(script_path, session: Session, echo=print) -> int:
    """Execute a script line by line; returns the number of failed turns."""
    lines = Path(script_path).read_text(encoding="utf-8").splitlines()
    failures = 0
    for line_no, raw_line in enumerate(lines, start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        outcomes: list[TurnOutcome]
        if line.startswith("@"):
            name, arg = _parse_directive(line, line_no)
            if name == "select":
                outcomes = [session.resolve_selection(int(arg))]
            elif name == "apply":
                outcomes = [session.apply_rule_by_id(int(arg))]
            elif name == "revert":
                outcomes = [session.revert_rule_by_id(int(arg))]
            elif name == "automatic":
                outcomes = session.run_automatic(arg)
            else:  # feedback
                index_text, correction = arg.split(None, 1)
                try:
                    outcomes = [session.submit_feedback(int(index_text), correction)]
                except InvalidCorrection as exc:
                    echo(f"turn {line_no} failed: {exc}")
                    return 1
        else:
            outcomes = [session.handle_turn(line)]
        for outcome in outcomes:
            for message in outcome.messages:
                echo(f"  {message}")
            if not outcome.ok:
                failures += 1
                details = "; ".join(e["message"] for e in outcome.errors)
                echo(f"turn {line_no} failed: {details}")
                return failures
    return failures


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mesochat", description="Run a scripted modeling session")
    parser.add_argument("--script", required=True, help="script file path")
    parser.add_argument("--seed", type=int, default=None, help="scene seed")
    parser.add_argument("--backend", choices=["mock", "remote"], default=None)
    parser.add_argument("--config", help="service config JSON")
    parser.add_argument("--export", help="write the final scene JSON here")
    parser.add_argument("--export-obj", help="write an OBJ sphere export here")
    parser.add_argument("--prompts", help="prompt store directory")
    args = parser.parse_args(argv)

    script = Path(args.script)
    if not script.is_file():
        print(f"script not found: {script}", file=sys.stderr)
        return 2

    config = ServiceConfig.load(args.config) if args.config else ServiceConfig()
    if args.backend:
        config.backend = args.backend
    if args.prompts:
        config.prompts_dir = args.prompts
    if args.seed is not None:
        config.default_seed = args.seed

    catalog = load_catalog(config.catalog_dir)
    store = (PromptStore.load(config.prompts_dir)
             if Path(config.prompts_dir).is_dir() else PromptStore.default())
    if config.backend == "remote":
        backend = RemoteBackend(config.endpoint, config.model)
    else:
        backend = MockBackend()
    session = Session(catalog, store, backend, seed=config.default_seed)

    try:
        failures = run_script(script, session)
    except ScriptError as exc:
        print(f"script error: {exc}", file=sys.stderr)
        return 2

    if args.export:
        save_scene(session.scene, args.export)
        print(f"scene written to {args.export}")
    if args.export_obj:
        export_obj(session.scene, args.export_obj)
        print(f"OBJ written to {args.export_obj}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
