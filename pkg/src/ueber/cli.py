"""Command-line front end: collect, check, verify, report.

Exit codes: 0 clean, 1 findings, 2 usage error, 3 I/O catastrophe.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fnmatch import fnmatch
from pathlib import Path

from . import langkit  # noqa: F401  (registers the native predicates)
from .checker import check_model
from .config import MODES, VerifyConfig
from .model import (
    ILL_FORMED,
    UNVERIFIED,
    WARNING,
    CollectedModel,
    ElementOf,
    Function,
    Language,
    MapsTo,
    NotElementOf,
    Problem,
    collect,
    decl_to_term,
)
from .terms import write_term
from .verifier import verify_model


@dataclass
class Report:
    counts: dict
    mode: str
    elapsed_s: float
    problems: list
    warnings: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.problems else 0


def model_counts(m: CollectedModel) -> dict:
    return {
        "declarations": len(m.decls),
        "languages": sum(isinstance(sd.decl, Language) for sd in m.decls),
        "functions": sum(isinstance(sd.decl, Function) for sd in m.decls),
        "applications": sum(isinstance(sd.decl, MapsTo) for sd in m.decls),
    }


def _decl_text(p: Problem):
    return write_term(decl_to_term(p.subject)) if p.subject is not None else None


def _problem_block(p: Problem) -> str:
    head = _decl_text(p) or p.origin
    lines = [f"{p.severity}: {head}", f"    at {p.origin}:{p.line}"]
    lines += [f"    {line}" for line in p.message.splitlines()]
    return "\n".join(lines)


def render_report(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        def enc(p: Problem) -> dict:
            return {"severity": p.severity, "message": p.message,
                    "decl": _decl_text(p), "origin": p.origin, "line": p.line}

        return json.dumps({
            "counts": report.counts,
            "mode": report.mode,
            "elapsed_s": report.elapsed_s,
            "problems": [enc(p) for p in report.problems],
            "warnings": [enc(p) for p in report.warnings],
        }, indent=2) + "\n"

    blocks = []
    for severity in (ILL_FORMED, UNVERIFIED):
        blocks += [_problem_block(p) for p in report.problems
                   if p.severity == severity]
    blocks += [_problem_block(p) for p in report.warnings]
    c = report.counts
    summary = (f"{c['declarations']} declarations: {c['languages']} languages, "
               f"{c['functions']} functions, {c['applications']} applications")
    n = len(report.problems)
    verdict = "OK" if n == 0 else "NOT OK"
    tail = f"{verdict}: {n} problem{'s' if n != 1 else ''} " \
           f"({c['declarations']} declarations checked)"
    if report.warnings:
        w = len(report.warnings)
        tail += f", {w} warning{'s' if w != 1 else ''}"
    return "\n".join(blocks + [summary, tail]) + "\n"


def _make_filter(glob: str):
    def decl_files(decl) -> list:
        if isinstance(decl, (ElementOf, NotElementOf)):
            return [decl.file]
        if isinstance(decl, MapsTo):
            return list(decl.infiles) + list(decl.outfiles)
        return []

    def select(sd) -> bool:
        if fnmatch(sd.origin, glob):
            return True
        return any(fnmatch(f, glob) for f in decl_files(sd.decl))

    return select


def build_report(root, mode: str = "check", enabled_ffi=(), timeout_s: float = 60.0,
                 file_filter=None, python_cmd: str = "python3") -> Report:
    """Run the whole pipeline over a repository root."""
    t0 = time.monotonic()
    m = collect(root)
    static = list(m.problems) + check_model(m)
    ill_formed = frozenset(p.subject for p in static
                           if p.severity == ILL_FORMED and p.subject is not None)
    run_temp = Path(tempfile.mkdtemp(prefix="ueber-"))
    cfg = VerifyConfig(root=root, mode=mode, enabled_ffi=frozenset(enabled_ffi),
                       timeout_s=timeout_s, python_cmd=python_cmd,
                       temp_root=run_temp)
    select = _make_filter(file_filter) if file_filter else None
    try:
        dynamic = verify_model(m, cfg, select=select, skip=ill_formed)
    finally:
        try:
            run_temp.rmdir()  # only when no failure scratch was retained
        except OSError:
            pass
    found = static + dynamic
    problems = [p for p in found if p.severity != WARNING]
    warnings = [p for p in found if p.severity == WARNING]
    return Report(model_counts(m), mode, time.monotonic() - t0, problems, warnings)


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ueber",
        description="Check and verify a repository of language-typed artifacts "
                    "described by .ueber declarations.")
    parser.add_argument("--root", default=".", help="repository root (default .)")
    parser.add_argument("--mode", choices=MODES, default="check",
                        help="check only, override disagreeing baselines, or "
                             "create missing ones")
    parser.add_argument("--enable-ffi", default="", metavar="TAG[,TAG...]",
                        help="foreign predicate tags to enable (default: none)")
    parser.add_argument("--filter", default=None, metavar="GLOB",
                        help="verify only declarations whose origin or files match")
    parser.add_argument("--report", choices=("text", "json"), default="text")
    parser.add_argument("--timeout", type=float, default=60.0, metavar="SECS",
                        help="per-invocation timeout (default 60)")
    args = parser.parse_args(argv)

    root = Path(args.root)
    if not root.is_dir():
        print(f"ueber: not a directory: {root}", file=sys.stderr)
        return 3
    tags = frozenset(t.strip() for t in args.enable_ffi.split(",") if t.strip())
    try:
        report = build_report(root, mode=args.mode, enabled_ffi=tags,
                              timeout_s=args.timeout, file_filter=args.filter)
    except OSError as exc:
        print(f"ueber: {exc}", file=sys.stderr)
        return 3
    sys.stdout.write(render_report(report, args.report))
    return report.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
