"""Predicate resolution and invocation.

Goals from declarations resolve either to native built-ins (registered
callables) or to foreign command-line units.  Foreign units talk the
subprocess protocol: inputs materialized as scratch files, outputs read
back from scratch files, arguments in the fixed order (preapplied,
static, inputs, outputs), exit code 0 for success, language names in
the UEBER_INLANGS/UEBER_OUTLANGS environment variables.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from .config import VerifyConfig
from .content import Content
from .model import MalformedLang, base_of
from .terms import Atom, Compound, Term, write_term

FOREIGN_LANGTAGS = ("python", "exec")

STDERR_LIMIT = 4096


class Failure(Exception):
    """Clean predicate failure (a reportable verification outcome)."""

    def __init__(self, message: str, detail: str = ""):
        super().__init__(message)
        self.detail = detail


class HostError(Exception):
    """Host-side fault (spawn/IO), distinct from a plugin's own failure."""


class BuildFailed(Exception):
    def __init__(self, stderr: str):
        super().__init__("build command failed")
        self.stderr = stderr


class MalformedGoal(Exception):
    pass


@dataclass(frozen=True)
class Native:
    name: str
    preapplied: tuple


@dataclass(frozen=True)
class Foreign:
    langtag: str
    unit: str
    preapplied: tuple


PredicateSpec = Union[Native, Foreign]


def parse_predicate(goal: Term) -> PredicateSpec:
    """A compound whose functor is a foreign langtag is foreign; any
    other atom or compound is a native with preapplied arguments."""
    if isinstance(goal, Atom):
        return Native(goal.name, ())
    if isinstance(goal, Compound):
        if goal.functor in FOREIGN_LANGTAGS:
            unit = goal.args[0]
            if not isinstance(unit, Atom):
                raise MalformedGoal(f"foreign unit must be an atom: {write_term(goal)}")
            return Foreign(goal.functor, unit.name, goal.args[1:])
        return Native(goal.functor, goal.args)
    raise MalformedGoal(f"not a predicate goal: {write_term(goal)}")


def pred_display(pred: PredicateSpec) -> str:
    if isinstance(pred, Native):
        if pred.preapplied:
            return pred.name + "(" + ",".join(write_term(t) for t in pred.preapplied) + ")"
        return pred.name
    inner = [f"'{pred.unit}'"] + [write_term(t) for t in pred.preapplied]
    return pred.langtag + "(" + ",".join(inner) + ")"


@dataclass(frozen=True)
class InvocationRequest:
    pred: PredicateSpec
    static_args: tuple  # absolute paths
    inlangs: tuple
    outlangs: tuple
    inputs: tuple  # Content per inlang
    output_slots: int
    origin_dir: Optional[Path] = None  # directory of the declaring file


def is_enabled(cfg: VerifyConfig, pred: PredicateSpec) -> bool:
    if isinstance(pred, Native):
        return True
    return pred.langtag in cfg.enabled_ffi


# --- native registry ---------------------------------------------------------

_NATIVES: dict = {}


def register_native(name: str, fn: Callable, replace: bool = False) -> None:
    """Extension point: register a built-in predicate.

    The callable receives preapplied terms, then static-argument
    contents, then input contents; it returns one Content per output
    slot (or nothing for relations) and raises Failure to fail.
    """
    if name in _NATIVES and not replace:
        raise ValueError(f"native predicate {name!r} already registered")
    _NATIVES[name] = fn


def get_native(name: str) -> Callable:
    try:
        return _NATIVES[name]
    except KeyError:
        raise HostError(f"unknown native predicate {name!r}") from None


def native_registered(name: str) -> bool:
    return name in _NATIVES


# --- manifests and the build hook ---------------------------------------------


@dataclass(frozen=True)
class PluginManifest:
    directory: Path
    build_cmd: Optional[str]
    run_cmd: Optional[str]

MANIFEST_NAME = ".ueber-plugin"
STAMP_NAME = ".ueber-stamp"

_build_locks: dict = {}
_build_locks_guard = threading.Lock()


def find_manifest(unit_path: Path) -> Optional[PluginManifest]:
    mpath = unit_path.parent / MANIFEST_NAME
    if not mpath.is_file():
        return None
    from .terms import read_term_file

    build_cmd = run_cmd = None
    for term in read_term_file(mpath):
        if isinstance(term, Compound) and len(term.args) == 1 and \
                isinstance(term.args[0], Atom):
            if term.functor == "build":
                build_cmd = term.args[0].name
            elif term.functor == "run":
                run_cmd = term.args[0].name
    return PluginManifest(unit_path.parent, build_cmd, run_cmd)


def _dir_lock(directory: Path) -> threading.Lock:
    with _build_locks_guard:
        return _build_locks.setdefault(str(directory), threading.Lock())


def ensure_built(manifest: Optional[PluginManifest], unit_path: Path,
                 timeout_s: float = 60.0) -> None:
    """Run the manifest's build command when sources are newer than the
    stamp; no-op without a manifest or build command."""
    if manifest is None or manifest.build_cmd is None:
        return
    with _dir_lock(manifest.directory):
        stamp = manifest.directory / STAMP_NAME
        stamp_mtime = stamp.stat().st_mtime if stamp.exists() else -1.0
        newest = -1.0
        for dirpath, _, filenames in os.walk(manifest.directory):
            for fn in filenames:
                if fn == STAMP_NAME:
                    continue
                p = Path(dirpath) / fn
                try:
                    newest = max(newest, p.stat().st_mtime)
                except OSError:
                    pass
        if newest <= stamp_mtime:
            return
        proc = subprocess.run(
            shlex.split(manifest.build_cmd),
            cwd=manifest.directory,
            capture_output=True,
            timeout=timeout_s,
        )
        if proc.returncode != 0:
            raise BuildFailed(proc.stderr.decode("utf-8", "replace")[:STDERR_LIMIT])
        stamp.touch()


# --- invocation ----------------------------------------------------------------


def _ext_of(lang: Optional[Term]) -> str:
    if lang is None:
        return "bin"
    try:
        return base_of(lang).name
    except MalformedLang:
        return "bin"


def _langs_env(langs: Sequence[Term]) -> str:
    return ",".join(write_term(l) for l in langs)


def invoke(cfg: VerifyConfig, req: InvocationRequest) -> list:
    """Run the predicate; returns one Content per output slot.

    Raises Failure for clean predicate failure and HostError for
    host-side faults.  Disabled foreign predicates are never spawned.
    """
    if isinstance(req.pred, Native):
        return _invoke_native(req)
    if not is_enabled(cfg, req.pred):
        raise HostError(f"foreign predicate gated off: {pred_display(req.pred)}")
    return _invoke_foreign(cfg, req)


def _load_static(path: str) -> Content:
    p = Path(path)
    try:
        return Content.from_bytes(p.read_bytes())
    except OSError:
        raise Failure(f"static argument {path}: no such file") from None


def _invoke_native(req: InvocationRequest) -> list:
    fn = get_native(req.pred.name)
    args = list(req.pred.preapplied)
    args += [_load_static(p) for p in req.static_args]
    args += list(req.inputs)
    out = fn(*args)
    out = list(out) if out is not None else []
    if len(out) != req.output_slots:
        raise HostError(
            f"native {req.pred.name!r} produced {len(out)} outputs, "
            f"expected {req.output_slots}")
    return [c.with_lang(l) if c.lang is None else c
            for c, l in zip(out, req.outlangs)]


def _resolve_unit(cfg: VerifyConfig, req: InvocationRequest) -> Path:
    unit = Path(req.pred.unit)
    if unit.is_absolute():
        return unit
    base = req.origin_dir if req.origin_dir is not None else cfg.root
    return (Path(base) / unit).resolve()


def _invoke_foreign(cfg: VerifyConfig, req: InvocationRequest) -> list:
    unit_path = _resolve_unit(cfg, req)
    manifest = find_manifest(unit_path)
    ensure_built(manifest, unit_path, cfg.timeout_s)

    temp_root = cfg.temp_root if cfg.temp_root is not None else Path(tempfile.gettempdir())
    temp_root = Path(temp_root)
    temp_root.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix="ueber-run-", dir=temp_root))

    in_paths = []
    for i, (content, lang) in enumerate(zip(req.inputs, req.inlangs)):
        p = scratch / f"in.{i}.{_ext_of(lang)}"
        p.write_bytes(content.data)
        in_paths.append(str(p))
    out_paths = []
    for j in range(req.output_slots):
        lang = req.outlangs[j] if j < len(req.outlangs) else None
        p = scratch / f"out.{j}.{_ext_of(lang)}"
        p.touch()
        out_paths.append(str(p))

    if manifest is not None and manifest.run_cmd is not None:
        base_cmd = shlex.split(manifest.run_cmd)
        if "{unit}" in base_cmd:
            base_cmd = [str(unit_path) if tok == "{unit}" else tok for tok in base_cmd]
        else:
            base_cmd.append(str(unit_path))
    elif req.pred.langtag == "python":
        base_cmd = shlex.split(cfg.python_cmd) + [str(unit_path)]
    else:  # exec: the unit is itself the command
        base_cmd = shlex.split(req.pred.unit)

    argv = (base_cmd
            + [write_term(t) for t in req.pred.preapplied]
            + [str(p) for p in req.static_args]
            + in_paths
            + out_paths)

    env = dict(os.environ)
    env["UEBER_INLANGS"] = _langs_env(req.inlangs)
    env["UEBER_OUTLANGS"] = _langs_env(req.outlangs)
    env["UEBER_ROOT"] = str(Path(cfg.root).resolve())

    try:
        proc = subprocess.run(argv, capture_output=True, env=env,
                              timeout=cfg.timeout_s)
    except subprocess.TimeoutExpired:
        raise Failure(f"timed out after {cfg.timeout_s}s",
                      detail=f"scratch kept at {scratch}") from None
    except OSError as exc:
        shutil.rmtree(scratch, ignore_errors=True)
        raise HostError(f"cannot spawn {argv[0]!r}: {exc}") from None

    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", "replace")[:STDERR_LIMIT]
        detail = f"scratch kept at {scratch}"
        if stderr.strip():
            detail = f"stderr: {stderr.strip()}, " + detail
        raise Failure(f"exit {proc.returncode}", detail=detail)

    outputs = []
    for j, p in enumerate(out_paths):
        lang = req.outlangs[j] if j < len(req.outlangs) else None
        try:
            outputs.append(Content.from_bytes(Path(p).read_bytes(), lang))
        except OSError:
            raise Failure(f"plugin produced no output {j}",
                          detail=f"scratch kept at {scratch}") from None
    shutil.rmtree(scratch, ignore_errors=True)
    return outputs
