from __future__ import annotations

import os
import stat
import sys
import time
from pathlib import Path

import pytest

from ueber.config import VerifyConfig
from ueber.content import Content
from ueber.plugin_host import (
    BuildFailed,
    Failure,
    Foreign,
    HostError,
    InvocationRequest,
    Native,
    ensure_built,
    find_manifest,
    invoke,
    is_enabled,
    parse_predicate,
    register_native,
)
from ueber.terms import Atom, Int, read_term

PY = sys.executable


def cfg_for(tmp_path: Path, **kw) -> VerifyConfig:
    kw.setdefault("enabled_ffi", frozenset({"python", "exec"}))
    kw.setdefault("python_cmd", PY)
    kw.setdefault("temp_root", tmp_path / "scratch")
    return VerifyConfig(root=tmp_path, **kw)


class TestParsePredicate:
    def test_atom_is_native(self):
        assert parse_predicate(Atom("bnlScanner")) == Native("bnlScanner", ())

    def test_compound_args_are_preapplied(self):
        p = parse_predicate(read_term("bglTopDownAcceptor(bnlScanner)"))
        assert p == Native("bglTopDownAcceptor", (Atom("bnlScanner"),))

    def test_foreign_langtags(self):
        p = parse_predicate(read_term("python('plug.py', extra)"))
        assert p == Foreign("python", "plug.py", (Atom("extra"),))
        assert parse_predicate(read_term("exec('ls -l')")) == \
            Foreign("exec", "ls -l", ())

    def test_gating(self):
        cfg = VerifyConfig(root=".", enabled_ffi=frozenset({"python"}))
        assert is_enabled(cfg, Native("bnlScanner", ()))
        assert is_enabled(cfg, Foreign("python", "p.py", ()))
        assert not is_enabled(VerifyConfig(root="."), Foreign("python", "p.py", ()))


class TestNativeInvocation:
    def test_relation_success_is_empty(self, tmp_path):
        register_native("t_ok", lambda *a: [], replace=True)
        req = InvocationRequest(Native("t_ok", ()), (), (Atom("text"),), (),
                                (Content.from_text("x"),), 0)
        assert invoke(cfg_for(tmp_path), req) == []

    def test_argument_order(self, tmp_path):
        seen = []
        register_native("t_spy", lambda *a: (seen.extend(a), [])[-1], replace=True)
        static = tmp_path / "s.term"
        static.write_text("stat.")
        req = InvocationRequest(Native("t_spy", (Int(7),)), (str(static),),
                                (Atom("text"),), (), (Content.from_text("in"),), 0)
        invoke(cfg_for(tmp_path), req)
        assert seen[0] == Int(7)
        assert seen[1].data == b"stat."
        assert seen[2].data == b"in"

    def test_output_count_checked(self, tmp_path):
        register_native("t_wrong", lambda *a: [], replace=True)
        req = InvocationRequest(Native("t_wrong", ()), (), (), (Atom("text"),),
                                (), 1)
        with pytest.raises(HostError):
            invoke(cfg_for(tmp_path), req)

    def test_unknown_native(self, tmp_path):
        req = InvocationRequest(Native("t_missing_native", ()), (), (), (), (), 0)
        with pytest.raises(HostError):
            invoke(cfg_for(tmp_path), req)

    def test_output_lang_filled_in(self, tmp_path):
        register_native("t_emit", lambda c: [Content.from_text("out")],
                        replace=True)
        req = InvocationRequest(Native("t_emit", ()), (), (Atom("text"),),
                                (read_term("bnl(text)"),),
                                (Content.from_text("x"),), 1)
        out = invoke(cfg_for(tmp_path), req)
        assert out[0].lang == read_term("bnl(text)")


ECHO = """\
import os, sys
args = sys.argv[1:]
out = args[-1]
with open(out, "w") as fh:
    for a in args[:-1]:
        fh.write(a + "\\n")
    fh.write(os.environ["UEBER_INLANGS"] + "\\n")
    fh.write(os.environ["UEBER_OUTLANGS"] + "\\n")
sys.exit(0)
"""


class TestForeignInvocation:
    def test_protocol_argv_order_and_env(self, tmp_path):
        script = tmp_path / "echo.py"
        script.write_text(ECHO)
        static = tmp_path / "grammar.term"
        static.write_text("[].")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(
            Foreign("python", str(script), (Atom("pre"), Int(3))),
            (str(static),),
            (read_term("bnl(text)"),),
            (read_term("bnl(value(term))"),),
            (Content.from_text("101.01"),),
            1,
        )
        out = invoke(cfg, req)
        lines = out[0].text().splitlines()
        assert lines[0] == "pre"
        assert lines[1] == "3"
        assert lines[2] == str(static)
        assert lines[3].endswith("/in.0.text")
        assert lines[4] == "bnl(text)"
        assert lines[5] == "bnl(value(term))"
        assert out[0].lang == read_term("bnl(value(term))")

    def test_input_scratch_contents_and_extensions(self, tmp_path):
        script = tmp_path / "copy.py"
        script.write_text(
            "import sys, shutil; shutil.copy(sys.argv[1], sys.argv[2])")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("python", str(script), ()), (),
                                (read_term("bnl(term)"),),
                                (read_term("bnl(term)"),),
                                (Content.from_text("a."),), 1)
        out = invoke(cfg, req)
        assert out[0].data == b"a."

    def test_nonzero_exit_is_failure_with_stderr(self, tmp_path):
        script = tmp_path / "fail.py"
        script.write_text("import sys; sys.stderr.write('boom'); sys.exit(3)")
        req = InvocationRequest(Foreign("python", str(script), ()), (),
                                (Atom("text"),), (), (Content.from_text("x"),), 0)
        with pytest.raises(Failure) as exc:
            invoke(cfg_for(tmp_path), req)
        assert "boom" in exc.value.detail
        assert str(exc.value) == "exit 3"

    def test_scratch_kept_on_failure_deleted_on_success(self, tmp_path):
        ok = tmp_path / "ok.py"
        ok.write_text("import sys; sys.exit(0)")
        bad = tmp_path / "bad.py"
        bad.write_text("import sys; sys.exit(1)")
        cfg = cfg_for(tmp_path)
        scratch_root = cfg.temp_root
        req = InvocationRequest(Foreign("python", str(ok), ()), (),
                                (Atom("text"),), (), (Content.from_text("x"),), 0)
        invoke(cfg, req)
        assert list(Path(scratch_root).iterdir()) == []
        req = InvocationRequest(Foreign("python", str(bad), ()), (),
                                (Atom("text"),), (), (Content.from_text("x"),), 0)
        with pytest.raises(Failure) as exc:
            invoke(cfg, req)
        kept = list(Path(scratch_root).iterdir())
        assert len(kept) == 1
        assert str(kept[0]) in exc.value.detail

    def test_isolated_scratch_directories(self, tmp_path):
        script = tmp_path / "pwdout.py"
        script.write_text(
            "import sys\n"
            "open(sys.argv[1], 'w').write(sys.argv[1])\n")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("python", str(script), ()), (), (),
                                (Atom("text"),), (), 1)
        first = invoke(cfg, req)[0].text()
        second = invoke(cfg, req)[0].text()
        assert first != second

    def test_timeout_is_failure(self, tmp_path):
        script = tmp_path / "sleep.py"
        script.write_text("import time; time.sleep(10)")
        cfg = cfg_for(tmp_path, timeout_s=0.3)
        req = InvocationRequest(Foreign("python", str(script), ()), (), (), (),
                                (), 0)
        with pytest.raises(Failure):
            invoke(cfg, req)

    def test_disabled_foreign_never_spawned(self, tmp_path):
        marker = tmp_path / "marker"
        script = tmp_path / "touch.py"
        script.write_text(f"open({str(marker)!r}, 'w').write('ran')")
        cfg = cfg_for(tmp_path, enabled_ffi=frozenset())
        req = InvocationRequest(Foreign("python", str(script), ()), (), (), (),
                                (), 0)
        with pytest.raises(HostError):
            invoke(cfg, req)
        assert not marker.exists()

    def test_spawn_fault_is_host_error(self, tmp_path):
        cfg = cfg_for(tmp_path, python_cmd="/nonexistent/interpreter")
        req = InvocationRequest(Foreign("python", "x.py", ()), (), (), (), (), 0)
        with pytest.raises(HostError):
            invoke(cfg, req)

    def test_exec_langtag_runs_unit_as_command(self, tmp_path):
        script = tmp_path / "tool.sh"
        script.write_text("#!/bin/sh\necho -n hi > \"$1\"\n")
        script.chmod(script.stat().st_mode | stat.S_IEXEC)
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("exec", str(script), ()), (), (),
                                (Atom("text"),), (), 1)
        assert invoke(cfg, req)[0].data == b"hi"

    def test_relative_unit_resolves_against_origin_dir(self, tmp_path):
        plugdir = tmp_path / "plugs"
        plugdir.mkdir()
        (plugdir / "ok.py").write_text("import sys; sys.exit(0)")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("python", "ok.py", ()), (), (), (), (),
                                0, origin_dir=plugdir)
        assert invoke(cfg, req) == []

    def test_root_env_var_is_absolute_repo_root(self, tmp_path):
        script = tmp_path / "root.py"
        script.write_text(
            "import os, sys\n"
            "open(sys.argv[1], 'w').write(os.environ['UEBER_ROOT'])\n")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("python", str(script), ()), (), (),
                                (Atom("text"),), (), 1)
        assert invoke(cfg, req)[0].text() == str(tmp_path.resolve())

    def test_repeat_invocation_is_pure(self, tmp_path):
        script = tmp_path / "canon.py"
        script.write_text(
            "import sys\n"
            "data = open(sys.argv[1]).read()\n"
            "open(sys.argv[2], 'w').write(data.strip().upper())\n")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("python", str(script), ()), (),
                                (Atom("text"),), (Atom("text"),),
                                (Content.from_text(" mixed Case \n"),), 1)
        assert invoke(cfg, req)[0].data == invoke(cfg, req)[0].data


class TestEnsureBuilt:
    def test_no_manifest_is_noop(self, tmp_path):
        ensure_built(None, tmp_path / "unit.py")

    def test_build_runs_once_until_sources_change(self, tmp_path):
        d = tmp_path / "plug"
        d.mkdir()
        (d / "src.c").write_text("source")
        (d / ".ueber-plugin").write_text(
            f"build('{PY} -c \"open(''{d}/built'',''a'').write(''x'')\"').\n")
        manifest = find_manifest(d / "unit")
        assert manifest is not None and manifest.build_cmd
        ensure_built(manifest, d / "unit")
        assert (d / "built").read_text() == "x"
        ensure_built(manifest, d / "unit")
        assert (d / "built").read_text() == "x"
        # Touching a source invalidates the stamp.
        time.sleep(0.02)
        now = time.time() + 5
        os.utime(d / "src.c", (now, now))
        ensure_built(manifest, d / "unit")
        assert (d / "built").read_text() == "xx"

    def test_failing_build(self, tmp_path):
        d = tmp_path / "plug"
        d.mkdir()
        (d / ".ueber-plugin").write_text(
            f"build('{PY} -c \"import sys; sys.exit(4)\"').\n")
        with pytest.raises(BuildFailed):
            ensure_built(find_manifest(d / "unit"), d / "unit")

    def test_run_template(self, tmp_path):
        d = tmp_path / "plug"
        d.mkdir()
        (d / "unit.txt").write_text("ignored")
        (d / ".ueber-plugin").write_text("run('/bin/sh -c \"exit 0\" {unit}').\n")
        cfg = cfg_for(tmp_path)
        req = InvocationRequest(Foreign("exec", str(d / "unit.txt"), ()), (),
                                (), (), (), 0)
        assert invoke(cfg, req) == []
