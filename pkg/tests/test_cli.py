from __future__ import annotations

import json

import pytest

from conftest import FIXTURE, write_repo

from ueber.cli import build_report, render_report, run


def run_cli(capsys, *args):
    code = run(list(args))
    out = capsys.readouterr()
    return code, out.out


class TestExitCodes:
    def test_pristine_fixture_is_clean(self, capsys):
        code, out = run_cli(capsys, "--root", str(FIXTURE))
        assert code == 0
        assert out.endswith("OK: 0 problems (64 declarations checked)\n")

    def test_findings_exit_1(self, capsys, fixture_copy):
        value = fixture_copy / "languages/BNL/samples/5comma25.value"
        value.write_text("9.99.\n")
        code, out = run_cli(capsys, "--root", str(fixture_copy))
        assert code == 1
        assert "UNVERIFIED: mapsTo(solve," in out
        assert "Disagreeing baseline languages/BNL/samples/5comma25.value." in out

    def test_usage_error_exit_2(self):
        with pytest.raises(SystemExit) as exc:
            run(["--mode", "bogus"])
        assert exc.value.code == 2

    def test_missing_root_exit_3(self, capsys):
        code, _ = run_cli(capsys, "--root", "/no/such/dir")
        assert code == 3

    def test_create_mode_restores_deleted_baselines(self, capsys, fixture_copy):
        value = fixture_copy / "languages/BNL/samples/5comma25.value"
        tokens = fixture_copy / "languages/BNL/samples/5comma25.tokens"
        value.unlink()
        tokens.unlink()
        code, _ = run_cli(capsys, "--root", str(fixture_copy), "--mode", "create")
        assert code == 0
        assert value.read_text() == "5.25.\n"
        assert tokens.read_text() == "['1','0','1','.','0','1'].\n"


class TestRendering:
    def test_text_deterministic(self, capsys, fixture_copy):
        (fixture_copy / "languages/BNL/samples/5comma25.value").write_text("9.")
        _, first = run_cli(capsys, "--root", str(fixture_copy))
        _, second = run_cli(capsys, "--root", str(fixture_copy))
        assert first == second

    def test_json_schema(self, capsys, fixture_copy):
        (fixture_copy / "languages/BNL/samples/5comma25.value").write_text("9.")
        code, out = run_cli(capsys, "--root", str(fixture_copy),
                            "--report", "json")
        assert code == 1
        doc = json.loads(out)
        assert set(doc["counts"]) == {"declarations", "languages", "functions",
                                      "applications"}
        assert doc["mode"] == "check"
        assert isinstance(doc["elapsed_s"], float)
        p = doc["problems"][0]
        assert set(p) == {"severity", "message", "decl", "origin", "line"}
        assert p["severity"] == "UNVERIFIED"
        assert p["decl"].startswith("mapsTo(")
        assert p["origin"] == "languages/BNL/samples/.ueber"

    def test_text_and_json_carry_same_problem_count(self, fixture_copy):
        (fixture_copy / "languages/BNL/samples/5comma25.value").write_text("9.")
        report = build_report(fixture_copy)
        text = render_report(report, "text")
        doc = json.loads(render_report(report, "json"))
        n = len(doc["problems"])
        assert f"NOT OK: {n} problems" in text

    def test_ill_formed_precede_unverified(self, tmp_path):
        repo = write_repo(tmp_path, {
            ".ueber": (
                "language(text).\n"
                "membership(text, utf8Text, []).\n"
                "elementOf('present.txt', text).\n"
                "elementOf('ghost.txt', text).\n"
                "mapsTo(nofun, ['present.txt'], []).\n"),
            "present.txt": "x",
        })
        report = build_report(repo)
        text = render_report(report, "text")
        assert text.index("ILL_FORMED:") < text.index("UNVERIFIED:")
        assert "Function nofun: missing." in text

    def test_empty_report_text(self, tmp_path):
        report = build_report(write_repo(tmp_path, {}))
        text = render_report(report, "text")
        assert text == ("0 declarations: 0 languages, 0 functions, "
                        "0 applications\nOK: 0 problems (0 declarations "
                        "checked)\n")


class TestForeignFlag:
    def test_enable_ffi_python_via_cli(self, capsys):
        code, out = run_cli(capsys, "--root", str(FIXTURE),
                            "--enable-ffi", "python")
        assert code == 0
        assert "OK: 0 problems" in out


class TestFilter:
    def test_filter_restricts_verification(self, capsys, fixture_copy):
        (fixture_copy / "languages/BNL/samples/5comma25.value").write_text("9.")
        code, _ = run_cli(capsys, "--root", str(fixture_copy),
                          "--filter", "*.tokens")
        assert code == 0
        code, out = run_cli(capsys, "--root", str(fixture_copy),
                            "--filter", "*.value")
        assert code == 1
        assert "Disagreeing baseline" in out

    def test_ill_formed_declarations_skipped_in_verification(self, tmp_path):
        # The mapsTo is ill-formed (no function), so no attempt is made
        # to run it even though its input file is missing.
        repo = write_repo(tmp_path, {
            ".ueber": "mapsTo(ghostfun, ['nofile'], []).\n",
        })
        report = build_report(repo)
        messages = [p.message for p in report.problems]
        assert messages == ["Function ghostfun: missing."]
