import json
import subprocess
import sys

import pytest

from conftest import FIXTURES, GOLDEN
from m2a.cli import main


def fx(name):
    return str(FIXTURES / f"{name}.maude")


def test_translate_writes_module_named_files(tmp_path, capsys):
    assert main(["translate", fx("peano"), fx("toy_compiler"), "-o", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["PEANO.ath", "TOY-COMPILER.ath"]
    assert (tmp_path / "PEANO.ath").read_text() == (GOLDEN / "PEANO.ath").read_text()


def test_translate_is_idempotent(tmp_path):
    main(["translate", fx("toy_compiler"), "-o", str(tmp_path / "a")])
    main(["translate", fx("toy_compiler"), "-o", str(tmp_path / "b")])
    assert (tmp_path / "a" / "TOY-COMPILER.ath").read_bytes() == (tmp_path / "b" / "TOY-COMPILER.ath").read_bytes()


def test_translate_single_file_output(tmp_path):
    out = tmp_path / "x.ath"
    assert main(["translate", fx("peano_simple"), "-o", str(out)]) == 0
    assert out.read_text().startswith("# Generated by m2a")


def test_no_induction(tmp_path):
    main(["translate", fx("peano"), "-o", str(tmp_path), "--no-induction"])
    assert "primitive-method" not in (tmp_path / "PEANO.ath").read_text()


def test_translate_rejects_bad_module(tmp_path, capsys):
    assert main(["translate", fx("bad_strong"), "-o", str(tmp_path)]) == 1
    err = capsys.readouterr().err
    assert "bad_strong.maude:6:6: error[strong-sensibility]" in err
    assert not list(tmp_path.iterdir())


def test_check_exit_codes(capsys):
    assert main(["check", fx("peano")]) == 0
    assert "strictly sensible" in capsys.readouterr().out
    assert main(["check", fx("bad_maxbound")]) == 1
    assert "maximal-argument-bounding" in capsys.readouterr().err


def test_check_json(capsys):
    assert main(["check", "--json", fx("bad_strong")]) == 1
    payload = json.loads(capsys.readouterr().out)
    [f] = payload["files"]
    assert f["reports"][0]["strongly_sensible"] is False
    assert f["diagnostics"][0]["rule"] == "strong-sensibility" and f["diagnostics"][0]["line"] == 6


def test_verify_reports_agreement(capsys):
    assert main(["verify", fx("peano"), "--pairs", "50", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "50 pairs, 50 agree, 0 disagree" in out and "seed 7" in out


def test_verify_json_echoes_seed(capsys):
    assert main(["verify", fx("chain"), "--pairs", "10", "--seed", "4", "--depth", "2", "--json"]) == 0
    [rep] = json.loads(capsys.readouterr().out)["files"][0]["reports"]
    assert rep["seed"] == 4 and rep["pairs"] == 10 and rep["disagreements"] == []


def test_missing_input_is_an_input_failure(capsys):
    assert main(["check", "does-not-exist.maude"]) == 1
    assert "unreadable-input" in capsys.readouterr().err


def test_strict_turns_warnings_into_errors(tmp_path, capsys):
    src = tmp_path / "w.maude"
    src.write_text("fmod W is sorts A B . op a : -> A [ctor] . op b : -> B . endfm\n")
    assert main(["translate", str(src), "-o", str(tmp_path)]) == 0
    assert "warning[no-constructors]" in capsys.readouterr().err
    assert main(["translate", str(src), "-o", str(tmp_path), "--strict"]) == 1
    assert "error[no-constructors]" in capsys.readouterr().err


def test_no_builtins(tmp_path, capsys):
    assert main(["translate", fx("toy_compiler"), "-o", str(tmp_path), "--no-builtins"]) == 1
    assert "unknown-import" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["verify", fx("peano"), "--pairs", "0"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_color_env(monkeypatch, capsys):
    monkeypatch.setenv("M2A_COLOR", "always")
    main(["check", fx("bad_strong")])
    assert "\033[31merror\033[0m" in capsys.readouterr().err
    monkeypatch.setenv("M2A_COLOR", "never")
    main(["check", fx("bad_strong")])
    assert "\033[" not in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "m2a", "check", fx("peano")], capture_output=True, text=True)
    assert proc.returncode == 0 and "PEANO" in proc.stdout


def test_verify_disagreement_exits_3(monkeypatch, capsys):
    import m2a.cli

    class Broken(m2a.cli.Translator):
        def translate(self):
            return super().translate().without("core_eq_A_B_C")

    monkeypatch.setattr(m2a.cli, "Translator", Broken)
    assert main(["verify", fx("chain"), "--pairs", "40", "--seed", "11"]) == 3
    assert "disagree" in capsys.readouterr().out
