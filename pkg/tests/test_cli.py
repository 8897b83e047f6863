"""Command-line tests: golden outputs, exit codes, JSON shape."""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from symdel.cli import main

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"

SALLY_GOLDEN = """\
initial
  vars: p t
  law: p & ~t
  obs Sally: Top
  obs Anne: Top
  state: {p}

after event 1
  vars: p t
  law: p & t
  obs Sally: Top
  obs Anne: Top
  state: {p,t}

after event 2
  vars: p t
  law: ~p & t
  obs Sally: Top
  obs Anne: Top
  state: {t}

after event 3
  vars: p t q
  law: ~p & ~t & q | ~p & t & ~q
  obs Sally: ~q'
  obs Anne: q <-> q'
  state: {q}

after event 4
  vars: p t q
  law: p & ~t & q | p & t & ~q
  obs Sally: ~q'
  obs Anne: q <-> q'
  state: {p,q}

check [Sally] t = true [ok]
check t = false [ok]
check [Anne] ~t = true [ok]
check [Anne] [Sally] t = true [ok]
"""

COIN_TRACE_GOLDEN = """\
initial
  vars: p
  law: p
  obs a: p <-> p'
  obs b: p <-> p'
  state: {p}

EVENT
  ADDVARS q
  CHANGE p := q
  OBS+ b: q <-> q'
  ASSIGN q

after event 1
  vars: p q
  law: p <-> q
  obs a: Top
  obs b: q <-> q'
  state: {p,q}

check p = true [ok]
check [b] p = true [ok]
check [a] p = false [ok]
check [a] ~p = false [ok]
check [a] ([b] p | [b] ~p) = true [ok]
"""

TO_ACTION_GOLDEN = """\
AGENTS a b
VARS p

ACTION
  EVENTS {} {q}
  POST {}: p := Bot
  POST {q}: p := Top
  REL a: {}->{} {}->{q} {q}->{} {q}->{q}
  REL b: {}->{} {q}->{q}
  DESIGNATED {q}
"""

TO_TRANSFORMER_GOLDEN = """\
AGENTS a b
VARS p

EVENT
  ADDVARS q1
  PRE ~q1 | q1
  CHANGE p := q1
  OBS+ b: q1 <-> q1'
  ASSIGN q1
"""


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- check ----------------------------------------------------------------------

def test_check_sally_anne_golden(capsys):
    code, out, err = run(
        capsys, "check", str(SCENARIOS / "sally_anne.scn"), "--minimize"
    )
    assert code == 0
    assert err == ""
    assert out == SALLY_GOLDEN


def test_check_coin_trace_golden(capsys):
    code, out, err = run(
        capsys, "check", str(SCENARIOS / "coin_flip.scn"), "--trace", "--minimize"
    )
    assert code == 0
    assert out == COIN_TRACE_GOLDEN


def test_check_without_minimize_keeps_snapshots(capsys):
    code, out, _ = run(capsys, "check", str(SCENARIOS / "coin_flip.scn"))
    assert code == 0
    assert "vars: p q p°" in out
    assert "check [a] p = false [ok]" in out


def test_check_public_change(capsys):
    code, out, _ = run(capsys, "check", str(SCENARIOS / "public_change.scn"))
    assert code == 0
    assert out.count("[ok]") == 4


def test_check_json_shape(capsys):
    code, out, _ = run(
        capsys, "check", str(SCENARIOS / "coin_flip.scn"), "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"trace", "checks", "ok"}
    assert payload["ok"] is True
    assert len(payload["trace"]) == 2
    first = payload["trace"][0]
    assert set(first) == {"vars", "law", "obs", "state"}
    assert first == {
        "vars": ["p"],
        "law": "p",
        "obs": {"a": "p <-> p'", "b": "p <-> p'"},
        "state": ["p"],
    }
    assert payload["trace"][1]["vars"] == ["p", "q", "p°"]
    assert payload["checks"][0] == {
        "formula": "p",
        "after": 1,
        "value": True,
        "expect": True,
        "ok": True,
    }


def test_check_failed_expectation(tmp_path, capsys):
    path = tmp_path / "wrong.scn"
    path.write_text(
        "AGENTS a\nVARS p\nLAW p\nSTATE p\nCHECK ~p EXPECT true\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "check", str(path))
    assert code == 1
    assert "check ~p = false [FAIL expected true]" in out

    code, out, _ = run(capsys, "check", str(path), "--json")
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert payload["checks"][0]["ok"] is False


def test_check_missing_file(capsys):
    code, out, err = run(capsys, "check", "no_such_file.scn")
    assert code == 2
    assert out == ""
    assert "no_such_file.scn" in err


def test_check_parse_error(tmp_path, capsys):
    path = tmp_path / "broken.scn"
    path.write_text("VARS p\nLAW p &\n", encoding="utf-8")
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "line 2" in err


def test_check_blocked_event(tmp_path, capsys):
    path = tmp_path / "blocked.scn"
    path.write_text(
        "AGENTS a\nVARS p\nLAW p\nSTATE p\nEVENT\nPRE ~p\n",
        encoding="utf-8",
    )
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "step 1" in err
    assert "not executable" in err


def test_check_index_out_of_range(tmp_path, capsys):
    path = tmp_path / "range.scn"
    path.write_text(
        "AGENTS a\nVARS p\nLAW p\nSTATE p\nCHECK after 3 p\n",
        encoding="utf-8",
    )
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "after 3" in err


def test_check_unknown_atom_in_query(tmp_path, capsys):
    path = tmp_path / "atom.scn"
    path.write_text(
        "AGENTS a\nVARS p\nLAW p\nSTATE p\nCHECK z\n",
        encoding="utf-8",
    )
    code, _, err = run(capsys, "check", str(path))
    assert code == 2
    assert "line 5" in err


# -- translate --------------------------------------------------------------------

def test_translate_event_to_action_golden(capsys):
    code, out, err = run(
        capsys, "translate", str(SCENARIOS / "coin_flip.scn"), "--to", "action"
    )
    assert code == 0
    assert err == ""
    assert out == TO_ACTION_GOLDEN


def test_translate_action_to_transformer_golden(capsys):
    code, out, err = run(
        capsys,
        "translate",
        str(SCENARIOS / "flip_action.scn"),
        "--to",
        "transformer",
    )
    assert code == 0
    assert err == ""
    assert out == TO_TRANSFORMER_GOLDEN


def test_translate_requires_matching_block(tmp_path, capsys):
    path = tmp_path / "plain.scn"
    path.write_text("AGENTS a\nVARS p\nLAW p\nSTATE p\n", encoding="utf-8")
    code, _, err = run(capsys, "translate", str(path), "--to", "action")
    assert code == 2
    assert "exactly one EVENT block" in err
    code, _, err = run(capsys, "translate", str(path), "--to", "transformer")
    assert code == 2
    assert "needs an ACTION block" in err


# -- prove ---------------------------------------------------------------------------

def test_prove_vacuous(capsys):
    code, out, _ = run(capsys, "prove", "--count", "0")
    assert code == 0
    assert "all checks passed" in out
    assert out.count("0 instances, 0 failures") == 3


def test_prove_small(capsys):
    code, out, _ = run(capsys, "prove", "--count", "10", "--seed", "3")
    assert code == 0
    for part in ("event", "action", "roundtrip"):
        assert f"part {part}: 10 instances, 0 failures" in out
    assert out.strip().endswith("all checks passed")


# -- entry point ----------------------------------------------------------------------

def test_module_entry_point():
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "symdel.cli",
            "check",
            str(SCENARIOS / "coin_flip.scn"),
        ],
        capture_output=True,
        text=True,
        cwd=ROOT,
    )
    assert result.returncode == 0
    assert "check [a] p = false [ok]" in result.stdout
