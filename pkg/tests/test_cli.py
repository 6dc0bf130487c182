"""Command-line behavior: golden trace, determinism, undo, props report."""
import json
import subprocess
import sys

import pytest

from rsx.cli import main
from rsx.properties import CheckReport

INT_EXCHANGE = ("proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}\n"
                "| proc[]{ a(y:?int.end). y?(z). 0 } store{}\n")
CANON_INITIAL = ("proc[]{ a(y:?int.end). y?(z). 0 } store{} | "
                 "proc[]{ ~a(x:!int.end). x!<5>. 0 } store{}")


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("RSX_COLOR", "never")


@pytest.fixture
def intx(tmp_path):
    f = tmp_path / "intx.rsx"
    f.write_text(INT_EXCHANGE)
    return f


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_prints_canonical_form(capsys, intx):
    code, out, err = run_cli(capsys, "check", str(intx))
    assert code == 0
    assert out.strip() == CANON_INITIAL


def test_check_nil(capsys, tmp_path):
    f = tmp_path / "nil.rsx"
    f.write_text("0\n")
    code, out, _ = run_cli(capsys, "check", str(f))
    assert code == 0
    assert out.strip() == "0"


def test_check_rejects_bad_input(capsys, tmp_path):
    f = tmp_path / "bad.rsx"
    f.write_text("proc[]{ oops }")
    code, out, err = run_cli(capsys, "check", str(f))
    assert code == 1
    assert "error" in err


def test_run_golden_trace(capsys, intx, tmp_path):
    out_file = tmp_path / "trace.jsonl"
    code, out, _ = run_cli(capsys, "run", str(intx), "--steps", "10",
                           "--out", str(out_file))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "[0] init"
    assert lines[2] == "[1] forward Open {s0,~s0;a}"
    assert lines[4] == "[2] forward Com {s0,~s0}"
    assert lines[6] == "stuck after 2 steps: no forward redex applies"
    records = [json.loads(l) for l in out_file.read_text().splitlines()]
    assert [r["rule"] for r in records] == [None, "Open", "Com"]
    assert records[0]["config"] == CANON_INITIAL


def test_run_deterministic(capsys, intx):
    _, out1, _ = run_cli(capsys, "run", str(intx), "--steps", "10")
    _, out2, _ = run_cli(capsys, "run", str(intx), "--steps", "10")
    assert out1 == out2


def test_random_policy_deterministic_in_seed(capsys, intx):
    _, out1, _ = run_cli(capsys, "run", str(intx), "--policy", "random",
                         "--seed", "3")
    _, out2, _ = run_cli(capsys, "run", str(intx), "--policy", "random",
                         "--seed", "3")
    assert out1 == out2


def test_undo_returns_to_initial_byte_identical(capsys, intx, tmp_path):
    out_file = tmp_path / "trace.jsonl"
    run_cli(capsys, "run", str(intx), "--steps", "10", "--out", str(out_file))
    records = [json.loads(l) for l in out_file.read_text().splitlines()]
    final = tmp_path / "final.rsx"
    final.write_text(records[-1]["config"] + "\n")
    undo_out = tmp_path / "undo.jsonl"
    code, out, _ = run_cli(capsys, "undo", str(final), "--steps", "10",
                           "--out", str(undo_out))
    assert code == 0
    undo_records = [json.loads(l) for l in undo_out.read_text().splitlines()]
    assert [r["rule"] for r in undo_records] == [None, "ComU", "OpenU"]
    assert undo_records[-1]["config"] == CANON_INITIAL


def test_run_k_then_undo_k_for_every_prefix(capsys, intx, tmp_path):
    out_file = tmp_path / "trace.jsonl"
    run_cli(capsys, "run", str(intx), "--steps", "10", "--out", str(out_file))
    records = [json.loads(l) for l in out_file.read_text().splitlines()]
    for k, rec in enumerate(records):
        stage = tmp_path / f"stage{k}.rsx"
        stage.write_text(rec["config"] + "\n")
        undo_out = tmp_path / f"undo{k}.jsonl"
        run_cli(capsys, "undo", str(stage), "--steps", str(k),
                "--out", str(undo_out))
        back = [json.loads(l) for l in undo_out.read_text().splitlines()]
        assert back[-1]["config"] == CANON_INITIAL


def test_trace_replays_byte_for_byte(capsys, intx, tmp_path):
    out_file = tmp_path / "trace.jsonl"
    run_cli(capsys, "run", str(intx), "--steps", "10", "--out", str(out_file))
    records = [json.loads(l) for l in out_file.read_text().splitlines()]
    start = tmp_path / "start.rsx"
    start.write_text(records[0]["config"] + "\n")
    re_out = tmp_path / "re.jsonl"
    run_cli(capsys, "run", str(start), "--steps", "10", "--out", str(re_out))
    re_records = [json.loads(l) for l in re_out.read_text().splitlines()]
    assert [r["config"] for r in re_records] == [r["config"] for r in records]


def test_replay_command(capsys, intx, tmp_path):
    out_file = tmp_path / "trace.jsonl"
    run_cli(capsys, "run", str(intx), "--steps", "10", "--out", str(out_file))
    records = [json.loads(l) for l in out_file.read_text().splitlines()]
    from rsx.semantics import enumerate_forward
    from rsx.surface import parse_config
    m = parse_config(INT_EXCHANGE)
    k1 = enumerate_forward(m)[0].key
    code, out, _ = run_cli(capsys, "replay", str(intx), "--keys", k1)
    assert code == 0
    assert out.strip() == records[1]["config"]


def test_props_small_corpus(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "props", "--corpus", "4", "--processes", "4",
                           "--depth", "2", "--budget", "500",
                           "--out", str(report))
    assert code == 0
    assert "loop: PASS" in out and "square: PASS" in out and "causal: PASS" in out
    data = json.loads(report.read_text())
    assert {d["check"] for d in data} == {"loop", "square", "causal"}
    for d in data:
        assert set(d) == {"check", "nodes", "edges", "violations"}
        assert d["violations"] == []


def test_props_exit_code_on_violation(capsys, monkeypatch):
    def fake_check_loop(graph):
        return CheckReport("loop", 1, 0, [{"node": "0", "redexes": [],
                                           "witness_trace": []}])
    monkeypatch.setattr("rsx.cli.check_loop", fake_check_loop)
    code, out, _ = run_cli(capsys, "props", "--corpus", "1", "--budget", "50")
    assert code == 2
    assert "loop: FAIL" in out


def test_module_entry_point(intx):
    proc = subprocess.run([sys.executable, "-m", "rsx", "check", str(intx)],
                          capture_output=True, text=True,
                          env={"PATH": "", "RSX_COLOR": "never"})
    assert proc.returncode == 0
    assert proc.stdout.strip() == CANON_INITIAL


def test_no_ansi_codes_when_color_never(capsys, intx):
    _, out, _ = run_cli(capsys, "run", str(intx), "--steps", "2")
    assert "\x1b[" not in out
