"""Command-line behaviour: exit codes, output stability, report bundles."""

from __future__ import annotations

import json

import pytest

from mixsep.cli import run

from conftest import SAMPLES


def _sample(name: str) -> str:
    return str(SAMPLES / name)


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_ok(capsys):
    code, out, _ = _run(capsys, "parse", "--calculus", "pi",
                        _sample("p_star.pi"))
    assert code == 0
    assert "a!" in out


def test_parse_json_contains_size(capsys):
    code, out, _ = _run(capsys, "parse", "--calculus", "pi", "--json",
                        _sample("p_star.pi"))
    assert code == 0
    payload = json.loads(out)
    assert payload["size"] == 25 and payload["calculus"] == "pi"


def test_garbage_input_is_usage_error(capsys):
    code, _, err = _run(capsys, "parse", "--calculus", "pi",
                        _sample("garbage.txt"))
    assert code == 2
    assert "parse error" in err


def test_missing_file_is_usage_error(capsys):
    code, _, err = _run(capsys, "parse", "--calculus", "pi", "/no/such/file")
    assert code == 2


def test_unknown_flag_is_usage_error(capsys):
    assert _run(capsys, "parse", "--frobnicate", "x")[0] == 2
    assert _run(capsys, "frobnicate")[0] == 2


def test_steps_listing(capsys):
    code, out, _ = _run(capsys, "steps", "--calculus", "pi",
                        _sample("p_star.pi"))
    assert code == 0
    assert len([l for l in out.splitlines() if "communication" in l]) == 5


def test_graph_json_is_byte_identical(capsys):
    args = ("graph", "--calculus", "pi", "--json", _sample("p_star.pi"))
    code1, out1, _ = _run(capsys, *args)
    code2, out2, _ = _run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["truncated"] is False


def test_graph_truncation_is_inconclusive(capsys, tmp_path):
    f = tmp_path / "loop.pi"
    f.write_text("rep (tau.a!)\n")
    code, out, _ = _run(capsys, "graph", "--calculus", "pi",
                        "--max-states", "4", str(f))
    assert code == 3
    assert "truncated" in out


def test_graph_dot_output(capsys):
    code, out, _ = _run(capsys, "graph", "--calculus", "pi", "--dot",
                        _sample("p_star.pi"))
    assert code == 0
    assert out.startswith("digraph")


def test_graph_report_bundle(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, _, _ = _run(capsys, "graph", "--calculus", "pi",
                      "--report", str(out_dir), _sample("p_star.pi"))
    assert code == 0
    names = {p.name for p in out_dir.iterdir()}
    assert names == {"graph.json", "graph-states.csv",
                     "graph-edges.csv", "graph.png"}


def test_barbs(capsys):
    code, out, _ = _run(capsys, "barbs", "--calculus", "pi",
                        _sample("p_star_one_channel.pi"))
    assert code == 0
    assert "a!" in out and "a?" in out


def test_bisim_same_and_different(capsys, tmp_path):
    a = tmp_path / "a.pi"
    a.write_text("tau.tau.b!\n")
    b = tmp_path / "b.pi"
    b.write_text("tau.b!\n")
    c = tmp_path / "c.pi"
    c.write_text("c!\n")
    assert _run(capsys, "bisim", "--calculus", "pi", str(a), str(b))[0] == 0
    assert _run(capsys, "bisim", "--calculus", "pi", str(a), str(c))[0] == 1
    assert _run(capsys, "coupledsim", "--calculus", "pi",
                str(a), str(b))[0] == 0


def test_bisim_across_calculi(capsys, tmp_path):
    src = _sample("s_example.cmvp")
    enc = tmp_path / "enc.cmv"
    code, out, _ = _run(capsys, "encode", src)
    assert code == 0
    enc.write_text(out)
    code, _, _ = _run(capsys, "coupledsim", "--calculus", "cmv+",
                      "--calculus2", "cmv", src, str(enc))
    assert code == 0


def test_find_pattern_flags(capsys):
    assert _run(capsys, "find-pattern", "--calculus", "pi",
                _sample("p_star.pi"))[0] == 2
    assert _run(capsys, "find-pattern", "--star", "--calculus", "pi",
                _sample("p_star.pi"))[0] == 0
    assert _run(capsys, "find-pattern", "--m",
                _sample("p_m.cmvp"))[0] == 0
    assert _run(capsys, "find-pattern", "--star",
                _sample("p_m.cmvp"))[0] == 1


def test_find_pattern_json(capsys):
    code, out, _ = _run(capsys, "find-pattern", "--star", "--calculus", "pi",
                        "--json", _sample("p_star.pi"))
    assert code == 0
    w = json.loads(out)["witness"]
    assert w["kind"] == "star"
    assert len(w["steps"]) == 5 and len(w["conflicts"]) == 5


def test_electoral_exit_codes(capsys):
    assert _run(capsys, "electoral", _sample("le_pi.net"))[0] == 0
    assert _run(capsys, "electoral",
                _sample("ring_deterministic.cmvp.net"))[0] == 1


def test_electoral_json_and_report(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = _run(capsys, "electoral", "--json",
                        "--report", str(out_dir), _sample("le_pi.net"))
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "electoral"
    assert payload["executions"] == 10
    assert {p.name for p in out_dir.iterdir()} == {
        "electoral.json", "electoral.csv", "electoral.png"}


def test_correspondence_cli(capsys):
    code, out, _ = _run(capsys, "correspondence", _sample("s_example.cmvp"))
    assert code == 0
    assert "completeness: pass" in out


def test_campaign_cli(capsys, tmp_path):
    out_dir = tmp_path / "rep"
    code, out, _ = _run(capsys, "campaign", "no-star", "--budget", "11",
                        "--json", "--report", str(out_dir))
    assert code == 0
    payload = json.loads(out)
    assert payload["witnesses"] == [] and payload["checked"] > 0
    assert {p.name for p in out_dir.iterdir()} == {
        "campaign.json", "campaign.csv", "campaign.png"}


def test_campaign_witness_exit_code(capsys):
    code, out, _ = _run(capsys, "campaign", "no-star", "--calculus", "pi",
                        "--budget", "12", "--stop-after", "1", "--json")
    assert code == 1
    assert len(json.loads(out)["witnesses"]) == 1
