"""CLI contract: the analyze fixtures, exit codes, and report determinism."""

import json
import re

import mto1.cli as cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_f5_paper_example(capsys):
    code, out, _ = run_cli(capsys, "analyze", "5^1", "0,1,0,1")
    assert code == 0
    assert "m=3" in out and "verdict=True" in out
    assert "['1', '4']" in out


def test_analyze_f7_star(capsys):
    code, out, _ = run_cli(capsys, "analyze", "7^1", "0,0,1", "--star")
    assert code == 0
    assert "m=2" in out and "verdict=True" in out and "exceptional=[]" in out


def test_analyze_constant_f4(capsys):
    code, out, _ = run_cli(capsys, "analyze", "2^2", "1")
    assert code == 0
    assert "m=4" in out and "verdict=True" in out


def test_analyze_json_shape(capsys):
    code, out, _ = run_cli(capsys, "analyze", "5^1", "0,1,0,1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["histogram"] == [1, 1, 3]
    assert payload["admissible_m"] == [3]
    assert payload["reports"][0]["exceptional_set"] == ["1", "4"]


def test_parse_failures_exit_2(capsys):
    assert run_cli(capsys, "analyze", "nonsense", "1,1")[0] == 2
    assert run_cli(capsys, "analyze", "5^1", "1,x,2")[0] == 2
    assert run_cli(capsys, "analyze", "4^1", "1,1")[0] == 2


def test_scale_exit_3(capsys):
    assert run_cli(capsys, "analyze", "2^17", "1,1")[0] == 3


def test_budget_exit_4(capsys):
    code, _, err = run_cli(capsys, "search", "29^1", "--s", "4", "--deg", "5",
                           "--m", "12", "--budget", "1000")
    assert code == 4
    assert "budget" in err


def test_search_small_and_verified(capsys):
    code, out, _ = run_cli(capsys, "search", "13^1", "--s", "4", "--deg", "2",
                           "--m", "3", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["count"] > 0
    assert all(hit["verified"] for hit in payload["hits"])


def test_search_out_of_range_m_is_empty(capsys):
    # m > ell * m1 for every r: no admissible r, empty hit list
    code, out, _ = run_cli(capsys, "search", "13^1", "--s", "12", "--deg", "1",
                           "--m", "5", "--json")
    assert code == 0
    assert json.loads(out)["count"] == 0


def test_count_cli(capsys):
    code, out, _ = run_cli(capsys, "count", "--q", "2..4", "--check")
    assert code == 0
    assert "q=3 m=2 count=18" in out


def test_verify_exit_zero_and_summary(capsys):
    code, out, _ = run_cli(capsys, "verify", "count", "--q", "2..4")
    assert code == 0
    assert "disagreements=0" in out


def test_verify_exit_one_on_disagreement(monkeypatch, capsys):
    fake = {"family": "count", "options": {}, "seed": 0,
            "summary": {"total": 1, "agreements": 0, "disagreements": 1,
                        "skipped": 0},
            "records": [{"evaluator": "count", "params": {"q": 2, "m": 1},
                         "predicted": 2, "observed": 3, "agree": False,
                         "skipped": None, "exceptional_set": None,
                         "elapsed": 0.0}],
            "elapsed": 0.0}
    monkeypatch.setattr(cli, "run_job", lambda job: fake)
    code, out, _ = run_cli(capsys, "verify", "count")
    assert code == 1
    assert "DISAGREEMENT" in out


def _strip_elapsed(text):
    return re.sub(r'"elapsed": [0-9.e+-]+', '"elapsed": X', text)


def test_verify_reports_byte_identical(tmp_path, capsys):
    args = ["verify", "g5", "--n", "1..3", "--jobs", "1", "--json"]
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert _strip_elapsed(out1) == _strip_elapsed(out2)
    # parallel run agrees with the serial one as well
    code3, out3, _ = run_cli(capsys, "verify", "g5", "--n", "1..3",
                             "--jobs", "2", "--json")
    assert code3 == 0
    assert _strip_elapsed(out1) == _strip_elapsed(out3)


def test_verify_csv_and_out(tmp_path, capsys):
    out_path = tmp_path / "report.json"
    csv_path = tmp_path / "report.csv"
    code, _, _ = run_cli(capsys, "verify", "count", "--q", "2..3",
                         "--out", str(out_path), "--csv", str(csv_path))
    assert code == 0
    saved = json.loads(out_path.read_text())
    assert saved["summary"]["disagreements"] == 0
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0].startswith("evaluator,")
    assert len(lines) == saved["summary"]["total"] + 1


def test_analyze_with_explicit_m(capsys):
    code, out, _ = run_cli(capsys, "analyze", "5^1", "0,1,0,1", "--m", "2")
    assert code == 0
    assert "m=2" in out and "verdict=False" in out


def test_flag_aliases_match_positionals(capsys):
    _, out1, _ = run_cli(capsys, "analyze", "5^1", "0,1,0,1", "--json")
    _, out2, _ = run_cli(capsys, "analyze", "--field", "5^1",
                         "--poly", "0,1,0,1", "--json")
    assert out1 == out2
    assert run_cli(capsys, "analyze", "--poly", "0,1")[0] == 2  # no field
    code, out3, _ = run_cli(capsys, "verify", "--family", "count",
                            "--grid", "qs=2,3")
    assert code == 0 and "disagreements=0" in out3
