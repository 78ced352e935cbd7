import io
import json
import re

import pytest

from lefschetz import cli
from lefschetz.fibration import parse_fibration


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bundled_fixtures_listed():
    assert cli.bundled_fixtures() == ["genus2_chain30.fib", "genus2_chain40.fib",
                                      "genus2_hyp20.fib", "trivial_g2.fib"]


def test_analyze_k3_piece(capsys):
    code, out, _ = run(["analyze", "genus2_chain30.fib", "--json"], capsys)
    d = json.loads(out)
    assert code == 0
    assert (d["e"], d["sigma"], d["sigma_plus_e"], d["b1"], d["k"]) == (26, -18, 8, 0, 1)
    assert d["fill"] == {"V": 4, "E": 8, "R": 2, "fills": True}
    assert d["split_scan"] == []
    assert len(d["sections"]) <= d["R"]
    assert all(s["self_intersection"] <= 0 for s in d["sections"])


def test_plain_and_json_agree(capsys):
    _, js, _ = run(["analyze", "genus2_hyp20.fib", "--json"], capsys)
    _, plain, _ = run(["analyze", "genus2_hyp20.fib"], capsys)
    d = json.loads(js)
    for key in ("e", "sigma", "sigma_plus_e", "b1", "k", "R"):
        assert re.search(rf"^{key}: {d[key]}$", plain, re.M)


def test_validate_trivial(capsys):
    code, out, _ = run(["validate", "trivial_g2.fib", "--json"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["trivial"] and d["k"] == 0


def test_validate_from_stdin_and_invalid_exit(capsys, monkeypatch):
    code, out, _ = run(["validate", "-", "--json"], capsys, "genus 2\ncycle c1\n", monkeypatch)
    assert code == cli.EXIT_INVALID
    assert json.loads(out)["trivial"] is False


def test_unknown_curve_is_usage_error(capsys, monkeypatch):
    code, _, err = run(["validate"], capsys, "genus 2\ncycle c9\n", monkeypatch)
    assert code == cli.EXIT_USAGE
    assert "unknown curve id" in err and "line 2" in err


def test_bad_command_and_missing_file(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == cli.EXIT_USAGE
    code, _, err = run(["validate", "no_such.fib"], capsys)
    assert code == cli.EXIT_USAGE and "no such file" in err


def test_samples_floor(capsys):
    code, _, _ = run(["sections", "genus2_chain30.fib", "--samples", "50"], capsys)
    assert code == cli.EXIT_USAGE


def test_fibresum_pipeline(capsys, monkeypatch, tmp_path):
    code, out, _ = run(["fibresum"] + ["genus2_chain30.fib"] * 4, capsys)
    assert code == 0
    f = parse_fibration(out)
    assert f.n == 120
    code, out, _ = run(["sections", "-", "--json"], capsys, out, monkeypatch)
    d = json.loads(out)
    assert code == 0
    assert {s["self_intersection"] for s in d["sections"] if s["section"]} == {-4}


def test_hurwitz_is_deterministic(capsys):
    _, a, _ = run(["hurwitz", "genus2_hyp20.fib", "--depth", "5", "--seed", "7"], capsys)
    _, b, _ = run(["hurwitz", "genus2_hyp20.fib", "--depth", "5", "--seed", "7"], capsys)
    assert a == b and parse_fibration(a).n == 20


def test_fill_dump(capsys):
    code, out, _ = run(["fill", "genus2_chain30.fib", "--dump"], capsys)
    assert code == 0 and "region 0 basepoint" in out


def test_split_scan_detects_concatenation(capsys, monkeypatch):
    _, two, _ = run(["fibresum", "genus2_chain30.fib", "genus2_chain30.fib"], capsys)
    code, out, _ = run(["split-scan", "--json"], capsys, two, monkeypatch)
    assert code == 0 and 30 in json.loads(out)["splits"]


def test_shear(capsys, tmp_path):
    csv = tmp_path / "map.csv"
    code, out, _ = run(["shear", "genus2_chain30.fib", "--json", "--csv", str(csv)], capsys)
    d = json.loads(out)
    assert code == 0
    assert all(r["rotation"] == 1 and r["one_signed_lifts"] for r in d["regions"])
    assert csv.read_text().startswith("angle_in,angle_out")


def test_length_report(capsys):
    code, out, _ = run(["length", "genus2_chain30.fib", "--depth", "0", "--json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["orbit_visited"] == 1 and d["value"] > 0
    assert len(d["minimizer"]["lengths"]) == 3
