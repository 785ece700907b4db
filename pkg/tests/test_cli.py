import csv
import json
import re
import subprocess
import sys

import pytest

from ellipseperc import cli
from ellipseperc.montecarlo import CSV_FIELDS, EventParams, estimate
from ellipseperc.laws import AxisLaw
from ellipseperc.sampling import Configuration, sample_hitting_process
from ellipseperc.geometry import BoxSpec


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_sample_roundtrip(tmp_path):
    out = tmp_path / "cfg.json"
    assert cli.run(["sample", "--alpha", "2", "--u", "0.3", "--l", "20", "--k", "1", "--seed", "7",
                    "--out", str(out)]) == 0
    text = out.read_text()
    cfg = Configuration.from_json(text)
    assert cfg.to_json() == text
    direct = sample_hitting_process(BoxSpec(20.0), 0.3, AxisLaw.pareto(2.0), seed=7)
    assert direct.same_as(cfg)


def test_sample_truncated(tmp_path):
    out = tmp_path / "t.json"
    assert cli.run(["sample", "--alpha", "0.8", "--u", "0.1", "--l", "4", "--trunc-radius", "40",
                    "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["truncation"]["mode"] == "truncated" and d["truncation"]["radius"] == 40.0


def test_estimate_vacant_lr(tmp_path):
    out = tmp_path / "est.csv"
    assert cli.run(["estimate", "--event", "vacant_lr", "--alpha", "2", "--u", "0.1", "--l", "64", "--k", "2",
                    "--n", "2000", "--seed", "1", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 1 and list(rows[0]) == CSV_FIELDS
    assert 0 < float(rows[0]["phat"]) < 1


def test_estimate_json(tmp_path):
    out = tmp_path / "est.json"
    assert cli.run(["estimate", "--event", "point_covered", "--alpha", "3", "--u", "0.5", "--n", "50",
                    "--out", str(out)]) == 0
    (row,) = json.loads(out.read_text())
    assert list(row) == CSV_FIELDS


def test_recursion_report(tmp_path):
    out = tmp_path / "rec.json"
    assert cli.run(["recursion", "--alpha", "3", "--c7", "2", "--kmax", "200", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["epsilon"] == 2.0 and d["k0"] == 12 and d["pass"] is True
    assert d["u0"] == pytest.approx(1.887567272139549e-35)


def test_render(tmp_path):
    empty = Configuration(BoxSpec(4.0), 0.0, AxisLaw.pareto(2.0), "ellipse", [], [], [], [])
    (tmp_path / "e.json").write_text(empty.to_json())
    assert cli.run(["render", "--config", str(tmp_path / "e.json"), "--out", str(tmp_path / "e.svg")]) == 0
    svg = (tmp_path / "e.svg").read_text()
    assert svg.count("<rect") == 1 and "<ellipse" not in svg and 'version="1.1"' in svg
    one = Configuration(BoxSpec(4.0), 1.0, AxisLaw.pareto(2.0), "ellipse", [0.0], [0.0], [2.0], [0.0])
    (tmp_path / "o.json").write_text(one.to_json())
    assert cli.run(["render", "--config", str(tmp_path / "o.json"), "--out", str(tmp_path / "o.svg")]) == 0
    els = re.findall(r"<ellipse [^>]*>", (tmp_path / "o.svg").read_text())
    assert len(els) == 1
    assert 'rx="2.0"' in els[0] and 'ry="1.0"' in els[0] and "rotate(0.0 " in els[0]


def test_render_is_valid_xml(tmp_path):
    import xml.etree.ElementTree as ET
    cfg = sample_hitting_process(BoxSpec(30.0), 0.5, AxisLaw.pareto(2.0), seed=3)
    (tmp_path / "c.json").write_text(cfg.to_json())
    for name in ("a.svg", "b.svg"):
        assert cli.run(["render", "--config", str(tmp_path / "c.json"), "--out", str(tmp_path / name)]) == 0
    a = (tmp_path / "a.svg").read_bytes()
    assert a == (tmp_path / "b.svg").read_bytes()
    root = ET.fromstring(a)
    assert len(root.findall(".//{http://www.w3.org/2000/svg}ellipse")) == len(cfg)


def test_render_bad_config(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    assert cli.run(["render", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "x.svg")]) == 2
    assert cli.run(["render", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x.svg")]) == 2


def test_scan_single_point_matches_estimate(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.run(["scan", "--event", "covered_lr", "--alpha", "2", "--u", "0.1", "--l", "8", "--n", "200",
                    "--seed", "5", "--out", str(out)]) == 0
    (row,) = _rows(out)
    want = estimate("covered_lr", EventParams(AxisLaw.pareto(2.0), 0.1, l=8.0), 200, 5).row()
    assert {k: row[k] for k in CSV_FIELDS} == want and row["error"] == ""


def test_scan_zero_intensity_and_order(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.run(["scan", "--event", "covered_tb", "--alpha", "3,2", "--u", "0", "--l", "4,8", "--k", "1,2",
                    "--n", "20", "--seed", "10", "--out", str(out)]) == 0
    rows = _rows(out)
    assert len(rows) == 8 and all(r["phat"] == "0.0" for r in rows)
    assert [r["seed"] for r in rows] == [str(10 + i) for i in range(8)]
    keys = [(r["alpha"], r["l"], r["k"]) for r in rows]
    assert keys == [(a, l, k) for a in ("3.0", "2.0") for l in ("4.0", "8.0") for k in ("1.0", "2.0")]


def test_scan_records_row_errors(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.run(["scan", "--event", "covered_lr", "--alpha", "0.8,2", "--u", "0.05", "--l", "4", "--n", "10",
                    "--out", str(out)]) == 0
    bad, good = _rows(out)
    assert "InfiniteIntensity" in bad["error"] or "alpha" in bad["error"]
    assert bad["phat"] == "" and good["error"] == "" and good["phat"] != ""


def test_scan_exponent_pattern(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.run(["scan", "--event", "covered_lr", "--alpha", "1.5,2,3", "--u", "0.02", "--l", "16,64,256",
                    "--n", "1000", "--seed", "1", "--out", str(out)]) == 0
    rows = _rows(out)
    by = {}
    for r in rows:
        by.setdefault(r["alpha"], []).append((float(r["phat"]), float(r["ci_lo"]), float(r["ci_hi"])))
    up = by["1.5"]
    assert all(b[1] > a[2] for a, b in zip(up, up[1:]))
    flat = by["2.0"]
    assert all(x[1] <= y[2] and y[1] <= x[2] for x in flat for y in flat)
    down = by["3.0"]
    assert down[-1][0] <= down[0][0] and down[-1][2] < flat[-1][1]


def test_lln_corr_fractal_removal(tmp_path):
    assert cli.run(["lln", "--alpha", "0.5", "--u", "1", "--eps", "0.1", "--n-list", "8,16", "--reps", "20",
                    "--out", str(tmp_path / "l.csv")]) == 0
    lines = (tmp_path / "l.csv").read_text().splitlines()
    assert lines[0] == "n,mean,variance" and len(lines) == 3
    assert cli.run(["corr", "--event-a", "point_covered", "--event-b", "point_covered", "--alpha", "3", "--u", "0.3",
                    "--point-b", "2,0", "--n", "200", "--out", str(tmp_path / "c.json")]) == 0
    d = json.loads((tmp_path / "c.json").read_text())
    assert d["ci"][0] <= d["cov"] <= d["ci"][1] and d["params_b"]["point"] == [2.0, 0.0]
    assert cli.run(["fractal", "--p", "1", "--depth", "3", "--n", "5", "--out", str(tmp_path / "f.json")]) == 0
    assert json.loads((tmp_path / "f.json").read_text())["phat"] == 1.0
    assert cli.run(["removal", "--alpha", "2", "--u", "0.3", "--l", "8", "--out", str(tmp_path / "r.json")]) == 0
    d = json.loads((tmp_path / "r.json").read_text())
    assert [lv["interval"] for lv in d["levels"]] == [[2.0, 4.0], [1.0, 2.0]]
    assert d["structural_ok"] and d["coupling_ok"]


@pytest.mark.parametrize("argv, code", [
    (["estimate", "--event", "covered_lr", "--alpha", "2", "--u", "-1", "--l", "4", "--out", "x.csv"], 2),
    (["estimate", "--event", "bogus", "--alpha", "2", "--u", "1", "--l", "4", "--out", "x.csv"], 2),
    (["estimate", "--event", "covered_lr", "--alpha", "2", "--u", "1", "--l", "4"], 2),
    (["estimate", "--event", "covered_lr", "--u", "1", "--l", "4", "--out", "x.csv"], 2),
    (["estimate", "--event", "covered_lr", "--alpha", "2", "--u", "1", "--out", "x.csv"], 2),
    (["estimate", "--event", "covered_lr", "--alpha", "2", "--u", "1", "--l", "4", "--n", "0", "--out", "x.csv"], 2),
    (["estimate", "--event", "covered_lr", "--alpha", "0.8", "--u", "1", "--l", "4", "--out", "x.csv"], 3),
    (["estimate", "--event", "covered_lr", "--alpha", "1.5", "--u", "0.1", "--l", "4", "--trunc-radius", "8",
      "--out", "x.csv"], 2),
    (["recursion", "--alpha", "2", "--out", "x.json"], 2),
    (["removal", "--alpha", "2", "--u", "0.3", "--l", "1", "--out", "x.json"], 2),
    (["lln", "--law", "gauss:1", "--u", "1", "--n-list", "8", "--out", "x.csv"], 2),
    (["nosuch"], 2),
])
def test_exit_codes(tmp_path, monkeypatch, argv, code):
    monkeypatch.chdir(tmp_path)
    assert cli.run(argv) == code
    assert not (tmp_path / "x.csv").exists() or code == 0


SUBCOMMANDS = ["sample", "render", "estimate", "scan", "lln", "corr", "recursion", "fractal", "removal"]


@pytest.mark.parametrize("sub", SUBCOMMANDS)
def test_help_lists_every_flag(sub, capsys):
    assert cli.run([sub, "--help"]) == 0
    text = capsys.readouterr().out
    sp = cli.build_parser()._subparsers._group_actions[0].choices[sub]
    for action in sp._actions:
        for opt in action.option_strings:
            assert opt in text
        if action.option_strings and action.dest != "help":
            assert action.help
    if sub in ("estimate", "sample", "corr"):
        assert "length units" in text


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "ellipseperc.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "recursion" in res.stdout


def test_artifacts_byte_identical(tmp_path):
    cmds = [
        ["sample", "--alpha", "2", "--u", "0.3", "--l", "20", "--seed", "7", "--out", "{d}/cfg.json"],
        ["estimate", "--event", "vacant_lr", "--alpha", "2", "--u", "0.1", "--l", "16", "--k", "2", "--n", "100",
         "--out", "{d}/e.csv"],
        ["recursion", "--alpha", "3", "--out", "{d}/r.json"],
        ["removal", "--alpha", "2", "--u", "0.3", "--l", "16", "--seed", "3", "--out", "{d}/m.json"],
    ]
    outs = []
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        for c in cmds:
            assert cli.run([x.format(d=tmp_path / d) for x in c]) == 0
        outs.append({p.name: p.read_bytes() for p in (tmp_path / d).iterdir()})
    assert outs[0] == outs[1] and len(outs[0]) == 4
