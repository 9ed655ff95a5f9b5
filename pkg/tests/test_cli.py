import csv
import filecmp
import json
import os
import shutil
import subprocess
import sys

import pytest

from conftest import GOLDEN, brute_force_front, grid_points, write_csv
from eqladder.cli import main
from eqladder.ingest import build_corpus, dump_corpus, load_corpus
from eqladder.interp import sample_curves
from eqladder.serialize import load_ladder_dir

REGEN = os.environ.get("EQLADDER_REGEN_GOLDEN") == "1"
GOLDEN_FILES = ("ladders.csv", "composition.csv", "fronts.csv", "eval/table1.csv",
                "eval/mean_ladders.csv")
HEADER = ["sequence_id", "resolution_height", "crf", "bitrate_kbps", "vmaf", "decode_energy_j"]


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def grid_csv(tmp_path):
    path = tmp_path / "grid.csv"
    path.write_text(dump_corpus(build_corpus(grid_points()), "csv"))
    return path


def tree(root):
    out = {}
    for dirpath, _, files in os.walk(root):
        for f in files:
            full = os.path.join(dirpath, f)
            with open(full, "rb") as fh:
                out[os.path.relpath(full, root)] = fh.read()
    return out


def test_synth(tmp_path):
    out = tmp_path / "corpus.csv"
    assert run("synth", "--sequences", 2, "--seed", 9, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 3 * 5 and set(rows[0]) >= set(HEADER)
    again = tmp_path / "again.csv"
    run("synth", "--sequences", 2, "--seed", 9, "--out", again)
    assert out.read_bytes() == again.read_bytes()
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"sequence_count": 2, "rng_seed": 9}))
    from_spec = tmp_path / "from_spec.csv"
    assert run("synth", "--spec", spec, "--out", from_spec) == 0
    assert from_spec.read_bytes() == out.read_bytes()
    assert run("synth", "--out", tmp_path / "c.json", "--sequences", 1) == 0
    assert json.loads((tmp_path / "c.json").read_text())


def test_synth_missing_spec(tmp_path, capsys):
    assert run("synth", "--spec", tmp_path / "missing.json", "--out", tmp_path / "x.csv") == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and "missing.json" in err[0]
    assert err[0].startswith("eqladder: error: ParseError:")


def test_ingest_check(grid_csv, tmp_path, capsys):
    assert run("ingest-check", grid_csv, "--out", tmp_path / "sum") == 0
    assert capsys.readouterr().out.startswith("ok: 3 sequences, 45 points")
    rows = list(csv.DictReader((tmp_path / "sum" / "summary.csv").open()))
    assert [int(r["resolution_height"]) for r in rows] == [720, 1080, 2160]


def test_curves(grid_csv, tmp_path):
    out = tmp_path / "curves.csv"
    assert run("curves", grid_csv, "--step", 1, "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 3 * 3 * 41
    assert sum(int(r["is_knot"]) for r in rows) == 45


def test_ladders_layout(grid_csv, tmp_path):
    out = tmp_path / "out"
    assert run("ladders", grid_csv, "--out", out) == 0
    names = sorted(os.listdir(out / "ladders"))
    assert len(names) == 12
    assert "seqA__rate_driven__EQ.json" in names
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["created"] is None and manifest["command"] == "ladders"
    assert set(manifest["outputs"]) == set(tree(out)) - {"manifest.json"}


def test_golden_outputs(tmp_path):
    corpus = tmp_path / "synth.csv"
    run("synth", "--sequences", 3, "--seed", 7, "--out", corpus)
    out = tmp_path / "out"
    assert run("report", corpus, "--out", out) == 0
    # oracle check first: the written fronts are exactly what brute force keeps
    # on the unrounded samples
    ladders = load_ladder_dir(out)
    assert len(ladders) == 4 and all(len(v) == 3 for v in ladders.values())
    fronts = list(csv.DictReader((out / "fronts.csv").open()))
    samples = sample_curves(load_corpus(corpus))
    for sid in ("synth_0", "synth_1", "synth_2"):
        pool = [p for c in samples if c.sequence_id == sid for p in c.samples]
        for dom, cost in (("RQ", "bitrate"), ("EQ", "decode_energy")):
            keep = brute_force_front([getattr(p, cost) for p in pool], [p.quality for p in pool],
                                     [p.resolution_height for p in pool], [p.crf for p in pool])
            want = {(p.resolution_height, round(p.crf, 6)) for p, k in zip(pool, keep) if k}
            got = {(int(r["resolution_height"]), round(float(r["crf"]), 6))
                   for r in fronts if r["sequence_id"] == sid and r["domain"] == dom}
            assert got == want
    if REGEN:
        for name in GOLDEN_FILES:
            dest = os.path.join(GOLDEN, name)
            os.makedirs(os.path.dirname(dest), exist_ok=True)
            shutil.copyfile(out / name, dest)
    for name in GOLDEN_FILES:
        assert filecmp.cmp(out / name, os.path.join(GOLDEN, name), shallow=False), name


def test_one_resolution_corpus(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text(dump_corpus(build_corpus(grid_points(heights=(1080,))), "csv"))
    assert run("ladders", path, "--out", tmp_path / "o") == 0
    comp = list(csv.DictReader((tmp_path / "o" / "composition.csv").open()))
    assert {float(r["share"]) for r in comp} == {1.0}


def test_eval_self_and_fixture(tmp_path, grid_csv):
    synth = tmp_path / "synth.csv"
    run("synth", "--sequences", 4, "--seed", 7, "--out", synth)
    run("ladders", synth, "--out", tmp_path / "lad")
    assert run("eval", tmp_path / "lad", "--reference-dir", tmp_path / "lad",
               "--out", tmp_path / "self") == 0
    for row in csv.DictReader((tmp_path / "self" / "table1.csv").open()):
        assert all(float(row[k]) == 0.0 for k in row if k != "ladder")
    assert run("eval", tmp_path / "lad", "--out", tmp_path / "ev") == 0
    for row in csv.DictReader((tmp_path / "ev" / "table1.csv").open()):
        assert float(row["delta_e_mean"]) > 0
    for panel in ("rq", "eq", "re"):
        assert (tmp_path / "ev" / f"plot_{panel}.csv").exists()

    one = tmp_path / "one.csv"
    run("synth", "--sequences", 1, "--out", one)
    run("ladders", one, "--out", tmp_path / "lad1")
    run("eval", tmp_path / "lad1", "--out", tmp_path / "ev1")
    for row in csv.DictReader((tmp_path / "ev1" / "table1.csv").open()):
        assert float(row["delta_e_std"]) == 0.0


def test_report_prints_summary(tmp_path, capsys):
    synth = tmp_path / "synth.csv"
    run("synth", "--sequences", 2, "--out", synth)
    assert run("report", synth, "--out", tmp_path / "r") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("Rate-driven EQ-PF: delta_rate")
    assert lines[1].startswith("Quality-driven EQ-PF:")


def test_config_precedence(grid_csv, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rate_band": 0.2, "q_band": 3}))
    run("ladders", grid_csv, "--config", cfg, "--q-band", 4, "--out", tmp_path / "o")
    config = json.loads((tmp_path / "o" / "manifest.json").read_text())["config"]
    assert config["rate_band"] == 0.2 and config["quality_band"] == 4.0


def test_determinism_and_jobs(grid_csv, tmp_path):
    for name, jobs in (("a", 1), ("b", 1), ("c", 2)):
        assert run("report", grid_csv, "--jobs", jobs, "--out", tmp_path / name) == 0
    a, b, c = (tree(tmp_path / n) for n in "abc")
    assert a == b
    # the job count changes scheduling only, never the bytes written
    assert a == c
    manifest = json.loads(a["manifest.json"])
    assert manifest["inputs"][0]["name"] == "grid.csv" and len(manifest["inputs"][0]["sha256"]) == 64
    assert json.loads(a["eval/manifest.json"])["inputs"][0]["kind"] == "ladder_dir"


def test_record_time(grid_csv, tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    run("ladders", grid_csv, "--out", tmp_path / "o")
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["created"].startswith("1970-01-01")
    monkeypatch.delenv("SOURCE_DATE_EPOCH")
    run("ladders", grid_csv, "--record-time", "--out", tmp_path / "p")
    assert json.loads((tmp_path / "p" / "manifest.json").read_text())["created"]


def _error(capsys, argv):
    code = run(*argv)
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("eqladder: error: ")
    return code, err[0]


def test_error_codes(tmp_path, capsys, grid_csv):
    pts = grid_points()
    hole = write_csv(tmp_path / "hole.csv", HEADER,
                     [(p.sequence_id, p.resolution_height, p.crf, p.bitrate, p.quality, p.decode_energy)
                      for p in pts if not (p.sequence_id == "seqA" and p.resolution_height == 720
                                           and p.crf == 50)])
    dup = write_csv(tmp_path / "dup.csv", HEADER,
                    [(p.sequence_id, p.resolution_height, p.crf, p.bitrate, p.quality, p.decode_energy)
                     for p in pts + pts[:1]])
    zero = write_csv(tmp_path / "zero.csv", HEADER,
                     [(p.sequence_id, p.resolution_height, p.crf, 0 if i == 0 else p.bitrate,
                       p.quality, p.decode_energy) for i, p in enumerate(pts)])
    empty = write_csv(tmp_path / "empty.csv", HEADER, [])
    run("ladders", grid_csv, "--out", tmp_path / "lad")
    other = tmp_path / "other.csv"
    run("synth", "--sequences", 1, "--out", other)
    run("ladders", other, "--out", tmp_path / "lad2")

    cases = {
        "missing": (["ladders", tmp_path / "nope.csv", "--out", tmp_path / "o"], 2, "ParseError"),
        "config": (["ladders", grid_csv, "--rate-band", 2, "--out", tmp_path / "o"], 2, "InvalidConfig"),
        "hole": (["ladders", hole, "--out", tmp_path / "o"], 4, "IncompleteGrid"),
        "dup": (["ingest-check", dup], 5, "DuplicateKey"),
        "zero": (["ingest-check", zero], 6, "NonPositiveValue"),
        "empty": (["ingest-check", empty], 7, "EmptyCorpus"),
        "disjoint": (["eval", tmp_path / "lad", "--reference-dir", tmp_path / "lad2",
                      "--out", tmp_path / "o"], 3, "EmptyIntersection"),
    }
    for key, (argv, code, kind) in cases.items():
        got, line = _error(capsys, argv)
        assert (got, kind in line) == (code, True), key
    _, line = _error(capsys, cases["hole"][0])
    assert "seqA, 720, crf=50" in line


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "eqladder", "synth", "--sequences", "1",
                           "--out", str(tmp_path / "c.csv")], capture_output=True, text=True)
    assert proc.returncode == 0 and (tmp_path / "c.csv").exists()
    proc = subprocess.run([sys.executable, "-m", "eqladder", "--version"],
                          capture_output=True, text=True)
    assert proc.stdout.strip() == "eqladder 0.1.0"
