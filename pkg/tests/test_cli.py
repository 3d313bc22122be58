"""End-to-end command-line tests over a subprocess boundary.

Exit code contract: 0 success, 1 usage, 2 data, 3 internal failure.
"""

import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
TABLE_A = str(DATA / "table2a.csv")
TABLE_B = str(DATA / "table2b.csv")


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "chancekit", *args],
        capture_output=True, text=True, timeout=120,
    )


def run_json(*args):
    proc = run_cli(*args, "--format", "json")
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def test_version_flag():
    proc = run_cli("--version")
    assert proc.returncode == 0
    assert "chancekit" in proc.stdout


def test_evaluate_text_percent_rendering():
    proc = run_cli("evaluate", "--table", TABLE_A)
    assert proc.returncode == 0
    for token in ("19.85%", "23.68%", "21.68%"):
        assert token in proc.stdout


def test_evaluate_json_values_and_text_agreement():
    doc = run_json("evaluate", "--table", TABLE_A)
    metrics = doc["metrics"]
    assert metrics["multiclass"]["informedness"] == pytest.approx(0.198529411764706, rel=1e-12)
    assert metrics["dichotomous"]["recall"] == pytest.approx(0.823529411764706, rel=1e-12)
    assert doc["input"]["n"] == 100
    # text numerics are the JSON values rounded for display, not recomputed
    text = run_cli("evaluate", "--table", TABLE_A).stdout
    assert f"{metrics['multiclass']['informedness']:.6f}" in text
    assert f"{metrics['dichotomous']['kappa']:.6f}" in text


def test_evaluate_json_round_trips_losslessly():
    doc = run_json("evaluate", "--table", TABLE_A)
    again = json.loads(json.dumps(doc))
    assert again == doc


def test_evaluate_csv_format():
    proc = run_cli("evaluate", "--table", TABLE_A, "--format", "csv")
    assert proc.returncode == 0
    rows = list(csv.reader(io.StringIO(proc.stdout)))
    assert rows[0] == ["field", "value"]
    fields = {r[0]: r[1] for r in rows[1:]}
    assert float(fields["metrics.multiclass.informedness"]) == pytest.approx(0.1985294117647061)


def test_evaluate_three_class_has_no_dichotomous_section(tmp_path):
    p = tmp_path / "t3.csv"
    p.write_text("5,1,2\n1,7,1\n2,2,9\n")
    doc = run_json("evaluate", "--table", str(p))
    assert "multiclass" in doc["metrics"]
    assert "dichotomous" not in doc["metrics"]
    assert doc["input"]["k"] == 3


def test_evaluate_pairs_input(tmp_path):
    p = tmp_path / "pairs.tsv"
    p.write_text("a\ta\na\tb\nb\tb\nb\tb\n")
    doc = run_json("evaluate", "--pairs", str(p))
    assert doc["input"]["kind"] == "pairs"
    assert doc["input"]["n"] == 4


def test_usage_errors_exit_1(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3,4\n")
    both = run_cli("evaluate", "--table", str(p), "--pairs", str(p))
    neither = run_cli("evaluate")
    unknown = run_cli("evaluate", "--table", str(p), "--frobnicate")
    no_command = run_cli()
    for proc in (both, neither, unknown, no_command):
        assert proc.returncode == 1, proc.stderr


def test_data_errors_exit_2(tmp_path):
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    assert run_cli("evaluate", "--pairs", str(empty)).returncode == 2
    assert run_cli("evaluate", "--table", str(tmp_path / "missing.csv")).returncode == 2
    garbage = tmp_path / "garbage.csv"
    garbage.write_text("pears,apples\nnot,numbers\n")
    assert run_cli("evaluate", "--table", str(garbage)).returncode == 2


def test_zero_margin_exit_2_unless_repaired(tmp_path):
    p = tmp_path / "zm.csv"
    p.write_text("3,0\n5,0\n")
    failing = run_cli("evaluate", "--table", str(p))
    assert failing.returncode == 2
    assert "column" in failing.stderr
    repaired = run_cli("evaluate", "--table", str(p), "--repair-margins")
    assert repaired.returncode == 0


def test_significance_family_kb():
    doc = run_json("significance", "--table", TABLE_A, "--family", "kb")
    (report,) = doc["significance"]
    assert report["kind"] == "kb"
    assert report["value"] == pytest.approx(1.72, abs=0.005)
    assert report["significant"] is False


def test_significance_family_fisher_two_class():
    doc = run_json("significance", "--table", TABLE_A, "--family", "fisher")
    (report,) = doc["significance"]
    assert report["kind"] == "fisher_two"
    assert report["p_value"] < 0.05
    assert report["significant"] is True


def test_significance_family_full_independent_table(tmp_path):
    p = tmp_path / "indep.csv"
    p.write_text("8,2\n8,2\n")
    doc = run_json("significance", "--table", str(p), "--family", "full")
    chi2 = next(r for r in doc["significance"] if r["kind"] == "full_chi2")
    assert chi2["value"] == pytest.approx(0.0, abs=1e-12)
    assert chi2["p_value"] == pytest.approx(1.0, abs=1e-12)


def test_significance_family_all_includes_positive_and_families():
    doc = run_json("significance", "--table", TABLE_A)
    kinds = {r["kind"] for r in doc["significance"]}
    for expected in ("chi2_plus_p", "g2_plus_p", "kb", "km", "kbm",
                     "xb", "xm", "xbm", "conv_b", "conv_m", "conv_bm",
                     "full_chi2", "full_g2"):
        assert expected in kinds


def test_significance_seed_reproducibility(tmp_path):
    p = tmp_path / "t3.csv"
    p.write_text("5,1,2\n1,7,1\n2,2,9\n")
    doc1 = run_json("significance", "--table", str(p), "--family", "fisher",
                    "--fisher-samples", "2000", "--seed", "7")
    doc2 = run_json("significance", "--table", str(p), "--family", "fisher",
                    "--fisher-samples", "2000", "--seed", "7")
    assert doc1["seed"] == doc2["seed"] == 7
    assert doc1["significance"] == doc2["significance"]
    # without a seed the tool must generate one and report it
    doc3 = run_json("significance", "--table", str(p), "--family", "fisher",
                    "--fisher-samples", "2000")
    assert isinstance(doc3["seed"], int)


def test_confidence_command():
    doc = run_json("confidence", "--table", TABLE_A)
    variants = {c["variant"]: c for c in doc["confidence"]}
    assert set(variants) == {"null", "empirical", "full"}
    assert variants["empirical"]["half_width"] == pytest.approx(0.128837, abs=1e-6)
    assert doc["outside_null_band"] is True


def test_confidence_alpha_and_x_are_exclusive():
    assert run_cli("confidence", "--table", TABLE_A, "--x", "2", "--alpha", "0.05",
                   "--format", "json").returncode == 1
    doc = run_json("confidence", "--table", TABLE_A, "--alpha", "0.05")
    assert doc["x"] == pytest.approx(1.959964, abs=1e-5)
    one = run_json("confidence", "--table", TABLE_A, "--alpha", "0.05", "--one-tailed")
    assert one["x"] == pytest.approx(1.644854, abs=1e-5)


def test_compare_command():
    doc = run_json("compare", "--table-a", TABLE_A, "--table-b", TABLE_B)
    assert doc["comparison"]["a_in_b"] is True
    assert doc["comparison"]["b_in_a"] is True
    assert doc["comparison"]["mutually_exclusive"] is False


def test_simulate_writes_grid(tmp_path):
    out = tmp_path / "grid"
    out.mkdir()
    proc = run_cli("simulate", "--k", "4", "--n", "128", "--steps", "11",
                   "--runs", "10", "--seed", "42", "--fisher-samples", "1000",
                   "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    rows = (out / "runs.csv").read_text().splitlines()
    assert len(rows) == 1 + 110
    assert rows[0].split(",")[:4] == ["step", "run", "l", "n_realized"]
    assert "seed: 42" in proc.stdout
    assert "overall coverage" in proc.stdout


def test_simulate_small_n_flags_warning(tmp_path):
    out = tmp_path / "small"
    out.mkdir()
    proc = run_cli("simulate", "--k", "2", "--n", "8", "--steps", "3",
                   "--runs", "2", "--seed", "1", "--out", str(out))
    assert proc.returncode == 0
    summary = (out / "summary.csv").read_text().splitlines()
    header = summary[0].split(",")
    overall = summary[-1].split(",")
    assert overall[header.index("small_n_warning")] == "true"


def test_simulate_generates_seed_when_missing(tmp_path):
    out = tmp_path / "noseed"
    out.mkdir()
    proc = run_cli("simulate", "--k", "2", "--n", "16", "--steps", "2",
                   "--runs", "1", "--out", str(out))
    assert proc.returncode == 0
    assert "seed:" in proc.stdout


def test_simulate_unwritable_output_exit_2(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("occupied")
    proc = run_cli("simulate", "--k", "2", "--n", "16", "--steps", "2",
                   "--runs", "1", "--seed", "3", "--out", str(blocker / "sub"))
    assert proc.returncode == 2


def test_simulate_json_format(tmp_path):
    out = tmp_path / "js"
    out.mkdir()
    proc = run_cli("simulate", "--k", "2", "--n", "16", "--steps", "2",
                   "--runs", "2", "--seed", "5", "--out", str(out), "--format", "json")
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert doc["seed"] == 5
    assert math.isfinite(doc["coverage"])
    assert doc["config"]["k"] == 2
    assert doc["runs_csv"].endswith("runs.csv")
