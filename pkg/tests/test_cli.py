import csv
import io
import json
import math
import subprocess
import sys
from collections import Counter

import pytest

from tamecount.cli import run_command


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), stdout=out)
    return code, out.getvalue()


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(body))


def meta_of(text):
    out = {}
    for line in text.splitlines():
        if line.startswith("# "):
            k, v = line[2:].split(" = ", 1)
            out[k] = v
    return out


def test_count_example():
    code, text = run("count", "--group", "2", "--weight", "ram", "--modulus", "16", "--X", "10")
    assert code == 0
    rows = rows_of(text)
    assert text.splitlines()[0] == "class_label,X,count,predicted,ratio"
    assert len(rows) == 4 and sum(int(r["count"]) for r in rows) == 4


def test_orbits_example():
    code, text = run("orbits", "--group", "4")
    assert code == 0
    rows = rows_of(text)
    assert [(r["order"], r["field"], r["W_disc"]) for r in rows] == [("1", "-", "0"), ("2", "Q", "2"), ("4", "Q(i)", "3")]


def test_predict_example():
    code, text = run("predict", "--group", "2", "--weight", "ram", "--modulus", "16", "--pmax", "10000")
    assert code == 0
    meta = meta_of(text)
    assert float(meta["beta"]) == 1.0 and int(meta["delta"]) == 1
    for r in rows_of(text):
        assert float(r["tau"]) == pytest.approx(1 / math.pi**2, rel=1e-4)
        assert float(r["tau_tolerance"]) > 0


def test_verify_schedule_has_totals():
    code, text = run("verify", "--group", "2", "--weight", "ram", "--modulus", "16", "--schedule", "1000,100000", "--pmax", "10000")
    assert code == 0
    rows = rows_of(text)
    totals = [r for r in rows if r["class_label"] == "*total*"]
    assert [int(r["X"]) for r in totals] == [1000, 100000]
    assert abs(float(totals[-1]["ratio"]) - 1) < 0.01


def test_enumerate_round_trip():
    args = ("--group", "4", "--weight", "disc", "--modulus", "16", "--X", "200000")
    _, listing = run("enumerate", *args)
    tally = Counter(r["class_label"] for r in rows_of(listing))
    _, counted = run("count", *args)
    assert {r["class_label"]: int(r["count"]) for r in rows_of(counted) if int(r["count"])} == dict(tally)


def test_csv_is_deterministic():
    args = ("count", "--group", "2,2", "--weight", "ram", "--X", "100000", "--pmax", "1000")
    assert run(*args) == run(*args)
    one = run(*args, "--threads", "1")[1]
    three = run(*args, "--threads", "3")[1]
    assert one == three


def test_json_mirrors_csv():
    base = ("count", "--group", "3", "--X", "100000", "--pmax", "1000")
    _, text = run(*base)
    _, js = run(*base, "--format", "json")
    data = json.loads(js)
    csv_rows = rows_of(text)
    assert len(data["rows"]) == len(csv_rows)
    for a, b in zip(data["rows"], csv_rows):
        assert str(a["count"]) == b["count"] and a["class_label"] == b["class_label"]
        assert repr(a["ratio"]) == b["ratio"]
    assert data["meta"]["total"] == sum(int(r["count"]) for r in csv_rows)


def test_variants():
    base = ("count", "--group", "2,2", "--weight", "ram", "--modulus", "4", "--X", "105")
    assert sum(int(r["count"]) for r in rows_of(run(*base, "--variant", "full")[1])) == 6
    omit = rows_of(run(*base, "--variant", "omit:1,0")[1])
    assert all(r["predicted"] == "" for r in omit)
    assert run(*base, "--variant", "omit:0,0")[0] == 1
    assert run(*base, "--variant", "some")[0] == 1


def test_fibers_and_kernel_orders(tmp_path):
    fib = tmp_path / "fibers.txt"
    fib.write_text("# two fibers\nA: 1 7\nB: 3 5\n")
    code, text = run("count", "--group", "2", "--weight", "ram", "--modulus", "16", "--X", "10", "--fibers", str(fib), "--kpsi", "2")
    assert code == 0
    got = {r["class_label"]: int(r["count"]) for r in rows_of(text)}
    assert got == {"A": 4, "B": 4}
    fib.write_text("A: 1 7\n")
    assert run("count", "--group", "2", "--weight", "ram", "--modulus", "16", "--X", "10", "--fibers", str(fib))[0] == 1


def test_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("group = 2\nweight = ram  # radical\nmodulus = 16\nX = 10\n")
    code, text = run("count", "--config", str(cfg))
    assert code == 0 and sum(int(r["count"]) for r in rows_of(text)) == 4
    # flags override the file
    code, text = run("count", "--config", str(cfg), "--X", "1")
    assert sum(int(r["count"]) for r in rows_of(text)) == 1
    cfg.write_text("group = 2\ncolour = red\n")
    assert run("count", "--config", str(cfg))[0] == 1


def test_modulus_override():
    assert run("count", "--group", "4", "--modulus", "8", "--X", "100")[0] == 1
    assert run("count", "--group", "4", "--modulus", "8", "--X", "100", "--allow-modulus")[0] == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["count", "--group", "1", "--X", "10"],
        ["count", "--group", "2", "--weight", "0", "--X", "10"],
        ["count", "--group", "2"],
        ["count", "--group", "2", "--X", "ten"],
        ["frobnicate", "--group", "2"],
        ["count", "--group", "2", "--X", "10", "--format", "xml"],
        ["stickelberger", "--group", "3"],
        ["orbits"],
    ],
)
def test_bad_config_exits_one(argv):
    assert run(*argv)[0] == 1


def test_stickelberger_queries():
    code, text = run("stickelberger", "--group", "3", "--alpha", "1=1 2=1 0=-2", "--pair", "1", "1")
    assert code == 0
    meta = meta_of(text)
    assert meta["pairing"] == "1/3" and meta["theta_integral"] == "True" and meta["in_A_hatG"] == "True"
    assert {r["element"]: r["theta"] for r in rows_of(text)} == {"0": "0", "1": "1", "2": "1"}
    code, text = run("stickelberger", "--group", "2", "--alpha", "1=1")
    assert meta_of(text)["in_A_hatG"] == "False"


def test_verdict_command():
    code, text = run("verdict", "--group", "2,2", "--weight", "1,1,2", "--modulus", "16", "--pmax", "10000", "--premise-pmax", "1000")
    assert code == 0
    meta = meta_of(text)
    assert meta["independent"] == "False" and int(meta["witnesses"]) >= 1
    assert float(meta["premise_min_abs_D"]) > 0
    code, text = run("verdict", "--group", "2", "--weight", "ram", "--modulus", "16", "--pmax", "10000")
    assert meta_of(text)["independent"] == "True"


def test_check_bounds_command():
    code, text = run("check-bounds", "--group", "3", "--pmax", "200", "--s", "0.8,2.0")
    assert code == 0 and meta_of(text)["all_hold"] == "True"
    assert [r["failures"] for r in rows_of(text)] == ["0", "0"]


def test_output_file(tmp_path):
    dest = tmp_path / "out.csv"
    code, text = run("orbits", "--group", "2,2", "--output", str(dest))
    assert code == 0 and text == ""
    assert len(rows_of(dest.read_text())) == 4


def test_threads_from_environment():
    env_run = subprocess.run(
        [sys.executable, "-m", "tamecount", "count", "--group", "3", "--X", "10000", "--format", "json"],
        capture_output=True, text=True, env={"TAMECOUNT_THREADS": "2", "PATH": ""},
    )
    assert env_run.returncode == 0
    _, ref = run("count", "--group", "3", "--X", "10000", "--format", "json", "--threads", "1")
    meta = json.loads(env_run.stdout)["meta"]
    assert meta["threads"] == 2
    assert meta["total"] == json.loads(ref)["meta"]["total"] == 27


def test_console_script_exit_codes():
    bad = subprocess.run([sys.executable, "-m", "tamecount", "count", "--group", "2"], capture_output=True, text=True)
    assert bad.returncode == 1 and "error" in bad.stderr
