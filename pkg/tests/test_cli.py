import json
import math

from hdline.cli import EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_OK, main

LOG2_3 = math.log2(3.0)


def _run(argv):
    return main(argv)


def test_region_example_corner_rows(tmp_path):
    out = tmp_path / "region.csv"
    assert _run(["region", "--theorem", "example", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "R0,Rk"
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert abs(float(first[1]) - LOG2_3) < 5e-7
    last = lines[-1].split(",")
    assert abs(float(last[0]) - 1.138872) < 1e-5
    assert float(last[1]) == 0.0
    sidecar = json.loads((tmp_path / "region.json").read_text())
    assert len(sidecar) == len(lines) - 1
    # the left corner is achieved by the sum-maximizing idle probability
    assert abs(sidecar[0]["params"]["p_idle"] - 1 / 3) < 1e-12


def test_region_timeshare_two_rows(tmp_path):
    out = tmp_path / "ts.csv"
    assert _run(["region", "--theorem", "timeshare", "--out", str(out)]) == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert lines[1] == f"0.000000,{LOG2_3:.6f}"
    assert lines[2] == f"{0.5 * LOG2_3:.6f},0.000000"


def test_region_deterministic_across_threads(tmp_path):
    outs = []
    for tag, threads in (("a", "1"), ("b", "4")):
        out = tmp_path / f"{tag}.csv"
        rc = _run(
            ["region", "--theorem", "1", "--m", "2", "--q", "2", "--seed", "0",
             "--threads", threads, "--out", str(out)]
        )
        assert rc == EXIT_OK
        outs.append(out.read_bytes() + (tmp_path / f"{tag}.json").read_bytes())
    assert outs[0] == outs[1]


def test_region_theorem2_rejects_m2(tmp_path):
    rc = _run(["region", "--theorem", "2", "--m", "2", "--out", str(tmp_path / "x.csv")])
    assert rc == EXIT_CONFIG


def test_region_bad_q(tmp_path):
    rc = _run(["region", "--theorem", "1", "--m", "2", "--q", "2,2,2",
               "--out", str(tmp_path / "x.csv")])
    assert rc == EXIT_CONFIG


def test_simulate_trace_and_summary(tmp_path):
    out = tmp_path / "trace.jsonl"
    rc = _run(
        ["simulate", "--m", "2", "--q", "2", "--n", "6", "--nvec", "2",
         "--blocks", "5", "--rate0", "0.16", "--ratek", "0.5",
         "--seed", "3", "--out", str(out)]
    )
    assert rc == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 6
    rec = json.loads(lines[0])
    assert rec["block"] == 1 and len(rec["tx"]["0"]) == 6
    summary = json.loads(lines[-1])["summary"]
    assert summary["collisions"] == 0
    assert summary["num_msgs"][1] == 8


def test_simulate_deterministic(tmp_path):
    argv = ["simulate", "--m", "2", "--q", "2", "--n", "8", "--nvec", "4",
            "--blocks", "4", "--rate0", "0.1", "--ratek", "0.3",
            "--trials", "200", "--seed", "5"]
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    assert _run(argv + ["--out", str(a)]) == EXIT_OK
    assert _run(argv + ["--threads", "8", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_infeasible_allocation(tmp_path):
    rc = _run(["simulate", "--m", "2", "--q", "2", "--n", "4", "--nvec", "4",
               "--blocks", "2", "--seed", "0", "--out", str(tmp_path / "x.jsonl")])
    assert rc == EXIT_INFEASIBLE


def test_convergence_output(tmp_path):
    out = tmp_path / "conv.csv"
    rc = _run(["convergence", "--tau", "0.5", "--alpha", "0.5", "--q", "2",
               "--n", "8,16,64", "--out", str(out)])
    assert rc == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "n,rate,target,gap"
    rows = [ln.split(",") for ln in lines[1:]]
    assert [r[0] for r in rows] == ["8", "16", "64"]
    assert all(abs(float(r[2]) - 0.75) < 1e-9 for r in rows)
    gaps = [float(r[3]) for r in rows]
    assert gaps == sorted(gaps, reverse=True)


def test_convergence_bad_fraction(tmp_path):
    rc = _run(["convergence", "--tau", "1.5", "--alpha", "0.5", "--q", "2",
               "--n", "8", "--out", str(tmp_path / "x.csv")])
    assert rc == EXIT_CONFIG
