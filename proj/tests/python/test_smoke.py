import json
import math
import subprocess
import sys

import pytest

import vcsched


def test_channel_helpers():
    d_brk = vcsched.breakpoint_distance()
    assert 170.0 < d_brk < 190.0
    pl_10 = vcsched.path_loss(10.0)
    pl_400 = vcsched.path_loss(400.0)
    assert pl_10 < pl_400
    assert vcsched.contact_survival(5.0, 0.1) == pytest.approx(math.exp(-0.5))
    tt = vcsched.transmission_time(1.2e6, 100.0)
    assert 0.0 < tt < 2.0


def test_generate_dag_shape():
    dag = vcsched.generate_dag(n_subtasks=20, n_layers=6, ccr=1.0, seed=7)
    assert len(dag["nodes"]) == 20
    ids = {n["id"] for n in dag["nodes"]}
    for e in dag["edges"]:
        assert e["src"] in ids and e["dst"] in ids
        assert e["bits"] > 0


def test_sweep_roundtrip(tmp_path):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        "[experiment]\n"
        "axis = n_subtasks\n"
        "axis_values = 10\n"
        "trials = 4\n"
        "schedulers = rfid,heft\n"
        "base_seed = 3\n"
        "[vc]\n"
        "n_vehicles = 15\n"
    )
    rows = vcsched.run_sweep(str(cfg))
    assert len(rows) == 8
    assert {r["scheduler"] for r in rows} == {"rfid", "heft"}
    def strip_runtime(rs):
        return [{k: v for k, v in r.items() if k != "sched_runtime_ms"} for r in rs]

    again = vcsched.run_sweep(str(cfg))
    assert strip_runtime(rows) == strip_runtime(again)
    assert vcsched.metrics_csv_header().startswith("scheduler,axis,value,seed")
