import json
import subprocess
import sys

import numpy as np
import pytest

from jjcavity.cli import main
from jjcavity.device import ej_symmetric
from jjcavity.io import fmt, meta_path

DEVICE_ONE = {
    "qubits": [{"e_ch": 10.0, "e_j1": 1.0, "e_j2": 1.0, "n_bar": 0.5, "flux_ratio": 0.3}],
    "cavity": {"nu": 1.0, "g": 0.05, "n_ph": 6},
}
DEVICE_TWO = {
    "qubits": [{"e_ch": 10.0, "e_j1": 1.0, "e_j2": 1.0, "n_bar": 0.5, "flux_ratio": 0.5}] * 2,
    "cavity": {"nu": 1.0, "g": 0.05, "n_ph": 6},
    "capacitive_ec": 0.2,
}
TRANSFER = {"kappa": 1.0, "g": 0.05, "e_j0": 40.0, "window": [-12.0, 12.0]}


@pytest.fixture
def ws(tmp_path):
    (tmp_path / "one.json").write_text(json.dumps(DEVICE_ONE))
    (tmp_path / "two.json").write_text(json.dumps(DEVICE_TWO))

    def scenario(name, kind, params, device="one.json", out=None):
        d = {"kind": kind, "params": params, "output_path": out or f"out/{name}"}
        if device:
            d["device_path"] = device
        p = tmp_path / f"{name}.cfg.json"
        p.write_text(json.dumps(d))
        return p

    scenario.root = tmp_path
    return scenario


def run(cmd, cfg, *extra):
    return main([cmd, "--config", str(cfg), *extra])


def load(path):
    return json.loads(path.read_text())


def read_csv(path):
    lines = path.read_text().split("\n")
    return lines[0].split(","), [list(map(float, l.split(","))) for l in lines[1:] if l]


# gate-audit

def test_gate_audit_verified_cnot(ws):
    th = {"min_fidelity": 0.999999, "max_leakage": 1e-8, "makhlin": [0, 0, 1], "makhlin_tol": 1e-6}
    cfg = ws("cnot.json", "gate_audit", {"gate": "cnot_verified", "thresholds": th}, "two.json")
    assert run("gate-audit", cfg) == 0
    rep = load(ws.root / "out/cnot.json")
    assert rep["passed"] and rep["report"]["makhlin_g2"] == pytest.approx(1.0, abs=1e-6)
    assert rep["config"]["device"]["capacitive_ec"] == 0.2


def test_gate_audit_identity(ws):
    cfg = ws("id.json", "gate_audit", {"gate": "identity", "thresholds": {"min_fidelity": 1.0}}, "two.json")
    assert run("gate-audit", cfg) == 0
    assert load(ws.root / "out/id.json")["report"]["fidelity"] == 1.0


def test_gate_audit_threshold_failure(ws):
    cfg = ws("lit.json", "gate_audit", {"gate": "cnot_literal", "thresholds": {"min_fidelity": 0.9}}, "two.json")
    assert run("gate-audit", cfg) == 1
    assert load(ws.root / "out/lit.json")["passed"] is False


@pytest.mark.parametrize(
    "params",
    [
        {"gate": "identity", "thresholds": {"min_fidelity": 1.5}},
        {"gate": "teleport"},
        {"thresholds": {}},
    ],
)
def test_gate_audit_schema_violations(ws, params):
    assert run("gate-audit", ws("bad.json", "gate_audit", params)) == 2


def test_gate_audit_input_errors(ws):
    assert run("gate-audit", ws("nodev.json", "gate_audit", {"gate": "identity"}, "missing.json")) == 2
    assert run("gate-audit", ws("kind.json", "spectrum", {})) == 2
    assert run("gate-audit", ws("idx.json", "gate_audit", {"gate": "cnot_verified", "target": 4}, "two.json")) == 2
    # the conditional phase gate needs decoupled SQUIDs
    assert run("gate-audit", ws("cp.json", "gate_audit", {"gate": "conditional_phase", "t": 1.0})) == 2
    assert run("gate-audit", ws.root / "absent.json") == 2


def test_gate_audit_swap_and_cphase(ws):
    cfg = ws("sw.json", "gate_audit", {"gate": "swap_qubit_photon", "thresholds": {"min_fidelity": 0.999999999}})
    assert run("gate-audit", cfg) == 0
    th = {"makhlin": [0, 0, 1], "makhlin_tol": 1e-10}
    cfg = ws("cp.json", "gate_audit", {"gate": "conditional_phase", "t": np.pi / 0.2, "thresholds": th}, "two.json")
    assert run("gate-audit", cfg) == 0
    cfg = ws("u1.json", "gate_audit", {"gate": "u_single", "t": 2.0, "thresholds": {"min_fidelity": 0.99999999999}})
    assert run("gate-audit", cfg) == 0


# schedule

def swap_schedule():
    from jjcavity.device import device_from_dict
    from jjcavity.schedule import Schedule, schedule_to_dict, swap_segment

    dev = device_from_dict(DEVICE_ONE)
    return schedule_to_dict(Schedule((swap_segment(dev, 0),), {"qubits": [1], "n": 0}))


def test_schedule_pass_and_fail(ws):
    ok = {"schedule": swap_schedule(), "target_state": {"qubits": [0], "n": 1}, "min_fidelity": 0.99}
    assert run("schedule", ws("s.json", "schedule", ok)) == 0
    body = load(ws.root / "out/s.json")
    assert len(body["state"]) == 12 and body["checks"][0]["value"] > 0.99
    bad = dict(ok, target_state={"qubits": [1], "n": 0})
    assert run("schedule", ws("s2.json", "schedule", bad)) == 1


def test_schedule_propagator_and_errors(ws):
    sched = {"segments": [{"duration": 1.0, "settings": [{"qubit": 0, "n_bar": 0.45, "flux_ratio": 0.3}]}]}
    assert run("schedule", ws("p.json", "schedule", {"schedule": sched})) == 0
    assert np.array(load(ws.root / "out/p.json")["propagator"]).shape == (12, 12, 2)
    bad = {"segments": [{"duration": -1.0}]}
    assert run("schedule", ws("b.json", "schedule", {"schedule": bad})) == 2
    assert run("schedule", ws("m.json", "schedule", {"schedule_path": "nowhere.json"})) == 2


# transfer

def test_transfer_solved(ws):
    cfg = ws("t.csv", "transfer", dict(TRANSFER, min_fidelity=0.99), device=None)
    assert run("transfer", cfg) == 0
    summary = load(ws.root / "out/t.summary.json")
    assert summary["summary"]["final_fidelity"] >= 0.99
    assert summary["summary"]["pulse_provenance"] == "solved_no_reflection"
    header, rows = read_csv(ws.root / "out/t.csv")
    assert header[0] == "t" and header[-1] == "norm"
    assert len(rows) == 241
    assert load(meta_path(ws.root / "out/t.csv"))["config"]["resolved_params"]["tol"] == 1e-10


def test_transfer_zero_and_threshold(ws):
    assert run("transfer", ws("z.csv", "transfer", dict(TRANSFER, pulse_source="zero"), device=None)) == 0
    assert load(ws.root / "out/z.summary.json")["summary"]["final_fidelity"] == 0
    cfg = ws("z1.csv", "transfer", dict(TRANSFER, pulse_source="zero", min_fidelity=0.5), device=None)
    assert run("transfer", cfg) == 1


def test_transfer_input_errors(ws):
    assert run("transfer", ws("w.csv", "transfer", dict(TRANSFER, window=[5.0, 1.0]), device=None)) == 2
    assert run("transfer", ws("k.csv", "transfer", dict(TRANSFER, kappa=-1.0), device=None)) == 2
    big = dict(TRANSFER, kappa=5.0, pulse_source="closed_form")
    assert run("transfer", ws("r.csv", "transfer", big, device=None)) == 2
    assert run("transfer", ws("ok.csv", "transfer", TRANSFER, device=None), "--tol", "-1") == 2


def test_transfer_tol_override(ws):
    cfg = ws("tt.csv", "transfer", dict(TRANSFER, pulse_source="closed_form_mirrored"), device=None)
    assert run("transfer", cfg, "--tol", "1e-9") == 0
    assert load(ws.root / "out/tt.summary.json")["config"]["tol"] == 1e-9


# sweep

def test_sweep_swap_infidelity_monotone(ws):
    params = {"axis": "g", "grid": [0.02, 0.05, 0.1, 0.2], "measure": "swap_infidelity", "monotone": "increasing"}
    assert run("sweep", ws("g.csv", "sweep", params)) == 0
    header, rows = read_csv(ws.root / "out/g.csv")
    assert header == ["g", "swap_infidelity"]
    col = [r[1] for r in rows]
    assert [r[0] for r in rows] == [0.02, 0.05, 0.1, 0.2]
    assert all(b > a for a, b in zip(col, col[1:]))
    params["monotone"] = "decreasing"
    assert run("sweep", ws("g2.csv", "sweep", params)) == 1


def test_sweep_truncation(ws):
    params = {"axis": "n_ph", "grid": [4, 6, 8], "measure": "cnot_fidelity"}
    assert run("sweep", ws("n.csv", "sweep", params, "two.json")) == 0
    _, rows = read_csv(ws.root / "out/n.csv")
    assert abs(rows[2][1] - rows[1][1]) < 1e-6


def test_sweep_input_errors(ws):
    assert run("sweep", ws("a.csv", "sweep", {"axis": "temperature", "grid": [1.0], "measure": "swap_infidelity"})) == 2
    assert run("sweep", ws("b.csv", "sweep", {"axis": "kappa", "grid": [1.0], "measure": "swap_infidelity"})) == 2
    assert run("sweep", ws("c.csv", "sweep", {"axis": "n_ph", "grid": [4.5], "measure": "swap_infidelity"})) == 2
    assert run("sweep", ws("d.csv", "sweep", {"axis": "g", "grid": [], "measure": "swap_infidelity"})) == 2


def test_single_point_sweep_matches_direct_command(ws):
    base = dict(TRANSFER, pulse_source="closed_form_mirrored")
    assert run("transfer", ws("d.csv", "transfer", base, device=None)) == 0
    direct = load(ws.root / "out/d.summary.json")["summary"]["final_fidelity"]
    sweep = {"axis": "g", "grid": [0.05], "measure": "transfer_fidelity", "base": base}
    assert run("sweep", ws("s.csv", "sweep", sweep, device=None)) == 0
    _, rows = read_csv(ws.root / "out/s.csv")
    assert rows[0][1] == direct


def test_sweep_workers_do_not_change_output(ws):
    params = {"axis": "duration", "grid": [1.0, 2.0, 3.0, 4.0], "measure": "cphase_entangling_phase"}
    ws("w1.csv", "sweep", dict(params, workers=1), "two.json")
    ws("w3.csv", "sweep", dict(params, workers=3), "two.json")
    assert run("sweep", ws.root / "w1.csv.cfg.json") == 0
    assert run("sweep", ws.root / "w3.csv.cfg.json") == 0
    assert (ws.root / "out/w1.csv").read_bytes() == (ws.root / "out/w3.csv").read_bytes()
    _, rows = read_csv(ws.root / "out/w1.csv")
    for t, phase in rows:
        assert np.angle(np.exp(1j * (phase + 0.2 * t))) == pytest.approx(0.0, abs=1e-10)


# spectrum

def test_spectrum_h0(ws):
    dev = dict(DEVICE_ONE, cavity={"nu": 1.0, "g": 0.05, "n_ph": 2})
    (ws.root / "small.json").write_text(json.dumps(dev))
    assert run("spectrum", ws("h0.csv", "spectrum", {"terms": ["h0"]}, "small.json")) == 0
    _, rows = read_csv(ws.root / "out/h0.csv")
    assert np.allclose([r[1] for r in rows], [0.5, 0.5, 1.5, 1.5], atol=1e-14)
    good = {"terms": ["h0"], "expected": [1.5, 0.5, 1.5, 0.5], "atol": 1e-12}
    assert run("spectrum", ws("e.csv", "spectrum", good, "small.json")) == 0
    bad = dict(good, expected=[0.5, 0.5, 1.5, 2.5])
    assert run("spectrum", ws("e2.csv", "spectrum", bad, "small.json")) == 1
    assert run("spectrum", ws("e3.csv", "spectrum", dict(good, expected=[0.5]), "small.json")) == 1


def test_spectrum_ha_and_builder_errors(ws):
    assert run("spectrum", ws("ha.csv", "spectrum", {"builder": "ha"})) == 0
    _, rows = read_csv(ws.root / "out/ha.csv")
    e0 = ej_symmetric(1.0, 0.3)
    assert np.allclose([r[1] for r in rows], [-e0] * 6 + [e0] * 6, atol=1e-12)
    assert run("spectrum", ws("hb.csv", "spectrum", {"builder": "hb"})) == 2
    assert run("spectrum", ws("h2.csv", "spectrum", {"terms": ["h2_capacitive"]})) == 2


# determinism and formatting

@pytest.mark.parametrize(
    "cmd,kind,params,device,files",
    [
        ("gate-audit", "gate_audit", {"gate": "cnot_literal"}, "two.json", ["r.json"]),
        ("transfer", "transfer", dict(TRANSFER, pulse_source="closed_form"), None, ["r.csv", "r.csv.meta.json", "r.summary.json"]),
        ("sweep", "sweep", {"axis": "g", "grid": [0.02, 0.05], "measure": "sideband_infidelity"}, "one.json", ["r.csv", "r.csv.meta.json"]),
        ("spectrum", "spectrum", {"terms": ["h0", "hint"]}, "one.json", ["r.csv", "r.csv.meta.json"]),
        ("schedule", "schedule", {"schedule": {"segments": [{"duration": 2.0}]}}, "one.json", ["r.json"]),
    ],
)
def test_repeated_runs_are_byte_identical(ws, cmd, kind, params, device, files):
    ext = files[0].split(".", 1)[1]
    cfg = ws(f"r.{ext}", kind, params, device)
    assert run(cmd, cfg) == 0
    first = {f: (ws.root / "out" / f).read_bytes() for f in files}
    assert run(cmd, cfg) == 0
    for f in files:
        assert (ws.root / "out" / f).read_bytes() == first[f]
        assert b"\r" not in first[f]


@pytest.mark.parametrize("x", [0.1, 1 / 3, np.pi, 1e-300, -2.5e17, 0.0])
def test_float_format_round_trips(x):
    assert float(fmt(x)) == x
    assert fmt(np.float64(0.1)) == "0.10000000000000001"


def test_console_script_exit_codes(ws):
    cfg = ws("x.json", "gate_audit", {"gate": "identity", "thresholds": {"min_fidelity": 2}})
    out = subprocess.run([sys.executable, "-m", "jjcavity.cli", "gate-audit", "--config", str(cfg)], capture_output=True)
    assert out.returncode == 2
    assert b"invalid config" in out.stderr
