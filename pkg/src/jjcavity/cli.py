"""Batch front end: ``sim <command> --config scenario.json``.

Exit codes: 0 all checks pass, 1 numeric or threshold failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .device import DeviceModel, load_device
from .gates import (
    CZ,
    axis_from_params,
    basis_index,
    conditional_phase,
    single_qubit_h,
    swap_audit,
    swap_qubit_photon,
    swap_qubit_qubit,
    u_single,
)
from .hamiltonians import HamiltonianSpec, build, build_rotating_ha_hb, build_sideband_h
from .io import dumps, write_csv, write_json
from .operators import GateReport, audit, expm, phase_invariant_fidelity
from .protocols import (
    cnot_report,
    cphase_entangling_phase,
    run_transfer,
    sideband_transfer_infidelity,
    swap_pulse_infidelity,
    swap_pulse_report,
)
from .schedule import resolve_state, run_schedule, schedule_from_dict
from .transfer import CSV_HEADER

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2

COMMANDS = {
    "gate-audit": "gate_audit",
    "schedule": "schedule",
    "transfer": "transfer",
    "sweep": "sweep",
    "spectrum": "spectrum",
}

SWEEP_AXES = ("g", "kappa", "e_c", "duration", "n_ph")
MEASURE_AXES = {
    "swap_infidelity": {"g", "n_ph"},
    "sideband_infidelity": {"g", "n_ph"},
    "cnot_fidelity": {"g", "n_ph"},
    "transfer_fidelity": {"g", "kappa", "duration"},
    "cphase_entangling_phase": {"e_c", "duration"},
}
NEEDS_DEVICE = {"swap_infidelity", "sideband_infidelity", "cnot_fidelity", "cphase_entangling_phase"}


class InputError(ValueError):
    pass


class Scenario:
    """A validated scenario file with paths resolved against its directory."""

    def __init__(self, path: Path, data: dict):
        self.path = path
        self.data = data
        self.base = path.parent

    @property
    def kind(self) -> str:
        return self.data["kind"]

    @property
    def params(self) -> dict:
        return self.data["params"]

    def resolve(self, rel: str) -> Path:
        p = Path(rel)
        return p if p.is_absolute() else self.base / p

    def device(self) -> DeviceModel:
        if "device_path" not in self.data:
            raise InputError("scenario needs device_path")
        p = self.resolve(self.data["device_path"])
        if not p.exists():
            raise InputError(f"device file not found: {p}")
        return load_device(p)

    def output(self, override: str | None, suffix: str) -> Path:
        if override:
            return Path(override)
        if "output_path" in self.data:
            return self.resolve(self.data["output_path"])
        return self.base / (self.path.stem + suffix)


def _schema() -> dict:
    text = resources.files("jjcavity.schemas").joinpath("scenario.schema.json").read_text()
    return json.loads(text)


def load_scenario(path: str | Path, expected_kind: str) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise InputError(f"config not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"config is not valid JSON: {exc}") from exc
    jsonschema.validate(data, _schema())
    if data["kind"] != expected_kind:
        raise InputError(f"scenario kind {data['kind']!r} does not match command ({expected_kind!r})")
    return Scenario(path, data)


def _resolved(sc: Scenario, device: DeviceModel | None, tol: float | None, **extra) -> dict:
    cfg = {"scenario": sc.data, "tol": tol, "version": __version__}
    if device is not None:
        cfg["device"] = device.to_dict()
    cfg.update(extra)
    return cfg


def _check(name: str, value, threshold, ok: bool) -> dict:
    return {"name": name, "value": value, "threshold": threshold, "pass": bool(ok)}


def _threshold_checks(report: GateReport, th: dict) -> list[dict]:
    checks = []
    if "min_fidelity" in th:
        checks.append(_check("fidelity", report.fidelity, th["min_fidelity"], report.fidelity >= th["min_fidelity"]))
    if "max_leakage" in th:
        checks.append(_check("leakage", report.leakage, th["max_leakage"], report.leakage <= th["max_leakage"]))
    if "makhlin" in th:
        tol = th.get("makhlin_tol", 1e-6)
        if report.makhlin_g1 is None:
            checks.append(_check("makhlin", None, th["makhlin"], False))
        else:
            got = [report.makhlin_g1.real, report.makhlin_g1.imag, report.makhlin_g2]
            dev = max(abs(a - b) for a, b in zip(got, th["makhlin"]))
            checks.append(_check("makhlin", got, th["makhlin"], dev <= tol))
    return checks


# gate-audit

def _sideband_report(dev: DeviceModel, p: dict) -> GateReport:
    k = p.get("qubit", 0)
    inf = sideband_transfer_infidelity(dev, k, p.get("level", "exact"), p.get("drive_scale", 1.0))
    return GateReport("sideband_pulse", 1.0 - inf, inf, None, None)


def gate_report(dev: DeviceModel, p: dict) -> GateReport:
    gate = p["gate"]
    if gate == "identity":
        n = dev.n_qubits
        keep = [basis_index(dev, [(i >> (n - 1 - b)) & 1 for b in range(n)], 0) for i in range(2**n)]
        return audit("identity", np.eye(dev.dim), np.eye(2**n), keep)
    if gate in ("cnot_verified", "cnot_literal"):
        variant = gate.split("_")[1]
        return cnot_report(dev, p.get("control", 0), p.get("target", 1), variant, p.get("beta_j", 0.0))
    if gate == "conditional_phase":
        u = conditional_phase(p["t"], dev)
        return audit("conditional_phase", u, CZ, [0, 1, 2, 3])
    if gate == "swap_qubit_photon":
        k = p.get("qubit", 0)
        return swap_audit(swap_qubit_photon(k, p.get("n_winding", 1), dev), dev, k)
    if gate == "swap_qubit_qubit":
        k, j = p.get("source", 0), p.get("target", 1)
        return swap_audit(swap_qubit_qubit(j, k, dev, p.get("n_winding", 1)), dev, k, j)
    if gate == "swap_pulse":
        return swap_pulse_report(dev, p.get("qubit", 0), p.get("n_winding", 1), p.get("level", "exact"), p.get("drive_scale", 1.0))
    if gate == "sideband_pulse":
        return _sideband_report(dev, p)
    if gate == "u_single":
        q = dev.qubits[p.get("qubit", 0)]
        t = p.get("t", 1.0)
        e, axis = axis_from_params(q)
        u = u_single(e * t, axis)
        target = expm(single_qubit_h(q), t)
        return GateReport("u_single", phase_invariant_fidelity(u, target), 0.0, None, None)
    raise InputError(f"unknown gate {gate!r}")


def cmd_gate_audit(sc: Scenario, out: str | None, tol: float | None) -> int:
    dev = sc.device()
    p = sc.params
    report = gate_report(dev, p)
    checks = _threshold_checks(report, p.get("thresholds", {}))
    passed = all(c["pass"] for c in checks)
    write_json(
        sc.output(out, ".report.json"),
        {"config": _resolved(sc, dev, tol), "report": report.to_dict(), "checks": checks, "passed": passed},
    )
    return EXIT_OK if passed else EXIT_NUMERIC


# schedule

def _amplitudes(psi: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in psi]


def cmd_schedule(sc: Scenario, out: str | None, tol: float | None) -> int:
    dev = sc.device()
    p = sc.params
    if "schedule_path" in p:
        sp = sc.resolve(p["schedule_path"])
        if not sp.exists():
            raise InputError(f"schedule file not found: {sp}")
        sched_dict = json.loads(sp.read_text())
    else:
        sched_dict = p["schedule"]
    sched = schedule_from_dict(sched_dict)
    method = p.get("method", "expm")
    result, diag = run_schedule(sched, dev, method, tol if tol is not None else 1e-10)
    body = {"config": _resolved(sc, dev, tol, schedule=sched_dict), "diagnostics": diag}
    checks = []
    if result.ndim == 1:
        body["state"] = _amplitudes(result)
        if "target_state" in p:
            target = resolve_state(p["target_state"], dev)
            fid = float(abs(np.vdot(target, result)) ** 2)
            thr = p.get("min_fidelity", 1.0 - 1e-6)
            checks.append(_check("state_fidelity", fid, thr, fid >= thr))
    else:
        body["propagator"] = [_amplitudes(row) for row in result]
    body["checks"] = checks
    body["passed"] = all(c["pass"] for c in checks)
    write_json(sc.output(out, ".result.json"), body)
    return EXIT_OK if body["passed"] else EXIT_NUMERIC


# transfer

TRANSFER_DEFAULTS = {
    "cascade_factor": 2.0,
    "coupling_variant": "cascaded",
    "pulse_source": "solved_no_reflection",
    "tol": 1e-10,
    "samples": 241,
}


def _transfer_params(p: dict, tol: float | None) -> dict:
    q = {**TRANSFER_DEFAULTS, **p}
    if tol is not None:
        q["tol"] = tol
    return q


def cmd_transfer(sc: Scenario, out: str | None, tol: float | None) -> int:
    p = _transfer_params(sc.params, tol)
    if not p["window"][1] > p["window"][0]:
        raise InputError("window end must exceed its start")
    traj, pulses, _ = run_transfer(p)
    summary = traj.summary()
    checks = []
    if "min_fidelity" in p:
        f = summary["final_fidelity"]
        checks.append(_check("final_fidelity", f, p["min_fidelity"], f >= p["min_fidelity"]))
    passed = all(c["pass"] for c in checks)
    info = {k: v for k, v in pulses.info.items() if not callable(v)}
    cfg = _resolved(sc, None, tol, resolved_params=p)
    path = sc.output(out, ".csv")
    body = {"config": cfg, "summary": summary, "pulse_info": info, "checks": checks, "passed": passed}
    write_csv(path, CSV_HEADER, traj.rows(), meta=body)
    write_json(summary_path(path), body)
    return EXIT_OK if passed else EXIT_NUMERIC


def summary_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.stem + ".summary.json")


# sweep

def _apply_axis(axis: str, value: float, dev: DeviceModel | None, base: dict):
    base = dict(base)
    if axis == "g":
        if dev is not None:
            dev = dev.with_cavity(g=value)
        base["g"] = value
    elif axis == "n_ph":
        if int(value) != value:
            raise InputError("n_ph grid values must be integers")
        dev = dev.with_cavity(n_ph=int(value))
    elif axis == "kappa":
        base["kappa"] = value
    elif axis == "e_c":
        dev = DeviceModel(dev.qubits, dev.cavity, value)
    elif axis == "duration":
        if "window" in base or "kappa" in base:
            base["window"] = [-value / 2, value / 2]
        else:
            base["t"] = value
    return dev, base


def sweep_point(measure: str, axis: str, value: float, dev: DeviceModel | None, base: dict, tol: float | None) -> float:
    dev, b = _apply_axis(axis, value, dev, base)
    if measure == "swap_infidelity":
        return swap_pulse_infidelity(dev, b.get("qubit", 0), n_winding=b.get("n_winding", 1),
                                     level=b.get("level", "exact"), drive_scale=b.get("drive_scale", 1.0))
    if measure == "sideband_infidelity":
        return sideband_transfer_infidelity(dev, b.get("qubit", 0), b.get("level", "exact"), b.get("drive_scale", 1.0))
    if measure == "cnot_fidelity":
        return cnot_report(dev, b.get("control", 0), b.get("target", 1), b.get("variant", "verified"), b.get("beta_j", 0.0)).fidelity
    if measure == "transfer_fidelity":
        return run_transfer(_transfer_params(b, tol))[0].summary()["final_fidelity"]
    if measure == "cphase_entangling_phase":
        return cphase_entangling_phase(dev, b["t"])
    raise InputError(f"unknown measure {measure!r}")


def cmd_sweep(sc: Scenario, out: str | None, tol: float | None) -> int:
    p = sc.params
    axis, measure = p["axis"], p["measure"]
    if axis not in SWEEP_AXES:
        raise InputError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if axis not in MEASURE_AXES[measure]:
        raise InputError(f"axis {axis!r} does not apply to {measure!r}")
    dev = sc.device() if measure in NEEDS_DEVICE else None
    base = p.get("base", {})
    grid = [float(x) for x in p["grid"]]
    if measure == "transfer_fidelity":
        for key in ("kappa", "g", "e_j0"):
            if key not in base and key != axis:
                raise InputError(f"transfer sweep base needs {key!r}")
        if "window" not in base and axis != "duration":
            raise InputError("transfer sweep base needs 'window'")
    if measure == "cphase_entangling_phase" and "t" not in base and axis != "duration":
        raise InputError("cphase sweep base needs 't'")
    with ThreadPoolExecutor(max_workers=p.get("workers", 1)) as pool:
        values = list(pool.map(lambda v: sweep_point(measure, axis, v, dev, base, tol), grid))
    checks = []
    if "monotone" in p:
        d = np.diff(values)
        ok = bool(np.all(d > 0) if p["monotone"] == "increasing" else np.all(d < 0))
        checks.append(_check("monotone", p["monotone"], p["monotone"], ok))
    passed = all(c["pass"] for c in checks)
    meta = {"config": _resolved(sc, dev, tol), "checks": checks, "passed": passed}
    write_csv(sc.output(out, ".csv"), f"{axis},{measure}", zip(grid, values), meta=meta)
    return EXIT_OK if passed else EXIT_NUMERIC


# spectrum

def spectrum_matrix(dev: DeviceModel, p: dict) -> np.ndarray:
    if "builder" in p:
        k = p.get("qubit", 0)
        b = p["builder"]
        if b in ("ha", "hb"):
            return build_rotating_ha_hb(dev, k, b[1])
        return build_sideband_h(dev, k, b.split("_")[1])
    spec = HamiltonianSpec(dev, p.get("level", "exact"), p.get("frame", "lab"), frozenset(p.get("terms", ["h0", "hint"])))
    return build(spec).matrix


def cmd_spectrum(sc: Scenario, out: str | None, tol: float | None) -> int:
    dev = sc.device()
    h = spectrum_matrix(dev, sc.params)
    ev = np.sort(np.linalg.eigvalsh(h))
    checks = []
    p = sc.params
    if "expected" in p:
        want = np.sort(np.asarray(p["expected"], dtype=float))
        atol = p.get("atol", 1e-11)
        dev_max = float(np.max(np.abs(ev - want))) if want.shape == ev.shape else None
        checks.append(_check("eigenvalues", dev_max, atol, dev_max is not None and dev_max <= atol))
    passed = all(c["pass"] for c in checks)
    meta = {"config": _resolved(sc, dev, tol), "checks": checks, "passed": passed}
    write_csv(sc.output(out, ".csv"), "index,eigenvalue", enumerate(ev), meta=meta)
    return EXIT_OK if passed else EXIT_NUMERIC


HANDLERS = {
    "gate-audit": cmd_gate_audit,
    "schedule": cmd_schedule,
    "transfer": cmd_transfer,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sim", description="Charge-qubit / cavity simulator batch runner")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", required=True)
        s.add_argument("--out")
        s.add_argument("--tol", type=float)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.tol is not None and not args.tol > 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        sc = load_scenario(args.config, COMMANDS[args.command])
        return HANDLERS[args.command](sc, args.out, args.tol)
    except np.linalg.LinAlgError as exc:
        print(f"error: linear algebra failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except jsonschema.ValidationError as exc:
        print(f"error: invalid config: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, IndexError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
