"""Scalar measures shared by the command line, scripts and tests."""

from __future__ import annotations

import numpy as np

from .device import DeviceModel
from .gates import (
    basis_index,
    cnot_composition,
    conditional_phase,
    entangling_phase,
    swap_audit,
)
from .hamiltonians import ApproximationLevel, Frame
from .operators import GateReport
from .schedule import segment_propagator, sideband_segment, swap_segment
from .transfer import (
    PulsePair,
    TransferParams,
    TransferTrajectory,
    closed_form_pulses,
    integrate_transfer,
    solve_receiver_pulse,
    zero_pulses,
)

PULSE_SOURCES = ("closed_form", "closed_form_mirrored", "solved_no_reflection", "zero")


def sideband_transfer_infidelity(
    device: DeviceModel,
    k: int = 0,
    level: ApproximationLevel | str = ApproximationLevel.EXACT,
    drive_scale: float = 1.0,
    method: str = "expm",
) -> float:
    """1 - |<1_k, 0| U |0_k, 1>|^2 for a simulated R+(pi, 0) pulse on qubit k."""
    seg = sideband_segment(device, k, "blue", np.pi, level, Frame.ROTATING, drive_scale)
    u = segment_propagator(seg, device, method)
    zeros = [0] * device.n_qubits
    one = list(zeros)
    one[k] = 1
    src = basis_index(device, zeros, 1)
    dst = basis_index(device, one, 0)
    return float(1.0 - abs(u[dst, src]) ** 2)


def swap_pulse_report(
    device: DeviceModel,
    k: int = 0,
    n_winding: int = 1,
    level: ApproximationLevel | str = ApproximationLevel.EXACT,
    drive_scale: float = 1.0,
    method: str = "expm",
) -> GateReport:
    """Mapping audit of a simulated qubit-to-photon swap pulse."""
    seg = swap_segment(device, k, n_winding, False, level, Frame.ROTATING, drive_scale)
    u = segment_propagator(seg, device, method)
    return swap_audit(u, device, k)


def swap_pulse_infidelity(device: DeviceModel, k: int = 0, **kw) -> float:
    return 1.0 - swap_pulse_report(device, k, **kw).fidelity


def cnot_report(device: DeviceModel, control: int = 0, target: int = 1, variant: str = "verified", beta_j: float = 0.0) -> GateReport:
    return cnot_composition(control, target, device, variant, beta_j)[1]


def cphase_entangling_phase(device: DeviceModel, t: float) -> float:
    return entangling_phase(conditional_phase(t, device))


def transfer_params_from(d: dict) -> TransferParams:
    return TransferParams(
        kappa=d["kappa"],
        g=d["g"],
        e_j0=d["e_j0"],
        cascade_factor=d.get("cascade_factor", 2.0),
        coupling_variant=d.get("coupling_variant", "cascaded"),
    )


def make_pulses(source: str, params: TransferParams, window: tuple[float, float]) -> PulsePair:
    """Pulse pair by name; the solved receiver is driven by the mirrored closed-form sender."""
    if source == "closed_form":
        return closed_form_pulses(params, "hold")
    if source == "closed_form_mirrored":
        return closed_form_pulses(params, "mirrored")
    if source == "solved_no_reflection":
        sender = closed_form_pulses(params, "mirrored")
        return solve_receiver_pulse(sender.gamma1, params, window, breakpoints=sender.breakpoints)
    if source == "zero":
        return zero_pulses()
    raise ValueError(f"unknown pulse source {source!r}")


def run_transfer(d: dict) -> tuple[TransferTrajectory, PulsePair, TransferParams]:
    """Transfer run from a plain parameter dict (the scenario ``params`` block)."""
    params = transfer_params_from(d)
    window = tuple(float(x) for x in d["window"])
    if not window[1] > window[0]:
        raise ValueError("window end must exceed its start")
    pulses = make_pulses(d.get("pulse_source", "solved_no_reflection"), params, window)
    traj = integrate_transfer(pulses, params, window, tol=d.get("tol", 1e-10), samples=d.get("samples", 241))
    return traj, pulses, params
