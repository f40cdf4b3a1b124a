"""Piecewise-constant pulse schedules and their simulation.

Each segment holds every control fixed, so its lab-frame generator is time
independent and the propagator is a single matrix exponential. In the
rotating frame a segment reports U0(tau)^dag U_lab(tau) with U0 generated
by that segment's own H0, the frame in which the ideal sideband gates are defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Sequence

import jsonschema
import numpy as np

from jjcavity.device import (
    DeviceModel,
    charging_bias,
    ej_effective,
    n_bar_for_bias,
    solve_flux_for_ej,
)
from jjcavity.gates import basis_state, swap_angle
from jjcavity.hamiltonians import (
    RESONANCE_TOL,
    ApproximationLevel,
    Frame,
    build_h0,
    build_lab,
    build_rwa,
    resonant_bias,
    rotating_hamiltonian,
)
from jjcavity.operators import IntegrationError, expm, integrate_tdse, unitarity_residual

IDLE = (0.5, 0.5)


@dataclass(frozen=True)
class PulseSegment:
    duration: float
    settings: dict = field(default_factory=dict)
    frame: Frame = Frame.ROTATING
    level: ApproximationLevel = ApproximationLevel.EXACT

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError("segment duration must be positive")
        object.__setattr__(self, "frame", Frame(self.frame))
        object.__setattr__(self, "level", ApproximationLevel(self.level))
        object.__setattr__(self, "settings", {int(k): (float(v[0]), float(v[1])) for k, v in self.settings.items()})

    def resolved(self, n_qubits: int) -> dict[int, tuple[float, float]]:
        """Settings for every qubit; unlisted qubits idle at n_bar = flux = 1/2."""
        extra = set(self.settings) - set(range(n_qubits))
        if extra:
            raise ValueError(f"settings refer to unknown qubits {sorted(extra)}")
        return {k: self.settings.get(k, IDLE) for k in range(n_qubits)}

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "frame": self.frame.value,
            "level": self.level.value,
            "settings": [
                {"qubit": k, "n_bar": nb, "flux_ratio": f} for k, (nb, f) in sorted(self.settings.items())
            ],
        }


@dataclass(frozen=True)
class Schedule:
    segments: tuple[PulseSegment, ...]
    initial_state: object = None

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise ValueError("a schedule needs at least one segment")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))


def _schema() -> dict:
    return json.loads(resources.files("jjcavity.schemas").joinpath("schedule.schema.json").read_text())


def resolve_state(spec, device: DeviceModel) -> np.ndarray | None:
    """Turn a state description into an amplitude vector.

    Accepts None, an amplitude array, {"qubits": [bits], "n": photons}, or
    {"amplitudes": [[re, im], ...]}.
    """
    if spec is None:
        return None
    if isinstance(spec, dict):
        if "amplitudes" in spec:
            psi = np.array([complex(re, im) for re, im in spec["amplitudes"]])
        else:
            psi = basis_state(device, spec["qubits"], spec.get("n", 0))
    else:
        psi = np.asarray(spec, dtype=complex)
    if psi.shape != (device.dim,):
        raise ValueError(f"state has {psi.size} amplitudes, device needs {device.dim}")
    return psi


def schedule_from_dict(d: dict) -> Schedule:
    jsonschema.validate(d, _schema())
    segs = []
    for s in d["segments"]:
        settings = {e["qubit"]: (e.get("n_bar", 0.5), e.get("flux_ratio", 0.5)) for e in s.get("settings", [])}
        segs.append(PulseSegment(s["duration"], settings, s.get("frame", "rotating"), s.get("level", "exact")))
    return Schedule(tuple(segs), d.get("initial_state"))


def schedule_to_dict(s: Schedule) -> dict:
    d = {"segments": [seg.to_dict() for seg in s.segments]}
    if isinstance(s.initial_state, dict):
        d["initial_state"] = s.initial_state
    elif s.initial_state is not None:
        d["initial_state"] = {"amplitudes": [[float(a.real), float(a.imag)] for a in np.asarray(s.initial_state)]}
    return d


def resonance_residuals(device: DeviceModel) -> list[dict]:
    """Distance of each qubit's bias from its nearest line (carrier/blue/red)."""
    out = []
    for k, q in enumerate(device.qubits):
        bias = charging_bias(q)
        best = min(("carrier", "blue", "red"), key=lambda b: abs(bias - resonant_bias(b, device.cavity.nu)))
        out.append({"qubit": k, "line": best, "residual": abs(bias - resonant_bias(best, device.cavity.nu))})
    return out


def segment_propagator(seg: PulseSegment, device: DeviceModel, method: str = "expm", tol: float = 1e-10) -> np.ndarray:
    dev = device.with_controls(seg.resolved(device.n_qubits))
    tau = seg.duration
    if seg.level is ApproximationLevel.SIDEBAND_RWA and seg.frame is Frame.ROTATING and method == "expm":
        return expm(build_rwa(dev), tau)
    if method == "expm":
        u = expm(build_lab(dev, seg.level), tau)
        if seg.frame is Frame.ROTATING:
            h0 = np.diag(build_h0(dev)).real
            u = np.exp(1j * h0 * tau)[:, None] * u
        return u
    if method == "ode":
        if seg.frame is Frame.LAB:
            h = build_lab(dev, seg.level)
            return integrate_tdse(lambda t: h, np.eye(dev.dim, dtype=complex), 0.0, tau, tol)
        return integrate_tdse(
            lambda t: rotating_hamiltonian(dev, seg.level, t), np.eye(dev.dim, dtype=complex), 0.0, tau, tol
        )
    raise ValueError(f"unknown method {method!r}")


def run_schedule(
    s: Schedule, device: DeviceModel, method: str = "expm", tol: float = 1e-10
) -> tuple[np.ndarray, dict]:
    """Evolve segment by segment.

    Returns the final state when the schedule has an initial state, otherwise
    the total propagator, plus a diagnostics dict.
    """
    psi = resolve_state(s.initial_state, device)
    total = np.eye(device.dim, dtype=complex)
    diag = {"segments": []}
    for i, seg in enumerate(s.segments):
        try:
            u = segment_propagator(seg, device, method, tol)
        except IntegrationError as exc:
            raise IntegrationError(f"segment {i}: {exc}", segment=i) from exc
        total = u @ total
        diag["segments"].append(
            {
                "index": i,
                "unitarity_residual": unitarity_residual(u),
                "resonance": resonance_residuals(device.with_controls(seg.resolved(device.n_qubits))),
            }
        )
    if psi is None:
        diag["norm_drift"] = unitarity_residual(total)
        return total, diag
    out = total @ psi
    diag["norm_drift"] = float(abs(np.vdot(out, out).real - np.vdot(psi, psi).real))
    return out, diag


def sideband_drive_energy(device: DeviceModel, scale: float = 1.0) -> float:
    """Josephson energy for a resolved sideband pulse, scale * g^2 * nu.

    The off-resonant carrier light-shifts the qubit by about E_J^2 / (2 nu);
    against the sideband Rabi rate g E_J that is a ratio of scale * g / 2, so
    the residual infidelity of the pulse falls off like g^2.
    """
    c = device.cavity
    return scale * c.g * c.g * c.nu


def sideband_segment(
    device: DeviceModel,
    k: int,
    branch: str,
    theta: float,
    level: ApproximationLevel | str = ApproximationLevel.EXACT,
    frame: Frame | str = Frame.ROTATING,
    drive_scale: float = 1.0,
) -> PulseSegment:
    """Pulse on a symmetric qubit k realising R_k^{+/-}(theta, 0)."""
    q = device.qubits[k]
    if not q.symmetric:
        raise ValueError("sideband pulse design assumes a symmetric SQUID")
    ej = sideband_drive_energy(device, drive_scale)
    flux = solve_flux_for_ej(ej, q.e_j1)
    n_bar = n_bar_for_bias(resonant_bias(branch, device.cavity.nu), q.e_ch)
    realised = ej_effective(q.with_controls(n_bar, flux))
    duration = abs(theta) / (device.cavity.g * realised)
    if theta < 0:
        raise ValueError("negative pulse areas need a pi phase shift, not supported by flux control")
    return PulseSegment(duration, {k: (n_bar, flux)}, frame, level)


def swap_segment(
    device: DeviceModel,
    k: int,
    n_winding: int = 1,
    absorb: bool = False,
    level: ApproximationLevel | str = ApproximationLevel.EXACT,
    frame: Frame | str = Frame.ROTATING,
    drive_scale: float = 1.0,
) -> PulseSegment:
    """Blue-line pulse with Gamma_k t equal to the swap angle."""
    angle = swap_angle(n_winding, absorb)
    if angle <= 0:
        raise ValueError("swap pulse needs a positive angle; use n_winding >= 1")
    return sideband_segment(device, k, "blue", 2 * angle, level, frame, drive_scale)
