"""Ideal gate constructions and their audits."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from jjcavity.device import (
    DeviceModel,
    QubitParams,
    beta_mixing,
    charging_bias,
    ej_effective,
    ej_symmetric,
)
from jjcavity.hamiltonians import (
    build_capacitive_h2,
    build_h0,
    qubit_op,
    sideband_generator,
)
from jjcavity.operators import (
    HADAMARD,
    I2,
    SX,
    SY,
    SZ,
    GateReport,
    audit,
    expm,
    extract_block,
    makhlin_invariants,
)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
DEGENERACY_TOL = 1e-12
CZ = np.diag([1, 1, 1, -1]).astype(complex)


class DegenerateQubitError(ValueError):
    """The qubit Hamiltonian vanishes, so there is no rotation axis."""


def basis_index(device: DeviceModel, bits: Sequence[int], n: int = 0) -> int:
    """Index of |bits[0] ... bits[N-1]> (x) |n> in the full product basis."""
    if len(bits) != device.n_qubits:
        raise ValueError("need one bit per qubit")
    if not 0 <= n < device.cavity.n_ph:
        raise ValueError(f"photon number {n} outside the truncation")
    q = 0
    for b in bits:
        q = 2 * q + int(b)
    return q * device.cavity.n_ph + n


def basis_state(device: DeviceModel, bits: Sequence[int], n: int = 0) -> np.ndarray:
    psi = np.zeros(device.dim, dtype=complex)
    psi[basis_index(device, bits, n)] = 1
    return psi


def product_state(device: DeviceModel, qubit_states: Sequence[np.ndarray], n: int = 0) -> np.ndarray:
    fock = np.zeros(device.cavity.n_ph, dtype=complex)
    fock[n] = 1
    psi = np.ones(1, dtype=complex)
    for s in qubit_states:
        psi = np.kron(psi, np.asarray(s, dtype=complex))
    return np.kron(psi, fock)


def two_qubit_indices(device: DeviceModel, first: int, second: int, n: int = 0) -> list[int]:
    """Indices of |ab> on (first, second) with every other qubit in |0> and n photons.

    Ordered 00, 01, 10, 11 with ``first`` as the more significant bit.
    """
    out = []
    for a in (0, 1):
        for b in (0, 1):
            bits = [0] * device.n_qubits
            bits[first] = a
            bits[second] = b
            out.append(basis_index(device, bits, n))
    return out


def u_single(gamma: float, axis: Sequence[float]) -> np.ndarray:
    """exp(-i gamma sigma.n) = cos(gamma) I - i sin(gamma) sigma.n"""
    nx, ny, nz = axis
    if abs(np.sqrt(nx * nx + ny * ny + nz * nz) - 1) > 1e-10:
        raise ValueError("rotation axis must be a unit vector")
    sn = nx * SX + ny * SY + nz * SZ
    return np.cos(gamma) * I2 - 1j * np.sin(gamma) * sn


def single_qubit_h(q: QubitParams) -> np.ndarray:
    """Decoupled qubit: E_nbar sigma_z - E_J (cos(beta) sigma_x - sin(beta) sigma_y)."""
    ej = ej_effective(q)
    b = beta_mixing(q) if q.e_j1 + q.e_j2 > 0 else 0.0
    return charging_bias(q) * SZ - ej * (np.cos(b) * SX - np.sin(b) * SY)


def axis_from_params(q: QubitParams) -> tuple[float, np.ndarray]:
    """Rotation rate E_k and unit axis of the decoupled single-qubit Hamiltonian.

    The propagator over time t is u_single(E_k * t, axis).
    """
    ej = ej_effective(q)
    b = beta_mixing(q) if q.e_j1 + q.e_j2 > 0 else 0.0
    e_bias = charging_bias(q)
    e_k = float(np.hypot(ej, e_bias))
    if e_k <= DEGENERACY_TOL * (q.e_j1 + q.e_j2 + q.e_ch):
        raise DegenerateQubitError("E_J and E_nbar both vanish; no rotation axis")
    return e_k, np.array([-ej * np.cos(b), ej * np.sin(b), e_bias]) / e_k


def noncommuting_pair_check(u1: np.ndarray, u2: np.ndarray) -> float:
    return float(np.max(np.abs(u1 @ u2 - u2 @ u1)))


def phase_gate(zeta: float) -> np.ndarray:
    """Z(zeta) = diag(1, exp(i zeta))."""
    return np.diag([1, np.exp(1j * zeta)]).astype(complex)


def r_sideband(theta: float, beta: float, branch: str, k: int, device: DeviceModel) -> np.ndarray:
    """R_k^{+/-}(theta, beta) = exp[-i theta/2 (i e^{-i beta} sigma_plus a^{(dag)} + h.c.)]."""
    return expm(sideband_generator(device, k, branch, beta), theta / 2)


def composite_phase_pulse(k: int, device: DeviceModel) -> np.ndarray:
    """P_k = R+(-pi/2, 0) R+(-pi sqrt2, -pi/2) R+(pi/2, 0).

    On photon numbers 0 and 1 this is diagonal: |n, t> picks up
    pi n t + (pi / sqrt2)(t - n). The sqrt2-faster |1_k, 1> <-> |0_k, 2> line
    completes a full 2 pi cycle, so nothing is left outside n <= 1.
    """
    r = np.sqrt(2)
    return (
        r_sideband(-np.pi / 2, 0.0, "blue", k, device)
        @ r_sideband(-np.pi * r, -np.pi / 2, "blue", k, device)
        @ r_sideband(np.pi / 2, 0.0, "blue", k, device)
    )


def _check_pair(device: DeviceModel, j: int, k: int):
    if j == k:
        raise ValueError("control and target must differ")
    for i in (j, k):
        if not 0 <= i < device.n_qubits:
            raise IndexError(f"qubit {i} not in device")
    if device.cavity.n_ph < 3:
        raise ValueError("the composite pulse visits two photons; need n_ph >= 3")


def cnot_literal(
    j: int, k: int, device: DeviceModel, beta_j: float = 0.0, z_convention: str = "diag"
) -> np.ndarray:
    """The literal sideband CNOT sequence, on the full space.

    Z_j(zeta) R_j^-(pi, beta_j) H_k P_k Z_k(zeta) H_k R_j^-(pi, beta_j),
    zeta = -pi / (2 sqrt2). ``z_convention`` picks Z(zeta) = diag(1, e^{i zeta})
    ("diag") or exp(-i zeta sigma_z) ("rotation").
    """
    _check_pair(device, j, k)
    zeta = -np.pi / (2 * np.sqrt(2))
    if z_convention == "diag":
        z = phase_gate(zeta)
    elif z_convention == "rotation":
        z = u_single(zeta, (0, 0, 1))
    else:
        raise ValueError(f"unknown z_convention {z_convention!r}")
    had = qubit_op(device, k, HADAMARD)
    red = r_sideband(np.pi, beta_j, "red", j, device)
    return (
        qubit_op(device, j, z)
        @ red
        @ had
        @ composite_phase_pulse(k, device)
        @ qubit_op(device, k, z)
        @ had
        @ red
    )


def cnot_verified(j: int, k: int, device: DeviceModel, beta_j: float = 0.0) -> np.ndarray:
    """Sideband CNOT that equals CNOT(j -> k) on the photon vacuum.

    X_j then R_j^-(pi) move the control value c into the photon (n = c) and
    leave qubit j in |1>. P_k then applies pi n t + (pi/sqrt2)(t - n); the
    target part is removed by Z_k(-pi/sqrt2) and the photon part, by then
    carried back onto the control, by Z_j(pi/sqrt2). The Hadamards turn the
    remaining controlled-Z into CNOT.
    """
    _check_pair(device, j, k)
    r2 = np.sqrt(2)
    had = qubit_op(device, k, HADAMARD)
    x = qubit_op(device, j, SX)
    return (
        qubit_op(device, j, phase_gate(np.pi / r2))
        @ x
        @ r_sideband(-np.pi, beta_j, "red", j, device)
        @ had
        @ qubit_op(device, k, phase_gate(-np.pi / r2))
        @ composite_phase_pulse(k, device)
        @ had
        @ r_sideband(np.pi, beta_j, "red", j, device)
        @ x
    )


def cnot_composition(
    j: int, k: int, device: DeviceModel, variant: str = "verified", beta_j: float = 0.0
) -> tuple[np.ndarray, GateReport]:
    """Build a sideband CNOT and audit its photon-vacuum block against CNOT."""
    if variant == "verified":
        u = cnot_verified(j, k, device, beta_j)
    elif variant == "literal":
        u = cnot_literal(j, k, device, beta_j)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    keep = two_qubit_indices(device, j, k)
    return u, audit(f"cnot_{variant}", u, CNOT, keep)


def conditional_phase_energies(device: DeviceModel) -> np.ndarray:
    """Energies of |00>, |01>, |10>, |11> with both SQUIDs at half flux."""
    h = build_h0(device, fock=False) + build_capacitive_h2(device, fock=False)
    return np.diag(h).real.copy()


def conditional_phase(t: float, device: DeviceModel, tol: float = 1e-12) -> np.ndarray:
    """diag(exp(i gamma_ab)) with gamma_ab = -omega_ab t."""
    if device.n_qubits != 2:
        raise ValueError("conditional phase gate needs exactly two qubits")
    for k, q in enumerate(device.qubits):
        if not q.symmetric:
            raise ValueError(f"qubit {k} is not a symmetric SQUID")
        if abs(ej_symmetric(q.e_j1, q.flux_ratio)) > tol * max(q.e_j1, 1.0):
            raise ValueError(f"qubit {k} is not decoupled (flux_ratio must be half-integer)")
    if device.capacitive_ec <= 0:
        raise ValueError("conditional phase gate needs capacitive_ec > 0")
    return np.diag(np.exp(-1j * conditional_phase_energies(device) * t))


def entangling_phase(u: np.ndarray) -> float:
    """gamma_00 + gamma_11 - gamma_01 - gamma_10 wrapped to (-pi, pi]."""
    d = np.diag(u)
    x = np.angle(d[0] * d[3] / (d[1] * d[2]))
    return float(x)


def swap_rate(k: int, device: DeviceModel) -> float:
    """Gamma_k = g E_J0(f_k) / 2 for a symmetric SQUID."""
    q = device.qubits[k]
    if not q.symmetric:
        raise ValueError(f"qubit {k} is not a symmetric SQUID")
    return 0.5 * device.cavity.g * ej_symmetric(q.e_j1, q.flux_ratio)


def u_kp(angle: float, k: int, device: DeviceModel) -> np.ndarray:
    """exp[-i angle (i sigma_plus a + h.c.)]; ``angle`` is Gamma_k t."""
    return expm(sideband_generator(device, k, "blue", 0.0), angle)


def swap_angle(n_winding: int, absorb: bool = False) -> float:
    """(2n - 1/2) pi for emission; (2n + 1/2) pi for absorption."""
    return (2 * n_winding + (0.5 if absorb else -0.5)) * np.pi


def swap_qubit_photon(k: int, n_winding: int, device: DeviceModel, absorb: bool = False) -> np.ndarray:
    """U_kp at Gamma_k t = (2n - 1/2) pi.

    Maps (a|0_k> + b|1_k>)|0> to |0_k>(a|0> + b|1>). With ``absorb`` the
    angle is (2n + 1/2) pi, the inverse map |0_k>(a|0> + b|1>) -> (a|0_k> + b|1_k>)|0>.
    """
    q = device.qubits[k]
    if abs(swap_rate(k, device)) <= DEGENERACY_TOL * device.cavity.g * q.e_j1:
        raise DegenerateQubitError(f"qubit {k} is decoupled from the cavity (Gamma_k = 0)")
    return u_kp(swap_angle(n_winding, absorb), k, device)


def swap_qubit_qubit(j: int, k: int, device: DeviceModel, n_winding: int = 1, literal: bool = False) -> np.ndarray:
    """Move the state of qubit k onto qubit j through the cavity.

    The default absorbs on j with the (2n + 1/2) pi angle, which lands
    a|0_j> + b|1_j>. ``literal=True`` reuses the emission angle on j,
    which lands a|0_j> - b|1_j> (a sigma_z on j).
    """
    if j == k:
        raise ValueError("qubits must differ")
    emit = swap_qubit_photon(k, n_winding, device)
    take = swap_qubit_photon(j, n_winding, device, absorb=not literal)
    return take @ emit


def swap_audit(u: np.ndarray, device: DeviceModel, k: int, j: int | None = None) -> GateReport:
    """Mapping audit of a swap: inputs |0/1 on k> (photon 0) against their targets."""
    zeros = [0] * device.n_qubits
    b1 = list(zeros)
    b1[k] = 1
    keep = [basis_index(device, zeros, 0), basis_index(device, b1, 0)]
    if j is None:
        out = [basis_index(device, zeros, 0), basis_index(device, zeros, 1)]
        name = "swap_qubit_photon"
    else:
        bj = list(zeros)
        bj[j] = 1
        out = [basis_index(device, zeros, 0), basis_index(device, bj, 0)]
        name = "swap_qubit_qubit"
    return audit(name, u, np.eye(2), keep, out)


def state_fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    return float(abs(np.vdot(phi, psi)) ** 2)
