"""Hamiltonians on qubit_1 (x) ... (x) qubit_N (x) Fock(n_ph).

Conventions fixed here and used everywhere else:

* |0> is the +1 eigenstate of sigma_z; the charge term of qubit k is
  E_k sigma_z with E_k = e_ch (n_bar - 1/2), so the |0> -> |1> transition
  energy is -2 E_k.
* sigma_plus = |1><0| raises the box charge by one Cooper pair.
* The interaction keeps the 1/2 prefactor of the charge-basis tunnelling
  term, -(1/2) E_J (exp(-i[g(a + a^dag) + beta]) sigma_plus + h.c.). Its first
  order in g gives the sideband generator (E_J g / 2)(i e^{-i beta} sigma_plus a + h.c.).

Sideband labels follow the source: "blue" couples |0, n> <-> |1, n-1>
(sigma_plus a), "red" couples |0, n> <-> |1, n+1> (sigma_plus a^dag). Trapped-ion
texts call these the other way round. With the conventions above the blue
line is resonant at E_k = -nu/2 and the red line at E_k = +nu/2.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from jjcavity.device import DeviceModel, beta_mixing, charging_bias, ej_effective, ej_symmetric
from jjcavity.operators import (
    DIM_CAP,
    NUM,
    SPLUS,
    SX,
    SZ,
    DimensionError,
    annihilation,
    embed,
    expm,
    kron,
    number_op,
)

RESONANCE_TOL = 1e-9


class ApproximationLevel(str, enum.Enum):
    EXACT = "exact"
    LAMB_DICKE = "lamb_dicke_first_order"
    SIDEBAND_RWA = "sideband_rwa"


class Frame(str, enum.Enum):
    LAB = "lab"
    ROTATING = "rotating"


class ResonanceError(ValueError):
    pass


def _dims(device: DeviceModel, fock: bool = True) -> list[int]:
    dims = [2] * device.n_qubits
    if fock:
        dims.append(device.cavity.n_ph)
    if int(np.prod(dims)) > DIM_CAP:
        raise DimensionError(f"Hilbert space dimension {int(np.prod(dims))} exceeds cap {DIM_CAP}")
    return dims


def qubit_op(device: DeviceModel, k: int, op: np.ndarray, fock: bool = True) -> np.ndarray:
    return embed(op, k, _dims(device, fock))


def qubit_photon_op(device: DeviceModel, k: int, qop: np.ndarray, fop: np.ndarray) -> np.ndarray:
    dims = _dims(device)
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[k] = qop
    factors[-1] = fop
    return kron(factors)


def photon_op(device: DeviceModel, fop: np.ndarray) -> np.ndarray:
    dims = _dims(device)
    return embed(fop, len(dims) - 1, dims)


def displacement(g: float, n_ph: int) -> np.ndarray:
    """exp(-i g (a + a^dag)) evaluated on the truncated Fock space."""
    a = annihilation(n_ph)
    return expm(a + a.conj().T, g)


def transition_energy(device: DeviceModel, k: int) -> float:
    """Energy of |1_k> minus |0_k> from the charge term alone."""
    return -2.0 * charging_bias(device.qubits[k])


def resonant_bias(branch: str, nu: float) -> float:
    """Charging bias E_k that puts the blue or red line on resonance."""
    if branch == "blue":
        return -nu / 2
    if branch == "red":
        return nu / 2
    if branch == "carrier":
        return 0.0
    raise ValueError(f"unknown branch {branch!r}")


def classify_resonance(device: DeviceModel, k: int, tol: float = RESONANCE_TOL) -> str | None:
    """Which line of qubit k is resonant: 'blue', 'red', 'carrier' or None."""
    bias = charging_bias(device.qubits[k])
    nu = device.cavity.nu
    for branch in ("carrier", "blue", "red"):
        if abs(bias - resonant_bias(branch, nu)) <= tol:
            return branch
    return None


def build_h0(device: DeviceModel, fock: bool = True) -> np.ndarray:
    """nu (a^dag a + 1/2) + sum_k E_k sigma_z^k; diagonal in the product basis."""
    dims = _dims(device, fock)
    h = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    if fock:
        n_ph = device.cavity.n_ph
        h += photon_op(device, device.cavity.nu * (number_op(n_ph) + 0.5 * np.eye(n_ph)))
    for k, q in enumerate(device.qubits):
        h += charging_bias(q) * embed(SZ, k, dims)
    return h


def _tunnelling(device: DeviceModel, photon_factor: np.ndarray, amplitudes) -> np.ndarray:
    h = np.zeros((device.dim, device.dim), dtype=complex)
    for k, amp in enumerate(amplitudes):
        if amp == 0:
            continue
        v = amp * qubit_photon_op(device, k, SPLUS, photon_factor)
        h += -0.5 * (v + v.conj().T)
    return h


def _complex_ej(device: DeviceModel) -> list[complex]:
    return [ej_effective(q) * np.exp(-1j * beta_mixing(q)) if (q.e_j1 + q.e_j2) > 0 else 0.0 for q in device.qubits]


def build_hint_exact(device: DeviceModel) -> np.ndarray:
    """Qubit-cavity interaction with the full displacement factor."""
    c = device.cavity
    return _tunnelling(device, displacement(c.g, c.n_ph), _complex_ej(device))


def build_hint_lamb_dicke(device: DeviceModel) -> np.ndarray:
    """Interaction with exp(-i g (a + a^dag)) replaced by 1 - i g (a + a^dag)."""
    c = device.cavity
    a = annihilation(c.n_ph)
    factor = np.eye(c.n_ph) - 1j * c.g * (a + a.conj().T)
    return _tunnelling(device, factor, _complex_ej(device))


def _require_resonance(device: DeviceModel, k: int, branch: str, tol: float):
    bias = charging_bias(device.qubits[k])
    want = resonant_bias(branch, device.cavity.nu)
    if abs(bias - want) > tol:
        raise ResonanceError(f"qubit {k}: {branch} line needs E_nbar={want:.12g}, got {bias:.12g}")


def sideband_generator(device: DeviceModel, k: int, branch: str, beta: float) -> np.ndarray:
    """i e^{-i beta} sigma_plus a + h.c. (blue) or the a^dag version (red)."""
    a = annihilation(device.cavity.n_ph)
    fop = a if branch == "blue" else a.conj().T
    if branch not in ("blue", "red"):
        raise ValueError(f"branch must be 'blue' or 'red', got {branch!r}")
    v = 1j * np.exp(-1j * beta) * qubit_photon_op(device, k, SPLUS, fop)
    return v + v.conj().T


def build_sideband_h(device: DeviceModel, k: int, branch: str, check: bool = True, tol: float = RESONANCE_TOL) -> np.ndarray:
    """Resonant sideband Hamiltonian of qubit k in the rotating frame.

    Evolving for time t gives R_k^{+/-}(theta, beta) with theta = E_J g t.
    """
    if check:
        _require_resonance(device, k, branch, tol)
    q = device.qubits[k]
    ej = ej_effective(q)
    return 0.5 * ej * device.cavity.g * sideband_generator(device, k, branch, beta_mixing(q))


def build_rwa(device: DeviceModel, tol: float = RESONANCE_TOL) -> np.ndarray:
    """Rotating-frame Hamiltonian keeping only the resonant first-order terms.

    Qubits at the degeneracy point keep their carrier term, qubits on a
    sideband resonance keep that sideband, all others contribute nothing.
    The result commutes with build_h0, so H0 + build_rwa is the matching
    lab-frame generator.
    """
    h = np.zeros((device.dim, device.dim), dtype=complex)
    n_ph = device.cavity.n_ph
    for k, q in enumerate(device.qubits):
        if q.e_j1 + q.e_j2 == 0:
            continue
        branch = classify_resonance(device, k, tol)
        if branch == "carrier":
            v = ej_effective(q) * np.exp(-1j * beta_mixing(q)) * qubit_photon_op(device, k, SPLUS, np.eye(n_ph))
            h += -0.5 * (v + v.conj().T)
        elif branch in ("blue", "red"):
            h += build_sideband_h(device, k, branch, check=False)
    return h


def build_symmetric_h1(device: DeviceModel) -> np.ndarray:
    """Symmetric-SQUID interaction with signed energies 2 e_j0 cos(pi f)."""
    for k, q in enumerate(device.qubits):
        if not q.symmetric:
            raise ValueError(f"qubit {k} is not a symmetric SQUID")
    c = device.cavity
    amps = [ej_symmetric(q.e_j1, q.flux_ratio) for q in device.qubits]
    return _tunnelling(device, displacement(c.g, c.n_ph), amps)


def build_capacitive_h2(device: DeviceModel, fock: bool = True) -> np.ndarray:
    """E_c sum over chain neighbours of (n_bar_i - n_i)(n_bar_j - n_j)."""
    if device.n_qubits < 2:
        raise ValueError("capacitive coupling needs at least two qubits")
    dims = _dims(device, fock)
    d = int(np.prod(dims))
    h = np.zeros((d, d), dtype=complex)
    if device.capacitive_ec == 0:
        return h
    ident = np.eye(d, dtype=complex)
    charge = [q.n_bar * ident - embed(NUM, k, dims) for k, q in enumerate(device.qubits)]
    for i in range(device.n_qubits - 1):
        h += device.capacitive_ec * charge[i] @ charge[i + 1]
    return h


def build_rotating_ha_hb(device: DeviceModel, k: int, which: str, tol: float = RESONANCE_TOL) -> np.ndarray:
    """Single-qubit rotating-frame Hamiltonians of a symmetric SQUID.

    which='a' (degeneracy point): -E_J0(f_k) sigma_x, with the normalisation
    used for this gate, twice the carrier of the interaction term.
    which='b' (blue resonance): (1/2) E_J0(f_k)(i g a sigma_plus + h.c.),
    which swaps |0_k, 1> and |1_k, 0> at rate g E_J0(f_k) / 2.
    """
    q = device.qubits[k]
    if not q.symmetric:
        raise ValueError(f"qubit {k} is not a symmetric SQUID")
    ej0 = ej_symmetric(q.e_j1, q.flux_ratio)
    if which == "a":
        _require_resonance(device, k, "carrier", tol)
        return -ej0 * qubit_op(device, k, SX)
    if which == "b":
        _require_resonance(device, k, "blue", tol)
        return 0.5 * ej0 * device.cavity.g * sideband_generator(device, k, "blue", 0.0)
    raise ValueError(f"which must be 'a' or 'b', got {which!r}")


def build_lab(device: DeviceModel, level: ApproximationLevel | str = ApproximationLevel.EXACT) -> np.ndarray:
    """Time-independent lab-frame generator at the requested level."""
    level = ApproximationLevel(level)
    h = build_h0(device)
    if level is ApproximationLevel.EXACT:
        h = h + build_hint_exact(device)
    elif level is ApproximationLevel.LAMB_DICKE:
        h = h + build_hint_lamb_dicke(device)
    else:
        h = h + build_rwa(device)
    if device.n_qubits >= 2 and device.capacitive_ec > 0:
        h = h + build_capacitive_h2(device)
    return h


def frame_propagator(device: DeviceModel, t: float) -> np.ndarray:
    """U0(t) = exp(-i H0 t); diagonal."""
    return np.diag(np.exp(-1j * np.diag(build_h0(device)).real * t))


def rotating_hamiltonian(device: DeviceModel, level: ApproximationLevel | str, t: float) -> np.ndarray:
    """U0(t)^dag (H - H0) U0(t) at time t."""
    level = ApproximationLevel(level)
    hint = build_lab(device, level) - build_h0(device)
    phases = np.exp(-1j * np.diag(build_h0(device)).real * t)
    return (phases.conj()[:, None] * hint) * phases[None, :]


@dataclass(frozen=True)
class HamiltonianSpec:
    device: DeviceModel
    level: ApproximationLevel = ApproximationLevel.EXACT
    frame: Frame = Frame.LAB
    active_terms: frozenset = field(default_factory=lambda: frozenset({"h0", "hint"}))

    def __post_init__(self):
        object.__setattr__(self, "level", ApproximationLevel(self.level))
        object.__setattr__(self, "frame", Frame(self.frame))
        object.__setattr__(self, "active_terms", frozenset(self.active_terms))
        unknown = self.active_terms - {"h0", "hint", "h1_symmetric", "h2_capacitive"}
        if unknown:
            raise ValueError(f"unknown terms {sorted(unknown)}")
        if "h1_symmetric" in self.active_terms and not all(q.symmetric for q in self.device.qubits):
            raise ValueError("h1_symmetric requires e_j1 == e_j2 for every qubit")
        if "h2_capacitive" in self.active_terms and self.device.capacitive_ec <= 0:
            raise ValueError("h2_capacitive requires capacitive_ec to be set")


@dataclass(frozen=True)
class Hamiltonian:
    matrix: np.ndarray
    level: ApproximationLevel
    frame: Frame
    label: str = ""


def build(spec: HamiltonianSpec, t: float = 0.0) -> Hamiltonian:
    """Assemble the requested terms; rotating-frame output is evaluated at ``t``."""
    dev = spec.device
    terms = spec.active_terms
    h = np.zeros((dev.dim, dev.dim), dtype=complex)
    coupling = np.zeros_like(h)
    if "hint" in terms:
        if spec.level is ApproximationLevel.EXACT:
            coupling += build_hint_exact(dev)
        elif spec.level is ApproximationLevel.LAMB_DICKE:
            coupling += build_hint_lamb_dicke(dev)
        else:
            coupling += build_rwa(dev)
    if "h1_symmetric" in terms:
        if spec.level is not ApproximationLevel.EXACT:
            raise ValueError("h1_symmetric is only built at the exact level")
        coupling += build_symmetric_h1(dev)
    if "h2_capacitive" in terms:
        h += build_capacitive_h2(dev)
    if spec.frame is Frame.LAB:
        if "h0" in terms:
            h += build_h0(dev)
        h += coupling
    else:
        if spec.level is ApproximationLevel.SIDEBAND_RWA:
            h += coupling
        else:
            phases = np.exp(-1j * np.diag(build_h0(dev)).real * t)
            h += (phases.conj()[:, None] * coupling) * phases[None, :]
    label = "+".join(sorted(terms))
    return Hamiltonian(h, spec.level, spec.frame, label)
