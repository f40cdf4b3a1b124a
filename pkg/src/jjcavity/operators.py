"""Dense operator algebra for (2-level)^N x Fock(n_ph) spaces.

Operators and states are plain complex numpy arrays. Units: hbar = 1, so
every energy is an angular frequency and propagators are exp(-i H t).

Tensor ordering is qubit 1 (x) qubit 2 (x) ... (x) qubit N (x) Fock, and
|0> is the +1 eigenstate of sigma_z.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from functools import reduce
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

DIM_CAP = 2**20
HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-8

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
# charge raising |1><0| and lowering |0><1|
SPLUS = np.array([[0, 0], [1, 0]], dtype=complex)
SMINUS = SPLUS.T.copy()
# charge number n = |1><1|
NUM = np.array([[0, 0], [0, 1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

# Magic (Bell) basis used for the local invariants. Columns are
# (|00>+|11>)/sqrt2, i(|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2, i(|00>-|11>)/sqrt2.
MAGIC = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]],
    dtype=complex,
) / np.sqrt(2)


class DimensionError(ValueError):
    pass


class IntegrationError(RuntimeError):
    """Raised when the adaptive integrator cannot finish a time step."""

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


def hermitian_residual(h: np.ndarray) -> float:
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_residual(h) < tol


def unitarity_residual(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def _require_square(m: np.ndarray, name: str = "operator") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    return m


def annihilation(n_ph: int) -> np.ndarray:
    """Truncated annihilation operator, <n-1|a|n> = sqrt(n)."""
    if n_ph < 2:
        raise ValueError(f"Fock truncation must be >= 2, got {n_ph}")
    return np.diag(np.sqrt(np.arange(1, n_ph)), 1).astype(complex)


def number_op(n_ph: int) -> np.ndarray:
    return np.diag(np.arange(n_ph)).astype(complex)


def kron(ops: Sequence[np.ndarray], cap: int = DIM_CAP) -> np.ndarray:
    """Kronecker product of ``ops`` in order, refusing results above ``cap``."""
    if len(ops) == 0:
        raise ValueError("kron of an empty sequence")
    dims = [np.shape(o)[0] for o in ops]
    if any(d < 1 for d in dims):
        raise DimensionError(f"all dimensions must be >= 1, got {dims}")
    total = int(np.prod(dims, dtype=object))
    if total > cap:
        raise DimensionError(f"product dimension {total} exceeds cap {cap}")
    return reduce(np.kron, [np.asarray(o, dtype=complex) for o in ops])


def embed(op: np.ndarray, slot: int, dims: Sequence[int], cap: int = DIM_CAP) -> np.ndarray:
    """Place ``op`` on tensor factor ``slot`` with identities elsewhere."""
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[slot] = op
    return kron(factors, cap=cap)


def expm(h: np.ndarray, t: float = 1.0, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """exp(-i h t) for hermitian ``h`` via eigendecomposition."""
    h = _require_square(h, "Hamiltonian")
    res = hermitian_residual(h)
    if res >= max(tol, tol * np.max(np.abs(h), initial=0.0)):
        raise ValueError(f"Hamiltonian is not hermitian (residual {res:.3e})")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def integrate_tdse(
    h_of_t: Callable[[float], np.ndarray],
    psi0: np.ndarray,
    t0: float,
    t1: float,
    tol: float = 1e-10,
    method: str = "DOP853",
    max_step: float = np.inf,
) -> np.ndarray:
    """Integrate i d(psi)/dt = H(t) psi from ``t0`` to ``t1``.

    The norm is not renormalised; its drift is left as a diagnostic.
    ``psi0`` may also be a matrix, in which case each column is propagated.
    """
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    psi0 = np.asarray(psi0, dtype=complex)
    shape = psi0.shape

    def rhs(t, y):
        return (-1j * (h_of_t(t) @ y.reshape(shape))).ravel()

    sol = solve_ivp(rhs, (t0, t1), psi0.ravel(), method=method, rtol=tol, atol=tol, max_step=max_step)
    if sol.status != 0:
        raise IntegrationError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    return sol.y[:, -1].reshape(shape)


def phase_invariant_fidelity(u: np.ndarray, v: np.ndarray, check: bool = True) -> float:
    """|Tr(U^dagger V)| / dim; equals 1 iff U = exp(i theta) V."""
    u = _require_square(u)
    v = _require_square(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch {u.shape} vs {v.shape}")
    if check:
        for m, name in ((u, "U"), (v, "V")):
            r = unitarity_residual(m)
            if r > UNITARY_TOL:
                raise ValueError(f"{name} is not unitary (residual {r:.3e})")
    return float(min(1.0, abs(np.trace(u.conj().T @ v)) / u.shape[0]))


def makhlin_invariants(u: np.ndarray) -> tuple[complex, float]:
    """Local invariants (G1, G2) of a two-qubit unitary.

    With U_B the gate in the magic basis and m = U_B^T U_B,
    G1 = tr(m)^2 / (16 det U) and G2 = (tr(m)^2 - tr(m^2)) / (4 det U).
    Identity gives (1, 3), CNOT and CZ give (0, 1).
    """
    u = _require_square(u)
    if u.shape != (4, 4):
        raise DimensionError("Makhlin invariants need a 4x4 unitary")
    r = unitarity_residual(u)
    if r > UNITARY_TOL:
        raise ValueError(f"input is not unitary (residual {r:.3e})")
    ub = MAGIC.conj().T @ u @ MAGIC
    m = ub.T @ ub
    det = np.linalg.det(u)
    tr2 = np.trace(m) ** 2
    g1 = complex(tr2 / (16 * det))
    g2 = (tr2 - np.trace(m @ m)) / (4 * det)
    return g1, float(g2.real)


def extract_block(u: np.ndarray, keep: Sequence[int], out: Sequence[int] | None = None) -> tuple[np.ndarray, float]:
    """Restrict ``u`` to input columns ``keep`` and output rows ``out``.

    ``out`` defaults to ``keep``. Leakage is the largest norm of the part of a
    kept column's image that falls outside the ``out`` rows.
    """
    u = _require_square(u)
    keep = list(keep)
    out = keep if out is None else list(out)
    d = u.shape[0]
    for idx in (keep, out):
        if len(set(idx)) != len(idx):
            raise ValueError("indices must be distinct")
        if any(i < 0 or i >= d for i in idx):
            raise IndexError(f"index out of range for dimension {d}")
    if len(out) != len(keep):
        raise ValueError("input and output index sets must have equal size")
    block = u[np.ix_(out, keep)]
    mask = np.ones(d, dtype=bool)
    mask[out] = False
    outside = u[np.ix_(mask, keep)]
    leakage = float(np.max(np.linalg.norm(outside, axis=0))) if outside.size else 0.0
    return block, leakage


@dataclass(frozen=True)
class GateReport:
    target_name: str
    fidelity: float
    leakage: float
    makhlin_g1: complex | None = None
    makhlin_g2: float | None = None

    def to_dict(self) -> dict:
        g1 = self.makhlin_g1
        return {
            "target_name": self.target_name,
            "fidelity": self.fidelity,
            "leakage": self.leakage,
            "makhlin_g1_re": None if g1 is None else g1.real,
            "makhlin_g1_im": None if g1 is None else g1.imag,
            "makhlin_g2": self.makhlin_g2,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "GateReport":
        g1 = None
        if d.get("makhlin_g1_re") is not None:
            g1 = complex(d["makhlin_g1_re"], d["makhlin_g1_im"])
        return cls(d["target_name"], d["fidelity"], d["leakage"], g1, d.get("makhlin_g2"))


def audit(
    name: str,
    u: np.ndarray,
    target: np.ndarray,
    keep: Sequence[int],
    out: Sequence[int] | None = None,
) -> GateReport:
    """Compare the restriction of ``u`` against ``target`` and fill a report."""
    block, leakage = extract_block(u, keep, out)
    target = np.asarray(target, dtype=complex)
    fid = float(min(1.0, abs(np.trace(target.conj().T @ block)) / len(keep)))
    g1 = g2 = None
    if block.shape == (4, 4) and unitarity_residual(block) <= UNITARY_TOL:
        g1, g2 = makhlin_invariants(block)
    return GateReport(name, fid, leakage, g1, g2)


__all__ = [
    "DIM_CAP", "MAGIC", "I2", "SX", "SY", "SZ", "SPLUS", "SMINUS", "NUM", "HADAMARD",
    "DimensionError", "IntegrationError", "GateReport", "annihilation", "number_op",
    "kron", "embed", "expm", "integrate_tdse", "phase_invariant_fidelity",
    "makhlin_invariants", "extract_block", "audit", "hermitian_residual",
    "unitarity_residual", "is_hermitian",
]
