"""Two-cavity state transfer on the one-excitation manifold.

Amplitudes (alpha1, beta1, alpha2, beta2) multiply |1_1 0_2>|00>,
|0_1 1_2>|00>, |0_1 0_2>|10> and |0_1 0_2>|01>. Pulses are stored as the
coupling rates Gamma_i(t) = g E_J0(f_i(t)) / 2, which may change sign when
the flux passes half a flux quantum.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from jjcavity.device import ej_symmetric, solve_flux_for_ej
from jjcavity.operators import IntegrationError

# biases are set so that E_nbar_i = nu / 2 during the transfer
TRANSFER_BIAS_OVER_NU = 0.5

CSV_HEADER = "t,alpha1_re,alpha1_im,beta1_re,beta1_im,alpha2_re,alpha2_im,beta2_re,beta2_im,norm"


class Variant(str, enum.Enum):
    CASCADED = "cascaded"
    LITERAL = "literal_paper"


class Provenance(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    SOLVED = "solved_no_reflection"
    USER = "user_supplied"


class PulseRangeError(ValueError):
    pass


class ConstraintError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransferParams:
    kappa: float
    g: float
    e_j0: float
    cascade_factor: float = 2.0
    coupling_variant: Variant = Variant.CASCADED

    def __post_init__(self):
        object.__setattr__(self, "coupling_variant", Variant(self.coupling_variant))
        if not (self.kappa > 0 and self.g > 0 and self.e_j0 > 0):
            raise ValueError("kappa, g and e_j0 must be positive")
        if self.cascade_factor < 0:
            raise ValueError("cascade_factor must be non-negative")


@dataclass(frozen=True)
class TransferState:
    alpha1: complex = 1.0
    beta1: complex = 0.0
    alpha2: complex = 0.0
    beta2: complex = 0.0
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.beta1, self.alpha2, self.beta2], dtype=complex)

    @classmethod
    def from_array(cls, y, t: float = 0.0) -> "TransferState":
        return cls(*(complex(v) for v in y), t=t)

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.as_array()) ** 2))


@dataclass
class PulsePair:
    gamma1: Callable[[float], float]
    gamma2: Callable[[float], float]
    provenance: Provenance = Provenance.USER
    breakpoints: tuple = ()
    info: dict = field(default_factory=dict)

    def flux(self, t: float, params: TransferParams) -> tuple[float, float]:
        """Flux ratios that realise the two rates at time t."""
        return tuple(solve_flux_for_ej(2 * gam(t) / params.g, params.e_j0) for gam in (self.gamma1, self.gamma2))


def rhs_array(t: float, y: np.ndarray, pulses: PulsePair, params: TransferParams) -> np.ndarray:
    a1, b1, a2, b2 = y
    g1 = pulses.gamma1(t)
    g2 = pulses.gamma2(t)
    k = params.kappa
    if params.coupling_variant is Variant.LITERAL:
        return np.array([g1 * b1, -g1 * a1 - k * b1, g2 * b2, -g2 * a2 - k * b1])
    return np.array([g1 * b1, -g1 * a1 - k * b1, g2 * b2, -g2 * a2 - k * b2 - params.cascade_factor * k * b1])


def ode_rhs(state: TransferState, pulses: PulsePair, params: TransferParams) -> TransferState:
    """Time derivative of the four amplitudes."""
    d = rhs_array(state.t, state.as_array(), pulses, params)
    return TransferState.from_array(d, t=state.t)


def zero_pulses() -> PulsePair:
    return PulsePair(lambda t: 0.0, lambda t: 0.0, Provenance.USER)


def constant_pulses(gamma1: float, gamma2: float) -> PulsePair:
    return PulsePair(lambda t: gamma1, lambda t: gamma2, Provenance.USER)


def alpha2_envelope(t, kappa: float):
    """sqrt(1 - e^{-kt}[1 + cos(sqrt3 k t - pi/6)/sqrt3]/2) for t >= 0."""
    t = np.asarray(t, dtype=float)
    bracket = 1 + np.cos(np.sqrt(3) * kappa * t - np.pi / 6) / np.sqrt(3)
    return np.sqrt(1 - np.exp(-kappa * t) * bracket / 2)


def sender_flux(params: TransferParams) -> float:
    x = params.kappa / (params.g * params.e_j0)
    if x > 1:
        raise PulseRangeError(f"kappa / (g e_j0) = {x:.6g} > 1; arccos argument out of range")
    return float(np.arccos(x) / np.pi)


def receiver_flux(t: float, params: TransferParams) -> float:
    """Receiver flux ratio for t >= 0."""
    k = params.kappa
    x = k * np.exp(-k * t / 2) * np.cos(np.sqrt(3) * k * t / 2 - np.pi / 3) / (
        params.g * alpha2_envelope(t, k) * params.e_j0
    )
    if abs(x) > 1:
        raise PulseRangeError(f"receiver arccos argument {x:.6g} out of range at t={t:.6g}")
    return float(np.arccos(x) / np.pi)


def _rate(flux: float, params: TransferParams) -> float:
    return 0.5 * params.g * ej_symmetric(params.e_j0, flux)


def closed_form_pulses(params: TransferParams, extension: str = "hold") -> PulsePair:
    """Sender at constant flux (Gamma_1 = kappa) and the analytic receiver.

    ``extension`` fixes t < 0, where the receiver formula is not given:
    "hold" keeps the sender at kappa and the receiver off; "mirrored" uses
    the symmetric pair Gamma_1(t) = Gamma_2(-t), i.e. the sender follows the
    mirrored receiver formula and the receiver sits at kappa.
    """
    g1 = _rate(sender_flux(params), params)

    def receiver(t: float) -> float:
        return _rate(receiver_flux(t, params), params)

    if extension == "hold":
        gamma1 = lambda t: g1
        gamma2 = lambda t: receiver(t) if t >= 0 else 0.0
    elif extension == "mirrored":
        gamma1 = lambda t: g1 if t >= 0 else receiver(-t)
        gamma2 = lambda t: receiver(t) if t >= 0 else g1
    else:
        raise ValueError(f"unknown extension {extension!r}")
    return PulsePair(gamma1, gamma2, Provenance.CLOSED_FORM, breakpoints=(0.0,), info={"extension": extension})


def solve_receiver_pulse(
    gamma1: Callable[[float], float],
    params: TransferParams,
    window: tuple[float, float],
    tol: float = 1e-12,
    floor: float = 1e-6,
    cap_factor: float = 1e3,
    max_capped_span: float | None = None,
    breakpoints: tuple = (),
) -> PulsePair:
    """Receiver rate that keeps the two cavity outputs cancelling.

    Imposing beta2 = -beta1 on the cascaded equations gives
    Gamma_2 alpha2 = -(Gamma_1 alpha1 + c kappa beta1) =: N, and along that
    constraint d(alpha2^2)/dt = -2 N beta1. The sender does not feel the
    receiver, so (alpha1, beta1, alpha2^2) are co-integrated from the sender
    alone and Gamma_2 = N / alpha2 is read off the dense solution. Where
    alpha2 < ``floor`` the rate is capped at cap_factor * kappa.
    Amplitudes are taken real, starting from alpha1 = 1.
    """
    if params.coupling_variant is not Variant.CASCADED:
        raise ValueError("the no-reflection receiver is defined for the cascaded variant")
    t0, t1 = window
    k = params.kappa
    c = params.cascade_factor
    cap = cap_factor * k
    if max_capped_span is None:
        max_capped_span = 2.0 / k

    def f(t, y):
        a1, b1, s = y
        g1 = gamma1(t)
        n = -(g1 * a1 + c * k * b1)
        ds = -2 * n * b1
        if s <= 0 and ds < 0:
            ds = 0.0
        return [g1 * b1, -g1 * a1 - k * b1, ds]

    pieces = _split(t0, t1, breakpoints)
    sols = []
    y = np.array([1.0, 0.0, 0.0])
    for a, b in pieces:
        sol = solve_ivp(f, (a, b), y, method="DOP853", rtol=tol, atol=tol, dense_output=True)
        if sol.status != 0:
            raise IntegrationError(f"sender integration failed: {sol.message}")
        sols.append((a, b, sol.sol))
        y = sol.y[:, -1]

    def sender(t: float) -> np.ndarray:
        for a, b, s in sols:
            if t <= b:
                return s(min(max(t, a), b))
        return sols[-1][2](t1)

    def gamma2(t: float) -> float:
        a1, b1, s = sender(t)
        n = -(gamma1(t) * a1 + c * k * b1)
        a2 = np.sqrt(max(s, 0.0))
        return float(np.clip(n / max(a2, floor), -cap, cap))

    grid = np.linspace(t0, t1, 4001)
    capped = np.array([abs(-(gamma1(t) * sender(t)[0] + c * k * sender(t)[1])) >= cap * max(np.sqrt(max(sender(t)[2], 0)), floor) for t in grid])
    dt = grid[1] - grid[0]
    capped_span = float(capped.sum() * dt)
    if capped_span > max_capped_span:
        raise ConstraintError(
            f"receiver rate capped for {capped_span:.4g} > {max_capped_span:.4g}; no-reflection constraint unsolvable"
        )
    info = {"capped_span": capped_span, "cap": cap, "floor": floor, "sender": sender}
    return PulsePair(gamma1, gamma2, Provenance.SOLVED, breakpoints=tuple(breakpoints), info=info)


def _split(t0: float, t1: float, breakpoints) -> list[tuple[float, float]]:
    cuts = [t0] + sorted(b for b in breakpoints if t0 < b < t1) + [t1]
    return list(zip(cuts[:-1], cuts[1:]))


@dataclass
class TransferTrajectory:
    t: np.ndarray
    states: np.ndarray  # shape (len(t), 4), complex
    variant: Variant
    provenance: Provenance

    @property
    def norm(self) -> np.ndarray:
        return np.sum(np.abs(self.states) ** 2, axis=1)

    @property
    def final(self) -> TransferState:
        return TransferState.from_array(self.states[-1], t=float(self.t[-1]))

    def summary(self) -> dict:
        a1, b1, a2, b2 = self.states[-1]
        n0 = float(self.norm[0])
        return {
            "final_fidelity": float(abs(a2) ** 2),
            "final_alpha1_pop": float(abs(a1) ** 2),
            "photon1_occupation": float(abs(b1) ** 2),
            "photon2_occupation": float(abs(b2) ** 2),
            "final_norm": float(self.norm[-1]),
            "loss": n0 - float(self.norm[-1]),
            "max_reflection": float(np.max(np.abs(self.states[:, 1] + self.states[:, 3]))),
            "variant": self.variant.value,
            "pulse_provenance": self.provenance.value,
        }

    def rows(self):
        for t, s, n in zip(self.t, self.states, self.norm):
            yield [t, s[0].real, s[0].imag, s[1].real, s[1].imag, s[2].real, s[2].imag, s[3].real, s[3].imag, n]


def integrate_transfer(
    pulses: PulsePair,
    params: TransferParams,
    window: tuple[float, float],
    tol: float = 1e-10,
    initial: TransferState | None = None,
    samples: int = 241,
) -> TransferTrajectory:
    """Integrate the four amplitudes over ``window`` and sample on a uniform grid."""
    t0, t1 = window
    if not t1 > t0:
        raise ValueError("window end must exceed its start")
    y = (initial or TransferState()).as_array()
    grid = np.linspace(t0, t1, samples)
    out_t = [t0]
    out_y = [y.copy()]
    for a, b in _split(t0, t1, pulses.breakpoints):
        inner = grid[(grid > a) & (grid <= b)]
        sol = solve_ivp(
            rhs_array, (a, b), y, method="DOP853", rtol=tol, atol=tol, t_eval=inner if inner.size else None,
            args=(pulses, params),
        )
        if sol.status != 0:
            raise IntegrationError(f"transfer integration failed near t={sol.t[-1]:.6g}: {sol.message}")
        if inner.size:
            out_t.extend(sol.t)
            out_y.extend(sol.y.T)
            y = sol.y[:, -1]
        else:
            y = sol.y[:, -1]
    return TransferTrajectory(np.array(out_t), np.array(out_y), params.coupling_variant, pulses.provenance)


def symmetry_check(pulses: PulsePair, grid) -> float:
    """max over the grid of |Gamma_2(t) - Gamma_1(-t)|."""
    return float(max(abs(pulses.gamma2(t) - pulses.gamma1(-t)) for t in grid))


def standard_window(params: TransferParams, span: float = 12.0) -> tuple[float, float]:
    return (-span / params.kappa, span / params.kappa)
