"""Parameter records for SQUID charge qubits and the shared cavity mode."""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

CHARGING_REGIME_RATIO = 10.0
LAMB_DICKE_THRESHOLD = 0.3


class RegimeWarning(UserWarning):
    """An approximation the model relies on is outside its comfortable range."""


@dataclass(frozen=True)
class QubitParams:
    """One Cooper-pair box closed by a two-junction SQUID.

    ``flux_ratio`` is the applied flux in units of the flux quantum.
    """

    e_ch: float
    e_j1: float
    e_j2: float
    n_bar: float = 0.5
    flux_ratio: float = 0.5

    def __post_init__(self):
        if not self.e_ch > 0:
            raise ValueError("e_ch must be positive")
        if self.e_j1 < 0 or self.e_j2 < 0:
            raise ValueError("Josephson energies must be non-negative")
        if self.e_ch < CHARGING_REGIME_RATIO * max(self.e_j1, self.e_j2):
            warnings.warn(
                f"e_ch={self.e_ch} is not >= {CHARGING_REGIME_RATIO} x max(e_j); "
                "two-level truncation is questionable",
                RegimeWarning,
                stacklevel=3,
            )

    @property
    def symmetric(self) -> bool:
        return self.e_j1 == self.e_j2

    def with_controls(self, n_bar: float | None = None, flux_ratio: float | None = None) -> "QubitParams":
        return QubitParams(
            self.e_ch,
            self.e_j1,
            self.e_j2,
            self.n_bar if n_bar is None else n_bar,
            self.flux_ratio if flux_ratio is None else flux_ratio,
        )


@dataclass(frozen=True)
class CavityParams:
    nu: float
    g: float
    n_ph: int = 6
    kappa: float = 0.0
    lamb_dicke_threshold: float = LAMB_DICKE_THRESHOLD

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not 0 <= self.g < 1:
            raise ValueError("g must lie in [0, 1)")
        if int(self.n_ph) != self.n_ph or self.n_ph < 2:
            raise ValueError("n_ph must be an integer >= 2")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.g * np.sqrt(self.n_ph) >= self.lamb_dicke_threshold:
            warnings.warn(
                f"g*sqrt(n_ph)={self.g * np.sqrt(self.n_ph):.3g} is outside the Lamb-Dicke range",
                RegimeWarning,
                stacklevel=3,
            )


@dataclass(frozen=True)
class DeviceModel:
    qubits: tuple[QubitParams, ...]
    cavity: CavityParams
    capacitive_ec: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(self.qubits) == 0:
            raise ValueError("a device needs at least one qubit")
        if self.capacitive_ec < 0:
            raise ValueError("capacitive_ec must be non-negative")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def dims(self) -> list[int]:
        return [2] * self.n_qubits + [self.cavity.n_ph]

    @property
    def dim(self) -> int:
        return 2**self.n_qubits * self.cavity.n_ph

    def replace_qubit(self, k: int, q: QubitParams) -> "DeviceModel":
        qs = list(self.qubits)
        qs[k] = q
        return DeviceModel(tuple(qs), self.cavity, self.capacitive_ec)

    def with_controls(self, settings: dict[int, tuple[float, float]]) -> "DeviceModel":
        """Apply per-qubit (n_bar, flux_ratio) settings."""
        qs = list(self.qubits)
        for k, (n_bar, flux) in settings.items():
            qs[k] = qs[k].with_controls(n_bar, flux)
        return DeviceModel(tuple(qs), self.cavity, self.capacitive_ec)

    def with_cavity(self, **changes) -> "DeviceModel":
        c = asdict(self.cavity)
        c.update(changes)
        return DeviceModel(self.qubits, CavityParams(**c), self.capacitive_ec)

    def to_dict(self) -> dict:
        d = {
            "qubits": [asdict(q) for q in self.qubits],
            "cavity": {k: v for k, v in asdict(self.cavity).items() if k != "lamb_dicke_threshold"},
        }
        if self.capacitive_ec:
            d["capacitive_ec"] = self.capacitive_ec
        return d


def ej_effective(q: QubitParams) -> float:
    """Flux-tuned Josephson energy of the SQUID, always >= |e_j1 - e_j2|."""
    c = np.cos(np.pi * q.flux_ratio)
    return float(np.sqrt((q.e_j1 - q.e_j2) ** 2 + 4 * q.e_j1 * q.e_j2 * c * c))


def beta_mixing(q: QubitParams) -> float:
    """Phase of the SQUID tunnelling amplitude.

    Chosen so that ej_effective(q) * exp(-i beta) equals
    (e_j1 + e_j2) cos(pi f) - i (e_j1 - e_j2) sin(pi f), which satisfies
    tan(beta) = (e_j1 - e_j2)/(e_j1 + e_j2) * tan(pi f) and stays continuous
    through f = 1/2. A symmetric SQUID gets 0 for cos(pi f) >= 0 and pi past
    half a flux quantum, where the signed energy 2 e_j0 cos(pi f) goes negative.
    """
    total = q.e_j1 + q.e_j2
    if total <= 0:
        raise ValueError("beta is undefined when e_j1 = e_j2 = 0")
    x = np.pi * q.flux_ratio
    return float(np.arctan2((q.e_j1 - q.e_j2) * np.sin(x), total * np.cos(x)))


def charging_bias(q: QubitParams) -> float:
    """E_nbar = e_ch (n_bar - 1/2); zero at the charge degeneracy point."""
    return q.e_ch * (q.n_bar - 0.5)


def n_bar_for_bias(bias: float, e_ch: float) -> float:
    return 0.5 + bias / e_ch


def ej_symmetric(e_j0: float, flux_ratio: float) -> float:
    """Signed Josephson energy 2 e_j0 cos(pi f) of a symmetric SQUID."""
    return float(2 * e_j0 * np.cos(np.pi * flux_ratio))


def solve_flux_for_ej(target: float, e_j0: float) -> float:
    """Flux ratio in [0, 1] with 2 e_j0 cos(pi f) = target."""
    if e_j0 <= 0:
        raise ValueError("e_j0 must be positive")
    x = target / (2 * e_j0)
    if abs(x) > 1 + 1e-15:
        raise ValueError(f"target {target} outside [-2 e_j0, 2 e_j0]")
    return float(np.arccos(np.clip(x, -1.0, 1.0)) / np.pi)


def _schema(name: str) -> dict:
    return json.loads(resources.files("jjcavity.schemas").joinpath(name).read_text())


def device_from_dict(d: dict) -> DeviceModel:
    jsonschema.validate(d, _schema("device.schema.json"))
    qubits = tuple(QubitParams(**q) for q in d["qubits"])
    return DeviceModel(qubits, CavityParams(**d["cavity"]), d.get("capacitive_ec", 0.0))


def load_device(path: str | Path) -> DeviceModel:
    with open(path) as fh:
        return device_from_dict(json.load(fh))
