"""Fixed low-discrepancy inputs for tests and sweeps.

Every "random" tuple in the suite comes from an unscrambled Halton sequence,
so the points are the same on every machine and every run.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

HALTON_SKIP = 1  # drop the all-zeros first point


def halton(n: int, bounds: list[tuple[float, float]], skip: int = HALTON_SKIP) -> np.ndarray:
    """n points in the box ``bounds``, one column per dimension."""
    eng = qmc.Halton(d=len(bounds), scramble=False)
    if skip:
        eng.fast_forward(skip)
    u = eng.random(n)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    return lo + u * (hi - lo)


def bloch_points(n: int = 20) -> list[tuple[complex, complex]]:
    """(alpha, beta) with |alpha|^2 + |beta|^2 = 1 spread over the Bloch sphere."""
    pts = halton(n, [(0.0, 1.0), (0.0, 2 * np.pi)])
    out = []
    for u, phi in pts:
        theta = np.arccos(1 - 2 * u)
        out.append((complex(np.cos(theta / 2)), complex(np.sin(theta / 2) * np.exp(1j * phi))))
    return out
