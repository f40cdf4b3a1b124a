import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jjcavity.device import CavityParams, DeviceModel, QubitParams, RegimeWarning

settings.register_profile(
    "repro", derandomize=True, deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repro")


def quiet(fn, *a, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        return fn(*a, **kw)


@pytest.fixture
def one_qubit():
    q = QubitParams(10.0, 1.0, 1.0)
    return DeviceModel((q,), CavityParams(1.0, 0.05, 6))


@pytest.fixture
def two_qubits():
    q = QubitParams(10.0, 1.0, 1.0)
    return DeviceModel((q, q), CavityParams(1.0, 0.05, 6), capacitive_ec=0.2)


def random_unitary(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome for the end-of-run summary."""

    def record(n, label, checks):
        failures = [name for name, ok in checks if not ok]
        ACCEPTANCE[n] = (label, not failures, [name for name, _ in checks], failures)
        assert not failures, f"criterion {n} failed: {failures}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        label, ok, names, failures = ACCEPTANCE[n]
        line = f"criterion {n} [{label}]: {'PASS' if ok else 'FAIL'}"
        shown = failures if failures else names
        terminalreporter.write_line(line + " | " + "; ".join(shown))
