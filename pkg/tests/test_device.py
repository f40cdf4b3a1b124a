import json
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from jsonschema import ValidationError

from jjcavity.device import (
    CavityParams,
    DeviceModel,
    QubitParams,
    RegimeWarning,
    beta_mixing,
    charging_bias,
    device_from_dict,
    ej_effective,
    ej_symmetric,
    load_device,
    n_bar_for_bias,
    solve_flux_for_ej,
)
from jjcavity.sampling import halton

TUPLES = halton(100, [(0.0, 2.0), (0.0, 2.0), (0.0, 1.0), (0.0, 1.0), (20.0, 50.0)])


def squid_amplitude(e1, e2, f):
    # independent oracle: two junction phases +-pi f add as complex numbers
    return e1 * np.exp(-1j * np.pi * f) + e2 * np.exp(1j * np.pi * f)


def wrap(x):
    return (x + np.pi) % (2 * np.pi) - np.pi


def test_special_cases_exact():
    q = QubitParams(30.0, 1.3, 0.7, flux_ratio=0.0)
    assert ej_effective(q) == 1.3 + 0.7
    sym = QubitParams(30.0, 1.1, 1.1, flux_ratio=0.5)
    assert ej_effective(sym) == pytest.approx(0.0, abs=1e-15)
    assert charging_bias(QubitParams(30.0, 1.0, 1.0, n_bar=0.5)) == 0.0


@pytest.mark.parametrize("row", range(100))
def test_formulas_match_oracle(row):
    e1, e2, nb, f, ech = TUPLES[row]
    q = QubitParams(ech, e1, e2, nb, f)
    amp = squid_amplitude(e1, e2, f)
    assert ej_effective(q) == pytest.approx(abs(amp), abs=1e-12)
    assert wrap(beta_mixing(q) + np.angle(amp)) == pytest.approx(0.0, abs=1e-12)
    assert charging_bias(q) == pytest.approx(ech * nb - ech / 2, abs=1e-12)


@given(st.floats(0, 5), st.floats(0, 5), st.floats(-2, 2))
def test_ej_effective_bounds(e1, e2, f):
    q = QubitParams(100.0, e1, e2, flux_ratio=f)
    ej = ej_effective(q)
    assert abs(e1 - e2) - 1e-12 <= ej <= e1 + e2 + 1e-12


@given(st.floats(0.01, 5), st.floats(0, 0.5))
def test_symmetric_beta_vanishes_below_half_flux(e, f):
    assert beta_mixing(QubitParams(100.0, e, e, flux_ratio=f)) == 0.0


@given(st.floats(0.01, 5), st.floats(0.5001, 0.9999))
def test_symmetric_beta_is_pi_past_half_flux(e, f):
    q = QubitParams(100.0, e, e, flux_ratio=f)
    assert beta_mixing(q) == pytest.approx(np.pi)
    signed = ej_effective(q) * np.cos(beta_mixing(q))
    assert signed == pytest.approx(ej_symmetric(e, f), abs=1e-12)


def test_beta_undefined_without_junctions():
    with pytest.raises(ValueError):
        beta_mixing(QubitParams(10.0, 0.0, 0.0))


@given(st.floats(0.1, 5), st.floats(0, 1))
def test_flux_solver_round_trip(e0, f):
    target = ej_symmetric(e0, f)
    assert ej_symmetric(e0, solve_flux_for_ej(target, e0)) == pytest.approx(target, abs=1e-12)


def test_flux_solver_range():
    with pytest.raises(ValueError):
        solve_flux_for_ej(3.0, 1.0)


@given(st.floats(-3, 3), st.floats(1, 50))
def test_bias_inverse(bias, ech):
    q = QubitParams(ech, 0.0, 0.0, n_bar=n_bar_for_bias(bias, ech))
    assert charging_bias(q) == pytest.approx(bias, abs=1e-12)


def test_regime_warnings():
    with pytest.warns(RegimeWarning):
        QubitParams(5.0, 1.0, 1.0)
    with pytest.warns(RegimeWarning):
        CavityParams(1.0, 0.2, 6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        QubitParams(10.0, 1.0, 1.0)
        CavityParams(1.0, 0.05, 6)


def test_parameter_validation():
    with pytest.raises(ValueError):
        QubitParams(0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        QubitParams(10.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        CavityParams(1.0, 0.05, 1)


def test_device_dims_and_controls(two_qubits):
    assert two_qubits.dims == [2, 2, 6]
    assert two_qubits.dim == 24
    moved = two_qubits.with_controls({1: (0.45, 0.3)})
    assert moved.qubits[1].n_bar == 0.45 and moved.qubits[0] == two_qubits.qubits[0]


def test_device_round_trip(tmp_path, two_qubits):
    p = tmp_path / "dev.json"
    p.write_text(json.dumps(two_qubits.to_dict()))
    assert load_device(p) == two_qubits


def test_device_schema_rejects_bad_input():
    with pytest.raises(ValidationError):
        device_from_dict({"qubits": [], "cavity": {"nu": 1.0, "g": 0.05}})
    with pytest.raises(ValidationError):
        device_from_dict({"qubits": [{"e_ch": 10, "e_j1": 1, "e_j2": 1}], "cavity": {"nu": 1.0, "g": 0.05, "x": 1}})
