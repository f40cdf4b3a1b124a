import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jjcavity.device import ej_symmetric
from jjcavity.transfer import (
    CSV_HEADER,
    ConstraintError,
    Provenance,
    PulseRangeError,
    TransferParams,
    TransferState,
    alpha2_envelope,
    closed_form_pulses,
    constant_pulses,
    integrate_transfer,
    ode_rhs,
    rhs_array,
    solve_receiver_pulse,
    standard_window,
    symmetry_check,
    zero_pulses,
)

PARAMS = TransferParams(kappa=1.0, g=0.05, e_j0=40.0)
LITERAL_FIDELITY = 0.9216846777335975

finite = st.floats(-1, 1)


@given(finite, finite, finite, finite, finite, finite, finite, finite, st.floats(0, 3), st.floats(-3, 3))
def test_cascaded_norm_loss_is_output_intensity(a, b, c, d, e, f, g, h, g1, g2):
    y = np.array([a + 1j * b, c + 1j * d, e + 1j * f, g + 1j * h])
    dy = rhs_array(0.0, y, constant_pulses(g1, g2), PARAMS)
    dnorm = 2 * np.real(np.vdot(y, dy))
    assert dnorm == pytest.approx(-2 * PARAMS.kappa * abs(y[1] + y[3]) ** 2, abs=1e-12)


def test_ode_rhs_typed_wrapper():
    s = TransferState(0.6, 0.2, 0.1, -0.3, t=1.0)
    d = ode_rhs(s, constant_pulses(0.5, 0.7), PARAMS)
    assert np.allclose(d.as_array(), rhs_array(1.0, s.as_array(), constant_pulses(0.5, 0.7), PARAMS))
    assert TransferState().norm == 1.0


def test_closed_form_identities():
    pp = closed_form_pulses(PARAMS)
    assert pp.gamma1(3.0) == pytest.approx(PARAMS.kappa, abs=1e-12)
    assert pp.gamma2(0.0) == pytest.approx(PARAMS.kappa, abs=1e-12)
    assert alpha2_envelope(0.0, PARAMS.kappa) == pytest.approx(0.5, abs=1e-12)
    f1, f2 = pp.flux(0.0, PARAMS)
    assert 0.5 * PARAMS.g * ej_symmetric(PARAMS.e_j0, f2) == pytest.approx(PARAMS.kappa, abs=1e-12)


def test_envelope_limits_and_monotone_start():
    assert alpha2_envelope(60.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    t = np.linspace(0, 1, 50)
    assert np.all(np.diff(alpha2_envelope(t, 1.0)) > 0)


def test_receiver_rate_solves_no_reflection_on_positive_times():
    # mirror symmetry, alpha2(0) = 1/2 and unit norm pin the sender at
    # alpha1(0) = 1/2, beta1(0) = -1/2; with Gamma_1 = kappa afterwards the
    # no-reflection product Gamma_2 alpha_2 must equal -(kappa alpha1 + 2 kappa beta1)
    k = PARAMS.kappa
    pp = closed_form_pulses(PARAMS)
    r3 = np.sqrt(3)
    for t in np.linspace(0.1, 8, 20):
        s = r3 * k * t / 2
        e = np.exp(-k * t / 2)
        a1 = e * (0.5 * np.cos(s) - np.sin(s) / (2 * r3))
        b1 = e * (-0.5 * np.cos(s) - np.sin(s) / (2 * r3))
        lhs = pp.gamma2(t) * alpha2_envelope(t, k)
        assert lhs == pytest.approx(-(k * a1 + 2 * k * b1), abs=1e-12)


def test_pulse_range_check():
    with pytest.raises(PulseRangeError):
        closed_form_pulses(TransferParams(kappa=5.0, g=0.05, e_j0=40.0))


def test_mirrored_closed_form_is_symmetric():
    pp = closed_form_pulses(PARAMS, "mirrored")
    assert symmetry_check(pp, np.linspace(-10, 10, 41)) < 1e-12


def solved(params=PARAMS, window=None):
    window = window or standard_window(params)
    sender = closed_form_pulses(params, "mirrored")
    return solve_receiver_pulse(sender.gamma1, params, window, breakpoints=sender.breakpoints), window


def test_solved_pulse_transfers():
    pp, window = solved()
    traj = integrate_transfer(pp, PARAMS, window)
    s = traj.summary()
    assert pp.provenance is Provenance.SOLVED
    assert s["final_fidelity"] >= 0.99
    assert np.all(np.diff(traj.norm) <= 1e-9)
    assert s["loss"] < 1e-3


def test_solved_pulse_tolerance_stability():
    pp, window = solved()
    f1 = integrate_transfer(pp, PARAMS, window, tol=1e-10).summary()["final_fidelity"]
    f2 = integrate_transfer(pp, PARAMS, window, tol=5e-11).summary()["final_fidelity"]
    assert abs(f1 - f2) < 1e-6


def test_literal_variant_is_pinned():
    params = TransferParams(1.0, 0.05, 40.0, coupling_variant="literal_paper")
    traj = integrate_transfer(closed_form_pulses(params), params, standard_window(params))
    s = traj.summary()
    assert s["variant"] == "literal_paper"
    assert s["final_fidelity"] == pytest.approx(LITERAL_FIDELITY, abs=1e-7)


def test_zero_pulses_freeze_state():
    traj = integrate_transfer(zero_pulses(), PARAMS, (0.0, 5.0))
    assert np.allclose(traj.states[-1], [1, 0, 0, 0])
    assert traj.summary()["final_fidelity"] == 0.0


def test_silent_sender_gives_silent_receiver():
    pp = solve_receiver_pulse(lambda t: 0.0, PARAMS, (0.0, 12.0))
    assert pp.info["capped_span"] == 0.0
    assert all(pp.gamma2(t) == 0.0 for t in np.linspace(0, 12, 7))


def test_abrupt_sender_cannot_be_matched():
    # alpha1 + 2 beta1 = 2 e^{-kt/2} cos(sqrt3 k t / 2 + pi/3) is positive until
    # t = pi / (3 sqrt3 k); there the receiver would need alpha2 < 0 from alpha2 = 0
    pp = solve_receiver_pulse(lambda t: 1.0, PARAMS, (0.0, 12.0))
    assert pp.info["capped_span"] == pytest.approx(np.pi / (3 * np.sqrt(3)), abs=5e-3)
    traj = integrate_transfer(pp, PARAMS, (0.0, 12.0))
    assert traj.summary()["final_fidelity"] < 0.99
    with pytest.raises(ConstraintError):
        solve_receiver_pulse(lambda t: 1.0, PARAMS, (0.0, 12.0), max_capped_span=0.1)


def test_bad_window_and_params():
    with pytest.raises(ValueError):
        integrate_transfer(zero_pulses(), PARAMS, (1.0, 1.0))
    with pytest.raises(ValueError):
        TransferParams(0.0, 0.05, 40.0)
    with pytest.raises(ValueError):
        solve_receiver_pulse(lambda t: 1.0, TransferParams(1.0, 0.05, 40.0, coupling_variant="literal_paper"), (0, 1))


def test_rows_match_header():
    traj = integrate_transfer(zero_pulses(), PARAMS, (0.0, 1.0), samples=5)
    rows = list(traj.rows())
    assert len(rows) == 5
    assert all(len(r) == len(CSV_HEADER.split(",")) for r in rows)
