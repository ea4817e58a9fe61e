import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccontrol.numerics import LogComplex
from fraccontrol.simulator import duhamel_integrals, evolve
from fraccontrol.spectrum import boundary_trace
from fraccontrol.spectrum import FracModel
from fraccontrol.synthesis import (ControlSignal, ModalState, control_cost, gramian_log_cost,
                                   heat_log_cost_first_mode, invert_to_control,
                                   min_norm_control, moment_coeffs, moment_control)

HEAT = FracModel(0.75, "heat")
SCHR = FracModel(0.75, "schrodinger")
# dense mpmath Gramian solves from tests/oracles/make_oracles.py (T = 0.3, y0 = phi_1)
HEAT_COST = {1: -1.93865912861271, 3: -0.659775282229097, 6: 0.252477903924287}


def test_modal_state_helpers():
    y = ModalState.mode(3, 5)
    assert y.n_modes == 5 and y.coeffs[2] == 1
    assert y.padded(2).n_modes == 2 and y.padded(8).n_modes == 8
    assert y.norm() == 1.0


def test_control_signal_grid_and_split():
    u = ControlSignal(0.3, np.arange(11.0))
    assert u.dt == pytest.approx(0.03)
    assert u.weights.sum() == pytest.approx(0.3)
    a, b = u.split(4)
    assert a.T + b.T == pytest.approx(0.3) and b.t0 == pytest.approx(0.12)
    assert a.samples[-1] == b.samples[0]
    assert u.subsampled(2).samples.size == 6
    with pytest.raises(ValueError):
        u.split(0)
    with pytest.raises(ValueError):
        ControlSignal(1.0, [1.0])


def test_control_cost_trapezoid():
    u = ControlSignal(2.0, np.ones(101))
    assert control_cost(u) == pytest.approx(np.sqrt(2.0))


def test_moment_coeffs_closed_form():
    c = moment_coeffs(ModalState.mode(1), 0.3, HEAT)
    lam1 = np.pi ** 1.5
    assert c.log_mag[0] == pytest.approx(-lam1 * 0.15 - np.log(np.sqrt(2) * np.pi))
    assert abs(c.phase[0]) == pytest.approx(np.pi)          # trace of mode 1 is negative
    cs = moment_coeffs(ModalState.mode(2), 0.3, SCHR)
    v = complex(cs[1].to_complex())
    lam2 = (2 * np.pi) ** 1.5
    ref = -1j * np.exp(-1j * lam2 * 0.15) / (2 * np.sqrt(2) * np.pi)
    assert v == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("N", [1, 3, 6])
def test_heat_gramian_cost_against_dense_oracle(N):
    assert heat_log_cost_first_mode(HEAT, 0.3, N) == pytest.approx(HEAT_COST[N], abs=1e-10)
    assert gramian_log_cost(ModalState.mode(1), 0.3, N, HEAT)[0] == pytest.approx(HEAT_COST[N],
                                                                               abs=1e-10)


def test_structured_cost_matches_dense_solve():
    for T in (0.25, 0.5):
        dense = min_norm_control(ModalState.mode(1), T, 12, HEAT, grid_size=3).log_cost
        assert heat_log_cost_first_mode(HEAT, T, 12) == pytest.approx(dense, abs=1e-9)


def test_structured_cost_precision_stable():
    a = heat_log_cost_first_mode(HEAT, 0.2, 120, dps=60)
    b = heat_log_cost_first_mode(HEAT, 0.2, 120, dps=90)
    assert a == pytest.approx(b, abs=1e-10)


def test_one_mode_closed_forms():
    T = 0.4
    lam = np.pi ** 1.5
    heat_ref = -lam * T - np.log(np.sqrt(2) * np.pi) - 0.5 * np.log(-np.expm1(-2 * lam * T) / (2 * lam))
    assert gramian_log_cost(ModalState.mode(1), T, 1, HEAT)[0] == pytest.approx(heat_ref, abs=1e-12)
    schr_ref = -np.log(np.sqrt(2) * np.pi) - 0.5 * np.log(T)
    assert min_norm_control(ModalState.mode(1), T, 1, SCHR, grid_size=5).log_cost == \
        pytest.approx(schr_ref, abs=1e-12)


def test_one_mode_heat_control_nulls_state():
    y0 = ModalState.mode(1)
    g = min_norm_control(y0, 0.3, 1, HEAT, grid_size=2 ** 14 + 1)
    assert evolve(y0, g.control, HEAT, 1).residual_rel < 1e-8


def test_gramian_cost_matches_sampled_norm():
    g = min_norm_control(ModalState.mode(1), 0.3, 8, HEAT, grid_size=2 ** 15 + 1)
    assert np.log(control_cost(g.control)) == pytest.approx(g.log_cost, abs=1e-6)


def test_zero_state_gives_zero_control():
    g = min_norm_control(ModalState(np.zeros(3)), 0.3, 3, HEAT, grid_size=9)
    assert np.isneginf(g.log_cost) and not np.any(g.control.samples)


@given(st.floats(0.1, 1.0), st.floats(-0.2, 0.2))
@settings(max_examples=20, deadline=None)
def test_inversion_recovers_gaussian(T, shift):
    # v(t) = exp(-(t - c)^2 / (2 s^2)), V(x) = s sqrt(2 pi) exp(-s^2 x^2/2 - i x c)
    s = T / 25.0
    c = shift * T

    def V(x):
        x = np.asarray(x, float)
        return LogComplex(np.log(s * np.sqrt(2 * np.pi)) - 0.5 * (s * x) ** 2, -x * c)

    X = 12.0 / s
    inv = invert_to_control(V, T, 1025, X)
    t = np.linspace(-T / 2, T / 2, 1025)
    ref = np.exp(-(t - c) ** 2 / (2 * s * s))
    assert np.max(np.abs(inv.control.samples - ref)) < 1e-10
    assert inv.support_violation < 1e-10


def test_inversion_flags_support_violation():
    # a Gaussian centred at the edge leaks half its mass outside
    T, s = 0.5, 0.02

    def V(x):
        x = np.asarray(x, float)
        return LogComplex(np.log(s * np.sqrt(2 * np.pi)) - 0.5 * (s * x) ** 2, -x * T / 2)

    inv = invert_to_control(V, T, 513, 12.0 / s)
    assert inv.support_violation > 0.3


def test_heat_moment_control_small_grid():
    y0 = ModalState.mode(1)
    mc = moment_control(y0, 0.3, HEAT, g0=0.6, grid_size=2 ** 14 + 1)
    assert mc.control.info["trustworthy"]
    assert mc.inversion.support_violation < 1e-8
    assert evolve(y0, mc.control, HEAT, 20).residual_rel < 1e-6
    g = min_norm_control(y0, 0.3, 20, HEAT, grid_size=3)
    assert g.log_cost < mc.log_cost


def test_moment_moments_match_targets():
    # int_0^T e^{-lambda_k (T - t)} u dt = e^{-lambda_k T} a_k / phi_k'(1), exact panel moments
    y0 = ModalState(np.array([1.0, -0.5, 0.25]))
    mc = moment_control(y0, 0.3, HEAT, g0=0.6, grid_size=2 ** 15 + 1)
    lam = (np.pi * np.arange(1, 6)) ** 1.5
    got = duhamel_integrals(mc.control, lam.astype(complex))
    a = y0.padded(5).coeffs.real
    tgt = np.exp(-lam * 0.3) * a / boundary_trace(np.arange(1, 6))
    assert np.allclose(got, tgt, atol=1e-9)


def test_schrodinger_gramian_double_path():
    g = min_norm_control(ModalState.mode(2), 0.3, 10, SCHR, grid_size=2 ** 14 + 1)
    assert g.precision == "double"
    assert np.iscomplexobj(g.control.samples)
    assert evolve(ModalState.mode(2), g.control, SCHR, 10).residual_rel < 1e-4


def test_heat_samples_need_extended_precision():
    # the exponential sum cancels by ~11 digits; in double its value would be noise
    g = min_norm_control(ModalState.mode(1), 0.3, 20, HEAT, grid_size=65)
    u = g.control
    lam = (np.pi * np.arange(1, 21)) ** 1.5
    naive = np.exp(-np.outer(0.3 - u.t, lam)) @ g.beta
    assert np.max(np.abs(g.beta)) > 1e9 * np.max(np.abs(u.samples))
    assert np.max(np.abs(naive - u.samples)) > 1e-6 * np.max(np.abs(u.samples))
