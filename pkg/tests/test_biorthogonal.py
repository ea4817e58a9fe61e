import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraccontrol.biorthogonal import (BiorthogonalFamily, Multiplier, MultiplierConfig,
                                      SpectralProducts, calibrate_g0, decay_exponent,
                                      kronecker_errors, log_sigma, sigma)
from fraccontrol.spectrum import FracModel

M075 = FracModel(0.75)

# mpmath references from tests/oracles/make_oracles.py (s = 0.75, T = 0.3, g0 = 0.6)
H_REAL = {0.5: -1.39433533942976e-5, 10.0: -0.00557781146686433,
          100.0: -0.562568081807137, 1000.0: -41.9534436142713}
H_IMAG = {20.0: 0.0223018295611979, 200.0: 2.16219425035802}
LOG_RAW_H0 = -33.7224262226384
LOG_F = [(-50.0, None, 13.1929342422923), (30.0, 1, -10.0537731122162),
         (-1000.0, 2, 107.329607222433), (200.0, 3, -25.0459781695988)]


@pytest.fixture(scope="module")
def mult():
    return Multiplier(MultiplierConfig.for_model(M075, 0.3, 0.6))


def test_window_domain_and_underflow():
    cfg = MultiplierConfig.for_model(M075, 0.3, 0.6)
    with pytest.raises(ValueError):
        log_sigma(1.0, cfg)
    assert sigma(np.array([0.999999]), cfg)[0] == 0.0
    assert sigma(np.array([0.0]), cfg)[0] == pytest.approx(np.exp(-2 * cfg.nu_mu))
    with pytest.raises(ValueError):
        MultiplierConfig(b=0.0, g0=1.0, mu=2.0)


def test_H_real_axis_against_oracle(mult):
    x = np.array(sorted(H_REAL))
    got = mult.H(x).log_mag
    for xi, g in zip(x, got):
        assert g == pytest.approx(H_REAL[xi], abs=1e-7 + 1e-8 * abs(H_REAL[xi]))


def test_H_is_even_on_real_axis(mult):
    x = np.array([3.0, 250.0, 4000.0])
    a, b = mult.H(x), mult.H(-x)
    assert np.allclose(a.log_mag, b.log_mag)


def test_H_imaginary_axis_against_oracle(mult):
    x = np.array(sorted(H_IMAG))
    got = mult.log_H_imag(x)
    assert np.allclose(got, [H_IMAG[v] for v in x], atol=1e-9)
    assert mult.log_alpha0 == pytest.approx(-LOG_RAW_H0, abs=1e-9)


def test_H_imag_lower_bound_pointwise():
    cfg = MultiplierConfig.for_model(M075, 0.3, 0.6, normalize=False)
    m = Multiplier(cfg)
    x = np.linspace(0, 50 / cfg.b, 80)
    assert np.all(m.log_H_imag(x) >= m.lower_bound_imag(x))


def test_H_rel_error_is_reported(mult):
    det = mult.H_real_detail(np.array([50.0, 5e4]))
    assert np.all(det.rel_error < 1e-6)
    assert np.all(det.log_envelope >= det.value.log_mag - 1e-9)


def test_decay_exponent_close_to_inverse_alpha(mult):
    fit = decay_exponent(mult)
    assert fit.rel_error < 0.10


@pytest.mark.parametrize("w,ex,ref", LOG_F)
def test_products_against_euler_maclaurin_oracle(w, ex, ref):
    sp = SpectralProducts(M075, K=2000)
    lc, bound, rnd = sp.log_F(np.array([w]), exclude=ex)
    assert lc.log_mag[0] == pytest.approx(ref, abs=1e-9)
    assert bound[0] < 1e-12


def test_product_sign_parity():
    sp = SpectralProducts(M075, K=500)
    lam = sp.lam
    w = 0.5 * (lam[2] + lam[3])   # three factors negative
    assert sp.log_F(np.array([w]))[0].phase[0] == pytest.approx(np.pi)
    w = 0.5 * (lam[3] + lam[4])
    assert sp.log_F(np.array([w]))[0].phase[0] == pytest.approx(0.0)


def test_tail_bound_shrinks_with_truncation():
    w = np.array([3000.0 + 0j, -1j * 2500.0])
    b1 = SpectralProducts(M075, K=2000).log_F(w)[1]
    b2 = SpectralProducts(M075, K=4000).log_F(w)[1]
    v1 = SpectralProducts(M075, K=2000).log_F(w)[0]
    v2 = SpectralProducts(M075, K=4000).log_F(w)[0]
    assert np.all(b2 < 0.5 * b1)
    assert np.allclose(v1.log_mag, v2.log_mag, atol=1e-9)


def test_truncation_grows_for_large_arguments():
    sp = SpectralProducts(M075, K=100)
    sp.log_F(np.array([1e6]))
    assert sp.K > 100 and 1e6 <= sp.max_ratio * sp.lam_next


@given(st.integers(1, 12), st.floats(-500.0, 500.0))
@settings(max_examples=30, deadline=None)
def test_psi_ratio_identity(n, x):
    # Psi_n(z) F_n(lambda_n) = F_n(z), checked through the general complex path
    sp = SpectralProducts(M075, K=1000)
    z = np.array([x + 0.5j])
    lhs = sp.psi_schrodinger(n, z) * sp.denominator(n)
    rhs = sp.log_F(z, exclude=n)[0]
    assert lhs.log_mag[0] == pytest.approx(rhs.log_mag[0], abs=1e-10)


@pytest.mark.parametrize("kind", ["heat", "schrodinger"])
def test_kronecker_at_nodes(kind):
    fam = BiorthogonalFamily(FracModel(0.75, kind), 0.3, 0.6, K=2000)
    assert kronecker_errors(fam, 12).max() <= 1e-6


@pytest.mark.parametrize("kind", ["heat", "schrodinger"])
def test_kronecker_scales_linearly_off_node(kind):
    # off the nodes the general complex path is used; the defect must be O(eps)
    fam = BiorthogonalFamily(FracModel(0.75, kind), 0.3, 0.6, K=2000)
    nodes = np.array([fam.node(k) for k in range(1, 6)])
    delta = np.eye(5)

    def defect(eps):
        return np.array([np.abs(fam.g(n, nodes + eps * (1 + 1j)).to_complex() - delta[n - 1])
                         for n in range(1, 6)])

    d1, d2 = defect(1e-5), defect(1e-6)
    big = d1 > 1e-9
    assert np.all(np.abs(d1[big] / d2[big] - 10.0) < 0.1)


def test_g_unit_at_own_node():
    fam = BiorthogonalFamily(FracModel(0.75, "heat"), 0.3, 0.6)
    for n in (1, 4, 9):
        assert fam.g(n, np.array([fam.node(n)])).log_mag[0] == pytest.approx(0.0, abs=1e-12)


def test_calibration_picks_feasible_rung():
    cal = calibrate_g0(M075, 0.3, steps=10)
    assert cal.feasible
    rung = next(r for r in cal.ladder if r["g0"] == cal.g0)
    assert rung["feasible"]
    assert all(r["log_l2"] >= rung["log_l2"] for r in cal.ladder if r["feasible"])
