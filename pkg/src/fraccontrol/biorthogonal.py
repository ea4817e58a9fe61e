"""Gevrey window, its Fourier multiplier H, the canonical products over the
spectrum, and the interpolating families g_n with g_n(node_k) = delta_nk.

Conventions. For a model with eigenvalues lambda_k = a k^alpha,

    F_n(w)  = prod_{k != n} (1 - w / lambda_k)
    Phi_n(z) = F_n(lambda_n + z) / F_n(lambda_n)
    Schrodinger: Psi_n(z) = F_n(z) / F_n(lambda_n),    g_n(z) = Psi_n(-z) H(z + lambda_n)
    heat:        Psi_n(z) = F_n(-iz) / F_n(lambda_n),  g_n(z) = Psi_n(z) H(z) / H(i lambda_n)

with H(z) = alpha0 int_{-1}^{1} sigma(t) exp(-i b z t) dt and b = T/2.
Products are summed to K and the remainder is added analytically. Since
lambda_k = a k^alpha exactly, sum_{k>K} log(1 - w/lambda_k) =
-sum_m (w^m/m) a^{-m} zeta(alpha m, K+1).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import zeta

from .numerics import FourierResult, LogComplex, fourier_integral
from .spectrum import EigenData, FracModel, eigenvalues


# ---------------------------------------------------------------- window and multiplier

@dataclass(frozen=True)
class MultiplierConfig:
    """Window sigma(t) = exp(-nu^mu/(1-t)^mu - nu^mu/(1+t)^mu) on (-1, 1).

    ``g0 = nu * b`` is the dimensionless sharpness that stays fixed as T varies.
    ``normalize`` rescales H so that H(0) = 1 (used by the Schrodinger family).
    """

    b: float
    g0: float
    mu: float
    normalize: bool = True

    def __post_init__(self):
        if self.b <= 0 or self.g0 <= 0 or self.mu <= 0:
            raise ValueError("b, g0 and mu must be positive")

    @property
    def nu(self) -> float:
        return self.g0 / self.b

    @property
    def nu_mu(self) -> float:
        return self.nu ** self.mu

    @classmethod
    def for_model(cls, model: FracModel, T: float, g0: float, normalize: bool = True):
        return cls(b=T / 2.0, g0=g0, mu=model.mu, normalize=normalize)


def log_sigma(t, cfg: MultiplierConfig):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1.0):
        raise ValueError("sigma is defined on the open interval (-1, 1)")
    return -cfg.nu_mu * ((1.0 - t) ** (-cfg.mu) + (1.0 + t) ** (-cfg.mu))


def sigma(t, cfg: MultiplierConfig):
    """Window value; exact 0 once it drops below the double range."""
    lv = log_sigma(t, cfg)
    return np.where(lv < -745.0, 0.0, np.exp(np.maximum(lv, -745.0)))


class Multiplier:
    """H(z) = alpha0 int sigma(t) exp(-i b z t) dt on the real and imaginary axes."""

    ANGLE_FRACTIONS = (0.0, 0.5, 1.0)

    def __init__(self, cfg: MultiplierConfig, rtol: float = 1e-10):
        self.cfg = cfg
        self.rtol = rtol
        mu, nm = cfg.mu, cfg.nu_mu

        def log_window(om, op):
            return -nm * (om ** (-mu) + op ** (-mu))

        self._log_window = log_window

    def _saddle(self, x):
        c = self.cfg
        bx = np.maximum(c.b * np.abs(x), 1e-300)
        return (c.mu * c.nu_mu / bx) ** (1.0 / (c.mu + 1.0))

    def _floor(self, x, angle):
        c = self.cfg
        room = 700.0 + 2.0 * c.b * np.abs(x)
        return (c.nu_mu * np.cos(c.mu * angle) / room) ** (1.0 / c.mu)

    @cached_property
    def log_alpha0(self) -> float:
        if not self.cfg.normalize:
            return 0.0
        return -float(self._raw_imag(np.array([0.0])).value.log_mag[0])

    def _raw_imag(self, x) -> FourierResult:
        x = np.asarray(x, dtype=float)
        return fourier_integral(self._log_window, self.cfg.b, 1j * x, angle=0.0,
                                saddle_radius=self._saddle(x), floor_radius=self._floor(x, 0.0),
                                rtol=self.rtol)

    def log_H_imag(self, x):
        """log H(i x) for real x (H is real and positive there)."""
        res = self._raw_imag(np.atleast_1d(x))
        return res.value.log_mag + self.log_alpha0

    def H_real_detail(self, x) -> FourierResult:
        """H at real x via a rotated path, best of a few angles per point.

        The path from -1 is tilted into the half plane where exp(-i b x t)
        decays. The steepest-descent angle pi/(2(mu+1)) suits large |b x|; the
        real segment suits small |b x|. Per point the candidate with the least
        absolute mass wins and is then refined.
        """
        x = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
        c = self.cfg
        th = np.pi / (2.0 * (c.mu + 1.0))

        def run(xs, ang, halvings):
            return fourier_integral(self._log_window, c.b, xs.astype(complex), angle=ang,
                                    saddle_radius=self._saddle(xs),
                                    floor_radius=self._floor(xs, ang), rtol=self.rtol,
                                    max_halvings=halvings, symmetric_real=True)

        # Every path integrates to the same H, so the path with the smallest
        # int|f| loses the fewest digits. That mass is a positive integral and
        # is already accurate at the coarsest panel width, unlike the signed sum.
        scores = []
        for frac in self.ANGLE_FRACTIONS:
            res = run(x, np.full(x.shape, frac * th), 0)
            scores.append(res.log_mass)
        pick = np.argmin(np.array(scores), axis=0)
        ang = np.asarray(self.ANGLE_FRACTIONS)[pick] * th
        best = run(x, ang, 6)
        shift = self.log_alpha0
        return FourierResult(LogComplex(best.value.log_mag + shift, best.value.phase),
                             best.log_mass + shift, best.rel_error, best.h,
                             best.log_envelope + shift)

    def H(self, z) -> LogComplex:
        """H at real or purely imaginary arguments (elementwise)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = LogComplex.zeros(z.shape)
        real = z.imag == 0
        imag = (z.real == 0) & ~real
        other = ~(real | imag)
        lm, ph = out.log_mag.copy(), out.phase.copy()
        if np.any(real):
            r = self.H_real_detail(z.real[real]).value
            lm[real], ph[real] = r.log_mag, r.phase
        if np.any(imag):
            lm[imag] = self.log_H_imag(z.imag[imag])
            ph[imag] = 0.0
        if np.any(other):
            x = z[other]
            res = fourier_integral(self._log_window, self.cfg.b, x, angle=0.0,
                                   saddle_radius=self._saddle(np.abs(x)),
                                   floor_radius=self._floor(np.abs(x), 0.0), rtol=self.rtol)
            lm[other] = res.value.log_mag + self.log_alpha0
            ph[other] = res.value.phase
        return LogComplex(lm, ph)

    def lower_bound_imag(self, x):
        """log of (1/4) e^{-2^{mu+1} nu^mu} e^{b x/4}, a floor for the unnormalised H(ix)."""
        c = self.cfg
        return np.log(0.25) - 2.0 ** (c.mu + 1.0) * c.nu_mu + c.b * np.asarray(x) / 4.0


@dataclass
class DecayFit:
    exponent: float
    target: float
    x: np.ndarray
    minus_log_H: np.ndarray

    @property
    def rel_error(self) -> float:
        return abs(self.exponent - self.target) / self.target


def decay_exponent(mult: Multiplier, bx_min: float | None = None,
                   n_points: int = 10) -> DecayFit:
    """Slope of log(-log|H(x)|) against log x on x = 2^j bx_min / b.

    Uses the zero-free envelope so sign changes of H do not spoil the fit. The
    limiting slope is mu/(mu + 1) = 1/alpha; for small b x the constant terms
    still dominate. The default start is 16 mu nu^mu (at least
    512), where the saddle radius has moved well inside the unit interval.
    """
    c = mult.cfg
    if bx_min is None:
        bx_min = max(2.0 ** 9, 16.0 * c.mu * c.nu_mu)
    x = bx_min / c.b * 2.0 ** np.arange(n_points)
    y = -mult.H_real_detail(x).log_envelope
    if np.any(y <= 0):
        raise ValueError("H has not started to decay on this grid; raise bx_min")
    slope = float(np.polyfit(np.log(x), np.log(y), 1)[0])
    return DecayFit(slope, c.mu / (c.mu + 1.0), x, y)


# ---------------------------------------------------------------- products

@dataclass
class ProductEval:
    n: int
    trunc: int
    log_value: LogComplex
    tail_bound: np.ndarray           # bound on the dropped terms of the tail series
    rounding_bound: np.ndarray = field(default=None)  # floating-point summation bound


class SpectralProducts:
    """Canonical products over lambda_k = a k^alpha with analytic tail.

    The tail series is cut after ``n_series`` terms; ``max_ratio`` caps
    |w| / lambda_{K+1} and K grows automatically when an argument exceeds it.
    """

    def __init__(self, model: FracModel, K: int = 2000, n_series: int = 40,
                 max_ratio: float = 0.25):
        self.model = model
        self.n_series = n_series
        self.max_ratio = max_ratio
        self._set_K(K)

    def _set_K(self, K):
        self.K = int(K)
        self.eig: EigenData = eigenvalues(self.model, self.K)
        self.lam = np.asarray(self.eig.lam)
        a, al = self.model.a_coef, self.model.alpha
        m = np.arange(1, self.n_series + 1, dtype=float)
        # coefficient of w^m in the tail: -a^{-m} zeta(alpha m, K+1)/m
        self._tail_coef = -(a ** -m) * zeta(al * m, self.K + 1.0) / m
        self.lam_next = a * (self.K + 1.0) ** al

    def ensure(self, wmax: float):
        if wmax > self.max_ratio * self.lam_next:
            a, al = self.model.a_coef, self.model.alpha
            K = int(np.ceil((wmax / (self.max_ratio * a)) ** (1.0 / al)))
            self._set_K(max(K, 2 * self.K))

    def _tail(self, w):
        c = self._tail_coef
        acc = np.zeros_like(w, dtype=complex)
        for cm in c[::-1]:
            acc = (acc + cm) * w
        r = np.abs(w) / self.lam_next
        M = self.n_series
        al = self.model.alpha
        bound = (r ** (M + 1) / (1.0 - r) / (M + 1)
                 * (1.0 + (self.K + 1.0) / (al * (M + 1) - 1.0)))
        return acc, bound

    def log_F(self, w, exclude: int | None = None) -> tuple[LogComplex, np.ndarray, np.ndarray]:
        """log prod_{k != exclude} (1 - w/lambda_k) for an array of arguments.

        Real arguments keep exact sign parity; purely imaginary ones use the
        closed form |1 + i y| and arctan for each factor.
        """
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        self.ensure(float(np.max(np.abs(w))) if w.size else 0.0)
        lam = self.lam
        keep = np.ones(self.K, bool)
        if exclude is not None and 1 <= exclude <= self.K:
            keep[exclude - 1] = False
        lam = lam[keep]
        lm = np.empty(w.shape)
        ph = np.empty(w.shape)
        rnd = np.empty(w.shape)
        eps = np.finfo(float).eps
        chunk = max(1, int(2e6 // max(lam.size, 1)))
        for i in range(0, w.size, chunk):
            ww = w[i:i + chunk]
            isreal = ww.imag == 0
            isimag = (ww.real == 0) & ~isreal
            gen = ~(isreal | isimag)
            part_lm = np.empty(ww.shape)
            part_ph = np.empty(ww.shape)
            if np.any(isreal):
                q = 1.0 - ww.real[isreal, None] / lam[None, :]
                with np.errstate(divide="ignore"):
                    part_lm[isreal] = np.sum(np.log(np.abs(q)), axis=1)
                part_ph[isreal] = np.pi * (np.count_nonzero(q < 0, axis=1) % 2)
            if np.any(isimag):
                y = -ww.imag[isimag, None] / lam[None, :]   # factor is 1 + i y
                part_lm[isimag] = 0.5 * np.sum(np.log1p(y * y), axis=1)
                part_ph[isimag] = np.sum(np.arctan(y), axis=1)
            if np.any(gen):
                q = np.log(1.0 - ww[gen, None] / lam[None, :])
                part_lm[gen] = np.sum(q.real, axis=1)
                part_ph[gen] = np.sum(q.imag, axis=1)
            lm[i:i + chunk] = part_lm
            ph[i:i + chunk] = part_ph
            rnd[i:i + chunk] = eps * lam.size * (1.0 + np.abs(ww) / lam[0])
        tail, bound = self._tail(w)
        lm = lm + tail.real
        ph = ph + tail.imag
        return LogComplex(lm, ph), bound, rnd

    def log_phi(self, n: int, z) -> ProductEval:
        """Phi_n(z) = prod_{k != n} (1 - z/(lambda_k - lambda_n))."""
        ln = self.model.a_coef * float(n) ** self.model.alpha
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        num, b1, r1 = self.log_F(ln + z, exclude=n)
        den, b2, r2 = self.log_F(np.array([ln]), exclude=n)
        return ProductEval(n, self.K, num / den, b1 + b2, r1 + r2)

    def lambda_n(self, n: int) -> float:
        return float(np.power(np.pi * n, self.model.alpha))

    def denominator(self, n: int) -> LogComplex:
        """F_n(lambda_n), whose factors with k < n are negative."""
        return self.log_F(np.array([self.lambda_n(n)]), exclude=n)[0]

    def psi_schrodinger(self, n: int, z) -> LogComplex:
        return self.log_F(z, exclude=n)[0] / self.denominator(n)

    def psi_heat(self, n: int, z) -> LogComplex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return self.log_F(-1j * z, exclude=n)[0] / self.denominator(n)

    def log_abs_plus(self, n: int) -> float:
        """log prod_{j != n} (1 + lambda_n/lambda_j)."""
        return float(self.log_F(np.array([-self.lambda_n(n)]), exclude=n)[0].log_mag[0])

    def log_abs_minus(self, n: int) -> float:
        """log prod_{j != n} |1 - lambda_n/lambda_j|."""
        return float(self.denominator(n).log_mag[0])


# ---------------------------------------------------------------- families

class BiorthogonalFamily:
    """g_n for one model, horizon and multiplier; nodes -lambda_k or i lambda_k."""

    def __init__(self, model: FracModel, T: float, g0: float, K: int = 2000,
                 rtol: float = 1e-10):
        self.model = model
        self.T = float(T)
        self.g0 = float(g0)
        self.cfg = MultiplierConfig.for_model(model, T, g0,
                                              normalize=(model.kind == "schrodinger"))
        self.H = Multiplier(self.cfg, rtol=rtol)
        self.products = SpectralProducts(model, K=K)
        self._h_node = {}

    @property
    def kind(self):
        return self.model.kind

    def node(self, k: int) -> complex:
        lk = self.products.lambda_n(k)
        return complex(-lk) if self.kind == "schrodinger" else 1j * lk

    def log_H_node(self, n: int) -> float:
        if n not in self._h_node:
            self._h_node[n] = float(self.H.log_H_imag(self.products.lambda_n(n))[0])
        return self._h_node[n]

    def g(self, n: int, z) -> LogComplex:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.kind == "schrodinger":
            return g_schrodinger(n, z, self)
        return g_heat(n, z, self)


def g_schrodinger(n: int, z, fam: BiorthogonalFamily) -> LogComplex:
    """g_n(z) = Psi_n(-z) H(z + lambda_n) with H(0) = 1."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    psi = fam.products.psi_schrodinger(n, -z)
    h = fam.H.H(z + fam.products.lambda_n(n))
    return psi * h


def g_heat(n: int, z, fam: BiorthogonalFamily) -> LogComplex:
    """g_n(z) = Psi_n(z) H(z) / H(i lambda_n), assembled in log form."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    psi = fam.products.psi_heat(n, z)
    h = fam.H.H(z)
    return LogComplex(psi.log_mag + h.log_mag - fam.log_H_node(n), psi.phase + h.phase)


def kronecker_errors(fam: BiorthogonalFamily, n_max: int) -> np.ndarray:
    """Matrix E[n-1, k-1] = |g_n(node_k) - delta_nk|."""
    nodes = np.array([fam.node(k) for k in range(1, n_max + 1)])
    E = np.empty((n_max, n_max))
    for n in range(1, n_max + 1):
        vals = fam.g(n, nodes)
        with np.errstate(over="ignore"):
            v = vals.to_complex()
        E[n - 1] = np.abs(v - (np.arange(1, n_max + 1) == n))
    return E


# ---------------------------------------------------------------- calibration

@dataclass
class Calibration:
    g0: float
    ladder: list
    feasible: bool


def real_axis_profile(fam: BiorthogonalFamily, n: int = 1, x_max: float = 2e5,
                      n_points: int = 80):
    """log|g_n| on a geometric grid of x >= 1 (both signs for Schrodinger)."""
    xs = np.geomspace(1.0, x_max, n_points)
    if fam.kind == "schrodinger":
        xs = np.concatenate([-xs[::-1], xs])
    return xs, fam.g(n, xs).log_mag


def calibrate_g0(model: FracModel, T: float, *, K: int = 2000, x_max: float = 2e5,
                 decay: float = 30.0, steps: int = 13, ratio: float = 2 ** 0.25) -> Calibration:
    """Pick g0 = nu b on a geometric ladder starting at g0 = b (nu = 1).

    A rung is feasible when log|g_1| at the far end of the grid sits ``decay``
    nats below its peak, i.e. the real-axis envelope has visibly decayed. Among
    feasible rungs the one with the smallest L2 norm of g_1 (trapezoid in x) wins.
    """
    b = T / 2.0
    ladder = []
    for j in range(steps):
        g0 = b * ratio ** j
        fam = BiorthogonalFamily(model, T, g0, K=K)
        xs, lg = real_axis_profile(fam, 1, x_max)
        peak = float(np.max(lg))
        tail = float(np.max(lg[np.abs(xs) >= 0.8 * x_max]))
        w = np.exp(2.0 * (lg - peak))
        l2 = peak + 0.5 * np.log(np.trapezoid(w, xs))
        ladder.append({"g0": g0, "peak": peak, "tail": tail, "log_l2": float(l2),
                       "feasible": bool(tail <= peak - decay)})
    ok = [r for r in ladder if r["feasible"]]
    if ok:
        best = min(ok, key=lambda r: r["log_l2"])
        return Calibration(best["g0"], ladder, True)
    return Calibration(ladder[-1]["g0"], ladder, False)
