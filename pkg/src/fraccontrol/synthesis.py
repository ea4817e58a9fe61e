"""Null-control assembly: moment coefficients, the interpolant V, inversion to a
time signal u, and the finite-dimensional minimum-norm (Gramian) control.

Moment conditions under the orthonormal sine basis (trace phi_k'(1)):

    heat:        int_0^T u(t) e^{lambda_k t} dt   = a_k / phi_k'(1)
    Schrodinger: int_0^T u(t) e^{i lambda_k t} dt = -i a_k / phi_k'(1)

With u(t) = v(t - T/2), supp v in [-T/2, T/2] and V(z) = int v(t) e^{-i z t} dt,
these become V(i lambda_k) = a_k e^{-lambda_k T/2} / phi_k'(1) (heat) and
V(-lambda_k) = -i a_k e^{-i lambda_k T/2} / phi_k'(1) (Schrodinger).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import mpmath as mp
import numpy as np

from .biorthogonal import BiorthogonalFamily
from .numerics import LogComplex, RankDeficiencyError, solve_min_norm
from .spectrum import FracModel, boundary_trace


@dataclass
class ModalState:
    """Sine coefficients a_k = <y0, phi_k>, k = 1..n_modes."""

    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @classmethod
    def mode(cls, k: int, n_modes: int | None = None):
        n = max(k, n_modes or k)
        c = np.zeros(n, complex)
        c[k - 1] = 1.0
        return cls(c)

    def padded(self, n: int) -> "ModalState":
        if n <= self.n_modes:
            return ModalState(self.coeffs[:n].copy())
        return ModalState(np.concatenate([self.coeffs, np.zeros(n - self.n_modes, complex)]))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass
class ControlSignal:
    """Samples of u on the uniform grid t_j = j T/(M-1), j = 0..M-1, with trapezoid weights."""

    T: float
    samples: np.ndarray
    t0: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.size < 2:
            raise ValueError("a control needs at least two samples")

    @property
    def t(self) -> np.ndarray:
        return self.t0 + np.linspace(0.0, self.T, self.samples.size)

    @property
    def dt(self) -> float:
        return self.T / (self.samples.size - 1)

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.samples.size, self.dt)
        w[0] = w[-1] = 0.5 * self.dt
        return w

    def split(self, j: int) -> tuple["ControlSignal", "ControlSignal"]:
        """Two controls sharing sample j; the second starts at t_j."""
        m = self.samples.size
        if not 0 < j < m - 1:
            raise ValueError("split index must be interior")
        tj = self.t0 + j * self.dt
        return (ControlSignal(j * self.dt, self.samples[:j + 1], self.t0),
                ControlSignal((m - 1 - j) * self.dt, self.samples[j:], tj))

    def subsampled(self, step: int = 2) -> "ControlSignal":
        if (self.samples.size - 1) % step:
            raise ValueError("grid cannot be subsampled evenly")
        return ControlSignal(self.T, self.samples[::step], self.t0)


def control_cost(u: ControlSignal) -> float:
    """L2(0, T) norm by the attached trapezoid rule."""
    return float(np.sqrt(np.sum(u.weights * np.abs(u.samples) ** 2)))


# ---------------------------------------------------------------- moment method

def moment_coeffs(y0: ModalState, T: float, model: FracModel) -> LogComplex:
    """Interpolation data c_k = V(node_k), returned in log form."""
    k = np.arange(1, y0.n_modes + 1)
    lam = np.power(np.pi * k, model.alpha)
    a = LogComplex.from_complex(y0.coeffs)
    tr = boundary_trace(k)
    trace = LogComplex(np.log(np.abs(tr)), np.where(tr < 0, np.pi, 0.0))
    if model.kind == "heat":
        growth = LogComplex(-lam * T / 2.0, 0.0)
        return a * growth / trace
    rot = LogComplex(np.zeros_like(lam), -np.pi / 2.0 - lam * T / 2.0)
    return a * rot / trace


@dataclass
class VAudit:
    log_term_max: np.ndarray    # max over x of log|c_n g_n(x)| per used mode
    modes: np.ndarray


def build_V(x, coeffs: LogComplex, fam: BiorthogonalFamily) -> tuple[LogComplex, VAudit]:
    """V(x) = sum_n c_n g_n(x) with per-term magnitudes kept for a truncation audit."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    used = np.nonzero(np.isfinite(coeffs.log_mag))[0]
    if used.size == 0:
        return LogComplex.zeros(x.shape), VAudit(np.array([]), np.array([], int))
    terms_lm = np.empty((used.size, x.size))
    terms_ph = np.empty((used.size, x.size))
    # heat: H(x) is shared by every term, so evaluate it once
    h = fam.H.H(x) if fam.kind == "heat" else None
    for i, j in enumerate(used):
        n = int(j) + 1
        if h is None:
            g = fam.g(n, x)
            glm, gph = g.log_mag, g.phase
        else:
            psi = fam.products.psi_heat(n, x)
            glm = psi.log_mag + h.log_mag - fam.log_H_node(n)
            gph = psi.phase + h.phase
        terms_lm[i] = glm + coeffs.log_mag[j]
        terms_ph[i] = gph + coeffs.phase[j]
    total = LogComplex(terms_lm, terms_ph).sum(axis=0)
    return total, VAudit(np.max(terms_lm, axis=1), used + 1)


@dataclass
class Inversion:
    control: ControlSignal
    support_violation: float     # ||v|| on (T/2, 3T/2) over ||v|| on [-T/2, T/2]
    tail_bound: float
    X: float
    n_x: int


def invert_to_control(V: Callable, T: float, grid_size: int, X: float, *,
                      hermitian: bool = False, tail_bound: float = np.nan) -> Inversion:
    """u(t) = v(t - T/2) with v(t) = (1/2 pi) int_{-X}^{X} V(x) e^{i x t} dx.

    Since v vanishes outside [-T/2, T/2], the trapezoid rule in x with step
    h = pi/T reproduces v there exactly up to the cutoff (its aliases sit at
    distance 2T). The sum is carried out by one FFT of length 2(M-1), which
    also yields v on (T/2, 3T/2), where it should vanish. ``hermitian`` means
    V(-x) = conj V(x) so only x >= 0 is evaluated and u is real. ``V`` maps a
    real array to a LogComplex.
    """
    M = int(grid_size)
    if M < 3:
        raise ValueError("grid_size too small")
    b = T / 2.0
    hx = np.pi / T
    J = int(np.floor(X / hx))
    L = 2 * (M - 1)
    jpos = np.arange(0, J + 1)
    vpos = V(jpos * hx)
    if hermitian:
        vneg = vpos[1:].conj()
    else:
        vneg = V(-jpos[1:] * hx)
    with np.errstate(over="raise"):
        Vp = vpos.to_complex()
        Vn = vneg.to_complex()
    # sample t_m = -b + m dt with dt = T/(M-1): e^{i x_j t_m} = e^{-i x_j b} w^{j m}, w = e^{2 pi i/L}
    acc = np.zeros(L, complex)
    np.add.at(acc, jpos % L, Vp * np.exp(-1j * jpos * hx * b))
    jn = -jpos[1:]
    np.add.at(acc, jn % L, Vn * np.exp(-1j * jn * hx * b))
    v = np.fft.ifft(acc) * L * hx / (2.0 * np.pi)
    inside = v[:M]
    outside = v[M - 1:]
    samples = inside.real if hermitian else inside
    nin = np.sqrt(np.sum(np.abs(inside) ** 2))
    nout = np.sqrt(np.sum(np.abs(outside[1:-1]) ** 2))
    ctl = ControlSignal(T, samples.copy())
    return Inversion(ctl, float(nout / nin) if nin > 0 else 0.0, float(tail_bound), float(X),
                     2 * J + 1)


@dataclass
class MomentControl:
    control: ControlSignal
    log_cost: float
    inversion: Inversion
    audit: VAudit
    g0: float
    X: float


def choose_cutoff(fam: BiorthogonalFamily, coeffs: LogComplex, *, x_max: float = 4e5,
                  drop: float = 40.0, n_points: int = 120) -> tuple[float, float]:
    """Cutoff X where the sampled envelope of |V| has fallen ``drop`` nats below its
    peak, plus an estimate of (1/2 pi) int_{|x|>X} |V| from the same samples."""
    xs = np.geomspace(1.0, x_max, n_points)
    grid = np.concatenate([-xs[::-1], [0.0], xs])
    lv = build_V(grid, coeffs, fam)[0].log_mag
    peak = np.max(lv)
    env = np.maximum.accumulate(lv[::-1])[::-1]          # right envelope
    envl = np.maximum.accumulate(lv)                      # left envelope
    right = np.nonzero((grid > 0) & (env < peak - drop))[0]
    left = np.nonzero((grid < 0) & (envl < peak - drop))[0]
    if right.size == 0 or left.size == 0:
        raise ValueError("envelope of V does not decay within x_max; raise x_max or g0")
    X = max(grid[right[0]], -grid[left[-1]])
    tail_mask = np.abs(grid) >= X
    vals = np.exp(lv[tail_mask])
    xt = np.abs(grid[tail_mask])
    tail = float(np.trapezoid(vals[grid[tail_mask] > 0], xt[grid[tail_mask] > 0])
                 + np.trapezoid(vals[grid[tail_mask] < 0][::-1], xt[grid[tail_mask] < 0][::-1]))
    return float(X), tail / (2.0 * np.pi)


def moment_control(y0: ModalState, T: float, model: FracModel, *, g0: float,
                   grid_size: int = 2 ** 20 + 1, K: int = 2000, X: float | None = None,
                   rtol: float = 1e-10) -> MomentControl:
    """Moment-method null control built from the interpolating family."""
    fam = BiorthogonalFamily(model, T, g0, K=K, rtol=rtol)
    coeffs = moment_coeffs(y0, T, model)
    if X is None:
        X, tail = choose_cutoff(fam, coeffs)
    else:
        tail = np.nan
    hermitian = model.kind == "heat" and np.allclose(y0.coeffs.imag, 0.0)
    audit_box = {}

    def V(x):
        val, audit = build_V(x, coeffs, fam)
        audit_box["audit"] = audit
        return val

    inv = invert_to_control(V, T, grid_size, X, hermitian=hermitian, tail_bound=tail)
    cost = control_cost(inv.control)
    audit = audit_box.get("audit")
    peak = float(np.max(audit.log_term_max)) if audit is not None and audit.modes.size else -np.inf
    umax = float(np.max(np.abs(inv.control.samples)))
    # digits lost when the Fourier sum of |V| ~ e^peak collapses to |u| ~ umax
    lost = (peak - np.log(umax)) / np.log(10.0) if umax > 0 else np.inf
    inv.control.info.update({"method": "moment", "g0": g0, "X": X, "K": fam.products.K,
                             "support_violation": inv.support_violation,
                             "tail_bound": tail, "log_peak_term": peak,
                             "cancellation_digits": float(lost),
                             "trustworthy": bool(lost < 8.0)})
    with np.errstate(divide="ignore"):
        return MomentControl(inv.control, float(np.log(cost)), inv, audit_box.get("audit"), g0, X)


# ---------------------------------------------------------------- Gramian (minimum norm)

@dataclass
class GramianControl:
    control: ControlSignal
    log_cost: float
    beta: np.ndarray
    N: int
    precision: str


def _heat_gramian_mp(lam, T):
    n = len(lam)
    G = mp.matrix(n, n)
    for i in range(n):
        for j in range(i, n):
            s = lam[i] + lam[j]
            G[i, j] = G[j, i] = -mp.expm1(-s * T) / s
    return G


def heat_targets(y0: ModalState, T: float, lam) -> list:
    """d_k = e^{-lambda_k T} a_k / phi_k'(1), the moments against e^{-lambda_k (T - t)}."""
    out = []
    for k, (a, l) in enumerate(zip(y0.coeffs, lam), start=1):
        out.append(mp.exp(-l * T) * mp.mpc(a.real, a.imag) / boundary_trace(k))
    return out


def min_norm_control(y0: ModalState, T: float, N: int, model: FracModel, *,
                     grid_size: int = 2 ** 17 + 1, dps: int | None = None,
                     precision: str = "auto") -> GramianControl:
    """Minimum L2-norm control meeting the first N moment conditions.

    heat: u = sum_k beta_k e^{-lambda_k (T - t)}; the Gramian is solved and u is
    sampled in extended precision because the coefficients alternate in sign and
    cancel by many orders of magnitude. Schrodinger: u = sum_k beta_k e^{-i lambda_k t}
    with G_kj = int_0^T e^{i(lambda_k - lambda_j) t} dt (diagonal T), solved in
    double when the scaled Gramian keeps full rank.
    """
    y = y0.padded(N)
    if not np.any(y.coeffs):
        ctl = ControlSignal(T, np.zeros(grid_size))
        return GramianControl(ctl, -np.inf, np.zeros(N), N, "exact")
    dps = dps or int(1.4 * N + 40)
    t = np.linspace(0.0, T, grid_size)
    if model.kind == "heat":
        with mp.workdps(dps):
            lam = [mp.power(mp.pi * k, model.alpha) for k in range(1, N + 1)]
            G = _heat_gramian_mp(lam, mp.mpf(T))
            d = heat_targets(y, mp.mpf(T), lam)
            real = all(mp.im(v) == 0 for v in d)
            rhs = [mp.re(v) for v in d] if real else d
            res = solve_min_norm(G, rhs, precision="mp", dps=dps)
            samples = _exp_sum_mp(res.coeffs, lam, T, grid_size, dps)
            beta = np.array([complex(b) for b in res.coeffs])
        samples = samples.real if real else samples
        ctl = ControlSignal(T, samples, info={"method": "gramian", "N": N, "dps": dps})
        return GramianControl(ctl, res.log_cost, beta.real if real else beta, N, "mp")
    lam = np.power(np.pi * np.arange(1, N + 1), model.alpha)
    dl = lam[:, None] - lam[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.where(dl == 0, T, np.expm1(1j * dl * T) / (1j * dl))
    m = -1j * y.coeffs / boundary_trace(np.arange(1, N + 1))
    prec = precision
    if precision in ("auto", "double"):
        try:
            res = solve_min_norm(G, m, precision="double")
            prec = "double"
        except RankDeficiencyError:
            if precision == "double":
                raise
            prec = "mp"
    if prec == "mp":
        with mp.workdps(dps):
            lamm = [mp.power(mp.pi * k, model.alpha) for k in range(1, N + 1)]
            Gm = mp.matrix(N, N)
            for i in range(N):
                for j in range(N):
                    dd = lamm[i] - lamm[j]
                    Gm[i, j] = mp.mpf(T) if i == j else mp.expm1(1j * dd * T) / (1j * dd)
            res = solve_min_norm(Gm, [mp.mpc(v.real, v.imag) for v in m], precision="mp",
                                 dps=dps)
            beta = np.array([complex(b) for b in res.coeffs])
    else:
        beta = res.coeffs
    samples = np.exp(-1j * np.outer(t, lam)) @ beta
    ctl = ControlSignal(T, samples, info={"method": "gramian", "N": N, "precision": prec})
    return GramianControl(ctl, res.log_cost, beta, N, prec)


def gramian_log_cost(y0: ModalState, T: float, N: int, model: FracModel, *,
                     dps: int | None = None) -> tuple[float, str]:
    """log of the minimum-norm cost over the first N moments, without sampling u.

    The heat problem with y0 = phi_1 uses the O(N^2) structured elimination; other
    heat states go through the dense extended-precision solve.
    """
    y = y0.padded(N)
    c = y.coeffs
    if model.kind == "heat" and c[0] != 0 and not np.any(c[1:]):
        return heat_log_cost_first_mode(model, T, N, dps or 60) + float(np.log(abs(c[0]))), "mp"
    if model.kind == "heat":
        dps = dps or int(1.4 * N + 40)
        with mp.workdps(dps):
            lam = [mp.power(mp.pi * k, model.alpha) for k in range(1, N + 1)]
            G = _heat_gramian_mp(lam, mp.mpf(T))
            res = solve_min_norm(G, heat_targets(y, mp.mpf(T), lam), precision="mp", dps=dps)
        return res.log_cost, "mp"
    g = min_norm_control(y0, T, N, model, grid_size=3, dps=dps)
    return g.log_cost, g.precision


def _exp_sum_mp(beta, lam, T, M, dps):
    """Samples of sum_k beta_k e^{-lambda_k (T - t_j)} on the uniform grid, in mp.

    Powers of r_k = e^{-lambda_k dt} are accumulated from t = T backwards, so
    each sample costs one multiply per term.
    """
    with mp.workdps(dps):
        dt = mp.mpf(T) / (M - 1)
        out = np.empty(M, dtype=complex)
        cur = [mp.mpmathify(b) for b in beta]
        r = [mp.exp(-l * dt) for l in lam]
        n = len(cur)
        for j in range(M - 1, -1, -1):
            s = mp.fsum(cur)
            out[j] = complex(s)
            for k in range(n):
                cur[k] *= r[k]
        return out


# ---------------------------------------------------------------- structured heat cost

def heat_log_cost_first_mode(model: FracModel, T: float, N: int, dps: int = 60) -> float:
    """log of the minimum-norm cost for y0 = phi_1 with N heat moments, in O(N^2).

    The Gramian G_jk = (1 - e_j e_k)/(lambda_j + lambda_k), e_j = e^{-lambda_j T},
    satisfies Lambda G + G Lambda = u u^T - e e^T with u = (1, ..., 1). Schur
    complements keep this rank-two form, so eliminating modes N..2 only updates
    the two generator vectors. The last pivot equals 1/(G^{-1})_{11}, and the
    cost is |d_1| times its inverse square root.
    """
    with mp.workdps(dps):
        a = mp.pi ** model.alpha
        s2 = 2 * mp.mpf(model.s)
        lam = np.array([a * mp.mpf(k) ** s2 for k in range(1, N + 1)], dtype=object)
        Tm = mp.mpf(T)
        u = np.array([mp.mpf(1)] * N, dtype=object)
        e = np.array([mp.exp(-l * Tm) for l in lam], dtype=object)
        for p in range(N - 1, 0, -1):
            piv = (u[p] - e[p]) * (u[p] + e[p]) / (2 * lam[p])
            col = (u[:p] * u[p] - e[:p] * e[p]) / ((lam[:p] + lam[p]) * piv)
            u[:p] = u[:p] - col * u[p]
            e[:p] = e[:p] - col * e[p]
        last = (u[0] - e[0]) * (u[0] + e[0]) / (2 * lam[0])
        log_d1 = -lam[0] * Tm - mp.log(mp.sqrt(2) * mp.pi)
        return float(log_d1 - mp.log(last) / 2)
