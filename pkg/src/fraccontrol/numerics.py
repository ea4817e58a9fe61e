"""Numeric kernels: log-domain complex numbers, adaptive quadrature, principal
values, Fourier integrals of compactly supported windows along deformed paths,
minimum-norm solves and scaling-law fits.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import mpmath as mp
import numpy as np
from scipy.linalg import lapack, solve_triangular


class IntegrationError(RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget."""


class RankDeficiencyError(np.linalg.LinAlgError):
    """Pivoted Cholesky found fewer numerically positive pivots than unknowns."""

    def __init__(self, rank: int, n: int):
        super().__init__(f"numerical rank {rank} < {n}; reduce N or raise precision")
        self.rank = rank
        self.n = n


class OverflowGuardError(OverflowError):
    pass


def _wrap(phase):
    # map to (-pi, pi]
    p = np.remainder(np.asarray(phase, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(p == -np.pi, np.pi, p)


class LogComplex:
    """Complex numbers stored as (log|z|, arg z), elementwise over arrays.

    Zero is ``log_mag = -inf`` with phase 0.
    """

    __slots__ = ("log_mag", "phase")

    def __init__(self, log_mag, phase=0.0):
        lm = np.asarray(log_mag, dtype=float)
        ph = np.broadcast_to(np.asarray(phase, dtype=float), lm.shape)
        ph = np.where(np.isneginf(lm), 0.0, _wrap(ph))
        self.log_mag = lm
        self.phase = ph

    @classmethod
    def from_complex(cls, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            return cls(np.log(np.abs(z)), np.angle(z))

    @classmethod
    def zeros(cls, shape=()):
        return cls(np.full(shape, -np.inf), np.zeros(shape))

    @classmethod
    def ones(cls, shape=()):
        return cls(np.zeros(shape), np.zeros(shape))

    @property
    def shape(self):
        return self.log_mag.shape

    def __len__(self):
        return len(self.log_mag)

    def __getitem__(self, idx):
        return LogComplex(self.log_mag[idx], self.phase[idx])

    def __mul__(self, other):
        other = _as_lc(other)
        return LogComplex(self.log_mag + other.log_mag, self.phase + other.phase)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_lc(other)
        if np.any(np.isneginf(other.log_mag)):
            raise ZeroDivisionError("division by a LogComplex zero")
        return LogComplex(self.log_mag - other.log_mag, self.phase - other.phase)

    def conj(self):
        return LogComplex(self.log_mag, -self.phase)

    def __add__(self, other):
        other = _as_lc(other)
        la, lb = np.broadcast_arrays(self.log_mag, other.log_mag)
        pa, pb = np.broadcast_arrays(self.phase, other.phase)
        m = np.maximum(la, lb)
        finite = np.isfinite(m)
        ms = np.where(finite, m, 0.0)
        with np.errstate(invalid="ignore"):
            s = np.exp(la - ms + 1j * pa) + np.exp(lb - ms + 1j * pb)
        with np.errstate(divide="ignore"):
            lm = np.where(finite, np.log(np.abs(s)) + ms, -np.inf)
        return LogComplex(lm, np.where(finite, np.angle(s), 0.0))

    __radd__ = __add__

    def __neg__(self):
        return LogComplex(self.log_mag, self.phase + np.pi)

    def __sub__(self, other):
        return self + (-_as_lc(other))

    def sum(self, axis=None):
        """Log-sum-exp reduction."""
        lm, ph = self.log_mag, self.phase
        m = np.max(lm, axis=axis, keepdims=True)
        ms = np.where(np.isfinite(m), m, 0.0)
        s = np.sum(np.exp(lm - ms + 1j * ph), axis=axis, keepdims=True)
        with np.errstate(divide="ignore"):
            out = np.log(np.abs(s)) + ms
        out = np.where(np.isfinite(m), out, -np.inf)
        ang = np.angle(s)
        if axis is None:
            return LogComplex(out.reshape(()), ang.reshape(()))
        return LogComplex(np.squeeze(out, axis=axis), np.squeeze(ang, axis=axis))

    def to_complex(self):
        with np.errstate(over="raise"):
            return np.exp(self.log_mag) * np.exp(1j * self.phase)

    def __repr__(self):
        return f"LogComplex(log_mag={self.log_mag!r}, phase={self.phase!r})"


def _as_lc(x) -> LogComplex:
    if isinstance(x, LogComplex):
        return x
    return LogComplex.from_complex(x)


# ---------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class QuadRule:
    """Rule on [-1, 1]; ``order`` is the polynomial degree integrated exactly."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def apply(self, f, a: float, b: float) -> float:
        c, h = 0.5 * (a + b), 0.5 * (b - a)
        return h * float(np.dot(self.weights, f(c + h * self.nodes)))


def gauss_legendre(n: int) -> QuadRule:
    x, w = np.polynomial.legendre.leggauss(n)
    return QuadRule(x, w, 2 * n - 1)


_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG7 = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

GK15_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK15_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# embedded 7-point Gauss weights on the same 15 nodes (zero on Kronrod-only nodes)
G7_WEIGHTS = np.zeros(15)
G7_WEIGHTS[[1, 3, 5]] = _WG7[:3]
G7_WEIGHTS[[13, 11, 9]] = _WG7[:3]
G7_WEIGHTS[7] = _WG7[3]


def kronrod15() -> QuadRule:
    return QuadRule(GK15_NODES.copy(), GK15_WEIGHTS.copy(), 22)


def _vectorize(f):
    def g(x):
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(xi)) for xi in x])
    return g


def _gk_panel(f, a, b):
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    y = f(c + h * GK15_NODES)
    k = h * np.dot(GK15_WEIGHTS, y)
    g = h * np.dot(G7_WEIGHTS, y)
    roundoff = 50 * np.finfo(float).eps * h * np.dot(GK15_WEIGHTS, np.abs(y))
    return k, max(abs(k - g), roundoff)


def _mapped(fv, t, x0, sgn):
    # x = x0 + sgn t/(1-t); panels that round onto t = 1 contribute nothing
    ok = t < 1.0
    ts = np.where(ok, t, 0.0)
    y = fv(x0 + sgn * ts / (1.0 - ts)) / (1.0 - ts) ** 2
    return np.where(ok, y, 0.0)


def integrate(f: Callable, a: float, b: float, tol: float = 1e-10, *, rtol: float = 0.0,
              max_subdivisions: int = 5000, return_error: bool = False):
    """Globally adaptive Gauss-Kronrod (7, 15) integration of ``f`` over [a, b].

    Infinite limits are mapped onto finite ones (x = a + t/(1-t) and mirrors).
    Endpoints are never sampled, so integrable endpoint singularities are fine.
    Raises IntegrationError when the budget is exhausted above ``max(tol, rtol*|I|)``.
    """
    fv = _vectorize(f)
    if a == b:
        return (0.0, 0.0) if return_error else 0.0
    if a > b:
        out = integrate(f, b, a, tol, rtol=rtol, max_subdivisions=max_subdivisions,
                        return_error=True)
        return (-out[0], out[1]) if return_error else -out[0]
    if np.isinf(a) and np.isinf(b):
        v1, e1 = integrate(f, -np.inf, 0.0, tol / 2, rtol=rtol,
                           max_subdivisions=max_subdivisions, return_error=True)
        v2, e2 = integrate(f, 0.0, np.inf, tol / 2, rtol=rtol,
                           max_subdivisions=max_subdivisions, return_error=True)
        return (v1 + v2, e1 + e2) if return_error else v1 + v2
    if np.isinf(b):
        def g(t):
            return _mapped(fv, t, a, 1.0)
        lo, hi = 0.0, 1.0
    elif np.isinf(a):
        def g(t):
            return _mapped(fv, t, b, -1.0)
        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = fv, a, b

    val, err = _gk_panel(g, lo, hi)
    heap = [(-err, lo, hi, val, err)]
    total, total_err = val, err
    for _ in range(max_subdivisions):
        if total_err <= max(tol, rtol * abs(total)):
            break
        _, l, r, v, e = heapq.heappop(heap)
        m = 0.5 * (l + r)
        v1, e1 = _gk_panel(g, l, m)
        v2, e2 = _gk_panel(g, m, r)
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(heap, (-e1, l, m, v1, e1))
        heapq.heappush(heap, (-e2, m, r, v2, e2))
    else:
        # recompute to shed accumulated rounding in the running sums
        total = sum(item[3] for item in heap)
        total_err = sum(item[4] for item in heap)
        if total_err > max(tol, rtol * abs(total)):
            raise IntegrationError(
                f"no convergence after {max_subdivisions} subdivisions: "
                f"estimate {total!r}, error {total_err:.3e}")
    total = math.fsum(item[3] for item in heap)
    total_err = sum(item[4] for item in heap)
    return (total, total_err) if return_error else total


def integrate_pv(f: Callable, c: float, a: float, b: float, tol: float = 1e-10, *,
                 delta: float | None = None, return_error: bool = False):
    """Cauchy principal value of ``f`` over [a, b] with a simple pole at ``c``.

    The far part is integrated directly. Near the pole the excised integral
    E(d) = int_{d<|x-c|<d0} f is an odd power series in d, so its d -> 0 limit is
    obtained from d, d/2, d/4 with two Richardson steps. The difference between
    the last two extrapolants is the reported error.
    """
    if not (a < c < b):
        raise ValueError("pole must lie strictly inside (a, b)")
    fv = _vectorize(f)
    d0 = 0.5 * (c - a) if np.isinf(b) else 0.5 * min(c - a, b - c)
    far = integrate(fv, a, c - d0, tol / 4) + integrate(fv, c + d0, b, tol / 4)

    def pair(u):
        return fv(c + u) + fv(c - u)

    d1 = delta if delta is not None else d0 * 1e-2
    e = [integrate(pair, d, d0, tol / 8) for d in (d1, d1 / 2, d1 / 4)]
    r1 = [2 * e[1] - e[0], 2 * e[2] - e[1]]
    r2 = (8 * r1[1] - r1[0]) / 7
    err = abs(r2 - r1[1])
    if err > max(tol, 1e3 * tol * abs(r2)) and err > 1e-6:
        raise IntegrationError(f"principal value did not stabilise (residual {err:.2e})")
    val = far + r2
    return (val, err) if return_error else val


# ---------------------------------------------------------------- Fourier integrals

_GL16 = np.polynomial.legendre.leggauss(16)


@dataclass
class FourierResult:
    value: LogComplex
    log_mass: np.ndarray     # log of int |integrand| along the path
    rel_error: np.ndarray    # |I_h - I_{h/2}| / |I_{h/2}|
    h: np.ndarray
    log_envelope: np.ndarray  # for symmetric_real: log|2 * one leg|, a zero-free majorant

    @property
    def conditioning(self):
        """log(int|f| / |int f|): digits lost to cancellation, in nats."""
        return self.log_mass - self.value.log_mag


def _leg_nodes(r0, r_min, R, h):
    """Composite 16-point Gauss rule in s = log r on [log r_min, log R].

    Vectorised over the leading axis of r0/r_min; returns (r, w) with w the
    weight for dr.
    """
    s0 = np.log(r_min)
    s1 = np.log(R) * np.ones_like(s0)
    width = s1 - s0
    npan = max(1, int(np.ceil(np.max(width) / h)))
    edges = s0[:, None] + width[:, None] * np.linspace(0.0, 1.0, npan + 1)[None, :]
    lo, hi = edges[:, :-1, None], edges[:, 1:, None]
    x, w = _GL16
    s = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
    ws = 0.5 * (hi - lo) * w
    r = np.exp(s).reshape(len(s0), -1)
    return r, (ws.reshape(len(s0), -1) * r)


def _path_sum(log_window, b, z, angle, r0, r_min, h, symmetric_real):
    """One evaluation of int_{-1}^{1} w(t) e^{-i b z t} dt along the two-leg path."""
    R = 1.0 / np.cos(angle)
    r, w = _leg_nodes(r0, r_min, R, h)
    logw = np.log(w)
    dA = np.exp(-1j * angle)[:, None]
    zz = z[:, None]
    opA = r * dA
    omA = 2.0 - r * dA
    tA = -1.0 + r * dA
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        lA = log_window(omA, opA) - 1j * b * zz * tA + logw + np.log(dA)
    lA = np.where(np.isfinite(lA.real), lA, -np.inf + 0j)
    if symmetric_real:
        legs = [lA]
    else:
        dB = np.exp(1j * angle)[:, None]
        omB = r * dB
        opB = 2.0 - r * dB
        tB = 1.0 - r * dB
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            lB = log_window(omB, opB) - 1j * b * zz * tB + logw + np.log(dB)
        lB = np.where(np.isfinite(lB.real), lB, -np.inf + 0j)
        legs = [lA, lB]
    allr = np.concatenate([l.real for l in legs], axis=1)
    m = np.max(allr, axis=1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    sums = [np.sum(np.exp(l - m), axis=1) for l in legs]
    if symmetric_real:
        s = 2.0 * sums[0].real + 0j
        env = 2.0 * np.abs(sums[0])
        mass = 2.0 * np.sum(np.exp(lA.real - m), axis=1)
    else:
        s = sums[0] + sums[1]
        env = np.abs(s)
        mass = sum(np.sum(np.exp(l.real - m), axis=1) for l in legs)
    with np.errstate(divide="ignore"):
        return (np.log(np.abs(s)) + m[:, 0], np.angle(s), np.log(mass) + m[:, 0], s, m[:, 0],
                np.log(env) + m[:, 0])


def fourier_integral(log_window: Callable, b: float, z, *, angle=0.0, saddle_radius=0.5,
                     floor_radius=None, rtol: float = 1e-10, h0: float = 0.25,
                     max_halvings: int = 6, guard: float = 1e7,
                     symmetric_real: bool = False) -> FourierResult:
    """Evaluate int_{-1}^{1} w(t) exp(-i b z t) dt as a LogComplex.

    ``log_window(one_minus_t, one_plus_t)`` returns log w at complex t; the two
    endpoint distances are passed separately so no cancellation occurs next to
    the endpoints. The path runs from -1 along the ray -1 + r e^{-i angle}, meets
    its mirror image at the imaginary axis and ends at +1 (``angle = 0`` is the
    real segment). Nodes are Gauss panels in log r, centred on ``saddle_radius``.
    With ``symmetric_real`` (real z, real even window) only one leg is summed
    and the real part doubled. Panel width is halved until two successive
    results agree to ``rtol``.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    chunk = 256
    if z.size > chunk:
        kw = dict(b=b, rtol=rtol, h0=h0, max_halvings=max_halvings, guard=guard,
                  symmetric_real=symmetric_real)
        ang = np.broadcast_to(np.asarray(angle, float), z.shape)
        sr = np.broadcast_to(np.asarray(saddle_radius, float), z.shape)
        fr = None if floor_radius is None else np.broadcast_to(np.asarray(floor_radius, float),
                                                                z.shape)
        parts = [fourier_integral(log_window, z=z[i:i + chunk], angle=ang[i:i + chunk],
                                  saddle_radius=sr[i:i + chunk],
                                  floor_radius=None if fr is None else fr[i:i + chunk], **kw)
                 for i in range(0, z.size, chunk)]
        cat = np.concatenate
        return FourierResult(LogComplex(cat([p.value.log_mag for p in parts]),
                                        cat([p.value.phase for p in parts])),
                             cat([p.log_mass for p in parts]), cat([p.rel_error for p in parts]),
                             cat([p.h for p in parts]), cat([p.log_envelope for p in parts]))
    if np.any(np.abs(z.imag) * b > guard):
        raise OverflowGuardError(f"|Im z| * b exceeds guard {guard:g}")
    angle = np.broadcast_to(np.asarray(angle, dtype=float), z.shape).copy()
    R = 1.0 / np.cos(angle)
    r0 = np.minimum(np.broadcast_to(np.asarray(saddle_radius, float), z.shape), 0.5 * R)
    r_min = r0 * np.exp(-6.0)
    if floor_radius is not None:
        r_min = np.minimum(r_min, floor_radius)
    h = h0
    rel = np.full(z.shape, np.inf)
    hs = np.full(z.shape, h0)
    todo = np.ones(z.shape, bool)
    out_lm = np.empty(z.shape)
    out_ph = np.empty(z.shape)
    out_mass = np.empty(z.shape)
    out_env = np.empty(z.shape)
    prev_s = {}
    for level in range(max_halvings + 1):
        idx = np.nonzero(todo)[0]
        if idx.size == 0:
            break
        lm, ph, mass, s, m, env = _path_sum(log_window, b, z[idx], angle[idx], r0[idx],
                                            r_min[idx], h, symmetric_real)
        out_lm[idx], out_ph[idx], out_mass[idx], out_env[idx] = lm, ph, mass, env
        hs[idx] = h
        if level > 0:
            ps, pm = prev_s["s"], prev_s["m"]
            # difference of the two estimates, rescaled to the finer one's max
            with np.errstate(over="ignore", invalid="ignore"):
                diff = np.abs(s - ps * np.exp(pm - m))
                r = diff / np.abs(s)
            rel[idx] = np.where(np.isfinite(r), r, np.inf)
            done = rel[idx] <= rtol
            todo[idx[done]] = False
            keep = ~done
            prev_s = {"s": s[keep], "m": m[keep]}
        else:
            prev_s = {"s": s, "m": m}
        h *= 0.5
    val = LogComplex(out_lm, out_ph)
    res = FourierResult(val, out_mass, rel, hs, out_env)
    if scalar:
        res = FourierResult(val[0], out_mass[0], rel[0], hs[0], out_env[0])
    return res


# ---------------------------------------------------------------- linear algebra

@dataclass
class MinNormResult:
    coeffs: np.ndarray
    log_cost: float
    rank: int


def solve_min_norm(G, c, *, precision: str = "double", dps: int | None = None,
                   rank_tol: float | None = None) -> MinNormResult:
    """Solve G beta = c for SPD (or Hermitian PD) G, returning log sqrt(c^H G^{-1} c).

    The system is symmetrically scaled by D = sqrt(diag G) before a pivoted
    Cholesky factorisation (LAPACK ?pstrf in double, mpmath otherwise). The cost
    is the norm of the forward-substituted vector, so no cancellation enters
    its logarithm.
    """
    if precision == "double":
        G = np.asarray(G)
        c = np.asarray(c)
        n = G.shape[0]
        cplx = np.iscomplexobj(G) or np.iscomplexobj(c)
        d = np.sqrt(np.real(np.diag(G)))
        if np.any(d <= 0):
            raise RankDeficiencyError(0, n)
        Gs = G / np.outer(d, d)
        cs = c / d
        if cplx:
            fac, piv, rank, info = lapack.zpstrf(Gs.astype(complex), tol=rank_tol or -1, lower=1)
        else:
            fac, piv, rank, info = lapack.dpstrf(Gs.astype(float), tol=rank_tol or -1, lower=1)
        if info < 0:
            raise ValueError(f"pstrf argument error {info}")
        if rank < n:
            raise RankDeficiencyError(int(rank), n)
        L = np.tril(fac)
        p = piv - 1
        y = solve_triangular(L, cs[p], lower=True)
        xs = solve_triangular(L.conj().T, y, lower=False)
        beta_s = np.empty_like(xs)
        beta_s[p] = xs
        nrm = np.linalg.norm(y)
        with np.errstate(divide="ignore"):
            return MinNormResult(beta_s / d, float(np.log(nrm)), int(rank))
    if precision != "mp":
        raise ValueError("precision must be 'double' or 'mp'")
    n = len(c)
    with mp.workdps(dps or int(1.4 * n + 40)):
        Gm = G if isinstance(G, mp.matrix) else mp.matrix([[G[i][j] for j in range(n)]
                                                             for i in range(n)])
        cm = [mp.mpmathify(ci) for ci in c]
        d = [mp.sqrt(mp.re(Gm[i, i])) for i in range(n)]
        Gs = mp.matrix(n, n)
        for i in range(n):
            for j in range(n):
                Gs[i, j] = Gm[i, j] / (d[i] * d[j])
        try:
            L = mp.cholesky(Gs)
        except ValueError as exc:
            raise RankDeficiencyError(-1, n) from exc
        cs = mp.matrix([cm[i] / d[i] for i in range(n)])
        y = _forward(L, cs)
        x = _backward(L, y)
        nrm2 = mp.fsum(abs(yi) ** 2 for yi in y)
        beta = np.array([x[i] / d[i] for i in range(n)], dtype=object)
        lc = float(mp.log(nrm2) / 2) if nrm2 > 0 else -np.inf
        return MinNormResult(beta, lc, n)


def _forward(L, b):
    n = L.rows
    y = [mp.mpf(0)] * n
    for i in range(n):
        y[i] = (b[i] - mp.fsum(L[i, k] * y[k] for k in range(i))) / L[i, i]
    return y


def _backward(L, y):
    n = L.rows
    x = [mp.mpf(0)] * n
    for i in reversed(range(n)):
        x[i] = (y[i] - mp.fsum(mp.conj(L[k, i]) * x[k] for k in range(i + 1, n))) / mp.conj(L[i, i])
    return x


# ---------------------------------------------------------------- scaling fits

@dataclass
class CostFit:
    tau_hat: float
    rho_hat: float
    intercept: float
    residual: float
    log_T_coef: float | None = None
    tau_grid: np.ndarray = field(default=None, repr=False)
    residuals: np.ndarray = field(default=None, repr=False)
    data: tuple = field(default=None, repr=False)

    def residual_at(self, tau: float) -> float:
        """Least-squares residual of the fit with the exponent pinned at ``tau``."""
        T, y, log_term = self.data
        return _ls_fit(T, y, tau, log_term)[1]

    def as_dict(self):
        return {"tau_hat": self.tau_hat, "rho_hat": self.rho_hat, "intercept": self.intercept,
                "residual": self.residual, "log_T_coef": self.log_T_coef}


def _ls_fit(T, y, tau, log_term):
    cols = [T ** (-tau), np.ones_like(T)]
    if log_term:
        cols.append(np.log(T))
    A = np.column_stack(cols)
    if np.linalg.cond(A) > 1e12:
        raise np.linalg.LinAlgError(f"ill-conditioned design matrix at tau={tau}")
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    r = A @ coef - y
    return coef, float(r @ r)


def fit_scaling(T_list: Sequence[float], log_cost_list: Sequence[float],
                tau_grid: Sequence[float] | None = None, *, log_term: bool = False) -> CostFit:
    """Fit log cost ~ rho / T^tau + c (+ k log T) with tau scanned over a grid."""
    T = np.asarray(T_list, float)
    y = np.asarray(log_cost_list, float)
    if T.size < 4:
        raise ValueError("need at least four horizons")
    if np.unique(T).size != T.size or np.any(T <= 0):
        raise ValueError("horizons must be positive and distinct")
    grid = np.asarray(tau_grid if tau_grid is not None else np.linspace(0.5, 4.0, 701), float)
    res = np.empty(grid.size)
    for i, tau in enumerate(grid):
        res[i] = _ls_fit(T, y, tau, log_term)[1]
    i = int(np.argmin(res))
    coef, r = _ls_fit(T, y, grid[i], log_term)
    return CostFit(tau_hat=float(grid[i]), rho_hat=float(coef[0]), intercept=float(coef[1]),
                   residual=r, log_T_coef=float(coef[2]) if log_term else None,
                   tau_grid=grid, residuals=res, data=(T, y, log_term))
