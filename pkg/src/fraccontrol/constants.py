"""Closed-form constants of the cost estimates, each paired with an independent
quadrature (or a second printed form) so the closed form can be audited.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .numerics import integrate, integrate_pv

QUAD_TOL = 1e-12


@dataclass(frozen=True)
class ConstantReport:
    name: str
    closed_form: float
    quadrature: float
    abs_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.abs_err <= self.tol)

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _report(name, closed, other, tol):
    return ConstantReport(name, float(closed), float(other), float(abs(closed - other)), float(tol))


def _check_alpha(alpha):
    if not alpha > 1.0:
        raise ValueError(f"alpha must exceed 1 (integral diverges), got {alpha}")


def _log1p_inv_power_integral(p: float) -> float:
    """int_0^inf ln(1 + x^{-p}) dx for p > 1, split at x = 1.

    On (0, 1) x = y^2 tames the logarithmic endpoint; on (1, inf) v = 1/x then
    v = y^{1/(p-1)} turns the v^{p-2} endpoint into a bounded integrand.
    """
    inner = integrate(lambda y: 2.0 * y * np.log1p(y ** (-2.0 * p)), 0.0, 1.0, QUAD_TOL)
    m = 1.0 / (p - 1.0)

    def outer(y):
        w = y ** (m * p)
        # ln(1 + v^p)/v^2 dv becomes m ln(1 + w)/w dy with w = v^p
        safe = np.where(w > 1e-8, w, 1.0)
        return m * np.where(w > 1e-8, np.log1p(safe) / safe, 1.0 - w / 2)

    return inner + integrate(outer, 0.0, 1.0, QUAD_TOL)


def theta(alpha: float, tol: float = 1e-8) -> ConstantReport:
    """theta_alpha = (1/2) int_0^inf ln(1 + x^{-2 alpha}) dx = pi / (2 sin(pi/(2 alpha)))."""
    _check_alpha(alpha)
    closed = np.pi / (2.0 * np.sin(np.pi / (2.0 * alpha)))
    return _report("theta", closed, 0.5 * _log1p_inv_power_integral(2.0 * alpha), tol)


def kappa(alpha: float, tol: float = 1e-8) -> ConstantReport:
    """kappa_alpha = -int_0^inf ln(x^alpha / (x^alpha + 1)) dx = pi / sin(pi/alpha)."""
    _check_alpha(alpha)
    closed = np.pi / np.sin(np.pi / alpha)
    return _report("kappa", closed, _log1p_inv_power_integral(alpha), tol)


def theta_closed(alpha: float) -> float:
    _check_alpha(alpha)
    return float(np.pi / (2.0 * np.sin(np.pi / (2.0 * alpha))))


def kappa_closed(alpha: float) -> float:
    _check_alpha(alpha)
    return float(np.pi / np.sin(np.pi / alpha))


def _check_s(s):
    if not (0.5 < s < 1.0):
        raise ValueError(f"s must lie strictly inside (1/2, 1), got {s}")


def _two_forms(s, trig, const):
    beta = 2.0 * s - 1.0
    form_a = 0.5 * beta * (1.0 / trig) ** (2.0 * s / beta)
    form_b = ((const / np.pi) ** (1.0 + 1.0 / beta) * (2.0 / (beta + 1.0)) ** (1.0 / beta)
              * beta / (1.0 + beta))
    return form_a, form_b


def nu_s(s: float, rtol: float = 1e-10) -> ConstantReport:
    """Schrodinger lower-bound constant, both printed expressions.

    ``closed_form`` holds the trigonometric form and ``quadrature`` the form
    written through theta_{2s}; ``tol`` is relative to the value.
    """
    _check_s(s)
    a, b = _two_forms(s, 2.0 * s * np.sin(np.pi / (4.0 * s)), theta_closed(2.0 * s))
    return _report("nu_s", a, b, rtol * abs(a))


def mu_s(s: float, rtol: float = 1e-10) -> ConstantReport:
    """Heat lower-bound constant, trigonometric form against the kappa_{2s} form."""
    _check_s(s)
    a, b = _two_forms(s, s * np.sin(np.pi / (2.0 * s)), kappa_closed(2.0 * s))
    return _report("mu_s", a, b, rtol * abs(a))


def rho(alpha: float, a: float, kind: str) -> float:
    """rho = 2^{1/beta} beta (c / (a^{1/alpha} (1 + beta)))^{1+beta}, beta = alpha - 1,

    with c = theta_alpha for the Schrodinger equation and kappa_alpha for heat.
    """
    _check_alpha(alpha)
    if a <= 0:
        raise ValueError("a must be positive")
    if kind == "schrodinger":
        c = theta_closed(alpha)
    elif kind == "heat":
        c = kappa_closed(alpha)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    beta = alpha - 1.0
    return float(2.0 ** (1.0 / beta) * beta * (c / (a ** (1.0 / alpha) * (1.0 + beta))) ** (1.0 + beta))


def P_alpha(alpha: float, tol: float = 1e-8) -> ConstantReport:
    """P_alpha = int_0^inf v^{1/alpha - 1}/(1 + v) dv against pi / sin(pi/alpha).

    Folding (1, inf) onto (0, 1) gives x^{1/alpha-1} + x^{-1/alpha} over 1 + x;
    each power is removed by its own substitution.
    """
    _check_alpha(alpha)
    q = alpha / (alpha - 1.0)
    quad = (integrate(lambda y: alpha / (1.0 + y ** alpha), 0.0, 1.0, QUAD_TOL)
            + integrate(lambda y: q / (1.0 + y ** q), 0.0, 1.0, QUAD_TOL))
    return _report("P_alpha", np.pi / np.sin(np.pi / alpha), quad, tol)


def Q_alpha(alpha: float, tol: float = 1e-8) -> ConstantReport:
    """Principal value of int_0^inf v^{1/alpha - 1}/(1 - v) dv against pi / tan(pi/alpha).

    The pole at v = 1 is handled by symmetric excision on (1/2, 3/2); the two
    outer pieces get power substitutions that make them smooth.
    """
    _check_alpha(alpha)
    p = 1.0 / alpha
    head = integrate(lambda y: alpha / (1.0 - y ** alpha), 0.0, 0.5 ** p, QUAD_TOL)
    mid = integrate_pv(lambda v: v ** (p - 1.0) / (1.0 - v), 1.0, 0.5, 1.5, QUAD_TOL)
    q = 1.0 / (1.0 - p)
    tail = -integrate(lambda y: q / (1.0 - y ** q), 0.0, (2.0 / 3.0) ** (1.0 / q), QUAD_TOL)
    return _report("Q_alpha", np.pi / np.tan(np.pi / alpha), head + mid + tail, tol)
