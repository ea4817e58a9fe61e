"""Independent reference values frozen into the test-suite.

Everything here uses mpmath directly (no package code), so a regression in the
package cannot leak into its own reference. Run with ``python3 make_oracles.py``;
it prints the values pasted into the tests.
"""
import mpmath as mp

mp.mp.dps = 60
S, T, G0 = mp.mpf("0.75"), mp.mpf("0.3"), mp.mpf("0.6")
ALPHA = 2 * S
MU = 1 / (ALPHA - 1)
B = T / 2
NU = G0 / B


def log_sigma(t):
    return -NU ** MU * ((1 - t) ** -MU + (1 + t) ** -MU)


def raw_H(z):
    """int_{-1}^{1} sigma(t) e^{-i b z t} dt, symmetric, on many subintervals."""
    f = lambda t: mp.exp(log_sigma(t)) * mp.cos(B * z * t) if mp.im(z) == 0 else \
        mp.exp(log_sigma(t)) * mp.cosh(B * mp.im(z) * t)
    pts = mp.linspace(0, 1, 401)
    return 2 * mp.fsum(mp.quad(f, [pts[i], pts[i + 1]]) for i in range(400))


def heat_gramian_cost(N, T):
    lam = [(mp.pi * k) ** ALPHA for k in range(1, N + 1)]
    G = mp.matrix(N, N)
    for i in range(N):
        for j in range(N):
            G[i, j] = (1 - mp.exp(-(lam[i] + lam[j]) * T)) / (lam[i] + lam[j])
    d = mp.matrix([mp.exp(-lam[0] * T) / (-mp.sqrt(2) * mp.pi)] + [0] * (N - 1))
    x = mp.lu_solve(G, d)
    return mp.log(mp.sqrt((d.T * x)[0]))


def log_F(w, exclude=None):
    """log prod_k (1 - w/lambda_k) by Euler-Maclaurin summation of the logs."""
    term = lambda k: mp.log(abs(1 - w / (mp.pi * k) ** ALPHA))
    total = mp.nsum(term, [1, mp.inf], method="euler-maclaurin")
    if exclude is not None:
        total -= term(exclude)
    return total


if __name__ == "__main__":
    h0 = raw_H(mp.mpf(0))
    for x in ("0.5", "10", "100", "1000"):
        print("log|H(x)|", x, mp.nstr(mp.log(abs(raw_H(mp.mpf(x)) / h0)), 15))
    for x in ("20", "200"):
        print("log H(ix)", x, mp.nstr(mp.log(raw_H(mp.mpc(0, x)) / h0), 15))
    print("log raw H(0)", mp.nstr(mp.log(h0), 15))
    for N in (1, 3, 6):
        print("heat gramian log cost", N, mp.nstr(heat_gramian_cost(N, T), 15))
    for w, ex in (("-50", None), ("30", 1), ("-1000", 2), ("200", 3)):
        print("log|F|", w, ex, mp.nstr(log_F(mp.mpf(w), ex), 15))
