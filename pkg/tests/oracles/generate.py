"""Independent oracles for the frozen values in ``tests/data/oracles.json``.

Nothing here imports the package.  Each value is produced by a method that
differs from the implementation under test: symbolic integration and
summation (sympy), dense direct evaluation instead of FFT grids, generic
Schur complements and angular integrals instead of closed forms, and plain
enumeration with counters.  Run ``python3 tests/oracles/generate.py`` to
regenerate; it takes a few minutes.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import sympy as sp
from scipy import integrate

OUT = Path(__file__).resolve().parent.parent / "data" / "oracles.json"


def moments():
    x = sp.symbols("x", real=True)
    a = sp.sqrt(3)
    uniform4 = sp.integrate(x**4 / (2 * a), (x, -a, a))
    uniform2 = sp.integrate(x**2 / (2 * a), (x, -a, a))
    p, v1, v2 = sp.Rational(1, 2), sp.Rational(1, 2), sp.Rational(3, 2)
    z = sp.symbols("z", real=True)
    gauss = lambda k, v: sp.integrate(z**k * sp.exp(-z**2 / (2 * v)) / sp.sqrt(2 * sp.pi * v), (z, -sp.oo, sp.oo))
    mixture4 = p * gauss(4, v1) + (1 - p) * gauss(4, v2)
    # Monte Carlo cross-check with an unrelated generator
    rng = np.random.default_rng(20240611)
    scale = np.where(rng.random(10**6) < 0.5, math.sqrt(0.5), math.sqrt(1.5))
    mc = float(np.mean((rng.standard_normal(10**6) * scale) ** 4))
    return {
        "uniform_second": str(sp.nsimplify(uniform2)),
        "uniform_fourth": str(sp.nsimplify(uniform4)),
        "mixture_fourth": str(sp.nsimplify(mixture4)),
        "mixture_fourth_mc": mc,
        "y_star_uniform": str(2 * (sp.nsimplify(uniform4) - 3)),
        "y_star_mixture": str(2 * (sp.nsimplify(mixture4) - 3)),
        "uniform_support": float(a),
    }


def dense_count(a, b, factor=400):
    n = len(a)
    t = np.linspace(0.0, math.pi, factor * n + 1)[:-1]
    k = np.arange(1, n + 1)
    v = np.cos(np.outer(t, k)) @ a + np.sin(np.outer(t, k)) @ b
    v_end = float(np.sum(a * np.cos(k * math.pi)))
    v = np.append(v, v_end)
    neg = v < 0
    return int(np.count_nonzero(neg[1:] != neg[:-1]))


def root_counts():
    rng = np.random.default_rng(777)
    cases = []
    for n in (5, 16, 64):
        for _ in range(10):
            a, b = rng.standard_normal(n), rng.standard_normal(n)
            cases.append({"a": a.tolist(), "b": b.tolist(), "count": dense_count(a, b)})
    return cases


def mean_density():
    k, n = sp.symbols("k n", positive=True, integer=True)
    s = sp.summation(k**2, (k, 1, n))
    return {str(m): float(sp.sqrt(s.subs(n, m) / m)) for m in (1, 10, 64, 256)}


def _cov_limit(u):
    """4x4 covariance of (X(0), X'(0), X(u), X'(u)) from integrals over [0, 1] (mpmath)."""
    u = mpmath.mpf(u)
    c0 = mpmath.quad(lambda x: mpmath.cos(u * x), [0, 1])
    s1 = mpmath.quad(lambda x: x * mpmath.sin(u * x), [0, 1])
    c2 = mpmath.quad(lambda x: x * x * mpmath.cos(u * x), [0, 1])
    third = mpmath.mpf(1) / 3
    # Cov(X(t), X'(s)) = int x sin(x (t - s)); here t = 0, s = u gives -s1
    return mpmath.matrix([
        [1, 0, c0, -s1],
        [0, third, s1, c2],
        [c0, s1, 1, 0],
        [-s1, c2, 0, third],
    ])


def sigma_limit_entries():
    out = {}
    for u in (0.01, 0.3, 0.49, 0.51, 1.0, 3.0, 10.0, 100.0):
        with mpmath.workdps(30):
            m = _cov_limit(-u)
            out[repr(u)] = [[float(m[i, j]) for j in range(4)] for i in range(4)]
            out[repr(u) + ":det"] = float(mpmath.det(m))
    return out


def sigma_n_entries():
    out = {}
    for n, t, s in ((2, 0.0, 0.0), (8, 1.3, 0.2), (64, 5.0, 2.0), (64, 0.3, 7.7)):
        k = np.arange(1, n + 1)
        rows = []
        for x in (t, s):
            ang = k * x / n
            rows.append(np.concatenate([np.cos(ang), np.sin(ang)]))
            rows.append(np.concatenate([-(k / n) * np.sin(ang), (k / n) * np.cos(ang)]))
        A = np.array(rows) / math.sqrt(n)
        out[f"{n},{t},{s}"] = (A @ A.T).tolist()
    exact = Fraction(sum(k * k for k in range(1, 3)), 2 * 2 * 2)  # (1/n) sum (k/n)^2 at n = 2
    out["n2_d22_exact"] = str(exact)
    return out


def _abs_product(rho):
    f = lambda th: abs(math.cos(th) * (rho * math.cos(th) + math.sqrt(max(1 - rho * rho, 0.0)) * math.sin(th)))
    # kinks at the zeros of each factor
    pts = sorted({math.pi / 2, 3 * math.pi / 2} | {
        (math.atan2(-rho, math.sqrt(max(1 - rho * rho, 0.0))) + j * math.pi) % (2 * math.pi) for j in (0, 1)})
    val, _ = integrate.quad(f, 0, 2 * math.pi, points=pts, limit=200, epsabs=1e-13, epsrel=1e-12)
    return val / math.pi


def _rho2(u):
    with mpmath.workdps(40):
        m = _cov_limit(u)
        # condition (X'(0), X'(u)) on X(0) = X(u) = 0
        a = mpmath.matrix([[m[0, 0], m[0, 2]], [m[2, 0], m[2, 2]]])
        b = mpmath.matrix([[m[1, 0], m[1, 2]], [m[3, 0], m[3, 2]]])
        c = mpmath.matrix([[m[1, 1], m[1, 3]], [m[3, 1], m[3, 3]]])
        cond = c - b * mpmath.inverse(a) * b.T
        density = 1 / (2 * mpmath.pi * mpmath.sqrt(mpmath.det(a)))
        s1, s2 = mpmath.sqrt(cond[0, 0]), mpmath.sqrt(cond[1, 1])
        rho = float(cond[0, 1] / (s1 * s2))
        return float(density * s1 * s2) * _abs_product(max(min(rho, 1.0), -1.0))


def variance_constant(u_max=300.0):
    rho1 = math.sqrt(1 / 3) / math.pi
    g = lambda u: _rho2(u) - rho1**2
    total = 0.0
    for lo in np.arange(0.0, u_max, 1.0):
        left = max(lo, 1e-6)
        val, _ = integrate.quad(g, left, lo + 1.0, epsabs=1e-12, epsrel=1e-10, limit=100)
        total += val
    # tail: u^2 g(u) averaged over the last ten periods
    us = np.linspace(u_max - 20 * math.pi, u_max, 4001)
    A = float(np.mean([u * u * g(u) for u in us]))
    tail = A / u_max
    value = math.pi * (rho1 + 2 * (total + tail))
    return {"value": value, "tail": tail, "u_max": u_max, "g_at_0.5": g(0.5), "g_at_3": g(3.0), "g_at_20": g(20.0)}


def edgeworth_oracles():
    x1, x2 = sp.symbols("x1 x2")
    h = {0: 1, 1: lambda x: x, 2: lambda x: x**2 - 1, 3: lambda x: x**3 - 3 * x, 4: lambda x: x**4 - 6 * x**2 + 3}
    herm = lambda k, x: 1 if k == 0 else h[k](x)
    m4 = {"uniform": sp.Rational(9, 5), "gaussian": 3}
    out = {}
    for law, fourth in m4.items():
        total = 0
        for beta in itertools.product((1, 2), repeat=4):
            c1 = beta.count(1)
            ey = {0: 1, 2: 1, 4: fourth}
            eg = {0: 1, 2: 1, 4: 3}
            if c1 % 2:
                continue
            c = ey[c1] * ey[4 - c1] - eg[c1] * eg[4 - c1]
            total += c * herm(c1, x1) * herm(4 - c1, x2)
        gamma2 = sp.expand(total / 24)
        out[law] = {"gamma2_expr": str(gamma2), "gamma2_at_1_1": str(gamma2.subs({x1: 1, x2: 1})),
                    "gamma2_at_0.5_-2": str(gamma2.subs({x1: sp.Rational(1, 2), x2: -2}))}
    out["h2_at_1.5"] = str(sp.Rational(3, 2) ** 2 - 1)
    return out


def cancellation():
    survivors = Counter()
    ordered = 0
    for pair in itertools.product(range(1, 5), repeat=6):
        counts = Counter(pair)
        groups = {1 if c <= 2 else 2 for c in pair}
        if len(groups) == 2 and all(v % 2 == 0 for v in counts.values()):
            ordered += 1
            beta, rho = tuple(sorted(pair[:3])), tuple(sorted(pair[3:]))
            survivors[min((beta, rho), (rho, beta))] += 1
    quartic = sum(
        1 for a in itertools.product(range(1, 5), repeat=4)
        if {1 if c <= 2 else 2 for c in a} == {1, 2} and all(v % 2 == 0 for v in Counter(a).values())
    )
    return {"total": 4**6, "ordered_survivors": ordered, "patterns": len(survivors), "quartic_survivors": quartic}


def constants():
    inner = sum(Fraction((-3) ** (i + j), 4 * (1 + 2 * (i + j - 2))) for i in (1, 2) for j in (1, 2))
    return {"inner_sum": str(inner), "gamma_prime": str(inner / 216), "theorem": str(2 * inner / 216),
            "iid": str(4 * inner / 216)}


def ergodic():
    # limits of (1/n) sum (k/n)^q f(k alpha) and of the quartic averages, by symbolic integration
    x = sp.symbols("x")
    q_limits = {q: str(sp.integrate(x**q, (x, 0, 1))) for q in range(5)}
    quartic = {}
    for i in (1, 2):
        for j in (1, 2):
            # squared entries average to 1/2 each, weights (k/n)^(2(i-1)+2(j-1))
            quartic[f"{i}{j}"] = str(sp.Rational(1, 4) * sp.integrate(x ** (2 * (i - 1) + 2 * (j - 1)), (x, 0, 1)))
    return {"q_limits": q_limits, "quartic": quartic}


def main():
    data = {
        "moments": moments(),
        "root_counts": root_counts(),
        "mean_density": mean_density(),
        "sigma_limit": sigma_limit_entries(),
        "sigma_n": sigma_n_entries(),
        "edgeworth": edgeworth_oracles(),
        "cancellation": cancellation(),
        "constants": constants(),
        "ergodic": ergodic(),
    }
    data["variance_constant"] = variance_constant()
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(json.dumps({k: v for k, v in data.items() if k != "root_counts"}, indent=1)[:4000])


if __name__ == "__main__":
    main()
