"""Covariance structure of the Gaussian comparison process.

For Gaussian coefficients the vector ``(P(t), P'(t), P(s), P'(s))`` is
centered normal with covariance depending on ``u = t - s`` only.  With
``x_k = k/n``:

* ``Cov(P(t), P(s))   = mean_k cos(x_k u)``
* ``Cov(P(t), P'(s))  = mean_k x_k sin(x_k u)`` and ``Cov(P'(t), P(s))`` its negative
* ``Cov(P'(t), P'(s)) = mean_k x_k^2 cos(x_k u)``

As ``n -> inf`` the averages become integrals over ``[0, 1]`` and the
process tends to the stationary process with correlation ``sin(u)/u``.
This module also computes the Gaussian reference quantities: the exact
expected number of roots and the limiting variance constant of the root
count from the two-point Kac-Rice intensity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "Covariance4",
    "DetFloor",
    "QuadratureParams",
    "VarianceConstant",
    "det_floor",
    "gaussian_mean_density",
    "gaussian_variance_constant",
    "sigma_limit",
    "sigma_n",
    "two_point_intensity",
]

SECOND_MOMENT = 1.0 / 3.0
SERIES_RADIUS = 0.5
_SERIES_TERMS = 12


@dataclass(frozen=True)
class Covariance4:
    """The 4x4 covariance of ``(P(t), P'(t), P(s), P'(s))``.

    ``kind`` is ``"finite"`` (with degree ``n``) or ``"limit"`` (``n`` is
    ``None``).
    """

    entries: np.ndarray
    kind: Literal["finite", "limit"]
    n: int | None
    t: float
    s: float

    def __getitem__(self, ij) -> float:
        """1-based entry access, ``cov[1, 3]``."""
        i, j = ij
        if not (1 <= i <= 4 and 1 <= j <= 4):
            raise IndexError(f"indices must lie in 1..4, got {ij}")
        return float(self.entries[i - 1, j - 1])

    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues()[0])

    def is_psd(self, tol: float = 1e-10) -> bool:
        return bool(np.allclose(self.entries, self.entries.T)) and self.min_eigenvalue() >= -tol


def _assemble(c13: float, c14: float, c24: float, d22: float) -> np.ndarray:
    return np.array(
        [
            [1.0, 0.0, c13, c14],
            [0.0, d22, -c14, c24],
            [c13, -c14, 1.0, 0.0],
            [c14, c24, 0.0, d22],
        ]
    )


def sigma_n(n: int, t: float, s: float) -> Covariance4:
    """Finite-degree covariance from the exact averages over ``k = 1..n``."""
    if n < 1:
        raise ValueError("n must be positive")
    x = np.arange(1, n + 1) / n
    u = t - s
    cos_, sin_ = np.cos(x * u), np.sin(x * u)
    c13 = math.fsum(cos_) / n
    c14 = math.fsum(x * sin_) / n
    c24 = math.fsum(x * x * cos_) / n
    d22 = math.fsum(x * x) / n
    return Covariance4(_assemble(c13, c14, c24, d22), "finite", n, float(t), float(s))


def _moment_integrals(u: float) -> tuple[float, float, float]:
    """``(int x^0 cos, int x sin, int x^2 cos)`` of ``(u x)`` over ``[0, 1]``."""
    if abs(u) < SERIES_RADIUS:
        u2 = u * u
        c0 = s1 = c2 = 0.0
        term = 1.0  # (-1)^k u^{2k} / (2k)!
        for k in range(_SERIES_TERMS):
            c0 += term / (2 * k + 1)
            c2 += term / (2 * k + 3)
            s1 += term * u / ((2 * k + 1) * (2 * k + 3))
            term *= -u2 / ((2 * k + 1) * (2 * k + 2))
        return c0, s1, c2
    sn, cs = math.sin(u), math.cos(u)
    c0 = sn / u
    s1 = (sn - u * cs) / (u * u)
    c2 = sn / u + 2 * cs / u**2 - 2 * sn / u**3
    return c0, s1, c2


def sigma_limit(u: float) -> Covariance4:
    """Large-degree limit of :func:`sigma_n` at lag ``u = t - s``.

    Closed antiderivatives are used for ``|u| >= 0.5``; below that a
    12-term Taylor series avoids the cancellation in the ``1/u^3`` terms.
    """
    c0, s1, c2 = _moment_integrals(float(u))
    return Covariance4(_assemble(c0, s1, c2, SECOND_MOMENT), "limit", None, float(u), 0.0)


@dataclass(frozen=True)
class DetFloor:
    """Smallest determinant found on ``[epsilon, u_max]`` and where."""

    value: float
    argmin: float
    resolution: float

    def __float__(self) -> float:
        return self.value


def det_floor(epsilon: float, u_max: float = 100.0, grid: int = 20000) -> DetFloor:
    """Numerical infimum of ``det sigma_limit(u)`` over ``u in [epsilon, u_max]``.

    The grid minimum is refined by bounded minimisation around every grid
    local minimum.  The result is an attained value and hence an upper
    bound on the true infimum.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if u_max <= epsilon:
        raise ValueError("u_max must exceed epsilon")
    us = np.linspace(epsilon, u_max, grid)
    dets = np.array([sigma_limit(u).det() for u in us])
    best = int(np.argmin(dets))
    value, where = float(dets[best]), float(us[best])
    step = float(us[1] - us[0])
    padded = np.concatenate([[np.inf], dets, [np.inf]])
    local = np.nonzero((padded[1:-1] <= padded[:-2]) & (padded[1:-1] <= padded[2:]))[0]
    for j in local:
        lo, hi = float(us[max(j - 1, 0)]), float(us[min(j + 1, grid - 1)])
        if hi <= lo:
            continue
        res = minimize_scalar(lambda u: sigma_limit(u).det(), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun < value:
            value, where = float(res.fun), float(res.x)
    return DetFloor(value, where, step)


def gaussian_mean_density(n: int) -> float:
    """Expected number of zeros of ``p`` on ``[0, pi)`` for Gaussian coefficients.

    The process is stationary with variance ``n`` and derivative variance
    ``sum k^2``, so the one-point Kac-Rice formula gives
    ``sqrt(sum k^2 / n) = sqrt((n+1)(2n+1)/6)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return math.sqrt((n + 1) * (2 * n + 1) / 6.0)


# ---------------------------------------------------------------------------
# two-point intensity of the limit process


def _correlation_derivatives(u: np.ndarray):
    sn, cs = np.sin(u), np.cos(u)
    r = sn / u
    r1 = (u * cs - sn) / u**2
    r2 = (-u * u * sn - 2 * u * cs + 2 * sn) / u**3
    return r, r1, r2


def _conditional_moments(u):
    """Determinant factor and conditional covariance of the slopes at two zeros."""
    r, r1, r2 = _correlation_derivatives(u)
    det = 1 - r * r
    var = SECOND_MOMENT - r1 * r1 / det
    cov = -r2 - r * r1 * r1 / det
    return det, var, cov


def _intensity_closed(u: np.ndarray) -> np.ndarray:
    det, var, cov = _conditional_moments(u)
    rho = np.clip(cov / var, -1.0, 1.0)
    abs_prod = (2 / np.pi) * var * (np.sqrt(1 - rho * rho) + rho * np.arcsin(rho))
    return abs_prod / (2 * np.pi * np.sqrt(det))


def _intensity_mp(u: float, dps: int = 50) -> float:
    with mpmath.workdps(dps):
        u = mpmath.mpf(u)
        sn, cs = mpmath.sin(u), mpmath.cos(u)
        r = sn / u
        r1 = (u * cs - sn) / u**2
        r2 = (-u * u * sn - 2 * u * cs + 2 * sn) / u**3
        det = 1 - r * r
        var = mpmath.mpf(1) / 3 - r1 * r1 / det
        cov = -r2 - r * r1 * r1 / det
        rho = max(min(cov / var, 1), -1)
        abs_prod = 2 / mpmath.pi * var * (mpmath.sqrt(1 - rho * rho) + rho * mpmath.asin(rho))
        return float(abs_prod / (2 * mpmath.pi * mpmath.sqrt(det)))


def _intensity_hermite(u: np.ndarray, order: int) -> np.ndarray:
    """Same quantity with ``E|X Y|`` from a tensor Gauss-Hermite rule."""
    det, var, cov = _conditional_moments(u)
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / w.sum()
    rho = np.clip(cov / var, -1.0, 1.0)
    z1 = x[:, None]
    z2 = rho[..., None, None] * z1 + np.sqrt(1 - rho * rho)[..., None, None] * x[None, :]
    e = (np.abs(z1 * z2) * np.outer(w, w)).sum(axis=(-1, -2))
    return var * e / (2 * np.pi * np.sqrt(det))


def two_point_intensity(u, method: str = "closed-form", order: int = 40) -> np.ndarray:
    """Second factorial moment density of the zeros of the ``sin(u)/u`` process.

    ``method`` selects the slope expectation: the arcsine closed form or a
    Gauss-Hermite tensor rule of the given ``order``.  Lags below 1 are
    evaluated in extended precision by the closed form.
    """
    u = np.abs(np.atleast_1d(np.asarray(u, dtype=float)))
    out = np.empty_like(u)
    small = u < 1.0
    if method == "closed-form":
        out[~small] = _intensity_closed(u[~small])
    elif method == "gauss-hermite":
        out[~small] = _intensity_hermite(u[~small], order)
    else:
        raise ValueError(f"unknown method {method!r}")
    out[small] = [_intensity_mp(x) if x > 0 else 0.0 for x in u[small]]
    return out


@dataclass(frozen=True)
class QuadratureParams:
    """Resolution of the variance-constant quadrature.

    The lag integral runs over ``[0, u_max]`` in Gauss-Legendre panels of
    width ``panel_width`` with ``order`` nodes each, plus a tail estimate.
    """

    u_max: float = 400.0
    panel_width: float = 0.25
    order: int = 20
    method: str = "closed-form"
    hermite_order: int = 40
    max_panels: int = 2_000_000

    def doubled(self) -> "QuadratureParams":
        """Twice the resolution: half-width panels over twice the range."""
        return QuadratureParams(2 * self.u_max, self.panel_width / 2, self.order, self.method,
                                self.hermite_order, self.max_panels)


@dataclass(frozen=True)
class VarianceConstant:
    """Limit of ``Var(N)/n`` for zeros on ``[0, pi)`` and its ``[0, 2 pi)`` counterpart."""

    value: float
    full_period_value: float
    mean_term: float
    pair_integral: float
    tail: float
    params: QuadratureParams


def gaussian_variance_constant(quad: QuadratureParams | None = None) -> VarianceConstant:
    """Limiting variance per degree of the zero count, Gaussian coefficients.

    For a stationary process with zero intensity ``rho1`` and two-point
    intensity ``rho2(u)``, the variance of the count on a window of length
    ``L`` grows like ``L (rho1 + 2 int_0^inf (rho2 - rho1^2) du)``.  Zeros of
    ``p`` on ``[0, pi)`` correspond to a window of length ``n pi`` of the
    rescaled process, giving the constant ``pi (rho1 + 2 int ...)``.

    The integrand decays like ``u^-2``; beyond ``u_max`` the tail is
    estimated as ``A / u_max`` with ``A`` the average of ``u^2 (rho2 -
    rho1^2)`` over the last ten periods.

    Raises
    ------
    RuntimeError
        If the requested resolution exceeds ``max_panels``.
    """
    quad = quad or QuadratureParams()
    panels = int(math.ceil(quad.u_max / quad.panel_width))
    if panels > quad.max_panels:
        raise RuntimeError(f"quadrature needs {panels} panels, above the cap {quad.max_panels}")
    rho1 = math.sqrt(SECOND_MOMENT) / math.pi
    x, w = np.polynomial.legendre.leggauss(quad.order)
    edges = np.linspace(0.0, quad.u_max, panels + 1)
    left, right = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (left + right) + 0.5 * (right - left) * x
    weights = 0.5 * (right - left) * w
    g = two_point_intensity(nodes.ravel(), quad.method, quad.hermite_order).reshape(nodes.shape) - rho1**2
    pair = float(np.sum(weights * g))

    span = min(20 * math.pi, 0.5 * quad.u_max)
    tail_mask = nodes >= quad.u_max - span
    moment = float(np.sum((weights * nodes**2 * g)[tail_mask]) / np.sum(weights[tail_mask]))
    tail = moment / quad.u_max
    pair += tail
    value = math.pi * (rho1 + 2 * pair)
    return VarianceConstant(value, 2 * value, math.pi * rho1, pair, tail, quad)
