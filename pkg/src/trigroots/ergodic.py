"""Weighted ergodic averages along irrational rotations and trigonometric sums.

The limit computations for the variance constant rest on two facts that
can be checked numerically at finite ``n``:

* weighted averages ``(1/n) sum (k/n)^q f(k alpha)`` converge to
  ``mean(f) / (q + 1)`` when ``alpha / pi`` is irrational, which yields the
  limits of quartic and mixed averages of the mixing-matrix entries;
* the sums ``(1/n) sum (k/n)^i cos(b k)`` are ``O(1 / (n b_bar))`` with
  ``b_bar = inf_p |2 pi p - b| / max(p, 1)``.

Floating-point angles are rational, so convergence is only visible up to
``n`` well below the period of the rational approximation; the default test
angles (1, sqrt 2) are far from that regime for ``n <= 10**6``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "ErgodicQuery",
    "TrigSum",
    "c_matrix_entry",
    "mixed_average",
    "quartic_average",
    "quartic_limit",
    "trig_sum",
    "weighted_average",
]

# periodic test functions with their means over one period
TEST_FUNCTIONS: dict[str, tuple[Callable[[np.ndarray], np.ndarray], float]] = {
    "one": (np.ones_like, 1.0),
    "cos": (np.cos, 0.0),
    "sin": (np.sin, 0.0),
    "cos2": (lambda x: np.cos(x) ** 2, 0.5),
    "sin2": (lambda x: np.sin(x) ** 2, 0.5),
}


def _mean(values: np.ndarray) -> float:
    return math.fsum(values) / values.size


@dataclass(frozen=True)
class ErgodicQuery:
    """Rotation angle, weight exponent, length and test function of an average."""

    alpha: float
    q: int
    n: int
    f: str = "one"

    def __post_init__(self):
        if self.q not in (0, 1, 2, 3, 4):
            raise ValueError("weight exponent q must be in 0..4")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.f not in TEST_FUNCTIONS:
            raise ValueError(f"unknown test function {self.f!r}; choose from {sorted(TEST_FUNCTIONS)}")

    @property
    def limit(self) -> float:
        """``mean(f) / (q + 1)``."""
        return TEST_FUNCTIONS[self.f][1] / (self.q + 1)


def weighted_average(query: ErgodicQuery) -> float:
    """``(1/n) sum_{k=1}^n (k/n)^q f(k alpha)``, summed with compensation."""
    k = np.arange(1, query.n + 1, dtype=float)
    f = TEST_FUNCTIONS[query.f][0]
    return _mean((k / query.n) ** query.q * f(k * query.alpha))


def c_matrix_entry(i: int, l: int, k, n: int, t):
    """Entry ``(i, l)`` of ``[[cos(kt/n), sin(kt/n)], [-(k/n) sin(kt/n), (k/n) cos(kt/n)]]``.

    ``k`` and ``t`` may be arrays.
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 1) or np.any(k > n):
        raise ValueError("k must satisfy 1 <= k <= n")
    if i not in (1, 2) or l not in (1, 2):
        raise ValueError("matrix indices must be 1 or 2")
    return _fast_entries(i, l, k, n, np.asarray(t, dtype=float) / n)


def _fast_entries(i, l, k, n, x):
    """``C_n(k, n x)[i, l]`` for an array of ``k``; the angle is ``k x``."""
    angle = k * x
    if i == 1:
        return np.cos(angle) if l == 1 else np.sin(angle)
    scale = k / n
    return -scale * np.sin(angle) if l == 1 else scale * np.cos(angle)


def quartic_limit(i: int, j: int) -> float:
    """Limit ``1 / (4 (1 + 2 (i + j - 2)))`` of the quartic average."""
    return 1.0 / (4 * (1 + 2 * (i + j - 2)))


def quartic_average(i: int, j: int, l: int, l2: int, t: float, s: float, n: int) -> float:
    """``(1/n) sum_k C_n(k, nt)[i, l]^2 C_n(k, ns)[j, l2]^2``."""
    left = _fast_entries(i, l, np.arange(1, n + 1, dtype=float), n, t)
    right = _fast_entries(j, l2, np.arange(1, n + 1, dtype=float), n, s)
    return _mean(left**2 * right**2)


def mixed_average(kind: str, indices, t: float, s: float, n: int) -> float:
    """Averages of mixed products whose limit is zero.

    ``kind`` selects the product:

    * ``"cross-square"``, ``indices=(i, j, l)``:
      ``C[i,1](t) C[i,2](t) C[j,l](s)^2``
    * ``"cross-cross"``, ``indices=(i, j)``:
      ``C[i,1](t) C[i,2](t) C[j,1](s) C[j,2](s)``
    * ``"triple"``, ``indices=((i1, i2, i3), (l1, l2, l3))``:
      ``C[i1,l1](t) C[i2,l2](t) C[i3,l3](s)``

    where ``C[a,b](x)`` stands for ``C_n(k, n x)[a, b]``.
    """
    k = np.arange(1, n + 1, dtype=float)

    def e(a, b, x):
        return _fast_entries(a, b, k, n, x)

    if kind == "cross-square":
        i, j, l = indices
        prod = e(i, 1, t) * e(i, 2, t) * e(j, l, s) ** 2
    elif kind == "cross-cross":
        i, j = indices
        prod = e(i, 1, t) * e(i, 2, t) * e(j, 1, s) * e(j, 2, s)
    elif kind == "triple":
        (i1, i2, i3), (l1, l2, l3) = indices
        prod = e(i1, l1, t) * e(i2, l2, t) * e(i3, l3, s)
    else:
        raise ValueError(f"unknown mixed-average kind {kind!r}")
    return _mean(prod)


@dataclass(frozen=True)
class TrigSum:
    """A weighted trigonometric sum, its frequency gap and an explicit ``O(1/(n b_bar))`` bound."""

    value: float
    b_bar: float
    bound: float


def _b_bar(b: float) -> float:
    top = math.ceil(abs(b) / (2 * math.pi)) + 1
    return min(abs(2 * math.pi * p - b) / max(p, 1) for p in range(0, top + 1))


def trig_sum(b: float, i: int, n: int, kind: str = "cos") -> TrigSum:
    """``(1/n) sum_{k=1}^n (k/n)^i cos(b k)`` (or ``sin`` with ``kind="sin"``).

    ``bound`` is ``2 pi / (n b_bar)``: partial sums of ``e^{ibk}`` are at most
    ``1 / |sin(b/2)| <= pi / b_bar`` and the monotone weights add a factor 2
    by summation by parts.

    Raises
    ------
    ValueError
        If ``b`` is a multiple of ``2 pi`` (zero gap) or ``i`` is not 0, 1, 2.
    """
    if i not in (0, 1, 2):
        raise ValueError("weight exponent i must be 0, 1 or 2")
    gap = _b_bar(b)
    if gap == 0:
        raise ValueError("b is a multiple of 2*pi; the frequency gap vanishes")
    k = np.arange(1, n + 1, dtype=float)
    trig = np.cos if kind == "cos" else np.sin if kind == "sin" else None
    if trig is None:
        raise ValueError("kind must be 'cos' or 'sin'")
    value = _mean((k / n) ** i * trig(b * k))
    return TrigSum(value, gap, 2 * math.pi / (n * gap))
