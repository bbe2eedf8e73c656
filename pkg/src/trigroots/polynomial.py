"""Evaluation of random trigonometric polynomials.

A sample holds the coefficient vectors ``a`` and ``b`` of

    p(t) = sum_{k=1}^n a_k cos(k t) + b_k sin(k t).

The rescaled process used by the variance theory is
``P(t) = p(t / n) / sqrt(n)`` on ``[0, n*pi)`` with derivative
``P'(t) = p'(t / n) / n**1.5``.

Grid evaluation treats ``a_k - i b_k`` as a one-sided spectrum and runs a
single real inverse FFT on a ``2M``-point circle, giving every ``p(j*pi/M)``
for ``j = 0..M`` in ``O(M log M)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridEvaluation",
    "TrigPolynomialSample",
    "eval",
    "eval_derivative",
    "eval_grid",
    "eval_rescaled",
    "eval_rescaled_derivative",
    "grid_values",
    "pair_statistic",
]


@dataclass(frozen=True)
class TrigPolynomialSample:
    """One realization of the polynomial: cosine weights ``a`` and sine weights ``b``."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.ascontiguousarray(self.a, dtype=float)
        b = np.ascontiguousarray(self.b, dtype=float)
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise ValueError("a and b must be nonempty 1-d arrays of equal length")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.size

    @classmethod
    def draw(cls, dist, rng: np.random.Generator, n: int) -> "TrigPolynomialSample":
        """Sample ``n`` coefficient pairs from ``dist``."""
        y = dist.sample(rng, (n, 2))
        return cls(y[:, 0], y[:, 1])

    def derivative(self) -> "TrigPolynomialSample":
        """The derivative, itself a trigonometric polynomial of degree n."""
        k = np.arange(1, self.n + 1)
        return TrigPolynomialSample(k * self.b, -k * self.a)

    def __neg__(self) -> "TrigPolynomialSample":
        return TrigPolynomialSample(-self.a, -self.b)


def eval(sample: TrigPolynomialSample, t):  # noqa: A001 - public name
    """Evaluate ``p(t)`` at a scalar or array of abscissae."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, sample.n + 1)
    kt = np.multiply.outer(t, k)
    out = np.cos(kt) @ sample.a + np.sin(kt) @ sample.b
    return float(out) if out.ndim == 0 else out


def eval_derivative(sample: TrigPolynomialSample, t):
    """Evaluate ``p'(t) = sum k (b_k cos kt - a_k sin kt)``."""
    t = np.asarray(t, dtype=float)
    k = np.arange(1, sample.n + 1)
    kt = np.multiply.outer(t, k)
    out = np.cos(kt) @ (k * sample.b) - np.sin(kt) @ (k * sample.a)
    return float(out) if out.ndim == 0 else out


def eval_rescaled(sample: TrigPolynomialSample, t):
    """The rescaled process ``P(t) = p(t/n)/sqrt(n)``, ``t`` in ``[0, n*pi)``."""
    n = sample.n
    return eval(sample, np.asarray(t, dtype=float) / n) / math.sqrt(n)


def eval_rescaled_derivative(sample: TrigPolynomialSample, t):
    """Derivative of the rescaled process, ``p'(t/n)/n**1.5``."""
    n = sample.n
    return eval_derivative(sample, np.asarray(t, dtype=float) / n) / n**1.5


def grid_values(a: np.ndarray, b: np.ndarray, M: int, derivative: bool = False) -> np.ndarray:
    """Values on ``t_j = j*pi/M`` for ``j = 0..M`` inclusive.

    ``a`` and ``b`` may carry leading batch dimensions; the last axis is the
    frequency index.  With ``derivative=True`` returns ``p'`` instead.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[-1]
    if M < 2 * n + 1:
        raise ValueError(f"grid size M={M} is below the bandwidth requirement 2n+1={2 * n + 1}")
    L = 2 * M
    spectrum = np.zeros(a.shape[:-1] + (M + 1,), dtype=complex)
    spectrum[..., 1 : n + 1] = (L / 2) * (a - 1j * b)
    if derivative:
        spectrum[..., 1 : n + 1] *= 1j * np.arange(1, n + 1)
    return np.fft.irfft(spectrum, n=L)[..., : M + 1]


@dataclass(frozen=True)
class GridEvaluation:
    """Values of ``p`` and ``p'`` on ``M`` uniform points of ``[0, pi)``."""

    grid: np.ndarray
    values: np.ndarray
    derivative_values: np.ndarray

    @property
    def M(self) -> int:
        return self.grid.size


def eval_grid(sample: TrigPolynomialSample, M: int) -> GridEvaluation:
    """Transform-based evaluation on ``t_j = j*pi/M``, ``j = 0..M-1``.

    Raises
    ------
    ValueError
        If ``M < 2n + 1``.
    """
    values = grid_values(sample.a, sample.b, M)[:M]
    deriv = grid_values(sample.a, sample.b, M, derivative=True)[:M]
    return GridEvaluation(np.arange(M) * (math.pi / M), values, deriv)


def pair_statistic(sample: TrigPolynomialSample, t: float, s: float) -> np.ndarray:
    """The 4-vector ``(P(t), P'(t), P(s), P'(s))`` in rescaled variables."""
    pts = np.array([t, s], dtype=float)
    v = eval_rescaled(sample, pts)
    d = eval_rescaled_derivative(sample, pts)
    return np.array([v[0], d[0], v[1], d[1]])
