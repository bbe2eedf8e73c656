"""Coefficient laws for the pairs Y_k = (Y_k^1, Y_k^2) and their moments.

Every shipped law is centered with unit variance and independent,
identically distributed components.  Laws with an absolutely continuous
part (Gaussian, uniform, Gaussian scale mixtures) satisfy the Doeblin
minorization by construction.  A Rademacher (sign-flip) law is available
for exploration only; it must be requested with ``allow_unsupported=True``
and results built on it are reported with ``doeblin_ok == False``.

Random streams are counter-based: the stream for sample ``j`` of an
experiment is a pure function of ``(base_seed, experiment key, j)`` so that
results never depend on how work is split between processes.
"""

from __future__ import annotations

import itertools
import math
import zlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

__all__ = [
    "CoefficientDistribution",
    "MomentTable",
    "UnsupportedLawError",
    "moment",
    "moment_table",
    "sample_pair",
    "stream",
    "stream_at",
    "stream_key",
    "y_star",
]

SQRT3 = math.sqrt(3.0)

_ALIASES = {
    "standard-gaussian": "standard-gaussian",
    "gaussian": "standard-gaussian",
    "normal": "standard-gaussian",
    "scaled-uniform": "scaled-uniform",
    "uniform": "scaled-uniform",
    "gaussian-scale-mixture": "gaussian-scale-mixture",
    "mixture": "gaussian-scale-mixture",
    "rademacher": "rademacher",
    "sign": "rademacher",
}

# Doeblin metadata per kind: (density bounded below on some ball?, note).
# The constants eta and r are never pinned numerically.
_DOEBLIN = {
    "standard-gaussian": (True, "positive density everywhere"),
    "scaled-uniform": (True, "density 1/12 on the square [-sqrt3, sqrt3]^2"),
    "gaussian-scale-mixture": (True, "positive density everywhere"),
    "rademacher": (False, "purely atomic law; no absolutely continuous part"),
}


class UnsupportedLawError(ValueError):
    """Raised when a law without a density component is requested implicitly."""


@dataclass(frozen=True)
class CoefficientDistribution:
    """A centered, unit-variance law for each component of Y_k.

    Parameters
    ----------
    kind : str
        One of ``standard-gaussian``, ``scaled-uniform``,
        ``gaussian-scale-mixture`` or ``rademacher`` (short aliases
        ``gaussian``, ``uniform``, ``mixture``, ``sign`` are accepted).
    p, v1, v2 : float
        Mixture weight and the two component variances; only used by the
        scale mixture, which requires ``p*v1 + (1-p)*v2 == 1``.
    allow_unsupported : bool
        Must be set to use a law that violates the Doeblin condition.
    """

    kind: str = "standard-gaussian"
    p: float = 0.5
    v1: float = 1.0
    v2: float = 1.0
    allow_unsupported: bool = False

    def __post_init__(self):
        try:
            kind = _ALIASES[self.kind.lower()]
        except KeyError:
            raise ValueError(f"unknown coefficient law {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if kind == "gaussian-scale-mixture":
            if not 0.0 < self.p < 1.0:
                raise ValueError("mixture weight p must lie in (0, 1)")
            if self.v1 <= 0 or self.v2 <= 0:
                raise ValueError("mixture variances must be positive")
            if abs(self.p * self.v1 + (1 - self.p) * self.v2 - 1.0) > 1e-12:
                raise ValueError("mixture must have unit variance: p*v1 + (1-p)*v2 = 1")
        if kind == "rademacher" and not self.allow_unsupported:
            raise UnsupportedLawError(
                "the sign-flip law violates the Doeblin condition; "
                "pass allow_unsupported=True to explore it anyway"
            )

    @property
    def doeblin_ok(self) -> bool:
        return _DOEBLIN[self.kind][0]

    @property
    def doeblin_note(self) -> str:
        return _DOEBLIN[self.kind][1]

    @property
    def name(self) -> str:
        """Short stable label used in reports and for stream derivation."""
        if self.kind == "standard-gaussian":
            return "gaussian"
        if self.kind == "scaled-uniform":
            return "uniform"
        if self.kind == "rademacher":
            return "rademacher"
        return f"mixture({self.p:g},{self.v1:g},{self.v2:g})"

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Draw i.i.d. values of one component with the given shape."""
        if self.kind == "standard-gaussian":
            return rng.standard_normal(size)
        if self.kind == "scaled-uniform":
            return rng.uniform(-SQRT3, SQRT3, size)
        if self.kind == "gaussian-scale-mixture":
            z = rng.standard_normal(size)
            scale = np.where(rng.random(size) < self.p, math.sqrt(self.v1), math.sqrt(self.v2))
            return z * scale
        return np.where(rng.random(size) < 0.5, -1.0, 1.0)

    @classmethod
    def from_config(cls, cfg: Mapping | str) -> "CoefficientDistribution":
        """Build a law from a name or a config mapping such as
        ``{"dist": "mixture", "p": 0.5, "v1": 0.5, "v2": 1.5}``."""
        if isinstance(cfg, str):
            return cls(cfg)
        kind = cfg.get("dist", cfg.get("kind", "gaussian"))
        if isinstance(kind, Mapping):
            return cls.from_config(kind)
        kwargs = {k: cfg[k] for k in ("p", "v1", "v2", "allow_unsupported") if k in cfg}
        return cls(kind, **kwargs)

    def to_config(self) -> dict:
        out = {"dist": self.kind}
        if self.kind == "gaussian-scale-mixture":
            out.update(p=self.p, v1=self.v1, v2=self.v2)
        if self.allow_unsupported:
            out["allow_unsupported"] = True
        return out


def stream_key(base_seed: int, key: str) -> np.ndarray:
    """Philox key for the experiment ``key`` under ``base_seed``."""
    tag = zlib.crc32(key.encode("utf-8"))
    seed_words = [int(base_seed) & 0xFFFFFFFF, (int(base_seed) >> 32) & 0xFFFFFFFF, tag]
    return np.random.SeedSequence(seed_words).generate_state(2, np.uint64)


def stream_at(philox_key: np.ndarray, index: int) -> np.random.Generator:
    """Generator for draw ``index`` under a key from :func:`stream_key`."""
    counter = np.array([0, int(index), 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=philox_key, counter=counter))


def stream(base_seed: int, key: str, index: int) -> np.random.Generator:
    """Counter-based stream for draw ``index`` of the experiment ``key``.

    The Philox key is derived from ``(base_seed, key)``; ``index`` selects a
    disjoint block of the counter space, so the stream is a pure function of
    its three arguments.
    """
    return stream_at(stream_key(base_seed, key), index)


def sample_pair(dist: CoefficientDistribution, rng: np.random.Generator) -> tuple[float, float]:
    """One draw of (Y^1, Y^2); the components are independent."""
    y = dist.sample(rng, 2)
    return float(y[0]), float(y[1])


def _moment_exact(dist: CoefficientDistribution, order: int) -> Fraction | float:
    if order not in (0, 1, 2, 3, 4):
        raise ValueError(f"unsupported moment order {order}; expected 1..4")
    if order == 0:
        return Fraction(1)
    if order in (1, 3):
        return Fraction(0)
    if order == 2:
        return Fraction(1)
    if dist.kind == "standard-gaussian":
        return Fraction(3)
    if dist.kind == "scaled-uniform":
        return Fraction(9, 5)
    if dist.kind == "rademacher":
        return Fraction(1)
    return 3.0 * (dist.p * dist.v1**2 + (1 - dist.p) * dist.v2**2)


def moment(dist: CoefficientDistribution, order: int) -> float:
    """Exact analytic moment E[(Y^1)^order] of one component, order in 1..4."""
    if order == 0:
        raise ValueError("unsupported moment order 0; expected 1..4")
    return float(_moment_exact(dist, order))


@dataclass(frozen=True)
class MomentTable:
    """Mixed moments E(prod_i Y^{alpha_i}) for |alpha| = 3 and 4.

    Multi-indices are tuples over {1, 2}.  Lookups are permutation
    invariant because the stored keys cover every ordering.
    """

    third: dict
    fourth: dict

    def __getitem__(self, alpha) -> float:
        alpha = tuple(alpha)
        if len(alpha) == 3:
            return self.third[alpha]
        if len(alpha) == 4:
            return self.fourth[alpha]
        raise KeyError(alpha)

    def tensor(self, order: int) -> np.ndarray:
        """The moments as a dense (2,)*order array indexed from 0."""
        src = self.third if order == 3 else self.fourth
        out = np.zeros((2,) * order)
        for alpha, v in src.items():
            out[tuple(a - 1 for a in alpha)] = v
        return out

    def scaled_excess(self, factor: float) -> "MomentTable":
        """Synthetic table whose fourth-order deviations from the Gaussian
        values are multiplied by ``factor`` (third moments scaled too)."""
        gauss = _gaussian_table()
        fourth = {a: gauss.fourth[a] + factor * (v - gauss.fourth[a]) for a, v in self.fourth.items()}
        third = {a: factor * v for a, v in self.third.items()}
        return MomentTable(third=third, fourth=fourth)


def _table_from_marginals(marginal) -> MomentTable:
    tables = []
    for order in (3, 4):
        entries = {}
        for alpha in itertools.product((1, 2), repeat=order):
            c1 = alpha.count(1)
            entries[alpha] = float(marginal(c1) * marginal(order - c1))
        tables.append(entries)
    return MomentTable(third=tables[0], fourth=tables[1])


def _gaussian_table() -> MomentTable:
    return _table_from_marginals(lambda k: (1, 0, 1, 0, 3)[k])


def moment_table(dist: CoefficientDistribution) -> MomentTable:
    """Mixed moments of Y for independent identical components."""
    return _table_from_marginals(lambda k: _moment_exact(dist, k))


def y_star(table: MomentTable) -> float:
    """Fourth-moment deviation aggregate driving the variance shift."""
    return (
        (table[1, 1, 2, 2] - 1)
        + (table[2, 2, 1, 1] - 1)
        + (table[1, 1, 1, 1] - 3)
        + (table[2, 2, 2, 2] - 3)
    )
