"""Real-root counting for trigonometric polynomials on ``[0, pi)``.

The counter scans a uniform grid (transform evaluation) for sign changes.
On each grid cell a cubic Hermite interpolant built from values and
derivatives approximates ``p`` with a rigorous error bound

    |p - H| <= h^4 / 384 * max|p''''|,   max|p''''| <= sum k^4 |(a_k, b_k)|,

so a cell whose interpolant stays away from zero by more than the bound, and
whose interpolant crosses zero exactly as often as its endpoint signs
indicate, is counted from the endpoint signs alone.  Every other cell is
re-scanned at 16x resolution with direct evaluation, where critical points
are located by bisection on ``p'``.  A critical value within ``1e-9 * max|p|``
of zero marks a near tangency; such cells are reported as suspicious and
counted by sign changes only.

Exact zeros on grid points are given the positive sign.  Roots exactly at
``t = 0`` are therefore not counted when ``p`` is nonnegative just after 0;
both events have probability zero under laws with a density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .polynomial import TrigPolynomialSample, grid_values

__all__ = [
    "BatchCountResult",
    "ClusterRow",
    "KacRiceResult",
    "RootCountResult",
    "SmallBallRow",
    "SmoothedCountParams",
    "cluster_diagnostic",
    "count_roots",
    "count_roots_batch",
    "default_grid_size",
    "kac_rice_count",
    "min_modulus",
    "small_ball_diagnostic",
]

SUBDIVISION = 16
TANGENCY_RTOL = 1e-9
ROOT_XTOL = 1e-12
_CELLS_PER_BLOCK = 1 << 19


def default_grid_size(n: int) -> int:
    """Grid size used by the counter: ``16 n`` cells on ``[0, pi]``."""
    return 16 * n


# ---------------------------------------------------------------------------
# direct evaluation on per-row coefficients


def _direct(a: np.ndarray, b: np.ndarray, t: np.ndarray, derivative: bool = False) -> np.ndarray:
    """Evaluate row ``i`` of (a, b) at the points ``t[i, ...]``."""
    k = np.arange(1, a.shape[-1] + 1)
    kt = t[..., None] * k
    extra = (None,) * (t.ndim - 1)
    ar = a[(slice(None),) + extra]
    br = b[(slice(None),) + extra]
    if derivative:
        return (np.cos(kt) * (k * br) - np.sin(kt) * (k * ar)).sum(-1)
    return (np.cos(kt) * ar + np.sin(kt) * br).sum(-1)


def _error_bound(a: np.ndarray, b: np.ndarray, M: int) -> np.ndarray:
    """Per-sample bound on |p - Hermite interpolant| over any grid cell."""
    k = np.arange(1, a.shape[-1] + 1, dtype=float)
    h = math.pi / M
    fourth = (k**4 * np.hypot(a, b)).sum(-1)
    rounding = 1e-13 * (np.abs(a) + np.abs(b)).sum(-1) * k[-1]
    return 2.0 * (h**4 * fourth / 384.0 + rounding)


# ---------------------------------------------------------------------------
# grid scan


@dataclass
class _Scan:
    interval_counts: np.ndarray  # (B, M) int
    candidate: np.ndarray  # (B, M) bool
    suspicious: np.ndarray  # (B, M) bool
    values: np.ndarray  # (B, M+1) grid values minus level
    refine_rows: np.ndarray
    refine_cells: np.ndarray
    refine_points: np.ndarray  # (K, 33) ordered abscissae
    refine_values: np.ndarray  # (K, 33) values, forward-filled
    direct_evaluations: int


def _hermite_candidates(v: np.ndarray, d: np.ndarray, h: float, eps: np.ndarray) -> np.ndarray:
    """Cells whose count cannot be read off the endpoint signs."""
    v0, v1 = v[:, :-1], v[:, 1:]
    D0, D1 = h * d[:, :-1], h * d[:, 1:]
    delta = v1 - v0
    c2 = 3 * delta - 2 * D0 - D1
    c3 = -2 * delta + D0 + D1
    # H'(s) = 3 c3 s^2 + 2 c2 s + D0
    qa, qb, qc = 3 * c3, 2 * c2, D0
    with np.errstate(invalid="ignore", divide="ignore"):
        disc = qb * qb - 4 * qa * qc
        q = -0.5 * (qb + np.copysign(np.sqrt(np.maximum(disc, 0.0)), qb))
        r1 = q / qa
        r2 = qc / q
    real = disc >= 0
    ok1 = real & np.isfinite(r1) & (r1 > 0) & (r1 < 1)
    ok2 = real & np.isfinite(r2) & (r2 > 0) & (r2 < 1)
    s_lo = np.where(ok1 & ok2, np.minimum(r1, r2), np.where(ok1, r1, r2))
    s_hi = np.where(ok1 & ok2, np.maximum(r1, r2), np.nan)
    has_lo = ok1 | ok2
    has_hi = ok1 & ok2

    def herm(s):
        s = np.where(np.isfinite(s), s, 0.0)
        return v0 + s * (D0 + s * (c2 + s * c3))

    h_lo = np.where(has_lo, herm(s_lo), v0)
    h_hi = np.where(has_hi, herm(s_hi), h_lo)
    n0, n1, n2, n3 = v0 < 0, h_lo < 0, h_hi < 0, v1 < 0
    crossings = (n0 != n1).astype(np.int8) + (n1 != n2) + (n2 != n3)
    endpoint = n0 != n3
    small = np.minimum(np.minimum(np.abs(v0), np.abs(v1)), np.minimum(np.abs(h_lo), np.abs(h_hi)))
    return (crossings != endpoint) | (small <= eps[:, None])


def _refine(a, b, rows, cells, v, M, level, tol):
    """Direct 16x re-scan of selected cells.

    Returns per-cell counts, tangency flags, ordered sample abscissae and
    the matching values (critical-point slots forward-filled), and the
    number of direct evaluations spent.
    """
    h = math.pi / M
    K = rows.size
    ar, br = a[rows], b[rows]
    left = cells * h
    pts = left[:, None] + (h / SUBDIVISION) * np.arange(SUBDIVISION + 1)
    vals = _direct(ar, br, pts) - level
    vals[:, 0] = v[rows, cells]
    vals[:, -1] = v[rows, cells + 1]
    dvals = _direct(ar, br, pts, derivative=True)
    evals = 2 * pts.size

    # critical points inside sub-cells where p' changes sign
    dneg = dvals < 0
    ck, cl = np.nonzero(dneg[:, :-1] != dneg[:, 1:])
    lo = pts[ck, cl].copy()
    hi = pts[ck, cl + 1].copy()
    lo_neg = dneg[ck, cl]
    if ck.size:
        ca, cb = ar[ck], br[ck]
        for _ in range(44):
            mid = 0.5 * (lo + hi)
            same = (_direct(ca, cb, mid[:, None], derivative=True)[:, 0] < 0) == lo_neg
            lo = np.where(same, mid, lo)
            hi = np.where(same, hi, mid)
        crit = 0.5 * (lo + hi)
        crit_vals = _direct(ca, cb, crit[:, None])[:, 0] - level
        evals += 45 * ck.size
    else:
        crit = np.empty(0)
        crit_vals = np.empty(0)

    width = 2 * SUBDIVISION + 1
    seq_pts = np.empty((K, width))
    seq_vals = np.empty((K, width))
    seq_pts[:, 0::2] = pts
    seq_vals[:, 0::2] = vals
    seq_pts[:, 1::2] = pts[:, :-1]
    seq_vals[:, 1::2] = vals[:, :-1]
    seq_pts[ck, 2 * cl + 1] = crit
    seq_vals[ck, 2 * cl + 1] = crit_vals
    neg = seq_vals < 0
    counts = (neg[:, 1:] != neg[:, :-1]).sum(-1)
    tangent = np.zeros(K, dtype=bool)
    if ck.size:
        np.logical_or.at(tangent, ck, np.abs(crit_vals) <= tol[rows][ck])
    return counts, tangent, seq_pts, seq_vals, evals


def _scan(a: np.ndarray, b: np.ndarray, M: int, level: float = 0.0) -> _Scan:
    h = math.pi / M
    v = grid_values(a, b, M)
    # at 0 and pi the sine terms vanish exactly; avoid FFT rounding there
    signs = np.where(np.arange(1, a.shape[-1] + 1) % 2, -1.0, 1.0)
    v[:, 0] = a.sum(axis=-1)
    v[:, -1] = a @ signs
    v -= level
    # the interval is [0, pi): an exact zero at 0 is a root, one at pi is not
    tiny = np.finfo(float).tiny
    v[:, 0] = np.where(v[:, 0] == 0, -np.copysign(tiny, v[:, 1]), v[:, 0])
    v[:, -1] = np.where(v[:, -1] == 0, np.copysign(tiny, v[:, -2]), v[:, -1])
    d = grid_values(a, b, M, derivative=True)
    eps = _error_bound(a, b, M)
    neg = v < 0
    interval_counts = (neg[:, 1:] != neg[:, :-1]).astype(np.int64)
    candidate = _hermite_candidates(v, d, h, eps)
    suspicious = np.zeros_like(candidate)
    rows, cells = np.nonzero(candidate)
    tol = TANGENCY_RTOL * np.abs(v + level).max(axis=1)
    if rows.size:
        counts, tangent, sp, sv, evals = _refine(a, b, rows, cells, v, M, level, tol)
        interval_counts[rows, cells] = counts
        suspicious[rows, cells] = tangent
    else:
        sp = sv = np.empty((0, 2 * SUBDIVISION + 1))
        evals = 0
    return _Scan(interval_counts, candidate, suspicious, v, rows, cells, sp, sv, evals)


def _blocks(B: int, M: int):
    step = max(1, _CELLS_PER_BLOCK // max(M, 1))
    for start in range(0, B, step):
        yield slice(start, min(B, start + step))


# ---------------------------------------------------------------------------
# public counting API


@dataclass(frozen=True)
class RootCountResult:
    """Outcome of counting the zeros of one polynomial on ``[0, pi)``."""

    count: int
    locations: np.ndarray | None
    suspicious_intervals: list[tuple[float, float]] = field(default_factory=list)
    evaluations_used: int = 0

    @property
    def flagged(self) -> bool:
        return bool(self.suspicious_intervals)


@dataclass(frozen=True)
class BatchCountResult:
    """Root counts for a batch; ``suspicious[i]`` marks near tangencies."""

    counts: np.ndarray
    suspicious: np.ndarray


def _bisect_brackets(a, b, lo, hi, lo_neg, level):
    """Shrink sign-change brackets of ``p - level`` to width ``ROOT_XTOL``."""
    if lo.size == 0:
        return lo, 0
    width = float(np.max(hi - lo))
    steps = max(1, math.ceil(math.log2(max(width, ROOT_XTOL) / ROOT_XTOL)) + 1)
    A = np.broadcast_to(a, (lo.size, a.size))
    Bc = np.broadcast_to(b, (lo.size, b.size))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        same = (_direct(A, Bc, mid[:, None])[:, 0] - level < 0) == lo_neg
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi), steps * lo.size


def count_roots(
    sample: TrigPolynomialSample,
    M: int | None = None,
    level: float = 0.0,
    locate: bool = True,
) -> RootCountResult:
    """Count sign changes of ``p - level`` on ``[0, pi)``.

    Parameters
    ----------
    sample : TrigPolynomialSample
    M : int, optional
        Number of grid cells on ``[0, pi]``; defaults to ``16 n``.
    level : float
        Count crossings of this level instead of zeros.
    locate : bool
        Also refine every root to an abscissa tolerance of ``1e-12``.
    """
    n = sample.n
    M = default_grid_size(n) if M is None else M
    a, b = sample.a[None, :], sample.b[None, :]
    scan = _scan(a, b, M, level)
    h = math.pi / M
    count = int(scan.interval_counts.sum())
    evals = 2 * (M + 1) + scan.direct_evaluations
    flagged = [(float(c * h), float((c + 1) * h)) for c in np.nonzero(scan.suspicious[0])[0]]

    locations = None
    if locate:
        v = scan.values[0]
        neg = v < 0
        plain = np.nonzero((neg[1:] != neg[:-1]) & ~scan.candidate[0])[0]
        lo = [plain * h]
        hi = [(plain + 1) * h]
        lo_neg = [neg[plain]]
        sneg = scan.refine_values < 0
        kk, ii = np.nonzero(sneg[:, 1:] != sneg[:, :-1])
        lo.append(scan.refine_points[kk, ii])
        hi.append(scan.refine_points[kk, ii + 1])
        lo_neg.append(sneg[kk, ii])
        lo, hi, lo_neg = (np.concatenate(x) for x in (lo, hi, lo_neg))
        order = np.argsort(lo, kind="stable")
        roots, used = _bisect_brackets(sample.a, sample.b, lo[order], hi[order], lo_neg[order], level)
        locations = roots
        evals += used
    return RootCountResult(count, locations, flagged, evals)


def count_roots_batch(a, b, M: int | None = None, level: float = 0.0) -> BatchCountResult:
    """Counts only, for coefficient arrays of shape ``(B, n)``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    M = default_grid_size(a.shape[-1]) if M is None else M
    counts = np.empty(a.shape[0], dtype=np.int64)
    suspicious = np.empty(a.shape[0], dtype=bool)
    for blk in _blocks(a.shape[0], M):
        scan = _scan(a[blk], b[blk], M, level)
        counts[blk] = scan.interval_counts.sum(-1)
        suspicious[blk] = scan.suspicious.any(-1)
    return BatchCountResult(counts, suspicious)


def _cell_positions(a, b, M):
    """Per-cell root counts and a position estimate for each cell's roots."""
    scan = _scan(a, b, M)
    h = math.pi / M
    v = scan.values
    v0, v1 = v[:, :-1], v[:, 1:]
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(v0 != v1, v0 / (v0 - v1), 0.5)
    frac = np.clip(np.nan_to_num(frac, nan=0.5), 0.0, 1.0)
    frac = np.where(scan.interval_counts == 1, frac, 0.5)
    pos = (np.arange(M) + frac) * h
    return scan.interval_counts, pos, scan.suspicious.any(-1)


# ---------------------------------------------------------------------------
# Kac-Rice smoothed count


@dataclass(frozen=True)
class SmoothedCountParams:
    """Band half-width ``delta`` and Gauss-Legendre order for the smoothed count."""

    delta: float
    quadrature_points: int = 16

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.quadrature_points < 1:
            raise ValueError("quadrature_points must be positive")


@dataclass(frozen=True)
class KacRiceResult:
    """Value of the smoothed count with its quadrature status."""

    value: float
    delta: float
    degenerate: bool = False
    converged: bool = True

    def __float__(self) -> float:
        return self.value


def _critical_points(sample: TrigPolynomialSample) -> np.ndarray:
    return count_roots(sample.derivative()).locations


def _band_overlap(lo, hi, delta):
    return np.clip(np.minimum(hi, delta) - np.maximum(lo, -delta), 0.0, None)


def _integrate_abs_derivative(sample, lo, hi, order, rtol, max_rounds):
    """Adaptive Gauss-Legendre integral of |p'| over each [lo_i, hi_i]."""
    x, w = np.polynomial.legendre.leggauss(order)

    def rule(l, r):
        mid, half = 0.5 * (l + r), 0.5 * (r - l)
        pts = mid[:, None] + half[:, None] * x
        vals = np.abs(_direct(sample.a[None, :], sample.b[None, :], pts.reshape(1, -1), derivative=True))
        return half * (vals.reshape(pts.shape) @ w)

    total = 0.0
    converged = True
    for _ in range(max_rounds):
        if lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        whole = rule(lo, hi)
        left, right = rule(lo, mid), rule(mid, hi)
        fine = left + right
        done = np.abs(whole - fine) <= rtol * np.abs(fine) + 1e-300
        total += float(fine[done].sum())
        keep = ~done
        lo, hi = np.concatenate([lo[keep], mid[keep]]), np.concatenate([mid[keep], hi[keep]])
    else:
        if lo.size:
            converged = False
            total += float(rule(lo, hi).sum())
    return total, converged


def kac_rice_count(
    sample: TrigPolynomialSample,
    params: SmoothedCountParams | None = None,
    method: str = "exact",
    rtol: float = 1e-12,
    max_rounds: int = 30,
) -> KacRiceResult:
    """Smoothed count ``int_0^pi |p'| 1{|p| <= delta} dt / (2 delta)``.

    ``method="exact"`` splits ``[0, pi]`` at the critical points of ``p``;
    on each monotone piece the integral equals the length of the value range
    inside the band, which needs no band-crossing abscissae.
    ``method="quadrature"`` locates the band crossings ``p = +-delta`` and
    integrates ``|p'|`` on each sublevel component by adaptive
    Gauss-Legendre quadrature.  The default ``delta`` is
    ``min(n**-5, delta_hat / 2)`` with ``delta_hat`` from :func:`min_modulus`.
    """
    if not (np.any(sample.a) or np.any(sample.b)):
        return KacRiceResult(0.0, params.delta if params else 0.0, degenerate=True)
    if params is None:
        _, delta_hat = min_modulus(sample)
        params = SmoothedCountParams(min(sample.n ** -5.0, 0.5 * delta_hat))
    delta = params.delta
    crit = _critical_points(sample)
    crit = crit[(crit > 0) & (crit < math.pi)]

    if method == "exact":
        knots = np.concatenate([[0.0], crit, [math.pi]])
        vals = _direct(sample.a[None, :], sample.b[None, :], knots[None, :])[0]
        lo = np.minimum(vals[:-1], vals[1:])
        hi = np.maximum(vals[:-1], vals[1:])
        total = float(_band_overlap(lo, hi, delta).sum())
        return KacRiceResult(total / (2 * delta), delta)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")

    up = count_roots(sample, level=delta).locations
    down = count_roots(sample, level=-delta).locations
    knots = np.unique(np.concatenate([[0.0, math.pi], crit, up, down]))
    mids = 0.5 * (knots[:-1] + knots[1:])
    inside = np.abs(_direct(sample.a[None, :], sample.b[None, :], mids[None, :])[0]) <= delta
    total, converged = _integrate_abs_derivative(
        sample, knots[:-1][inside], knots[1:][inside], params.quadrature_points, rtol, max_rounds
    )
    return KacRiceResult(total / (2 * delta), delta, converged=converged)


# ---------------------------------------------------------------------------
# minimum modulus


def min_modulus(sample: TrigPolynomialSample, M: int | None = None, refine: int | None = None) -> tuple[float, float]:
    """Estimate ``omega = inf (|p| + |p'|)`` over ``[0, pi]`` and
    ``delta = min(|p(0)|, |p(pi)|, omega)``.

    Candidates are the grid minimum, the critical points of ``p`` (where the
    objective reduces to ``|p|``) and bounded scalar minimisation around grid
    local minima (all of them by default, else the ``refine`` smallest).
    Every value is attained at a concrete point, so both results are upper
    bounds on the true infima.
    """
    n = sample.n
    M = default_grid_size(n) if M is None else M
    v = grid_values(sample.a, sample.b, M)
    d = grid_values(sample.a, sample.b, M, derivative=True)
    g = np.abs(v) + np.abs(d)
    omega = float(g.min())
    A, Bc = sample.a[None, :], sample.b[None, :]
    if omega > 0:
        crit = _critical_points(sample)
        if crit.size:
            omega = min(omega, float(np.abs(_direct(A, Bc, crit[None, :])).min()))
    if omega > 0 and refine != 0:
        padded = np.concatenate([[np.inf], g, [np.inf]])
        local = np.nonzero((padded[1:-1] <= padded[:-2]) & (padded[1:-1] <= padded[2:]))[0]
        if refine is not None:
            local = local[np.argsort(g[local], kind="stable")[:refine]]
        h = math.pi / M

        def objective(t):
            pt = np.array([[t]])
            return abs(_direct(A, Bc, pt)[0, 0]) + abs(_direct(A, Bc, pt, derivative=True)[0, 0])

        for j in local:
            lo, hi = max(0.0, (j - 1) * h), min(math.pi, (j + 1) * h)
            res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
            omega = min(omega, float(res.fun))
    edge = min(abs(float(v[0])), abs(float(v[-1])))
    return omega, min(edge, omega)


# ---------------------------------------------------------------------------
# batch diagnostics


def _as_batch(samples):
    if isinstance(samples, tuple) and len(samples) == 2 and not isinstance(samples[0], TrigPolynomialSample):
        a, b = samples
        return np.atleast_2d(np.asarray(a, float)), np.atleast_2d(np.asarray(b, float))
    samples = list(samples)
    return np.stack([s.a for s in samples]), np.stack([s.b for s in samples])


@dataclass(frozen=True)
class ClusterRow:
    """Mean of ``N^2 1{N >= 2}`` over windows of one width."""

    n: int
    epsilon: float
    estimate: float
    stderr: float
    n_samples: int
    reference: float
    windows: int
    seed: int | None = None

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "epsilon_or_theta": self.epsilon,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def cluster_diagnostic(samples, epsilon: float, rescaled: bool = False, seed: int | None = None) -> ClusterRow:
    """Monte Carlo estimate of ``E(N^2 1{N >= 2})`` for windows of width ``epsilon``.

    Windows tile ``[0, pi)`` from the left; a trailing partial window is
    dropped, and a width of at least ``pi`` means one window covering the
    whole interval.  With ``rescaled=True`` the width is measured in the
    rescaled variable on ``[0, n*pi)``.  The standard error uses the
    per-sample window averages, which are independent across samples.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    a, b = _as_batch(samples)
    n = a.shape[-1]
    width = epsilon / n if rescaled else epsilon
    windows = max(1, int(math.floor(math.pi / width + 1e-12)))
    if windows == 1:
        width = math.pi
    M = default_grid_size(n)
    per_sample = np.empty(a.shape[0])
    for blk in _blocks(a.shape[0], M):
        counts, pos, _ = _cell_positions(a[blk], b[blk], M)
        idx = np.minimum((pos // width).astype(np.int64), windows)
        B = counts.shape[0]
        tally = np.zeros((B, windows + 1), dtype=np.int64)
        np.add.at(tally, (np.repeat(np.arange(B), M), idx.ravel()), counts.ravel())
        tally = tally[:, :windows]
        score = np.where(tally >= 2, tally.astype(float) ** 2, 0.0)
        per_sample[blk] = score.mean(axis=1)
    m = per_sample.size
    est = float(per_sample.mean())
    se = float(per_sample.std(ddof=1) / math.sqrt(m)) if m > 1 else float("nan")
    return ClusterRow(n, epsilon, est, se, m, epsilon ** (4.0 / 3.0), windows, seed)


@dataclass(frozen=True)
class SmallBallRow:
    """Frequency of ``min(|P| + |P'|) <= n**-theta`` with its rough envelope."""

    n: int
    theta: float
    frequency: float
    stderr: float
    n_samples: int
    envelope: float
    seed: int | None = None

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "epsilon_or_theta": self.theta,
            "estimate": self.frequency,
            "stderr": self.stderr,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def small_ball_diagnostic(samples, theta: float, M: int | None = None, seed: int | None = None) -> SmallBallRow:
    """Empirical frequency of a small value of ``|P| + |P'|`` over the grid."""
    if not theta > 1:
        raise ValueError("theta must exceed 1")
    a, b = _as_batch(samples)
    n = a.shape[-1]
    M = default_grid_size(n) if M is None else M
    threshold = float(n) ** -theta
    hits = np.empty(a.shape[0], dtype=bool)
    for blk in _blocks(a.shape[0], M):
        v = grid_values(a[blk], b[blk], M)
        d = grid_values(a[blk], b[blk], M, derivative=True)
        g = np.abs(v) / math.sqrt(n) + np.abs(d) / n**1.5
        hits[blk] = g.min(axis=1) <= threshold
    m = hits.size
    freq = float(hits.mean())
    se = math.sqrt(freq * (1 - freq) / m) if m else float("nan")
    return SmallBallRow(n, theta, freq, se, m, float(n) ** -(theta - 1), seed)
