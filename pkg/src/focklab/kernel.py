"""Exact reproducing kernel of the weighted space via radial moments.

For the radial weight the kernel diagonalizes over monomials:
k(z, w) = sum_n (z conj(w))^n / c_n with c_n the squared monomial norm

    c_n = 2 pi [ 1/(2n+2) + int_0^inf e^{(2n+2)t - 2 alpha t^2} dt ],

split at |z| = 1 and evaluated in the log domain (completed square plus a
complementary-error-function factor).  c_n grows like exp((n+1)^2 / (2 alpha)),
so the table stores log c_n only.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .numerics import LogComplex, RatioBand, log_sum_arrays
from .sequences import PointSeq
from .weights import LogPoint

CACHE_VERSION = 1
CACHE_ENV = "FOCKLAB_CACHE"

#: terms are cut once they fall this many nats below the running series peak
SERIES_CUTOFF = 45.0


class KernelTableError(ValueError):
    """The moment table is too short for the requested evaluation."""


@dataclass(frozen=True)
class KernelTable:
    """log c_n for n = 0..len-1 at a fixed weight parameter."""

    alpha: float
    logc: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "logc", np.asarray(self.logc, dtype=float))

    def __len__(self) -> int:
        return len(self.logc)


def needed_terms(alpha: float, t_sum_max: float) -> int:
    """Table length covering evaluations with t_z + t_w up to t_sum_max.

    The series peaks near n = alpha * (t_z + t_w); a 50% margin plus 64
    terms covers the peak and its decaying tail for every requested point.
    """
    return int(math.ceil(2.0 * alpha * max(t_sum_max, 0.0) * 1.5)) + 64


def moments(alpha: float, n_max: int) -> KernelTable:
    """Moment table log c_n, n = 0..n_max, by the completed-square formula.

    With a = 2 alpha and b = 2n + 2 the radial integral over [1, inf) is
    e^{b^2/(4a)} * sqrt(pi/a)/2 * erfc(-b/(2 sqrt(a))).
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    n = np.arange(n_max + 1, dtype=float)
    a = 2.0 * alpha
    b = 2.0 * n + 2.0
    erfc_vals = np.array([math.erfc(v) for v in (-b / (2.0 * math.sqrt(a)))])
    log_gauss = b * b / (4.0 * a) + math.log(math.sqrt(math.pi / a) / 2.0) + np.log(erfc_vals)
    log_inner = -np.log(b)  # integral over [0, 1): 1/(2n+2)
    logc = math.log(2.0 * math.pi) + np.logaddexp(log_inner, log_gauss)
    return KernelTable(alpha=alpha, logc=logc)


# ----------------------------------------------------------------------------
# Moment cache

def _cache_path(cache_dir: Path, alpha: float, n_max: int) -> Path:
    return cache_dir / f"moments_a{alpha:.12e}_n{n_max}.json"


def save_cache(tab: KernelTable, path: str | Path) -> None:
    payload = {"alpha": tab.alpha, "logc": [float(v) for v in tab.logc], "version": CACHE_VERSION}
    Path(path).write_text(json.dumps(payload))


def load_cache(path: str | Path) -> KernelTable:
    payload = json.loads(Path(path).read_text())
    if payload.get("version") != CACHE_VERSION:
        raise ValueError(f"cache version {payload.get('version')} != {CACHE_VERSION}")
    return KernelTable(alpha=float(payload["alpha"]), logc=np.array(payload["logc"], dtype=float))


def moments_cached(alpha: float, n_max: int, cache_dir: str | Path | None = None) -> KernelTable:
    """moments() backed by a JSON file cache keyed on (alpha, n_max).

    The directory defaults to $FOCKLAB_CACHE and no caching happens when
    neither is set.
    """
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    if cache_dir is None:
        return moments(alpha, n_max)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    path = _cache_path(cache_dir, round(alpha, 12), n_max)
    if path.exists():
        tab = load_cache(path)
        if abs(tab.alpha - alpha) <= 1e-12 and len(tab) == n_max + 1:
            return tab
    tab = moments(alpha, n_max)
    save_cache(tab, path)
    return tab


# ----------------------------------------------------------------------------
# Kernel evaluation

def _series_logmags(tab: KernelTable, s: float) -> np.ndarray:
    """logmag of term n: n*s - log c_n, for the full stored table."""
    n = np.arange(len(tab), dtype=float)
    return n * s - tab.logc


def _check_coverage(tab: KernelTable, s: float) -> np.ndarray:
    l = _series_logmags(tab, s)
    peak = float(np.max(l))
    if l[-1] > peak - SERIES_CUTOFF:
        raise KernelTableError(
            f"table of {len(tab)} terms too short for t_z + t_w = {s:.3g} "
            f"(need about {needed_terms(tab.alpha, s)})"
        )
    return l


def kernel_value(tab: KernelTable, z: LogPoint, w: LogPoint) -> LogComplex:
    """k(z, w) = sum_n (z conj(w))^n / c_n, summed in the log domain.

    Terms peak near n = alpha (t_z + t_w) and decay super-geometrically past
    the peak; the stored table must reach 45 nats below it.
    """
    s = z.t + w.t
    if s == -math.inf:
        # one argument is the origin: only the constant term survives
        return LogComplex(-float(tab.logc[0]), 0.0)
    l = _check_coverage(tab, s)
    dtheta = z.theta - w.theta
    n = np.arange(len(tab), dtype=float)
    logmag, phase = log_sum_arrays(l, n * dtheta)
    return LogComplex(float(logmag), float(phase))


def kernel_diag_log(tab: KernelTable, t: float) -> float:
    """log k_z(z) at |z| = e^t (positive series, phase-free)."""
    if t == -math.inf:
        return -float(tab.logc[0])
    l = _check_coverage(tab, 2.0 * t)
    m = float(np.max(l))
    return m + math.log(float(np.sum(np.exp(l - m))))


def kernel_values_pairwise(tab: KernelTable, za: PointSeq, zb: PointSeq):
    """Matrix of k(za_i, zb_j) as (logmag, phase) arrays, fully vectorized."""
    s = za.t[:, None] + zb.t[None, :]
    _check_coverage(tab, float(np.max(s)))
    dth = za.theta[:, None] - zb.theta[None, :]
    n = np.arange(len(tab), dtype=float)
    logmag = s[:, :, None] * n - tab.logc
    phase = dth[:, :, None] * n
    return log_sum_arrays(logmag, phase, axis=-1)


def kernel_estimate_audit(tab: KernelTable, t_grid) -> RatioBand:
    """Band of k_z(z) (1 + |z|^2) e^{-2 phi(z)} over a grid of log-moduli.

    A bounded band renders the two-sided kernel-norm estimate; the band is a
    committed regression quantity.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    vals = []
    for t in t_grid:
        g = kernel_diag_log(tab, t)
        g += 2.0 * t + math.log1p(math.exp(-2.0 * t)) if t > 0 else math.log1p(math.exp(2.0 * t))
        g -= 2.0 * tab.alpha * max(t, 0.0) ** 2
        vals.append(math.exp(g))
    return RatioBand.from_samples(vals, list(t_grid))


def discrete_norm2(tab: KernelTable, seq: PointSeq, fvals) -> float:
    """log of sum_lambda |f(lambda)|^2 / k_lambda(lambda).

    `fvals[i]` is f at the i-th point, as LogComplex.  Returns -inf for the
    zero data vector.
    """
    fvals = list(fvals)
    if len(fvals) != len(seq):
        raise ValueError(f"{len(fvals)} values for {len(seq)} points")
    terms = np.array([
        2.0 * f.logmag - kernel_diag_log(tab, p.t)
        for f, p in zip(fvals, seq.points)
    ])
    m = float(np.max(terms)) if len(terms) else -math.inf
    if m == -math.inf:
        return -math.inf
    return m + math.log(float(np.sum(np.exp(terms - m))))
