"""Annular counting and Beurling-type densities on the log-modulus axis.

Annuli A(r, R r) become intervals [t0, t0 + log R) in log-modulus.  The
iterated limits (R then r to infinity) of count / log R are rendered as
extrema over an explicit finite grid, with the inner extremum restricted to
the largest half of the admissible inner radii; the grid travels with the
report so every number is reproducible.  The critical density for this
weight is 2 alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sequences import PointSeq


class DensityError(ValueError):
    pass


@dataclass(frozen=True)
class DensityReport:
    d_minus: float
    d_plus: float
    logR_list: tuple[float, ...]
    r_offsets: tuple[float, ...]
    counts: np.ndarray           # shape (len(logR_list), len(r_offsets))
    admissible: np.ndarray       # same shape, bool
    tolerance: float             # grid resolution 1/min(logR)

    def to_json_dict(self) -> dict:
        return {
            "d_minus": self.d_minus,
            "d_plus": self.d_plus,
            "logR_list": list(self.logR_list),
            "r_offsets": list(self.r_offsets),
            "counts": self.counts.tolist(),
            "admissible": self.admissible.tolist(),
            "tolerance": self.tolerance,
        }


def annulus_count(seq: PointSeq, t_lo: float, t_hi: float) -> int:
    """Number of points with log-modulus in [t_lo, t_hi)."""
    if not t_lo < t_hi:
        raise DensityError(f"empty annulus [{t_lo}, {t_hi})")
    ts = seq.t
    return int(np.searchsorted(ts, t_hi, side="left") - np.searchsorted(ts, t_lo, side="left"))


def default_offsets(seq: PointSeq, max_logR: float, n_offsets: int = 33) -> list[float]:
    """Evenly spread inner radii leaving room for the widest annulus."""
    if len(seq) == 0:
        raise DensityError("empty sequence has no stored range")
    t0, t1 = float(seq.t[0]), float(seq.t[-1])
    hi = t1 - max_logR
    if hi <= t0:
        raise DensityError(f"stored range [{t0:.3g}, {t1:.3g}] shorter than log R = {max_logR:.3g}")
    return list(np.linspace(t0, hi, n_offsets))


def densities(seq: PointSeq, logR_list, r_offsets) -> DensityReport:
    """Lower/upper density surrogates over an explicit grid.

    d_minus = min over log R of min over the outer half of admissible inner
    radii of count / log R; d_plus is the max-max analogue.  Only annuli
    entirely inside the stored modulus range enter.
    """
    logR_list = [float(v) for v in logR_list]
    r_offsets = [float(v) for v in r_offsets]
    if not logR_list or not r_offsets:
        raise DensityError("empty density grid")
    if len(seq) == 0:
        counts = np.zeros((len(logR_list), len(r_offsets)), dtype=int)
        adm = np.zeros_like(counts, dtype=bool)
        return DensityReport(0.0, 0.0, tuple(logR_list), tuple(r_offsets), counts, adm,
                             1.0 / min(logR_list))
    t0, t1 = float(seq.t[0]), float(seq.t[-1])
    counts = np.zeros((len(logR_list), len(r_offsets)), dtype=int)
    adm = np.zeros_like(counts, dtype=bool)
    d_minus, d_plus = math.inf, -math.inf
    any_cell = False
    for i, L in enumerate(logR_list):
        if L <= 0:
            raise DensityError("log R values must be positive")
        ok = [j for j, off in enumerate(r_offsets) if off >= t0 and off + L <= t1]
        for j, off in enumerate(r_offsets):
            counts[i, j] = annulus_count(seq, off, off + L)
        if not ok:
            continue
        # inner extremum over the largest half of the admissible inner radii
        ok_sorted = sorted(ok, key=lambda j: r_offsets[j])
        outer = ok_sorted[(len(ok_sorted) - 1) // 2:]
        adm[i, outer] = True
        ratios = counts[i, outer] / L
        d_minus = min(d_minus, float(np.min(ratios)))
        d_plus = max(d_plus, float(np.max(ratios)))
        any_cell = True
    if not any_cell:
        raise DensityError("no admissible annulus inside the stored range")
    return DensityReport(d_minus, d_plus, tuple(logR_list), tuple(r_offsets),
                         counts, adm, 1.0 / min(logR_list))


def disk_density(seq: PointSeq, logR_list) -> float:
    """min over log R of Card{ |z| < R } / log R (liminf surrogate)."""
    logR_list = [float(v) for v in logR_list]
    if not logR_list:
        raise DensityError("empty logR list")
    if len(seq) == 0:
        return 0.0
    ts = seq.t
    vals = []
    for L in logR_list:
        if L <= 0:
            raise DensityError("log R values must be positive")
        vals.append(float(np.searchsorted(ts, L, side="left")) / L)
    return min(vals)


def rs_comparison_audit(interp: PointSeq, sampl: PointSeq, delta: float,
                        logR: float, logx_list) -> float:
    """Worst slack of the cardinality comparison between an interpolating and
    a sampling configuration.

    slack(x) = Card(S in A(delta x, R x / delta))
               - (1 - delta^2) Card(L in A(x, R x));
    a nonnegative minimum over the audited inner radii renders the
    comparison inequality on this grid.
    """
    if not 0.0 < delta < 1.0:
        raise DensityError("delta must lie in (0, 1)")
    if logR <= 0:
        raise DensityError("logR must be positive")
    logx_list = [float(v) for v in logx_list]
    if not logx_list:
        raise DensityError("empty audit grid")
    ld = math.log(delta)
    for x in logx_list:
        if not (interp.t[0] <= x and x + logR <= interp.t[-1]):
            raise DensityError(f"interpolating sequence does not cover [{x:.3g}, {x + logR:.3g}]")
        if not (sampl.t[0] <= x + ld and x + logR - ld <= sampl.t[-1]):
            raise DensityError(
                f"sampling sequence does not cover [{x + ld:.3g}, {x + logR - ld:.3g}]")
    worst = math.inf
    for x in logx_list:
        c_lam = annulus_count(interp, x, x + logR)
        c_s = annulus_count(sampl, x + ld, x + logR - ld)
        worst = min(worst, c_s - (1.0 - delta * delta) * c_lam)
    return worst
