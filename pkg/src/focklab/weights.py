"""Radial weight, local density scale, semi-metric, separation tests.

The weight is phi(z) = alpha * (log+ |z|)^2.  Its Laplacian density scale is
rho(r) = r / sqrt(2 alpha) away from the unit disk, which specializes the
generic semi-metric to

    d_rho(z, w) = sqrt(2a) |z - w| / (sqrt(2a) + min(|z|, |w|)).

Points are carried in log-polar form so that moduli up to exp(1e5) stay
exact; d_rho values beyond 1e300 saturate at that sentinel (only order
relations matter at that scale).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .numerics import SENTINEL, exp_guarded, wrap_phase


@dataclass(frozen=True, slots=True)
class LogPoint:
    """A point z = exp(t + i theta); t = -inf encodes the origin."""

    t: float
    theta: float = 0.0

    def __post_init__(self):
        if math.isnan(self.t):
            raise ValueError("log-modulus is NaN")
        object.__setattr__(self, "theta", wrap_phase(self.theta))

    @property
    def modulus(self) -> float:
        return exp_guarded(self.t) if self.t > -math.inf else 0.0

    def to_complex(self) -> complex:
        if self.t > 709.0:
            raise OverflowError(f"modulus exp({self.t:.6g}) exceeds double range")
        m = self.modulus
        return complex(m * math.cos(self.theta), m * math.sin(self.theta))

    def rotated(self, dtheta: float) -> "LogPoint":
        return LogPoint(self.t, self.theta + dtheta)


@dataclass(frozen=True)
class SeparationReport:
    flag: bool
    d_min: float
    witness: tuple[int, int] | None


@dataclass(frozen=True)
class Weight:
    """The radial weight alpha * (log+ r)^2 and its geometry."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive real, got {self.alpha!r}")

    @property
    def sqrt2a(self) -> float:
        return math.sqrt(2.0 * self.alpha)

    def phi_log(self, t: float) -> float:
        """phi at |z| = e^t; zero inside the closed unit disk."""
        if t <= 0.0:
            return 0.0
        return self.alpha * t * t

    def phi(self, p: LogPoint) -> float:
        return self.phi_log(p.t)

    def d_rho(self, p: LogPoint, q: LogPoint) -> float:
        """Semi-metric distance, overflow-free.

        With s = min(t), g = max(t) - s the exact value is
        sqrt(2a) * e^s * |e^(g + i dtheta) - 1| / (sqrt(2a) + e^s);
        for g > 40 the chord saturates to e^g and the result is capped at
        the 1e300 sentinel.
        """
        s, g_hi = (p.t, q.t) if p.t <= q.t else (q.t, p.t)
        if s == -math.inf:
            # distance from the origin: d = |other point|
            return min(exp_guarded(g_hi), SENTINEL)
        gap = g_hi - s
        dtheta = p.theta - q.theta
        # e^s / (sqrt2a + e^s), stable for every s
        frac = 1.0 / (1.0 + self.sqrt2a * exp_guarded(-s))
        if gap > 40.0:
            val = self.sqrt2a * frac * exp_guarded(min(gap, 690.0))
            return min(val, SENTINEL)
        chord = math.hypot(math.expm1(gap), 2.0 * math.exp(0.5 * gap) * math.sin(0.5 * dtheta))
        return min(self.sqrt2a * frac * chord, SENTINEL)

    def _radial_lower_bound(self, t_lo: float, t_hi: float) -> float:
        """Lower bound for d_rho between points at these log-moduli."""
        gap = t_hi - t_lo
        if gap >= 690.0:
            return math.inf
        frac = 1.0 / (1.0 + self.sqrt2a * exp_guarded(-t_lo))
        return self.sqrt2a * frac * math.expm1(gap)


def is_separated(weight: Weight, seq) -> SeparationReport:
    """Minimum pairwise d_rho of a modulus-ordered finite sequence.

    The scan walks each point's successors and stops as soon as the radial
    lower bound sqrt(2a)(e^{t_j} - e^{t_i})/(sqrt(2a) + e^{t_i}) exceeds the
    current minimum; the bound is monotone in t_j, so skipped pairs can never
    attain the minimum.  Agrees with the all-pairs scan, in O(n) on
    geometric sequences.
    """
    pts: Sequence[LogPoint] = list(getattr(seq, "points", seq))
    n = len(pts)
    if n < 2:
        return SeparationReport(True, math.inf, None)
    best = math.inf
    witness: tuple[int, int] | None = None
    # seed with modulus-adjacent pairs to make the early-stop bound effective
    for i in range(n - 1):
        d = weight.d_rho(pts[i], pts[i + 1])
        if d < best:
            best, witness = d, (i, i + 1)
    for i in range(n - 1):
        for j in range(i + 1, n):
            if weight._radial_lower_bound(pts[i].t, pts[j].t) >= best:
                break
            d = weight.d_rho(pts[i], pts[j])
            if d < best:
                best, witness = d, (i, j)
    return SeparationReport(best > 0.0, best, witness)
