"""High-dynamic-range scalars, stable summation, quadrature, Hermitian extremes.

Magnitudes in this package routinely reach exp(+-1e5), far outside double
range, so scalar values travel in log-polar form (:class:`LogComplex`) and
sums are rescaled by the dominant exponent before any exponentiation.  The
quadrature and eigenvalue routines are deliberately plain: the integrands we
meet are smooth log-polynomially modulated Gaussians and the matrices stay
small and dense.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

TAU = 2.0 * math.pi

#: Largest value d_rho-style formulas return before saturating.
SENTINEL = 1e300


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within the entrywise tolerance."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not converge within its subdivision budget."""


def wrap_phase(phase: float) -> float:
    """Reduce an angle to the canonical interval (-pi, pi]."""
    if not math.isfinite(phase):
        raise ValueError(f"non-finite phase {phase!r}")
    r = math.remainder(phase, TAU)
    # math.remainder lands in [-pi, pi]; fold the single excluded endpoint.
    return r + TAU if r <= -math.pi else r


def exp_guarded(x: float) -> float:
    """exp(x) that saturates to +inf instead of raising OverflowError."""
    if x > 709.0:
        return math.inf
    return math.exp(x)


@dataclass(frozen=True, slots=True)
class LogComplex:
    """A complex number stored as (log magnitude, phase).

    ``logmag = -inf`` encodes exactly zero (canonical phase 0).  The value is
    absorbing under multiplication and neutral under addition.
    """

    logmag: float
    phase: float = 0.0

    def __post_init__(self):
        if math.isnan(self.logmag):
            raise ValueError("logmag is NaN")
        if self.logmag == -math.inf:
            object.__setattr__(self, "phase", 0.0)
        else:
            object.__setattr__(self, "phase", wrap_phase(self.phase))

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(-math.inf, 0.0)

    @classmethod
    def one(cls) -> "LogComplex":
        return cls(0.0, 0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        z = complex(z)
        if z == 0:
            return cls.zero()
        return cls(math.log(abs(z)), math.atan2(z.imag, z.real))

    @classmethod
    def from_real(cls, x: float) -> "LogComplex":
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), 0.0 if x > 0 else math.pi)

    # -- queries -----------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.logmag == -math.inf

    def to_complex(self) -> complex:
        """Materialize as an ordinary complex number.

        Raises OverflowError beyond double range; callers that only need
        order relations should stay in log form.
        """
        if self.logmag > 709.0:
            raise OverflowError(f"magnitude exp({self.logmag:.6g}) exceeds double range")
        m = math.exp(self.logmag) if self.logmag > -math.inf else 0.0
        return complex(m * math.cos(self.phase), m * math.sin(self.phase))

    def __abs__(self) -> float:
        return exp_guarded(self.logmag) if not self.is_zero else 0.0

    # -- arithmetic ---------------------------------------------------------
    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(self.logmag + other.logmag, self.phase + other.phase)

    def __truediv__(self, other: "LogComplex") -> "LogComplex":
        if other.is_zero:
            raise ZeroDivisionError("division by LogComplex zero")
        if self.is_zero:
            return LogComplex.zero()
        return LogComplex(self.logmag - other.logmag, self.phase - other.phase)

    def __neg__(self) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(self.logmag, self.phase + math.pi)

    def __add__(self, other: "LogComplex") -> "LogComplex":
        return log_sum((self, other))

    def conjugate(self) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(self.logmag, -self.phase)

    def pow_int(self, n: int) -> "LogComplex":
        if self.is_zero:
            if n == 0:
                return LogComplex.one()
            if n < 0:
                raise ZeroDivisionError("negative power of zero")
            return self
        return LogComplex(n * self.logmag, n * self.phase)

    def scaled(self, log_factor: float) -> "LogComplex":
        """Multiply by a positive real given through its logarithm."""
        if self.is_zero:
            return self
        return LogComplex(self.logmag + log_factor, self.phase)


def _cos_sin(phase: float) -> tuple[float, float]:
    """cos/sin with exact values on the axes, so that real and imaginary
    combinations cancel to exact zero."""
    if phase == 0.0:
        return 1.0, 0.0
    if phase == math.pi:
        return -1.0, 0.0
    if phase == 0.5 * math.pi:
        return 0.0, 1.0
    if phase == -0.5 * math.pi:
        return 0.0, -1.0
    return math.cos(phase), math.sin(phase)


def log_sum(terms: Iterable[LogComplex]) -> LogComplex:
    """Sum of LogComplex values, rescaled by the dominant magnitude.

    Cancellation down to exact zero returns the canonical zero value.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("log_sum of an empty list")
    m = max(t.logmag for t in terms)
    if m == -math.inf:
        return LogComplex.zero()
    parts = [(math.exp(t.logmag - m), *_cos_sin(t.phase)) for t in terms if not t.is_zero]
    re = math.fsum(w * c for w, c, _ in parts)
    im = math.fsum(w * s for w, _, s in parts)
    r = math.hypot(re, im)
    if r == 0.0:
        return LogComplex.zero()
    return LogComplex(m + math.log(r), math.atan2(im, re))


def log_sum_arrays(logmag: np.ndarray, phase: np.ndarray, axis: int = -1):
    """Vectorized complex log-sum-exp along `axis`.

    Returns a pair of arrays (logmag, phase) of the reduced shape.  Slices
    that sum to zero come back with logmag -inf and phase 0.
    """
    logmag = np.asarray(logmag, dtype=float)
    phase = np.asarray(phase, dtype=float)
    m = np.max(logmag, axis=axis, keepdims=True)
    safe_m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore"):
        w = np.exp(logmag - safe_m)
    w = np.where(logmag == -np.inf, 0.0, w)
    re = np.sum(w * np.cos(phase), axis=axis)
    im = np.sum(w * np.sin(phase), axis=axis)
    r = np.hypot(re, im)
    with np.errstate(divide="ignore"):
        out_log = np.squeeze(safe_m, axis=axis) + np.log(r)
    out_log = np.where(np.squeeze(m, axis=axis) == -np.inf, -np.inf, out_log)
    out_phase = np.arctan2(im, re)
    return out_log, out_phase


@dataclass(frozen=True)
class RatioBand:
    """min/max of a positive quantity over a sample grid.

    Numerical rendering of a two-sided comparability claim: the claim holds
    on the grid iff both ends are finite and positive, and `ratio` measures
    how tight it is.
    """

    lo: float
    hi: float
    argmin: object = None
    argmax: object = None

    @property
    def ratio(self) -> float:
        if self.lo <= 0:
            return math.inf
        return self.hi / self.lo

    @classmethod
    def from_samples(cls, values: Sequence[float], labels: Sequence[object] | None = None) -> "RatioBand":
        values = list(values)
        if not values:
            raise ValueError("RatioBand of an empty sample")
        i_min = min(range(len(values)), key=values.__getitem__)
        i_max = max(range(len(values)), key=values.__getitem__)
        lab = labels if labels is not None else list(range(len(values)))
        return cls(values[i_min], values[i_max], lab[i_min], lab[i_max])


def hermitian_extremes(H: np.ndarray, tol: float = 1e-10) -> tuple[float, float]:
    """Extreme eigenvalues (lambda_min, lambda_max) of a Hermitian matrix.

    The input must be Hermitian to 1e-12 entrywise (relative to its largest
    entry) and of dimension <= 4096.  A full symmetric decomposition is used;
    its accuracy exceeds any `tol` we ever request at these sizes.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    n = H.shape[0]
    if n > 4096:
        raise ValueError(f"dimension {n} exceeds the dense-solver limit 4096")
    scale = max(1.0, float(np.max(np.abs(H)))) if n else 1.0
    dev = float(np.max(np.abs(H - H.conj().T))) if n else 0.0
    if dev > 1e-12 * scale:
        raise NonHermitianError(f"Hermitian deviation {dev:.3e} exceeds 1e-12 * {scale:.3e}")
    try:
        w = np.linalg.eigvalsh(H)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise QuadratureError(f"eigensolver failed to converge: {exc}") from None
    return float(w[0]), float(w[-1])


# ----------------------------------------------------------------------------
# Adaptive Gauss-Kronrod quadrature (7-15 pair)

_XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
)
_WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
)
_WGK_CENTER = 0.209482141084727828012999174891714
_WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
)
_WG_CENTER = 0.417959183673469387755102040816327


def _gk15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One Gauss-Kronrod 7-15 panel: (integral, error estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    resk = _WGK_CENTER * fc
    resg = _WG_CENTER * fc
    for i in range(7):
        x = h * _XGK[i]
        f1 = f(c - x)
        f2 = f(c + x)
        resk += _WGK[i] * (f1 + f2)
        if i in (1, 3, 5):
            resg += _WG[(i - 1) // 2] * (f1 + f2)
    d = abs(resk - resg)
    # (200 d)^1.5 < 200 d exactly when 200 d < 1; branching avoids pow overflow
    err = abs(h) * ((200.0 * d) ** 1.5 if 200.0 * d < 1.0 else 200.0 * d)
    return resk * h, err


def _adaptive_finite(f, a: float, b: float, tol: float, budget: int = 2000) -> float:
    val, err = _gk15(f, a, b)
    heap = [(-err, a, b, val)]
    total, toterr = val, err
    while toterr > tol * (1.0 + abs(total)):
        if len(heap) >= budget:
            raise QuadratureError(
                f"no convergence after {budget} panels (err {toterr:.3e}, tol {tol:.3e})"
            )
        nege, pa, pb, pval = heapq.heappop(heap)
        total -= pval
        toterr += nege
        mid = 0.5 * (pa + pb)
        for qa, qb in ((pa, mid), (mid, pb)):
            v, e = _gk15(f, qa, qb)
            total += v
            toterr += e
            heapq.heappush(heap, (-e, qa, qb, v))
    return total


def adaptive_quadrature(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Integral of f over [a, b] with estimated error <= tol * (1 + |result|).

    ``b = inf`` is handled through the substitution x = a + e^t - 1 followed
    by piecewise integration in t; the integrands this package produces decay
    like Gaussians in t, so the extension terminates quickly.
    """
    if not a < b:
        raise ValueError(f"empty or inverted interval [{a}, {b}]")
    if math.isinf(b):
        def g(t: float) -> float:
            return f(a + math.expm1(t)) * math.exp(t)

        total = 0.0
        quiet = 0
        t0 = 0.0
        step = 8.0
        while t0 < 480.0:
            piece = _adaptive_finite(g, t0, t0 + step, tol / 8.0)
            total += piece
            t0 += step
            if abs(piece) <= tol * (1.0 + abs(total)) / 8.0:
                quiet += 1
                if quiet >= 2:
                    return total
            else:
                quiet = 0
        raise QuadratureError("semi-infinite integral did not settle by t = 480")
    return _adaptive_finite(f, a, b, tol)
