"""Point sequences: the reference lattice, perturbation coordinates, gallery.

A sequence is a finite modulus-ordered list of log-polar points.  Against the
reference lattice with log-moduli (n+1)/(2 alpha) every sequence decomposes
into radial deviations delta_n and angles theta_n; that decomposition is the
coordinate system all the basis criteria run in.

The gallery holds the standard stress configurations: the two-sided geometric
set (log-moduli n/a on both half-axes), its completion by the two unit
points, and radially shifted / block-modulated one-sided lattices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .weights import LogPoint


@dataclass(frozen=True)
class PointSeq:
    """Finite modulus-ordered point list with a provenance tag."""

    points: tuple[LogPoint, ...]
    meta: Mapping = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        for a, b in zip(pts, pts[1:]):
            if b.t < a.t:
                raise ValueError("points must be ordered by nondecreasing log-modulus")

    @classmethod
    def from_values(cls, ts: Iterable[float], thetas: Iterable[float], meta: Mapping | None = None) -> "PointSeq":
        pairs = sorted(zip(ts, thetas), key=lambda p: (p[0], p[1]))
        return cls(tuple(LogPoint(t, th) for t, th in pairs), dict(meta or {}))

    # -- container protocol --------------------------------------------------
    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[LogPoint]:
        return iter(self.points)

    def __getitem__(self, i: int) -> LogPoint:
        return self.points[i]

    # -- array views ----------------------------------------------------------
    @cached_property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.points], dtype=float)

    @cached_property
    def theta(self) -> np.ndarray:
        return np.array([p.theta for p in self.points], dtype=float)

    # -- derived sequences ------------------------------------------------------
    def head(self, n: int) -> "PointSeq":
        return PointSeq(self.points[:n], {**self.meta, "head": n})

    def without(self, index: int) -> "PointSeq":
        if not 0 <= index < len(self):
            raise IndexError(f"drop index {index} out of range 0..{len(self) - 1}")
        pts = self.points[:index] + self.points[index + 1:]
        return PointSeq(pts, {**self.meta, "dropped_index": index})

    def rotated(self, dtheta: float) -> "PointSeq":
        return PointSeq(tuple(p.rotated(dtheta) for p in self.points),
                        {**self.meta, "rotated_by": dtheta})


def merge(*seqs: PointSeq, meta: Mapping | None = None) -> PointSeq:
    pts = sorted((p for s in seqs for p in s.points), key=lambda p: (p.t, p.theta))
    return PointSeq(tuple(pts), dict(meta or {"generator": "merge"}))


@dataclass(frozen=True)
class PerturbationCoords:
    """Radial deviations and angles of a sequence against the reference lattice.

    Reconstruction is exact: point n has log-modulus (n+1)/(2 alpha) + delta[n]
    and angle theta[n].
    """

    delta: np.ndarray
    theta: np.ndarray
    alpha: float

    def compose(self, meta: Mapping | None = None) -> PointSeq:
        ts = reference_log_moduli(self.alpha, len(self.delta)) + self.delta
        pts = tuple(LogPoint(t, th) for t, th in zip(ts, self.theta))
        return PointSeq(pts, dict(meta or {"generator": "compose"}))


def reference_log_moduli(alpha: float, n_points: int) -> np.ndarray:
    return (np.arange(n_points, dtype=float) + 1.0) / (2.0 * alpha)


def _angles_from_rule(rule, n_points: int) -> np.ndarray:
    if rule is None:
        return np.zeros(n_points)
    if np.isscalar(rule):
        return np.full(n_points, float(rule))
    arr = np.asarray(rule, dtype=float)
    if arr.shape != (n_points,):
        raise ValueError(f"angle list has length {arr.size}, expected {n_points}")
    return arr


def reference_gamma(alpha: float, n_max: int, angles=None) -> PointSeq:
    """The reference lattice: log-moduli (n+1)/(2 alpha), n = 0..n_max.

    `angles` is an angle rule: None or a scalar for a common angle, or an
    explicit list of length n_max + 1.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    ts = reference_log_moduli(alpha, n_max + 1)
    ths = _angles_from_rule(angles, n_max + 1)
    meta = {"generator": "reference", "params": {"alpha": alpha, "n_max": n_max}}
    return PointSeq(tuple(LogPoint(t, th) for t, th in zip(ts, ths)), meta)


def decompose(seq: PointSeq, alpha: float) -> PerturbationCoords:
    """delta_n = t_n - (n+1)/(2 alpha); angles pass through unchanged."""
    delta = seq.t - reference_log_moduli(alpha, len(seq))
    return PerturbationCoords(delta=delta, theta=seq.theta.copy(), alpha=alpha)


def compose(coords: PerturbationCoords, meta: Mapping | None = None) -> PointSeq:
    return coords.compose(meta)


# ----------------------------------------------------------------------------
# Gallery of stress configurations

GALLERY_NAMES = ("two_sided", "gamma2", "critical_shift", "constant_shift", "avdonin_blocks")


def golden_angles(n_points: int) -> np.ndarray:
    """Golden-angle spiral rule; the generic well-spread angle choice."""
    return np.arange(n_points) * (math.pi * (3.0 - math.sqrt(5.0)))


def gallery(name: str, alpha: float, n_max: int, **params) -> PointSeq:
    """Named stress configurations.

    two_sided        log-moduli n/alpha (n = 1..n_max), one point at angle 0
                     and one at angle pi per modulus
    gamma2           two_sided plus the two unit points +-1
    critical_shift   one-sided lattice shifted radially by delta
                     (default delta = 1/(4 alpha), the threshold case)
    constant_shift   same with mandatory shift d
    avdonin_blocks   delta alternating +-d over index blocks of length `block`
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    meta = {"generator": name, "params": {"alpha": alpha, "n_max": n_max, **params}}

    if name == "two_sided":
        base_angles = _angles_from_rule(params.get("angles"), n_max)
        ts, ths = [], []
        for n in range(1, n_max + 1):
            t = n / alpha
            th = float(base_angles[n - 1])
            ts.extend((t, t))
            ths.extend((th, th + math.pi))
        return PointSeq.from_values(ts, ths, meta)

    if name == "gamma2":
        base = gallery("two_sided", alpha, n_max, **params)
        unit = PointSeq.from_values([0.0, 0.0], [0.0, math.pi], {})
        return PointSeq(merge(base, unit).points, meta)

    if name in ("critical_shift", "constant_shift"):
        if name == "critical_shift":
            shift = params.get("delta", 1.0 / (4.0 * alpha))
        else:
            try:
                shift = params["d"]
            except KeyError:
                raise ValueError("constant_shift requires parameter d") from None
        ts = reference_log_moduli(alpha, n_max + 1) + float(shift)
        ths = _angles_from_rule(params.get("angles"), n_max + 1)
        return PointSeq.from_values(ts, ths, meta)

    if name == "avdonin_blocks":
        d = float(params.get("d", 0.4))
        block = int(params.get("block", 8))
        if block < 1:
            raise ValueError("block length must be >= 1")
        n = np.arange(n_max + 1)
        delta = np.where((n // block) % 2 == 0, d, -d)
        ts = reference_log_moduli(alpha, n_max + 1) + delta
        ths = _angles_from_rule(params.get("angles"), n_max + 1)
        return PointSeq.from_values(ts, ths, meta)

    raise ValueError(f"unknown gallery name {name!r}; choose from {GALLERY_NAMES}")


# ----------------------------------------------------------------------------
# JSON wire format

def to_json_dict(seq: PointSeq, alpha: float | None = None) -> dict:
    d: dict = {"points": [{"t": p.t, "theta": p.theta} for p in seq.points]}
    if alpha is not None:
        d["alpha"] = alpha
    return d


def from_json_dict(d: Mapping, default_alpha: float | None = None) -> PointSeq:
    """Sequence literal {"points": [...]} or generator shorthand
    {"generator": name, "params": {...}}."""
    if "generator" in d:
        params = dict(d.get("params", {}))
        alpha = params.pop("alpha", default_alpha)
        if alpha is None:
            raise ValueError("generator shorthand needs alpha (inline or from context)")
        name = d["generator"]
        n_max = int(params.pop("n_max"))
        if name == "reference":
            return reference_gamma(alpha, n_max, params.pop("angles", None))
        return gallery(name, alpha, n_max, **params)
    pts = d["points"]
    return PointSeq.from_values(
        [p["t"] for p in pts], [p.get("theta", 0.0) for p in pts],
        {"generator": "literal"},
    )
