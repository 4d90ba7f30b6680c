"""Constructive completion/thinning to a sequence passing the basis test.

Everything happens in the scaled coordinate u = 2 alpha t, in which the
reference lattice sits at the integers and the annuli

    A_m = { u in [M m + 1/2, M (m+1) + 1/2) },     m >= 0,

each carry M lattice slots.  Groups of N consecutive annuli are balanced one
at a time:

* completion inserts one point per free slot, initially in the empty gap of
  the slot's own annulus, then walks single points to neighboring annuli
  until the group's deviation sum lies within +-2M (each step moves the sum
  by less than 2M, so the first crossing lands inside the band);
* thinning keeps exactly M points per annulus, choosing each annulus's
  subset to cancel the running deviation carry; group sums stay within 4M.

The binding acceptance is always the basis criterion re-run on the output;
the group-sum constants only steer the walk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .criterion import CriterionReport, check_riesz_f2
from .density import DensityError, default_offsets, densities
from .sequences import PointSeq, decompose, merge
from .weights import LogPoint, Weight, is_separated


class CompletionError(ValueError):
    pass


@dataclass(frozen=True)
class CompletionParams:
    """Block geometry for the group-balancing constructions.

    M is the per-annulus slot count, N the group length (N >= 3M so the
    thinning branch has room for its edge blocks), eta the minimum empty-gap
    width in t units.  n_groups overrides the number of groups derived from
    the data extent; it is required for empty input.
    """

    M: int
    N: int
    eta: float
    alpha: float
    n_groups: int | None = None

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("M must be >= 2")
        if self.N < 3 * self.M:
            raise ValueError("N must be >= 3 M")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class CompletionResult:
    augmented: PointSeq
    added: PointSeq
    group_sums_t: tuple[float, ...]
    trace: tuple[tuple, ...]
    min_drho: float
    n_groups: int
    params: CompletionParams

    def recheck(self, N_max: int) -> CriterionReport:
        return check_riesz_f2(self.augmented, self.params.alpha, N_max)


@dataclass(frozen=True)
class ThinningResult:
    kept: PointSeq
    removed: PointSeq
    group_sums_t: tuple[float, ...]
    trace: tuple[tuple, ...]
    min_drho: float
    n_groups: int
    params: CompletionParams

    def recheck(self, N_max: int) -> CriterionReport:
        return check_riesz_f2(self.kept, self.params.alpha, N_max)


# ----------------------------------------------------------------------------
# shared helpers

def _u_coords(seq: PointSeq, alpha: float) -> np.ndarray:
    u = 2.0 * alpha * seq.t
    if len(u) and u[0] <= 0.5:
        raise CompletionError(
            "points with 2 alpha t <= 1/2 sit below the first annulus and cannot be slotted")
    return u


def _annulus_of(u: np.ndarray, M: int) -> np.ndarray:
    return np.floor((u - 0.5) / M).astype(int)


def _annulus_bounds(m: int, M: int) -> tuple[float, float]:
    return M * m + 0.5, M * (m + 1) + 0.5


def _slot_values(m: int, M: int) -> range:
    """Integer u-slots of annulus m."""
    return range(M * m + 1, M * (m + 1) + 1)


def _density_estimate(seq: PointSeq, alpha: float) -> tuple[float, float] | None:
    """(d_minus, d_plus) over a default grid; None when the data is too short."""
    if len(seq) < 4:
        return None
    span = float(seq.t[-1] - seq.t[0])
    base = 4.0 / (2.0 * alpha)
    logR = [L for L in (base, 2 * base, 4 * base) if L < span / 2]
    if not logR:
        return None
    try:
        rep = densities(seq, logR, default_offsets(seq, max(logR), 65))
    except DensityError:
        return None
    return rep.d_minus, rep.d_plus


def _widest_gap(us_in_annulus: np.ndarray, u_lo: float, u_hi: float) -> tuple[float, float]:
    edges = np.concatenate(([u_lo], np.sort(us_in_annulus), [u_hi]))
    widths = np.diff(edges)
    k = int(np.argmax(widths))
    return float(edges[k]), float(edges[k + 1])


def _spread_angles(count: int) -> list[float]:
    # equal spacing, offset to dodge the common lattice angle 0
    return [math.pi * (2 * j + 1) / count - math.pi for j in range(count)]


# ----------------------------------------------------------------------------
# completion

def complete_to_ci(seq: PointSeq, alpha: float, params: CompletionParams) -> CompletionResult:
    """Insert points into empty gaps so the result passes the basis test.

    Requires an upper-density estimate strictly below 2 alpha, separation,
    at most M - 1 input points per annulus and an empty gap of width eta in
    each annulus covered by a group.
    """
    if abs(params.alpha - alpha) > 1e-12:
        raise CompletionError("params.alpha disagrees with alpha")
    M, N = params.M, params.N
    sep = is_separated(Weight(alpha), seq)
    if not sep.flag:
        raise CompletionError("input sequence is not d_rho-separated")
    if len(seq):
        est = _density_estimate(seq, alpha)
        if est is not None and est[1] >= 2.0 * alpha:
            raise CompletionError(
                f"upper-density estimate {est[1]:.4g} is not strictly below 2 alpha = {2 * alpha:.4g}")

    u = _u_coords(seq, alpha)
    if params.n_groups is not None:
        n_groups = params.n_groups
    elif len(u):
        n_groups = int((u[-1] - 0.5) // M) // N
    else:
        raise CompletionError("empty input needs an explicit n_groups")
    if n_groups < 1:
        raise CompletionError("data extent shorter than one group of annuli")

    n_annuli = n_groups * N
    ann_of = _annulus_of(u, M) if len(u) else np.empty(0, dtype=int)
    by_annulus: list[np.ndarray] = [np.nonzero(ann_of == m)[0] for m in range(n_annuli)]

    gap_center: list[float] = []
    free_slots: list[list[int]] = []
    for m in range(n_annuli):
        idx = by_annulus[m]
        if len(idx) >= M:
            raise CompletionError(f"annulus {m} holds {len(idx)} points, more than M - 1 = {M - 1}")
        u_lo, u_hi = _annulus_bounds(m, M)
        g_lo, g_hi = _widest_gap(u[idx], u_lo, u_hi)
        width_t = (g_hi - g_lo) / (2.0 * alpha)
        if width_t < max(params.eta, 0.01):
            raise CompletionError(
                f"no empty gap of t-width {max(params.eta, 0.01):.3g} in annulus {m} "
                f"(widest is {width_t:.3g}); shrink eta or refine the annulus geometry")
        gap_center.append(0.5 * (g_lo + g_hi))
        slots = list(_slot_values(m, M))
        free_slots.append(slots[len(idx):])

    trace: list[tuple] = []
    group_sums_u: list[float] = []
    added_by_annulus = [0] * n_annuli
    band = 2.0 * M

    for k in range(n_groups):
        annuli = list(range(k * N, (k + 1) * N))
        homes = [(m, s) for m in annuli for s in free_slots[m]]
        pos = [m for m, _ in homes]
        slot_sum = sum(sum(_slot_values(m, M)) for m in annuli)
        orig_sum = sum(float(np.sum(u[by_annulus[m]])) for m in annuli)
        cur = orig_sum + sum(gap_center[m] for m in pos) - slot_sum
        trace.append((k, 0, "home", -1, -1, cur))
        step = 0
        while abs(cur) > band:
            outward = cur < 0
            candidates = [
                i for i, m in enumerate(pos)
                if (m < annuli[-1] if outward else m > annuli[0])
            ]
            if not candidates:
                raise CompletionError(
                    f"group {k}: deviation sum {cur:.3g} unreachable within the band +-{band:.3g}")
            # move the least-displaced point first, preferring the highest slot,
            # to keep the configuration spread out
            def displacement(i: int) -> tuple:
                d = pos[i] - homes[i][0]
                return (d if outward else -d, -homes[i][1])

            i = min(candidates, key=displacement)
            m_from = pos[i]
            m_to = m_from + 1 if outward else m_from - 1
            cur += gap_center[m_to] - gap_center[m_from]
            pos[i] = m_to
            step += 1
            trace.append((k, step, homes[i][1], m_from, m_to, cur))
        group_sums_u.append(cur)
        for m in pos:
            added_by_annulus[m] += 1

    added_pts: list[LogPoint] = []
    for m in range(n_annuli):
        c = added_by_annulus[m]
        if c == 0:
            continue
        t = gap_center[m] / (2.0 * alpha)
        for th in _spread_angles(c):
            added_pts.append(LogPoint(t, th))
    added = PointSeq.from_values([p.t for p in added_pts], [p.theta for p in added_pts],
                                 {"generator": "completion_added", "params": {"M": M, "N": N}})
    augmented = merge(seq, added, meta={"generator": "completion_augmented",
                                        "params": {"M": M, "N": N, "alpha": alpha}})

    _verify_group_sums(augmented, alpha, M, N, n_groups, group_sums_u, band)
    out_sep = is_separated(Weight(alpha), augmented)
    if not out_sep.flag:
        raise CompletionError("augmented sequence lost separation")
    return CompletionResult(
        augmented=augmented,
        added=added,
        group_sums_t=tuple(s / (2.0 * alpha) for s in group_sums_u),
        trace=tuple(trace),
        min_drho=out_sep.d_min,
        n_groups=n_groups,
        params=params,
    )


def _verify_group_sums(seq: PointSeq, alpha: float, M: int, N: int, n_groups: int,
                       expected_u: list[float], band: float) -> None:
    """Cross-check walk bookkeeping against the re-indexed decomposition."""
    delta_u = 2.0 * alpha * decompose(seq, alpha).delta
    for k in range(n_groups):
        lo, hi = k * N * M, (k + 1) * N * M
        if hi > len(delta_u):
            raise CompletionError("output shorter than the group coverage; alignment lost")
        s = float(np.sum(delta_u[lo:hi]))
        if abs(s - expected_u[k]) > 1e-6 * max(1.0, abs(s)):
            raise CompletionError(
                f"group {k}: sorted-order group sum {s:.6g} disagrees with walk bookkeeping "
                f"{expected_u[k]:.6g}")
        if abs(s) > band + 1e-9:
            raise CompletionError(f"group {k}: |sum| = {abs(s):.4g} exceeds the {band:.4g} band")


# ----------------------------------------------------------------------------
# thinning

def _best_subset(us: np.ndarray, M: int, slot_sum: float, carry: float) -> np.ndarray:
    """Indices of the size-M subset minimizing |carry + sum(subset) - slot_sum|.

    Enumerates when feasible, otherwise starts from evenly spread order
    statistics and improves by single swaps.
    """
    l = len(us)
    order = np.argsort(us)
    if math.comb(l, M) <= 20000:
        best, best_val = None, math.inf
        for comb in combinations(range(l), M):
            v = abs(carry + float(np.sum(us[list(comb)])) - slot_sum)
            if v < best_val:
                best, best_val = comb, v
        return np.array(best, dtype=int)
    chosen = set(order[np.linspace(0, l - 1, M).round().astype(int)])
    improved = True
    while improved:
        improved = False
        cur = abs(carry + float(np.sum(us[list(chosen)])) - slot_sum)
        for i in list(chosen):
            for j in range(l):
                if j in chosen:
                    continue
                cand = (chosen - {i}) | {j}
                v = abs(carry + float(np.sum(us[list(cand)])) - slot_sum)
                if v < cur - 1e-12:
                    chosen, cur, improved = cand, v, True
                    break
            if improved:
                break
    return np.array(sorted(chosen), dtype=int)


def thin_to_ci(seq: PointSeq, alpha: float, params: CompletionParams) -> ThinningResult:
    """Keep M points per annulus, chosen to cancel the running deviation.

    Requires a lower-density estimate strictly above 2 alpha and at least
    M + 1 input points in every covered annulus.  Points beyond the covered
    annuli are kept untouched (they fall in the criterion's boundary cut).
    """
    if abs(params.alpha - alpha) > 1e-12:
        raise CompletionError("params.alpha disagrees with alpha")
    M, N = params.M, params.N
    sep = is_separated(Weight(alpha), seq)
    if not sep.flag:
        raise CompletionError("input sequence is not d_rho-separated")
    est = _density_estimate(seq, alpha)
    if est is None:
        raise CompletionError("sequence too short for a density estimate")
    if est[0] <= 2.0 * alpha:
        raise CompletionError(
            f"lower-density estimate {est[0]:.4g} is not strictly above 2 alpha = {2 * alpha:.4g}")

    u = _u_coords(seq, alpha)
    if params.n_groups is not None:
        n_groups = params.n_groups
    else:
        n_groups = int((u[-1] - 0.5) // M) // N
    if n_groups < 1:
        raise CompletionError("data extent shorter than one group of annuli")
    n_annuli = n_groups * N
    ann_of = _annulus_of(u, M)

    kept_idx: list[int] = []
    trace: list[tuple] = []
    group_sums_u: list[float] = []
    carry = 0.0
    for k in range(n_groups):
        group_start_carry = carry
        for m in range(k * N, (k + 1) * N):
            idx = np.nonzero(ann_of == m)[0]
            if len(idx) < M + 1:
                raise CompletionError(
                    f"annulus {m} holds {len(idx)} points, fewer than M + 1 = {M + 1}")
            slot_sum = float(sum(_slot_values(m, M)))
            sel = _best_subset(u[idx], M, slot_sum, carry)
            chosen = idx[sel]
            carry += float(np.sum(u[chosen])) - slot_sum
            kept_idx.extend(int(i) for i in chosen)
            trace.append((k, m, len(idx), M, carry))
        group_sums_u.append(carry - group_start_carry)
        if abs(group_sums_u[-1]) > 4.0 * M + 1e-9:
            raise CompletionError(
                f"group {k}: |sum| = {abs(group_sums_u[-1]):.4g} exceeds the 4M = {4 * M} band")

    tail = [int(i) for i in np.nonzero(ann_of >= n_annuli)[0]]
    kept_set = sorted(set(kept_idx) | set(tail))
    removed_set = [i for i in range(len(seq)) if i not in set(kept_set)]
    kept = PointSeq(tuple(seq.points[i] for i in kept_set),
                    {"generator": "thinning_kept", "params": {"M": M, "N": N, "alpha": alpha}})
    removed = PointSeq(tuple(seq.points[i] for i in removed_set),
                       {"generator": "thinning_removed"})
    out_sep = is_separated(Weight(alpha), kept)
    return ThinningResult(
        kept=kept,
        removed=removed,
        group_sums_t=tuple(s / (2.0 * alpha) for s in group_sums_u),
        trace=tuple(trace),
        min_drho=out_sep.d_min,
        n_groups=n_groups,
        params=params,
    )
