"""Gram sections, biorthogonal transfer matrices, interpolation operators.

Finite sections of the normalized-kernel Gram matrix render the two-sided
basis bounds: bounded condition numbers across growing sections indicate a
stable kernel basis, a collapsing smallest eigenvalue indicates failure.
The transfer matrix between the reference-lattice kernels and a perturbed
family is computed entrywise from the canonical product and its derivative;
off-diagonal decay of that matrix is the quantitative form of the window
criterion.  Lagrange-type interpolation built on the same product gives the
explicit operators, for the Hilbert and the uniform norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criterion import CriterionReport, check_ci_finfty
from .genfun import GenFun
from .kernel import KernelTable, discrete_norm2, kernel_diag_log, kernel_value, kernel_values_pairwise
from .numerics import LogComplex, RatioBand, hermitian_extremes, log_sum, wrap_phase
from .sequences import PointSeq
from .weights import LogPoint, Weight, is_separated

DEFAULT_SEED = 0x5EED

#: transfer-matrix entries above this log-magnitude mark the section unbounded
ENTRY_LOGMAG_LIMIT = 40.0


class FramesError(ValueError):
    pass


# ----------------------------------------------------------------------------
# Gram sections

@dataclass(frozen=True)
class GramSection:
    indices: tuple[int, int]
    matrix: np.ndarray
    lambda_min: float
    lambda_max: float

    @property
    def cond(self) -> float:
        if self.lambda_min <= 0:
            return math.inf
        return self.lambda_max / self.lambda_min


def gram_section(tab: KernelTable, seq: PointSeq, i_lo: int, i_hi: int) -> GramSection:
    """Gram matrix of normalized kernels on points i_lo..i_hi-1.

    Normalized entries have log-magnitude <= 0 (Cauchy-Schwarz), so the
    section materializes exactly in ordinary arithmetic.
    """
    if not (0 <= i_lo < i_hi <= len(seq)):
        raise FramesError(f"bad section [{i_lo}, {i_hi}) for {len(seq)} points")
    if i_hi - i_lo > 512:
        raise FramesError("section size capped at 512")
    sub = PointSeq(seq.points[i_lo:i_hi], {})
    logmag, phase = kernel_values_pairwise(tab, sub, sub)
    diag = np.diag(logmag)
    norm_log = logmag - 0.5 * (diag[:, None] + diag[None, :])
    norm_log = np.minimum(norm_log, 0.0)
    G = np.exp(norm_log) * np.exp(1j * phase)
    G = 0.5 * (G + G.conj().T)
    np.fill_diagonal(G, 1.0)
    lmin, lmax = hermitian_extremes(G)
    return GramSection((i_lo, i_hi), G, lmin, lmax)


@dataclass(frozen=True)
class TrendRow:
    size: int
    lambda_min: float
    lambda_max: float
    cond: float


def riesz_trend(tab: KernelTable, seq: PointSeq, sizes) -> list[TrendRow]:
    """Gram extremes over nested leading sections.

    By eigenvalue interlacing lambda_min is nonincreasing and lambda_max
    nondecreasing in the section size; the trend separates bounded bases
    from degenerating families.
    """
    sizes = sorted(int(s) for s in sizes)
    if sizes and sizes[-1] > len(seq):
        raise FramesError(f"largest size {sizes[-1]} exceeds sequence length {len(seq)}")
    rows = []
    for s in sizes:
        g = gram_section(tab, seq, 0, s)
        rows.append(TrendRow(s, g.lambda_min, g.lambda_max, g.cond))
    return rows


# ----------------------------------------------------------------------------
# Log-polar difference and Lagrange machinery

def point_diff(a: LogPoint, b: LogPoint) -> LogComplex:
    """a - b as LogComplex, overflow-free (rescaled by the larger modulus)."""
    hi = max(a.t, b.t)
    if hi == -math.inf:
        return LogComplex.zero()
    za = math.exp(a.t - hi) * complex(math.cos(a.theta), math.sin(a.theta))
    zb = math.exp(b.t - hi) * complex(math.cos(b.theta), math.sin(b.theta))
    d = za - zb
    if d == 0:
        return LogComplex.zero()
    return LogComplex(hi + math.log(abs(d)), math.atan2(d.imag, d.real))


def _lagrange_eval(F: GenFun, fprimes: list[LogComplex], values: list[LogComplex],
                   z: LogPoint) -> LogComplex:
    """sum_n v_n F(z) / (F'(lambda_n) (z - lambda_n)) with exact node handling."""
    nodes = F.zeros
    for j, p in enumerate(nodes):
        if p.t == z.t and p.theta == z.theta:
            return values[j]
    res = F.eval(z)
    if res.is_exact_zero:  # pragma: no cover - coincidence caught above
        return values[res.zero_index]
    terms = []
    for n, lam in enumerate(nodes):
        if values[n].is_zero:
            continue
        terms.append(values[n] / (fprimes[n] * point_diff(z, lam)))
    if not terms:
        return LogComplex.zero()
    return res.value * log_sum(terms)


# ----------------------------------------------------------------------------
# Biorthogonal transfer matrix

@dataclass(frozen=True)
class BiorthMatrix:
    lattice: PointSeq
    target: PointSeq
    size: int
    logmag: np.ndarray      # (size, size); [n, m] couples target n to lattice m
    phase: np.ndarray
    unbounded: bool
    opnorm2: float | None

    def entry(self, n: int, m: int) -> LogComplex:
        if self.logmag[n, m] == -math.inf:
            return LogComplex.zero()
        return LogComplex(float(self.logmag[n, m]), float(self.phase[n, m]))

    def abs_matrix(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(np.minimum(self.logmag, 700.0))


def biorth_matrix(tab: KernelTable, lattice: PointSeq, target: PointSeq, size: int) -> BiorthMatrix:
    """Transfer matrix A[n, m] = F(g_m) / (F'(l_n)(g_m - l_n)) * ||k_{l_n}|| / ||k_{g_m}||.

    F is the canonical product over the full stored target, so the section
    sees realistic tails.  Lattice points landing exactly on a target zero
    take the limit value (1 on the matching index, 0 elsewhere).  Entries
    with log-magnitude above 40 flag the section as unbounded and skip the
    operator-norm computation.
    """
    if size > min(len(lattice), len(target)):
        raise FramesError(f"size {size} exceeds stored lengths "
                          f"({len(lattice)}, {len(target)})")
    F = GenFun(target, tab.alpha)
    fprimes = [F.derivative_at_zero(n) for n in range(size)]
    fvals = [F.eval(lattice[m]) for m in range(size)]
    diag_t = np.array([kernel_diag_log(tab, p.t) for p in target.points[:size]])
    diag_g = np.array([kernel_diag_log(tab, p.t) for p in lattice.points[:size]])

    logmag = np.full((size, size), -np.inf)
    phase = np.zeros((size, size))
    for m in range(size):
        fv = fvals[m]
        if fv.is_exact_zero:
            j = fv.zero_index
            if j is not None and j < size:
                logmag[j, m], phase[j, m] = 0.0, 0.0
            continue
        for n in range(size):
            d = point_diff(lattice[m], target[n])
            if d.is_zero:  # pragma: no cover - implies an exact zero of F
                raise FramesError(f"lattice point {m} coincides with target point {n}")
            e = fv.value / (fprimes[n] * d)
            e = e.scaled(0.5 * (diag_t[n] - diag_g[m]))
            logmag[n, m], phase[n, m] = e.logmag, e.phase
    unbounded = bool(np.max(logmag) > ENTRY_LOGMAG_LIMIT)
    opnorm = None
    if not unbounded:
        A = np.exp(logmag) * np.exp(1j * phase)
        opnorm = float(np.linalg.norm(A, 2))
    return BiorthMatrix(lattice, target, size, logmag, phase, unbounded, opnorm)


def offdiag_decay_fit(bi: BiorthMatrix) -> tuple[float, float]:
    """Fit max_{|n-m|=d} |A| <= C e^{-kappa d}; returns (C, kappa)."""
    size = bi.size
    ds, vals = [], []
    for d in range(1, size):
        band = [bi.logmag[n, n + d] for n in range(size - d)]
        band += [bi.logmag[n + d, n] for n in range(size - d)]
        v = max(band)
        if v > -math.inf:
            ds.append(d)
            vals.append(v)
    if len(ds) < 2:
        raise FramesError("not enough finite off-diagonal entries to fit a decay rate")
    coeffs = np.polyfit(np.array(ds, dtype=float), np.array(vals), 1)
    return math.exp(float(coeffs[1])), -float(coeffs[0])


# ----------------------------------------------------------------------------
# Interpolation operators

def interpolate_f2(tab: KernelTable, target: PointSeq, values, eval_at) -> list[LogComplex]:
    """Lagrange interpolation f(z) = sum_n v_n F(z) / (F'(lambda_n)(z - lambda_n)).

    Matches the data exactly on the nodes; evaluation at a node returns the
    node value itself.  The node set must be d_rho-separated.
    """
    values = list(values)
    if len(values) != len(target):
        raise FramesError(f"{len(values)} values for {len(target)} nodes")
    if not is_separated(Weight(tab.alpha), target).flag:
        raise FramesError("interpolation nodes are not d_rho-separated")
    F = GenFun(target, tab.alpha)
    fprimes = [F.derivative_at_zero(n) for n in range(len(target))]
    return [_lagrange_eval(F, fprimes, values, z) for z in eval_at]


@dataclass(frozen=True)
class NormControlAudit:
    worst_ratio: float
    ratios: tuple[float, ...]
    seed: int


def f2_norm_control_audit(tab: KernelTable, reference: PointSeq, target: PointSeq,
                          trials: int = 20, seed: int = DEFAULT_SEED) -> NormControlAudit:
    """Discrete space-norm of the interpolant against the weighted data norm.

    Data vectors are complex Gaussians in the weighted little-ell-2 geometry
    (v_n = xi_n ||k_{lambda_n}||); the interpolant's norm is taken as the
    discrete norm over the reference grid, which should be about 3x longer
    than the node set.
    """
    rng = np.random.default_rng(seed)
    diag = [kernel_diag_log(tab, p.t) for p in target.points]
    ratios = []
    for _ in range(trials):
        xi = rng.standard_normal(len(target)) + 1j * rng.standard_normal(len(target))
        v = [LogComplex(0.5 * diag[n] + math.log(abs(xi[n])), math.atan2(xi[n].imag, xi[n].real))
             for n in range(len(target))]
        log_vnorm = float(np.log(np.sum(np.abs(xi) ** 2)))
        fvals = interpolate_f2(tab, target, v, reference.points)
        log_fnorm = discrete_norm2(tab, reference, fvals)
        ratios.append(math.exp(log_fnorm - log_vnorm))
    return NormControlAudit(max(ratios), tuple(ratios), seed)


@dataclass(frozen=True)
class InftyInterpolation:
    values: tuple[LogComplex, ...]
    sup_weighted: float
    gate: CriterionReport


def interpolate_finfty(tab: KernelTable, target_aug: PointSeq, values, eval_at,
                       gate_N: int = 16, drop: int = 0) -> InftyInterpolation:
    """Uniform-norm interpolation on a one-point-augmented node set.

    The augmented set must pass the basis criterion after dropping the
    designated point; otherwise the construction is rejected.  Returns the
    interpolant values and the weighted sup |f| e^{-phi} over the evaluation
    grid.
    """
    gate = check_ci_finfty(target_aug, tab.alpha, gate_N, drop)
    if not gate.passed:
        raise FramesError(f"augmented target fails the basis precondition: {gate.verdict}")
    values = list(values)
    if len(values) != len(target_aug):
        raise FramesError(f"{len(values)} values for {len(target_aug)} nodes")
    w = Weight(tab.alpha)
    F = GenFun(target_aug, tab.alpha)
    fprimes = [F.derivative_at_zero(n) for n in range(len(target_aug))]
    out = [_lagrange_eval(F, fprimes, values, z) for z in eval_at]
    sup = 0.0
    for z, fz in zip(eval_at, out):
        if not fz.is_zero:
            sup = max(sup, math.exp(fz.logmag - w.phi(z)))
    return InftyInterpolation(tuple(out), sup, gate)


# ----------------------------------------------------------------------------
# Sampling audits

def _monomial_values(seq: PointSeq, m: int) -> list[LogComplex]:
    return [LogComplex(m * p.t, wrap_phase(m * p.theta)) if p.t > -math.inf else
            (LogComplex.one() if m == 0 else LogComplex.zero())
            for p in seq.points]


def sampling_audit_f2(tab: KernelTable, seq: PointSeq, family: str = "monomials",
                      m_max: int = 20, n_fns: int = 8, reference: PointSeq | None = None,
                      seed: int = DEFAULT_SEED) -> RatioBand:
    """Band of discrete norm over exact norm across a test family.

    monomials: exact squared norms are the moments c_m.
    kernels:   random kernel functions, exact squared norm k_w(w).
    biorth:    Lagrange elements of `seq`, reference norm taken as the
               discrete norm over the supplied long reference grid.
    """
    ratios, labels = [], []
    if family == "monomials":
        for m in range(m_max + 1):
            log_d = discrete_norm2(tab, seq, _monomial_values(seq, m))
            ratios.append(math.exp(log_d - float(tab.logc[m])))
            labels.append(m)
    elif family == "kernels":
        rng = np.random.default_rng(seed)
        t_hi = float(seq.t[-1])
        for i in range(n_fns):
            wpt = LogPoint(rng.uniform(0.2 * t_hi, 0.7 * t_hi), rng.uniform(-math.pi, math.pi))
            fv = [kernel_value(tab, p, wpt) for p in seq.points]
            log_d = discrete_norm2(tab, seq, fv)
            ratios.append(math.exp(log_d - kernel_diag_log(tab, wpt.t)))
            labels.append(i)
    elif family == "biorth":
        if reference is None:
            raise FramesError("biorth family needs a reference grid for its norms")
        F = GenFun(seq, tab.alpha)
        lo, hi = len(seq) // 3, 2 * len(seq) // 3
        for n in range(lo, hi):
            fp = F.derivative_at_zero(n)
            unit = [LogComplex.one() if j == n else LogComplex.zero() for j in range(len(seq))]
            fprimes = [fp if j == n else LogComplex.one() for j in range(len(seq))]
            # only term n is nonzero, so the other derivative slots are moot
            vals_seq = [_lagrange_eval(F, fprimes, unit, z) for z in seq.points]
            vals_ref = [_lagrange_eval(F, fprimes, unit, z) for z in reference.points]
            log_d = discrete_norm2(tab, seq, vals_seq)
            log_r = discrete_norm2(tab, reference, vals_ref)
            ratios.append(math.exp(log_d - log_r))
            labels.append(n)
    else:
        raise FramesError(f"unknown test family {family!r}")
    return RatioBand.from_samples(ratios, labels)


@dataclass(frozen=True)
class PerturbationReport:
    baseline_lower: float
    worst_lower: float
    per_trial: tuple[float, ...]
    step: float
    seed: int


def _perturbed_point(w: Weight, p: LogPoint, d: float, beta: float) -> LogPoint:
    """Move p by d_rho-distance about d in direction beta (exact check after)."""
    if d == 0.0:
        return p
    mag = d * (math.exp(-p.t) + 1.0 / w.sqrt2a)
    for _ in range(3):
        u = mag * complex(math.cos(beta), math.sin(beta))
        shrink = min(1.0, abs(1 + u))
        mag = d * (math.exp(-p.t) / shrink + 1.0 / w.sqrt2a) * shrink
    u = mag * complex(math.cos(beta), math.sin(beta))
    q = LogPoint(p.t + math.log(abs(1 + u)), p.theta + math.atan2((1 + u).imag, (1 + u).real))
    actual = w.d_rho(p, q)
    if actual > d * 1.01:
        # one corrective rescale is plenty at steps <= 0.1
        u *= d / actual
        q = LogPoint(p.t + math.log(abs(1 + u)), p.theta + math.atan2((1 + u).imag, (1 + u).real))
    return q


def lower_sampling_ratio(tab: KernelTable, seq: PointSeq, m_max: int = 20) -> float:
    """min over monomials of (discrete norm) / (exact norm)."""
    vals = []
    for m in range(m_max + 1):
        log_d = discrete_norm2(tab, seq, _monomial_values(seq, m))
        vals.append(math.exp(log_d - float(tab.logc[m])))
    return min(vals)


def perturbation_stability_audit(tab: KernelTable, base: PointSeq, d_rho_step: float,
                                 trials: int = 20, m_max: int = 20,
                                 seed: int = DEFAULT_SEED) -> PerturbationReport:
    """Worst lower sampling ratio under random d_rho-bounded perturbations.

    step = 0 reproduces the baseline exactly; small steps should keep the
    lower bound within a uniform factor.  Steps beyond the stability regime
    are reported without any asserted guarantee.
    """
    w = Weight(tab.alpha)
    baseline = lower_sampling_ratio(tab, base, m_max)
    rng = np.random.default_rng(seed)
    per_trial = []
    for _ in range(trials):
        pts = []
        for p in base.points:
            d = d_rho_step * math.sqrt(rng.uniform())
            beta = rng.uniform(-math.pi, math.pi)
            pts.append(_perturbed_point(w, p, d, beta))
        pts.sort(key=lambda q: (q.t, q.theta))
        pert = PointSeq(tuple(pts), {"generator": "perturbed"})
        per_trial.append(lower_sampling_ratio(tab, pert, m_max))
    worst = min(per_trial) if per_trial else baseline
    return PerturbationReport(baseline, worst, tuple(per_trial), d_rho_step, seed)


# ----------------------------------------------------------------------------
# Uniform-norm blow-up construction on the two-sided-plus-units set

@dataclass(frozen=True)
class BlowupReport:
    n: int
    node_sup: float
    weighted_value: float
    probe: LogPoint


def blowup_fn(gamma2: PointSeq, alpha: float, n: int) -> BlowupReport:
    """Unit-node data on the symmetric set whose interpolant blows up.

    Sums the Lagrange elements of the 2(n+1) innermost nodes with phases
    aligned at the probe point i * (next modulus); node data has weighted
    modulus one while the weighted value at the probe grows linearly in n.
    """
    if len(gamma2) < 2 * (n + 2):
        raise FramesError(f"need at least {2 * (n + 2)} stored points for n = {n}")
    w = Weight(alpha)
    F = GenFun(gamma2, alpha)
    used = [j for j, p in enumerate(gamma2) if p.t <= n / alpha + 1e-12]
    if len(used) != 2 * (n + 1):
        raise FramesError(f"expected {2 * (n + 1)} nodes up to modulus index {n}, found {len(used)}")
    probe = LogPoint((n + 1) / alpha, math.pi / 2.0)

    fprimes = {j: F.derivative_at_zero(j) for j in used}
    lag = {}
    fz = F.eval(probe).value
    for j in used:
        lag[j] = fz / (fprimes[j] * point_diff(probe, gamma2[j]))
    # phase-aligned, weight-normalized coefficients
    eps = {j: LogComplex(w.phi(gamma2[j]), -lag[j].phase) for j in used}
    total = log_sum([eps[j] * lag[j] for j in used])
    weighted_value = math.exp(total.logmag - w.phi(probe))

    # node data: coefficient j on node j, zero elsewhere, weighted modulus 1
    node_sup = max(math.exp(eps[j].logmag - w.phi(gamma2[j])) for j in used)
    return BlowupReport(n, node_sup, weighted_value, probe)
