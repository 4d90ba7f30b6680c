"""Line and half-line sampling-measure audits.

With the reference zeros rotated onto the negative imaginary axis, the
canonical product G has no zeros on the real line and the measure
dx / |G(x)|^2 on a ray is weighed against exact space norms: monomials are
the natural test family because their squared norms are the stored moments
c_m, so every degree yields one checkable ratio and "equivalent norms"
becomes a bounded band of ratios.

The uniform-norm analogue compares the weighted sup of a polynomial on the
whole plane against its sup on a single ray; radial test functions give
ratio one exactly, generic ones stay within a bounded factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .genfun import GenFun
from .kernel import KernelTable
from .numerics import RatioBand, adaptive_quadrature, log_sum_arrays
from .weights import Weight

RAYS = ("R+", "R-", "R")


class DeBrangesError(ValueError):
    pass


@dataclass(frozen=True)
class LineAudit:
    ray: str
    m: int
    log_quad: float
    log_exact: float

    @property
    def ratio(self) -> float:
        return math.exp(self.log_quad - self.log_exact)


def _h_factory(g: GenFun, m: int, theta_ray: float):
    def h(s: float) -> float:
        logmag, _, hit = g.eval_many(np.array([s]), np.array([theta_ray]))
        if hit[0] >= 0:
            raise DeBrangesError("integration ray passes through a zero")
        return (2 * m + 1) * s - 2.0 * float(logmag[0])
    return h


def ray_moment_integral_log(g: GenFun, m: int, ray: str, tol: float = 1e-8) -> float:
    """log of int over the ray of x^{2m} / |G(x)|^2 dx.

    Substituting |x| = e^s turns the integrand into a Gaussian-type profile
    in s; the peak height is factored out before quadrature so the integral
    itself stays in double range.
    """
    if ray == "R":
        lp = ray_moment_integral_log(g, m, "R+", tol)
        lm = ray_moment_integral_log(g, m, "R-", tol)
        return float(np.logaddexp(lp, lm))
    if ray not in ("R+", "R-"):
        raise DeBrangesError(f"unknown ray {ray!r}")
    theta = 0.0 if ray == "R+" else math.pi
    alpha = g.alpha
    s_peak = (m + 1) / (2.0 * alpha)
    sigma = 0.5 / math.sqrt(alpha)
    s_hi = s_peak + 16.0 * sigma + 4.0
    if float(g.zeros.t[-1]) < s_hi + 2.0:
        raise DeBrangesError(
            f"zero set reaches t = {float(g.zeros.t[-1]):.3g}, need {s_hi + 2.0:.3g} "
            f"to honor the envelope over the integration range")
    s_lo = -45.0
    h = _h_factory(g, m, theta)
    grid = np.linspace(s_lo, s_hi, 481)
    m_star = max(h(float(s)) for s in grid)
    val = adaptive_quadrature(lambda s: math.exp(h(s) - m_star), s_lo, s_hi, tol)
    if val <= 0:
        raise DeBrangesError("ray integral evaluated to a nonpositive value")
    return m_star + math.log(val)


def debranges_line_audit(tab: KernelTable, g: GenFun, m_max: int = 15,
                         rays=RAYS) -> list[LineAudit]:
    """Monomial ratios quad / exact over the requested rays.

    The generating zeros must avoid the real axis (build them at angle
    -pi/2); exact squared norms come from the moment table.
    """
    if m_max >= len(tab):
        raise DeBrangesError(f"moment table of length {len(tab)} too short for m_max {m_max}")
    if np.any(np.isclose(np.abs(g.zeros.theta), 0.0)) or np.any(
            np.isclose(np.abs(g.zeros.theta), math.pi)):
        raise DeBrangesError("zeros lie on the real axis; rotate them off the contour")
    out = []
    for ray in rays:
        for m in range(m_max + 1):
            lq = ray_moment_integral_log(g, m, ray)
            out.append(LineAudit(ray, m, lq, float(tab.logc[m])))
    return out


# ----------------------------------------------------------------------------
# Half-line sup audit for the uniform norm

def poly_sup_ratio(alpha: float, coeffs: np.ndarray, ray_angle: float = 0.0,
                   t_max: float | None = None, n_t: int = 161, n_theta: int = 64) -> float:
    """(plane sup of |p| e^{-phi}) / (ray sup of |p| e^{-phi}) on a log-polar grid.

    The theta grid starts at the ray angle, so the ray points are a subset of
    the plane grid and the ratio is >= 1 by construction.  The default grid
    reaches past deg/(2 alpha), where the weighted peak of the top monomial
    sits; beyond it the top coefficient dominates and the modulus turns
    radial, so shorter grids make the audit vacuous.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    if t_max is None:
        t_max = deg / (2.0 * alpha) + 6.0 / math.sqrt(2.0 * alpha)
    with np.errstate(divide="ignore"):
        la = np.where(coeffs == 0, -np.inf, np.log(np.abs(coeffs)))
    pa = np.angle(coeffs)
    j = np.arange(deg + 1, dtype=float)
    ts = np.linspace(0.0, t_max, n_t)
    thetas = ray_angle + np.arange(n_theta) * (2.0 * math.pi / n_theta)

    w = Weight(alpha)
    phi = np.array([w.phi_log(t) for t in ts])

    tt, hh = np.meshgrid(ts, thetas, indexing="ij")
    logmag = la[None, None, :] + j[None, None, :] * tt[:, :, None]
    phase = pa[None, None, :] + j[None, None, :] * hh[:, :, None]
    lf, _ = log_sum_arrays(logmag, phase, axis=-1)
    weighted = lf - phi[:, None]
    plane_sup = float(np.max(weighted))
    ray_sup = float(np.max(weighted[:, 0]))
    return math.exp(plane_sup - ray_sup)


def halfline_sup_audit(alpha: float, n_polys: int = 50, degree: int = 30,
                       ray_angle: float = 0.0, t_max: float | None = None,
                       n_t: int = 161, n_theta: int = 64,
                       seed: int = 0x5EED) -> RatioBand:
    """Band of plane-to-ray weighted sup ratios over random polynomials."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(n_polys):
        coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        ratios.append(poly_sup_ratio(alpha, coeffs, ray_angle, t_max, n_t, n_theta))
    return RatioBand.from_samples(ratios)
