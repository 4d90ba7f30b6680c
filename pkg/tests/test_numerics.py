import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focklab.numerics import (
    LogComplex,
    NonHermitianError,
    QuadratureError,
    RatioBand,
    adaptive_quadrature,
    hermitian_extremes,
    log_sum,
    log_sum_arrays,
    wrap_phase,
)

finite_logmag = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
any_phase = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


# ----------------------------------------------------------------------------
# LogComplex scalar algebra

class TestLogComplex:
    def test_zero_is_absorbing_and_neutral(self):
        z = LogComplex.zero()
        x = LogComplex(2.0, 1.0)
        assert (z * x).is_zero
        assert abs((z + x).logmag - x.logmag) < 1e-15
        assert (z + x).phase == x.phase

    def test_phase_wrapping_convention(self):
        assert wrap_phase(math.pi) == math.pi
        assert wrap_phase(-math.pi) == math.pi
        assert wrap_phase(3 * math.pi) == pytest.approx(math.pi)
        lc = LogComplex(0.0, -math.pi)
        assert lc.phase == math.pi

    @given(finite_logmag, any_phase)
    @settings(max_examples=200)
    def test_roundtrip_complex(self, lm, ph):
        lc = LogComplex(lm, ph)
        back = LogComplex.from_complex(lc.to_complex())
        assert abs(back.logmag - lc.logmag) <= 1e-13 * max(1.0, abs(lc.logmag))
        assert abs(wrap_phase(back.phase - lc.phase)) <= 1e-12

    def test_roundtrip_at_extreme_magnitude(self):
        lc = LogComplex(700.0, 0.3)
        back = LogComplex.from_complex(lc.to_complex())
        assert abs(back.logmag - 700.0) <= 700.0 * 1e-13

    def test_to_complex_overflow_flagged(self):
        with pytest.raises(OverflowError):
            LogComplex(800.0, 0.0).to_complex()

    def test_mul_agrees_with_native(self):
        rng = np.random.default_rng(0x5EED)
        for _ in range(10_000):
            a = complex(rng.normal(), rng.normal()) * math.exp(rng.uniform(-20, 20))
            b = complex(rng.normal(), rng.normal()) * math.exp(rng.uniform(-20, 20))
            if a == 0 or b == 0:
                continue
            got = (LogComplex.from_complex(a) * LogComplex.from_complex(b)).to_complex()
            assert abs(got - a * b) <= 1e-12 * abs(a * b)

    def test_add_agrees_with_native(self):
        rng = np.random.default_rng(0xACE)
        for _ in range(10_000):
            a = complex(rng.normal(), rng.normal()) * math.exp(rng.uniform(-10, 10))
            b = complex(rng.normal(), rng.normal()) * math.exp(rng.uniform(-10, 10))
            s = a + b
            if a == 0 or b == 0 or abs(s) < 1e-6 * (abs(a) + abs(b)):
                continue
            got = (LogComplex.from_complex(a) + LogComplex.from_complex(b)).to_complex()
            assert abs(got - s) <= 1e-12 * abs(s)

    def test_division_and_negation(self):
        a = LogComplex(3.0, 0.5)
        b = LogComplex(1.0, -2.0)
        q = a / b
        assert q.logmag == pytest.approx(2.0)
        assert (-a).phase == pytest.approx(wrap_phase(0.5 + math.pi))
        with pytest.raises(ZeroDivisionError):
            a / LogComplex.zero()


# ----------------------------------------------------------------------------
# log_sum

class TestLogSum:
    def test_singleton(self):
        assert log_sum([LogComplex(0.0, 0.0)]) == LogComplex(0.0, 0.0)

    def test_exact_cancellation(self):
        s = log_sum([LogComplex(0.0, 0.0), LogComplex(0.0, math.pi)])
        assert s.is_zero

    def test_dominated_term(self):
        s = log_sum([LogComplex(700.0, 0.0), LogComplex(0.0, 0.0)])
        assert s.phase == 0.0
        assert abs(s.logmag - 700.0) <= 1e-15 * 700.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            log_sum([])

    @given(st.lists(st.tuples(finite_logmag, any_phase), min_size=2, max_size=12),
           st.randoms(use_true_random=False))
    @settings(max_examples=150)
    def test_permutation_invariance(self, raw, rnd):
        terms = [LogComplex(lm, ph) for lm, ph in raw]
        shuffled = list(terms)
        rnd.shuffle(shuffled)
        a, b = log_sum(terms), log_sum(shuffled)
        if a.is_zero or b.is_zero:
            assert a.logmag == b.logmag
        else:
            assert abs(a.logmag - b.logmag) <= 1e-13 * max(1.0, abs(a.logmag))
            assert abs(wrap_phase(a.phase - b.phase)) <= 1e-12

    def test_array_form_matches_scalar(self):
        rng = np.random.default_rng(3)
        lm = rng.uniform(-30, 30, size=(5, 17))
        ph = rng.uniform(-3, 3, size=(5, 17))
        out_lm, out_ph = log_sum_arrays(lm, ph)
        for i in range(5):
            ref = log_sum([LogComplex(a, b) for a, b in zip(lm[i], ph[i])])
            assert out_lm[i] == pytest.approx(ref.logmag, rel=1e-12)
            assert wrap_phase(out_ph[i] - ref.phase) == pytest.approx(0.0, abs=1e-12)

    def test_array_form_all_zero_slice(self):
        out_lm, out_ph = log_sum_arrays(np.full((1, 3), -np.inf), np.zeros((1, 3)))
        assert out_lm[0] == -np.inf and out_ph[0] == 0.0


# ----------------------------------------------------------------------------
# Hermitian extremes

def _charpoly_extreme_roots(H, tol=1e-12):
    """Independent oracle: bisection on det(H - x I) via LU, bracketed by
    Gershgorin disks."""
    H = np.asarray(H)
    radii = np.sum(np.abs(H), axis=1) - np.abs(np.diag(H))
    lo = float(np.min(np.diag(H).real - radii)) - 1.0
    hi = float(np.max(np.diag(H).real + radii)) + 1.0

    def sign_det(x):
        s, _ = np.linalg.slogdet(H - x * np.eye(H.shape[0]))
        return s.real

    grid = np.linspace(lo, hi, 4001)
    signs = np.array([sign_det(x) for x in grid])
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    roots = []
    for k in (flips[0], flips[-1]):
        a, b = grid[k], grid[k + 1]
        for _ in range(100):
            m = 0.5 * (a + b)
            if sign_det(a) * sign_det(m) <= 0:
                b = m
            else:
                a = m
            if b - a < tol:
                break
        roots.append(0.5 * (a + b))
    return roots[0], roots[-1]


class TestHermitianExtremes:
    def test_identity(self):
        lo, hi = hermitian_extremes(np.eye(8))
        assert (lo, hi) == (pytest.approx(1.0), pytest.approx(1.0))

    def test_diagonal(self):
        lo, hi = hermitian_extremes(np.diag([0.5, 2.0]))
        assert lo == pytest.approx(0.5) and hi == pytest.approx(2.0)

    def test_against_charpoly_oracle(self):
        rng = np.random.default_rng(11)
        A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        H = 0.5 * (A + A.conj().T)
        lo, hi = hermitian_extremes(H)
        olo, ohi = _charpoly_extreme_roots(H)
        assert lo == pytest.approx(olo, abs=1e-10)
        assert hi == pytest.approx(ohi, abs=1e-10)

    def test_rayleigh_quotients_bracketed(self):
        rng = np.random.default_rng(12)
        A = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
        H = 0.5 * (A + A.conj().T)
        lo, hi = hermitian_extremes(H)
        for _ in range(100):
            v = rng.normal(size=9) + 1j * rng.normal(size=9)
            r = (v.conj() @ H @ v).real / (v.conj() @ v).real
            assert lo - 1e-10 <= r <= hi + 1e-10

    def test_non_hermitian_rejected(self):
        M = np.array([[1.0, 2.0], [0.0, 1.0]])
        with pytest.raises(NonHermitianError):
            hermitian_extremes(M)


# ----------------------------------------------------------------------------
# Quadrature

def _simpson(f, a, b, n=200_001):
    xs = np.linspace(a, b, n)
    ys = np.array([f(x) for x in xs])
    h = (b - a) / (n - 1)
    return h / 3.0 * (ys[0] + ys[-1] + 4 * ys[1:-1:2].sum() + 2 * ys[2:-2:2].sum())


class TestQuadrature:
    def test_constant(self):
        assert adaptive_quadrature(lambda x: 1.0, 0.0, 1.0) == pytest.approx(1.0, rel=1e-12)

    def test_gaussian_constant(self):
        val = adaptive_quadrature(lambda x: math.exp(-x * x), 0.0, math.inf)
        assert val == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-10)

    def test_shifted_gaussian_vs_simpson_oracle(self):
        f = lambda t: math.exp(2.0 * t - t * t)
        val = adaptive_quadrature(f, 0.0, math.inf)
        oracle = _simpson(f, 0.0, 30.0)
        assert val == pytest.approx(oracle, rel=1e-8)

    def test_error_scales_with_tol(self):
        f = lambda x: math.sin(3 * x) ** 2 * math.exp(-x)
        ref = adaptive_quadrature(f, 0.0, 10.0, tol=1e-13)
        rough = adaptive_quadrature(f, 0.0, 10.0, tol=1e-6)
        assert rough == pytest.approx(ref, rel=1e-5)

    def test_budget_exhaustion_raises(self):
        # non-integrable spike keeps splitting until the budget trips
        with pytest.raises(QuadratureError):
            adaptive_quadrature(lambda x: 1.0 / max(abs(x), 1e-300), -1.0, 1.0, tol=1e-14)

    def test_bad_interval(self):
        with pytest.raises(ValueError):
            adaptive_quadrature(lambda x: x, 1.0, 1.0)


class TestRatioBand:
    def test_from_samples(self):
        b = RatioBand.from_samples([2.0, 0.5, 4.0], ["a", "b", "c"])
        assert (b.lo, b.hi, b.argmin, b.argmax) == (0.5, 4.0, "b", "c")
        assert b.ratio == pytest.approx(8.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            RatioBand.from_samples([])
