import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focklab.numerics import RatioBand
from focklab.sequences import gallery, reference_gamma
from focklab.weights import LogPoint, Weight, is_separated

ALPHA = 0.5


def brute_force_min_pair(w: Weight, pts):
    """All-pairs oracle for the separation scan."""
    best, wit = math.inf, None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = w.d_rho(pts[i], pts[j])
            if d < best:
                best, wit = d, (i, j)
    return best, wit


class TestPhi:
    def test_vanishes_on_unit_circle(self):
        assert Weight(0.5).phi(LogPoint(0.0, 1.0)) == 0.0

    def test_at_e(self):
        # alpha (log r)^2 at r = e
        assert Weight(0.5).phi(LogPoint(1.0, 0.0)) == pytest.approx(0.5)

    def test_truncated_inside_disk(self):
        assert Weight(0.5).phi(LogPoint(-1.0, 0.0)) == 0.0
        assert Weight(0.5).phi(LogPoint(-math.inf, 0.0)) == 0.0

    def test_alpha_validation(self):
        with pytest.raises(ValueError):
            Weight(0.0)


class TestDRho:
    def test_coincident_points(self):
        w = Weight(ALPHA)
        p = LogPoint(3.0, 1.0)
        assert w.d_rho(p, p) == 0.0

    def test_hand_value_e_e2(self):
        # sqrt(2a) = 1: d = (e^2 - e) / (1 + e)
        w = Weight(0.5)
        d = w.d_rho(LogPoint(1.0, 0.0), LogPoint(2.0, 0.0))
        assert d == pytest.approx((math.e ** 2 - math.e) / (1 + math.e), rel=1e-12)

    @given(st.floats(-5, 40), st.floats(-5, 40),
           st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
    @settings(max_examples=300)
    def test_symmetry(self, t1, t2, h1, h2):
        w = Weight(ALPHA)
        p, q = LogPoint(t1, h1), LogPoint(t2, h2)
        assert w.d_rho(p, q) == w.d_rho(q, p)

    def test_matches_euclidean_formula_in_range(self):
        rng = np.random.default_rng(0x5EED)
        w = Weight(ALPHA)
        for _ in range(2000):
            p = LogPoint(rng.uniform(-2, 8), rng.uniform(-math.pi, math.pi))
            q = LogPoint(rng.uniform(-2, 8), rng.uniform(-math.pi, math.pi))
            z, u = p.to_complex(), q.to_complex()
            ref = w.sqrt2a * abs(z - u) / (w.sqrt2a + min(abs(z), abs(u)))
            assert w.d_rho(p, q) == pytest.approx(ref, rel=1e-12, abs=1e-300)

    def test_origin_special_case(self):
        w = Weight(0.5)
        assert w.d_rho(LogPoint(-math.inf, 0.0), LogPoint(2.0, 0.3)) == pytest.approx(math.e ** 2)

    def test_saturation_sentinel(self):
        w = Weight(0.5)
        d = w.d_rho(LogPoint(0.0, 0.0), LogPoint(5000.0, 0.0))
        assert d == 1e300

    def test_comparable_to_euclidean_in_disk(self):
        # inside |z| <= 10 the ratio d_rho / |z - w| spans at most 1 + 10/sqrt(2a)
        rng = np.random.default_rng(17)
        w = Weight(ALPHA)
        ratios = []
        for _ in range(3000):
            p = LogPoint(rng.uniform(-3, math.log(10)), rng.uniform(-math.pi, math.pi))
            q = LogPoint(rng.uniform(-3, math.log(10)), rng.uniform(-math.pi, math.pi))
            z, u = p.to_complex(), q.to_complex()
            if abs(z - u) < 1e-12:
                continue
            ratios.append(w.d_rho(p, q) / abs(z - u))
        band = RatioBand.from_samples(ratios)
        assert band.ratio <= 1.0 + 10.0 / w.sqrt2a + 1e-9


class TestIsSeparated:
    def test_reference_truncation_matches_oracle(self):
        w = Weight(ALPHA)
        seq = reference_gamma(ALPHA, 19)
        rep = is_separated(w, seq)
        oracle_d, oracle_wit = brute_force_min_pair(w, list(seq.points))
        assert rep.flag
        assert rep.d_min == pytest.approx(oracle_d, rel=1e-14)
        assert rep.witness == oracle_wit == (0, 1)

    def test_repeated_point(self):
        w = Weight(ALPHA)
        pts = [LogPoint(1.0, 0.0), LogPoint(1.0, 0.0), LogPoint(2.0, 0.0)]
        rep = is_separated(w, pts)
        assert not rep.flag and rep.d_min == 0.0

    def test_gamma2_gallery(self):
        w = Weight(ALPHA)
        seq = gallery("gamma2", ALPHA, 10)
        rep = is_separated(w, seq)
        oracle_d, _ = brute_force_min_pair(w, list(seq.points))
        assert rep.flag
        assert rep.d_min == pytest.approx(oracle_d, rel=1e-14)

    def test_random_clouds_match_oracle(self):
        rng = np.random.default_rng(23)
        w = Weight(ALPHA)
        for _ in range(20):
            pts = sorted(
                (LogPoint(rng.uniform(0, 12), rng.uniform(-math.pi, math.pi))
                 for _ in range(25)),
                key=lambda p: p.t,
            )
            rep = is_separated(w, pts)
            oracle_d, _ = brute_force_min_pair(w, pts)
            assert rep.d_min == pytest.approx(oracle_d, rel=1e-14)

    def test_tiny_sequences(self):
        w = Weight(ALPHA)
        assert is_separated(w, []).flag
        assert is_separated(w, [LogPoint(1.0, 0.0)]).d_min == math.inf

    def test_huge_moduli_stay_finite(self):
        w = Weight(ALPHA)
        pts = [LogPoint(1e5, 0.0), LogPoint(1e5 + 1.0, 0.0), LogPoint(2e5, 0.0)]
        rep = is_separated(w, pts)
        assert rep.flag and math.isfinite(rep.d_min)
