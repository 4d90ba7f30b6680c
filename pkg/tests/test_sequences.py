import json
import math

import numpy as np
import pytest

from focklab.sequences import (
    PointSeq,
    compose,
    decompose,
    from_json_dict,
    gallery,
    golden_angles,
    merge,
    reference_gamma,
    to_json_dict,
)
from focklab.weights import LogPoint, Weight, is_separated

ALPHA = 0.5


class TestPointSeq:
    def test_order_enforced(self):
        with pytest.raises(ValueError):
            PointSeq((LogPoint(2.0, 0.0), LogPoint(1.0, 0.0)))

    def test_from_values_sorts(self):
        s = PointSeq.from_values([3.0, 1.0, 2.0], [0.1, 0.2, 0.3])
        assert list(s.t) == [1.0, 2.0, 3.0]

    def test_without_and_head(self):
        s = reference_gamma(ALPHA, 5)
        assert len(s.without(2)) == 5
        assert list(s.head(3).t) == [1.0, 2.0, 3.0]

    def test_merge_interleaves(self):
        a = PointSeq.from_values([1.0, 3.0], [0, 0])
        b = PointSeq.from_values([2.0], [0])
        assert list(merge(a, b).t) == [1.0, 2.0, 3.0]


class TestReference:
    def test_moduli_alpha_half(self):
        s = reference_gamma(0.5, 2)
        assert list(s.t) == [1.0, 2.0, 3.0]

    def test_single_point_alpha_one(self):
        s = reference_gamma(1.0, 0)
        assert s[0].t == 0.5

    def test_fixed_angle_rule(self):
        s = reference_gamma(0.5, 3, angles=-math.pi / 2)
        assert all(p.theta == -math.pi / 2 for p in s)

    def test_angle_list_length_checked(self):
        with pytest.raises(ValueError):
            reference_gamma(0.5, 3, angles=[0.0, 0.1])

    def test_always_separated(self):
        for alpha in (0.2, 0.5, 1.0, 3.0):
            s = reference_gamma(alpha, 30, angles=golden_angles(31))
            assert is_separated(Weight(alpha), s).flag


class TestDecompose:
    def test_reference_has_zero_deviation(self):
        s = reference_gamma(ALPHA, 20)
        assert np.max(np.abs(decompose(s, ALPHA).delta)) == 0.0

    def test_constant_shift(self):
        s = gallery("constant_shift", ALPHA, 20, d=0.1)
        d = decompose(s, ALPHA).delta
        np.testing.assert_allclose(d, 0.1, rtol=0, atol=1e-15)

    def test_roundtrip_bit_exact(self):
        rng = np.random.default_rng(5)
        ts = np.sort(np.cumsum(rng.uniform(0.3, 2.0, size=30)))
        s = PointSeq.from_values(ts, rng.uniform(-math.pi, math.pi, size=30))
        back = compose(decompose(s, ALPHA))
        assert all(a.t == b.t and a.theta == b.theta for a, b in zip(s, back))


class TestGallery:
    def test_two_sided_moduli_and_angles(self):
        s = gallery("two_sided", 0.5, 3)
        assert list(s.t) == [2.0, 2.0, 4.0, 4.0, 6.0, 6.0]
        angles = sorted(p.theta for p in s.points[:2])
        assert angles == [0.0, math.pi]

    def test_critical_shift_moduli(self):
        s = gallery("critical_shift", 0.5, 3, delta=0.5)
        assert list(s.t) == [1.5, 2.5, 3.5, 4.5]

    def test_critical_shift_defaults_to_threshold(self):
        s = gallery("critical_shift", 0.5, 3)
        assert s[0].t == pytest.approx(1.0 + 1.0 / (4 * 0.5))

    def test_gamma2_is_two_sided_plus_units(self):
        g2 = gallery("gamma2", 0.5, 4)
        ts = gallery("two_sided", 0.5, 4)
        assert len(g2) == len(ts) + 2
        assert list(g2.t[:2]) == [0.0, 0.0]

    def test_avdonin_blocks_pattern(self):
        s = gallery("avdonin_blocks", 0.5, 31, d=0.4, block=8)
        d = decompose(s, 0.5).delta
        assert np.all(d[:8] == 0.4) and np.all(d[8:16] == -0.4) and np.all(d[16:24] == 0.4)

    def test_constant_shift_requires_d(self):
        with pytest.raises(ValueError):
            gallery("constant_shift", 0.5, 3)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            gallery("nope", 0.5, 3)

    def test_gallery_separated(self):
        w = Weight(ALPHA)
        for name, kw in [("two_sided", {}), ("gamma2", {}),
                         ("critical_shift", {"delta": 0.5}),
                         ("constant_shift", {"d": 0.3}),
                         ("avdonin_blocks", {"d": 0.6, "block": 8})]:
            assert is_separated(w, gallery(name, ALPHA, 20, **kw)).flag, name


class TestJson:
    def test_literal_roundtrip(self):
        s = gallery("constant_shift", ALPHA, 10, d=0.25)
        d = to_json_dict(s, ALPHA)
        back = from_json_dict(json.loads(json.dumps(d)))
        assert all(a.t == b.t and a.theta == b.theta for a, b in zip(s, back))

    def test_generator_shorthand_reference(self):
        s = from_json_dict({"generator": "reference", "params": {"n_max": 4}},
                           default_alpha=0.5)
        assert list(s.t) == [1.0, 2.0, 3.0, 4.0, 5.0]

    def test_generator_shorthand_gallery_with_inline_alpha(self):
        s = from_json_dict({"generator": "critical_shift",
                            "params": {"alpha": 0.5, "n_max": 2, "delta": 0.5}})
        assert list(s.t) == [1.5, 2.5, 3.5]

    def test_generator_needs_alpha(self):
        with pytest.raises(ValueError):
            from_json_dict({"generator": "reference", "params": {"n_max": 3}})
