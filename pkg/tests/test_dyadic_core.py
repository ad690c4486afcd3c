"""
二进区间寻址、代/切片/层算术与抛币约定
"""
import math

import numpy as np
import pytest

from backend.app.core.exceptions import DyadicDomainError
from backend.app.services.dyadic.core import (
    ROOT,
    BitVectorPoint,
    DyadicInterval,
    StreamPoint,
    children,
    haar,
    interval_at,
    layer_generations,
    layer_of,
    leaf_tosses,
    parent,
    slice_of,
    toss,
    toss_split,
    verify_sign_convention,
)


class TestDyadicInterval:

    def test_geometry(self):
        interval = DyadicInterval(2, 1)
        assert interval.left == 0.25
        assert interval.right == 0.5
        assert interval.length == 0.25
        assert interval.heap_position == 4
        assert interval.contains(0.3)
        assert not interval.contains(0.5)

    def test_children_and_parent(self):
        left, right = children(ROOT)
        assert (left, right) == (DyadicInterval(1, 0), DyadicInterval(1, 1))
        assert left.is_left_child and not right.is_left_child
        assert parent(DyadicInterval(3, 5)) == DyadicInterval(2, 2)

    def test_root_has_no_parent(self):
        with pytest.raises(DyadicDomainError):
            parent(ROOT)

    def test_index_out_of_range(self):
        with pytest.raises(DyadicDomainError):
            DyadicInterval(1, 2)


class TestGenerationArithmetic:

    def test_slices_cycle_through_dimensions(self):
        assert [slice_of(g, 2) for g in range(1, 7)] == [1, 2, 1, 2, 1, 2]
        assert [slice_of(g, 3) for g in range(1, 7)] == [1, 2, 3, 1, 2, 3]

    def test_layers(self):
        assert [layer_of(g, 2) for g in range(1, 7)] == [1, 1, 2, 2, 3, 3]
        assert list(layer_generations(2, 3)) == [4, 5, 6]

    def test_root_generation_rejected(self):
        with pytest.raises(DyadicDomainError):
            slice_of(0, 2)
        with pytest.raises(DyadicDomainError):
            layer_of(0, 1)
        with pytest.raises(DyadicDomainError):
            layer_generations(0, 2)


class TestTosses:

    def test_right_child_is_plus_one(self):
        assert toss(ROOT, 0.75) == 1
        assert toss(ROOT, 0.3) == -1
        assert toss(DyadicInterval(1, 1), 0.3) == 0

    def test_interval_at(self):
        assert interval_at(0.3, 2) == DyadicInterval(2, 1)
        assert interval_at(0.0, 5) == DyadicInterval(5, 0)

    def test_haar_normalisation(self):
        assert haar(ROOT, 0.75) == 1.0
        assert haar(DyadicInterval(1, 0), 0.3) == pytest.approx(math.sqrt(2.0))
        assert haar(DyadicInterval(1, 0), 0.75) == 0.0

    def test_toss_split_follows_previous_toss(self):
        # 0.3 在左半区间，ε_0 = −1，ε_1 = +1
        assert toss_split(1, 0.3) == (1, 0)
        assert toss_split(1, 0.8) == (0, 1)

    def test_leaf_tosses_order(self):
        table = leaf_tosses(2)
        np.testing.assert_array_equal(table[:, 0], [-1, -1, 1, 1])
        np.testing.assert_array_equal(table[:, 1], [-1, 1, -1, 1])
        np.testing.assert_array_equal(leaf_tosses(3, columns=[2])[:, 0], [-1, 1] * 4)

    def test_leaf_tosses_column_guard(self):
        with pytest.raises(DyadicDomainError):
            leaf_tosses(2, columns=[2])

    def test_sign_convention(self):
        assert verify_sign_convention(6)


class TestPointBackends:

    def test_bit_vector_from_leaf(self):
        point = BitVectorPoint.from_leaf(5, 3)
        np.testing.assert_array_equal(point.digits(3), [1, 0, 1])
        assert point.interval_at(3) == DyadicInterval(3, 5)
        with pytest.raises(DyadicDomainError):
            point.digit(4)

    def test_from_float_bounds(self):
        with pytest.raises(DyadicDomainError):
            BitVectorPoint.from_float(1.0)
        np.testing.assert_array_equal(BitVectorPoint.from_float(0.625, depth=3).digits(3), [1, 0, 1])

    def test_from_tosses(self):
        point = BitVectorPoint.from_tosses([1, -1, 1])
        np.testing.assert_array_equal(point.tosses(3), [1, -1, 1])

    def test_stream_point_is_consistent(self, rng):
        point = StreamPoint(rng, chunk=8)
        digits = point.digits(20)
        assert point.digit(20) == digits[19]
        index = int("".join(str(int(b)) for b in digits[:10]), 2)
        assert point.interval_at(10) == DyadicInterval(10, index)
