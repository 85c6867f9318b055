import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmreach.errors import DimensionMismatch, EmptyIntersection, InvalidInterval
from mmreach.interval import (
    Interval,
    IntervalMatrix,
    IntervalVector,
    iv_affine_image,
    iv_intersect,
    iv_matmul,
    iv_row_scale,
    iv_width_2norm,
)


def IV(*pairs):
    return IntervalVector([p[0] for p in pairs], [p[1] for p in pairs])


def IM(rows):
    lo = [[e[0] for e in r] for r in rows]
    hi = [[e[1] for e in r] for r in rows]
    return IntervalMatrix(lo, hi)


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, dim=None):
    n = dim if dim is not None else draw(st.integers(1, 6))
    a = np.array(draw(st.lists(finite, min_size=n, max_size=n)))
    b = np.array(draw(st.lists(finite, min_size=n, max_size=n)))
    return IntervalVector(np.minimum(a, b), np.maximum(a, b))


class TestConstruction:
    def test_interval_rejects_inverted(self):
        with pytest.raises(InvalidInterval):
            Interval(1.0, 0.0)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_interval_rejects_non_finite(self, bad):
        with pytest.raises(InvalidInterval):
            Interval(0.0, bad)

    def test_vector_rejects_inverted_entry(self):
        with pytest.raises(InvalidInterval):
            IntervalVector([0.0, 2.0], [1.0, 1.0])

    def test_vector_is_immutable(self):
        v = IV((0, 1))
        with pytest.raises(ValueError):
            v.lo[0] = 5.0

    def test_entries_roundtrip(self):
        v = IV((0, 1), (-2, 3))
        assert IntervalVector.from_intervals(v.entries) == v
        assert v[1] == Interval(-2, 3)

    def test_corners_enumerates_all_vertices(self):
        c = IV((0, 1), (2, 3)).corners()
        assert {tuple(r) for r in c} == {(0, 2), (1, 2), (0, 3), (1, 3)}


class TestIntersect:
    def test_overlap(self):
        assert iv_intersect(IV((0, 2)), IV((1, 3))) == IV((1, 2))

    def test_identity_on_first_entry(self):
        assert iv_intersect(IV((-1, 1), (0, 4)), IV((-1, 1), (2, 9))) == IV((-1, 1), (2, 4))

    def test_disjoint_raises(self):
        with pytest.raises(EmptyIntersection):
            iv_intersect(IV((0, 1)), IV((2, 3)))

    def test_rounding_inversion_collapses_to_midpoint(self):
        r = iv_intersect(IV((0.0, 1.0)), IV((1.0 + 1e-12, 2.0)))
        assert r.lo[0] == r.hi[0] == pytest.approx(1.0 + 5e-13, abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iv_intersect(IV((0, 1)), IV((0, 1), (0, 1)))

    @given(boxes(dim=3))
    def test_idempotent(self, a):
        assert iv_intersect(a, a) == a

    @given(st.data())
    def test_commutative(self, data):
        n = data.draw(st.integers(1, 5))
        a, b = data.draw(boxes(n)), data.draw(boxes(n))
        lo = np.maximum(a.lo, b.lo)
        hi = np.minimum(a.hi, b.hi)
        if np.any(lo > hi):
            return
        assert iv_intersect(a, b) == iv_intersect(b, a)


class TestAffineImage:
    def test_sign_split(self):
        r = iv_affine_image([[1, -1]], [0.5], IV((0, 1), (0, 1)))
        assert r == IV((-0.5, 1.5))

    def test_identity(self):
        x = IV((-1, 2), (3, 4))
        assert iv_affine_image(np.eye(2), np.zeros(2), x) == x

    def test_corner_enumeration_example(self):
        # corners x=-1 -> (-1, 4) and x=1 -> (3, -2)
        r = iv_affine_image([[2], [-3]], [1, 1], IV((-1, 1)))
        np.testing.assert_array_equal(r.lo, [-1, -2])
        np.testing.assert_array_equal(r.hi, [3, 4])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iv_affine_image(np.eye(2), np.zeros(2), IV((0, 1)))

    def test_random_soundness_and_tightness(self):
        rng = np.random.default_rng(1)
        for _ in range(1000):
            m, n = rng.integers(1, 9, size=2)
            W = rng.normal(size=(m, n))
            b = rng.normal(size=m)
            c = rng.normal(size=n)
            r = rng.uniform(0, 1, size=n)
            box = IntervalVector(c - r, c + r)
            out = iv_affine_image(W, b, box)
            pts = box.sample(rng, 100)
            y = pts @ W.T + b
            assert np.all(y >= out.lo - 1e-12) and np.all(y <= out.hi + 1e-12)
            # the extremes are attained at sign-selected corners
            lo_corner = np.where(W > 0, box.lo, box.hi)
            np.testing.assert_allclose(np.einsum("ij,ij->i", W, lo_corner) + b, out.lo, atol=1e-12)


class TestRowScale:
    def test_negative_weight_flips(self):
        r = iv_row_scale(IV((0, 1)), [[2, -3]])
        assert r == IM([[(0, 2), (-3, 0)]])

    def test_unit_scaling_is_identity(self, rng):
        W = rng.normal(size=(3, 4))
        r = iv_row_scale(IntervalVector.point(np.ones(3)), W)
        np.testing.assert_array_equal(r.lo, W)
        np.testing.assert_array_equal(r.hi, W)

    def test_straddling_scale(self):
        r = iv_row_scale(IV((-0.1, 1.1)), [[5]])
        assert r.lo[0, 0] == pytest.approx(-0.5) and r.hi[0, 0] == pytest.approx(5.5)


class TestMatmul:
    def test_scalar_endpoint_products(self):
        # {-1*3, -1*4, 2*3, 2*4} = {-3, -4, 6, 8}
        r = iv_matmul(IM([[(-1, 2)]]), IM([[(3, 4)]]))
        assert r == IM([[(-4, 8)]])

    def test_identity_left(self, rng):
        lo = rng.normal(size=(3, 2))
        B = IntervalMatrix(lo, lo + rng.uniform(0, 1, size=(3, 2)))
        assert iv_matmul(IntervalMatrix.identity(3), B) == B

    def test_interval_sum(self):
        r = iv_matmul(IM([[(0, 1), (0, 1)]]), IM([[(1, 1)], [(-1, -1)]]))
        assert r == IM([[(-1, 1)]])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iv_matmul(IntervalMatrix.identity(2), IntervalMatrix.identity(3))

    def test_soundness_and_corner_tightness(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            A = IntervalMatrix(*np.sort(rng.normal(size=(2, 2, 2)), axis=0))
            B = IntervalMatrix(*np.sort(rng.normal(size=(2, 2, 2)), axis=0))
            R = iv_matmul(A, B)
            a = rng.uniform(A.lo, A.hi, size=(2000, 2, 2))
            b = rng.uniform(B.lo, B.hi, size=(2000, 2, 2))
            prods = a @ b
            assert np.all(prods >= R.lo - 1e-12) and np.all(prods <= R.hi + 1e-12)
            # brute force over all 2^8 endpoint choices attains each bound
            vals = []
            for bits in itertools.product((0, 1), repeat=8):
                ca = np.where(np.reshape(bits[:4], (2, 2)), A.hi, A.lo)
                cb = np.where(np.reshape(bits[4:], (2, 2)), B.hi, B.lo)
                vals.append(ca @ cb)
            vals = np.array(vals)
            np.testing.assert_allclose(vals.min(axis=0), R.lo, atol=1e-9)
            np.testing.assert_allclose(vals.max(axis=0), R.hi, atol=1e-9)

    def test_chunking_matches_unchunked(self, rng, monkeypatch):
        import mmreach.interval as iv

        A = IntervalMatrix(*np.sort(rng.normal(size=(2, 9, 7)), axis=0))
        B = IntervalMatrix(*np.sort(rng.normal(size=(2, 7, 5)), axis=0))
        full = iv_matmul(A, B)
        monkeypatch.setattr(iv, "_MATMUL_CHUNK", 40)
        assert iv_matmul(A, B) == full


class TestWidth:
    def test_pythagorean(self):
        assert iv_width_2norm(IV((0, 3), (0, 4))) == 5.0

    def test_degenerate(self):
        assert iv_width_2norm(IntervalVector.point([1.0, -2.0])) == 0.0

    def test_cube(self):
        assert iv_width_2norm(IV((-1, 1), (-1, 1), (-1, 1))) == pytest.approx(2 * math.sqrt(3))


@settings(max_examples=200)
@given(st.data())
def test_outputs_are_valid_intervals(data):
    n = data.draw(st.integers(1, 5))
    m = data.draw(st.integers(1, 5))
    x = data.draw(boxes(n))
    d = data.draw(boxes(m))
    W = np.array(data.draw(st.lists(finite, min_size=m * n, max_size=m * n))).reshape(m, n)
    for out in (iv_affine_image(W, np.zeros(m), x), iv_row_scale(d, W)):
        assert np.all(out.lo <= out.hi)
    S = iv_row_scale(d, W)
    P = iv_matmul(S, IntervalMatrix(np.outer(x.lo, np.ones(2)), np.outer(x.hi, np.ones(2))))
    assert np.all(P.lo <= P.hi)
