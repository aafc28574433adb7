import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specband.errors import DimensionMismatch
from specband.vectorpoly import (
    MINUS_INF,
    VectorPolynomial,
    canonical_e,
    from_coeff_vector,
    height,
    leading_slot,
    poly_allclose,
    to_coeff_vector,
)


def vp(comps, n=None):
    return VectorPolynomial.from_components(comps, n)


class TestHeight:
    def test_constant_first_slot(self):
        assert height(vp([[1], [], []])) == 0

    def test_mixed_slots(self):
        # max(3*1+0, 3*0+2) = 3
        assert height(vp([[0, 1], [], [1]])) == 3

    def test_zero_polynomial(self):
        assert height(VectorPolynomial.zero(3)) == MINUS_INF

    def test_z_shift_adds_n(self):
        r = vp([[1, 2], [3], []])
        h = height(r)
        for l in (1, 2, 5):
            assert height(r.z_mul(l)) == h + 3 * l

    def test_subadditive(self):
        a = vp([[1], [2], []])
        b = vp([[0, 1], [], []])
        assert height(a + b) <= max(height(a), height(b))
        # unequal heights: equality
        assert height(a + b) == max(height(a), height(b))


class TestCanonical:
    def test_index2_n3(self):
        assert canonical_e(2, 3).comps == ((), (1.0 + 0j,), ())

    def test_index4_n3(self):
        assert canonical_e(4, 3).comps == ((0j, 1.0 + 0j), (), ())

    def test_index7_n3(self):
        e = canonical_e(7, 3)
        assert e.comps == ((0j, 0j, 1.0 + 0j), (), ())
        assert height(e) == 6

    @pytest.mark.parametrize("h", range(0, 31))
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_realizes_every_height(self, h, n):
        assert height(canonical_e(h + 1, n)) == h

    def test_leading_slot_inverts(self):
        for n in (1, 2, 4):
            for h in range(25):
                i, k = leading_slot(h, n)
                assert n * k + i - 1 == h
                assert 1 <= i <= n


class TestEvaluate:
    def test_linear(self):
        r = vp([[0, 1], [], [1]])
        assert np.allclose(r.evaluate(2.0), [2.0, 0.0, 1.0])

    def test_zero(self):
        assert np.allclose(VectorPolynomial.zero(2).evaluate(3.7), [0, 0])

    def test_flip2_q1_root(self):
        # 1 - z^2 vanishes at 1
        q1 = vp([[1, 0, -1]])
        assert q1.evaluate(1.0)[0] == pytest.approx(0.0)
        assert q1.evaluate(2.0)[0] == pytest.approx(-3.0)


class TestOps:
    def test_z_mul_shifts(self):
        r = vp([[1], [], []])
        assert r.z_mul().comps == ((0j, 1.0 + 0j), (), ())

    def test_additive_cancellation(self):
        a = vp([[1], []])
        b = vp([[-1], []])
        assert (a + b).is_zero

    def test_scalar_poly_mul_height(self):
        b = vp([[], [1]])
        out = b.scalar_poly_mul([0, 0, 1])  # times z^2
        assert out.comps == ((), (0j, 0j, 1.0 + 0j))
        assert height(out) == 5

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            vp([[1], []]) + vp([[1], [], []])

    def test_conjugate_coeffs(self):
        r = vp([[1 + 2j], [3 - 1j]])
        assert r.conjugate_coeffs().comps == (((1 - 2j),), ((3 + 1j),))


class TestCoeffVector:
    def test_round_trip(self):
        r = vp([[1, 2], [3], [0, 0, 4]])
        coords = to_coeff_vector(r, 12)
        back = from_coeff_vector(coords, 3)
        assert poly_allclose(r, back, tol=0)

    def test_window_too_small(self):
        r = vp([[0, 0, 1]])
        with pytest.raises(ValueError):
            to_coeff_vector(r, 2)


coeff = st.complex_numbers(
    min_magnitude=0, max_magnitude=1e6, allow_nan=False, allow_infinity=False
)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(min_value=1, max_value=4).flatmap(
        lambda n: st.tuples(
            st.just(n),
            st.lists(
                st.lists(coeff, max_size=6), min_size=n, max_size=n
            ),
        )
    ),
    st.integers(min_value=1, max_value=4),
)
def test_height_shift_law(n_comps, l):
    n, comps = n_comps
    r = VectorPolynomial.from_components(comps, n)
    h = height(r)
    shifted = height(r.z_mul(l))
    if h == MINUS_INF:
        assert shifted == MINUS_INF
    else:
        assert shifted == h + n * l


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=1, max_value=4), st.integers(min_value=1, max_value=40))
def test_coeff_vector_round_trip(n, length):
    rng = np.random.default_rng(length * 7 + n)
    coords = rng.normal(size=length) + 1j * rng.normal(size=length)
    r = from_coeff_vector(coords, n, tol=0.0)
    assert np.allclose(to_coeff_vector(r, length), coords)
