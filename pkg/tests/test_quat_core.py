import numpy as np
import pytest
from numpy.testing import assert_allclose
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lagrangian_humbilical_library.quat_core import (
    ONE, STRUCTURES, DimensionMismatchError, Quaternion, StructureTag,
    apply_structure, conjugate, hamilton, hvector, inner, norm, quat_conj,
    quat_mul, quat_norm)

UNIT_FLOATS = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)
QUATERNIONS = st.tuples(UNIT_FLOATS, UNIT_FLOATS, UNIT_FLOATS, UNIT_FLOATS).map(lambda c: Quaternion(*c))
HVECTORS = arrays(np.float64, (3, 4), elements=UNIT_FLOATS)

i = Quaternion(0.0, 1.0, 0.0, 0.0)
j = Quaternion(0.0, 0.0, 1.0, 0.0)
k = Quaternion(0.0, 0.0, 0.0, 1.0)


class TestHamiltonProduct:

    def test_unit_products(self):
        assert quat_mul(i, j).isclose(k)
        assert quat_mul(j, k).isclose(i)
        assert quat_mul(k, i).isclose(j)
        assert quat_mul(j, i).isclose(-k)
        assert quat_mul(i, i).isclose(Quaternion(-1.0))

    def test_one_is_identity(self):
        q = Quaternion(1.0, 2.0, 3.0, 4.0)
        assert quat_mul(Quaternion(1.0), q).isclose(q)
        assert quat_mul(q, Quaternion(1.0)).isclose(q)

    def test_sum_times_difference(self):
        # (i + j)(i - j) = -2k
        assert quat_mul(i + j, i - j).isclose(-2.0 * k)

    def test_conjugate_examples(self):
        assert quat_conj(Quaternion(1.0, 2.0, 3.0, 4.0)).isclose(Quaternion(1.0, -2.0, -3.0, -4.0))
        q = Quaternion(1.0, 2.0, 3.0, 4.0)
        assert quat_mul(q, quat_conj(q)).isclose(Quaternion(30.0))

    def test_vectorized_matches_scalar(self):
        p = np.array([[1.0, 2.0, 3.0, 4.0], [0.5, -1.0, 0.0, 2.0]])
        q = np.array([[0.0, 1.0, -1.0, 0.5], [2.0, 0.0, 1.0, -3.0]])
        batch = hamilton(p, q)
        for row in range(2):
            single = quat_mul(Quaternion.from_array(p[row]), Quaternion.from_array(q[row]))
            assert_allclose(batch[row], single.as_array(), atol=1e-14)

    @given(QUATERNIONS, QUATERNIONS, QUATERNIONS)
    def test_associative(self, p, q, r):
        left = quat_mul(quat_mul(p, q), r)
        right = quat_mul(p, quat_mul(q, r))
        assert left.isclose(right, atol=1e-12)

    @given(QUATERNIONS, QUATERNIONS)
    def test_norm_is_multiplicative(self, p, q):
        assert abs(quat_mul(p, q).norm() - p.norm() * q.norm()) <= 1e-12

    @given(QUATERNIONS, QUATERNIONS)
    def test_conjugate_reverses_products(self, p, q):
        assert quat_conj(quat_mul(p, q)).isclose(quat_mul(quat_conj(q), quat_conj(p)), atol=1e-12)

    @given(QUATERNIONS)
    def test_norm_from_conjugate(self, q):
        product = quat_mul(q, quat_conj(q))
        assert product.isclose(Quaternion(q.norm2()), atol=1e-12)


class TestStructureTag:

    @pytest.mark.parametrize("left, right, sign, tag", [
        (StructureTag.I, StructureTag.J, 1, StructureTag.K),
        (StructureTag.J, StructureTag.I, -1, StructureTag.K),
        (StructureTag.J, StructureTag.K, 1, StructureTag.I),
        (StructureTag.K, StructureTag.J, -1, StructureTag.I),
        (StructureTag.K, StructureTag.I, 1, StructureTag.J),
        (StructureTag.I, StructureTag.K, -1, StructureTag.J),
    ])
    def test_composition_table(self, left, right, sign, tag):
        assert left * right == (sign, tag)

    def test_square_is_not_a_structure(self):
        with pytest.raises(ValueError):
            StructureTag.I * StructureTag.I


class TestAmbientSpace:

    def test_hvector_from_quaternions(self):
        v = hvector([i, Quaternion(1.0)])
        assert v.shape == (2, 4)
        assert_allclose(v[1], ONE)

    @pytest.mark.parametrize("bad", [[[1.0, 2.0, 3.0]], np.zeros((2, 2, 4))])
    def test_hvector_rejects_bad_shape(self, bad):
        with pytest.raises(ValueError):
            hvector(bad)

    def test_inner_examples(self):
        v = hvector([i, j])
        assert inner(v, v) == pytest.approx(2.0)
        assert inner(hvector([ONE, [0, 0, 0, 0]]), hvector([[0, 0, 0, 0], ONE])) == 0.0
        assert norm(hvector([[3.0, 0, 0, 0], [0, 0, 4.0, 0]])) == pytest.approx(5.0)

    def test_inner_batches(self):
        u = np.zeros((5, 2, 4))
        u[:, 0, 0] = np.arange(5)
        values = inner(u, hvector([ONE, ONE]))
        assert_allclose(values, np.arange(5.0))

    def test_inner_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            inner(np.zeros((2, 4)), np.zeros((3, 4)))

    def test_structure_on_real_vector(self):
        v = hvector([ONE, [2.0, 0.0, 0.0, 0.0]])
        assert_allclose(apply_structure(StructureTag.I, v), [[0, 1, 0, 0], [0, 2, 0, 0]])

    def test_structures_compose_like_left_multiplication(self):
        v = hvector([[0.3, -1.0, 2.0, 0.5], [1.0, 0.0, -0.5, 0.25]])
        IJ = apply_structure(StructureTag.I, apply_structure(StructureTag.J, v))
        assert_allclose(IJ, apply_structure(StructureTag.K, v), atol=1e-14)

    @given(HVECTORS)
    def test_structures_square_to_minus_one(self, v):
        for phi in STRUCTURES:
            assert_allclose(apply_structure(phi, apply_structure(phi, v)), -v, atol=1e-12)

    @settings(max_examples=50)
    @given(HVECTORS, HVECTORS)
    def test_structures_are_isometries(self, u, v):
        for phi in STRUCTURES:
            pu, pv = apply_structure(phi, u), apply_structure(phi, v)
            assert abs(inner(pu, pv) - inner(u, v)) <= 1e-12
            # φ is skew: <φu, u> = 0.
            assert abs(inner(pu, u)) <= 1e-12

    @given(HVECTORS)
    def test_norm_matches_component_norms(self, v):
        assert abs(norm(v) ** 2 - float(np.sum(quat_norm(v) ** 2))) <= 1e-12

    def test_conjugate_array(self):
        assert_allclose(conjugate([[1.0, 2.0, 3.0, 4.0]]), [[1.0, -2.0, -3.0, -4.0]])
