import numpy as np
import pytest
from hypothesis import given, strategies as st

from namrqed.errors import BasisMismatch
from namrqed.hilbert import (BasisSpec, LabeledOperator, Truncation, check_same_basis,
                             enumerate_basis, ladder_ops, product_op)

specs = st.builds(BasisSpec, st.sampled_from(list(Truncation)), st.integers(0, 6))
fock_specs = st.builds(BasisSpec.fock, st.integers(0, 6))


class TestEnumerate:
    def test_total_one(self):
        assert enumerate_basis(BasisSpec.total(1)) == [(0, 0), (0, 1), (1, 0)]

    def test_total_zero(self):
        assert enumerate_basis(BasisSpec.total(0)) == [(0, 0)]

    def test_fock_two(self):
        assert enumerate_basis(BasisSpec.fock(2)) == [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]

    def test_total_two_ordering(self):
        assert enumerate_basis(BasisSpec.total(2)) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1)]

    @given(st.integers(0, 20))
    def test_dimensions(self, n):
        assert BasisSpec.total(n).dim == (2 * n + 1 if n >= 1 else 1)
        assert BasisSpec.fock(n).dim == 2 * (n + 1)

    @given(specs)
    def test_labels_valid_and_unique(self, spec):
        labels = enumerate_basis(spec)
        assert len(set(labels)) == len(labels) == spec.dim
        assert all(j in (0, 1) and k >= 0 for j, k in labels)
        assert all(spec.index(lab) == i for i, lab in enumerate(labels))

    def test_negative_cutoff(self):
        with pytest.raises(ValueError):
            BasisSpec.total(-1)

    def test_string_scheme(self):
        assert BasisSpec("fock", 1) == BasisSpec.fock(1)


class TestLadder:
    def test_total_one_annihilator(self):
        a = ladder_ops(BasisSpec.total(1)).a
        assert a.element((0, 0), (0, 1)) == 1
        assert np.count_nonzero(a.matrix) == 1

    def test_fock_two_creation_norm(self):
        ad = ladder_ops(BasisSpec.fock(2)).a_dag
        assert ad.element((0, 2), (0, 1)) == pytest.approx(np.sqrt(2), abs=1e-15)

    def test_sigma_plus_raises_qubit(self):
        ops = ladder_ops(BasisSpec.fock(1))
        assert ops.sigma_plus.element((1, 1), (0, 1)) == 1

    @given(fock_specs)
    def test_spin_commutator(self, spec):
        ops = ladder_ops(spec)
        sp, sm = ops.sigma_plus.matrix, ops.sigma_minus.matrix
        np.testing.assert_array_equal(sp @ sm - sm @ sp, ops.sigma_z.matrix)

    @given(fock_specs)
    def test_boson_commutator_defect_on_top_rung(self, spec):
        ops = ladder_ops(spec)
        a, ad = ops.a.matrix, ops.a_dag.matrix
        top = np.diag([1.0 if k == spec.cutoff else 0.0 for _, k in spec.labels])
        expected = np.eye(spec.dim) - (spec.cutoff + 1) * top
        np.testing.assert_allclose(a @ ad - ad @ a, expected, atol=1e-14)

    @given(specs)
    def test_sigma_z_identity(self, spec):
        ops = ladder_ops(spec)
        np.testing.assert_array_equal(
            ops.sigma_z.matrix, 2 * ops.sigma_plus.matrix @ ops.sigma_minus.matrix - np.eye(spec.dim))

    @given(specs)
    def test_adjoint_pairs(self, spec):
        ops = ladder_ops(spec)
        np.testing.assert_array_equal(ops.a_dag.matrix, ops.a.matrix.conj().T)
        np.testing.assert_array_equal(ops.sigma_plus.matrix, ops.sigma_minus.matrix.conj().T)

    @given(specs)
    def test_number_operator_diagonal(self, spec):
        n_op = product_op(spec, "sigma_plus", "sigma_minus").matrix + product_op(spec, "a_dag", "a").matrix
        np.testing.assert_allclose(n_op, np.diag([j + k for j, k in spec.labels]), atol=1e-14)


class TestProductOp:
    def test_coupling_survives_projection(self):
        spec = BasisSpec.total(1)
        a_sp = product_op(spec, "a", "sigma_plus")
        assert a_sp.element((1, 0), (0, 1)) == 1
        # the naive product of projected factors loses it
        ops = ladder_ops(spec)
        assert (ops.a @ ops.sigma_plus).element((1, 0), (0, 1)) == 0

    def test_number_operator_on_top_level(self):
        spec = BasisSpec.total(2)
        assert product_op(spec, "a_dag", "a").element((0, 2), (0, 2)) == pytest.approx(2)

    def test_unknown_factor(self):
        with pytest.raises((KeyError, ValueError)):
            product_op(BasisSpec.total(1), "b")


class TestLabeledOperator:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            LabeledOperator(BasisSpec.total(1), np.eye(2))

    def test_read_only(self):
        op = ladder_ops(BasisSpec.total(1)).a
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5

    def test_basis_mismatch(self):
        a1 = ladder_ops(BasisSpec.total(1)).a
        a2 = ladder_ops(BasisSpec.total(2)).a
        with pytest.raises(BasisMismatch):
            a1 @ a2
        with pytest.raises(BasisMismatch):
            check_same_basis(a1, a2)
