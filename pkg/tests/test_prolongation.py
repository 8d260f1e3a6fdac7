import numpy as np
import pytest

from rigidity_lab.prolongation import (
    FiniteType,
    InfiniteType,
    MatrixAlgebra,
    UnknownBeyond,
    builtin_algebra,
    curve_stabilizer_algebra,
    find_rank1,
    finite_type,
    membership_residual,
    prolongation_space,
    prolongation_unknowns,
    rank1_witness_prolongation,
)
from conftest import random_well_conditioned


def rank1_matrix(rng, n):
    return np.outer(rng.standard_normal(n), rng.standard_normal(n))


def rank_at_least_2(rng, n):
    while True:
        m = rng.standard_normal((n, n))
        s = np.linalg.svd(m, compute_uv=False)
        if s[1] > 0.2 * s[0]:
            return m


class TestMatrixAlgebra:
    def test_orthonormal_basis_spans_generators(self, rng):
        gens = [rng.standard_normal((3, 3)) for _ in range(2)]
        gens.append(gens[0] + 2.0 * gens[1])  # dependent
        h = MatrixAlgebra(3, gens)
        assert h.dim == 2
        b = h.orthonormalized_basis.reshape(h.dim, -1)
        gram = b @ b.T
        assert np.max(np.abs(gram - np.eye(h.dim))) < 1e-12
        for g in gens:
            assert h.projection_residual(g) < 1e-10 * np.linalg.norm(g)


class TestProlongationSpace:
    def test_so3_first_prolongation_vanishes(self):
        assert prolongation_space(builtin_algebra("so", 3), 1).dim == 0

    def test_co3_dims(self):
        co3 = builtin_algebra("co", 3)
        assert prolongation_space(co3, 1).dim == 3
        assert prolongation_space(co3, 2).dim == 0

    def test_rank1_span_has_first_prolongation(self, rng):
        r = rank1_matrix(rng, 3)
        space = prolongation_space(builtin_algebra("one_param", r_matrix=r), 1)
        assert space.dim >= 1

    def test_basis_elements_pass_membership(self):
        co3 = builtin_algebra("co", 3)
        space = prolongation_space(co3, 1)
        for t in space.basis:
            assert membership_residual(co3, t) < 1e-8

    def test_size_cap(self):
        big = builtin_algebra("so", 12)
        with pytest.raises(ValueError, match="cap"):
            prolongation_space(big, 4)

    def test_conjugation_invariance(self, rng):
        co3 = builtin_algebra("co", 3)
        r = rank1_matrix(rng, 3)
        span_r = builtin_algebra("one_param", r_matrix=r)
        for _ in range(10):
            g = random_well_conditioned(rng, 3)
            for h in (co3, span_r):
                for d in (1, 2):
                    assert (
                        prolongation_space(h.conjugate(g), d).dim
                        == prolongation_space(h, d).dim
                    )


class TestFiniteType:
    def test_rank2_one_param_is_type_1(self, rng):
        r = np.zeros((3, 3))
        r[0, 1] = 1.0
        r[1, 0] = -1.0  # rank 2
        result = finite_type(builtin_algebra("one_param", r_matrix=r))
        assert isinstance(result, FiniteType)
        assert result.order == 1
        assert result.verified_next_order == 2

    def test_lightlike_orthogonal_is_infinite(self):
        result = finite_type(builtin_algebra("lightlike_orth", 4), max_order=2)
        assert isinstance(result, InfiniteType)
        # every rank-one element maps into the kernel direction
        v = result.witness.v
        assert abs(v[3]) > 0.99 * np.linalg.norm(v)

    def test_so4_is_type_1(self):
        result = finite_type(builtin_algebra("so", 4), max_order=2)
        assert isinstance(result, FiniteType)
        assert result.order == 1

    def test_co2_unknown_within_cap(self):
        # every nonzero element of co(2) is invertible, so no rank-one
        # witness exists, and the prolongations never vanish at small orders
        result = finite_type(builtin_algebra("co", 2), max_order=3)
        assert isinstance(result, UnknownBeyond)
        assert all(dim > 0 for dim in result.dims.values())

    def test_dichotomy_over_random_matrices(self, rng):
        for trial in range(20):
            n = 3 if trial % 2 == 0 else 4
            r1 = rank1_matrix(rng, n)
            res = finite_type(builtin_algebra("one_param", r_matrix=r1), seed=trial)
            assert isinstance(res, InfiniteType)
            w = res.witness
            l1 = rank1_witness_prolongation(w.a, w.v, 1)
            assert membership_residual(builtin_algebra("one_param", r_matrix=r1), l1) < 1e-8

            r2 = rank_at_least_2(rng, n)
            res2 = finite_type(builtin_algebra("one_param", r_matrix=r2), seed=trial)
            assert isinstance(res2, FiniteType)
            assert res2.order == 1

    def test_max_order_cap(self):
        with pytest.raises(ValueError):
            finite_type(builtin_algebra("so", 3), max_order=9)


class TestFindRank1:
    def test_rank1_generator_found(self):
        h = builtin_algebra("one_param", r_matrix=np.outer([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]))
        w = find_rank1(h)
        assert w is not None
        assert w.sigma_ratio < 1e-8

    def test_so3_none_found(self):
        assert find_rank1(builtin_algebra("so", 3)) is None

    def test_lightlike_witness_factorization(self):
        h = builtin_algebra("lightlike_orth", 4)
        w = find_rank1(h)
        assert w is not None
        # the factorization reproduces the matrix and stays in the subspace
        assert np.max(np.abs(np.outer(w.v, w.a) - w.matrix)) < 1e-12
        assert h.projection_residual(w.matrix) < 1e-8 * np.linalg.norm(w.matrix)

    def test_deterministic_in_seed(self):
        h = builtin_algebra("lightlike_orth", 4)
        w1 = find_rank1(h, trials=16, seed=7)
        w2 = find_rank1(h, trials=16, seed=7)
        assert np.array_equal(w1.coefficients, w2.coefficients)


class TestWitnessProlongation:
    def test_formula_small(self):
        t = rank1_witness_prolongation([1.0, 0.0], [1.0, 0.0], 1)
        # L(x, y) = x_1 y_1 e_1
        assert t.evaluate([1.0, 0.0], [1.0, 0.0])[0] == pytest.approx(1.0)
        assert np.allclose(t.evaluate([0.0, 1.0], [1.0, 0.0]), 0.0)

    def test_degree2_membership(self):
        t = rank1_witness_prolongation([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 2)
        h = builtin_algebra("one_param", r_matrix=np.outer([0.0, 1.0, 0.0], [1.0, 0.0, 0.0]))
        assert membership_residual(h, t) < 1e-12
        x = np.array([1.0, 2.0, 3.0])
        assert np.allclose(t.evaluate(x, x, x), np.array([0.0, 1.0, 0.0]))

    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_random_direction_all_orders(self, rng, d):
        a = rng.standard_normal(3)
        v = rng.standard_normal(3)
        t = rank1_witness_prolongation(a, v, d)
        assert t.norm() > 0
        h = builtin_algebra("one_param", r_matrix=np.outer(v, a))
        assert membership_residual(h, t) < 1e-10 * max(1.0, t.norm())

    def test_zero_inputs_rejected(self):
        with pytest.raises(ValueError):
            rank1_witness_prolongation([0.0, 0.0], [1.0, 0.0], 1)
        with pytest.raises(ValueError):
            rank1_witness_prolongation([1.0, 0.0], [0.0, 0.0], 1)


class TestCurveStabilizer:
    def test_conformal_ray(self):
        samples = [(s * np.eye(3), np.eye(3)) for s in (0.5, 1.0, 2.0)]
        h = curve_stabilizer_algebra(samples)
        assert h.dim == 4
        # contains scalings and rotations
        assert h.projection_residual(np.eye(3)) < 1e-10
        rot = np.zeros((3, 3))
        rot[0, 1], rot[1, 0] = 1.0, -1.0
        assert h.projection_residual(rot) < 1e-10

    def test_axis_scaling_family(self):
        samples = [
            (np.diag([s, 1.0, 1.0]), np.diag([1.0, 0.0, 0.0])) for s in (0.5, 1.0, 2.0)
        ]
        h = curve_stabilizer_algebra(samples)
        assert h.dim == 2
        assert h.projection_residual(np.diag([1.0, 0.0, 0.0])) < 1e-10
        rot23 = np.zeros((3, 3))
        rot23[1, 2], rot23[2, 1] = -1.0, 1.0
        assert h.projection_residual(rot23) < 1e-10

    def test_single_sample_conformal_algebra(self, rng):
        b = np.eye(3) + 0.2 * rank1_matrix(rng, 3)
        b = (b + b.T) / 2.0 + 3.0 * np.eye(3)
        h = curve_stabilizer_algebra([(b, b)])
        assert h.dim == 3 * 2 // 2 + 1  # n(n-1)/2 + 1

    def test_empty_and_zero_tangent_rejected(self):
        with pytest.raises(ValueError):
            curve_stabilizer_algebra([])
        with pytest.raises(ValueError, match="zero"):
            curve_stabilizer_algebra([(np.eye(2), np.zeros((2, 2)))])


class TestMonotoneVanishing:
    def test_vanishing_verified_at_next_order(self):
        result = finite_type(builtin_algebra("co", 3), max_order=3)
        assert isinstance(result, FiniteType)
        assert result.order == 2
        assert result.dims[2] == 0
        assert result.verified_next_order == 3
        assert result.dims[3] == 0


def test_unknown_count_formula():
    assert prolongation_unknowns(3, 1) == 3 * 6
    assert prolongation_unknowns(4, 2) == 4 * 20
