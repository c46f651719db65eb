import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rissac.numerics import (
    SingularMatrixError,
    cmat_hermitian,
    cmat_inverse,
    cmat_mul,
    frobenius_norm,
    kron_vec,
    make_rng,
    sample_cn01,
)


def rand_c(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def loop_matmul(a, b):
    rows, inner = a.shape
    cols = b.shape[1]
    out = [[0j] * cols for _ in range(rows)]
    for i in range(rows):
        for j in range(cols):
            acc = 0j
            for k in range(inner):
                acc += complex(a[i, k]) * complex(b[k, j])
            out[i][j] = acc
    return np.array(out)


class TestMul:
    def test_identity(self):
        b = rand_c(np.random.default_rng(0), 2, 3)
        np.testing.assert_array_equal(cmat_mul(np.eye(2), b), b)

    def test_i_squared(self):
        assert cmat_mul([[1j]], [[1j]])[0, 0] == -1

    def test_matches_triple_loop(self):
        rng = np.random.default_rng(1)
        a, b = rand_c(rng, 3, 4), rand_c(rng, 4, 2)
        np.testing.assert_allclose(cmat_mul(a, b), loop_matmul(a, b), rtol=0, atol=1e-13)

    def test_shape_mismatch_reports_both_shapes(self):
        with pytest.raises(ValueError, match=r"\(3, 4\).*\(3, 2\)"):
            cmat_mul(np.zeros((3, 4)), np.zeros((3, 2)))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
    def test_associative(self, seed, m, n, p, q):
        rng = np.random.default_rng(seed)
        a, b, c = rand_c(rng, m, n), rand_c(rng, n, p), rand_c(rng, p, q)
        left = cmat_mul(cmat_mul(a, b), c)
        right = cmat_mul(a, cmat_mul(b, c))
        assert frobenius_norm(left - right) <= 1e-10 * max(frobenius_norm(left), 1.0)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5), st.integers(1, 5))
    def test_hermitian_of_product(self, seed, m, n, p):
        rng = np.random.default_rng(seed)
        a, b = rand_c(rng, m, n), rand_c(rng, n, p)
        np.testing.assert_allclose(
            cmat_hermitian(cmat_mul(a, b)), cmat_mul(cmat_hermitian(b), cmat_hermitian(a)), atol=1e-12
        )


class TestHermitian:
    def test_real_symmetric_fixed(self):
        a = np.array([[1.0, 2.0], [2.0, 5.0]])
        np.testing.assert_array_equal(cmat_hermitian(a), a)

    def test_conjugates(self):
        assert cmat_hermitian([[1j]])[0, 0] == -1j

    def test_involution(self):
        a = rand_c(np.random.default_rng(2), 4, 3)
        assert cmat_hermitian(a).shape == (3, 4)
        np.testing.assert_array_equal(cmat_hermitian(cmat_hermitian(a)), a)


class TestInverse:
    def test_identity(self):
        np.testing.assert_array_equal(cmat_inverse(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(cmat_inverse(np.diag([2, 1j])), np.diag([0.5, -1j]), atol=1e-15)

    def test_needs_pivoting(self):
        a = np.array([[0, 1], [1, 0]], dtype=complex)
        np.testing.assert_array_equal(cmat_inverse(a), a)

    def test_hermitian_plus_ridge_residual(self):
        rng = np.random.default_rng(3)
        b = rand_c(rng, 4, 4)
        a = b @ b.conj().T + 0.1 * np.eye(4)
        assert frobenius_norm(a @ cmat_inverse(a) - np.eye(4)) < 1e-10

    @pytest.mark.parametrize("cond", [1e2, 1e5, 1e7, 9.9e7])
    def test_residual_for_conditioned(self, cond):
        rng = np.random.default_rng(int(cond))
        q1, _ = np.linalg.qr(rand_c(rng, 5, 5))
        q2, _ = np.linalg.qr(rand_c(rng, 5, 5))
        a = q1 @ np.diag(np.geomspace(1.0, 1.0 / cond, 5)) @ q2
        assert frobenius_norm(a @ cmat_inverse(a) - np.eye(5)) < 1e-10

    def test_batched_matches_single(self):
        rng = np.random.default_rng(4)
        stack = rand_c(rng, 6, 3, 3)
        inv = cmat_inverse(stack)
        for i in range(6):
            np.testing.assert_allclose(inv[i], cmat_inverse(stack[i]), atol=1e-13)
            assert frobenius_norm(stack[i] @ inv[i] - np.eye(3)) < 1e-10

    def test_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            cmat_inverse(np.array([[1, 2], [2, 4]], dtype=complex))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            cmat_inverse(np.zeros((2, 3)))


class TestNormAndKron:
    def test_frobenius_examples(self):
        assert frobenius_norm(np.zeros((3, 2))) == 0.0
        assert frobenius_norm(np.eye(4)) == 2.0
        assert frobenius_norm([[3, 4j]]) == 5.0

    def test_kron_examples(self):
        b = np.array([1 + 2j, 3j])
        np.testing.assert_array_equal(kron_vec([1], b), b)
        np.testing.assert_array_equal(kron_vec([1, -1], [1, 1]), [1, 1, -1, -1])

    def test_kron_layout(self):
        a, b = np.array([2, 3j]), np.array([1, 5, 7j])
        k = kron_vec(a, b)
        for i in range(2):
            for j in range(3):
                assert k[i * 3 + j] == a[i] * b[j]

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
    def test_kron_norm_multiplicative(self, seed, n, m):
        rng = np.random.default_rng(seed)
        a, b = rand_c(rng, n), rand_c(rng, m)
        assert np.isclose(np.linalg.norm(kron_vec(a, b)), np.linalg.norm(a) * np.linalg.norm(b), rtol=1e-12)


class TestSampling:
    def test_cn01_moments(self):
        z = sample_cn01(make_rng(7), 100_000)
        assert abs(z.mean()) < 0.02
        assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.05
        assert abs(z.real.var() - 0.5) < 0.02
        assert abs(z.imag.var() - 0.5) < 0.02
        assert abs(np.corrcoef(z.real, z.imag)[0, 1]) < 0.02

    def test_same_seed_same_sequence(self):
        a = sample_cn01(make_rng(11, 3), 50)
        b = sample_cn01(make_rng(11, 3), 50)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, sample_cn01(make_rng(11, 4), 50))

    def test_scalar_draw(self):
        assert isinstance(sample_cn01(make_rng(0)), complex)
