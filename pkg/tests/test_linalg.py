import numpy as np
import pytest
from hypothesis import given, strategies as st

from quagent.linalg import (
    DimensionError,
    NotHermitianError,
    embed,
    entropy_bits,
    evolve,
    herm_eig,
    kron,
    partial_trace,
    permute_factors,
    swap_operator,
    trace_distance,
)

from conftest import random_hermitian, random_rho, random_unitary

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def kron_loop(a, b):
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), dtype=complex)
    for i1 in range(a.shape[0]):
        for j1 in range(a.shape[1]):
            for i2 in range(b.shape[0]):
                for j2 in range(b.shape[1]):
                    out[i1 * b.shape[0] + i2, j1 * b.shape[1] + j2] = a[i1, j1] * b[i2, j2]
    return out


def ptrace_loop(m, d0, d1, keep):
    if keep == 0:
        out = np.zeros((d0, d0), dtype=complex)
        for i in range(d0):
            for j in range(d0):
                for k in range(d1):
                    out[i, j] += m[i * d1 + k, j * d1 + k]
    else:
        out = np.zeros((d1, d1), dtype=complex)
        for i in range(d1):
            for j in range(d1):
                for k in range(d0):
                    out[i, j] += m[k * d1 + i, k * d1 + j]
    return out


def taylor_expm(a, terms=30):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ a / n
        out = out + term
    return out


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal(self):
        assert np.array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))

    def test_matches_index_loop(self, rng):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
        np.testing.assert_allclose(kron(a, b), kron_loop(a, b), atol=1e-14)

    @given(seeds)
    def test_associative(self, seed):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3))
        np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)


class TestPartialTrace:
    def test_product_state(self, rng):
        rho, sigma = random_rho(2, rng), random_rho(3, rng)
        np.testing.assert_allclose(partial_trace(kron(rho, sigma), [2, 3], [0]), rho, atol=1e-12)

    def test_bell_marginal_is_mixed(self):
        phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
        red = partial_trace(np.outer(phi, phi), [2, 2], [1])
        np.testing.assert_allclose(red, np.eye(2) / 2, atol=1e-15)

    @pytest.mark.parametrize("keep", [0, 1])
    def test_matches_loop(self, rng, keep):
        m = random_rho(4, rng)
        np.testing.assert_allclose(partial_trace(m, [2, 2], [keep]), ptrace_loop(m, 2, 2, keep), atol=1e-14)

    def test_uneven_dims_loop(self, rng):
        m = random_rho(6, rng)
        np.testing.assert_allclose(partial_trace(m, [3, 2], [1]), ptrace_loop(m, 3, 2, 1), atol=1e-14)

    def test_trace_preserved(self, rng):
        m = random_rho(12, rng)
        for keep in ([0], [1], [2], [0, 2], [1, 2]):
            assert abs(np.trace(partial_trace(m, [2, 3, 2], keep)) - 1) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4), [2, 3], [0])

    @given(seeds)
    def test_product_property(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_rho(2, rng)
        sigma = 0.7 * random_rho(2, rng)  # non-unit trace is fine here
        np.testing.assert_allclose(
            partial_trace(kron(rho, sigma), [2, 2], [0]), rho * np.trace(sigma), atol=1e-12
        )


class TestPermuteEmbed:
    def test_permute_kron(self, rng):
        a, b, c = random_rho(2, rng), random_rho(3, rng), random_rho(2, rng)
        out = permute_factors(kron(kron(a, b), c), [2, 3, 2], [2, 0, 1])
        np.testing.assert_allclose(out, kron(kron(c, a), b), atol=1e-14)

    def test_embed_noncontiguous(self, rng):
        op = random_unitary(4, rng)
        big = embed(op, [2, 2, 2], [2, 0])
        # kron(op, I) puts op on factors (0, 1); move them to (2, 0)
        expected = permute_factors(kron(op, np.eye(2)), [2, 2, 2], [1, 2, 0])
        np.testing.assert_allclose(big, expected, atol=1e-14)

    def test_swap_definition(self):
        s = swap_operator(3)
        for k in range(3):
            for l in range(3):
                v = np.zeros(9)
                v[k * 3 + l] = 1
                w = np.zeros(9)
                w[l * 3 + k] = 1
                np.testing.assert_array_equal(s @ v, w)


class TestHermEig:
    def test_diagonal(self):
        w, _ = herm_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_allclose(w, [1, 2, 3])

    def test_pauli_x(self):
        w, _ = herm_eig(np.array([[0, 1], [1, 0]]))
        np.testing.assert_allclose(w, [-1, 1], atol=1e-15)

    def test_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            herm_eig(np.array([[0, 1], [0, 0]]))

    @given(seeds, st.integers(2, 8))
    def test_reconstruction_and_orthonormality(self, seed, n):
        h = random_hermitian(n, np.random.default_rng(seed))
        dec = herm_eig(h)
        assert np.linalg.norm(dec.reconstruct() - h) < 1e-10
        v = dec.eigenvectors
        assert np.linalg.norm(v.conj().T @ v - np.eye(n)) < 1e-10
        assert np.all(np.diff(dec.eigenvalues) >= 0)


class TestEvolve:
    def test_zero_time(self, rng):
        np.testing.assert_allclose(evolve(random_hermitian(4, rng), 0.0), np.eye(4), atol=1e-14)

    def test_swap_half_pi(self):
        s = swap_operator(2)
        t = np.pi / 2
        # S^2 = I so the series collapses to cos(t) I - i sin(t) S
        oracle = np.cos(t) * np.eye(4) - 1j * np.sin(t) * s
        np.testing.assert_allclose(evolve(s, t), oracle, atol=1e-14)
        np.testing.assert_allclose(evolve(s, t), -1j * s, atol=1e-14)

    def test_taylor_series(self, rng):
        h = random_hermitian(4, rng) / 3
        np.testing.assert_allclose(evolve(h, 0.7), taylor_expm(-0.7j * h), atol=1e-8)

    @given(seeds)
    def test_inverse(self, seed):
        h = random_hermitian(5, np.random.default_rng(seed))
        u = evolve(h, 1.3)
        assert np.linalg.norm(u @ evolve(h, -1.3) - np.eye(5)) < 1e-10
        assert np.linalg.norm(u @ u.conj().T - np.eye(5)) < 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            evolve(np.array([[0, 1], [0, 0]]), 1.0)


class TestEntropy:
    def test_pure(self, rng):
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        v /= np.linalg.norm(v)
        assert abs(entropy_bits(np.outer(v, v.conj()))) < 1e-12

    def test_mixed_qubit(self):
        assert entropy_bits(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-15)

    def test_binary_entropy(self):
        p = 0.25
        h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
        assert h == pytest.approx(0.811278124459, abs=1e-12)
        assert entropy_bits(np.diag([0.25, 0.75])) == pytest.approx(h, abs=1e-12)

    @given(seeds, st.integers(2, 5))
    def test_bounds(self, seed, n):
        s = entropy_bits(random_rho(n, np.random.default_rng(seed)))
        assert -1e-12 <= s <= np.log2(n) + 1e-9

    @given(seeds)
    def test_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        rho, u = random_rho(4, rng), random_unitary(4, rng)
        assert abs(entropy_bits(u @ rho @ u.conj().T) - entropy_bits(rho)) < 1e-9

    @given(seeds)
    def test_additive_on_products(self, seed):
        rng = np.random.default_rng(seed)
        rho, sigma = random_rho(2, rng), random_rho(3, rng)
        assert abs(entropy_bits(kron(rho, sigma)) - entropy_bits(rho) - entropy_bits(sigma)) < 1e-9


def test_trace_distance_orthogonal():
    assert trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
