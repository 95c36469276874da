"""Dense complex linear algebra on small multipartite Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Subsystem
structure is passed explicitly as a list of factor dimensions, ordered the
same way the factors appear in the tensor product.
"""

from __future__ import annotations

from math import prod
from typing import NamedTuple, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
EIGEN_CUTOFF = 1e-12


class DimensionError(ValueError):
    """Raised when matrix shapes disagree with the declared factor dimensions."""


class NotHermitianError(ValueError):
    """Raised when an operation requires a Hermitian matrix."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first argument as the slow index."""
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def _check_square(m: np.ndarray, dims: Sequence[int]) -> None:
    total = prod(dims)
    if m.shape != (total, total):
        raise DimensionError(
            f"matrix of shape {m.shape} does not match factor dims {tuple(dims)}"
        )


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original order regardless of the order in
    ``keep``.

    Args:
        m: Square matrix on the full product space.
        dims: Dimension of each tensor factor.
        keep: Indices of the factors to retain.

    Returns:
        The reduced matrix on the kept factors.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_square(m, dims)
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionError(f"keep indices {keep} out of range for {n} factors")

    t = m.reshape(dims + dims)
    # einsum letters: row index i_k, column index j_k; traced factors share a letter.
    letters = iter("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ")
    rows, cols = [], []
    for k in range(n):
        r = next(letters)
        rows.append(r)
        cols.append(next(letters) if k in keep else r)
    out = "".join(rows[k] for k in keep) + "".join(cols[k] for k in keep)
    reduced = np.einsum("".join(rows) + "".join(cols) + "->" + out, t)
    d_keep = prod(dims[k] for k in keep)
    return reduced.reshape(d_keep, d_keep)


def permute_factors(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of an operator.

    Factor ``perm[i]`` of the input becomes factor ``i`` of the output.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    _check_square(m, dims)
    n = len(dims)
    if sorted(perm) != list(range(n)):
        raise DimensionError(f"{perm} is not a permutation of {n} factors")
    t = m.reshape(dims + dims)
    t = t.transpose(list(perm) + [n + p for p in perm])
    total = prod(dims)
    return t.reshape(total, total)


def embed(op, dims: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    """Lift ``op`` acting on the ``targets`` factors to the full product space."""
    dims = [int(d) for d in dims]
    targets = [int(t) for t in targets]
    op = as_matrix(op)
    d_t = prod(dims[t] for t in targets)
    if op.shape != (d_t, d_t):
        raise DimensionError(f"operator shape {op.shape} does not fit targets {targets}")
    rest = [k for k in range(len(dims)) if k not in targets]
    big = np.kron(op, np.eye(prod(dims[k] for k in rest), dtype=complex))
    # big acts on factors ordered targets + rest; bring them back to natural order.
    order = targets + rest
    inverse = [order.index(k) for k in range(len(dims))]
    return permute_factors(big, [dims[k] for k in order], inverse)


def hermiticity_residual(m) -> float:
    m = as_matrix(m)
    return float(np.linalg.norm(m - dagger(m)))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and hermiticity_residual(m) <= tol


def herm_eig(h) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    h = as_matrix(h)
    if h.shape[0] != h.shape[1]:
        raise DimensionError(f"matrix of shape {h.shape} is not square")
    if not is_hermitian(h):
        raise NotHermitianError(
            f"matrix is not Hermitian (residual {hermiticity_residual(h):.3e})"
        )
    w, v = np.linalg.eigh((h + dagger(h)) / 2)
    return EigenDecomposition(w, v)


def evolve(h, t: float) -> np.ndarray:
    """Return ``exp(-i h t)`` for Hermitian ``h``."""
    w, v = herm_eig(h)
    return (v * np.exp(-1j * w * t)) @ dagger(v)


def unitarity_residual(u) -> float:
    u = as_matrix(u)
    return float(np.linalg.norm(u @ dagger(u) - np.eye(u.shape[0])))


def entropy_bits(rho) -> float:
    """Von Neumann entropy in bits.

    Eigenvalues at or below ``EIGEN_CUTOFF`` contribute nothing.
    """
    w = herm_eig(rho).eigenvalues
    w = w[w > EIGEN_CUTOFF]
    s = float(-np.sum(w * np.log2(w)))
    return max(s, 0.0)


def trace_norm(m) -> float:
    return float(np.sum(np.linalg.svd(as_matrix(m), compute_uv=False)))


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    return 0.5 * trace_norm(as_matrix(rho) - as_matrix(sigma))


def basis_vector(d: int, k: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[k] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def cyclic_shift(d: int, power: int = 1) -> np.ndarray:
    """Permutation matrix sending ``|j>`` to ``|j + power mod d>``."""
    m = np.zeros((d, d), dtype=complex)
    for j in range(d):
        m[(j + power) % d, j] = 1.0
    return m


def swap_operator(d1: int, d2: int | None = None) -> np.ndarray:
    """SWAP between two factors; ``|k, l> -> |l, k>``."""
    d2 = d1 if d2 is None else d2
    if d1 != d2:
        raise DimensionError("SWAP needs factors of equal dimension")
    d = d1
    s = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            s[l * d + k, k * d + l] = 1.0
    return s
