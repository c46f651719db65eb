"""Complex linear algebra and seeded sampling primitives.

Complex matrices are plain ``numpy`` ``complex128`` arrays. The helpers here
add shape checking and a pivoted Gaussian-elimination inverse that also
works on stacks of matrices (leading batch axes), which the random-search
oracle uses to evaluate thousands of candidate precoders at once.
"""

from __future__ import annotations

import numpy as np

#: Bit generator used for every stream; pinned so seeded runs match across
#: platforms and numpy upgrades that change ``default_rng``.
RNG_ALGORITHM = "PCG64"
RNG_VERSION = 1

SINGULAR_PIVOT_TOL = 1e-12


class SingularMatrixError(ValueError):
    """Raised when Gaussian elimination meets a vanishing pivot."""


def as_cmatrix(a) -> np.ndarray:
    """Coerce to a 2-D ``complex128`` array."""
    out = np.asarray(a, dtype=np.complex128)
    if out.ndim == 1:
        out = out[:, None]
    if out.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {out.shape}")
    return out


def cmat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex matrix product with an explicit conformability check."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ValueError(
            f"cannot multiply matrices of shapes {a.shape} and {b.shape}"
        )
    return a @ b


def cmat_hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes."""
    a = np.asarray(a, dtype=np.complex128)
    return np.conj(np.swapaxes(a, -1, -2))


def cmat_inverse(a: np.ndarray) -> np.ndarray:
    """Invert a square matrix, or a stack of them, by Gauss-Jordan elimination.

    Partial pivoting picks the largest-magnitude entry of each column. The
    elimination is vectorised over any leading batch axes, so ``a`` may have
    shape ``(..., n, n)``.

    Raises
    ------
    SingularMatrixError
        If any pivot magnitude drops below ``SINGULAR_PIVOT_TOL``.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"cannot invert non-square array of shape {a.shape}")
    n = a.shape[-1]
    batch_shape = a.shape[:-2]
    work = a.reshape(-1, n, n)
    inv = np.broadcast_to(np.eye(n, dtype=np.complex128), work.shape).copy()
    idx = np.arange(work.shape[0])

    for col in range(n):
        pivot_row = col + np.argmax(np.abs(work[:, col:, col]), axis=1)
        pivot = work[idx, pivot_row, col]
        if np.any(np.abs(pivot) < SINGULAR_PIVOT_TOL):
            raise SingularMatrixError(
                f"matrix is singular to tolerance at column {col}"
            )
        swap = pivot_row != col
        if np.any(swap):
            rows = idx[swap]
            for m in (work, inv):
                tmp = m[rows, col].copy()
                m[rows, col] = m[rows, pivot_row[swap]]
                m[rows, pivot_row[swap]] = tmp
        scale = 1.0 / work[:, col, col]
        work[:, col, :] *= scale[:, None]
        inv[:, col, :] *= scale[:, None]
        factors = work[:, :, col].copy()
        factors[:, col] = 0.0
        work -= factors[:, :, None] * work[:, col, None, :]
        inv -= factors[:, :, None] * inv[:, col, None, :]

    return inv.reshape(*batch_shape, n, n)


def frobenius_norm(a: np.ndarray) -> float | np.ndarray:
    """Frobenius norm over the last two axes (a scalar for a single matrix)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim == 1:
        return float(np.sqrt(np.sum(np.abs(a) ** 2)))
    out = np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))
    return float(out) if out.ndim == 0 else out


def kron_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two vectors; entry ``i*len(b)+j`` is ``a[i]*b[j]``."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    return (a[:, None] * b[None, :]).ravel()


def make_rng(*key: int) -> np.random.Generator:
    """Build a generator from one or more integer keys.

    ``make_rng(seed, stream)`` gives independent, reproducible sub-streams for
    the same experiment seed (channels, agent noise, evaluation, ...).
    """
    if not key:
        raise ValueError("at least one seed key is required")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(key))))


def sample_cn01(rng: np.random.Generator, size=None) -> complex | np.ndarray:
    """Circularly-symmetric complex Gaussian draws with unit variance."""
    z = rng.standard_normal(size=(2,) if size is None else (2, *np.atleast_1d(size)))
    out = (z[0] + 1j * z[1]) / np.sqrt(2.0)
    return complex(out) if size is None else out
