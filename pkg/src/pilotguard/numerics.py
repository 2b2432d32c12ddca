"""Complex-matrix kernel used by every other module.

Matrices are plain ``numpy.ndarray`` objects with dtype ``complex128``.
The routines here add the error semantics the simulation needs on top of
LAPACK: a Cholesky factorization that tolerates an exactly singular
boundary and reports the failing pivot, and an inversion that rejects
numerically singular inputs instead of silently amplifying noise.
"""

import warnings

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .errors import NotPSDError, ParameterError, SingularError
from .rng import RngStream

__all__ = [
    "sample_complex_gaussian",
    "cholesky",
    "svd",
    "inverse",
    "gram_trace",
]

# Pivots no smaller than -PSD_TOL * trace(A) are treated as zero, which
# admits covariance matrices sitting exactly on the semidefinite boundary.
PSD_TOL = 1e-10

# inverse() rejects a matrix when an LU pivot falls below this fraction of
# the largest pivot. Continuous random matrices are almost surely far from
# this threshold, so hitting it indicates a degenerate input.
SINGULAR_TOL = 1e-12


def _as_square(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError(f"{name} must be square, got shape {a.shape}")
    return a


def sample_complex_gaussian(rows, cols, variance, rng: RngStream):
    """Draw an i.i.d. circularly-symmetric complex Gaussian matrix.

    Each entry has E[|x|^2] = ``variance``; the real and imaginary parts
    are independent with variance/2 each. The real block is drawn before
    the imaginary block, which fixes the stream layout for reproducibility.
    """
    if variance < 0:
        raise ParameterError(f"variance must be >= 0, got {variance}")
    if rows < 0 or cols < 0:
        raise ParameterError("matrix dimensions must be >= 0")
    gen = rng.generator()
    re = gen.standard_normal((rows, cols))
    im = gen.standard_normal((rows, cols))
    return np.sqrt(variance / 2.0) * (re + 1j * im)


def cholesky(a):
    """Lower-triangular L with L @ L^H = a, for Hermitian PSD ``a``.

    Pivots within -PSD_TOL * trace(a) of zero are clamped to zero so the
    factorization succeeds for rank-deficient covariances on the
    semidefinite boundary. A pivot more negative than that raises
    :class:`NotPSDError` carrying the pivot index.
    """
    a = _as_square(a)
    n = a.shape[0]
    scale = max(float(np.trace(a).real), np.finfo(float).tiny)
    if not np.allclose(a, a.conj().T, atol=1e-12 * max(scale, 1.0)):
        raise ParameterError("cholesky requires a Hermitian matrix")
    tol = PSD_TOL * scale
    low = np.zeros((n, n), dtype=complex)
    for j in range(n):
        d = a[j, j].real - np.sum(np.abs(low[j, :j]) ** 2)
        if d < -tol:
            raise NotPSDError(
                f"pivot {j} is {d:.3e}, below the PSD tolerance {-tol:.3e}",
                pivot_index=j,
            )
        d = max(d, 0.0)
        low[j, j] = np.sqrt(d)
        if j + 1 < n:
            resid = a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j].conj()
            if low[j, j] > 0.0:
                low[j + 1:, j] = resid / low[j, j]
            elif np.max(np.abs(resid), initial=0.0) > np.sqrt(tol * scale):
                # A zero pivot with nonzero residual column cannot come
                # from a PSD matrix.
                raise NotPSDError(
                    f"pivot {j} is zero but its column is not", pivot_index=j
                )
    return low


def svd(a):
    """Singular value decomposition ``a = u @ diag(s) @ vh``.

    Returns (u, s, vh) with unitary u, vh and s sorted descending.
    """
    a = np.asarray(a, dtype=complex)
    return np.linalg.svd(a, full_matrices=True)


def inverse(a):
    """Inverse of a square matrix, rejecting near-singular inputs.

    Raises :class:`SingularError` when the smallest LU pivot magnitude is
    below SINGULAR_TOL times the largest.
    """
    a = _as_square(a)
    try:
        with warnings.catch_warnings():
            # exact singularity is diagnosed below via the pivot ratio
            warnings.simplefilter("ignore", LinAlgWarning)
            lu, piv = lu_factor(a)
    except ValueError as exc:  # non-finite entries
        raise ParameterError(f"inverse: invalid matrix ({exc})") from exc
    diag = np.abs(np.diag(lu))
    if diag.size and np.min(diag) <= SINGULAR_TOL * np.max(diag):
        raise SingularError(
            f"matrix is numerically singular (pivot ratio "
            f"{np.min(diag) / max(np.max(diag), np.finfo(float).tiny):.3e})"
        )
    return lu_solve((lu, piv), np.eye(a.shape[0], dtype=complex))


def gram_trace(a):
    """trace(a @ a^H), i.e. the sum of squared entry magnitudes."""
    a = np.asarray(a, dtype=complex)
    return float(np.vdot(a, a).real)
