"""Dense complex-Hermitian linear algebra kernels.

Everything downstream (covariance shaping, MVDR filtering, the conic
solver) funnels through these few routines, so they validate eagerly and
fail loudly rather than letting a non-Hermitian or indefinite matrix
propagate.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

HERMITIAN_ATOL = 1e-12


class NotHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class NotPSDError(ValueError):
    """Matrix required to be positive semidefinite is not.

    Carries the offending smallest eigenvalue in ``min_eigenvalue``.
    """

    def __init__(self, msg: str, min_eigenvalue: float):
        super().__init__(msg)
        self.min_eigenvalue = min_eigenvalue


class EigenConvergenceError(RuntimeError):
    """Eigensolver failed to converge; carries a diagnostic norm."""

    def __init__(self, msg: str, matrix_norm: float):
        super().__init__(msg)
        self.matrix_norm = matrix_norm


def as_hermitian(entries, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Validate and return an exactly Hermitian complex matrix.

    Accepts anything array-like. Rejects non-square shapes, NaN/Inf
    entries, and matrices whose Hermitian asymmetry exceeds ``atol``
    (absolute, entrywise). The returned array is symmetrized so that
    ``A == A.conj().T`` holds exactly and the diagonal is exactly real.
    """
    a = np.asarray(entries, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitianError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise NotHermitianError("matrix contains NaN or Inf entries")
    asym = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if asym > atol:
        raise NotHermitianError(
            f"matrix is not Hermitian: max |A - A^H| = {asym:.3e} exceeds {atol:.1e}"
        )
    h = 0.5 * (a + a.conj().T)
    # exact real diagonal; the average above only guarantees it to rounding
    np.fill_diagonal(h, h.diagonal().real)
    return h


def eig_hermitian(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` real and ascending and
    ``V`` unitary, such that ``A = V @ diag(w) @ V.conj().T``.
    """
    h = as_hermitian(A)
    try:
        w, V = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"eigendecomposition did not converge: {exc}",
            matrix_norm=float(np.linalg.norm(h)),
        ) from exc
    return w, V


def cholesky(A, tol: float | None = None) -> np.ndarray:
    """Factor a PSD matrix as ``A = L @ L.conj().T``.

    Strictly positive definite input yields the classical lower-triangular
    factor. Semidefinite input falls back to an eigenvalue-based factor
    whose column count equals the numerical rank, with eigenvalues below
    ``tol`` treated as zero. ``tol`` defaults to ``1e-9 * max(eigenvalue)``.
    Raises :class:`NotPSDError` if the smallest eigenvalue is below
    ``-tol``.
    """
    h = as_hermitian(A)
    w, V = eig_hermitian(h)
    wmax = float(w[-1]) if w.size else 0.0
    eff_tol = tol if tol is not None else 1e-9 * max(wmax, 0.0)
    wmin = float(w[0]) if w.size else 0.0
    if wmin < -max(eff_tol, HERMITIAN_ATOL):
        raise NotPSDError(
            f"matrix is not PSD: smallest eigenvalue {wmin:.3e}", min_eigenvalue=wmin
        )
    if w.size and wmin > eff_tol and wmin > 0:
        try:
            return np.linalg.cholesky(h)
        except np.linalg.LinAlgError:
            pass  # borderline conditioning, fall through to the eigen route
    keep = w > max(eff_tol, 0.0)
    # descending order so the dominant direction comes first
    cols = V[:, keep][:, ::-1] * np.sqrt(w[keep][::-1])
    return cols


def project_psd(A) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix to ``A``."""
    w, V = eig_hermitian(A)
    if w.size == 0:
        return np.zeros_like(np.asarray(A, dtype=complex))
    wc = np.maximum(w, 0.0)
    # the reconstruction is Hermitian up to rounding at the eigenvalue
    # scale, so the asymmetry tolerance must grow with the magnitude
    tol = max(HERMITIAN_ATOL, 1e-14 * float(wc[-1]) * len(wc))
    return as_hermitian((V * wc) @ V.conj().T, atol=tol)


def realify(A) -> np.ndarray:
    """Real-symmetric embedding [[Re, -Im], [Im, Re]] of a Hermitian matrix.

    The embedding doubles eigenvalue multiplicities but preserves their
    values, so PSD-ness and eigenvalue clipping commute with it.
    """
    h = as_hermitian(A)
    re, im = h.real, h.imag
    top = np.hstack([re, -im])
    bot = np.hstack([im, re])
    return np.vstack([top, bot])


def unrealify(B) -> np.ndarray:
    """Inverse of :func:`realify`, averaging the redundant blocks."""
    b = np.asarray(B, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or b.shape[0] % 2:
        raise ValueError(f"expected a square even-dimension matrix, got {b.shape}")
    m = b.shape[0] // 2
    re = 0.5 * (b[:m, :m] + b[m:, m:])
    im = 0.5 * (b[m:, :m] - b[:m, m:])
    return re + 1j * im


def solve_hpd(A, b) -> np.ndarray:
    """Solve ``A x = b`` for Hermitian positive definite ``A``.

    Uses a Cholesky factorization; raises ``scipy.linalg.LinAlgError``
    if ``A`` is singular or indefinite.
    """
    h = as_hermitian(A)
    rhs = np.asarray(b, dtype=complex)
    c, low = scipy.linalg.cho_factor(h, lower=True)
    return scipy.linalg.cho_solve((c, low), rhs)
