"""Robust MVDR receive filter for the sensing path.

Given the transmit covariance R, the filter maximizes the ratio of target
power to tapered clutter-plus-noise power. Because the target term is
rank one, the maximizer is the classical solution: the whitened steering
vector. A generalized-eigendecomposition route is kept alongside as an
independent cross-check.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from . import linalg, taper


def canonical_phase(w: np.ndarray) -> np.ndarray:
    """Rotate a vector so its largest-magnitude entry is real positive.

    Near-ties in magnitude (common for symmetric arrays) are broken by
    lowest index so the pivot does not flip under rounding noise.
    """
    w = np.asarray(w, dtype=complex)
    mags = np.abs(w)
    top = mags.max() if mags.size else 0.0
    if top == 0.0:
        return w.copy()
    pivot = w[np.flatnonzero(mags >= top * (1.0 - 1e-9))[0]]
    return w * (pivot.conj() / abs(pivot))


def design_filter(model: taper.InterferenceModel, R) -> np.ndarray:
    """Unit-norm filter maximizing the tapered output SCNR for fixed R.

    Solves w ∝ S^{-1} a_rx(theta0) with S the tapered clutter-plus-noise
    covariance; S is positive definite whenever the receiver noise power
    is positive.
    """
    s = taper.tapered_cn_matrix(model, R)
    w = linalg.solve_hpd(s, model.target_rx_steering)
    w = w / np.linalg.norm(w)
    return canonical_phase(w)


def design_filter_geig(model: taper.InterferenceModel, R) -> np.ndarray:
    """Same filter via whitening and a dense eigendecomposition.

    Whitens the rank-one target quadratic by the Cholesky factor of the
    tapered covariance and takes the leading eigenvector. Agrees with
    :func:`design_filter` up to unit phase; kept as a structural
    cross-check of the closed form.
    """
    s = taper.tapered_cn_matrix(model, R)
    # the target quadratic is (positive scalar) * a_rx a_rx^H; the scalar
    # shifts the generalized eigenvalue but not its eigenvector
    num = np.outer(model.target_rx_steering, model.target_rx_steering.conj())
    L = np.linalg.cholesky(s)
    b = scipy.linalg.solve_triangular(L, num, lower=True)
    b = scipy.linalg.solve_triangular(L, b.conj().T, lower=True).conj().T
    w_eig, v = np.linalg.eigh(linalg.as_hermitian(b, atol=1e-8))
    top = v[:, -1]
    w = scipy.linalg.solve_triangular(L.conj().T, top, lower=False)
    w = w / np.linalg.norm(w)
    return canonical_phase(w)


def apply_filter(w, samples) -> complex:
    """Filter output w^H y for a single receive snapshot."""
    return complex(np.vdot(w, samples))
