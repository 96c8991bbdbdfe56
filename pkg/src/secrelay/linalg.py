"""Dense complex linear algebra used by the optimization layers.

Null-space bases for the zero-forcing parameterization, Hermitian
eigendecompositions, PSD square-root factors and dominant rank-one
extraction from lifted matrices.
"""

import numpy as np

HERMITIAN_ATOL = 1e-10
PSD_RTOL = 1e-8


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def _check_hermitian(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NotHermitianError("not Hermitian: matrix must be square")
    scale = max(1.0, np.abs(A).max(initial=0.0))
    if np.abs(A - A.conj().T).max(initial=0.0) > HERMITIAN_ATOL * scale:
        raise NotHermitianError("not Hermitian")
    return 0.5 * (A + A.conj().T)


def null_space_basis(H):
    """Orthonormal basis of the null space of ``H``.

    The numerical rank counts singular values above
    ``1e-10 * s_max * max(H.shape)``.

    Parameters
    ----------
    H : (m, n) array_like
        Complex matrix (e.g. the relay loopback channel ``H_RR``).

    Returns
    -------
    N : (n, d) ndarray
        Orthonormal columns with ``H @ N ~ 0``, ``d = n - rank(H)``.

    Raises
    ------
    ValueError
        ``"empty matrix"`` for a zero-sized input and
        ``"ZF null space empty"`` when ``H`` has full column rank.
    """
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if H.size == 0:
        raise ValueError("empty matrix")
    if not np.all(np.isfinite(H)):
        raise ValueError("matrix has non-finite entries")
    m, n = H.shape
    _, s, vh = np.linalg.svd(H, full_matrices=True)
    smax = s[0] if s.size else 0.0
    tol = 1e-10 * smax * max(m, n)
    rank = int(np.count_nonzero(s > tol))
    if rank >= n:
        raise ValueError("ZF null space empty")
    return vh[rank:].conj().T


def hermitian_eig(A):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    A = _check_hermitian(A)
    w, v = np.linalg.eigh(A)
    return w, v


def psd_factor(S):
    """Return ``V`` with ``V @ V^H == S`` for a PSD matrix ``S``.

    Uses the eigenvalue square root so rank-deficient inputs need no
    pivoting. ``V`` keeps one column per numerically nonzero eigenvalue.
    Small negative eigenvalues (down to ``-1e-8 * ||S||``) are clipped.
    """
    w, v = hermitian_eig(S)
    norm = np.abs(w).max(initial=0.0)
    if w.size and w[0] < -PSD_RTOL * norm:
        raise NotPSDError("not PSD")
    keep = w > w.size * np.finfo(float).eps * norm
    return v[:, keep] * np.sqrt(w[keep])


def dominant_rank1(X):
    """Largest eigenpair of a PSD matrix and its share of the trace.

    Returns
    -------
    lam1 : float
        Largest eigenvalue (clipped at 0).
    v1 : ndarray
        Unit-norm eigenvector for ``lam1``.
    rank1_ratio : float
        ``lam1 / trace(X)`` in [0, 1]; 1 for the zero matrix.
    """
    w, v = hermitian_eig(X)
    norm = np.abs(w).max(initial=0.0)
    if w[0] < -PSD_RTOL * max(norm, 1.0):
        raise NotPSDError("not PSD")
    lam1 = max(float(w[-1]), 0.0)
    tr = float(np.clip(w, 0.0, None).sum())
    ratio = 1.0 if tr <= 0.0 else min(1.0, lam1 / tr)
    return lam1, v[:, -1], ratio


def hermitian_to_real(A):
    """Real symmetric embedding ``[[Re A, -Im A], [Im A, Re A]]``."""
    A = np.asarray(A, dtype=complex)
    return np.block([[A.real, -A.imag], [A.imag, A.real]])


def real_to_hermitian(R):
    """Inverse of :func:`hermitian_to_real`, averaging the redundant copies."""
    R = np.asarray(R, dtype=float)
    n = R.shape[0] // 2
    a, b = R[:n, :n], R[:n, n:]
    c, d = R[n:, :n], R[n:, n:]
    H = 0.5 * (a + d) + 0.5j * (c - b)
    return 0.5 * (H + H.conj().T)
