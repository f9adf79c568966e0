"""Small dense symmetric linear algebra: Jacobi eigensolver, PSD factors, sampling."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import InputError, NotPSD, NumericalError
from .unipoly import GLOBAL, INTERVAL, RAY_LEFT, RAY_RIGHT, IntervalSpec

DEFAULT_TOL = 1e-9
JACOBI_MAX_SWEEPS = 100
# half-width used for unbounded directions when sampling spectra
SAMPLE_RADIUS = 10.0


def _as_float(M) -> np.ndarray:
    A = np.array(M, dtype=object if np.asarray(M).dtype == object else float)
    A = A.astype(float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError("expected a square matrix")
    return A


def symmetric_eigen(M, tol: float = DEFAULT_TOL):
    """Eigenvalues (ascending) and an orthogonal ``Q`` with ``M = Q.T @ diag(w) @ Q``.

    Cyclic Jacobi rotations; only the upper triangle of ``M`` is read.
    """
    A = _as_float(M)
    n = A.shape[0]
    A = np.triu(A) + np.triu(A, 1).T
    V = np.eye(n)
    frob = np.linalg.norm(A)
    if n == 0 or frob == 0:
        return np.zeros(n), V
    for _ in range(JACOBI_MAX_SWEEPS):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= 1e-15 * frob:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * frob:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * ap - s * aq, s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise NumericalError("Jacobi eigensolver did not converge")
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order].T


def min_eigenvalue(M) -> float:
    return float(symmetric_eigen(M)[0][0]) if len(M) else 0.0


def loewner_geq(X, Y, tol: float = DEFAULT_TOL) -> bool:
    """``X >= Y`` in the Loewner order, up to ``tol``."""
    return min_eigenvalue(np.asarray(X, float) - np.asarray(Y, float)) >= -tol


def psd_factor(M, tol: float = DEFAULT_TOL, report: dict | None = None) -> np.ndarray:
    """``R`` with ``R.T @ R ~= M``: rows are eigenvectors scaled by root eigenvalues.

    Eigenvalues within ``tol * max|M|`` of zero are clipped; rows for them are
    dropped.  When ``report`` is given, the clipped eigenvalue mass is stored
    under ``"clipped"``.
    """
    A = _as_float(M)
    w, Q = symmetric_eigen(A, tol)
    thr = tol * max(float(np.max(np.abs(A))) if A.size else 0.0, 1e-300)
    if len(w) and w[0] < -thr:
        raise NotPSD(float(w[0]))
    keep = w > thr
    if report is not None:
        report["clipped"] = report.get("clipped", 0.0) + float(np.sum(np.abs(w[~keep])))
    return np.sqrt(w[keep])[:, None] * Q[keep]


def ldl_rational(M):
    """Exact ``M = L diag(D) L^T`` for a rational PSD matrix.

    Zero pivots are allowed only with a zero remaining column (true for PSD
    input); returns ``(L, D)`` as nested lists of Fractions.
    """
    n = len(M)
    A = [[Fraction(M[i][j]) for j in range(n)] for i in range(n)]
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for k in range(n):
        piv = A[k][k]
        if piv < 0:
            raise NotPSD(piv)
        if piv == 0:
            if any(A[i][k] != 0 for i in range(k + 1, n)):
                raise NotPSD(Fraction(0))
            continue
        D[k] = piv
        for i in range(k + 1, n):
            L[i][k] = A[i][k] / piv
        for i in range(k + 1, n):
            if A[i][k] == 0:
                continue
            for j in range(k + 1, i + 1):
                A[i][j] -= L[i][k] * A[j][k]
                A[j][i] = A[i][j]
    return L, D


def is_psd_exact(M) -> bool:
    try:
        ldl_rational(M)
    except NotPSD:
        return False
    return True


def psd_factor_exact(M):
    """Exact rank-one expansion ``M = sum d * v v^T`` with ``d > 0``; list of ``(d, v)``."""
    L, D = ldl_rational(M)
    n = len(D)
    return [(D[k], [L[i][k] for i in range(n)]) for k in range(n) if D[k] != 0]


# -- sampling -------------------------------------------------------------------

def spectrum_range(interval: IntervalSpec, margin: float) -> tuple:
    if interval.kind == GLOBAL:
        return -SAMPLE_RADIUS, SAMPLE_RADIUS
    if interval.kind == INTERVAL:
        a, b = float(interval.a), float(interval.b)
        if not margin < (b - a) / 2:
            raise InputError("margin must be smaller than half the interval width")
        return a + margin, b - margin
    if interval.kind == RAY_RIGHT:
        b = float(interval.b)
        return b + margin, b + SAMPLE_RADIUS
    a = float(interval.a)
    return a - SAMPLE_RADIUS, a - margin


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def random_symmetric_with_spectrum(n: int, interval: IntervalSpec, margin: float = 0.0,
                                   seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Seeded ``Q^T diag(lam) Q`` with ``lam`` uniform on the margin-shrunk domain."""
    if n < 1:
        raise InputError("matrix size must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    lo, hi = spectrum_range(interval, margin)
    lam = rng.uniform(lo, hi, n)
    Q = random_orthogonal(n, rng)
    M = Q.T @ np.diag(lam) @ Q
    return (M + M.T) / 2


def random_symmetric(n: int, rng: np.random.Generator, low: float = -1.0, high: float = 1.0) -> np.ndarray:
    """Symmetric matrix with independent uniform entries on and above the diagonal."""
    U = rng.uniform(low, high, (n, n))
    return np.triu(U) + np.triu(U, 1).T
