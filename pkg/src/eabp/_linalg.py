"""Small numerical kernels shared by the derivation and special-case code."""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

RANK_TOL = 1e-10
DET_TOL = 1e-9


def null_space(M: np.ndarray, rank_tol: float = RANK_TOL, min_dim: int = 0) -> np.ndarray:
    """Orthonormal basis (as columns) of ker M via SVD.

    Singular values <= rank_tol * sigma_max count as zero.  ``min_dim``
    forces at least that many trailing right singular vectors into the
    basis; used when an exact determinant argument already proved the
    matrix singular.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows, cols = M.shape
    if cols == 0:
        return np.zeros((0, 0))
    if rows == 0:
        return np.eye(cols)
    _, s, vt = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return np.eye(cols)
    rank = int(np.sum(s > rank_tol * smax))
    rank = min(rank, cols - min_dim)
    return vt[rank:].T.copy()


def solve_affine(M: np.ndarray, b: np.ndarray, rank_tol: float = 1e-9, res_tol: float = 1e-9):
    """Solution set of M v = b as (particular, direction basis) or None.

    The particular solution is the minimum-norm one; directions are an
    orthonormal basis of ker M.  Returns None when the system is
    inconsistent (residual above ``res_tol`` relative to |b|).
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    b = np.asarray(b, dtype=float)
    cols = M.shape[1]
    if cols == 0:
        ok = np.all(np.abs(b) <= res_tol)
        return (np.zeros(0), np.zeros((0, 0))) if ok else None
    K = null_space(M, rank_tol)
    v = np.linalg.lstsq(M, b, rcond=rank_tol)[0]
    if K.shape[1]:
        v = v - K @ (K.T @ v)
    if np.abs(M @ v - b).max(initial=0.0) > res_tol * max(1.0, np.abs(b).max(initial=0.0)):
        return None
    return v, K


def is_singular(M: np.ndarray, det_tol: float = DET_TOL) -> tuple[bool, float]:
    """Decide det(M) = 0 relative to the product of row-wise max entries."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return False, 1.0
    d = float(np.linalg.det(M))
    scale = float(np.prod(np.abs(M).max(axis=1)))
    return abs(d) <= det_tol * scale, d


def det_polynomial(matrix_of: Callable[[float], np.ndarray], degree: int) -> np.ndarray:
    """Coefficients (low to high) of t -> det(matrix_of(t)), degree <= ``degree``.

    Evaluates the determinant at degree+1 Chebyshev nodes and interpolates.
    """
    if degree <= 0:
        return np.array([_det(matrix_of(0.0))])
    k = np.arange(degree + 1)
    nodes = np.cos((2 * k + 1) * np.pi / (2 * (degree + 1)))
    vals = np.array([_det(matrix_of(t)) for t in nodes])
    V = np.vander(nodes, degree + 1, increasing=True)
    return np.linalg.solve(V, vals)


def _det(M) -> float:
    M = np.atleast_2d(M)
    return 1.0 if M.size == 0 else float(np.linalg.det(M))


def trim(coeffs: np.ndarray, rel_tol: float = 1e-11) -> np.ndarray:
    """Drop negligible leading coefficients; [] means identically zero."""
    c = np.asarray(coeffs, dtype=float)
    scale = np.abs(c).max(initial=0.0)
    if scale == 0.0:
        return np.zeros(0)
    keep = np.nonzero(np.abs(c) > rel_tol * scale)[0]
    return c[: keep[-1] + 1]


def is_zero_poly(coeffs: np.ndarray, abs_tol: float = 1e-10) -> bool:
    return np.abs(np.asarray(coeffs, dtype=float)).max(initial=0.0) <= abs_tol


def real_roots(coeffs: np.ndarray, imag_tol: float = 1e-6, cluster_tol: float = 1e-5) -> list[float]:
    """Distinct real roots via companion-matrix eigenvalues.

    Nearby eigenvalues are clustered (a root of multiplicity k splits into a
    ring of radius ~eps^(1/k)); each cluster is replaced by its mean and
    polished by Newton on the (k-1)-th derivative, where it is simple.
    """
    c = trim(coeffs)
    if c.size <= 1:
        return []
    roots = P.polyroots(c)
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda r: (r.real, r.imag)):
        for cl in clusters:
            center = np.mean(cl)
            if abs(r - center) <= cluster_tol * max(1.0, abs(center)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    out = []
    for cl in clusters:
        center = complex(np.mean(cl))
        if abs(center.imag) > imag_tol * max(1.0, abs(center.real)):
            continue
        root = _polish(c, center.real, len(cl))
        out.append(root)
    return sorted(out)


def _polish(c: np.ndarray, x: float, multiplicity: int) -> float:
    d = P.polyder(c, multiplicity - 1) if multiplicity > 1 else c
    dd = P.polyder(d)
    if dd.size == 0:
        return x
    for _ in range(8):
        slope = P.polyval(x, dd)
        if slope == 0.0:
            break
        step = P.polyval(x, d) / slope
        if not np.isfinite(step) or abs(step) > 1e-3 * max(1.0, abs(x)):
            break
        x -= step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return float(x)
