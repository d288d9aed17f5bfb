"""Small dense linear algebra: products, singular values, and the singular
value interpolation function phi that drives every pressure computation.

The 2x2 path is closed-form and cancellation-safe; general dimensions go
through a symmetric eigensolve of A^T A.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "as_matrix",
    "mat_mul",
    "rotation",
    "diagonal",
    "singular_values",
    "operator_norm",
    "phi",
    "log_phi",
]


def as_matrix(m) -> np.ndarray:
    """Validate and return a square float matrix of dimension >= 2."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValueError("matrices of dimension 0 or 1 are not supported")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def mat_mul(a, b) -> np.ndarray:
    """Product of two square matrices of equal dimension.

    Longer products are evaluated as left folds,
    mat_mul(mat_mul(a, b), c), which is the convention used everywhere
    in this package.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def rotation(theta: float) -> np.ndarray:
    """2x2 rotation through angle theta (radians); det 1, singular values (1, 1)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def diagonal(a: float, b: float) -> np.ndarray:
    """2x2 diagonal matrix diag(a, b)."""
    return np.array([[float(a), 0.0], [0.0, float(b)]])


def _sv2(e00: float, e01: float, e10: float, e11: float) -> tuple[float, float]:
    """Closed-form singular values of a 2x2 matrix, largest first.

    sigma1 = (sqrt(m + p) + sqrt(m - p)) / 2 with m the squared Frobenius
    norm and p = 2|det|; then sigma2 = |det| / sigma1.  Recovering sigma2
    from the determinant instead of the conjugate square root avoids the
    cancellation that makes the naive formula lose all precision on
    ill-conditioned input.
    """
    m = e00 * e00 + e01 * e01 + e10 * e10 + e11 * e11
    adet = abs(e00 * e11 - e01 * e10)
    p = 2.0 * adet
    hi = m + p
    lo = m - p
    if lo < 0.0:  # roundoff; exact value is >= 0
        lo = 0.0
    s1 = 0.5 * (math.sqrt(hi) + math.sqrt(lo))
    s2 = adet / s1 if s1 > 0.0 else 0.0
    return s1, s2


def singular_values(a) -> np.ndarray:
    """Singular values of a square matrix, sorted non-increasing.

    d = 2 uses the stable closed form; larger dimensions use a symmetric
    eigensolve of A^T A with negative roundoff eigenvalues clamped to zero.
    """
    a = as_matrix(a)
    if a.shape[0] == 2:
        s1, s2 = _sv2(a[0, 0], a[0, 1], a[1, 0], a[1, 1])
        return np.array([s1, s2])
    w = np.linalg.eigvalsh(a.T @ a)
    w = np.clip(w, 0.0, None)
    return np.sqrt(w)[::-1]


def operator_norm(a) -> float:
    """Largest singular value."""
    return float(singular_values(a)[0])


def _log_phi_from_singulars(sv: np.ndarray, s: float) -> float:
    """log phi^s from singular values; -inf when the value is exactly 0.

    phi^s interpolates partial products of singular values: for
    k <= s <= k+1 <= d it is sigma_1 ... sigma_k * sigma_{k+1}^(s-k), and
    for s >= d it is |det|^(s/d).  The two branch formulas agree at the
    integer joints; k = floor(s) is used, with s = d routed to the
    determinant branch.
    """
    d = len(sv)
    if s >= d:
        # |det| = product of all singular values
        acc = 0.0
        for v in sv:
            if v == 0.0:
                return -math.inf
            acc += math.log(v)
        return (s / d) * acc
    k = int(math.floor(s))
    acc = 0.0
    for i in range(k):
        if sv[i] == 0.0:
            return -math.inf
        acc += math.log(sv[i])
    frac = s - k
    if frac > 0.0:
        if sv[k] == 0.0:
            return -math.inf
        acc += frac * math.log(sv[k])
    return acc


def log_phi(a, s: float) -> float:
    """log of phi^s(a); -inf when phi^s(a) = 0."""
    if s <= 0.0:
        raise ValueError("phi requires s > 0")
    return _log_phi_from_singulars(singular_values(a), float(s))


def phi(a, s: float) -> float:
    """Singular value interpolation function phi^s(a).

    Computed in log space and exponentiated, so deep products with tiny
    singular values stay representable.
    """
    lv = log_phi(a, s)
    return 0.0 if lv == -math.inf else math.exp(lv)
