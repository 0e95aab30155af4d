"""Small dense linear algebra helpers shared by the cocycle iteration paths.

Everything here is written for stacks of small (m x m, m = 2..4) matrices;
the 2x2 cases get closed forms because they sit inside per-step loops.
"""

from __future__ import annotations

import numpy as np


def opnorms(mats: np.ndarray) -> np.ndarray:
    """Operator 2-norm (largest singular value) of a stack (..., m, m)."""
    mats = np.asarray(mats, dtype=float)
    m = mats.shape[-1]
    if m == 2:
        # sigma_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4 det^2)) / 2
        e = np.sum(mats * mats, axis=(-2, -1))
        det = mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
        disc = np.sqrt(np.maximum(e * e - 4.0 * det * det, 0.0))
        return np.sqrt(0.5 * (e + disc))
    return np.linalg.svd(mats, compute_uv=False)[..., 0]


def opnorm(mat: np.ndarray) -> float:
    return float(opnorms(np.asarray(mat, dtype=float)[None])[0])


def det2(mats: np.ndarray) -> np.ndarray:
    return mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]


def invert_many(mats: np.ndarray, det_floor: float = 1e-9) -> np.ndarray:
    """Pointwise inverses of a stack; adjugate/det for 2x2, LU otherwise.

    Raises if any determinant falls below det_floor in modulus, which for
    maps that are supposed to stay in SL_m signals the map left the group.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.shape[-1] == 2:
        det = det2(mats)
        if np.any(np.abs(det) < det_floor):
            raise ValueError("numerically singular matrix: |det| < 1e-9")
        out = np.empty_like(mats)
        out[..., 0, 0] = mats[..., 1, 1]
        out[..., 1, 1] = mats[..., 0, 0]
        out[..., 0, 1] = -mats[..., 0, 1]
        out[..., 1, 0] = -mats[..., 1, 0]
        return out / det[..., None, None]
    det = np.linalg.det(mats)
    if np.any(np.abs(det) < det_floor):
        raise ValueError("numerically singular matrix: |det| < 1e-9")
    return np.linalg.inv(mats)


def qr_positive(w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """QR factorization with the R diagonal made positive.

    Returns (Q, diag(R)).  Used by the orthonormal-frame iteration; the sign
    convention keeps accumulated log diagonals well defined.
    """
    m = w.shape[0]
    if m == 2:
        a, b = w[0, 0], w[0, 1]
        c, d = w[1, 0], w[1, 1]
        r = np.hypot(a, c)
        if r < 1e-300:
            raise ValueError("frame degeneration: leading column collapsed")
        cs, sn = a / r, c / r
        r12 = cs * b + sn * d
        r22 = cs * d - sn * b
        q = np.array([[cs, -sn], [sn, cs]])
        if r22 < 0.0:
            r22 = -r22
            q[:, 1] = -q[:, 1]
        return q, np.array([r, r22])
    q, r = np.linalg.qr(w)
    diag = np.diagonal(r).copy()
    sign = np.where(diag < 0.0, -1.0, 1.0)
    return q * sign[None, :], np.abs(diag)
