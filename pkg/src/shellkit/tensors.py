"""Small fixed-size tensor algebra: 3-vectors, 3x3 tensors, proper rotations.

Vectors and tensors are plain numpy arrays of shape (3,) and (3, 3).
Rotations are 3x3 arrays satisfying R^T R = 1 and det R = +1; helpers below
validate and repair them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FrameNotOrthonormal, NotSkew

SKEW_TOL = 1e-10          # absolute, on ||A + A^T||_F; inputs are analytic
ROTATION_TOL = 1e-12
REORTH_TRIGGER = 1e-9     # polar-project R when ||R^T R - 1|| exceeds this

EYE3 = np.eye(3)


def axl(A):
    """Axial vector v of a skew-symmetric matrix A, so that A u = v x u.

    Raises NotSkew if ||A + A^T||_F exceeds SKEW_TOL.
    """
    A = np.asarray(A, dtype=float)
    defect = np.linalg.norm(A + A.T)
    if defect > SKEW_TOL:
        raise NotSkew(f"matrix is not skew-symmetric: ||A + A^T|| = {defect:.3e}")
    return np.array([A[2, 1] - A[1, 2], A[0, 2] - A[2, 0], A[1, 0] - A[0, 1]]) / 2.0


def skew(v):
    """Cross-product matrix of v: skew(v) u = v x u. Inverse of axl."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rotation_exp(v):
    """Rotation about axis v/||v|| by angle ||v|| (Rodrigues formula).

    Uses series expansions of sin(t)/t and (1-cos t)/t^2 near t = 0, so the
    map is smooth through the identity.
    """
    v = np.asarray(v, dtype=float)
    t2 = float(v @ v)
    t = np.sqrt(t2)
    S = skew(v)
    if t < 1e-4:
        c1 = 1.0 - t2 / 6.0 + t2 * t2 / 120.0          # sin t / t
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0          # (1 - cos t) / t^2
    else:
        c1 = np.sin(t) / t
        c2 = (1.0 - np.cos(t)) / t2
    return EYE3 + c1 * S + c2 * (S @ S)


def rotation_log(R):
    """Rotation vector of R, valid for angles strictly below pi."""
    R = np.asarray(R, dtype=float)
    cos_t = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    t = np.arccos(cos_t)
    w = axl((R - R.T) / 2.0)
    s = np.linalg.norm(w)
    if s < 1e-12:
        return np.zeros(3) if cos_t > 0 else w  # angle ~ 0 (or pi: caller beware)
    return w * (t / s)


def rotation_defect(R):
    """||R^T R - 1||_F, the orthonormality defect."""
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - EYE3))


def is_rotation(R, tol=ROTATION_TOL):
    R = np.asarray(R, dtype=float)
    return rotation_defect(R) <= tol and abs(np.linalg.det(R) - 1.0) <= tol


def check_rotation(R, tol=ROTATION_TOL, what="rotation"):
    if not is_rotation(R, tol):
        raise FrameNotOrthonormal(
            f"{what} violates R^T R = 1 / det R = 1 within {tol:g}")
    return np.asarray(R, dtype=float)


def polar_rotation(M):
    """Nearest proper rotation to M (polar factor, det forced to +1)."""
    U, _, Vt = np.linalg.svd(np.asarray(M, dtype=float))
    D = np.diag([1.0, 1.0, np.linalg.det(U @ Vt)])
    return U @ D @ Vt


def reorthonormalize(R, trigger=REORTH_TRIGGER):
    """Polar-project R back onto SO(3) when its defect exceeds the trigger."""
    if rotation_defect(R) > trigger:
        return polar_rotation(R)
    return np.asarray(R, dtype=float)


def sym(T):
    T = np.asarray(T, dtype=float)
    return 0.5 * (T + T.T)


def skw(T):
    T = np.asarray(T, dtype=float)
    return 0.5 * (T - T.T)


@dataclass(frozen=True)
class PlanarParts:
    """Orthogonal decomposition of the tangential (3x2-like) part of a tensor.

    trace:  in-plane trace of the 2x2 block B, B_bc = d_b . T d_c
    dev:    deviatoric-symmetric 2x2 block
    spin:   scalar (B_21 - B_12) / 2 of the in-plane skew part
    normal: row (n . T d_1, n . T d_2)
    """
    trace: float
    dev: np.ndarray
    spin: float
    normal: np.ndarray

    def block(self):
        """Reassembled 2x2 in-plane block."""
        B = self.dev + 0.5 * self.trace * np.eye(2)
        B[0, 1] -= self.spin
        B[1, 0] += self.spin
        return B

    def reconstruct(self, d1, d2, n):
        """Ambient tensor with the same action on span{d1, d2} (kernel n)."""
        B = self.block()
        basis = (d1, d2)
        T = np.zeros((3, 3))
        for b in range(2):
            for c in range(2):
                T += B[b, c] * np.outer(basis[b], basis[c])
        for c in range(2):
            T += self.normal[c] * np.outer(n, basis[c])
        return T


def _check_frame(d1, d2, n, tol=1e-10):
    G = np.stack([d1, d2, n])
    if np.linalg.norm(G @ G.T - EYE3) > tol:
        raise FrameNotOrthonormal("frame {d1, d2, n} is not orthonormal")


def planar_parts(T, d1, d2, n):
    """Split T into in-plane trace / deviatoric / spin parts plus the normal row.

    The decomposition is orthogonal: squared Frobenius norms of the four parts
    sum to ||T a||^2 where a projects onto span{d1, d2}. Reconstruction via
    PlanarParts.reconstruct is exact for tensors annihilating n on the right.
    """
    _check_frame(d1, d2, n)
    T = np.asarray(T, dtype=float)
    basis = (d1, d2)
    B = np.array([[basis[b] @ T @ basis[c] for c in range(2)] for b in range(2)])
    tr = B[0, 0] + B[1, 1]
    S = 0.5 * (B + B.T) - 0.5 * tr * np.eye(2)
    spin = 0.5 * (B[1, 0] - B[0, 1])
    normal = np.array([n @ T @ basis[c] for c in range(2)])
    return PlanarParts(trace=float(tr), dev=S, spin=float(spin), normal=normal)
