"""Director frames, structure tensors, and the shell strain measures.

A frame field supplies a proper rotation R(x) whose columns are the directors
d_i(x); the reference field is built from the chart with d3 = n. The strain
tensor is Q^{e,T} Grad_s y - a and the bending-curvature tensor is the
difference of rotation-gradient axial vectors between the deformed and
reference frames. Three equivalent evaluations of the latter are provided and
cross-checked in the tests.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import FrameNotOrthonormal
from .tensors import axl, check_rotation, rotation_exp, skew

FRAME_TOL = 1e-10


class FrameField:
    """Base class: a rotation-valued field with derivative access."""

    def rotation(self, x):
        raise NotImplementedError

    def derivative(self, x, al):
        """dR/dx_alpha by central differences on the rotation entries."""
        h = self.chart.field_step
        e = np.zeros(2)
        e[al] = h
        return (self.rotation(x + e) - self.rotation(x - e)) / (2 * h)

    def directors(self, x):
        """Columns d_1, d_2, d_3 of R(x)."""
        return self.rotation(x)

    def director(self, x, i):
        return self.rotation(x)[:, i]

    def check(self, x, tol=FRAME_TOL):
        R = self.rotation(x)
        if np.linalg.norm(R.T @ R - np.eye(3)) > tol or np.linalg.det(R) < 0:
            raise FrameNotOrthonormal(f"frame at {x} is not a proper rotation")
        return R


class ReferenceFrame(FrameField):
    """Chart-adapted orthonormal triad: d1 = a1/|a1|, d3 = n, d2 = n x d1."""

    def __init__(self, chart):
        self.chart = chart

    def rotation(self, x):
        J = self.chart.jacobian(x)
        d1 = J[:, 0] / np.linalg.norm(J[:, 0])
        u = np.cross(J[:, 0], J[:, 1])
        n = u / np.linalg.norm(u)
        d2 = np.cross(n, d1)
        return np.column_stack([d1, d2, n])

    def derivative(self, x, al):
        if self.chart.mode != "analytic":
            return super().derivative(x, al)
        J = self.chart.jacobian(x)
        H = np.asarray(self.chart._hessian(np.asarray(x, dtype=float)),
                       dtype=float)
        a1 = J[:, 0]
        na1 = np.linalg.norm(a1)
        d1 = a1 / na1
        da1 = H[:, 0, al]
        dd1 = (da1 - (d1 @ da1) * d1) / na1
        n = self.chart.normal(x)
        dn = self.chart.normal_derivatives(x)[:, al]
        dd2 = np.cross(dn, d1) + np.cross(n, dd1)
        return np.column_stack([dd1, dd2, dn])


class RotatedFrame(FrameField):
    """Constant proper rotation applied on the left of a base field."""

    def __init__(self, base, Q):
        self.base = base
        self.chart = base.chart
        self.Q = check_rotation(Q, tol=1e-9, what="superposed rotation")

    def rotation(self, x):
        return self.Q @ self.base.rotation(x)

    def derivative(self, x, al):
        return self.Q @ self.base.derivative(x, al)


class RotationVectorFrame(FrameField):
    """R(x) = exp(skew(v(x))) R_base(x) for an analytic vector field v.

    Derivatives are taken by central differences on the rotation entries,
    keeping the evaluation faithful to the axial-vector formulas.
    """

    def __init__(self, base, v_field):
        self.base = base
        self.chart = base.chart
        self.v_field = v_field

    def rotation(self, x):
        return rotation_exp(self.v_field.value(x)) @ self.base.rotation(x)


class DrilledFrame(FrameField):
    """Superposes a rotation of angle theta(x) about the local d3."""

    def __init__(self, base, theta_field):
        self.base = base
        self.chart = base.chart
        self.theta = theta_field

    def rotation(self, x):
        R = self.base.rotation(x)
        from .drilling import drilling_rotation
        return drilling_rotation(self.theta.value(x), R[:, 2]) @ R


class PositionMap:
    """Deformed position y(x) = L (y0(x) + u(x)) + shift.

    u is an analytic displacement field (may be None); L a constant linear map
    (rigid rotation or uniform stretch in the tests); gradients compose the
    chart jacobian with the field gradient, so analytic charts stay analytic.
    """

    def __init__(self, chart, displacement=None, linear=None, shift=None):
        self.chart = chart
        self.displacement = displacement
        self.linear = np.eye(3) if linear is None else np.asarray(linear, float)
        self.shift = np.zeros(3) if shift is None else np.asarray(shift, float)

    def value(self, x):
        p = self.chart.position(x)
        if self.displacement is not None:
            p = p + self.displacement.value(x)
        return self.linear @ p + self.shift

    __call__ = value

    def grad(self, x):
        D = self.chart.jacobian(x)
        if self.displacement is not None:
            D = D + self.displacement.grad(x)
        return self.linear @ D


@dataclass
class DeformedConfig:
    """Deformed position map plus director frame field."""
    position: PositionMap
    frame: FrameField

    @property
    def chart(self):
        return self.position.chart

    def d3_field(self, x):
        return self.frame.rotation(x)[:, 2]


def reference_config(chart):
    return DeformedConfig(PositionMap(chart), ReferenceFrame(chart))


@dataclass
class StrainState:
    """Pointwise kinematic bundle feeding every energy evaluation.

    Component matrices are 3x2 arrays in the mixed basis d0_i (x) a^alpha;
    ambient forms are full 3x3 tensors annihilating the normal on the right.
    """
    x: np.ndarray
    frame0: geometry.SurfaceFrame
    Q0: np.ndarray             # reference directors as columns
    R: np.ndarray              # deformed directors as columns
    Qe: np.ndarray             # elastic rotation R Q0^T
    F: np.ndarray              # shell deformation gradient
    Ee: np.ndarray             # ambient strain tensor
    Ke: np.ndarray             # ambient bending-curvature tensor
    K: np.ndarray              # deformed-rotation curvature
    K0: np.ndarray             # reference curvature
    Ee_comp: np.ndarray        # (3, 2) strain components
    Ke_comp: np.ndarray        # (3, 2) bending components
    a_comp: np.ndarray         # (3, 2) components of the projector a
    K0_comp: np.ndarray        # (3, 2) components of K0

    def assemble(self, comp):
        """Map (3, 2) components to the ambient tensor sum_ia comp d0_i (x) a^al."""
        return np.einsum("ia,xi,ya->xy", comp, self.Q0, self.frame0.a_contra)

    def components(self, T):
        """Inverse of assemble for right-tangential tensors: d0_i . T a_alpha."""
        return self.Q0.T @ np.asarray(T) @ self.frame0.a_cov


def elastic_rotation(refframe, defframe, x):
    """Q^e = R Q0^T, mapping reference directors onto deformed ones."""
    Q0 = refframe.check(x)
    R = defframe.check(x)
    return R @ Q0.T


def strain_tensor(config, refframe, chart, x, frame=None):
    """Ambient strain tensor Q^{e,T} Grad_s y - a."""
    frame = geometry.frame_at(chart, x) if frame is None else frame
    Qe = elastic_rotation(refframe, config.frame, x)
    F = geometry.surface_gradient(config.position, chart, x, frame=frame)
    return Qe.T @ F - frame.a


def _axl_curvature(framefield, x, a_contra):
    """axl(R^T d_al R) (x) a^al for one frame field (material representation)."""
    R = framefield.rotation(x)
    out = np.zeros((3, 3))
    for al in range(2):
        dR = framefield.derivative(x, al)
        S = R.T @ dR
        v = axl(0.5 * (S - S.T))      # drop the O(h^2) symmetric FD defect
        out += np.outer(v, a_contra[:, al])
    return out


def _component_curvature(framefield, x, a_cov_dual=None):
    """k_i,al = (d_al d_2 . d_3, d_al d_3 . d_1, d_al d_1 . d_2), shape (3, 2)."""
    R = framefield.rotation(x)
    k = np.empty((3, 2))
    for al in range(2):
        dR = framefield.derivative(x, al)
        M = dR.T @ R                       # M[j, k] = d_al d_j . d_k
        k[0, al] = 0.5 * (M[1, 2] - M[2, 1])
        k[1, al] = 0.5 * (M[2, 0] - M[0, 2])
        k[2, al] = 0.5 * (M[0, 1] - M[1, 0])
    return k


def bending_curvature(config, refframe, chart, x, frame=None, method="components"):
    """Bending-curvature tensors (Ke, K, K0).

    method selects the evaluation route:
      "components"  half-alternator contraction of director derivatives
      "axl"         axial vector of Q^{e,T} d_al Q^e, then split off K0
      "split"       K and K0 from axl forms of R and Q0 separately
    All three agree for orthonormal differentiable frames.
    """
    frame = geometry.frame_at(chart, x) if frame is None else frame
    Q0 = refframe.check(x)
    ac = frame.a_contra

    k0_comp = _component_curvature(refframe, x)
    K0 = np.einsum("ia,xi,ya->xy", k0_comp, Q0, ac)

    if method == "components":
        k_comp = _component_curvature(config.frame, x)
        K = np.einsum("ia,xi,ya->xy", k_comp, Q0, ac)
        return K - K0, K, K0
    if method == "split":
        K = Q0 @ _axl_curvature(config.frame, x, ac)
        K0s = Q0 @ _axl_curvature(refframe, x, ac)
        return K - K0s, K, K0s
    if method == "axl":
        R = config.frame.check(x)
        Qe = R @ Q0.T

        class _QeField(FrameField):
            def __init__(self, cfg_frame, ref_frame):
                self.cfg = cfg_frame
                self.ref = ref_frame
                self.chart = cfg_frame.chart

            def rotation(self, xx):
                return self.cfg.rotation(xx) @ self.ref.rotation(xx).T

        Ke = _axl_curvature(_QeField(config.frame, refframe), x, ac)
        return Ke, Ke + K0, K0
    raise ValueError(f"unknown method {method!r}")


def strain_state(config, chart, x, refframe=None):
    """Full kinematic bundle at the point x."""
    x = np.asarray(x, dtype=float)
    refframe = ReferenceFrame(chart) if refframe is None else refframe
    frame = geometry.frame_at(chart, x)
    Q0 = refframe.check(x)
    R = config.frame.check(x)
    Qe = R @ Q0.T
    F = geometry.surface_gradient(config.position, chart, x, frame=frame)
    Ee = Qe.T @ F - frame.a
    Ke, K, K0 = bending_curvature(config, refframe, chart, x, frame=frame)
    a_cov = frame.a_cov
    return StrainState(
        x=x, frame0=frame, Q0=Q0, R=R, Qe=Qe, F=F, Ee=Ee, Ke=Ke, K=K, K0=K0,
        Ee_comp=Q0.T @ Ee @ a_cov, Ke_comp=Q0.T @ Ke @ a_cov,
        a_comp=Q0.T @ frame.a @ a_cov, K0_comp=Q0.T @ K0 @ a_cov)


def synthetic_state(chart, x, Ee_comp, Ke_comp, Qe=None, refframe=None):
    """Consistent StrainState built directly from component matrices.

    Used by tests and audits that need algebraically prescribed strains:
    F is reconstructed as Qe (Ee + a) and K as Ke + K0.
    """
    x = np.asarray(x, dtype=float)
    refframe = ReferenceFrame(chart) if refframe is None else refframe
    frame = geometry.frame_at(chart, x)
    Q0 = refframe.check(x)
    Qe = np.eye(3) if Qe is None else check_rotation(Qe, tol=1e-9)
    Ee_comp = np.asarray(Ee_comp, dtype=float)
    Ke_comp = np.asarray(Ke_comp, dtype=float)
    assemble = lambda comp: np.einsum("ia,xi,ya->xy", comp, Q0, frame.a_contra)
    Ee = assemble(Ee_comp)
    Ke = assemble(Ke_comp)

    k0_comp = _component_curvature(refframe, x)
    K0 = assemble(k0_comp)
    return StrainState(
        x=x, frame0=frame, Q0=Q0, R=Qe @ Q0, Qe=Qe,
        F=Qe @ (Ee + frame.a), Ee=Ee, Ke=Ke, K=Ke + K0, K0=K0,
        Ee_comp=Ee_comp, Ke_comp=Ke_comp,
        a_comp=Q0.T @ frame.a @ frame.a_cov, K0_comp=k0_comp)
