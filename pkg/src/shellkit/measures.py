"""Drill-invariant reduced quantities of the shell deformation.

Two routes produce the same objects:

* from a strain state, via algebraic combinations of the strain and bending
  tensors (first integrals of the in-plane rotation flow);
* from the deformed position and third-director fields directly, without any
  elastic-rotation split.

The membrane strain, transverse shear, and the two bending-strain variants are
derived from them; the drill-curvature row is the one quantity that is *not*
invariant (it shifts by the drill-angle gradient).
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .tensors import skew, sym, skw


@dataclass(frozen=True)
class ReducedMeasures:
    """Invariant bundle; planar tensors are ambient 3x3 with normal kernel."""
    cauchy_green: np.ndarray            # F^T F
    transverse_shear: np.ndarray        # F^T d3 (ambient tangent vector)
    curvature_pullback: np.ndarray      # F^T Grad_s d3
    drill_curvature: np.ndarray | None  # n . bending rows (not drill-invariant)
    curvature_pullback_rotated: np.ndarray   # F^T (d3 x Grad_s d3)
    membrane_strain: np.ndarray         # (F^T F - a) / 2
    shear_strain: np.ndarray            # alias of transverse_shear
    bending_strain: np.ndarray          # pullback-based bending/twist tensor
    bending_strain_alt: np.ndarray      # rotated (cross-product) variant

    def as_tuple(self):
        return (self.cauchy_green, self.transverse_shear,
                self.curvature_pullback, self.drill_curvature,
                self.curvature_pullback_rotated)


def first_integrals(state):
    """The five invariant combinations of (Ee, Ke) and the surface data.

    Returns (U1, U2, U3, U4, U5) with
      U1 = (Ee + a)^T (Ee + a)        U2 = Ee^T n
      U3 = (Ee + a)^T c (Ke + K0)     U4 = Ke^T n
      U5 = ((a Ee)^T + a) (Ke + K0)
    """
    a = state.frame0.a
    c = state.frame0.c
    n = state.frame0.normal
    P = state.Ee + a
    G = state.Ke + state.K0
    U1 = P.T @ P
    U2 = state.Ee.T @ n
    U3 = P.T @ c @ G
    U4 = state.Ke.T @ n
    U5 = ((a @ state.Ee).T + a) @ G
    return U1, U2, U3, U4, U5


def reduced_from_gradients(config, chart, x):
    """(F^T F, F^T d3, F^T Grad_s d3, F^T (d3 x Grad_s d3)) straight from fields.

    No elastic-rotation decomposition enters; the third director is read off
    the deformed frame and differentiated as an ordinary vector field.
    """
    frame = geometry.frame_at(chart, x)
    F = geometry.surface_gradient(config.position, chart, x, frame=frame)
    d3 = config.d3_field(x)
    Gd3 = geometry.surface_gradient(lambda xx: config.d3_field(xx), chart, x,
                                    frame=frame)
    return F.T @ F, F.T @ d3, F.T @ Gd3, F.T @ (skew(d3) @ Gd3)


def strain_measures(state):
    """Membrane, shear and bending/twist measures from a strain state."""
    fr = state.frame0
    a, b, c, n = fr.a, fr.b, fr.c, fr.normal
    E, K = state.Ee, state.Ke
    Epar = a @ E
    quad = 0.5 * E.T @ E
    membrane = quad + sym(Epar)
    shear = E.T @ n
    bend = (E.T + a) @ c @ K + (quad + skw(Epar)) @ b
    bend_alt = (E.T + a) @ (a @ K) - (quad + skw(Epar)) @ (c @ b)
    U1, U2, U3, U4, U5 = first_integrals(state)
    return ReducedMeasures(
        cauchy_green=U1, transverse_shear=U2, curvature_pullback=U3,
        drill_curvature=U4, curvature_pullback_rotated=U5,
        membrane_strain=membrane, shear_strain=shear,
        bending_strain=bend, bending_strain_alt=bend_alt)


def measures_from_config(config, chart, x):
    """Same bundle evaluated through the position/third-director route."""
    frame = geometry.frame_at(chart, x)
    a, b, n = frame.a, frame.b, frame.normal
    U1, U2, U3, U5 = reduced_from_gradients(config, chart, x)
    membrane = 0.5 * (U1 - a)
    nxb = skew(n) @ b
    bend = (U3 + b) + membrane @ b
    bend_alt = (U5 + nxb) + membrane @ nxb
    return ReducedMeasures(
        cauchy_green=U1, transverse_shear=U2, curvature_pullback=U3,
        drill_curvature=None, curvature_pullback_rotated=U5,
        membrane_strain=membrane, shear_strain=U2,
        bending_strain=bend, bending_strain_alt=bend_alt)


def planar_block(T, d1, d2):
    """2x2 in-plane component block of an ambient planar tensor."""
    basis = (d1, d2)
    return np.array([[basis[i] @ T @ basis[j] for j in range(2)]
                     for i in range(2)])


def dev2_sym(T, a):
    """In-plane deviatoric part of the symmetric part of a planar tensor."""
    S = sym(T)
    return S - 0.5 * np.trace(S) * a
