"""Infinitesimal displacement/rotation kinematics and consistency checks.

For a small displacement u and small-rotation vector psi the strain tensors
linearize to Grad_s u - psi x a and Grad_s psi; the invariant measures
linearize to expressions that are exactly independent of the drilling
component n . psi. Order-of-accuracy checks compare them against the nonlinear
measures of the finite configuration built with the rotation exponential.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .fields import VectorField
from .kinematics import (DeformedConfig, PositionMap, ReferenceFrame,
                         RotationVectorFrame)
from .measures import measures_from_config
from .tensors import skew, skw, sym


@dataclass(frozen=True)
class LinearState:
    """Displacement and small-rotation fields (ambient components)."""
    u: VectorField
    psi: VectorField


def linear_strains(lin, chart, x, frame=None):
    """Linearized strain and bending tensors (Ee_lin, Ke_lin)."""
    frame = geometry.frame_at(chart, x) if frame is None else frame
    Gu = geometry.surface_gradient(lin.u, chart, x, frame=frame)
    Gpsi = geometry.surface_gradient(lin.psi, chart, x, frame=frame)
    Ee_lin = Gu - skew(lin.psi.value(x)) @ frame.a
    return Ee_lin, Gpsi


def linear_measures(lin, chart, x, frame=None):
    """Linearized invariant measures (membrane, shear, bending).

    The tangential projection of psi is applied before differentiation, so the
    results are bit-for-bit independent of the drilling component of psi.
    """
    frame = geometry.frame_at(chart, x) if frame is None else frame
    Gu = geometry.surface_gradient(lin.u, chart, x, frame=frame)
    aGu = frame.a @ Gu
    membrane = sym(aGu)
    shear = Gu.T @ frame.normal + frame.c @ lin.psi.value(x)

    def tangential_psi(xx):
        fr = geometry.frame_at(chart, xx)
        return fr.a @ lin.psi.value(xx)

    G_apsi = geometry.surface_gradient(tangential_psi, chart, x, frame=frame)
    bending = frame.c @ G_apsi + skw(aGu) @ frame.b
    return membrane, shear, bending


def finite_config(lin, chart, eps):
    """Finite configuration y0 + eps u with frame exp(skew(eps psi)) Q0."""
    scaled_u = VectorField(tuple(_scaled(c, eps) for c in lin.u.components))
    scaled_psi = VectorField(tuple(_scaled(c, eps) for c in lin.psi.components))
    return DeformedConfig(
        PositionMap(chart, displacement=scaled_u),
        RotationVectorFrame(ReferenceFrame(chart), scaled_psi))


def _scaled(sf, factor):
    from .fields import ScalarField, Term
    return ScalarField(tuple(Term(t.coef * factor, t.powers, t.trig)
                             for t in sf.terms))


def _measure_vec(meas):
    return np.concatenate([meas.membrane_strain.ravel(),
                           np.asarray(meas.shear_strain).ravel(),
                           meas.bending_strain.ravel()])


def linearization_defect(lin, chart, x, eps):
    """|| nonlinear measures(eps) - eps * linear measures ||, stacked."""
    meas = measures_from_config(finite_config(lin, chart, eps), chart, x)
    lin_m, lin_g, lin_b = linear_measures(lin, chart, x)
    lin_vec = np.concatenate([lin_m.ravel(), lin_g.ravel(), lin_b.ravel()])
    return float(np.linalg.norm(_measure_vec(meas) - eps * lin_vec))


def linearization_order_check(lin, chart, x, epsilons=(1e-2, 5e-3, 2.5e-3)):
    """Defects along a decreasing eps ladder and their halving ratios."""
    defects = [linearization_defect(lin, chart, x, e) for e in epsilons]
    ratios = [defects[k] / defects[k + 1] if defects[k + 1] > 0 else np.inf
              for k in range(len(defects) - 1)]
    return np.array(defects), np.array(ratios)


def linearized_nonlinear_measures(lin, chart, x, eps=1e-3):
    """Directional derivative of the nonlinear measures at the reference state.

    Richardson-extrapolated central differences in the family parameter; used
    as the oracle for the bending-measure relation between the two variants.
    """
    def stacked(e):
        meas = measures_from_config(finite_config(lin, chart, e), chart, x)
        return np.concatenate([meas.membrane_strain.ravel(),
                               np.asarray(meas.shear_strain).ravel(),
                               meas.bending_strain.ravel(),
                               meas.bending_strain_alt.ravel()])

    def central(e):
        return (stacked(e) - stacked(-e)) / (2 * e)

    d = (4.0 * central(eps / 2) - central(eps)) / 3.0
    membrane = d[:9].reshape(3, 3)
    shear = d[9:12]
    bending = d[12:21].reshape(3, 3)
    bending_alt = d[21:].reshape(3, 3)
    return membrane, shear, bending, bending_alt
