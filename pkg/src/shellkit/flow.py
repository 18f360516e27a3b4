"""In-plane rotation flow whose first integrals are the reduced measures.

The flow acts pointwise: with frozen surface data (a, c, K0) it advances

    dE/ds = c (E + a),        dK/ds = c (K + K0),

a rotation of the tangential rows with period 2 pi. A classical fixed-step
fourth-order integrator is used; the closed-form solution through the rotation
exponential serves as the accuracy oracle.
"""

from dataclasses import dataclass

import numpy as np

from .measures import first_integrals
from .tensors import rotation_exp


@dataclass
class FlowTrajectory:
    """Sampled trajectory with the frozen geometry of the starting state."""
    s: np.ndarray              # (nsteps + 1,)
    Ee: np.ndarray             # (nsteps + 1, 3, 3)
    Ke: np.ndarray             # (nsteps + 1, 3, 3)
    state0: object             # starting StrainState (frozen geometry source)

    def state_at(self, k):
        """StrainState-like view of sample k (geometry frozen at s = 0)."""
        from dataclasses import replace
        st = self.state0
        Ee, Ke = self.Ee[k], self.Ke[k]
        return replace(st, Ee=Ee, Ke=Ke, K=Ke + st.K0,
                       Ee_comp=st.components(Ee), Ke_comp=st.components(Ke))


def _rhs(c, a, K0, Ee, Ke):
    return c @ (Ee + a), c @ (Ke + K0)


def integrate_flow(initial, s_end, steps):
    """Integrate the flow from a strain state with classical RK4.

    steps >= 8; geometry (a, c, K0) is frozen at the initial state's point.
    """
    if steps < 8:
        raise ValueError("need at least 8 steps")
    a = initial.frame0.a
    c = initial.frame0.c
    K0 = initial.K0
    h = s_end / steps
    s = np.linspace(0.0, s_end, steps + 1)
    Ee = np.empty((steps + 1, 3, 3))
    Ke = np.empty((steps + 1, 3, 3))
    Ee[0], Ke[0] = initial.Ee, initial.Ke
    for k in range(steps):
        E0, G0 = Ee[k], Ke[k]
        k1E, k1K = _rhs(c, a, K0, E0, G0)
        k2E, k2K = _rhs(c, a, K0, E0 + 0.5 * h * k1E, G0 + 0.5 * h * k1K)
        k3E, k3K = _rhs(c, a, K0, E0 + 0.5 * h * k2E, G0 + 0.5 * h * k2K)
        k4E, k4K = _rhs(c, a, K0, E0 + h * k3E, G0 + h * k3K)
        Ee[k + 1] = E0 + (h / 6.0) * (k1E + 2 * k2E + 2 * k3E + k4E)
        Ke[k + 1] = G0 + (h / 6.0) * (k1K + 2 * k2K + 2 * k3K + k4K)
    return FlowTrajectory(s=s, Ee=Ee, Ke=Ke, state0=initial)


def closed_form_flow(initial, s):
    """Exact solution: tangential rows rotated by angle -s about the normal."""
    a = initial.frame0.a
    K0 = initial.K0
    n = initial.frame0.normal
    Q = rotation_exp(-s * n)           # exp(s c) with c = -skew(n)
    Ee = Q @ (initial.Ee + a) - a
    Ke = Q @ (initial.Ke + K0) - K0
    return Ee, Ke


def first_integral_drift(trajectory):
    """Max deviation of each invariant along the trajectory.

    Returns a dict keyed by invariant name; values are max over samples of the
    Frobenius/Euclidean distance to the starting value.
    """
    names = ("cauchy_green", "transverse_shear", "curvature_pullback",
             "drill_curvature", "curvature_pullback_rotated")
    ref = first_integrals(trajectory.state0)
    drift = dict.fromkeys(names, 0.0)
    for k in range(len(trajectory.s)):
        vals = first_integrals(trajectory.state_at(k))
        for name, v0, v in zip(names, ref, vals):
            drift[name] = max(drift[name], float(np.linalg.norm(v - v0)))
    return drift


def planar_row_drift(trajectory):
    """Drift of a tangential row of (Ee + a): the designated negative control.

    The flow rotates tangential rows, so this quantity moves at O(s) while the
    five invariants stay fixed.
    """
    st = trajectory.state0
    a = st.frame0.a
    d1 = st.Q0[:, 0]
    ref = d1 @ (st.Ee + a)
    worst = 0.0
    for k in range(len(trajectory.s)):
        worst = max(worst, float(np.linalg.norm(d1 @ (trajectory.Ee[k] + a) - ref)))
    return worst
