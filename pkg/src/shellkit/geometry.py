"""Reference-surface differential geometry from a closed-form chart.

A chart maps (x1, x2) in a bounded rectangle to ambient positions. From it we
build the covariant/contravariant bases, unit normal, tangential projector a,
curvature tensor b = -Grad_s n, alternator c, and the surface gradient and
divergence operators. Derivatives come either from supplied closed forms
("analytic" mode) or from central finite differences on the chart map.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChart
from .fields import ScalarField
from .tensors import EYE3, skew

FD_STEP_REL = 1e-5            # default chart step, relative to domain diameter
DIRECTOR_FD_STEP_REL = 2e-6   # step for differentiating director/tensor fields
METRIC_COND_MAX = 1e8


class SurfaceChart:
    """Closed-form chart over a rectangle, with selectable derivative mode.

    position(x)  -> (3,) ambient point
    jacobian(x)  -> (3, 2) columns are the covariant base vectors (analytic mode)
    hessian(x)   -> (3, 2, 2) second derivatives of the map (analytic mode)
    """

    def __init__(self, position, extent, jacobian=None, hessian=None,
                 mode="analytic", fd_step=None, name="chart"):
        if mode == "analytic" and (jacobian is None or hessian is None):
            raise ValueError("analytic mode requires jacobian and hessian")
        self.name = name
        self._position = position
        self._jacobian = jacobian
        self._hessian = hessian
        self.mode = mode
        self.extent = np.asarray(extent, dtype=float)   # [[x1min,x1max],[x2min,x2max]]
        spans = self.extent[:, 1] - self.extent[:, 0]
        self.diameter = float(np.hypot(*spans))
        self.fd_step = fd_step if fd_step is not None else FD_STEP_REL * self.diameter
        self.field_step = DIRECTOR_FD_STEP_REL * self.diameter

    def position(self, x):
        return np.asarray(self._position(np.asarray(x, dtype=float)), dtype=float)

    def jacobian(self, x):
        if self.mode == "analytic":
            return np.asarray(self._jacobian(np.asarray(x, dtype=float)), dtype=float)
        return self._fd_jacobian(x, self.fd_step)

    def _fd_jacobian(self, x, h):
        x = np.asarray(x, dtype=float)
        J = np.empty((3, 2))
        for al in range(2):
            e = np.zeros(2)
            e[al] = h
            J[:, al] = (self.position(x + e) - self.position(x - e)) / (2 * h)
        return J

    def normal(self, x):
        J = self.jacobian(x)
        u = np.cross(J[:, 0], J[:, 1])
        nrm = np.linalg.norm(u)
        if nrm < 1e-12:
            raise DegenerateChart(f"{self.name}: ||a1 x a2|| = {nrm:.3e} at {x}")
        return u / nrm

    def normal_derivatives(self, x):
        """d normal / d x_alpha, shape (3, 2)."""
        if self.mode == "analytic":
            J = self.jacobian(x)
            H = np.asarray(self._hessian(np.asarray(x, dtype=float)), dtype=float)
            u = np.cross(J[:, 0], J[:, 1])
            nrm = np.linalg.norm(u)
            if nrm < 1e-12:
                raise DegenerateChart(f"{self.name}: degenerate at {x}")
            n = u / nrm
            dn = np.empty((3, 2))
            for al in range(2):
                du = (np.cross(H[:, 0, al], J[:, 1])
                      + np.cross(J[:, 0], H[:, 1, al]))
                dn[:, al] = (du - (n @ du) * n) / nrm
            return dn
        h = self.fd_step
        x = np.asarray(x, dtype=float)
        dn = np.empty((3, 2))
        for al in range(2):
            e = np.zeros(2)
            e[al] = h
            dn[:, al] = (self.normal(x + e) - self.normal(x - e)) / (2 * h)
        return dn

    def contains(self, x):
        return bool(np.all(x >= self.extent[:, 0] - 1e-12)
                    and np.all(x <= self.extent[:, 1] + 1e-12))

    def interior_point(self, rng, margin=0.05):
        lo = self.extent[:, 0]
        hi = self.extent[:, 1]
        pad = margin * (hi - lo)
        return rng.uniform(lo + pad, hi - pad)


@dataclass(frozen=True)
class SurfaceFrame:
    """Pointwise geometric data of the reference surface."""
    x: np.ndarray
    position: np.ndarray
    a_cov: np.ndarray        # (3, 2) covariant base vectors a_alpha
    a_contra: np.ndarray     # (3, 2) contravariant base vectors a^alpha
    normal: np.ndarray
    a: np.ndarray            # tangential projector, = 1 - n (x) n
    b: np.ndarray            # curvature tensor -Grad_s n
    c: np.ndarray            # in-plane alternator, = -skew(n)
    metric: np.ndarray       # (2, 2) a_alpha . a_beta
    area_density: float      # sqrt(det metric)


def frame_at(chart, x):
    """Evaluate the SurfaceFrame of the chart at parameter point x."""
    x = np.asarray(x, dtype=float)
    J = chart.jacobian(x)
    u = np.cross(J[:, 0], J[:, 1])
    sqrt_a = np.linalg.norm(u)
    if sqrt_a < 1e-12:
        raise DegenerateChart(f"{chart.name}: ||a1 x a2|| = {sqrt_a:.3e} at {x}")
    n = u / sqrt_a
    metric = J.T @ J
    ev = np.linalg.eigvalsh(metric)
    if ev[0] <= 0 or ev[1] / ev[0] > METRIC_COND_MAX:
        raise DegenerateChart(
            f"{chart.name}: metric condition {ev[1] / max(ev[0], 1e-300):.3e} at {x}")
    a_contra = J @ np.linalg.inv(metric)
    dn = chart.normal_derivatives(x)
    b = -dn @ a_contra.T                      # -d_al n (x) a^al
    a = EYE3 - np.outer(n, n)
    return SurfaceFrame(x=x, position=chart.position(x), a_cov=J,
                        a_contra=a_contra, normal=n, a=a, b=b,
                        c=-skew(n), metric=metric,
                        area_density=float(sqrt_a))


def _as_callable(fieldfn):
    return fieldfn if callable(fieldfn) else fieldfn.value


def _field_derivative(fieldfn, chart, x, al, h=None):
    fn = _as_callable(fieldfn)
    h = chart.field_step if h is None else h
    e = np.zeros(2)
    e[al] = h
    return (np.asarray(fn(x + e), dtype=float)
            - np.asarray(fn(x - e), dtype=float)) / (2 * h)


def surface_gradient(fieldfn, chart, x, frame=None):
    """Grad_s f = d_alpha f (x) a^alpha for a vector field f(x1, x2).

    Fields with an analytic `grad(x) -> (3, 2)` method are differentiated
    exactly; plain callables use central differences with the chart's field
    step. The result annihilates the normal from the right.
    """
    frame = frame_at(chart, x) if frame is None else frame
    if hasattr(fieldfn, "grad"):
        D = np.asarray(fieldfn.grad(x), dtype=float)
    else:
        D = np.stack([_field_derivative(fieldfn, chart, x, al)
                      for al in range(2)], axis=1)
    return D @ frame.a_contra.T


def surface_divergence(tensorfn, chart, x, frame=None):
    """Div_s T = (d_alpha T) a^alpha for a tensor field T(x1, x2) -> (3, 3).

    Adjoint trace-contraction of surface_gradient: for right-tangential T the
    divergence theorem holds against the conormal line flux sqrt(a) T a^alpha.
    """
    frame = frame_at(chart, x) if frame is None else frame
    out = np.zeros(3)
    for al in range(2):
        dT = _field_derivative(tensorfn, chart, x, al)
        out += dT @ frame.a_contra[:, al]
    return out


# ---------------------------------------------------------------------------
# chart catalog

def plate_chart(extent=((0.0, 1.0), (0.0, 1.0)), mode="analytic", fd_step=None):
    def pos(x):
        return np.array([x[0], x[1], 0.0])

    def jac(x):
        return np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

    def hes(x):
        return np.zeros((3, 2, 2))

    return SurfaceChart(pos, extent, jac, hes, mode=mode, fd_step=fd_step,
                        name="plate")


def cylinder_chart(radius=1.0, extent=((0.0, 1.0), (0.0, 1.0)),
                   mode="analytic", fd_step=None):
    """x1 is arc length around the axis e3, x2 runs along the axis."""
    r = float(radius)

    def pos(x):
        t = x[0] / r
        return np.array([r * np.cos(t), r * np.sin(t), x[1]])

    def jac(x):
        t = x[0] / r
        return np.array([[-np.sin(t), 0.0], [np.cos(t), 0.0], [0.0, 1.0]])

    def hes(x):
        t = x[0] / r
        H = np.zeros((3, 2, 2))
        H[0, 0, 0] = -np.cos(t) / r
        H[1, 0, 0] = -np.sin(t) / r
        return H

    return SurfaceChart(pos, extent, jac, hes, mode=mode, fd_step=fd_step,
                        name=f"cylinder(r={r:g})")


def sphere_chart(radius=1.0, extent=((-0.6, 0.6), (-0.6, 0.6)),
                 mode="analytic", fd_step=None):
    """Longitude/latitude patch away from the poles, outward normal."""
    r = float(radius)

    def pos(x):
        ph, la = x
        return r * np.array([np.cos(la) * np.cos(ph), np.cos(la) * np.sin(ph),
                             np.sin(la)])

    def jac(x):
        ph, la = x
        return r * np.array([[-np.cos(la) * np.sin(ph), -np.sin(la) * np.cos(ph)],
                             [np.cos(la) * np.cos(ph), -np.sin(la) * np.sin(ph)],
                             [0.0, np.cos(la)]])

    def hes(x):
        ph, la = x
        H = np.empty((3, 2, 2))
        H[0] = r * np.array([[-np.cos(la) * np.cos(ph), np.sin(la) * np.sin(ph)],
                             [np.sin(la) * np.sin(ph), -np.cos(la) * np.cos(ph)]])
        H[1] = r * np.array([[-np.cos(la) * np.sin(ph), -np.sin(la) * np.cos(ph)],
                             [-np.sin(la) * np.cos(ph), -np.cos(la) * np.sin(ph)]])
        H[2] = r * np.array([[0.0, 0.0], [0.0, -np.sin(la)]])
        return H

    return SurfaceChart(pos, extent, jac, hes, mode=mode, fd_step=fd_step,
                        name=f"sphere(r={r:g})")


def graph_chart(height, extent=((0.0, 1.0), (0.0, 1.0)), mode="analytic",
                fd_step=None):
    """Graph surface (x1, x2, f(x1, x2)) for an analytic scalar field f."""
    if not isinstance(height, ScalarField):
        raise TypeError("graph_chart needs a ScalarField height")

    def pos(x):
        return np.array([x[0], x[1], height.value(x)])

    def jac(x):
        g = height.grad(x)
        return np.array([[1.0, 0.0], [0.0, 1.0], [g[0], g[1]]])

    def hes(x):
        H = np.zeros((3, 2, 2))
        H[2] = height.hess(x)
        return H

    return SurfaceChart(pos, extent, jac, hes, mode=mode, fd_step=fd_step,
                        name="graph")


def catalog_chart(kind, mode="analytic", fd_step=None, **kw):
    builders = {"plate": plate_chart, "cylinder": cylinder_chart,
                "sphere": sphere_chart, "graph": graph_chart}
    if kind not in builders:
        raise ValueError(f"unknown chart kind {kind!r}")
    return builders[kind](mode=mode, fd_step=fd_step, **kw)
