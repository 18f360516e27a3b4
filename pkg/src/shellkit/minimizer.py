"""Desk-scale variational solver for shell equilibrium.

The parameter rectangle is split into a structured grid of bilinear
quadrilateral cells with 2x2 Gauss quadrature weighted by the reference area
density. Nodal unknowns are positions and rotation matrices; director columns
are interpolated bilinearly (without re-orthonormalization at Gauss points,
an O(mesh^2) defect covered by the refinement checks) and the strain and
bending components are formed directly from director derivatives.

Minimization is descent with multiplicative rotation updates and Armijo
backtracking; search directions come from a limited-memory quasi-Newton
recursion in the moving coordinates. Gradients are available analytically
(default) or by patch-local central differences; the two paths are
cross-checked in the tests.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import InvalidDofs, LineSearchFailed, NonFiniteEnergy
from .kinematics import ReferenceFrame
from .tensors import axl, polar_rotation, rotation_defect, rotation_exp

EDGE_NAMES = ("x1min", "x1max", "x2min", "x2max")
_GAUSS_1D = (0.5 * (1.0 - 1.0 / np.sqrt(3.0)), 0.5 * (1.0 + 1.0 / np.sqrt(3.0)))


@dataclass
class LoadSpec:
    """Dead loads and the boundary partition.

    f: surface force per unit reference area (VectorField-like or None)
    n_star: edge name -> boundary traction per unit reference length
    dirichlet: edge names with prescribed position and rotation
    """
    f: object = None
    n_star: dict = field(default_factory=dict)
    dirichlet: tuple = ()

    def __post_init__(self):
        for name in list(self.n_star) + list(self.dirichlet):
            if name not in EDGE_NAMES:
                raise ValueError(f"unknown edge label {name!r}")
        overlap = set(self.n_star) & set(self.dirichlet)
        if overlap:
            raise ValueError(
                f"edges {sorted(overlap)} appear in both partitions")

    @property
    def has_load(self):
        return self.f is not None or bool(self.n_star)


class ShellMesh:
    """Structured node grid with per-Gauss-point reference geometry."""

    def __init__(self, chart, n1, n2):
        if n1 < 2 or n2 < 2:
            raise ValueError("need at least 2 nodes per direction")
        self.chart = chart
        self.n1, self.n2 = n1, n2
        (x1a, x1b), (x2a, x2b) = chart.extent
        self.x1 = np.linspace(x1a, x1b, n1)
        self.x2 = np.linspace(x2a, x2b, n2)
        self.dx = np.array([self.x1[1] - self.x1[0], self.x2[1] - self.x2[0]])
        self.nodes_xy = np.stack(np.meshgrid(self.x1, self.x2, indexing="ij"),
                                 axis=-1).reshape(-1, 2, order="C")
        # node id of grid point (i, j)
        self._nid = np.arange(n1 * n2).reshape(n1, n2)
        ci, cj = np.meshgrid(np.arange(n1 - 1), np.arange(n2 - 1),
                             indexing="ij")
        ci, cj = ci.ravel(), cj.ravel()
        self.ncells = (n1 - 1) * (n2 - 1)
        self.cell_grid = np.stack([ci, cj], axis=1)
        self.cell_nodes = np.stack([
            self._nid[ci, cj], self._nid[ci + 1, cj],
            self._nid[ci, cj + 1], self._nid[ci + 1, cj + 1]], axis=1)

        # bilinear shape functions at the 2x2 Gauss points (local coords)
        gp = [(a, b) for b in _GAUSS_1D for a in _GAUSS_1D]
        self.ngp = 4
        self.N = np.array([[(1 - a) * (1 - b), a * (1 - b),
                            (1 - a) * b, a * b] for (a, b) in gp])
        self.dN = np.array([[[-(1 - b) / self.dx[0], -(1 - a) / self.dx[1]],
                             [(1 - b) / self.dx[0], -a / self.dx[1]],
                             [-b / self.dx[0], (1 - a) / self.dx[1]],
                             [b / self.dx[0], a / self.dx[1]]]
                            for (a, b) in gp])
        self.w_gp = self.dx[0] * self.dx[1] / 4.0

        ref = ReferenceFrame(chart)
        origin = np.array([self.x1[0], self.x2[0]])
        self.gp_xy = (origin[None, None, :]
                      + (self.cell_grid[:, None, :] + np.array(gp)[None, :, :])
                      * self.dx[None, None, :])
        nc = self.ncells
        self.weights = np.empty((nc, 4))
        self.a_cov = np.empty((nc, 4, 3, 2))
        self.a_contra = np.empty((nc, 4, 3, 2))
        self.normal = np.empty((nc, 4, 3))
        self.a_proj = np.empty((nc, 4, 3, 3))
        self.d0 = np.empty((nc, 4, 3, 3))
        self.refE = np.empty((nc, 4, 3, 2))
        self.k0 = np.empty((nc, 4, 3, 2))
        from .kinematics import _component_curvature
        for c in range(nc):
            for g in range(4):
                x = self.gp_xy[c, g]
                fr = geometry.frame_at(chart, x)
                Q0 = ref.rotation(x)
                self.weights[c, g] = fr.area_density * self.w_gp
                self.a_cov[c, g] = fr.a_cov
                self.a_contra[c, g] = fr.a_contra
                self.normal[c, g] = fr.normal
                self.a_proj[c, g] = fr.a
                self.d0[c, g] = Q0
                self.refE[c, g] = Q0.T @ fr.a_cov
                self.k0[c, g] = _component_curvature(ref, x)

        # patch (adjacent cells) of every node, for localized differencing
        self.node_patch = [[] for _ in range(n1 * n2)]
        for c in range(nc):
            for nd in self.cell_nodes[c]:
                self.node_patch[nd].append(c)
        self.node_patch = [np.array(p) for p in self.node_patch]

        self._edges = self._build_edges(ref)

    def _build_edges(self, ref):
        """1D Gauss data for each boundary edge: nodes, weights, cell ids."""
        edges = {}
        for name in EDGE_NAMES:
            if name in ("x1min", "x1max"):
                fixed_i = 0 if name == "x1min" else self.n1 - 1
                run = [(self._nid[fixed_i, j], self._nid[fixed_i, j + 1])
                       for j in range(self.n2 - 1)]
                cells = [self._cell_of(fixed_i - (name == "x1max"), j)
                         for j in range(self.n2 - 1)]
                axis, width = 1, self.dx[1]
            else:
                fixed_j = 0 if name == "x2min" else self.n2 - 1
                run = [(self._nid[i, fixed_j], self._nid[i + 1, fixed_j])
                       for i in range(self.n1 - 1)]
                cells = [self._cell_of(i, fixed_j - (name == "x2max"))
                         for i in range(self.n1 - 1)]
                axis, width = 0, self.dx[0]
            segs = []
            for (na, nb), cell in zip(run, cells):
                xa = self.nodes_xy[na]
                xb = self.nodes_xy[nb]
                for t in _GAUSS_1D:
                    x = (1 - t) * xa + t * xb
                    tangent = self.chart.jacobian(x)[:, axis]
                    segs.append((na, nb, 1 - t, t, x,
                                 np.linalg.norm(tangent) * width / 2.0, cell))
            edges[name] = segs
        return edges

    def _cell_of(self, i, j):
        i = min(max(i, 0), self.n1 - 2)
        j = min(max(j, 0), self.n2 - 2)
        return i * (self.n2 - 1) + j

    def edge_nodes(self, name):
        out = set()
        for (na, nb, *_rest) in self._edges[name]:
            out.add(int(na))
            out.add(int(nb))
        return out

    def cell_center(self, c):
        return self.gp_xy[c].mean(axis=0)


@dataclass
class DofField:
    """Per-node positions and rotations."""
    y: np.ndarray            # (nnodes, 3)
    R: np.ndarray            # (nnodes, 3, 3)

    @staticmethod
    def reference(mesh):
        ref = ReferenceFrame(mesh.chart)
        y = np.array([mesh.chart.position(x) for x in mesh.nodes_xy])
        R = np.array([ref.rotation(x) for x in mesh.nodes_xy])
        return DofField(y=y, R=R)

    def copy(self):
        return DofField(y=self.y.copy(), R=self.R.copy())

    def validate(self):
        if not np.all(np.isfinite(self.y)) or not np.all(np.isfinite(self.R)):
            raise InvalidDofs("non-finite degrees of freedom")
        worst = max(rotation_defect(R) for R in self.R)
        if worst > 1e-6:
            raise InvalidDofs(f"nodal rotation defect {worst:.2e}")

    def drilled(self, angles):
        """Rotate every node about its own third director."""
        from .drilling import drilling_rotation
        out = self.copy()
        for k in range(len(out.R)):
            out.R[k] = drilling_rotation(angles[k], out.R[k][:, 2]) @ out.R[k]
        return out


def _gp_state(mesh, dofs):
    Y = dofs.y[mesh.cell_nodes]                     # (nc, 4, 3)
    Rn = dofs.R[mesh.cell_nodes]                    # (nc, 4, 3, 3)
    y = np.einsum("gn,cnx->cgx", mesh.N, Y)
    dy = np.einsum("gna,cnx->cgax", mesh.dN, Y)
    d = np.einsum("gn,cnxi->cgix", mesh.N, Rn)      # director i at gp
    dd = np.einsum("gna,cnxi->cgaix", mesh.dN, Rn)
    E = np.einsum("cgax,cgix->cgia", dy, d) - mesh.refE
    M = np.einsum("cgajx,cgkx->cgajk", dd, d)
    k = np.empty_like(E)
    k[..., 0, :] = 0.5 * (M[..., 1, 2] - M[..., 2, 1])
    k[..., 1, :] = 0.5 * (M[..., 2, 0] - M[..., 0, 2])
    k[..., 2, :] = 0.5 * (M[..., 0, 1] - M[..., 1, 0])
    K = k - mesh.k0
    return y, dy, d, dd, E, K


def _ambient(mesh, comp):
    return np.einsum("cgia,cgxi,cgya->cgxy", comp, mesh.d0, mesh.a_contra)


def _density_terms(mesh, T_amb):
    aT = np.einsum("cgxy,cgyz->cgxz", mesh.a_proj, T_amb)
    tr = np.einsum("cgxx->cg", aT)
    tr2 = np.einsum("cgxy,cgyx->cg", aT, aT)
    fro = np.einsum("cgxy,cgxy->cg", aT, aT)
    row = np.einsum("cgx,cgxy->cgy", mesh.normal, T_amb)
    shear = np.einsum("cgy,cgy->cg", row, row)
    return aT, tr, tr2, fro, shear


def cell_energies(mesh, dofs, coeff, loads=None):
    """Per-cell contributions to the total potential."""
    y, dy, d, dd, E, K = _gp_state(mesh, dofs)
    E_amb = _ambient(mesh, E)
    K_amb = _ambient(mesh, K)
    _, trE, trE2, froE, shE = _density_terms(mesh, E_amb)
    _, trK, trK2, froK, shK = _density_terms(mesh, K_amb)
    a1, a2, a3, a4 = coeff.alpha
    b1, b2, b3, b4 = coeff.beta
    W = 0.5 * (a1 * trE ** 2 + a2 * trE2 + a3 * froE + a4 * shE
               + b1 * trK ** 2 + b2 * trK2 + b3 * froK + b4 * shK)
    out = np.einsum("cg,cg->c", W, mesh.weights)
    if loads is not None and loads.f is not None:
        f_gp = _load_values(loads.f, mesh.gp_xy)
        out -= np.einsum("cg,cgx,cgx->c", mesh.weights, f_gp, y)
    if loads is not None:
        for name, trac in loads.n_star.items():
            for (na, nb, wa, wb, x, wl, cell) in mesh._edges[name]:
                yx = wa * dofs.y[na] + wb * dofs.y[nb]
                out[cell] -= wl * np.asarray(_value(trac, x)) @ yx
    return out


def _value(fieldlike, x):
    if hasattr(fieldlike, "value"):
        return fieldlike.value(x)
    if callable(fieldlike):
        return fieldlike(x)
    return np.asarray(fieldlike, dtype=float)


def _load_values(f, xy):
    out = np.empty(xy.shape[:2] + (3,))
    for c in range(xy.shape[0]):
        for g in range(xy.shape[1]):
            out[c, g] = _value(f, xy[c, g])
    return out


def assemble_energy(mesh, dofs, coeff, loads=None):
    """Total potential: internal energy minus the dead-load work."""
    dofs.validate()
    total = float(np.sum(cell_energies(mesh, dofs, coeff, loads)))
    if not np.isfinite(total):
        raise NonFiniteEnergy("energy evaluated to a non-finite value")
    return total


# ---------------------------------------------------------------------------
# gradients

def _density_gradients(mesh, E_amb, K_amb, coeff):
    def grad(T_amb, c1, c2, c3, c4):
        aT = np.einsum("cgxy,cgyz->cgxz", mesh.a_proj, T_amb)
        tr = np.einsum("cgxx->cg", aT)
        aTa = np.einsum("cgxy,cgzy,cgzw->cgxw", mesh.a_proj, T_amb,
                        mesh.a_proj)
        nnT = np.einsum("cgx,cgy,cgyz->cgxz", mesh.normal, mesh.normal, T_amb)
        return (c1 * tr[..., None, None] * mesh.a_proj + c2 * aTa + c3 * aT
                + c4 * nnT)

    GE = grad(E_amb, *coeff.alpha)
    GK = grad(K_amb, *coeff.beta)
    gE = np.einsum("cgxi,cgxy,cgya->cgia", mesh.d0, GE, mesh.a_contra)
    gK = np.einsum("cgxi,cgxy,cgya->cgia", mesh.d0, GK, mesh.a_contra)
    return gE, gK


def gradient_analytic(mesh, dofs, coeff, loads=None):
    """Exact gradient of the discrete potential.

    Returns (grad_y, grad_rot): derivatives wrt nodal positions and wrt
    left-multiplicative rotation increments at each node.
    """
    y, dy, d, dd, E, K = _gp_state(mesh, dofs)
    E_amb = _ambient(mesh, E)
    K_amb = _ambient(mesh, K)
    gE, gK = _density_gradients(mesh, E_amb, K_amb, coeff)
    Rn = dofs.R[mesh.cell_nodes]                    # (nc, 4n, 3, 3)
    d_node = Rn.transpose(0, 1, 3, 2)               # (nc, n, i, x)

    # position dofs: dE_ia = d_al(dy) . d_i
    u = np.einsum("cgia,cgix->cgax", gE, d)
    cell_gy = np.einsum("cg,gna,cgax->cnx", mesh.weights, mesh.dN, u)

    # rotation dofs, strain part: dE_ia = dy_al . (delta x d_i N_n)
    crossE = np.cross(d_node[:, :, None, :, None, :],
                      dy[:, None, :, None, :, :])   # (c, n, g, i, al, x)
    cell_gr = np.einsum("cg,gn,cgia,cngiax->cnx", mesh.weights, mesh.N, gE,
                        crossE)

    # rotation dofs, bending part
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        for (jj, kk, sign) in ((j, k, 1.0), (k, j, -1.0)):
            C1 = np.cross(d_node[:, :, None, jj, :], d[:, None, :, kk, :])
            cell_gr += 0.5 * sign * np.einsum(
                "cg,cga,gna,cngx->cnx", mesh.weights, gK[:, :, i, :],
                mesh.dN, C1)
            C2 = np.cross(d_node[:, :, None, None, kk, :],
                          dd[:, None, :, :, jj, :])
            cell_gr += 0.5 * sign * np.einsum(
                "cg,cga,gn,cngax->cnx", mesh.weights, gK[:, :, i, :],
                mesh.N, C2)

    if loads is not None and loads.f is not None:
        f_gp = _load_values(loads.f, mesh.gp_xy)
        cell_gy -= np.einsum("cg,gn,cgx->cnx", mesh.weights, mesh.N, f_gp)

    nnodes = len(dofs.y)
    grad_y = np.zeros((nnodes, 3))
    grad_r = np.zeros((nnodes, 3))
    np.add.at(grad_y, mesh.cell_nodes, cell_gy)
    np.add.at(grad_r, mesh.cell_nodes, cell_gr)

    if loads is not None:
        for name, trac in loads.n_star.items():
            for (na, nb, wa, wb, x, wl, _cell) in mesh._edges[name]:
                t = wl * np.asarray(_value(trac, x))
                grad_y[na] -= wa * t
                grad_y[nb] -= wb * t
    return grad_y, grad_r


_COLOR_STRIDE = 3


def gradient_fd(mesh, dofs, coeff, loads=None, step=1e-7):
    """Central-difference gradient, batched over non-interacting node colors.

    Nodes three grid lines apart have disjoint cell patches, so one assembly
    evaluates the perturbed energy of every node in a color simultaneously;
    per-node derivatives are read off the patch-local cell sums.
    """
    nnodes = len(dofs.y)
    grad_y = np.zeros((nnodes, 3))
    grad_r = np.zeros((nnodes, 3))
    colors = {}
    coords = np.argwhere(mesh._nid >= 0)
    grid_of_node = coords[mesh._nid.ravel().argsort()]
    for idx in range(nnodes):
        gi, gj = grid_of_node[idx]
        colors.setdefault((gi % _COLOR_STRIDE, gj % _COLOR_STRIDE),
                          []).append(idx)

    def patch_sums(dof_variant, nodes):
        en = cell_energies(mesh, dof_variant, coeff, loads)
        return np.array([en[mesh.node_patch[n]].sum() if
                         len(mesh.node_patch[n]) else 0.0 for n in nodes])

    for nodes in colors.values():
        nodes = np.array(nodes)
        for comp in range(3):
            plus = dofs.copy()
            plus.y[nodes, comp] += step
            minus = dofs.copy()
            minus.y[nodes, comp] -= step
            grad_y[nodes, comp] = (patch_sums(plus, nodes)
                                   - patch_sums(minus, nodes)) / (2 * step)
        for comp in range(3):
            dv = np.zeros(3)
            dv[comp] = step
            Rp = rotation_exp(dv)
            Rm = rotation_exp(-dv)
            plus = dofs.copy()
            plus.R[nodes] = np.einsum("xy,nyz->nxz", Rp, plus.R[nodes])
            minus = dofs.copy()
            minus.R[nodes] = np.einsum("xy,nyz->nxz", Rm, minus.R[nodes])
            grad_r[nodes, comp] = (patch_sums(plus, nodes)
                                   - patch_sums(minus, nodes)) / (2 * step)
    return grad_y, grad_r


def gradient(mesh, dofs, coeff, loads=None, mode="analytic"):
    if mode == "analytic":
        return gradient_analytic(mesh, dofs, coeff, loads)
    if mode == "fd":
        return gradient_fd(mesh, dofs, coeff, loads)
    raise ValueError(f"unknown gradient mode {mode!r}")


# ---------------------------------------------------------------------------
# minimization

@dataclass
class MinimizeOptions:
    gtol: float = 1e-6
    maxiter: int = 500
    memory: int = 12
    c1: float = 1e-4                  # sufficient-decrease constant
    contraction: float = 0.5          # backtracking factor
    gradient_mode: str = "analytic"
    max_backtracks: int = 40


@dataclass
class MinimizeResult:
    dofs: DofField
    energy: float
    gradient_norm: float
    iterations: int
    converged: bool
    history: list                     # rows: (iter, energy, |g|, step)


def _apply_step(dofs, free, p_y, p_r, t):
    out = dofs.copy()
    out.y[free] += t * p_y
    for k, node in enumerate(np.flatnonzero(free)):
        out.R[node] = rotation_exp(t * p_r[k]) @ out.R[node]
        if rotation_defect(out.R[node]) > 1e-9:
            out.R[node] = polar_rotation(out.R[node])
    return out


def minimize(mesh, init, coeff, loads, options=None):
    """Descent on the total potential over free nodal positions/rotations.

    Nodes on Dirichlet edges stay pinned at their initial values. Accepted
    steps decrease the energy monotonically; iteration stops when the free
    gradient norm falls below gtol.
    """
    options = options or MinimizeOptions()
    if not loads.dirichlet and not loads.has_load:
        warnings.warn("no Dirichlet edge and no load: rigid modes are "
                      "unconstrained", stacklevel=2)
    pinned = set()
    for name in loads.dirichlet:
        pinned |= mesh.edge_nodes(name)
    free = np.ones(len(init.y), dtype=bool)
    free[sorted(pinned)] = False
    nfree = int(free.sum())

    dofs = init.copy()
    dofs.validate()
    energy = assemble_energy(mesh, dofs, coeff, loads)
    gy, gr = gradient(mesh, dofs, coeff, loads, options.gradient_mode)
    g = np.concatenate([gy[free].ravel(), gr[free].ravel()])
    gnorm = float(np.linalg.norm(g))
    history = [(0, energy, gnorm, 0.0)]

    s_list, y_list, rho_list = [], [], []

    it = 0
    while gnorm > options.gtol and it < options.maxiter:
        it += 1
        # two-loop recursion for the quasi-Newton direction
        q = g.copy()
        alphas = []
        for s, yv, rho in zip(reversed(s_list), reversed(y_list),
                              reversed(rho_list)):
            a = rho * (s @ q)
            alphas.append(a)
            q -= a * yv
        if y_list:
            sy = s_list[-1] @ y_list[-1]
            yy = y_list[-1] @ y_list[-1]
            q *= sy / yy
        for (s, yv, rho), a in zip(zip(s_list, y_list, rho_list),
                                   reversed(alphas)):
            beta = rho * (yv @ q)
            q += (a - beta) * s
        p = -q
        if p @ g > -1e-14 * np.linalg.norm(p) * gnorm:
            p = -g                      # quasi-Newton direction unusable
            s_list, y_list, rho_list = [], [], []

        p_y = p[:3 * nfree].reshape(nfree, 3)
        p_r = p[3 * nfree:].reshape(nfree, 3)
        slope = float(p @ g)

        t = 1.0
        accepted = False
        for _ in range(options.max_backtracks):
            trial = _apply_step(dofs, free, p_y, p_r, t)
            e_trial = assemble_energy(mesh, trial, coeff, loads)
            if e_trial <= energy + options.c1 * t * slope:
                accepted = True
                break
            t *= options.contraction
        if not accepted:
            if np.array_equal(p, -g):
                raise LineSearchFailed(
                    f"no decrease along steepest descent at iter {it}")
            # steepest-descent restart
            s_list, y_list, rho_list = [], [], []
            p = -g
            p_y = p[:3 * nfree].reshape(nfree, 3)
            p_r = p[3 * nfree:].reshape(nfree, 3)
            slope = float(p @ g)
            t = 1.0
            for _ in range(options.max_backtracks):
                trial = _apply_step(dofs, free, p_y, p_r, t)
                e_trial = assemble_energy(mesh, trial, coeff, loads)
                if e_trial <= energy + options.c1 * t * slope:
                    accepted = True
                    break
                t *= options.contraction
            if not accepted:
                raise LineSearchFailed(
                    f"backtracking exhausted at iteration {it}")

        dofs = trial
        gy, gr = gradient(mesh, dofs, coeff, loads, options.gradient_mode)
        g_new = np.concatenate([gy[free].ravel(), gr[free].ravel()])
        s_vec = t * p
        y_vec = g_new - g
        sy = s_vec @ y_vec
        if sy > 1e-14 * np.linalg.norm(s_vec) * np.linalg.norm(y_vec):
            s_list.append(s_vec)
            y_list.append(y_vec)
            rho_list.append(1.0 / sy)
            if len(s_list) > options.memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)
        g = g_new
        energy = e_trial
        gnorm = float(np.linalg.norm(g))
        history.append((it, energy, gnorm, t))

    return MinimizeResult(dofs=dofs, energy=energy, gradient_norm=gnorm,
                          iterations=it, converged=gnorm <= options.gtol,
                          history=history)


# ---------------------------------------------------------------------------
# equilibrium residual

def _center_state(mesh, dofs, c):
    """Interpolated kinematics at the center of cell c."""
    x = mesh.cell_center(c)
    nodes = mesh.cell_nodes[c]
    N = np.full(4, 0.25)
    dN = np.array([[-1.0 / mesh.dx[0], -1.0 / mesh.dx[1]],
                   [1.0 / mesh.dx[0], -1.0 / mesh.dx[1]],
                   [-1.0 / mesh.dx[0], 1.0 / mesh.dx[1]],
                   [1.0 / mesh.dx[0], 1.0 / mesh.dx[1]]]) * 0.5
    Y = dofs.y[nodes]
    Rn = dofs.R[nodes]
    dy = np.einsum("na,nx->ax", dN, Y)
    d = np.einsum("n,nxi->ix", N, Rn)
    dd = np.einsum("na,nxi->aix", dN, Rn)
    return x, dy, d, dd


def _center_stress(mesh, dofs, coeff, c, ref):
    from .kinematics import _component_curvature, strain_state

    x, dy, d, dd = _center_state(mesh, dofs, c)
    fr = geometry.frame_at(mesh.chart, x)
    Q0 = ref.rotation(x)
    E = np.einsum("ax,ix->ia", dy, d) - Q0.T @ fr.a_cov
    M = np.einsum("ajx,kx->ajk", dd, d)
    k = np.empty((3, 2))
    for al in range(2):
        k[0, al] = 0.5 * (M[al, 1, 2] - M[al, 2, 1])
        k[1, al] = 0.5 * (M[al, 2, 0] - M[al, 0, 2])
        k[2, al] = 0.5 * (M[al, 0, 1] - M[al, 1, 0])
    K = k - _component_curvature(ref, x)

    E_amb = np.einsum("ia,xi,ya->xy", E, Q0, fr.a_contra)
    K_amb = np.einsum("ia,xi,ya->xy", K, Q0, fr.a_contra)
    a, n = fr.a, fr.normal

    def grad(T, c1, c2, c3, c4):
        Tpar = a @ T
        return (c1 * np.trace(Tpar) * a + c2 * a @ T.T @ a + c3 * Tpar
                + c4 * np.outer(n, T.T @ n)) @ a

    Qe = polar_rotation(d.T) @ Q0.T
    N_res = Qe @ grad(E_amb, *coeff.alpha)
    M_res = Qe @ grad(K_amb, *coeff.beta)
    F = np.einsum("ax,ya->xy", dy, fr.a_contra)
    return N_res, M_res, F, fr


def equilibrium_residual(mesh, dofs, coeff, loads=None):
    """Pointwise force/moment balance at interior cell centers.

    Stress and couple resultants are sampled on the grid of cell centers and
    differenced across neighbours, which rides on the smooth part of the
    discretization error; the couple load is taken as zero.
    """
    ref = ReferenceFrame(mesh.chart)
    nc1, nc2 = mesh.n1 - 1, mesh.n2 - 1
    Ns = np.empty((nc1, nc2, 3, 3))
    Ms = np.empty((nc1, nc2, 3, 3))
    Fs = np.empty((nc1, nc2, 3, 3))
    frames = {}
    for c in range(mesh.ncells):
        i, j = divmod(c, nc2)
        Nr, Mr, F, fr = _center_stress(mesh, dofs, coeff, c, ref)
        Ns[i, j], Ms[i, j], Fs[i, j] = Nr, Mr, F
        frames[(i, j)] = fr

    force = []
    moment = []
    points = []
    for i in range(1, nc1 - 1):
        for j in range(1, nc2 - 1):
            fr = frames[(i, j)]
            divN = ((Ns[i + 1, j] - Ns[i - 1, j]) / (2 * mesh.dx[0])
                    @ fr.a_contra[:, 0]
                    + (Ns[i, j + 1] - Ns[i, j - 1]) / (2 * mesh.dx[1])
                    @ fr.a_contra[:, 1])
            divM = ((Ms[i + 1, j] - Ms[i - 1, j]) / (2 * mesh.dx[0])
                    @ fr.a_contra[:, 0]
                    + (Ms[i, j + 1] - Ms[i, j - 1]) / (2 * mesh.dx[1])
                    @ fr.a_contra[:, 1])
            x = mesh.cell_center(i * nc2 + j)
            fval = (np.asarray(_value(loads.f, x))
                    if loads is not None and loads.f is not None
                    else np.zeros(3))
            NFt = Ns[i, j] @ Fs[i, j].T
            force.append(divN + fval)
            moment.append(divM + axl(NFt - NFt.T))
            points.append(x)
    force = np.array(force)
    moment = np.array(moment)
    return {
        "points": np.array(points),
        "force": force,
        "moment": moment,
        "max_force": float(np.linalg.norm(force, axis=1).max())
        if len(force) else 0.0,
        "max_moment": float(np.linalg.norm(moment, axis=1).max())
        if len(moment) else 0.0,
    }
