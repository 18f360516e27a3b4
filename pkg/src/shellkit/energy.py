"""Isotropic strain-energy densities, coefficient mappings, and diagnostics.

The general physically linear density is a quadratic form in the strain and
bending tensors with four in-plane coefficients each:

    2 W = a1 (tr E_par)^2 + a2 tr(E_par^2) + a3 tr(E_par^T E_par) + a4 |n E|^2
        + b1 (tr K_par)^2 + b2 tr(K_par^2) + b3 tr(K_par^T K_par) + b4 |n K|^2

with E_par = a E the tangential part. Engineering parameter sets map onto
(a_k, b_k) either with independent shear/twist corrections or in the reduced
drill-free form whose quadratic form is only positive semi-definite. Reduced
energies in the invariant measures are provided in the rotated-bending and
plain-bending variants, plus the full composed drill-free density.
"""

import math
from dataclasses import dataclass

import numpy as np

from .measures import dev2_sym, strain_measures
from .tensors import sym

DEFAULT_SHEAR_CORRECTION = 5.0 / 6.0
DEFAULT_TWIST_CORRECTION = 7.0 / 10.0


@dataclass(frozen=True)
class EngineeringParams:
    """Isotropic material and thickness data for the coefficient mappings."""
    E: float
    nu: float
    h: float
    alpha_s: float = DEFAULT_SHEAR_CORRECTION
    alpha_t: float = DEFAULT_TWIST_CORRECTION
    kappa: float = DEFAULT_SHEAR_CORRECTION

    def __post_init__(self):
        if not (self.E > 0):
            raise ValueError("Young modulus must be positive")
        if not (-1.0 < self.nu < 0.5):
            raise ValueError("Poisson ratio must lie in (-1, 1/2)")
        if not (self.h > 0):
            raise ValueError("thickness must be positive")
        if min(self.alpha_s, self.alpha_t, self.kappa) <= 0:
            raise ValueError("correction factors must be positive")

    @property
    def C(self):
        """Stretching stiffness E h / (1 - nu^2)."""
        return self.E * self.h / (1.0 - self.nu ** 2)

    @property
    def D(self):
        """Bending stiffness E h^3 / (12 (1 - nu^2))."""
        return self.E * self.h ** 3 / (12.0 * (1.0 - self.nu ** 2))

    @property
    def mu(self):
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def lam(self):
        return self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))


@dataclass(frozen=True)
class EnergyCoefficients:
    alpha: tuple
    beta: tuple

    def __post_init__(self):
        if len(self.alpha) != 4 or len(self.beta) != 4:
            raise ValueError("need four alpha and four beta coefficients")
        if not all(map(math.isfinite, (*self.alpha, *self.beta))):
            raise ValueError("coefficients must be finite")

    def coercivity_margins(self):
        """The eight quadratic-form eigenvalue combinations, keyed by mode."""
        a1, a2, a3, a4 = self.alpha
        b1, b2, b3, b4 = self.beta
        return {
            "strain_trace": 2 * a1 + a2 + a3,
            "strain_dev": a2 + a3,
            "strain_spin": a3 - a2,
            "strain_shear": a4,
            "bending_trace": 2 * b1 + b2 + b3,
            "bending_dev": b2 + b3,
            "bending_spin": b3 - b2,
            "bending_drill": b4,
        }

    def is_coercive(self):
        return all(v > 0 for v in self.coercivity_margins().values())


def coefficients_pietraszkiewicz(params):
    """Engineering mapping with independent shear and twist corrections."""
    C, D, nu = params.C, params.D, params.nu
    return EnergyCoefficients(
        alpha=(C * nu, 0.0, C * (1 - nu), params.alpha_s * C * (1 - nu)),
        beta=(D * nu, 0.0, D * (1 - nu), params.alpha_t * D * (1 - nu)))


def coefficients_drill_free(params):
    """Coefficients of the quadratic drill-free density (semi-definite form)."""
    C, D, nu = params.C, params.D, params.nu
    return EnergyCoefficients(
        alpha=(C * nu, 0.5 * C * (1 - nu), 0.5 * C * (1 - nu),
               0.5 * C * (1 - nu) * params.kappa),
        beta=(-0.5 * D * (1 - nu), -D * nu, D, 0.0))


def coefficients_drill_free_lame(params):
    """Same mapping written in the Lame moduli; used as a cross-check."""
    mu, lam, h = params.mu, params.lam, params.h
    lam_star = 2.0 * mu * lam / (2.0 * mu + lam)
    h3 = h ** 3 / 12.0
    return EnergyCoefficients(
        alpha=(h * lam_star, h * mu, h * mu, h * mu * params.kappa),
        beta=(-h3 * mu, -h3 * lam_star,
              h3 * 4.0 * mu * (mu + lam) / (2.0 * mu + lam), 0.0))


def _quadratic_terms(T, a, n):
    """(tr T_par)^2 basis values: returns (tr, tr T_par^2, ||T_par||^2, |n T|^2)."""
    Tpar = a @ T
    tr = np.trace(Tpar)
    tr_sq = np.trace(Tpar @ Tpar)
    fro = float(np.sum(Tpar * Tpar))
    row = T.T @ n
    return tr, tr_sq, fro, float(row @ row)


def energy_general(state, coeff):
    """General quadratic density evaluated on a strain state."""
    a = state.frame0.a
    n = state.frame0.normal
    tE, tE2, fE, sE = _quadratic_terms(state.Ee, a, n)
    tK, tK2, fK, sK = _quadratic_terms(state.Ke, a, n)
    a1, a2, a3, a4 = coeff.alpha
    b1, b2, b3, b4 = coeff.beta
    return 0.5 * (a1 * tE ** 2 + a2 * tE2 + a3 * fE + a4 * sE
                  + b1 * tK ** 2 + b2 * tK2 + b3 * fK + b4 * sK)


def energy_reduced(meas, params, form="psi_dev"):
    """Quadratic density in the invariant measures.

    form:
      "phi"      rotated-bending variant (norm / trace-square combination)
      "psi_tr"   plain-bending variant with the trace-of-square term
      "psi_dev"  plain-bending variant with the in-plane deviator
    The two psi forms are algebraically identical; the phi form agrees with
    them whenever the measures come from one state (exactly so at quadratic
    order, to O(strain^3) beyond).
    """
    C, D, nu, kap = params.C, params.D, params.nu, params.kappa
    Eps = meas.membrane_strain
    gam = meas.shear_strain
    membrane = C * ((1 - nu) * float(np.sum(Eps * Eps)) + nu * np.trace(Eps) ** 2)
    shear = 0.5 * C * (1 - nu) * kap * float(gam @ gam)
    if form == "phi":
        Phi = meas.bending_strain_alt
        bend = D * (float(np.sum(Phi * Phi)) - nu * np.trace(Phi @ Phi)
                    - 0.5 * (1 - nu) * np.trace(Phi) ** 2)
    elif form == "psi_tr":
        Psi = meas.bending_strain
        bend = D * (0.5 * (1 - nu) * float(np.sum(Psi * Psi))
                    + 0.5 * (1 - nu) * np.trace(Psi @ Psi)
                    + nu * np.trace(Psi) ** 2)
    elif form == "psi_dev":
        Psi = meas.bending_strain
        dev = dev2_sym(Psi, meas_a(meas))
        bend = D * (0.5 * (1 + nu) * np.trace(Psi) ** 2
                    + (1 - nu) * float(np.sum(dev * dev)))
    else:
        raise ValueError(f"unknown reduced form {form!r}")
    return 0.5 * (membrane + shear + bend)


def meas_a(meas):
    """Tangential projector recovered from the measures bundle."""
    # membrane strain and cauchy_green share the same planar frame:
    # a = cauchy_green - 2 * membrane
    return meas.cauchy_green - 2.0 * meas.membrane_strain


def energy_drill_free_full(state, params, form="psi_dev"):
    """Drill-free density composed through the invariant measures."""
    return energy_reduced(strain_measures(state), params, form=form)


def make_energy(kind, params_or_coeff, form="psi_dev"):
    """Callable W(state) for the invariance audits."""
    if kind == "general":
        coeff = params_or_coeff
        return lambda state: energy_general(state, coeff)
    if kind == "reduced":
        params = params_or_coeff
        return lambda state: energy_reduced(strain_measures(state), params,
                                            form=form)
    if kind == "drill_free_full":
        params = params_or_coeff
        return lambda state: energy_drill_free_full(state, params, form=form)
    raise ValueError(f"unknown energy kind {kind!r}")


# ---------------------------------------------------------------------------
# quadratic-form diagnostics

def _component_basis(Q0):
    """Orthonormal basis tensors d0_i (x) d0_alpha of the 12-dim state space."""
    d = [Q0[:, i] for i in range(3)]
    basis = []
    for i in range(3):
        for al in range(2):
            basis.append(np.outer(d[i], d[al]))
    return basis


def quadratic_form_matrix(coeff, frame0=None, Q0=None):
    """12x12 symmetric matrix of 2W over orthonormal strain/bending components.

    Coordinates are the six strain components followed by the six bending
    components in the basis d0_i (x) d0_alpha. Assembled by polarization of the
    density, so it stays faithful to the evaluation path used everywhere else.
    """
    if frame0 is None:
        a = np.eye(3)
        a[2, 2] = 0.0
        n = np.array([0.0, 0.0, 1.0])
        Q0 = np.eye(3)
    else:
        a, n = frame0.a, frame0.normal
        if Q0 is None:
            raise ValueError("quadratic_form_matrix needs Q0 with a frame")
    basis = _component_basis(Q0)

    def two_w(E, K):
        tE, tE2, fE, sE = _quadratic_terms(E, a, n)
        tK, tK2, fK, sK = _quadratic_terms(K, a, n)
        a1, a2, a3, a4 = coeff.alpha
        b1, b2, b3, b4 = coeff.beta
        return (a1 * tE ** 2 + a2 * tE2 + a3 * fE + a4 * sE
                + b1 * tK ** 2 + b2 * tK2 + b3 * fK + b4 * sK)

    def unit(k):
        E = np.zeros((3, 3))
        K = np.zeros((3, 3))
        if k < 6:
            E = basis[k]
        else:
            K = basis[k - 6]
        return E, K

    H = np.empty((12, 12))
    diag = []
    for k in range(12):
        E, K = unit(k)
        diag.append(two_w(E, K))
        H[k, k] = diag[k]
    for j in range(12):
        Ej, Kj = unit(j)
        for k in range(j + 1, 12):
            Ek, Kk = unit(k)
            w = two_w(Ej + Ek, Kj + Kk)
            H[j, k] = H[k, j] = 0.5 * (w - diag[j] - diag[k])
    return H


def quadratic_form_spectrum(coeff, frame0=None, Q0=None):
    """Eigenvalues of the 12x12 quadratic form, ascending."""
    H = quadratic_form_matrix(coeff, frame0, Q0)
    return np.linalg.eigvalsh(H)


def spectrum_closed_form(coeff):
    """Independent eigenvalue oracle from the in-plane mode decomposition."""
    m = coeff.coercivity_margins()
    vals = ([m["strain_trace"]] + [m["strain_dev"]] * 2 + [m["strain_spin"]]
            + [m["strain_shear"]] * 2
            + [m["bending_trace"]] + [m["bending_dev"]] * 2
            + [m["bending_spin"]] + [m["bending_drill"]] * 2)
    return np.sort(np.array(vals))


def null_mode_vectors():
    """The four analytic null modes of the drill-free form, as 12-vectors.

    Order matches quadratic_form_matrix: strain components (i, alpha) row-major
    first, then bending components. Modes: in-plane strain spin, the two
    normal bending rows, in-plane bending trace.
    """
    s2 = 1.0 / np.sqrt(2.0)
    modes = np.zeros((4, 12))
    modes[0, 1] = s2       # E_12
    modes[0, 2] = -s2      # E_21
    modes[1, 6 + 4] = 1.0  # K_31
    modes[2, 6 + 5] = 1.0  # K_32
    modes[3, 6 + 0] = s2   # K_11
    modes[3, 6 + 3] = s2   # K_22
    return modes


# ---------------------------------------------------------------------------
# stress resultants

def stress_gradients(state, coeff):
    """Analytic derivatives of the quadratic density wrt (Ee, Ke).

    Returned in the ambient representation paired with right-tangential
    variations (the mixed-basis representation with covariant right leg).
    """
    a = state.frame0.a
    n = state.frame0.normal
    nn = np.outer(n, n)

    def grad(T, c1, c2, c3, c4):
        Tpar = a @ T
        return (c1 * np.trace(Tpar) * a + c2 * (a @ T.T @ a)
                + c3 * Tpar + c4 * nn @ T) @ a

    dWdE = grad(state.Ee, *coeff.alpha)
    dWdK = grad(state.Ke, *coeff.beta)
    return dWdE, dWdK


def stress_gradients_fd(state, W, step=None):
    """Central-difference derivatives of an arbitrary density W(state).

    Components are perturbed in the mixed basis; the result is assembled with
    the covariant right leg so it pairs correctly with strain variations.
    """
    from dataclasses import replace
    scale = 1.0 + float(np.linalg.norm(state.Ee_comp)
                        + np.linalg.norm(state.Ke_comp))
    h = (1e-6 * scale) if step is None else step
    Q0 = state.Q0
    a_cov = state.frame0.a_cov

    def density(Ec, Kc):
        st = replace(state, Ee=state.assemble(Ec), Ke=state.assemble(Kc),
                     Ee_comp=Ec, Ke_comp=Kc)
        st = replace(st, K=st.Ke + st.K0)
        return float(W(st))

    gE = np.zeros((3, 2))
    gK = np.zeros((3, 2))
    for i in range(3):
        for al in range(2):
            dE = np.zeros((3, 2))
            dE[i, al] = h
            gE[i, al] = (density(state.Ee_comp + dE, state.Ke_comp)
                         - density(state.Ee_comp - dE, state.Ke_comp)) / (2 * h)
            gK[i, al] = (density(state.Ee_comp, state.Ke_comp + dE)
                         - density(state.Ee_comp, state.Ke_comp - dE)) / (2 * h)
    dWdE = np.einsum("ia,xi,ya->xy", gE, Q0, a_cov)
    dWdK = np.einsum("ia,xi,ya->xy", gK, Q0, a_cov)
    return dWdE, dWdK


@dataclass(frozen=True)
class StressResultants:
    N: np.ndarray
    M: np.ndarray


def stress_resultants(state, model):
    """Work-conjugate stress and couple resultants N, M.

    model is either EnergyCoefficients (analytic differentiation) or a callable
    density (central differences with a state-scaled step).
    """
    if isinstance(model, EnergyCoefficients):
        dWdE, dWdK = stress_gradients(state, model)
    else:
        dWdE, dWdK = stress_gradients_fd(state, model)
    return StressResultants(N=state.Qe @ dWdE, M=state.Qe @ dWdK)
