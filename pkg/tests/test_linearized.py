import numpy as np
import pytest

from shellkit import geometry, linearized, sampling
from shellkit.fields import ScalarField, Term, VectorField
from shellkit.kinematics import (DeformedConfig, PositionMap, ReferenceFrame,
                                 RotatedFrame)
from shellkit.linearized import LinearState
from shellkit.measures import measures_from_config
from shellkit.tensors import rotation_exp, sym


def random_linear_state(rng, amplitude=1.0):
    from shellkit.fields import random_vector_field
    return LinearState(u=random_vector_field(rng, amplitude),
                       psi=random_vector_field(rng, amplitude))


def test_zero_fields(chart, rng):
    lin = LinearState(u=VectorField.zero(), psi=VectorField.zero())
    x = chart.interior_point(rng)
    Ee, Ke = linearized.linear_strains(lin, chart, x)
    assert np.allclose(Ee, 0, atol=1e-12) and np.allclose(Ke, 0, atol=1e-12)
    for m in linearized.linear_measures(lin, chart, x):
        assert np.allclose(m, 0, atol=1e-12)


def test_translation_gives_no_strain(chart, rng):
    lin = LinearState(u=VectorField.constant([0.3, -0.2, 0.5]),
                      psi=VectorField.zero())
    Ee, Ke = linearized.linear_strains(lin, chart, chart.interior_point(rng))
    assert np.allclose(Ee, 0, atol=1e-10)
    assert np.allclose(Ke, 0, atol=1e-12)


def test_plate_drill_gradient_bending(plate):
    # psi = x1 e3 gives the single normal bending entry e3 (x) a^1
    lin = LinearState(u=VectorField.zero(),
                      psi=VectorField((ScalarField.zero(), ScalarField.zero(),
                                       ScalarField((Term(1.0, (1, 0)),)))))
    x = np.array([0.4, 0.7])
    _, Ke = linearized.linear_strains(lin, plate, x)
    assert np.allclose(Ke, np.outer([0, 0, 1.0], [1.0, 0, 0]), atol=1e-12)


def test_inplane_shear_measures(plate):
    # u = x2 e1: membrane strain is the symmetrized shear gradient
    lin = LinearState(u=VectorField((ScalarField((Term(1.0, (0, 1)),)),
                                     ScalarField.zero(), ScalarField.zero())),
                      psi=VectorField.zero())
    x = np.array([0.3, 0.3])
    mem, shear, bend = linearized.linear_measures(lin, plate, x)
    G = np.outer([1.0, 0, 0], [0, 1.0, 0])
    assert np.allclose(mem, sym(G), atol=1e-12)
    assert np.allclose(shear, 0, atol=1e-12)
    assert np.allclose(bend, 0, atol=1e-12)


def test_drilling_component_invisible(chart, rng):
    # adding any field along the normal to psi leaves the measures unchanged
    lin = random_linear_state(rng)
    x = chart.interior_point(rng)
    base = linearized.linear_measures(lin, chart, x)

    phi = ScalarField(tuple(Term(rng.normal(), (p, q))
                            for p in range(2) for q in range(2)))

    class DrillPerturbedPsi:
        def value(self, xx):
            fr = geometry.frame_at(chart, xx)
            return lin.psi.value(xx) + phi.value(xx) * fr.normal

        def grad(self, xx):
            h = chart.field_step
            g = np.empty((3, 2))
            for al in range(2):
                e = np.zeros(2)
                e[al] = h
                g[:, al] = (self.value(xx + e) - self.value(xx - e)) / (2 * h)
            return g

    pert = LinearState(u=lin.u, psi=DrillPerturbedPsi())
    out = linearized.linear_measures(pert, chart, x)
    for m0, m1 in zip(base, out):
        assert np.allclose(m0, m1, atol=1e-14)


def test_drill_only_rotation_on_plate(plate):
    # psi along the normal produces no linearized measures at all
    lin = LinearState(
        u=VectorField.zero(),
        psi=VectorField((ScalarField.zero(), ScalarField.zero(),
                         ScalarField((Term(0.7, (1, 1)), Term(-0.3, (2, 0)))))))
    x = np.array([0.6, 0.4])
    for m in linearized.linear_measures(lin, plate, x):
        assert np.allclose(m, 0, atol=1e-12)


def test_flat_plate_bending_reduces(plate, rng):
    # with zero curvature the bending measure is the rotated tangential
    # rotation gradient alone
    lin = random_linear_state(rng)
    x = plate.interior_point(rng)
    fr = geometry.frame_at(plate, x)
    _, _, bend = linearized.linear_measures(lin, plate, x)

    def apsi(xx):
        return geometry.frame_at(plate, xx).a @ lin.psi.value(xx)

    G = geometry.surface_gradient(apsi, plate, x, frame=fr)
    assert np.allclose(bend, fr.c @ G, atol=1e-12)


def test_linearization_second_order(chart, rng):
    lin = random_linear_state(rng, amplitude=0.7)
    x = chart.interior_point(rng)
    defects, ratios = linearized.linearization_order_check(
        lin, chart, x, epsilons=(1e-2, 5e-3, 2.5e-3))
    assert defects[0] > 0
    for r in ratios:
        assert 3.5 < r < 4.5


def test_exact_rigid_family_has_no_defect(chart, rng):
    # an exactly rigid one-parameter family keeps both the nonlinear and the
    # linearized measures at zero for every family parameter
    omega = rng.normal(size=3)
    shift = rng.normal(size=3)
    x = chart.interior_point(rng)
    ref = ReferenceFrame(chart)
    for eps in (0.3, 0.05, 1e-3):
        Q = rotation_exp(eps * omega)
        cfg = DeformedConfig(PositionMap(chart, linear=Q, shift=eps * shift),
                             RotatedFrame(ref, Q))
        meas = measures_from_config(cfg, chart, x)
        assert np.abs(meas.membrane_strain).max() < 1e-12
        assert np.abs(np.asarray(meas.shear_strain)).max() < 1e-10
        assert np.abs(meas.bending_strain).max() < 1e-8

    class RigidPsi:
        def value(self, xx):
            return omega

        def grad(self, xx):
            return np.zeros((3, 2))

    def rigid_u_value(xx):
        return np.cross(omega, geometry.frame_at(chart, xx).position) + shift

    class RigidU:
        def value(self, xx):
            return rigid_u_value(xx)

    lin = LinearState(u=RigidU(), psi=RigidPsi())
    for m in linearized.linear_measures(lin, chart, x):
        assert np.abs(np.asarray(m)).max() < 1e-9


def test_bending_variants_linearized_relation(chart, rng):
    # the plain bending measure equals the alternator times the rotated one at
    # the linear level; oracle via extrapolated differentiation of the family
    lin = random_linear_state(rng, amplitude=0.5)
    x = chart.interior_point(rng)
    fr = geometry.frame_at(chart, x)
    _, _, bend_lin = linearized.linear_measures(lin, chart, x)
    mem_d, shear_d, bend_d, bend_alt_d = \
        linearized.linearized_nonlinear_measures(lin, chart, x, eps=1e-3)
    assert np.allclose(bend_lin, fr.c @ bend_alt_d, atol=1e-10)
    # and the direct linearizations agree with the family derivatives
    mem_l, shear_l, _ = linearized.linear_measures(lin, chart, x)
    assert np.allclose(mem_l, mem_d, atol=1e-9)
    assert np.allclose(shear_l, shear_d, atol=1e-9)
    assert np.allclose(bend_lin, bend_d, atol=1e-9)
