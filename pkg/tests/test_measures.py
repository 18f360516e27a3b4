import numpy as np
import pytest

from shellkit import geometry, kinematics, measures, sampling
from shellkit.kinematics import (DeformedConfig, PositionMap, ReferenceFrame,
                                 RotatedFrame)
from shellkit.tensors import rotation_exp, skew, skw, sym


def test_first_integrals_reference(chart, rng):
    x = chart.interior_point(rng)
    st = kinematics.strain_state(kinematics.reference_config(chart), chart, x)
    fr = st.frame0
    U1, U2, U3, U4, U5 = measures.first_integrals(st)
    assert np.allclose(U1, fr.a, atol=1e-9)
    assert np.allclose(U2, 0, atol=1e-9)
    assert np.allclose(U3, fr.a @ fr.c @ st.K0, atol=1e-12)
    assert np.allclose(U3, -fr.b, atol=1e-8)       # c K0 = -b geometrically
    assert np.allclose(U4, 0, atol=1e-9)


def test_first_integrals_rigid_motion(chart, rng):
    Q = rotation_exp(rng.normal(size=3))
    ref = ReferenceFrame(chart)
    cfg = DeformedConfig(PositionMap(chart, linear=Q, shift=rng.normal(size=3)),
                         RotatedFrame(ref, Q))
    x = chart.interior_point(rng)
    st = kinematics.strain_state(cfg, chart, x)
    st0 = kinematics.strain_state(kinematics.reference_config(chart), chart, x)
    for u, v in zip(measures.first_integrals(st),
                    measures.first_integrals(st0)):
        assert np.allclose(u, v, atol=1e-9)


def test_gradient_route_reference_values(chart, rng):
    x = chart.interior_point(rng)
    fr = geometry.frame_at(chart, x)
    cfg = kinematics.reference_config(chart)
    FtF, Ftd3, FtG, FtXG = measures.reduced_from_gradients(cfg, chart, x)
    assert np.allclose(FtF, fr.a, atol=1e-9)
    assert np.allclose(Ftd3, 0, atol=1e-9)
    assert np.allclose(FtG, -fr.b, atol=1e-8)
    assert np.allclose(FtXG, -skew(fr.normal) @ fr.b, atol=1e-8)


def test_state_and_gradient_routes_agree(chart, rng):
    # the closing identities of the invariance argument, checked numerically
    for _ in range(10):
        cfg = sampling.random_config(chart, rng, amplitude=0.08)
        x = chart.interior_point(rng)
        st = kinematics.strain_state(cfg, chart, x)
        U1, U2, U3, U4, U5 = measures.first_integrals(st)
        G1, G2, G3, G5 = measures.reduced_from_gradients(cfg, chart, x)
        assert np.allclose(U1, G1, atol=1e-10)
        assert np.allclose(U2, G2, atol=1e-10)
        assert np.allclose(U3, G3, atol=1e-10)
        assert np.allclose(U5, G5, atol=1e-10)


def test_strain_measures_reference_zero(chart, rng):
    x = chart.interior_point(rng)
    st = kinematics.strain_state(kinematics.reference_config(chart), chart, x)
    m = measures.strain_measures(st)
    assert np.allclose(m.membrane_strain, 0, atol=1e-9)
    assert np.allclose(m.shear_strain, 0, atol=1e-9)
    assert np.allclose(m.bending_strain, 0, atol=1e-8)
    assert np.allclose(m.bending_strain_alt, 0, atol=1e-8)


def test_strain_measures_uniform_stretch(plate):
    lam = 1.21
    ref = ReferenceFrame(plate)
    cfg = DeformedConfig(PositionMap(plate, linear=lam * np.eye(3)), ref)
    x = np.array([0.5, 0.25])
    st = kinematics.strain_state(cfg, plate, x)
    fr = st.frame0
    m = measures.strain_measures(st)
    assert np.allclose(m.membrane_strain, 0.5 * (lam ** 2 - 1) * fr.a,
                       atol=1e-12)
    assert np.allclose(m.shear_strain, 0, atol=1e-12)
    assert np.allclose(m.bending_strain, 0, atol=1e-12)


def test_dual_route_measures_agree(chart, rng):
    for _ in range(5):
        cfg = sampling.random_config(chart, rng, amplitude=0.08)
        x = chart.interior_point(rng)
        st = kinematics.strain_state(cfg, chart, x)
        m1 = measures.strain_measures(st)
        m2 = measures.measures_from_config(cfg, chart, x)
        assert np.allclose(m1.membrane_strain, m2.membrane_strain, atol=1e-10)
        assert np.allclose(m1.shear_strain, m2.shear_strain, atol=1e-10)
        assert np.allclose(m1.bending_strain, m2.bending_strain, atol=1e-10)
        assert np.allclose(m1.bending_strain_alt, m2.bending_strain_alt,
                           atol=1e-10)


def test_membrane_strain_vs_cauchy_green(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.1)
    m = measures.strain_measures(st)
    assert np.allclose(m.membrane_strain,
                       0.5 * (m.cauchy_green - st.frame0.a), atol=1e-12)
    assert np.allclose(m.cauchy_green, m.cauchy_green.T, atol=1e-12)


def test_planar_alternator_identity(rng):
    # tr[(c Psi)^2] = 2 ||dev2 sym Psi||^2 - tr(Psi^2) for in-plane tensors
    a = np.diag([1.0, 1.0, 0.0])
    c = np.zeros((3, 3))
    c[0, 1], c[1, 0] = 1.0, -1.0
    for _ in range(50):
        P = np.zeros((3, 3))
        P[:2, :2] = rng.normal(size=(2, 2))
        lhs = np.trace(c @ P @ c @ P)
        dev = measures.dev2_sym(P, a)
        rhs = 2 * np.sum(dev * dev) - np.trace(P @ P)
        assert lhs == pytest.approx(rhs, abs=1e-12)
        # companion identity through the transpose norm
        assert lhs == pytest.approx(np.sum(P * P) - np.trace(P) ** 2, abs=1e-12)


def test_alternator_involution(chart, rng):
    fr = geometry.frame_at(chart, chart.interior_point(rng))
    T = rng.normal(size=(3, 3))
    assert np.allclose(fr.c @ (fr.c @ T), -fr.a @ T, atol=1e-12)


def test_planar_kernels_of_measures(chart, rng):
    st = sampling.random_state(chart, rng, amplitude=0.1)
    n = st.frame0.normal
    m = measures.strain_measures(st)
    for T in (m.cauchy_green - st.frame0.a, m.membrane_strain,
              m.bending_strain, m.bending_strain_alt):
        assert np.allclose(T @ n, 0, atol=1e-10)
        assert np.allclose(n @ T, 0, atol=1e-10)
    assert abs(m.shear_strain @ n) < 1e-10
