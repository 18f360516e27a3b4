import numpy as np
import pytest

from shellkit import geometry, kinematics, sampling
from shellkit.fields import ScalarField, Term, VectorField
from shellkit.kinematics import (DeformedConfig, PositionMap, ReferenceFrame,
                                 RotatedFrame, RotationVectorFrame)
from shellkit.tensors import rotation_exp


def test_elastic_rotation_identity(chart, rng):
    ref = ReferenceFrame(chart)
    x = chart.interior_point(rng)
    Qe = kinematics.elastic_rotation(ref, ref, x)
    assert np.allclose(Qe, np.eye(3), atol=1e-12)


def test_elastic_rotation_constant_superposed(chart, rng):
    ref = ReferenceFrame(chart)
    Q = rotation_exp(rng.normal(size=3))
    x = chart.interior_point(rng)
    Qe = kinematics.elastic_rotation(ref, RotatedFrame(ref, Q), x)
    assert np.allclose(Qe, Q, atol=1e-12)


def test_elastic_rotation_maps_directors(chart, rng):
    ref = ReferenceFrame(chart)
    frame = RotationVectorFrame(ref, VectorField.constant(rng.normal(size=3)))
    x = chart.interior_point(rng)
    Qe = kinematics.elastic_rotation(ref, frame, x)
    Q0 = ref.rotation(x)
    R = frame.rotation(x)
    for i in range(3):
        assert np.allclose(Qe @ Q0[:, i], R[:, i], atol=1e-12)


def test_strain_reference_is_zero(chart, rng):
    cfg = kinematics.reference_config(chart)
    x = chart.interior_point(rng)
    Ee = kinematics.strain_tensor(cfg, ReferenceFrame(chart), chart, x)
    assert np.allclose(Ee, 0, atol=1e-9)


def test_strain_rigid_motion_is_zero(chart, rng):
    Q = rotation_exp(rng.normal(size=3))
    t = rng.normal(size=3)
    ref = ReferenceFrame(chart)
    cfg = DeformedConfig(PositionMap(chart, linear=Q, shift=t),
                         RotatedFrame(ref, Q))
    x = chart.interior_point(rng)
    Ee = kinematics.strain_tensor(cfg, ref, chart, x)
    assert np.allclose(Ee, 0, atol=1e-12)
    Ke, K, K0 = kinematics.bending_curvature(cfg, ref, chart, x)
    assert np.allclose(Ke, 0, atol=1e-12)


def test_uniform_stretch_on_plate(plate):
    lam = 1.37
    ref = ReferenceFrame(plate)
    cfg = DeformedConfig(PositionMap(plate, linear=lam * np.eye(3)), ref)
    x = np.array([0.3, 0.8])
    fr = geometry.frame_at(plate, x)
    Ee = kinematics.strain_tensor(cfg, ref, plate, x, frame=fr)
    assert np.allclose(Ee, (lam - 1) * fr.a, atol=1e-12)


def test_component_vs_ambient(chart, rng):
    cfg = sampling.random_config(chart, rng)
    x = chart.interior_point(rng)
    st = kinematics.strain_state(cfg, chart, x)
    assert np.allclose(st.assemble(st.Ee_comp), st.Ee, atol=1e-12)
    assert np.allclose(st.assemble(st.Ke_comp), st.Ke, atol=1e-12)
    assert np.allclose(st.components(st.Ee), st.Ee_comp, atol=1e-12)
    # component formula: E_ia = d_a y . d_i - a_al . d0_i
    fr = st.frame0
    F = st.F
    for i in range(3):
        for al in range(2):
            direct = (F @ fr.a_cov[:, al]) @ st.R[:, i] \
                - fr.a_cov[:, al] @ st.Q0[:, i]
            assert direct == pytest.approx(st.Ee_comp[i, al], abs=1e-11)


def test_bending_reference_state(chart, rng):
    cfg = kinematics.reference_config(chart)
    x = chart.interior_point(rng)
    Ke, K, K0 = kinematics.bending_curvature(cfg, ReferenceFrame(chart),
                                             chart, x)
    assert np.allclose(Ke, 0, atol=1e-12)
    assert np.allclose(K, K0, atol=1e-12)


def test_bending_three_forms_agree(chart, rng):
    cfg = sampling.random_config(chart, rng, amplitude=0.1)
    ref = ReferenceFrame(chart)
    for _ in range(5):
        x = chart.interior_point(rng)
        results = [kinematics.bending_curvature(cfg, ref, chart, x, method=m)[0]
                   for m in ("components", "axl", "split")]
        assert np.allclose(results[0], results[1], atol=1e-10)
        assert np.allclose(results[0], results[2], atol=1e-10)


def test_plate_drill_curvature_by_hand(plate):
    # directors rotate about e3 with angle x1: the only bending entry is the
    # in-plane spin gradient, giving K = e3 (x) a^1
    ref = ReferenceFrame(plate)
    theta = ScalarField((Term(1.0, (1, 0)),))
    frame = RotationVectorFrame(ref, VectorField((
        ScalarField.zero(), ScalarField.zero(), theta)))
    cfg = DeformedConfig(PositionMap(plate), frame)
    x = np.array([0.4, 0.6])
    Ke, K, K0 = kinematics.bending_curvature(cfg, ref, plate, x)
    expected = np.outer([0, 0, 1.0], [1.0, 0, 0])
    assert np.allclose(Ke, expected, atol=1e-9)
    assert np.allclose(K, expected, atol=1e-9)
    assert np.allclose(K0, 0, atol=1e-12)


def test_left_invariance_under_rigid_rotation(chart, rng):
    cfg = sampling.random_config(chart, rng, amplitude=0.1)
    x = chart.interior_point(rng)
    st = kinematics.strain_state(cfg, chart, x)
    Q = rotation_exp(rng.normal(size=3))
    t = rng.normal(size=3)
    rotated = DeformedConfig(
        PositionMap(chart, displacement=cfg.position.displacement,
                    linear=Q, shift=t),
        RotatedFrame(cfg.frame, Q))
    st2 = kinematics.strain_state(rotated, chart, x)
    assert np.allclose(st.Ee, st2.Ee, atol=1e-12)
    assert np.allclose(st.Ke, st2.Ke, atol=1e-12)


def test_right_kernel_annihilates_normal(chart, rng):
    cfg = sampling.random_config(chart, rng, amplitude=0.1)
    x = chart.interior_point(rng)
    st = kinematics.strain_state(cfg, chart, x)
    n = st.frame0.normal
    assert np.allclose(st.Ee @ n, 0, atol=1e-12)
    assert np.allclose(st.Ke @ n, 0, atol=1e-12)


def test_synthetic_state_consistency(chart, rng):
    st = sampling.random_component_state(chart, rng)
    fr = st.frame0
    assert np.allclose(st.Qe.T @ st.F - fr.a, st.Ee, atol=1e-12)
    assert np.allclose(st.K, st.Ke + st.K0, atol=1e-12)
    assert np.allclose(st.components(st.Ee), st.Ee_comp, atol=1e-12)
