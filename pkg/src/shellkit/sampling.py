"""Seeded random configurations, states and drill fields for the audits."""

import numpy as np

from .drilling import DrillField
from .fields import (ScalarField, Term, random_scalar_field,
                     random_vector_field)
from .geometry import catalog_chart
from .kinematics import (DeformedConfig, PositionMap, ReferenceFrame,
                         RotationVectorFrame, strain_state, synthetic_state)

AUDIT_CHARTS = ("plate", "cylinder", "sphere")


def audit_chart(kind, mode="analytic"):
    if kind == "plate":
        return catalog_chart("plate", mode=mode)
    if kind == "cylinder":
        return catalog_chart("cylinder", mode=mode, radius=1.4)
    if kind == "sphere":
        return catalog_chart("sphere", mode=mode, radius=1.2)
    if kind == "graph":
        bump = ScalarField((Term(0.2, (2, 0)), Term(-0.15, (0, 2)),
                            Term(0.1, (1, 1))))
        return catalog_chart("graph", mode=mode, height=bump)
    raise ValueError(f"unknown audit chart {kind!r}")


def random_config(chart, rng, amplitude=0.05):
    """Smooth random deformed configuration around the reference one."""
    u = random_vector_field(rng, amplitude=amplitude)
    v = random_vector_field(rng, amplitude=amplitude)
    ref = ReferenceFrame(chart)
    return DeformedConfig(PositionMap(chart, displacement=u),
                          RotationVectorFrame(ref, v))


def random_state(chart, rng, amplitude=0.05, x=None):
    x = chart.interior_point(rng) if x is None else x
    return strain_state(random_config(chart, rng, amplitude), chart, x)


def random_component_state(chart, rng, amplitude=0.1, x=None, rotate=True):
    """State with algebraically prescribed random components."""
    from .tensors import rotation_exp
    x = chart.interior_point(rng) if x is None else x
    Ee = rng.normal(size=(3, 2)) * amplitude
    Ke = rng.normal(size=(3, 2)) * amplitude
    Qe = rotation_exp(rng.normal(size=3) * 0.4) if rotate else None
    return synthetic_state(chart, x, Ee, Ke, Qe=Qe)


def random_drill(rng, amplitude=0.5, nonconstant=True):
    theta = random_scalar_field(rng, amplitude=amplitude)
    if not nonconstant:
        theta = ScalarField.constant(rng.normal() * amplitude)
    return DrillField(theta)


def random_drill_strong(rng, at=None):
    """Nonconstant drill whose slope never vanishes.

    When an evaluation point is given, the constant term is chosen so the
    angle there is bounded away from zero; a drill that happens to vanish at
    the sample point transforms nothing and would dilute sensitivity checks.
    """
    sign = lambda: 1.0 if rng.integers(2) else -1.0
    slope = (Term(sign() * rng.uniform(0.3, 0.8), (1, 0)),
             Term(sign() * rng.uniform(0.3, 0.8), (0, 1)))
    extra = random_scalar_field(rng, amplitude=0.1)
    partial = ScalarField(slope + extra.terms)
    target = sign() * rng.uniform(0.5, 1.0)
    const = Term(target - partial.value(at) if at is not None
                 else sign() * rng.uniform(0.2, 0.6), (0, 0))
    return DrillField(ScalarField((const,) + partial.terms))
