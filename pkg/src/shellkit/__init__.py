"""Six-parameter resultant shell theory toolkit.

Kinematics and surface geometry of Cosserat-type shells, drill-invariant
reduced strain measures, isotropic strain-energy models with coercivity
diagnostics, a characteristic-flow first-integral checker, a linearized
theory, and a desk-scale variational minimizer, all behind a batch CLI.
"""

__version__ = "0.1.0"
