"""Closed-form scalar and vector fields on the parameter domain.

Fields are finite sums of terms  coef * x1^p * x2^q * trig(k1 x1 + k2 x2 + phase),
where trig is 1, sin or cos. Values, gradients and Hessians are analytic, which
keeps drill angles and displacement fields exactly differentiable.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Term:
    coef: float
    powers: tuple = (0, 0)
    trig: tuple | None = None       # ("sin"|"cos", k1, k2, phase)

    def _mono(self, x, dp=(0, 0)):
        """x1^p x2^q differentiated dp times per coordinate (value, not coef)."""
        out = 1.0
        for xi, p, d in zip(x, self.powers, dp):
            if d > p:
                return 0.0
            fac = 1.0
            for j in range(d):
                fac *= (p - j)
            out *= fac * xi ** (p - d)
        return out

    def _trig(self, x, order=0):
        if self.trig is None:
            return 1.0 if order == 0 else 0.0, np.zeros(2)
        fn, k1, k2, phase = self.trig
        arg = k1 * x[0] + k2 * x[1] + phase
        seq = (np.sin, np.cos) if fn == "sin" else (np.cos, lambda t: -np.sin(t))
        # derivative cycle: sin -> cos -> -sin -> -cos
        cyc = [np.sin(arg), np.cos(arg), -np.sin(arg), -np.cos(arg)]
        base = 0 if fn == "sin" else 1
        return cyc[(base + order) % 4], np.array([k1, k2])

    def value(self, x):
        t, _ = self._trig(x, 0)
        return self.coef * self._mono(x) * t

    def grad(self, x):
        t0, k = self._trig(x, 0)
        t1, _ = self._trig(x, 1)
        g = np.empty(2)
        for al in range(2):
            dp = [0, 0]
            dp[al] = 1
            g[al] = self._mono(x, tuple(dp)) * t0 + self._mono(x) * t1 * k[al]
        return self.coef * g

    def hess(self, x):
        t0, k = self._trig(x, 0)
        t1, _ = self._trig(x, 1)
        t2, _ = self._trig(x, 2)
        H = np.empty((2, 2))
        for al in range(2):
            for be in range(2):
                dp = [0, 0]
                dp[al] += 1
                dp[be] += 1
                dal = [0, 0]
                dal[al] = 1
                dbe = [0, 0]
                dbe[be] = 1
                H[al, be] = (self._mono(x, tuple(dp)) * t0
                             + self._mono(x, tuple(dal)) * t1 * k[be]
                             + self._mono(x, tuple(dbe)) * t1 * k[al]
                             + self._mono(x) * t2 * k[al] * k[be])
        return self.coef * H


@dataclass(frozen=True)
class ScalarField:
    terms: tuple = ()

    def value(self, x):
        return float(sum(t.value(x) for t in self.terms))

    def grad(self, x):
        g = np.zeros(2)
        for t in self.terms:
            g += t.grad(x)
        return g

    def hess(self, x):
        H = np.zeros((2, 2))
        for t in self.terms:
            H += t.hess(x)
        return H

    def __call__(self, x):
        return self.value(x)

    @staticmethod
    def constant(c):
        return ScalarField((Term(float(c)),))

    @staticmethod
    def zero():
        return ScalarField(())


@dataclass(frozen=True)
class VectorField:
    components: tuple = field(default=(ScalarField.zero(),) * 3)

    def value(self, x):
        return np.array([c.value(x) for c in self.components])

    def grad(self, x):
        """Rows: components, columns: d/dx_alpha. Shape (3, 2)."""
        return np.stack([c.grad(x) for c in self.components])

    def __call__(self, x):
        return self.value(x)

    @staticmethod
    def constant(v):
        return VectorField(tuple(ScalarField.constant(c) for c in v))

    @staticmethod
    def zero():
        return VectorField()


def random_scalar_field(rng, amplitude=1.0, trig_scale=1.0):
    """Smooth random field: low-order polynomial plus one trig term."""
    terms = []
    for p in range(3):
        for q in range(3 - p):
            terms.append(Term(amplitude * rng.normal() * 0.5, (p, q)))
    k = trig_scale * rng.uniform(0.5, 2.0, size=2)
    fn = "sin" if rng.integers(2) else "cos"
    terms.append(Term(amplitude * rng.normal() * 0.5, (0, 0),
                      (fn, k[0], k[1], rng.uniform(0, 2 * np.pi))))
    return ScalarField(tuple(terms))


def random_vector_field(rng, amplitude=1.0, trig_scale=1.0):
    return VectorField(tuple(random_scalar_field(rng, amplitude, trig_scale)
                             for _ in range(3)))
