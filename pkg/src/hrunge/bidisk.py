"""Approximation on a product K1 x K2 of the bidisk by induction on the variables.

Step 1 applies the one-variable operator in z1 to f(., y) for every y on a
z2 lattice; the values are treated as one long coordinate vector, which the
operator handles coordinate-wise. Step 2 applies the one-variable operator
in z2 to the resulting function of z2, whose coordinates are indexed by the
z1 evaluation points.

Everything is computed in quotient form q = Q2 Q1 f with h = b1(z1) b2(z2) q.
Because the z2 operator is linear and b1(z1) is a constant for it,
Q2[b1 q1] = b1 Q2[q1]; this avoids dividing by inf_K |b1|, which is far
below the smallest double for realistic plans.
"""

from dataclasses import dataclass, field

import numpy as np

from .blaschke import FiniteBlaschke
from .errors import NumericalFault
from .geometry import as_complex
from .runge import (EResult, LResult, PlanConfig, VectorFunction, default_probe_circles,
                    plan, plan_base, plan_E)


@dataclass
class BidiskScenario:
    K1: object
    K2: object
    U1: object
    U2: object
    f: object            # f(z1, z2) with broadcasting; returns (...) or (..., m)
    eps: float
    m: int = 1
    config: PlanConfig = field(default_factory=PlanConfig)
    eval_density: float = 1 / 32

    def values(self, z1, z2):
        """f on the product z1 x z2; shape (n1, n2, m)."""
        z1 = np.atleast_1d(as_complex(z1)).ravel()
        z2 = np.atleast_1d(as_complex(z2)).ravel()
        v = np.asarray(self.f(z1[:, None], z2[None, :]), dtype=complex)
        return v.reshape(len(z1), len(z2), self.m)

    def depends_on_z2(self, samples=7):
        z1 = self.K1.sample(self.eval_density)[::max(1, len(self.K1.sample(self.eval_density)) // samples)]
        z2 = self.U2.sample(self.eval_density)
        z2 = z2[np.linspace(0, len(z2) - 1, samples).astype(int)]
        v = self.values(z1, z2)
        return not np.array_equal(v, np.broadcast_to(v[:, :1], v.shape))


def _eval_points(K, density):
    return np.concatenate([K.sample(density), K.boundary_samples(density / 4)])


class BidiskResult:
    """q(z1, z2) = Q2[Q1 f] on product point sets, plus the two denominators."""

    def __init__(self, scenario, op1, op2, kind, degenerate):
        self.s = scenario
        self.op1, self.op2 = op1, op2
        self.kind = kind
        self.degenerate = degenerate
        if kind == "L":
            self.b1 = op1.B
            self.b2 = FiniteBlaschke([]) if degenerate else op2.B
        else:
            self.b1 = self.b2 = None

    def _result(self, op, fn):
        return LResult(op, fn) if self.kind == "L" else EResult(op, fn)

    def _apply(self, res, z, holomorphic):
        if self.kind == "L":
            return res.holomorphic_part(z) if holomorphic else res.q(z)
        return res(z, singular=not holomorphic)

    def step1(self, Z1, y, holomorphic=False):
        """Q1 applied to f(., y) for each y; shape (len(y), n1 * m)."""
        m = self.s.m
        y = np.atleast_1d(y)
        fn = VectorFunction(lambda z1: self.s.values(z1, y).reshape(len(z1), -1), len(y) * m)
        v = self._apply(self._result(self.op1, fn), Z1, holomorphic)
        return v.reshape(len(Z1), len(y), m).transpose(1, 0, 2).reshape(len(y), -1)

    def q(self, Z1, Z2, holomorphic=False):
        """Quotient h / (b1 b2) on Z1 x Z2; shape (n1, n2, m)."""
        Z1 = np.atleast_1d(as_complex(Z1)).ravel()
        Z2 = np.atleast_1d(as_complex(Z2)).ravel()
        m = self.s.m
        if self.degenerate:
            v = self.step1(Z1, Z2[:1], holomorphic).reshape(len(Z1), m)
            return np.broadcast_to(v[:, None, :], (len(Z1), len(Z2), m)).copy()
        G = VectorFunction(lambda y: self.step1(Z1, y, holomorphic), len(Z1) * m)
        v = self._apply(self._result(self.op2, G), Z2, holomorphic)
        return v.reshape(len(Z2), len(Z1), m).transpose(1, 0, 2)

    def b(self, Z1, Z2):
        """The denominator b1(z1) b2(z2) on Z1 x Z2; shape (n1, n2)."""
        if self.kind != "L":
            return np.ones((len(Z1), len(Z2)), complex)
        return self.b1.evaluate(as_complex(Z1))[:, None] * self.b2.evaluate(as_complex(Z2))[None, :]

    def h(self, Z1, Z2):
        """b1(z1) b2(z2) q(z1, z2) (underflows to 0 wherever |b1 b2| does)."""
        v = self.q(Z1, Z2)
        if self.kind != "L":
            return v
        return self.b1.evaluate(Z1)[:, None, None] * self.b2.evaluate(Z2)[None, :, None] * v

    def sup_error(self, Z1=None, Z2=None):
        s = self.s
        Z1 = _eval_points(s.K1, s.eval_density) if Z1 is None else Z1
        Z2 = _eval_points(s.K2, s.eval_density) if Z2 is None else Z2
        err = np.abs(s.values(Z1, Z2) - self.q(Z1, Z2)).max(axis=2)
        i, j = np.unravel_index(int(np.argmax(err)), err.shape)
        return float(err[i, j]), (complex(Z1[i]), complex(Z2[j]))

    def log_inf_b(self):
        """log of the sampled inf over K1 x K2 of |b1(z1) b2(z2)|."""
        if self.kind != "L":
            return 0.0
        s = self.s
        l1 = float(self.b1.log_abs(_eval_points(s.K1, s.eval_density)).min())
        l2 = float(self.b2.log_abs(_eval_points(s.K2, s.eval_density)).min()) if len(self.b2) else 0.0
        return l1 + l2

    def step2_correction_sup(self):
        """sup over K1 x K2 of |Q2[q1] - q1|, the size of the z2 correction."""
        s = self.s
        Z1 = _eval_points(s.K1, s.eval_density)[::4]
        Z2 = _eval_points(s.K2, s.eval_density)[::4]
        q1 = self.step1(Z1, Z2).reshape(len(Z2), len(Z1), s.m).transpose(1, 0, 2)
        return float(np.max(np.abs(self.q(Z1, Z2) - q1)))

    def holomorphy_residual(self, nodes=256, probes=3):
        """Iterated Cauchy reproduction on products of probe circles."""
        s = self.s
        c1 = default_probe_circles(self.op1.pair, s.K1, s.config.pitch, s.eval_density)
        c2 = default_probe_circles(self.op2.pair, s.K2, s.config.pitch, s.eval_density)
        theta = 2 * np.pi * np.arange(nodes) / nodes
        out = []
        for a, b in zip(c1, c2):
            u1, u2 = a.radius * np.exp(1j * theta), b.radius * np.exp(1j * theta)
            w1, w2 = a.center + u1, b.center + u2
            p1 = a.points[np.linspace(0, len(a.points) - 1, probes).astype(int)]
            p2 = b.points[np.linspace(0, len(b.points) - 1, probes).astype(int)]
            Z1 = np.concatenate([w1, p1])
            Z2 = np.concatenate([w2, p2])
            v = self.q(Z1, Z2, holomorphic=True)
            k1 = (u1[None, :] / (w1[None, :] - p1[:, None])) / nodes
            k2 = (u2[None, :] / (w2[None, :] - p2[:, None])) / nodes
            ci = np.einsum("ak,bl,klm->abm", k1, k2, v[:nodes, :nodes])
            out.append(float(np.max(np.abs(ci - v[nodes:, nodes:]))))
        if not out:
            raise NumericalFault("no probe circles fit around the collars")
        return out


def _same_geometry(s):
    return s.K1 == s.K2 and s.U1 == s.U2


def approximate_bidisk(s, base1=None, base2=None):
    """Two-step induction with the Blaschke-based operator in each variable.

    Both one-variable plans use tolerance eps / 2. Returns a `BidiskResult`
    whose `b1`, `b2` are the denominators; b2 is the empty product when f
    does not depend on z2.
    """
    base1 = base1 or plan_base(s.K1, s.U1, s.config)
    if base2 is None:
        base2 = base1 if _same_geometry(s) else plan_base(s.K2, s.U2, s.config)
    p1 = plan(s.K1, s.U1, s.eps / 2, s.config, base=base1)
    p2 = plan(s.K2, s.U2, s.eps / 2, s.config, base=base2)
    return BidiskResult(s, p1, p2, "L", not s.depends_on_z2())


def approximate_bidisk_entire(s, hull1, hull2):
    """Two-step induction with the hull-function operator in each variable (no denominators)."""
    e1 = plan_E(s.K1, s.U1, hull1, s.eps / 2, s.config)
    e2 = plan_E(s.K2, s.U2, hull2, s.eps / 2, s.config)
    return BidiskResult(s, e1, e2, "E", not s.depends_on_z2())
