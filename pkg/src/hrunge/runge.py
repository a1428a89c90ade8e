"""Runge-type approximating operators on a sub-domain of the disk.

Two constructions are provided.

`plan` / `apply_L` build the operator

    h = B * (rho_V f - sum_j S_j / B_j),   S_j = solve(B_j chi_j g f),

where B_j is the Blaschke product of the point systems placed around the
j-th well-separated part of an e-chain of the collar, and B is the product
of all B_j. The quotient q = h / B approximates f on K with an error that
decays geometrically in the number N of points per system.

`plan_E` / `apply_E` build the Blaschke-free variant

    E = rho_V f - sum_i f_i^n solve(chi_i g f / f_i^n)

from user-supplied hull functions f_i with max_i |f_i| <= 1 on K and > 1 on
the collar.

All densities are discretized on one `QuadratureGrid` over the collar. The
operators are therefore explicit matrices acting on the values of f at the
grid nodes, which makes linearity and coordinate-wise action exact up to
floating point reassociation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .blaschke import (C_SPLIT, FiniteBlaschke, carleson_delta,
                       log_carleson_delta, log_equal_spacing_product, perturbed_delta_bound,
                       split_until)
from .cutoff import build_cutoff, frak_d
from .dbar import cauchy_matrix, make_grid, measured_norm
from .errors import ChainCoarsenessError, DomainError, HullError, InvariantViolation, PerturbationBoundError
from .geometry import PseudoDisk, _rho, as_complex, mobius_image
from .regions import Disk, PointSet, PseudoDiskRegion, Union, build_chain, region_distance

# Norm bound of the reference d-bar solver. Recorded in reports, never asserted.
A_REFERENCE = 25e6 / 3

SEPARATION_FLOOR = 0.99


@dataclass
class PlanConfig:
    """Numerical knobs of a construction."""

    margin: float = 0.13
    pitch: float = 1 / 128
    chain_density: float = None
    density: float = 1e-2
    phase: float = 0.0
    probes: int = 16
    seed: int = 0
    sup_density: float = 1 / 32

    def __post_init__(self):
        # without an explicit chain density, pick the coarsest pitch / 2^j that passes
        self.auto_chain = self.chain_density is None
        if self.auto_chain:
            self.chain_density = self.pitch / 2


class VectorFunction:
    """A holomorphic map into C^m evaluated coordinate-wise.

    `fn(z)` returns shape (n,) for m = 1 or (n, m).
    """

    def __init__(self, fn, m=1, name="f"):
        self.fn, self.m, self.name = fn, m, name

    def __call__(self, z):
        v = np.asarray(self.fn(np.asarray(z, dtype=complex)), dtype=complex)
        return v.reshape(-1, self.m) if self.m > 1 or v.ndim == 2 else v.reshape(-1, 1)

    def compose(self, T):
        """The function z -> T f(z) for a (p, m) matrix T."""
        T = np.asarray(T, dtype=complex)
        return VectorFunction(lambda z: self(z) @ T.T, T.shape[0], f"T{self.name}")


def as_vector_function(f):
    return f if isinstance(f, VectorFunction) else VectorFunction(f)


def n_eps(eps):
    """floor(log2(1 / eps)) + 1."""
    if not 0 < eps < 1:
        raise DomainError("epsilon must be in (0, 1)")
    return int(math.floor(math.log2(1 / eps))) + 1


def _segment_sum(M, starts):
    """Sums of consecutive column blocks of M beginning at `starts` (empty blocks give 0)."""
    n = M.shape[1]
    ends = np.append(starts[1:], n)
    pad = np.concatenate([M, np.zeros_like(M[:, :1])], axis=1)
    out = np.add.reduceat(pad, np.minimum(starts, n), axis=1)[:, :len(starts)]
    out[:, ends == starts] = 0
    return out


# ---------------------------------------------------------------------------
# L operator


@dataclass
class PlanBase:
    """The epsilon-independent part of a plan: cutoff, chain, split, grid."""

    K: object
    U: object
    config: PlanConfig
    pair: object
    frak_d: float
    frak_e: float
    chain: object
    parts: list
    log_delta_chain: float
    grid: object
    cell_part: np.ndarray
    part_starts: np.ndarray
    psi: np.ndarray
    M: float
    g_sup: float
    c: float = C_SPLIT

    @property
    def k(self):
        return len(self.parts)

    @property
    def lam(self):
        return self.frak_e / 4


def _first_part(z, parts, radius):
    """Index of the first part with a point within rho < radius of z, else -1."""
    z = np.atleast_1d(z)
    out = np.full(z.shape, -1)
    pts = np.concatenate(parts)
    lab = np.concatenate([np.full(len(p), i) for i, p in enumerate(parts)])
    for s in range(0, len(z), 1024):
        d = _rho(z[s:s + 1024, None], pts[None, :]) < radius
        cand = np.where(d, lab[None, :], len(parts))
        best = cand.min(axis=1)
        out[s:s + 1024] = np.where(best < len(parts), best, -1)
    return out


def _chain(host, e, config):
    """e-chain of the collar; an automatic chain density halves pitch / 2 until fine enough."""
    if not config.auto_chain:
        return build_chain(host, e, config.chain_density)
    density = config.pitch / 2
    for _ in range(6):
        try:
            return build_chain(host, e, density)
        except ChainCoarsenessError:
            density /= 2
    return build_chain(host, e, density)


def plan_base(K, U, config=None):
    config = config or PlanConfig()
    pair = build_cutoff(K, U, config.margin)
    d, e = frak_d(pair, K, config.density)
    if e / 4 > 1 / 16:
        raise InvariantViolation(f"e / 4 = {e / 4} exceeds 1/16")
    chain = _chain(pair.collar, e, config)
    parts = [p.zeros for p in split_until(chain.points, C_SPLIT)]
    lam = e / 4
    for p in parts:
        dp = carleson_delta(p)
        if not 2 * lam / (1 + lam * lam) < dp:
            raise PerturbationBoundError(f"part separation {dp} too small for radius {lam}")
        if perturbed_delta_bound(dp, lam) < SEPARATION_FLOOR:
            raise PerturbationBoundError(
                f"perturbed separation bound {perturbed_delta_bound(dp, lam)} < {SEPARATION_FLOOR}")
    grid = make_grid(pair.collar, config.pitch)
    part = _first_part(grid.nodes, parts, e)
    if np.any(part < 0):
        bad = grid.nodes[part < 0][0]
        raise InvariantViolation("the e-neighbourhoods of the parts miss a collar cell", witness=bad)
    order = np.lexsort((np.arange(len(part)), part))
    nodes = grid.nodes[order]
    grid = type(grid)(grid.pitch, nodes, grid.support)
    part = part[order]
    starts = np.searchsorted(part, np.arange(len(parts)))
    psi = pair.dbar_rho(nodes)
    M = measured_norm(pair.collar, grid, config.probes, config.seed)
    return PlanBase(K, U, config, pair, d, e, chain, parts, log_carleson_delta(chain.points),
                    grid, part, starts, psi, M, pair.g_sup(config.pitch))


@dataclass
class RungePlan:
    base: PlanBase
    eps: float
    N: int
    systems: list          # per part: array (N, n_i) of zeros; row j is one point system
    zeros: np.ndarray      # all zeros of B, grouped by part
    zero_part: np.ndarray
    C: float
    d: float
    checks: dict = field(default_factory=dict)

    def __getattr__(self, name):
        if name == "base":
            raise AttributeError(name)
        return getattr(self.base, name)

    @property
    def B(self):
        return FiniteBlaschke(self.zeros)

    def part_blaschke(self, i):
        return FiniteBlaschke(self.systems[i].ravel())

    def system_blaschke(self, i, j):
        return FiniteBlaschke(self.systems[i][j])

    def part_log_values(self, z):
        """(log|B_j(z)|, B_j(z)/|B_j(z)|) for every part j; shapes (nz, k)."""
        z = np.atleast_1d(as_complex(z)).ravel()
        k = len(self.systems)
        la = np.zeros((len(z), k))
        ph = np.ones((len(z), k), complex)
        starts = np.searchsorted(self.zero_part, np.arange(k))
        mu = FiniteBlaschke(self.zeros).normalization
        for s in range(0, len(z), 512):
            zz = z[s:s + 512, None]
            f = mu[None, :] * (zz - self.zeros[None, :]) / (1 - np.conj(self.zeros)[None, :] * zz)
            a = np.abs(f)
            with np.errstate(divide="ignore"):
                la[s:s + 512] = np.add.reduceat(np.log(a), starts, axis=1)
            u = np.where(a > 0, f / np.where(a > 0, a, 1), 1)
            ph[s:s + 512] = np.multiply.reduceat(u, starts, axis=1)
        return la, ph


def plan(K, U, eps, config=None, base=None):
    """Build and validate the full construction for tolerance `eps`.

    Raises `MarginError`, `SplitOverflowError`, `PerturbationBoundError` or
    `ChainCoarsenessError` when the corresponding step fails.
    """
    base = base or plan_base(K, U, config)
    N = n_eps(eps)
    lam = base.lam
    phases = base.config.phase + 2 * np.pi * np.arange(N) / N
    systems = [mobius_image(p[None, :], lam * np.exp(1j * phases)[:, None]) for p in base.parts]
    zeros = np.concatenate([s.ravel() for s in systems])
    zero_part = np.concatenate([np.full(s.size, i) for i, s in enumerate(systems)])
    C = base.k * base.M * base.g_sup
    d = math.log2(4 / (5 * base.frak_e))
    p = RungePlan(base, eps, N, systems, zeros, zero_part, C, d)
    p.checks = _validate(p)
    return p


def _validate(p):
    checks = {"e_over_4": p.frak_e / 4, "e_over_4_ok": p.frak_e / 4 <= 1 / 16}
    worst = 1.0
    for s in p.systems:
        if s.shape[1] > 1:
            worst = min(worst, min(carleson_delta(row) for row in s))
    if worst < SEPARATION_FLOOR:
        raise PerturbationBoundError(f"a point system has separation {worst} < {SEPARATION_FLOOR}")
    checks["min_system_delta"] = worst
    dK = region_distance(PointSet(p.zeros), p.K, p.config.density).value
    if not dK > 0:
        raise InvariantViolation("zeros of B meet K")
    checks["rho_zeros_K"] = dK
    # d = log2(4 / (5 e)) gives e / 4 = 2^-d / 5 exactly
    checks["radius"] = p.lam
    checks["radius_from_d"] = 2.0 ** (-p.d) / 5
    if not math.isclose(checks["radius"], checks["radius_from_d"], rel_tol=1e-12):
        raise InvariantViolation("system radius disagrees with 2^-d / 5")
    return checks


@dataclass
class FactorMargins:
    sup_margin: float      # 5e/4 - max over (i, j) of sup over W_i of |B_ij|
    inf_margin: float      # min over (i, j) of inf over K of |B_ij| - 5e/2
    sup_witness: complex
    inf_witness: complex
    density: float

    @property
    def ok(self):
        return self.sup_margin > 0 and self.inf_margin > 0


def check_factor_margins(p, density=None, circle_samples=64):
    """Sampled sup over W_i and inf over K of every point-system product |B_ij|.

    W_i is sampled on the grid and on the boundary circles of its pseudo-disks
    (where the sup of a product without zeros there would sit); K on the grid
    plus its boundary at a four times finer pitch.
    """
    density = density or p.config.density
    e = p.frak_e
    Ks = np.concatenate([p.K.sample(density), p.K.boundary_samples(density / 4)])
    theta = np.exp(2j * np.pi * np.arange(circle_samples) / circle_samples)
    worst_sup, sup_w = -np.inf, None
    worst_inf, inf_w = np.inf, None
    for i, (part, sys) in enumerate(zip(p.parts, p.systems)):
        W = Union([PseudoDiskRegion(PseudoDisk(z, e), closed=False) for z in part])
        ws = np.concatenate([W.sample(density),
                             mobius_image(part[:, None], (e * (1 - 1e-12)) * theta[None, :]).ravel()])
        for j in range(sys.shape[0]):
            zs = sys[j]
            la_w = np.sum(np.log(_rho(ws[:, None], zs[None, :])), axis=1)
            k = int(np.argmax(la_w))
            if la_w[k] > worst_sup:
                worst_sup, sup_w = la_w[k], ws[k]
            la_k = np.sum(np.log(_rho(Ks[:, None], zs[None, :])), axis=1)
            k = int(np.argmin(la_k))
            if la_k[k] < worst_inf:
                worst_inf, inf_w = la_k[k], Ks[k]
    return FactorMargins(5 * e / 4 - math.exp(worst_sup), math.exp(worst_inf) - 5 * e / 2,
                         complex(sup_w), complex(inf_w), density)


class LResult:
    """Output of `apply_L`: evaluable h, its quotient q = h / B and diagnostics."""

    def __init__(self, plan, f):
        self.plan = plan
        self.f = as_vector_function(f)
        g = plan.grid
        self.F = self.f(g.nodes)                       # (nc, m)
        la, ph = plan.part_log_values(g.nodes)
        cp = plan.cell_part
        idx = np.arange(len(cp))
        # coefficient of each cell: B_{j(c)}(w_c) * dbar rho_V(w_c)
        self.coef = np.exp(la[idx, cp]) * ph[idx, cp] * plan.psi

    def _rho_f(self, z):
        r = self.plan.pair.rho_V(z)
        out = np.zeros((len(z), self.f.m), complex)
        on = r > 0
        if on.any():
            out[on] = r[on, None] * self.f(z[on])
        return out

    def solve_terms(self, z, singular=True):
        """S_j(z) for every part j; shape (nz, k, m)."""
        z = np.atleast_1d(as_complex(z)).ravel()
        K = cauchy_matrix(z, self.plan.grid, singular) * self.coef[None, :]
        T = K[:, :, None] * self.F[None, :, :]
        return _segment_sum(T, self.plan.part_starts)

    def q(self, z, singular=True, block=1024):
        """rho_V f - sum_j S_j / B_j, i.e. h / B off the zeros of B."""
        z = np.atleast_1d(as_complex(z)).ravel()
        out = np.empty((len(z), self.f.m), complex)
        cp = self.plan.cell_part
        for s in range(0, len(z), block):
            zz = z[s:s + block]
            la, ph = self.plan.part_log_values(zz)
            inv = np.exp(-la[:, cp]) / ph[:, cp]
            A = cauchy_matrix(zz, self.plan.grid, singular) * (self.coef[None, :] * inv)
            out[s:s + block] = self._rho_f(zz) - A @ self.F
        return out

    def h(self, z, block=1024):
        """B rho_V f - sum_j (prod_{i != j} B_i) S_j, with no division by B_j."""
        z = np.atleast_1d(as_complex(z)).ravel()
        out = np.empty((len(z), self.f.m), complex)
        for s in range(0, len(z), block):
            zz = z[s:s + block]
            la, ph = self.plan.part_log_values(zz)
            ninf = np.isneginf(la).sum(axis=1)
            fin = np.where(np.isneginf(la), 0.0, la).sum(axis=1)
            tot_ph = np.prod(ph, axis=1)
            logB = np.where(ninf == 0, fin, -np.inf)
            others = np.where(ninf[:, None] == 0, fin[:, None] - la,
                              np.where((ninf[:, None] == 1) & np.isneginf(la), fin[:, None], -np.inf))
            P = np.exp(others) * (tot_ph[:, None] / ph)
            S = self.solve_terms(zz)
            out[s:s + block] = (np.exp(logB) * tot_ph)[:, None] * self._rho_f(zz) \
                - np.einsum("zj,zjm->zm", P, S)
        return out

    def log_abs_B(self, z):
        la, _ = self.plan.part_log_values(z)
        return la.sum(axis=1)

    def residues(self):
        """Residues R_a at the zeros a of B of the point-mass quotient's poles."""
        p = self.plan
        g = p.grid
        out = np.zeros((len(p.zeros), self.f.m), complex)
        k = 0
        ends = np.append(p.part_starts[1:], len(p.cell_part))
        for j, sys in enumerate(p.systems):
            a = sys.ravel()
            B = FiniteBlaschke(a)
            cells = slice(p.part_starts[j], ends[j])
            Kp = (g.weight / np.pi) / (a[:, None] - g.nodes[None, cells])
            S = (Kp * self.coef[None, cells]) @ self.F[cells]
            dB = np.array([B.derivative_at_zero(n) for n in range(len(a))])
            out[k:k + len(a)] = S / dB[:, None]
            k += len(a)
        return out

    def holomorphic_part(self, z):
        """Point-mass q with the principal parts at the zeros of B removed."""
        z = np.atleast_1d(as_complex(z)).ravel()
        if not hasattr(self, "_res"):
            self._res = self.residues()
        corr = (1.0 / (z[:, None] - self.plan.zeros[None, :])) @ self._res
        return self.q(z, singular=False) + corr


def apply_L(p, f):
    """Apply the operator to f. Returns (result, B) with result.h and result.q evaluable."""
    r = LResult(p, f)
    return r, p.B


def error_sample_points(K, density):
    return np.concatenate([K.sample(density), K.boundary_samples(density / 4)])


def sup_error_L(res, density=None):
    p = res.plan
    zs = error_sample_points(p.K, density or p.config.density)
    err = np.max(np.abs(res.f(zs) - res.q(zs)), axis=1)
    k = int(np.argmax(err))
    return float(err[k]), complex(zs[k])


def error_budget_L(res, density=None):
    """sum_j sup |S_j| / min_j inf_K |B_j| over a lattice containing K and the nodes.

    The sampled error on K can never exceed this number (triangle inequality
    on the computed pieces).
    """
    p = res.plan
    zs = error_sample_points(p.K, density or p.config.density)
    lat = np.concatenate([zs, p.grid.nodes])
    sups = np.zeros(p.k)
    for s in range(0, len(lat), 256):
        S = res.solve_terms(lat[s:s + 256])
        sups = np.maximum(sups, np.max(np.abs(S), axis=(0, 2)))
    la, _ = p.part_log_values(zs)
    inf_B = math.exp(float(la.min()))
    return float(np.sum(sups) / inf_B), sups


@dataclass
class ProbeCircle:
    center: complex
    radius: float
    points: np.ndarray


def holomorphy_residual(h, circles, nodes=256):
    """max over circles and probe points of |h(z) - Cauchy integral of h over the circle|.

    Uses the trapezoid rule with `nodes` points; returns a list with one
    value per circle.
    """
    out = []
    theta = 2 * np.pi * np.arange(nodes) / nodes
    for c in circles:
        u = c.radius * np.exp(1j * theta)
        w = c.center + u
        hw = np.asarray(h(w))
        hw = hw.reshape(len(w), -1)
        z = np.atleast_1d(as_complex(c.points))
        # (1/2 pi i) int h(w)/(w - z) dw with dw = i u dtheta
        kern = (u[None, :] / (w[None, :] - z[:, None])) / nodes
        cauchy = kern @ hw
        hz = np.asarray(h(z)).reshape(len(z), -1)
        out.append(float(np.max(np.abs(hz - cauchy))))
    return out


def default_probe_circles(pair, K, pitch, density, clearance=6):
    """An outer circle around the collar and an inner one inside it, both centred on K.

    Each circle keeps `clearance` pitches away from the collar; probe points
    are a few samples of K inside the inner circle.
    """
    xmin, xmax, ymin, ymax = K.bbox()
    c0 = complex(0.5 * (xmin + xmax), 0.5 * (ymin + ymax))
    col = pair.collar.sample(pitch)
    rr = np.abs(col - c0)
    outer = float(rr.max()) + clearance * pitch
    inner = float(rr.min()) - clearance * pitch
    ks = K.sample(density)
    circles = []
    if inner > 0:
        pts = ks[np.abs(ks - c0) < 0.9 * inner]
        pts = pts[np.linspace(0, len(pts) - 1, min(8, len(pts))).astype(int)] if len(pts) else pts
        if len(pts):
            circles.append(ProbeCircle(c0, inner, pts))
    if abs(c0) + outer < 0.99:
        pts = ks[np.linspace(0, len(ks) - 1, min(8, len(ks))).astype(int)]
        circles.append(ProbeCircle(c0, outer, pts))
    return circles


def harmonic_exponents(R, t):
    """(a_{R,t}, b_{R,t}) of the harmonic comparison of log-distances."""
    if not (0 < R < 1 and 0 < t < 1):
        raise DomainError("harmonic exponents need R, t in (0, 1)")
    L = math.log(1 / R)
    a = math.log((1 - t * R * R) / ((1 - t) * R)) / L
    b = math.log((1 + t * R * R) / ((1 + t) * R)) / L
    return a, b


def verify_harmonic_comparison(z, w, R, t, samples=1000, seed=0, rtol=1e-12):
    """Check rho(y,z)^a <= rho(y,w) <= rho(y,z)^b on random y outside D(z, R).

    Returns (ok, witness). Equality is attained on the circle rho(y, z) = R,
    hence the relative tolerance.
    """
    if _rho(np.complex128(z), np.complex128(w)) > t * R * (1 + 1e-15):
        raise DomainError("verify_harmonic_comparison needs rho(z, w) <= t R")
    a, b = harmonic_exponents(R, t)
    rng = np.random.default_rng(seed)
    s = R + (1 - 1e-9 - R) * rng.random(samples)
    s[:8] = R
    y = mobius_image(z, s * np.exp(2j * np.pi * rng.random(samples)))
    y = y[np.abs(y) < 1 - 1e-12]
    ryz = _rho(y, z)
    ryw = _rho(y, w)
    lo = np.exp(a * np.log(ryz))
    hi = np.exp(b * np.log(ryz))
    bad = (lo > ryw * (1 + rtol)) | (ryw > hi * (1 + rtol))
    if bad.any():
        return False, complex(y[np.argmax(bad)])
    return True, None


@dataclass
class DeltaBracket:
    measured: float
    lower: float
    upper: float
    log_measured: float
    log_lower: float
    log_upper: float

    @property
    def ok(self):
        tol = 1e-9 * max(1.0, abs(self.log_measured))
        return self.log_lower <= self.log_measured + tol and self.log_measured <= self.log_upper + tol


def delta_bracket(p):
    """Measured separation of all zeros of B against its two-sided exponent bracket."""
    e = p.frak_e
    a1, b1 = harmonic_exponents(3 * e / 4, 1 / 3)
    a2, b2 = harmonic_exponents(e, 1 / 4)
    a, b = a1 * a2, b1 * b2
    ld = p.log_delta_chain
    spacing = log_equal_spacing_product(p.N, e / 4)
    lm = log_carleson_delta(p.zeros)
    ll = a * p.N * ld + spacing
    lu = b * p.N * ld + spacing
    return DeltaBracket(math.exp(lm), math.exp(ll), math.exp(lu), lm, ll, lu)


# ---------------------------------------------------------------------------
# E operator


class HullFunction:
    """A bounded holomorphic function used to separate K from the collar."""

    def __init__(self, fn, name="f_i", sup=None):
        self.fn, self.name, self.sup = fn, name, sup

    def __call__(self, z):
        return np.asarray(self.fn(np.asarray(z, dtype=complex)), dtype=complex)


@dataclass
class EPlan:
    K: object
    U: object
    config: PlanConfig
    pair: object
    hullfns: list
    eps: float
    r: float
    R: float
    n: int
    chain: object
    grid: object
    cell_hull: np.ndarray
    psi: np.ndarray
    M: float
    g_sup: float
    C0: float
    d1: float
    sup_lattice: np.ndarray

    @property
    def k(self):
        return len(self.hullfns)


def sup_lattice(density, radius=0.98):
    """Grid points of |z| <= radius used for sup-norms over the disk."""
    return Disk(0, radius).sample(density)


def plan_E(K, U, hullfns, eps, config=None):
    """Set up the Blaschke-free operator from hull functions f_1..f_k.

    Measures r = inf over the collar of max_i |f_i| and rejects the hulls
    with `HullError` unless r > 1 and max_i |f_i| <= 1 on K.
    """
    config = config or PlanConfig()
    if not 0 < eps < 1:
        raise DomainError("epsilon must be in (0, 1)")
    hullfns = [h if isinstance(h, HullFunction) else HullFunction(h) for h in hullfns]
    if not hullfns:
        raise HullError("at least one hull function is required")
    pair = build_cutoff(K, U, config.margin)
    col = pair.collar.sample(config.pitch)
    vals = np.abs(np.stack([h(col) for h in hullfns]))
    r = float(vals.max(axis=0).min())
    if not r > 1:
        raise HullError(f"hull functions do not separate: inf over the collar of max |f_i| is {r}",
                        witness=r)
    Ks = error_sample_points(K, config.density)
    onK = float(np.abs(np.stack([h(Ks) for h in hullfns])).max())
    if onK > 1 + 1e-12:
        raise HullError(f"hull functions exceed 1 on K (max {onK})", witness=onK)
    lat = sup_lattice(config.sup_density)
    R = max(float(np.max(np.abs(h(lat)))) for h in hullfns)
    n = int(math.floor(math.log(1 / eps) / math.log(r))) + 1
    chain = _chain(pair.collar, 0.5, config)
    grid = make_grid(pair.collar, config.pitch)
    # U_i = {|f_i| >= r} within the 1/2-neighbourhood of the chain; first hit wins
    inO = _first_part(grid.nodes, [chain.points], 0.5) >= 0
    hv = np.abs(np.stack([h(grid.nodes) for h in hullfns]))
    cover = (hv >= r) & inO[None, :]
    if not cover.any(axis=0).all():
        raise HullError("the sets U_i do not cover the collar")
    cell_hull = np.argmax(cover, axis=0)
    psi = pair.dbar_rho(grid.nodes)
    M = measured_norm(pair.collar, grid, config.probes, config.seed)
    g_sup = pair.g_sup(config.pitch)
    C0 = len(hullfns) * M * g_sup
    d1 = math.log(R / r) / math.log(r)
    return EPlan(K, U, config, pair, hullfns, eps, r, R, n, chain, grid, cell_hull, psi, M,
                 g_sup, C0, d1, lat)


class EResult:
    def __init__(self, ep, f):
        self.plan = ep
        self.f = as_vector_function(f)
        g = ep.grid
        self.F = self.f(g.nodes)
        fw = np.stack([h(g.nodes) for h in ep.hullfns])        # (k, nc)
        own = fw[ep.cell_hull, np.arange(len(g))]
        self.coef = ep.psi / own ** ep.n

    def _rho_f(self, z):
        r = self.plan.pair.rho_V(z)
        out = np.zeros((len(z), self.f.m), complex)
        on = r > 0
        if on.any():
            out[on] = r[on, None] * self.f(z[on])
        return out

    def __call__(self, z, singular=True, block=1024):
        z = np.atleast_1d(as_complex(z)).ravel()
        out = np.empty((len(z), self.f.m), complex)
        ep = self.plan
        for s in range(0, len(z), block):
            zz = z[s:s + block]
            fz = np.stack([h(zz) for h in ep.hullfns], axis=1) ** ep.n   # (nz, k)
            A = cauchy_matrix(zz, ep.grid, singular) * self.coef[None, :] * fz[:, ep.cell_hull]
            out[s:s + block] = self._rho_f(zz) - A @ self.F
        return out

    def correction_terms(self, z):
        """sup-norm per hull index of f_i^n * solve(chi_i g f / f_i^n) at z; shape (nz, k, m)."""
        ep = self.plan
        z = np.atleast_1d(as_complex(z)).ravel()
        fz = np.stack([h(z) for h in ep.hullfns], axis=1) ** ep.n
        A = cauchy_matrix(z, ep.grid) * self.coef[None, :]
        out = np.zeros((len(z), ep.k, self.f.m), complex)
        for i in range(ep.k):
            sel = ep.cell_hull == i
            out[:, i] = fz[:, i, None] * (A[:, sel] @ self.F[sel])
        return out


def apply_E(ep, f):
    return EResult(ep, f)


def sup_error_E(res, density=None):
    ep = res.plan
    zs = error_sample_points(ep.K, density or ep.config.density)
    err = np.max(np.abs(res.f(zs) - res(zs)), axis=1)
    k = int(np.argmax(err))
    return float(err[k]), complex(zs[k])


def sup_norm_E(res):
    return float(np.max(np.abs(res(res.plan.sup_lattice))))


# ---------------------------------------------------------------------------


def verify_universality(result_factory, f, T, points):
    """max |T apply(f) - apply(T f)| over `points`.

    `result_factory(f)` returns an evaluable (points -> (n, m)) output for
    the vector function f, e.g. ``lambda f: apply_L(plan, f)[0].q``.
    """
    f = as_vector_function(f)
    T = np.asarray(T, dtype=complex)
    lhs = result_factory(f)(points) @ T.T
    rhs = result_factory(f.compose(T))(points)
    return float(np.max(np.abs(lhs - rhs)))
