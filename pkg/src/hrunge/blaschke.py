"""Finite Blaschke products, Carleson characteristics and point systems.

Large products are evaluated in the log domain: products over thousands of
zeros routinely underflow double precision on sets far from the zeros, so
most quantities here also come in a ``log_`` flavour.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalFault, SplitOverflowError
from .geometry import _rho, as_complex, check_in_disk, mobius_image

# Above this many factors the modulus is accumulated as a sum of logs.
LOG_DOMAIN_THRESHOLD = 64

# The separation level each split part must reach.
C_SPLIT = 0.99220590273


def mu(z):
    """Unimodular normalization -z/|z|, with mu(0) = 1."""
    z = as_complex(z)
    a = np.abs(z)
    return np.where(a > 0, -z / np.where(a > 0, a, 1), 1.0 + 0j)


class FiniteSequence:
    """A finite list of distinct points of the disk."""

    def __init__(self, zeros):
        z = np.atleast_1d(check_in_disk(as_complex(zeros), what="zero")).astype(complex)
        if z.ndim != 1:
            raise DomainError("zeros must be a flat list")
        if len(np.unique(z)) != len(z):
            raise DomainError("zeros must be pairwise distinct")
        self.zeros = z

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)


def _seq(z):
    return z if isinstance(z, FiniteSequence) else FiniteSequence(z)


@dataclass
class FiniteBlaschke:
    """B(z) = prod_n mu(z_n) (z - z_n) / (1 - conj(z_n) z), in stored zero order."""

    zeros: np.ndarray
    normalization: np.ndarray = field(init=False)

    def __post_init__(self):
        if isinstance(self.zeros, FiniteSequence):
            self.zeros = self.zeros.zeros
        elif np.size(self.zeros) == 0:
            self.zeros = np.zeros(0, complex)
        else:
            self.zeros = FiniteSequence(self.zeros).zeros
        self.normalization = mu(self.zeros)

    def __len__(self):
        return len(self.zeros)

    def _blocks(self, z, fn):
        z = as_complex(z)
        flat = z.ravel()
        a = self.zeros
        step = max(1, 4_000_000 // max(len(a), 1))
        out = [fn(flat[s:s + step, None], a[None, :], self.normalization[None, :])
               for s in range(0, flat.size, step)]
        return flat, out, z.shape

    def evaluate(self, z):
        """B at z (|z| <= 1). Factors multiplied in zero order."""
        if len(self.zeros) == 0:
            return np.ones_like(as_complex(z))
        if len(self.zeros) > LOG_DOMAIN_THRESHOLD:
            la, ph = self.log_evaluate(z)
            return np.exp(la) * ph
        flat, blocks, shape = self._blocks(
            z, lambda zz, a, m: np.prod(m * (zz - a) / (1 - np.conj(a) * zz), axis=1))
        return np.concatenate(blocks).reshape(shape) if blocks else flat.reshape(shape)

    __call__ = evaluate

    def log_evaluate(self, z):
        """(log|B(z)|, B(z)/|B(z)|). At a zero the log is -inf and the phase 1."""
        z = as_complex(z)
        if len(self.zeros) == 0:
            return np.zeros(z.shape), np.ones(z.shape, complex)

        def fn(zz, a, m):
            f = m * (zz - a) / (1 - np.conj(a) * zz)
            af = np.abs(f)
            with np.errstate(divide="ignore"):
                la = np.sum(np.log(af), axis=1)
            u = np.prod(np.where(af > 0, f / np.where(af > 0, af, 1), 1), axis=1)
            return la, u

        flat, blocks, shape = self._blocks(z, fn)
        if not blocks:
            return np.zeros(shape), np.ones(shape, complex)
        la = np.concatenate([b[0] for b in blocks]).reshape(shape)
        ph = np.concatenate([b[1] for b in blocks]).reshape(shape)
        return la, ph

    def log_abs(self, z):
        return self.log_evaluate(z)[0]

    def derivative_at_zero(self, n):
        """B'(z_n): the derivative of factor n times the other factors at z_n."""
        a = self.zeros
        zn = a[n]
        dn = self.normalization[n] * (1 - abs(zn) ** 2) / (1 - np.conj(zn) * zn) ** 2
        others = np.delete(np.arange(len(a)), n)
        rest = self.normalization[others] * (zn - a[others]) / (1 - np.conj(a[others]) * zn)
        return dn * np.prod(rest)


def evaluate(B, z):
    return B.evaluate(z)


def _log_rho_matrix(z):
    d = _rho(z[:, None], z[None, :])
    np.fill_diagonal(d, 1.0)
    return np.log(d)


def log_carleson_delta(zeta):
    """log of min_k prod_{j != k} rho(z_j, z_k); 0 for a singleton."""
    z = _seq(zeta).zeros
    if len(z) < 2:
        return 0.0
    best = 0.0
    step = max(1, 2_000_000 // len(z))
    for s in range(0, len(z), step):
        blk = z[s:s + step]
        d = _rho(blk[:, None], z[None, :])
        d[np.arange(len(blk)), np.arange(s, s + len(blk))] = 1.0
        best = min(best, float(np.min(np.sum(np.log(d), axis=1))))
    return best


def carleson_delta(zeta):
    """Carleson characteristic min_k prod_{j != k} rho(z_j, z_k)."""
    return float(np.exp(log_carleson_delta(zeta)))


def delta_via_derivative(zeta):
    """min_n (1 - |z_n|^2) |B'(z_n)| from the analytic derivative of B."""
    B = FiniteBlaschke(_seq(zeta).zeros)
    z = B.zeros
    if len(z) == 1:
        return float((1 - abs(z[0]) ** 2) * abs(B.derivative_at_zero(0)))
    return float(min((1 - abs(z[n]) ** 2) * abs(B.derivative_at_zero(n)) for n in range(len(z))))


def hoffman_params(delta, lam):
    """Sub-level parameters for a product with separation `delta`.

    Returns ``(valid, r)`` with valid iff 2 lam / (1 + lam^2) < delta and
    r = lam (delta - lam) / (1 - lam delta). When valid, each component of
    {|B| < r} holds exactly one zero z_n and lies inside D(z_n, lam).
    """
    if not 0 < delta <= 1 or not 0 < lam < 1:
        raise DomainError("hoffman_params needs delta in (0, 1] and lambda in (0, 1)")
    valid = 2 * lam / (1 + lam * lam) < delta
    r = lam * (delta - lam) / (1 - lam * delta)
    return bool(valid), float(r)


@dataclass
class SublevelReport:
    ok: bool
    min_modulus: float
    windings: list
    witness: object = None


def verify_sublevel_geometry(B, lam, r, samples=512, rtol=1e-12):
    """Check |B| >= r on each circle rho(., z_n) = lam and winding number 1.

    A single zero gives |B| = r exactly on its circle, so the comparison
    allows a relative rounding tolerance `rtol`.
    """
    theta = 2 * np.pi * np.arange(samples) / samples
    windings, worst, witness = [], np.inf, None
    for zn in B.zeros:
        circ = mobius_image(zn, lam * np.exp(1j * theta))
        v = B.evaluate(circ)
        a = np.abs(v)
        k = int(np.argmin(a))
        if a[k] < worst:
            worst = float(a[k])
            if a[k] < r * (1 - rtol):
                witness = complex(circ[k])
        steps = np.angle(np.roll(v, -1) / v)
        windings.append(int(np.rint(np.sum(steps) / (2 * np.pi))))
    ok = worst >= r * (1 - rtol) and all(w == 1 for w in windings)
    if witness is None and not ok:
        witness = next(zn for zn, w in zip(B.zeros, windings) if w != 1)
    return SublevelReport(bool(ok), worst, windings, witness)


def schwarz_pick_containment(B, r, samples=64, rings=8):
    """max |B| over samples of every D(z_n, r); must stay below r."""
    theta = 2 * np.pi * np.arange(samples) / samples
    s = r * np.arange(1, rings + 1) / (rings + 1)
    w = (s[:, None] * np.exp(1j * theta)[None, :]).ravel()
    return max(float(np.max(np.abs(B.evaluate(mobius_image(zn, w))))) for zn in B.zeros)


def perturbed_delta_bound(delta, lam):
    """Lower bound on the separation after moving each zero by rho < lam."""
    h = 2 * lam / (1 + lam * lam)
    if not h < delta:
        raise DomainError("perturbed_delta_bound needs 2 lam / (1 + lam^2) < delta")
    return (delta - h) / (1 - delta * h)


def _exhaustive_split(L):
    n = L.shape[0]
    # point 0 always sits in part +1; mask 0 (everything in one part) is skipped
    masks = np.arange(1, 2 ** (n - 1))
    bits = (masks[:, None] >> np.arange(n - 1)[None, :]) & 1
    S = np.concatenate([np.ones((len(masks), 1)), 1 - 2 * bits], axis=1)
    rows = L.sum(axis=1)
    within = 0.5 * (rows[None, :] + S * (S @ L))
    pos = np.where(S > 0, within, np.inf).min(axis=1)
    neg = np.where(S < 0, within, np.inf).min(axis=1)
    obj = np.minimum(pos, neg)
    k = int(np.argmax(obj))
    return S[k] > 0


def _local_search_split(L):
    n = L.shape[0]
    W = -L  # nonnegative weights
    side = np.zeros(n, dtype=bool)
    acc_t = np.zeros(n)  # weight to part True among already placed points
    acc_f = np.zeros(n)
    for k in range(n):
        side[k] = acc_t[k] < acc_f[k]
        if side[k]:
            acc_t += W[k]
        else:
            acc_f += W[k]
    same = np.where(side[None, :] == side[:, None], W, 0).sum(axis=1)
    total = W.sum(axis=1)
    while True:
        gain = same - (total - same)
        k = int(np.argmax(gain))
        if gain[k] <= 1e-13 * max(total[k], 1.0):
            break
        side[k] = ~side[k]
        new_k = total[k] - same[k]
        # every other point gains or loses W[k] depending on its side
        same += np.where(side == side[k], W[k], -W[k])
        same[k] = new_k
    return side


def split_sequence(zeta, slack=1e-12):
    """Split into two parts whose separations are both >= sqrt(delta(zeta)).

    Up to 16 points the best bipartition is found by exhaustive search.
    Larger inputs use a greedy assignment improved by single-point moves
    until no move raises the cross-part weight; at such a local optimum
    every point keeps at most half its log-weight inside its own part,
    which gives the square-root bound. Raises `NumericalFault` if the
    returned parts miss the bound by more than `slack` in log terms.
    """
    z = _seq(zeta).zeros
    if len(z) < 2:
        raise DomainError("split_sequence needs at least two points")
    L = _log_rho_matrix(z)
    np.fill_diagonal(L, 0.0)
    side = _exhaustive_split(L) if len(z) <= 16 else _local_search_split(L)
    a, b = z[side], z[~side]
    target = 0.5 * float(np.min(L.sum(axis=1)))
    got = min(log_carleson_delta(a), log_carleson_delta(b))
    if got < target - slack:
        raise NumericalFault(f"split parts reach log-separation {got:.6g} < {target:.6g}")
    return FiniteSequence(a), FiniteSequence(b)


def split_count_bound(delta, c=C_SPLIT):
    if delta >= 1:
        return 2
    return 2 * (int(np.floor(np.log(delta) / np.log(c))) + 1)


def split_until(zeta, c=C_SPLIT):
    """Split repeatedly until every part has separation >= c.

    Raises `SplitOverflowError` if more than 2 (floor(log_c delta) + 1) parts
    are needed.
    """
    seq = _seq(zeta)
    log_c = np.log(c)
    todo, done = [seq], []
    while todo:
        s = todo.pop(0)
        if log_carleson_delta(s) >= log_c:
            done.append(s)
        else:
            todo.extend(split_sequence(s))
    bound = split_count_bound(carleson_delta(seq), c)
    if len(done) > bound:
        raise SplitOverflowError(f"{len(done)} parts exceed the bound {bound}", witness=len(done))
    return done


def equally_spaced_system(center, radius, N, phase=0.0):
    """N points equally spaced on the pseudo-circle rho(., center) = radius."""
    if not 0 < radius < 1 or N < 1:
        raise DomainError("equally_spaced_system needs radius in (0, 1) and N >= 1")
    w = radius * np.exp(1j * (phase + 2 * np.pi * np.arange(N) / N))
    return mobius_image(center, w)


def equal_spacing_product(N, r):
    """Closed form N r^(N-1) (1 - r^2) / (1 - r^(2N))."""
    if N < 1 or not 0 < r < 1:
        raise DomainError("equal_spacing_product needs N >= 1 and r in (0, 1)")
    return N * r ** (N - 1) * (1 - r * r) / (1 - r ** (2 * N))


def log_equal_spacing_product(N, r):
    return np.log(N) + (N - 1) * np.log(r) + np.log1p(-r * r) - np.log1p(-(r ** (2 * N)))
