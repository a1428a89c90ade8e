"""Cauchy transform solver for the weighted d-bar equation.

For a density f on a compact support inside the disk, the field

    F(z) = (1/pi) * integral of phi(w) / (z - w) dA(w),   phi = f / (1 - |w|^2)

satisfies dF/dz-bar = phi in the weak sense. The integral is discretized by
the midpoint rule on square cells of side `pitch` centred on the global grid
``pitch * (i + 1j k)``. The cell containing the evaluation point is
integrated exactly against the cell-constant density.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import CoarseGridError
from .geometry import as_complex

MIN_CELLS = 50


@dataclass(frozen=True)
class QuadratureGrid:
    """Midpoint cells of side `pitch` whose centres lie in `support`."""

    pitch: float
    nodes: np.ndarray
    support: object

    @property
    def weight(self):
        return self.pitch * self.pitch

    def __len__(self):
        return len(self.nodes)

    def index(self):
        """Integer lattice coordinates of the nodes."""
        return (np.rint(self.nodes.real / self.pitch).astype(np.int64),
                np.rint(self.nodes.imag / self.pitch).astype(np.int64))


def make_grid(support, pitch, allow_small=False):
    nodes = support.sample(pitch)
    if not allow_small and len(nodes) < MIN_CELLS:
        raise CoarseGridError(f"only {len(nodes)} cells cover the support (need {MIN_CELLS})",
                              witness=len(nodes))
    return QuadratureGrid(float(pitch), nodes, support)


@dataclass(frozen=True)
class WeightedDensity:
    """A density f on `support`; `values(w)` returns shape (n,) or (n, m)."""

    support: object
    values: object

    def phi(self, nodes):
        v = np.asarray(self.values(nodes), dtype=complex)
        w = 1.0 - np.abs(nodes) ** 2
        return v / (w[:, None] if v.ndim == 2 else w)


def _p(x, y):
    # antiderivative in x and y of x / (x^2 + y^2), continuous at the origin
    r2 = x * x + y * y
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(r2 > 0, np.log(np.where(r2 > 0, r2, 1.0)), 0.0)
        at = np.where(x != 0, x * np.arctan(y / np.where(x != 0, x, 1.0)), 0.0)
    return 0.5 * y * lg - y + at


def rect_inverse_integral(x1, x2, y1, y2):
    """Exact integral of 1 / (x + iy) over [x1, x2] x [y1, y2]."""
    def corner(x, y):
        return _p(x, y) - 1j * _p(y, x)
    return corner(x2, y2) - corner(x1, y2) - corner(x2, y1) + corner(x1, y1)


def cell_integral(z, centers, pitch):
    """Exact integral of 1 / (z - w) over the square cells about `centers`."""
    u = centers - z
    hh = 0.5 * pitch
    # the substitution v = w - z turns 1/(z - w) into -1/v
    return -rect_inverse_integral(u.real - hh, u.real + hh, u.imag - hh, u.imag + hh)


def cauchy_matrix(z, grid, singular=True):
    """Matrix K with F(z) = K @ phi(nodes) for the discretized transform.

    With ``singular=False`` every cell is a point mass, which makes F a
    rational function with simple poles at the nodes.
    """
    z = np.atleast_1d(as_complex(z)).ravel()
    w = grid.nodes
    d = z[:, None] - w[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = (grid.weight / np.pi) / d
    if singular:
        hh = 0.5 * grid.pitch
        hit = (np.abs(d.real) <= hh) & (np.abs(d.imag) <= hh)
        if hit.any():
            r, c = np.nonzero(hit)
            K[r, c] = cell_integral(z[r], w[c], grid.pitch) / np.pi
    else:
        K[~np.isfinite(K)] = 0.0
    return K


class SolvedField:
    """Evaluable solution F of dF/dz-bar = phi, linear in phi."""

    def __init__(self, grid, phi):
        self.grid = grid
        phi = np.asarray(phi, dtype=complex)
        self.scalar = phi.ndim == 1
        self.phi = phi[:, None] if self.scalar else phi

    def __call__(self, z, singular=True, block=2048):
        z = as_complex(z)
        flat = np.atleast_1d(z).ravel()
        out = np.empty((flat.size, self.phi.shape[1]), dtype=complex)
        for s in range(0, flat.size, block):
            out[s:s + block] = cauchy_matrix(flat[s:s + block], self.grid, singular) @ self.phi
        out = out.reshape(z.shape + (self.phi.shape[1],))
        return out[..., 0] if self.scalar else out

    def on_lattice(self, points):
        """F at grid-aligned points via FFT convolution.

        A point that is a node sits at the centre of its own cell, whose
        exact integral vanishes by symmetry, so the kernel is zero there.
        """
        h = self.grid.pitch
        pi_, pk = np.rint(points.real / h).astype(np.int64), np.rint(points.imag / h).astype(np.int64)
        ni, nk = self.grid.index()
        i0, k0 = min(pi_.min(), ni.min()), min(pk.min(), nk.min())
        nx = max(pi_.max(), ni.max()) - i0 + 1
        ny = max(pk.max(), nk.max()) - k0 + 1
        di = np.arange(-(nx - 1), nx)[:, None]
        dk = np.arange(-(ny - 1), ny)[None, :]
        off = (di + 1j * dk) * h
        with np.errstate(divide="ignore", invalid="ignore"):
            ker = np.where(off != 0, (self.grid.weight / np.pi) / off, 0)
        out = np.empty((len(points), self.phi.shape[1]), dtype=complex)
        for m in range(self.phi.shape[1]):
            A = np.zeros((nx, ny), dtype=complex)
            A[ni - i0, nk - k0] = self.phi[:, m]
            F = fftconvolve(A, ker, mode="same")
            out[:, m] = F[pi_ - i0, pk - k0]
        return out[:, 0] if self.scalar else out


def solve(density, grid):
    """Discretized Cauchy transform of density / (1 - |w|^2)."""
    return SolvedField(grid, density.phi(grid.nodes))


@dataclass(frozen=True)
class Bump:
    """Test function s(w) = exp(-1 / (1 - t)), t = |w - center|^2 / radius^2, for t < 1."""

    center: complex
    radius: float

    def value(self, w):
        t = np.abs(w - self.center) ** 2 / self.radius ** 2
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1 - t, 1)), 0.0)

    def dbar(self, w):
        t = np.abs(w - self.center) ** 2 / self.radius ** 2
        inside = t < 1
        one = np.where(inside, 1 - t, 1)
        # d/dt exp(-1/(1-t)) = -exp(-1/(1-t)) / (1-t)^2, and dt/dw-bar = (w - c) / R^2
        ds = np.where(inside, -np.exp(-1.0 / one) / one ** 2, 0.0)
        return ds * (w - self.center) / self.radius ** 2

    def lattice(self, pitch):
        r = self.radius
        c = self.center
        i = np.arange(np.ceil((c.real - r) / pitch), np.floor((c.real + r) / pitch) + 1)
        k = np.arange(np.ceil((c.imag - r) / pitch), np.floor((c.imag + r) / pitch) + 1)
        ii, kk = np.meshgrid(i, k, indexing="ij")
        p = (ii * pitch + 1j * kk * pitch).ravel()
        return p[np.abs(p - c) < r]


def weak_residual(F, density, bump, grid):
    """|int F dbar(s) dA + int phi s dA| by the midpoint rule on `grid`'s lattice."""
    pts = bump.lattice(grid.pitch)
    if isinstance(F, SolvedField) and F.grid.pitch == grid.pitch:
        Fv = F.on_lattice(pts)
    else:
        Fv = F(pts)
    ds = bump.dbar(pts)
    phi = density.phi(grid.nodes)
    s = bump.value(grid.nodes)
    if np.ndim(Fv) == 2:
        lhs = grid.weight * (ds @ Fv)
        rhs = grid.weight * (s @ phi)
        return float(np.max(np.abs(lhs + rhs)))
    return float(abs(grid.weight * (np.sum(Fv * ds) + np.sum(phi * s))))


def kernel_norm_lattice(grid):
    """sup over the grid lattice of (1/pi) sum_c pitch^2 / ((1 - |w_c|^2) |z - w_c|).

    This is the largest value of |F(z)| over all densities with |f| <= 1,
    taken over lattice points z covering the support's bounding box.
    """
    if len(grid) == 0:
        return 0.0
    xmin, xmax, ymin, ymax = grid.support.bbox()
    h = grid.pitch
    ni, nk = grid.index()
    i0, i1 = int(np.floor(xmin / h)), int(np.ceil(xmax / h))
    k0, k1 = int(np.floor(ymin / h)), int(np.ceil(ymax / h))
    i0, i1 = min(i0, ni.min()), max(i1, ni.max())
    k0, k1 = min(k0, nk.min()), max(k1, nk.max())
    nx, ny = i1 - i0 + 1, k1 - k0 + 1
    A = np.zeros((nx, ny))
    A[ni - i0, nk - k0] = grid.weight / (np.pi * (1 - np.abs(grid.nodes) ** 2))
    di = np.arange(-(nx - 1), nx)[:, None]
    dk = np.arange(-(ny - 1), ny)[None, :]
    r = np.hypot(di, dk) * h
    with np.errstate(divide="ignore"):
        ker = np.where(r > 0, 1.0 / np.where(r > 0, r, 1), 0.0)
    return float(np.max(fftconvolve(A, ker, mode="same")))


def measured_norm(support, grid, probes=16, seed=0):
    """Measured size M of the solver on densities with sup-norm 1.

    Reports the larger of the exact lattice kernel norm and the largest
    sup-norm reached by `probes` random unimodular densities.
    """
    if probes < 10:
        raise ValueError("measured_norm needs at least 10 probes")
    if len(grid) == 0:
        return 0.0
    best = kernel_norm_lattice(grid)
    rng = np.random.default_rng(seed)
    phases = np.exp(2j * np.pi * rng.random((len(grid), probes)))
    phi = phases / (1 - np.abs(grid.nodes) ** 2)[:, None]
    F = SolvedField(grid, phi)
    vals = F.on_lattice(grid.nodes)
    return max(best, float(np.max(np.abs(vals))))
