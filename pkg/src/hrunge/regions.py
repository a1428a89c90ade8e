"""Finite geometric descriptions of subsets of the disk, and epsilon-chains.

A `Region` is built from a few primitives (Euclidean disks, annulus sectors,
pseudo-disks, finite point sets, level bands of a scalar field) combined by
union and complement. Every primitive has an exact vectorized membership
predicate; sampling restricts a global grid ``pitch * (i + 1j k)`` to the
region, so refining the pitch by halves gives nested sample sets.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ChainCoarsenessError, DomainError, EmptyRegionError
from .geometry import BOUNDARY_TOL, PseudoDisk, _rho, as_complex, check_in_disk, pseudo_pitch

# Every primitive must fit inside this disk.
MAX_MODULUS = 1.0 - 1e-6


def _grid(bbox, pitch):
    xmin, xmax, ymin, ymax = bbox
    i = np.arange(np.ceil(xmin / pitch - 1e-9), np.floor(xmax / pitch + 1e-9) + 1)
    k = np.arange(np.ceil(ymin / pitch - 1e-9), np.floor(ymax / pitch + 1e-9) + 1)
    # 'ij' indexing flattens re-major, which is the lexicographic (re, im) order
    ii, kk = np.meshgrid(i, k, indexing="ij")
    return (ii * pitch + 1j * (kk * pitch)).ravel()


def _check_fits(c, r, what):
    if abs(c) + r > MAX_MODULUS:
        raise DomainError(f"{what} is not contained in the disk of radius {MAX_MODULUS}")


class Region:
    """Base class. Subclasses implement `contains` and `bbox`."""

    closed = True

    def contains(self, z):
        raise NotImplementedError

    def bbox(self):
        raise NotImplementedError

    def sample(self, pitch):
        """Grid points of the region, in lexicographic (re, im) order."""
        if pitch <= 0:
            raise DomainError("sampling pitch must be positive")
        g = _grid(self.bbox(), pitch)
        return g[self.contains(g)]

    def boundary_samples(self, pitch):
        """Samples with at least one grid neighbour outside the region."""
        s = self.sample(pitch)
        if s.size == 0:
            return s
        nb = s[:, None] + pitch * np.array([1, 1j, -1, -1j])
        outside = ~self.contains(nb.ravel()).reshape(nb.shape)
        return s[outside.any(axis=1)]

    def __or__(self, other):
        return Union((self, other))


@dataclass(frozen=True)
class Disk(Region):
    """Euclidean disk |z - center| <= radius (or < radius if not closed)."""

    center: complex
    radius: float
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.radius <= 0:
            raise DomainError("disk radius must be positive")
        _check_fits(self.center, self.radius, "disk")

    def contains(self, z):
        d = np.abs(as_complex(z) - self.center)
        return d <= self.radius if self.closed else d < self.radius

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class AnnulusSector(Region):
    """r_in <= |z - center| <= r_out with argument in [angle_lo, angle_hi]."""

    center: complex
    r_in: float
    r_out: float
    angle_lo: float = 0.0
    angle_hi: float = 2 * np.pi
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not 0 <= self.r_in < self.r_out:
            raise DomainError("annulus sector needs 0 <= r_in < r_out")
        if self.angle_hi <= self.angle_lo:
            raise DomainError("annulus sector needs angle_lo < angle_hi")
        _check_fits(self.center, self.r_out, "annulus sector")

    def contains(self, z):
        u = as_complex(z) - self.center
        d = np.abs(u)
        if self.closed:
            ok = (d >= self.r_in) & (d <= self.r_out)
        else:
            ok = (d > self.r_in) & (d < self.r_out)
        span = self.angle_hi - self.angle_lo
        if span < 2 * np.pi:
            rel = np.mod(np.angle(u) - self.angle_lo, 2 * np.pi)
            ok &= (rel <= span) if self.closed else (rel < span) & (rel > 0)
        return ok

    def bbox(self):
        c, r = self.center, self.r_out
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class PseudoDiskRegion(Region):
    """Pseudohyperbolic disk rho(z, center) <= radius."""

    disk: PseudoDisk
    closed: bool = True

    def __post_init__(self):
        c, r = self.disk.euclidean()
        _check_fits(c, r, "pseudo-disk")

    def contains(self, z):
        z = as_complex(z)
        inside = np.abs(z) < 1 - BOUNDARY_TOL
        zz = np.where(inside, z, 0)
        d = _rho(zz, self.disk.center)
        ok = d <= self.disk.radius if self.closed else d < self.disk.radius
        return ok & inside

    def bbox(self):
        c, r = self.disk.euclidean()
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


class PointSet(Region):
    """A finite set of points; samples are the points themselves."""

    def __init__(self, points):
        self.points = check_in_disk(np.atleast_1d(as_complex(points)))
        if np.any(np.abs(self.points) > MAX_MODULUS):
            raise DomainError(f"point set leaves the disk of radius {MAX_MODULUS}")

    def contains(self, z):
        z = as_complex(z)
        return np.isin(z, self.points)

    def bbox(self):
        p = self.points
        return (p.real.min(), p.real.max(), p.imag.min(), p.imag.max())

    def sample(self, pitch):
        return self.points.copy()

    def boundary_samples(self, pitch):
        return self.points.copy()


class Union(Region):
    def __init__(self, parts):
        flat = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, Union) else [p])
        if not flat:
            raise DomainError("union of no regions")
        self.parts = tuple(flat)
        self.closed = all(p.closed for p in flat)

    def contains(self, z):
        z = as_complex(z)
        out = np.zeros(z.shape, dtype=bool)
        for p in self.parts:
            out |= p.contains(z)
        return out

    def bbox(self):
        b = np.array([p.bbox() for p in self.parts])
        return (b[:, 0].min(), b[:, 1].max(), b[:, 2].min(), b[:, 3].max())

    def sample(self, pitch):
        s = np.concatenate([p.sample(pitch) for p in self.parts])
        _, first = np.unique(s, return_index=True)
        return s[np.sort(first)]


class Complement(Region):
    """Points of `within` that are not in `part`."""

    def __init__(self, part, within=None):
        self.part = part
        self.within = within if within is not None else Disk(0, MAX_MODULUS)
        self.closed = not part.closed

    def contains(self, z):
        return self.within.contains(z) & ~self.part.contains(z)

    def bbox(self):
        return self.within.bbox()


class Band(Region):
    """Level band lo <= coord(z) <= hi of a scalar field, inside `within`."""

    def __init__(self, coord, lo, hi, within, bbox=None):
        if not lo < hi:
            raise DomainError("band needs lo < hi")
        self.coord, self.lo, self.hi, self.within = coord, lo, hi, within
        self._bbox = bbox

    def contains(self, z):
        z = as_complex(z)
        t = self.coord(z)
        return self.within.contains(z) & (t >= self.lo) & (t <= self.hi)

    def bbox(self):
        return self._bbox if self._bbox is not None else self.within.bbox()


def membership(region, z):
    return region.contains(z)


def sample(region, density):
    return region.sample(density)


class SampledDistance(NamedTuple):
    value: float
    uncertainty: float


def _pair_min(a, b, metric):
    # blocked to bound memory on large boundaries
    best, arg = np.inf, (None, None)
    step = max(1, 2_000_000 // max(len(b), 1))
    for s in range(0, len(a), step):
        blk = a[s:s + step, None]
        d = _rho(blk, b[None, :]) if metric == "rho" else np.abs(blk - b[None, :])
        k = np.argmin(d)
        if d.flat[k] < best:
            i, j = np.unravel_index(k, d.shape)
            best, arg = float(d.flat[k]), (a[s + i], b[j])
    return best, arg


def region_distance(a, b, density, metric="rho"):
    """Sampled distance between two regions.

    The minimum over boundary sample pairs is refined once on a grid
    eight times finer around the minimizing pair. Returns
    ``SampledDistance(value, uncertainty)`` where the uncertainty is the
    largest distance between adjacent refined samples. Overlapping regions
    give 0.
    """
    sa, sb = a.sample(density), b.sample(density)
    if sa.size == 0 or sb.size == 0:
        raise EmptyRegionError("region_distance on an empty sample set")
    if np.any(b.contains(sa)) or np.any(a.contains(sb)):
        return SampledDistance(0.0, 0.0)
    ba, bb = a.boundary_samples(density), b.boundary_samples(density)
    best, (p, q) = _pair_min(ba, bb, metric)
    fine = density / 8
    la = _local(a, p, density, fine)
    lb = _local(b, q, density, fine)
    if la.size and lb.size:
        best = min(best, _pair_min(la, lb, metric)[0])
    # uncertainty is the adjacent-sample spacing at the refined density near the minimizer
    if metric == "rho":
        unc = float(max(_grid_unc(a, la, fine), _grid_unc(b, lb, fine)))
    else:
        unc = 0.0 if isinstance(a, PointSet) and isinstance(b, PointSet) else fine
    return SampledDistance(best, unc)


def _grid_unc(region, pts, pitch):
    if isinstance(region, PointSet) or pts.size == 0:
        return 0.0
    return np.max(pseudo_pitch(pts, pitch))


def _local(region, p, pitch, fine):
    if isinstance(region, PointSet):
        return np.array([p])
    g = _grid((p.real - pitch, p.real + pitch, p.imag - pitch, p.imag + pitch), fine)
    g = g[np.abs(g) < 1 - BOUNDARY_TOL]
    return g[region.contains(g)]


@dataclass(frozen=True)
class Chain:
    """Maximal epsilon-separated subset of the samples of `host`."""

    epsilon: float
    points: np.ndarray
    host: Region
    density: float

    def __len__(self):
        return len(self.points)


def build_chain(host, epsilon, density):
    """Greedy epsilon-chain over the lexicographic sample order of `host`.

    A sample is admitted iff its rho-distance to every admitted point is at
    least `epsilon`. Raises `ChainCoarsenessError` when adjacent samples are
    not rho-closer than epsilon / 4.
    """
    if not 0 < epsilon < 1:
        raise DomainError("chain epsilon must be in (0, 1)")
    s = host.sample(density)
    if s.size == 0:
        raise EmptyRegionError("chain host has no samples")
    if not isinstance(host, PointSet):
        gap = float(np.max(pseudo_pitch(s, density)))
        if gap >= epsilon / 4:
            raise ChainCoarsenessError(
                f"sample gap {gap:.3g} is not below epsilon/4 = {epsilon / 4:.3g}", witness=gap)
    # rho(z, w) < eps forces |z - w| < 2 eps, so 2 eps buckets see all conflicts
    h = 2 * epsilon
    buckets = {}
    admitted = []
    for z in s:
        bx, by = int(np.floor(z.real / h)), int(np.floor(z.imag / h))
        ok = True
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for w in buckets.get((bx + dx, by + dy), ()):
                    if abs(z - w) < epsilon * abs(1 - w.conjugate() * z):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            admitted.append(z)
            buckets.setdefault((bx, by), []).append(z)
    return Chain(epsilon, np.array(admitted, dtype=complex), host, density)


def check_chain(chain):
    """Return (min pairwise rho, max host-sample distance to the chain)."""
    p = chain.points
    if len(p) > 1:
        d = _rho(p[:, None], p[None, :])
        np.fill_diagonal(d, np.inf)
        sep = float(d.min())
    else:
        sep = 1.0
    s = chain.host.sample(chain.density)
    cover = 0.0
    for k in range(0, len(s), 4096):
        blk = s[k:k + 4096]
        cover = max(cover, float(np.max(np.min(_rho(blk[:, None], p[None, :]), axis=1))))
    return sep, cover
