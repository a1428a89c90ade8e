"""Smooth cutoff equal to 1 near K and 0 off U, with its exact d-bar derivative.

The cutoff is rho_V(z) = S((2m - t(z)) / m), where S is the C-infinity step
built from exp(-1/x), m is the margin and t is the Euclidean distance to K
(a softmin of per-primitive distances when K is a union). The collar
{m <= t <= 2m} carries all of d(rho_V)/dz-bar.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, MarginError
from .geometry import as_complex
from .regions import (MAX_MODULUS, AnnulusSector, Band, Complement, Disk, PointSet,
                      PseudoDiskRegion, Union, region_distance)


def _e(x):
    with np.errstate(divide="ignore", over="ignore", under="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def smooth_step(x):
    """S(x) = e(x) / (e(x) + e(1 - x)); 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a, b = _e(x), _e(1 - x)
    return a / (a + b)


def smooth_step_prime(x):
    """S'(x); exact zeros outside (0, 1)."""
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    a, b = _e(xs), _e(1 - xs)
    num = a * b * (1 / xs ** 2 + 1 / (1 - xs) ** 2)
    with np.errstate(invalid="ignore"):
        val = num / (a + b) ** 2
    return np.where(inside & np.isfinite(val), val, 0.0)


def _pieces(K):
    """Per-primitive (distance, d-bar distance) pairs for K."""
    parts = K.parts if isinstance(K, Union) else (K,)
    out = []
    for p in parts:
        if isinstance(p, Disk):
            out.append(("disk", p.center, p.radius))
        elif isinstance(p, PseudoDiskRegion):
            c, r = p.disk.euclidean()
            out.append(("disk", c, r))
        elif isinstance(p, PointSet):
            out.extend(("disk", complex(c), 0.0) for c in p.points)
        elif isinstance(p, AnnulusSector) and p.angle_hi - p.angle_lo >= 2 * np.pi:
            out.append(("annulus", p.center, (p.r_in, p.r_out)))
        else:
            raise DomainError(f"no distance coordinate for a {type(p).__name__} in K")
    return out


def _piece_eval(piece, z):
    kind, c, r = piece
    u = z - c
    d = np.abs(u)
    unit = np.where(d > 0, u / np.where(d > 0, d, 1), 0) / 2
    if kind == "disk":
        return d - r, unit
    r_in, r_out = r
    outer = d - r_out
    inner = r_in - d
    return np.maximum(outer, inner), np.where(outer >= inner, unit, -unit)


class DistanceCoordinate:
    """Euclidean distance to K, smoothed by a softmin of width `width` for unions."""

    def __init__(self, K, width):
        self.pieces = _pieces(K)
        self.width = width

    def _all(self, z):
        ts, ds = zip(*(_piece_eval(p, z) for p in self.pieces))
        return np.stack(ts), np.stack(ds)

    def __call__(self, z):
        z = as_complex(z)
        if len(self.pieces) == 1:
            return _piece_eval(self.pieces[0], z)[0]
        t, _ = self._all(z)
        lo = t.min(axis=0)
        return lo - self.width * np.log(np.sum(np.exp(-(t - lo) / self.width), axis=0))

    def dbar(self, z):
        z = as_complex(z)
        if len(self.pieces) == 1:
            return _piece_eval(self.pieces[0], z)[1]
        t, d = self._all(z)
        w = np.exp(-(t - t.min(axis=0)) / self.width)
        return np.sum(w * d, axis=0) / np.sum(w, axis=0)


@dataclass
class CutoffPair:
    """rho_V, its d-bar derivative, g = (1 - |z|^2) d-bar rho_V, and the regions around them."""

    margin: float
    coord: DistanceCoordinate
    collar: Band
    inner: Band
    outer: Band

    def rho_V(self, z):
        return smooth_step((2 * self.margin - self.coord(as_complex(z))) / self.margin)

    def rho_V_prime(self, z):
        return 1.0 - self.rho_V(z)

    def dbar_rho(self, z):
        z = as_complex(z)
        x = (2 * self.margin - self.coord(z)) / self.margin
        return smooth_step_prime(x) * (-1.0 / self.margin) * self.coord.dbar(z)

    def g(self, z):
        z = as_complex(z)
        return (1 - np.abs(z) ** 2) * self.dbar_rho(z)

    def g_sup(self, density):
        s = self.collar.sample(density)
        return float(np.max(np.abs(self.g(s)))) if s.size else 0.0


def build_cutoff(K, U, margin, density=None):
    """Cutoff with collar {margin <= t <= 2 margin}, t the distance to K.

    Requires the Euclidean distance from K to the complement of U to be at
    least 3 * margin (checked on samples of pitch `density`, default
    margin / 8, counting the sampling uncertainty against the check).
    """
    if margin <= 0:
        raise MarginError("margin must be positive")
    density = density or margin / 8
    gap = region_distance(K, Complement(U), density, metric="euclidean")
    if gap.value - gap.uncertainty < 3 * margin:
        raise MarginError(f"distance {gap.value:.4g} from K to the complement of U is below "
                          f"3 * margin = {3 * margin:.4g}", witness=gap.value)
    n = len(_pieces(K))
    width = margin / (4 * max(1.0, np.log(n)))
    coord = DistanceCoordinate(K, width)
    xmin, xmax, ymin, ymax = K.bbox()
    pad = 2 * margin + density
    box = (xmin - pad, xmax + pad, ymin - pad, ymax + pad)
    within = Disk(0, MAX_MODULUS)
    collar = Band(coord, margin, 2 * margin, within, bbox=box)
    inner = Band(coord, -np.inf, margin, within, bbox=box)
    outer = Band(coord, 2 * margin, np.inf, within)
    return CutoffPair(margin, coord, collar, inner, outer)


def frak_d(pair, K, density):
    """(d, e) with d the sampled pseudohyperbolic distance from K to the collar and e = d / 4."""
    d = region_distance(K, pair.collar, density).value
    if not 0 < d < 1:
        raise MarginError(f"distance from K to the collar is {d}, outside (0, 1)")
    return d, d / 4


