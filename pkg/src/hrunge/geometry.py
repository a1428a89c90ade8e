"""Pseudohyperbolic geometry of the unit disk.

Points are plain complex numbers (scalars or numpy arrays). `DiskPoint`
exists for callers that want an explicit, validated value type; every
function here also accepts it.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

# Inputs closer to the unit circle than this are rejected by the metric code.
BOUNDARY_TOL = 1e-12


class DiskPoint(NamedTuple):
    re: float
    im: float

    @classmethod
    def from_complex(cls, z):
        p = cls(float(np.real(z)), float(np.imag(z)))
        check_in_disk(p.z)
        return p

    @property
    def z(self):
        return complex(self.re, self.im)

    def __complex__(self):
        return self.z


def as_complex(z):
    """Coerce scalars, DiskPoints and sequences of either to complex arrays."""
    if isinstance(z, DiskPoint):
        return np.complex128(z.z)
    if isinstance(z, (list, tuple)) and z and isinstance(z[0], DiskPoint):
        return np.array([p.z for p in z], dtype=complex)
    return np.asarray(z, dtype=complex)


def check_in_disk(z, tol=BOUNDARY_TOL, what="point"):
    z = as_complex(z)
    if np.any(~np.isfinite(z)) or np.any(np.abs(z) >= 1.0 - tol):
        raise DomainError(f"{what} must lie strictly inside the unit disk "
                          f"(max modulus {np.max(np.abs(z)):.17g})")
    return z


def rho(z, w):
    """Pseudohyperbolic distance |z - w| / |1 - conj(w) z|.

    Broadcasts over array arguments. Raises `DomainError` if any input has
    modulus >= 1 - BOUNDARY_TOL.
    """
    z = check_in_disk(z)
    w = check_in_disk(w)
    return _rho(z, w)


def _rho(z, w):
    # unchecked kernel, used in hot loops after validation
    return np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)


def mobius_image(base, w):
    """Disk automorphism w -> (w + base) / (1 + conj(base) w).

    Sends 0 to `base`; a point with |w| = s < 1 lands on the
    pseudohyperbolic circle of radius s about `base`. |w| = 1 is allowed
    (the image stays on the unit circle).
    """
    base = check_in_disk(base, what="base")
    w = as_complex(w)
    if np.any(np.abs(w) > 1.0 + 1e-15):
        raise DomainError("mobius_image needs |w| <= 1")
    return (w + base) / (1.0 + np.conj(base) * w)


@dataclass(frozen=True)
class PseudoDisk:
    """Open pseudohyperbolic disk D(center, radius) = {z : rho(z, center) < radius}."""

    center: complex
    radius: float

    def __post_init__(self):
        c = complex(as_complex(self.center))
        check_in_disk(c, what="pseudo-disk center")
        if not 0.0 < self.radius < 1.0:
            raise DomainError(f"pseudo-disk radius must be in (0, 1), got {self.radius}")
        object.__setattr__(self, "center", c)

    def euclidean(self):
        return euclidean_realization(self)

    def boundary(self, n=64, phase=0.0):
        theta = phase + 2 * np.pi * np.arange(n) / n
        return mobius_image(self.center, self.radius * np.exp(1j * theta))


def euclidean_realization(d):
    """Euclidean (center, radius) of the pseudo-disk `d`."""
    c, r = d.center, d.radius
    den = 1.0 - r * r * abs(c) ** 2
    return c * (1.0 - r * r) / den, r * (1.0 - abs(c) ** 2) / den


def rho_triangle_bounds(a, b):
    """Bounds on rho(z, y) given a = rho(z, u) and b = rho(u, y).

    Returns ``(lower, upper)`` with lower = |a - b| / (1 - ab) and
    upper = (a + b) / (1 + ab).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any((a < 0) | (a >= 1) | (b < 0) | (b >= 1)):
        raise DomainError("triangle bounds need a, b in [0, 1)")
    lower = np.abs(a - b) / (1.0 - a * b)
    upper = (a + b) / (1.0 + a * b)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def pseudo_pitch(z, pitch):
    """Largest rho between z and a grid neighbour at Euclidean offset `pitch`."""
    z = as_complex(z)
    offs = pitch * np.array([1, 1j, -1, -1j])
    nb = z[..., None] + offs
    nb = np.where(np.abs(nb) < 1 - BOUNDARY_TOL, nb, z[..., None])
    return np.max(_rho(z[..., None], nb), axis=-1)
