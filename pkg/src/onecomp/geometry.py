"""Pseudohyperbolic geometry of the unit disk.

Points close to the unit circle lose their distance to the circle in
floating point long before they stop being distinct from one another.
To keep metric quantities accurate, points may carry their *complement*
``1 - z`` explicitly; every formula here is written in terms of
complements so that a sequence such as ``1 - n**-n`` stays usable long
after ``1 - n**-n == 1.0`` in double precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError

__all__ = [
    "DiskPoint",
    "BoundaryPoint",
    "EuclideanDisk",
    "StolzAngle",
    "complement",
    "pseudo_dist",
    "rho_one_minus",
    "horodisk",
    "pseudo_disk_to_euclidean",
    "in_stolz",
    "mobius",
]

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class DiskPoint:
    """A point of the open unit disk.

    ``comp`` optionally holds ``1 - z`` to full relative precision; when
    absent it is computed from ``re`` and ``im``.
    """

    re: float
    im: float = 0.0
    comp: complex | None = None

    def __post_init__(self):
        c = self.complement
        if not (2.0 * c.real - abs(c) ** 2 > 0.0):
            raise DomainError(f"point {self.re}+{self.im}j is not inside the unit disk")

    @classmethod
    def from_complement(cls, c: complex) -> "DiskPoint":
        c = complex(c)
        z = 1.0 - c
        return cls(z.real, z.imag, c)

    @property
    def complement(self) -> complex:
        if self.comp is not None:
            return complex(self.comp)
        return 1.0 - complex(self.re, self.im)

    def one_minus_abs2(self) -> float:
        """``1 - |z|**2`` without cancellation."""
        c = self.complement
        return 2.0 * c.real - abs(c) ** 2

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self):
        return abs(complex(self))


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the unit circle; normalized on construction."""

    re: float
    im: float = 0.0

    def __post_init__(self):
        r = math.hypot(self.re, self.im)
        if abs(r - 1.0) > 1e-6 or r == 0.0:
            raise DomainError(f"{self.re}+{self.im}j is not on the unit circle")
        object.__setattr__(self, "re", self.re / r)
        object.__setattr__(self, "im", self.im / r)

    @classmethod
    def from_angle(cls, theta: float) -> "BoundaryPoint":
        return cls(math.cos(theta), math.sin(theta))

    @property
    def angle(self) -> float:
        return math.atan2(self.im, self.re)

    def __complex__(self):
        return complex(self.re, self.im)


@dataclass(frozen=True)
class EuclideanDisk:
    center: complex
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("radius must be nonnegative")

    def contains(self, z) -> np.ndarray | bool:
        return np.abs(np.asarray(z) - self.center) < self.radius

    def inside_closed_unit_disk(self) -> bool:
        return abs(self.center) + self.radius <= 1.0 + BOUNDARY_TOL

    def boundary_samples(self, n: int) -> np.ndarray:
        t = 2.0 * np.pi * np.arange(n) / n
        return self.center + self.radius * np.exp(1j * t)


@dataclass(frozen=True)
class StolzAngle:
    """Nontangential approach region ``|vertex - z| < C (1 - |z|)``."""

    vertex: BoundaryPoint
    opening_constant: float

    def __post_init__(self):
        if not self.opening_constant > 1.0:
            raise DomainError("Stolz opening constant must exceed 1")


PointLike = Union[complex, float, DiskPoint, np.ndarray]


def complement(z: PointLike):
    """Return ``1 - z``, exact when ``z`` carries its complement."""
    if isinstance(z, DiskPoint):
        return z.complement
    return 1.0 - np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else 1.0 - complex(z)


def pseudo_dist(z: PointLike, w: PointLike):
    """Pseudohyperbolic distance ``|z - w| / |1 - conj(z) w|``.

    Accepts scalars, :class:`DiskPoint` instances or numpy arrays
    (broadcast elementwise).
    """
    cz = complement(z)
    cw = complement(w)
    num = np.abs(cw - cz)
    den = np.abs(np.conj(cz) + cw - np.conj(cz) * cw)
    out = num / den
    if np.ndim(out) == 0:
        return float(out)
    return out


def rho_one_minus(a: float, b: float) -> float:
    """``pseudo_dist(1 - a, 1 - b)`` for real gaps, as ``|a - b| / (a + b - ab)``."""
    if not (0.0 < a <= 1.0 and 0.0 < b <= 1.0):
        raise DomainError("rho_one_minus needs 0 < a, b <= 1")
    return abs(a - b) / (a + b - a * b)


def horodisk(eta: float) -> EuclideanDisk:
    """The sublevel set ``{|S| < eta}`` of the atomic inner function.

    With ``L = log(1/eta)`` it is the disk of center ``L/(L+1)`` and
    radius ``1/(L+1)``, internally tangent to the circle at 1.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie in (0, 1)")
    L = -math.log(eta)
    return EuclideanDisk(complex(L / (L + 1.0), 0.0), 1.0 / (L + 1.0))


def pseudo_disk_to_euclidean(center: PointLike, r: float) -> EuclideanDisk:
    """Euclidean description of ``{z : pseudo_dist(z, center) < r}``."""
    if not 0.0 < r < 1.0:
        raise DomainError("pseudohyperbolic radius must lie in (0, 1)")
    z0 = complex(center)
    if isinstance(center, DiskPoint):
        one_minus = center.one_minus_abs2()
    else:
        one_minus = 1.0 - abs(z0) ** 2
        if one_minus <= 0:
            raise DomainError("center must lie inside the unit disk")
    # 1 - r^2 |z0|^2 = (1 - r^2) + r^2 (1 - |z0|^2)
    den = (1.0 - r * r) + r * r * one_minus
    c = (1.0 - r * r) * z0 / den
    rad = r * one_minus / den
    return EuclideanDisk(c, rad)


def in_stolz(angle: StolzAngle, z: PointLike) -> bool:
    zc = complex(z)
    return abs(complex(angle.vertex) - zc) < angle.opening_constant * (1.0 - abs(zc))


def mobius(a: complex, theta: float = 0.0):
    """Disk automorphism ``z -> e^{i theta} (z - a) / (1 - conj(a) z)`` as a callable."""
    a = complex(a)
    rot = cmath.exp(1j * theta)

    def tau(z):
        z = np.asarray(z, dtype=complex)
        return rot * (z - a) / (1.0 - np.conj(a) * z)

    return tau
