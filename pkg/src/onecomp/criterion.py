"""Boundary behaviour of inner functions off and on the spectrum.

An inner function ``u`` belongs to the one-component class exactly when
``|u''| <= C |u'|^2`` on the circle away from the spectrum and the radial
liminf of ``|u|`` stays below 1 at each spectral point.  Neither
condition can be checked on a computer, so this module produces
evidence: the ratio ``|u''| / |u'|^2`` sampled on arcs that crowd toward
the spectrum at two densities, plus radial probes of ``|u|`` at the
spectral points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DerivativeVanishes, DomainError, SpectrumHit, TruncationBudgetExceeded, Unsupported
from .geometry import DiskPoint
from .inner import (
    Compose,
    FiniteBlaschke,
    FrostmanShift,
    InfiniteBlaschke,
    InnerSpec,
    Product,
    SingularAtomic,
    _blaschke_poly,
    _finite_zeros_of,
    _solve_finite,
    boundary_derivatives,
    eval_log_modulus,
)

__all__ = [
    "Spectrum",
    "RadialProbe",
    "CriterionReport",
    "spectrum",
    "aleksandrov_ratio",
    "radial_schedule",
    "radial_liminf_probe",
    "criterion_scan",
    "EVIDENCE_LABEL",
]

DEDUP_TOL = 1e-10
DERIVATIVE_FLOOR = 1e-12
EVIDENCE_LABEL = "evidence, not proof"


@dataclass(frozen=True)
class Spectrum:
    """Boundary points where ``u`` fails to extend analytically.

    ``rules`` records, per node kind met while walking the spec, which
    rule produced its contribution.
    """

    points: tuple[complex, ...]
    rules: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def distance(self, zeta: complex) -> float:
        if not self.points:
            return math.inf
        return float(np.min(np.abs(np.asarray(self.points) - complex(zeta))))

    def angles(self) -> np.ndarray:
        return np.mod(np.angle(np.asarray(self.points, dtype=complex)), 2.0 * math.pi)

    def to_json(self) -> dict:
        return {
            "points": [[p.real, p.imag] for p in self.points],
            "rules": dict(sorted(self.rules.items())),
        }


def _dedup(points) -> tuple[complex, ...]:
    pts = np.asarray(list(points), dtype=complex)
    if pts.size == 0:
        return ()
    pts = pts / np.abs(pts)
    order = np.argsort(np.mod(np.angle(pts), 2.0 * math.pi), kind="stable")
    kept: list[complex] = []
    for p in pts[order]:
        if kept and abs(p - kept[-1]) <= DEDUP_TOL:
            continue
        kept.append(complex(p))
    if len(kept) > 1 and abs(kept[0] - kept[-1]) <= DEDUP_TOL:
        kept.pop()
    return tuple(kept)


def _circle_preimages(inner: InnerSpec, p: complex) -> np.ndarray:
    """All solutions of ``B(z) = p`` for a finite Blaschke ``B`` and ``|p| = 1``.

    Such solutions are unimodular and there are exactly ``deg B`` of them.
    """
    a, lam, normalized = _finite_zeros_of(inner)
    if normalized:
        nz = a != 0
        lam = lam * complex(np.prod(-np.abs(a[nz]) / a[nz]))
    if a.size == 0:
        return np.zeros(0, complex)
    roots = _solve_finite(a, lam, p)
    if roots.size != a.size:
        roots = np.roots(_blaschke_poly(a, lam, p))
    if np.any(np.abs(np.abs(roots) - 1.0) > 1e-6):
        raise DomainError("boundary preimages drifted off the unit circle")
    return roots / np.abs(roots)


def spectrum(u: InnerSpec) -> Spectrum:
    rules: dict[str, str] = {}
    pts = _spec(u, rules)
    return Spectrum(_dedup(pts), rules)


def _spec(node: InnerSpec, rules: dict) -> list[complex]:
    if isinstance(node, FiniteBlaschke):
        rules["finite_blaschke"] = "empty"
        return []
    if isinstance(node, InfiniteBlaschke):
        if node.finite:
            rules["finite_blaschke"] = "empty"
            return []
        rules["infinite_blaschke"] = "declared cluster points"
        return list(node.sequence.cluster_points)
    if isinstance(node, SingularAtomic):
        rules["singular"] = "atoms"
        return [p for p, _ in node.atoms]
    if isinstance(node, Product):
        rules["product"] = "union"
        out: list[complex] = []
        for f in node.factors:
            out.extend(_spec(f, rules))
        return out
    if isinstance(node, FrostmanShift):
        rules["frostman"] = "unchanged"
        return _spec(node.base, rules)
    if isinstance(node, Compose):
        inner = node.inner
        if not (isinstance(inner, FiniteBlaschke) or (isinstance(inner, InfiniteBlaschke) and inner.finite)):
            raise Unsupported("spectrum of a composition needs a finite Blaschke inner function")
        rules["compose"] = "preimages under the inner Blaschke product"
        out = []
        for p in _dedup(_spec(node.outer, rules)):
            out.extend(complex(z) for z in _circle_preimages(inner, p))
        return out
    raise Unsupported(f"unknown node type {type(node).__name__}")


# --------------------------------------------------------------------------
# the derivative ratio
# --------------------------------------------------------------------------


def aleksandrov_ratio(u: InnerSpec, zeta, clearance: float = 1e-9, spec: Spectrum | None = None) -> float:
    """``|u''(zeta)| / |u'(zeta)|**2`` at a boundary point clear of the spectrum."""
    zeta = complex(zeta)
    spec = spectrum(u) if spec is None else spec
    if spec.distance(zeta) < clearance:
        raise SpectrumHit(f"{zeta} lies within {clearance:g} of the spectrum")
    _, d1, d2 = boundary_derivatives(u, zeta)
    if abs(d1) < DERIVATIVE_FLOOR:
        raise DerivativeVanishes(f"|u'({zeta})| = {abs(d1):.3g}")
    return abs(d2) / abs(d1) ** 2


def _arc_angles(spec: Spectrum, density: int, clearance: float) -> np.ndarray:
    n = int(density)
    base = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    steps = max(1, n // 256)
    # offsets pi * 2**(-j / steps) shrinking down to the clearance
    jmax = int(math.floor(steps * math.log2(math.pi / clearance)))
    offs = math.pi * np.exp2(-np.arange(1, jmax + 1) / steps)
    extra = [phi + s * offs for phi in spec.angles() for s in (1.0, -1.0)]
    theta = np.mod(np.concatenate([base, *extra]), 2.0 * math.pi)
    theta = np.unique(theta)
    if len(spec):
        pts = np.exp(1j * theta)
        d = np.min(np.abs(pts[:, None] - np.asarray(spec.points)[None, :]), axis=1)
        theta = theta[d >= clearance]
    return theta


@dataclass(frozen=True)
class _ArcScan:
    density: int
    samples: int
    sup: float
    argmax: complex


def _scan_arc(u, spec, density, clearance) -> _ArcScan:
    theta = _arc_angles(spec, density, clearance)
    best, arg = -1.0, 0j
    for t in theta:
        z = complex(math.cos(t), math.sin(t))
        r = aleksandrov_ratio(u, z, clearance=0.5 * clearance, spec=spec)
        if r > best:  # strict: the smallest angle wins ties
            best, arg = r, z
    return _ArcScan(int(density), int(theta.size), float(best), arg)


# --------------------------------------------------------------------------
# radial probes
# --------------------------------------------------------------------------


def radial_schedule(kmax: int = 20) -> np.ndarray:
    """Radii ``1 - 2**-k`` for ``k = 1..kmax``."""
    if kmax < 2:
        raise DomainError("radial schedule needs at least two radii")
    return 1.0 - np.exp2(-np.arange(1, kmax + 1, dtype=float))


@dataclass(frozen=True)
class RadialProbe:
    zeta: complex
    value: float
    log_value: float
    radius: float
    radii_used: int

    def to_json(self) -> dict:
        return {
            "zeta": [self.zeta.real, self.zeta.imag],
            "value": self.value,
            "log_value": self.log_value,
            "radius": self.radius,
            "radii_used": self.radii_used,
        }


def radial_liminf_probe(u: InnerSpec, zeta, radii=None, tol: float = 1e-10) -> RadialProbe:
    """Minimum of ``|u(r zeta)|`` over the last half of a radius schedule.

    The schedule is clipped where the truncation of an infinite product
    can no longer be certified; if fewer than two radii survive the
    truncation error is raised.
    """
    zeta = complex(zeta)
    if abs(abs(zeta) - 1.0) > 1e-9:
        raise DomainError("radial probes start from a point on the unit circle")
    zeta /= abs(zeta)
    radii = radial_schedule() if radii is None else np.asarray(radii, dtype=float)
    if radii.size < 2 or np.any(np.diff(radii) <= 0) or radii[0] < 0 or radii[-1] >= 1:
        raise DomainError("radii must increase inside [0, 1)")
    logs: list[float] = []
    for r in radii:
        comp = (1.0 - r) + r * (1.0 - zeta)
        try:
            logs.append(float(eval_log_modulus(u, DiskPoint.from_complement(comp), tol)))
        except TruncationBudgetExceeded:
            if len(logs) < 2:
                raise
            break
    logs_arr = np.asarray(logs)
    used = radii[: logs_arr.size]
    tail = slice(logs_arr.size // 2, None)
    k = int(np.argmin(logs_arr[tail])) + logs_arr.size // 2
    lv = float(logs_arr[k])
    return RadialProbe(zeta, float(math.exp(lv)), lv, float(used[k]), int(logs_arr.size))


# --------------------------------------------------------------------------
# the scan
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionReport:
    spectrum: Spectrum
    sup_ratio: float
    argmax: complex
    samples: int
    scans: tuple[_ArcScan, ...]
    blowup: bool
    probes: tuple[RadialProbe, ...]
    verdict_hint: str
    label: str = EVIDENCE_LABEL

    @property
    def sups(self) -> tuple[float, ...]:
        return tuple(s.sup for s in self.scans)

    def to_json(self) -> dict:
        return {
            "spectrum": self.spectrum.to_json(),
            "sup_ratio": self.sup_ratio,
            "argmax": [self.argmax.real, self.argmax.imag],
            "samples": self.samples,
            "densities": [
                {"density": s.density, "samples": s.samples, "sup_ratio": s.sup, "argmax": [s.argmax.real, s.argmax.imag]}
                for s in self.scans
            ],
            "blowup": self.blowup,
            "probes": [p.to_json() for p in self.probes],
            "verdict_hint": self.verdict_hint,
            "label": self.label,
        }


def criterion_scan(
    u: InnerSpec,
    densities: tuple[int, int] = (256, 512),
    radii=None,
    clearance: float = 1e-6,
    probe_ceiling: float = 1.0 - 1e-3,
) -> CriterionReport:
    """Sample the derivative ratio and probe the spectrum radially.

    Each density ``n`` places ``n`` uniform arc points plus a geometric
    run toward every spectral point (``n // 256`` steps per halving of
    the distance) that stops at ``clearance``.  The sups at the two
    densities are flagged as a blow-up when they differ by more than
    10%.
    """
    if len(densities) != 2 or min(densities) < 8:
        raise DomainError("criterion_scan needs two densities of at least 8 points")
    spec = spectrum(u)
    scans = tuple(_scan_arc(u, spec, d, clearance) for d in densities)
    a, b = scans[0].sup, scans[1].sup
    top = max(a, b)
    blowup = bool(not math.isfinite(top) or (top > 0 and abs(a - b) > 0.1 * top))
    fine = scans[1]
    probes = tuple(radial_liminf_probe(u, z, radii) for z in spec.points)
    ok = not blowup and all(p.value < probe_ceiling for p in probes)
    return CriterionReport(
        spectrum=spec,
        sup_ratio=fine.sup,
        argmax=fine.argmax,
        samples=sum(s.samples for s in scans),
        scans=scans,
        blowup=blowup,
        probes=probes,
        verdict_hint="consistent" if ok else "inconsistent",
    )
