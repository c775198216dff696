"""Adaptive polar grid over the closed disk ``|z| <= r_max``.

Cells are dyadic rectangles in the coordinates ``s = log2(1 / (1 - r))``
and ``theta``.  Ring ``k`` covers ``s`` in ``[k, k + 1]``, so the radial
extent of cells shrinks geometrically toward the rim, and ``r_max`` is
always ``1 - 2**-rings``.  Both coordinates live on integer lattices
(``2**SBITS`` steps per ring, ``sectors * 2**ABITS`` steps per turn),
which keeps adjacency and point location exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["DiskGrid", "CellGeometry", "rings_for_radius", "SBITS", "ABITS", "MAX_RINGS"]

SBITS = 20
ABITS = 32
S_UNIT = 1 << SBITS
MAX_RINGS = 24


def rings_for_radius(r: float) -> int:
    """Smallest ring count whose ``r_max = 1 - 2**-rings`` is at least ``r``."""
    if not 0.0 <= r < 1.0:
        raise DomainError("radius must lie in [0, 1)")
    if r <= 0.5:
        return 1
    return int(math.ceil(-math.log2(1.0 - r) - 1e-12))


@dataclass(frozen=True)
class CellGeometry:
    """Centers of cells plus a Schwarz-Pick enclosure radius.

    ``rho`` bounds the pseudohyperbolic distance from the center to any
    point of the closed cell and ``slack = 1 - rho**2`` is kept
    separately to avoid cancellation when ``rho`` is close to 1.
    """

    z: np.ndarray
    c: np.ndarray  # 1 - z to full relative precision
    rho: np.ndarray
    slack: np.ndarray

    @property
    def one_minus_rho(self) -> np.ndarray:
        return self.slack / (1.0 + self.rho)


def _gap(s: np.ndarray) -> np.ndarray:
    return np.exp2(-s / S_UNIT)


def cell_geometry(s0, s1, a0, a1, period: int) -> CellGeometry:
    gap0, gap1 = _gap(s0), _gap(s1)
    gap_c = 0.5 * (gap0 + gap1)
    r_c = 1.0 - gap_c
    twice_mid = a0 + a1
    twice_mid = np.where(twice_mid > period, twice_mid - 2 * period, twice_mid)
    theta = twice_mid * (math.pi / period)
    dtheta = (a1 - a0) * (2.0 * math.pi / period)
    half = np.sin(0.5 * theta)
    c = gap_c + r_c * (2.0 * half * half - 1j * np.sin(theta))
    z = r_c * np.exp(1j * theta)
    r1 = 1.0 - gap1
    reach = 0.5 * (gap0 - gap1) + 2.0 * r1 * np.sin(0.25 * np.minimum(dtheta, 2.0 * math.pi))
    # Two bounds for rho(c, w) over the cell; take the better one per cell.
    # (a) rho <= reach / (1 - |c| r1): sharp for small cells.
    den = gap_c + r_c * gap1
    # (b) 1 - rho^2 >= (1 - |c|^2)(1 - r1^2) / (1 - |c|^2 + |c| reach)^2: keeps
    #     1 - rho positive for cells much longer than their distance to the rim.
    om_c = gap_c * (2.0 - gap_c)
    om_1 = gap1 * (2.0 - gap1)
    slack_b = np.minimum(om_c * om_1 / (om_c + r_c * reach) ** 2, 1.0)
    beta_a = np.maximum(den - reach, 0.0) / den
    beta_b = slack_b / (1.0 + np.sqrt(1.0 - slack_b))
    beta = np.maximum(beta_a, beta_b)
    return CellGeometry(z, c, 1.0 - beta, beta * (2.0 - beta))


@dataclass
class DiskGrid:
    """Leaves of the refinement tree, kept sorted by ``(s0, a0)``."""

    rings: int
    sectors: int
    s0: np.ndarray
    s1: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    _edges: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    @classmethod
    def root(cls, rings: int, sectors: int = 16) -> "DiskGrid":
        if not 1 <= rings <= MAX_RINGS:
            raise DomainError(f"rings must lie between 1 and {MAX_RINGS}")
        if sectors < 1:
            raise DomainError("need at least one sector")
        k, j = np.meshgrid(np.arange(rings, dtype=np.int64), np.arange(sectors, dtype=np.int64), indexing="ij")
        k, j = k.ravel(), j.ravel()
        return cls(rings, sectors, k * S_UNIT, (k + 1) * S_UNIT, j << ABITS, (j + 1) << ABITS)

    def __len__(self) -> int:
        return int(self.s0.size)

    @property
    def period(self) -> int:
        return self.sectors << ABITS

    @property
    def s_max(self) -> int:
        return self.rings * S_UNIT

    @property
    def r_max(self) -> float:
        return 1.0 - 2.0 ** -self.rings

    def geometry(self, idx=None) -> CellGeometry:
        sel = slice(None) if idx is None else idx
        return cell_geometry(self.s0[sel], self.s1[sel], self.a0[sel], self.a1[sel], self.period)

    def on_rim(self) -> np.ndarray:
        return self.s1 == self.s_max

    def radii(self) -> tuple[np.ndarray, np.ndarray]:
        return 1.0 - _gap(self.s0), 1.0 - _gap(self.s1)

    def angles(self) -> tuple[np.ndarray, np.ndarray]:
        scale = 2.0 * math.pi / self.period
        return self.a0 * scale, self.a1 * scale

    # -- refinement -------------------------------------------------------

    def split_plan(self, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Which of the cells ``idx`` split radially and/or angularly."""
        s0, s1, a0, a1 = self.s0[idx], self.s1[idx], self.a0[idx], self.a1[idx]
        gap0, gap1 = _gap(s0), _gap(s1)
        radial_extent = gap0 - gap1
        angular_extent = (1.0 - gap1) * (a1 - a0) * (2.0 * math.pi / self.period)
        can_s = (s1 - s0) >= 2
        can_a = (a1 - a0) >= 2
        rad = can_s & ((radial_extent >= 0.5 * angular_extent) | ~can_a)
        ang = can_a & ((angular_extent >= 0.5 * radial_extent) | ~can_s)
        return rad, ang

    def split(self, idx: np.ndarray) -> tuple["DiskGrid", np.ndarray]:
        """Split cells ``idx``; returns the unsorted grid and a mask of new cells.

        Cells that cannot be split further are left untouched.  The
        returned grid keeps surviving cells first (in their old order)
        followed by the children.
        """
        idx = np.asarray(idx, dtype=np.int64)
        rad, ang = self.split_plan(idx)
        go = rad | ang
        idx, rad, ang = idx[go], rad[go], ang[go]
        keep = np.ones(len(self), dtype=bool)
        keep[idx] = False
        s0, s1, a0, a1 = self.s0[idx], self.s1[idx], self.a0[idx], self.a1[idx]
        sm = (s0 + s1) // 2
        am = (a0 + a1) // 2
        s_lo = [np.where(rad, s0, s0), np.where(rad, sm, s0)]
        s_hi = [np.where(rad, sm, s1), np.where(rad, s1, s1)]
        a_lo = [np.where(ang, a0, a0), np.where(ang, am, a0)]
        a_hi = [np.where(ang, am, a1), np.where(ang, a1, a1)]
        parts = []
        for i in range(2):
            for j in range(2):
                # duplicate children appear when a direction is not split
                valid = (rad | (i == 0)) & (ang | (j == 0))
                parts.append((s_lo[i][valid], s_hi[i][valid], a_lo[j][valid], a_hi[j][valid]))
        new_s0 = np.concatenate([self.s0[keep]] + [p[0] for p in parts])
        new_s1 = np.concatenate([self.s1[keep]] + [p[1] for p in parts])
        new_a0 = np.concatenate([self.a0[keep]] + [p[2] for p in parts])
        new_a1 = np.concatenate([self.a1[keep]] + [p[3] for p in parts])
        fresh = np.zeros(new_s0.size, dtype=bool)
        fresh[int(keep.sum()):] = True
        return DiskGrid(self.rings, self.sectors, new_s0, new_s1, new_a0, new_a1), fresh

    def sort_order(self) -> np.ndarray:
        return np.lexsort((self.a0, self.s0))

    def take(self, order: np.ndarray) -> "DiskGrid":
        return DiskGrid(self.rings, self.sectors, self.s0[order], self.s1[order], self.a0[order], self.a1[order])

    # -- adjacency --------------------------------------------------------

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Pairs of cells sharing a boundary segment of positive length.

        Requires the grid to be sorted by ``(s0, a0)``.  Cells meeting
        only at a corner, or only at the origin, are not adjacent.
        """
        if self._edges is None:
            P = self.period
            # across circles s = const
            ky0 = self.s0 * P + self.a0
            ky1 = self.s0 * P + self.a1
            lo = np.searchsorted(ky1, self.s1 * P + self.a0, side="right")
            hi = np.searchsorted(ky0, self.s1 * P + self.a1, side="left")
            e1 = _expand(np.arange(len(self)), lo, hi)
            # across rays theta = const
            SM = self.s_max + 1
            order = np.lexsort((self.s0, self.a0))
            kz0 = self.a0[order] * SM + self.s0[order]
            kz1 = self.a0[order] * SM + self.s1[order]
            right = self.a1 % P
            lo = np.searchsorted(kz1, right * SM + self.s0, side="right")
            hi = np.searchsorted(kz0, right * SM + self.s1, side="left")
            i2, j2 = _expand(np.arange(len(self)), lo, hi)
            j2 = order[j2]
            i = np.concatenate([e1[0], i2])
            j = np.concatenate([e1[1], j2])
            ok = i != j
            self._edges = (i[ok], j[ok])
        return self._edges

    # -- point location ---------------------------------------------------

    def locate(self, z, c=None) -> np.ndarray:
        """Index of the cell containing each point, ``-1`` outside the grid."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        c = 1.0 - z if c is None else np.atleast_1d(np.asarray(c, dtype=complex))
        om = (2.0 * c.real - np.abs(c) ** 2) / (1.0 + np.abs(z))
        out = np.full(z.size, -1, dtype=np.int64)
        with np.errstate(divide="ignore"):
            s_real = -np.log2(np.where(om > 0, om, np.nan)) * S_UNIT
        theta = np.mod(np.angle(z), 2.0 * math.pi)
        a = np.minimum((theta / (2.0 * math.pi) * self.period).astype(np.int64), self.period - 1)
        # keys sorted by (s0, a0): scan the candidate rows that start at or below s
        for k in range(z.size):
            if not (np.isfinite(s_real[k]) and 0 <= s_real[k] < self.s_max):
                continue
            s = int(max(0, math.floor(s_real[k])))
            hit = np.flatnonzero((self.s0 <= s) & (s < self.s1) & (self.a0 <= a[k]) & (a[k] < self.a1))
            if hit.size:
                out[k] = hit[0]
        return out


def _expand(rows: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    i = np.repeat(rows, counts)
    starts = np.cumsum(counts) - counts
    j = np.repeat(lo, counts) + (np.arange(total) - np.repeat(starts, counts))
    return i, j
