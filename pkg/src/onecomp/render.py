"""Pictures of nested sublevel sets.

Pixels are evaluated at their centers on the square ``[-1, 1]^2``.  The
picture is an illustration, not a certificate: pixels are colored by the
computed value of ``|u|`` without margins.  Pixels outside the
certified evaluation radius get a neutral "unknown" color.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from skimage.measure import find_contours

from .inner import InnerSpec
from .serialize import write_atomic
from .sublevel import RefinementPolicy, _target_rings, grid_evaluator

__all__ = ["Raster", "rasterize", "to_ppm", "to_svg", "render"]

OUTSIDE = -1  # outside the unit disk
UNKNOWN = -2  # inside the disk but beyond the certified radius

_BACKGROUND = (255, 255, 255)
_UNKNOWN = (200, 200, 200)
_OUTLINE = (0, 0, 0)
_ABOVE = (250, 248, 240)
# one hue per level, light to dark as eta decreases
_LEVEL_COLORS = [
    (66, 133, 244),
    (52, 168, 83),
    (251, 188, 5),
    (234, 67, 53),
    (142, 68, 173),
    (0, 150, 136),
]


@dataclass
class Raster:
    """Per-pixel data of a sublevel picture.

    ``levels[i, j]`` is the number of levels ``eta`` (sorted increasingly)
    that ``|u|`` does *not* undercut, so ``0`` means inside the smallest
    sublevel set and ``len(etas)`` means above every level.  Negative
    values are :data:`OUTSIDE` and :data:`UNKNOWN`.  ``components`` holds
    the 4-connected component index of the pixel inside its own level's
    sublevel set (``-1`` where not applicable).  Row 0 is the top of the
    picture (``Im z = 1``).
    """

    etas: tuple[float, ...]
    levels: np.ndarray
    components: np.ndarray
    log_modulus: np.ndarray
    r_max: float

    @property
    def size(self) -> int:
        return int(self.levels.shape[0])


def _pixel_grid(size: int):
    k = np.arange(size)
    x = (2.0 * k + 1.0 - size) / size
    X, Y = np.meshgrid(x, -x)
    return X + 1j * Y


def rasterize(u: InnerSpec, etas, size: int = 256, policy: RefinementPolicy | None = None) -> Raster:
    policy = policy or RefinementPolicy()
    etas = tuple(sorted(float(e) for e in etas))
    if any(not 0.0 < e < 1.0 for e in etas):
        raise ValueError("levels must lie in (0, 1)")
    if size < 8:
        raise ValueError("image size must be at least 8")
    Z = _pixel_grid(size)
    inside = np.abs(Z) < 1.0
    ev, rings = grid_evaluator(u, _target_rings(u, policy.r_max_schedule[-1]), policy)
    r_max = 1.0 - 2.0**-rings
    known = inside & (np.abs(Z) <= r_max)

    lm = np.full(Z.shape, np.nan)
    if etas and known.any():
        z = Z[known]
        lm[known] = ev.evaluate(z, 1.0 - z).lm

    levels = np.full(Z.shape, OUTSIDE, dtype=np.int64)
    levels[inside & ~known] = UNKNOWN
    comps = np.full(Z.shape, -1, dtype=np.int64)
    if etas:
        logs = np.log(np.asarray(etas))
        band = np.searchsorted(logs, lm[known], side="right")
        levels[known] = band
        for k in range(len(etas)):
            lab, _ = ndimage.label(known & (lm < logs[k]))
            mine = levels == k
            comps[mine] = lab[mine] - 1
    else:
        levels[known] = 0
    return Raster(etas, levels, comps, lm, r_max)


def _shade(rgb, comp: np.ndarray) -> np.ndarray:
    # alternate components get slightly different lightness
    base = np.asarray(rgb, dtype=float)
    t = (comp % 4)[:, None] * 0.12
    return base[None, :] * (1.0 - t) + 255.0 * t


def _pixels(r: Raster) -> np.ndarray:
    img = np.empty(r.levels.shape + (3,), dtype=np.uint8)
    img[...] = _BACKGROUND
    n = len(r.etas)
    img[r.levels == UNKNOWN] = _UNKNOWN
    img[r.levels == n] = _ABOVE
    for k in range(n):
        mask = r.levels == k
        if mask.any():
            col = _LEVEL_COLORS[k % len(_LEVEL_COLORS)]
            img[mask] = np.clip(np.rint(_shade(col, np.maximum(r.components[mask], 0))), 0, 255).astype(np.uint8)
    # the unit circle
    Z = _pixel_grid(r.size)
    px = 2.0 / r.size
    ring = np.abs(np.abs(Z) - 1.0) <= 0.75 * px
    img[ring] = _OUTLINE
    return img


def to_ppm(r: Raster) -> bytes:
    img = _pixels(r)
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode("ascii") + img.tobytes()


def _svg_path(contour: np.ndarray, size: int) -> str:
    # contour rows/cols -> picture coordinates in [0, size]
    pts = [f"{c + 0.5:.3f},{r + 0.5:.3f}" for r, c in contour]
    return "M" + " L".join(pts)


def to_svg(r: Raster) -> str:
    size = r.size
    half = size / 2.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<circle cx="{half:.3f}" cy="{half:.3f}" r="{half:.3f}" fill="{_hex(_ABOVE)}" stroke="black" stroke-width="1"/>',
    ]
    if r.r_max < 1.0:
        out.append(
            f'<circle cx="{half:.3f}" cy="{half:.3f}" r="{half * r.r_max:.3f}" fill="none" '
            'stroke="gray" stroke-dasharray="4,3" stroke-width="0.5"/>'
        )
    # pad with +inf so contours close along the certified boundary
    field = np.where(np.isnan(r.log_modulus), np.inf, r.log_modulus)
    field = np.pad(field, 1, constant_values=np.inf)
    field = np.where(np.isinf(field), 1.0, field)
    for k, eta in enumerate(r.etas):
        col = _hex(_LEVEL_COLORS[k % len(_LEVEL_COLORS)])
        paths = [_svg_path(c - 1.0, size) + " Z" for c in find_contours(field, math.log(eta))]
        if paths:
            out.append(
                f'<path d="{" ".join(paths)}" fill="{col}" fill-opacity="0.35" fill-rule="evenodd" '
                f'stroke="{col}" stroke-width="1"><title>eta={eta:.6g}</title></path>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _hex(rgb) -> str:
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render(u: InnerSpec, etas, out_path, fmt: str | None = None, size: int = 256,
           policy: RefinementPolicy | None = None) -> Path:
    """Write a PPM or SVG picture; the format defaults to the file suffix."""
    out_path = Path(out_path)
    fmt = (fmt or out_path.suffix.lstrip(".")).lower()
    if fmt not in ("ppm", "svg"):
        raise ValueError(f"unknown image format {fmt!r}")
    r = rasterize(u, etas, size, policy)
    data: bytes | str = to_ppm(r) if fmt == "ppm" else to_svg(r)
    try:
        return write_atomic(out_path, data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write image {out_path}: {exc.strerror}") from None
