"""Certified sampling of sublevel sets ``{|u| < eta}`` and their components.

Every grid cell is classified from a single evaluation at its center.
Schwarz-Pick turns the center value into bounds for ``|u|`` on the
whole closed cell, so

* ``IN``  means ``|u| < eta`` on the entire cell,
* ``OUT`` means ``|u| > eta`` on the entire cell,
* ``UNCERTAIN`` carries no claim and is refined until the cell is small.

Connectivity uses two graphs: IN cells alone (a lower bound for the
sublevel set) and IN plus UNCERTAIN cells (an upper bound).  Two IN
cells in different upper components prove disconnection; a single
component in both graphs is reported as connected.  All verdicts refer
to the disk ``|z| <= r_max`` and to the truncation in use.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, TruncationBudgetExceeded
from .grid import MAX_RINGS, DiskGrid, rings_for_radius
from .inner import Evaluator, InfiniteBlaschke, InnerSpec, leaves, required_radius, zeros

__all__ = [
    "IN",
    "OUT",
    "UNCERTAIN",
    "RefinementPolicy",
    "Sample",
    "ComponentMap",
    "ConnectivityVerdict",
    "ThresholdResult",
    "grid_evaluator",
    "sample",
    "sample_ladder",
    "classify_cells",
    "label_components",
    "decide",
    "is_connected",
    "threshold_search",
    "topology_checks",
    "cells_within_pseudodisks",
    "pseudo_dist_c",
    "monotone_ladder",
]

OUT, IN, UNCERTAIN = 0, 1, 2
_NAMES = {OUT: "out", IN: "in", UNCERTAIN: "uncertain"}


@dataclass(frozen=True)
class RefinementPolicy:
    """How far grids are refined at each level.

    Level ``k`` uses ``r_max_schedule[k]`` (rounded up to a ring
    boundary, and pushed outward to cover every explicitly known zero)
    and stops splitting uncertain cells whose pseudohyperbolic radius is
    below ``rho_floor_schedule[k]`` or ``eta_floor_factor * min(eta, 1 - eta)``.
    """

    r_max_schedule: tuple[float, ...] = (0.9, 0.99, 0.999, 0.9999)
    rho_floor_schedule: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    sectors: int = 16
    max_cells: int = 400_000
    tol: float = 1e-9
    max_tol: float = 1e-2
    eta_floor_factor: float = 0.25
    margin_scale: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if len(self.r_max_schedule) != len(self.rho_floor_schedule) or not self.r_max_schedule:
            raise DomainError("schedules must be nonempty and of equal length")
        if not all(0.0 < r < 1.0 for r in self.r_max_schedule):
            raise DomainError("r_max values must lie in (0, 1)")
        if self.workers < 1:
            raise DomainError("workers must be positive")

    @property
    def levels(self) -> int:
        return len(self.r_max_schedule)

    def truncated(self, levels: int) -> "RefinementPolicy":
        levels = max(1, min(levels, self.levels))
        return replace(
            self,
            r_max_schedule=self.r_max_schedule[:levels],
            rho_floor_schedule=self.rho_floor_schedule[:levels],
        )

    def capped(self, r_max: float) -> "RefinementPolicy":
        return replace(self, r_max_schedule=tuple(min(r, r_max) for r in self.r_max_schedule))

    def to_json(self) -> dict:
        return {
            "r_max_schedule": list(self.r_max_schedule),
            "rho_floor_schedule": list(self.rho_floor_schedule),
            "sectors": self.sectors,
            "max_cells": self.max_cells,
            "tol": self.tol,
            "max_tol": self.max_tol,
            "eta_floor_factor": self.eta_floor_factor,
            "margin_scale": self.margin_scale,
        }


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


def _unterminated(u: InnerSpec) -> int:
    return sum(1 for f in leaves(u) if isinstance(f, InfiniteBlaschke) and not f.finite)


def grid_evaluator(u: InnerSpec, rings: int, policy: RefinementPolicy) -> tuple[Evaluator, int]:
    """An evaluator certified on ``|z| <= 1 - 2**-rings``, shrinking ``rings`` if needed.

    Tries the target tolerance first and falls back to ``policy.max_tol``;
    the per-cell truncation bound enters classification either way.
    """
    n = max(1, _unterminated(u))
    for k in range(rings, 0, -1):
        radius = 1.0 - 2.0 ** -k
        for tol in (policy.tol, policy.max_tol):
            try:
                return Evaluator(u, radius, tol / n), k
            except TruncationBudgetExceeded:
                continue
    raise TruncationBudgetExceeded("no certified evaluation radius is available for this function")


def _target_rings(u: InnerSpec, r_max: float) -> int:
    k = rings_for_radius(r_max)
    need = required_radius(u)
    if need > 0.0:
        k = max(k, rings_for_radius(min(need, 1.0 - 2.0 ** -MAX_RINGS)) + 2)
    return min(k, MAX_RINGS)


def _cell_radii(rho: np.ndarray, slack: np.ndarray, margin_scale: float):
    if margin_scale == 1.0:
        return rho, slack / (1.0 + rho)
    r = np.minimum(rho * margin_scale, 1.0)
    return r, 1.0 - r


def _eval_cells(ev: Evaluator, z, c, rho, beta, workers: int):
    """Center values, truncation bounds and cell enclosures of ``-log|u|``."""

    def run(sl):
        v = ev.enclose(z[sl], c[sl], rho[sl], beta[sl])
        return v.lm, v.abs_b, v.p_lo, v.p_hi

    if workers == 1 or z.size < 2048:
        return run(slice(None))
    bounds = np.linspace(0, z.size, workers + 1).astype(int)
    jobs = [slice(bounds[i], bounds[i + 1]) for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(run, jobs))
    return tuple(np.concatenate([p[k] for p in parts]) for k in range(4))


def _classify(lm, tau, p_lo, p_hi, rho, beta, eta):
    """IN/OUT/UNCERTAIN from two independent certificates.

    Schwarz-Pick applied to ``u`` itself bounds ``|u|`` on the cell from
    the center value; the structural enclosure bounds ``-log|u|``
    directly.  Either one may certify a cell.
    """
    t = np.exp(lm)
    t_hi = np.minimum(t + tau, 1.0)
    u_max = (t_hi + rho) / (1.0 + t_hi * rho)
    om_t = np.where(tau > 0, 1.0 - np.maximum(t - tau, 0.0), -np.expm1(lm))
    with np.errstate(invalid="ignore"):
        u_min = np.where(beta > om_t, (beta - om_t) / (beta + om_t - beta * om_t), 0.0)
    level = -np.log(eta)
    inside = (u_max < eta) | (p_lo > level)
    outside = (u_min > eta) | (p_hi < level)
    cls = np.full(lm.shape, UNCERTAIN, dtype=np.int8)
    cls[inside & ~outside] = IN
    cls[outside & ~inside] = OUT
    return cls


@dataclass
class Sample:
    """A grid with per-cell data and the classification at one level ``eta``."""

    grid: DiskGrid
    eta: float
    classes: np.ndarray
    log_modulus: np.ndarray
    truncation: np.ndarray
    p_lo: np.ndarray
    p_hi: np.ndarray
    rho: np.ndarray
    beta: np.ndarray
    rho_floor: float
    level: int
    terms: dict = field(default_factory=dict)
    margin_scale: float = 1.0

    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.classes == k)) for k, name in _NAMES.items()}

    def reclassify(self, eta: float) -> "Sample":
        """Same grid and evaluations, different level."""
        cls = _classify(self.log_modulus, self.truncation, self.p_lo, self.p_hi, self.rho, self.beta, eta)
        return replace(self, eta=eta, classes=cls)


def _floor(level_floor: float, eta: float, policy: RefinementPolicy) -> float:
    return min(level_floor, policy.eta_floor_factor * min(eta, 1.0 - eta))


def sample_ladder(u: InnerSpec, etas, level: int, policy: RefinementPolicy | None = None) -> list[Sample]:
    """Build one grid refined for every level in ``etas`` and classify it at each.

    Returns one :class:`Sample` per level, all sharing the same grid and
    evaluations, which makes cell-wise comparisons across levels exact.
    """
    policy = policy or RefinementPolicy()
    etas = [float(e) for e in etas]
    if not etas:
        raise DomainError("need at least one level")
    for e in etas:
        if not 0.0 < e < 1.0:
            raise DomainError("eta must lie in (0, 1)")
    if not 0 <= level < policy.levels:
        raise DomainError(f"level must lie in [0, {policy.levels})")
    rings = _target_rings(u, policy.r_max_schedule[level])
    ev, rings = grid_evaluator(u, rings, policy)
    floors = [_floor(policy.rho_floor_schedule[level], e, policy) for e in etas]
    ms = policy.margin_scale

    grid = DiskGrid.root(rings, policy.sectors)
    geo = grid.geometry()
    rho, beta = _cell_radii(geo.rho, geo.slack, ms)
    data = [*_eval_cells(ev, geo.z, geo.c, rho, beta, policy.workers), rho, beta, geo.rho]
    while True:
        lm, tau, p_lo, p_hi, rho, beta, rho_geo = data
        split = np.zeros(len(grid), dtype=bool)
        for e, fl in zip(etas, floors):
            cls = _classify(lm, tau, p_lo, p_hi, rho, beta, e)
            split |= (cls == UNCERTAIN) & (rho_geo > fl)
        idx = np.flatnonzero(split)
        if idx.size == 0 or len(grid) + 3 * idx.size > policy.max_cells:
            break
        new_grid, fresh = grid.split(idx)
        if not fresh.any():
            break
        keep = np.ones(len(grid), dtype=bool)
        keep[idx[np.any(grid.split_plan(idx), axis=0)]] = False
        g_new = new_grid.geometry(fresh)
        rho_n, beta_n = _cell_radii(g_new.rho, g_new.slack, ms)
        new = [*_eval_cells(ev, g_new.z, g_new.c, rho_n, beta_n, policy.workers), rho_n, beta_n, g_new.rho]
        data = [np.concatenate([old[keep], nw]) for old, nw in zip(data, new)]
        grid = new_grid

    order = grid.sort_order()
    grid = grid.take(order)
    lm, tau, p_lo, p_hi, rho, beta, _ = (x[order] for x in data)
    terms = {k.sequence.generator: v for k, v in ev.plan.items()}
    out = []
    for e, fl in zip(etas, floors):
        cls = _classify(lm, tau, p_lo, p_hi, rho, beta, e)
        out.append(Sample(grid, e, cls, lm, tau, p_lo, p_hi, rho, beta, fl, level, terms, ms))
    return out


def sample(u: InnerSpec, eta: float, level: int, policy: RefinementPolicy | None = None) -> Sample:
    return sample_ladder(u, [eta], level, policy)[0]


def classify_cells(u: InnerSpec, eta: float, grid: DiskGrid, policy: RefinementPolicy | None = None) -> Sample:
    """Classify an existing grid without refining it."""
    policy = policy or RefinementPolicy()
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie in (0, 1)")
    ev, rings = grid_evaluator(u, grid.rings, policy)
    if rings != grid.rings:
        raise TruncationBudgetExceeded(f"grid radius {grid.r_max} exceeds the certified evaluation radius")
    geo = grid.geometry()
    rho, beta = _cell_radii(geo.rho, geo.slack, policy.margin_scale)
    lm, tau, p_lo, p_hi = _eval_cells(ev, geo.z, geo.c, rho, beta, policy.workers)
    cls = _classify(lm, tau, p_lo, p_hi, rho, beta, eta)
    terms = {k.sequence.generator: v for k, v in ev.plan.items()}
    return Sample(grid, eta, cls, lm, tau, p_lo, p_hi, rho, beta, 0.0, -1, terms, policy.margin_scale)


# --------------------------------------------------------------------------
# components
# --------------------------------------------------------------------------


def _components(n: int, ei: np.ndarray, ej: np.ndarray, mask: np.ndarray) -> tuple[np.ndarray, int]:
    labels = np.full(n, -1, dtype=np.int64)
    nodes = np.flatnonzero(mask)
    if nodes.size == 0:
        return labels, 0
    remap = np.full(n, -1, dtype=np.int64)
    remap[nodes] = np.arange(nodes.size)
    keep = mask[ei] & mask[ej]
    a, b = remap[ei[keep]], remap[ej[keep]]
    m = coo_matrix((np.ones(a.size, dtype=np.int8), (a, b)), shape=(nodes.size, nodes.size))
    count, lab = connected_components(m, directed=False)
    # number components by their first cell so labels do not depend on scipy internals
    _, first = np.unique(lab, return_index=True)
    rank = np.empty(count, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(count)
    labels[nodes] = rank[lab]
    return labels, int(count)


@dataclass
class ComponentMap:
    """Components of the IN cells with per-component statistics."""

    labels: np.ndarray
    count: int
    cells: list[int]
    min_log_modulus: list[float]
    annulus: list[tuple[float, float]]
    zero_count: list[int]
    touches_rim: list[bool]

    def contains_zero(self, k: int) -> bool:
        return self.zero_count[k] > 0

    def to_json(self) -> list[dict]:
        return [
            {
                "cells": self.cells[k],
                "min_log_modulus": self.min_log_modulus[k],
                "annulus": list(self.annulus[k]),
                "zeros": self.zero_count[k],
                "touches_rim": self.touches_rim[k],
            }
            for k in range(self.count)
        ]


def _zero_cells(u: InnerSpec, s: Sample) -> np.ndarray:
    found = zeros(u, s.grid.r_max)
    if found is None or len(found) == 0:
        return np.zeros(0, dtype=np.int64)
    idx = s.grid.locate(found)
    return idx[idx >= 0]


def label_components(s: Sample, u: InnerSpec | None = None, zero_cells: np.ndarray | None = None) -> ComponentMap:
    """Label IN cells by edge adjacency and collect statistics.

    Zero membership uses ``zero_cells`` when given, otherwise the zeros
    enumerated from ``u`` inside ``r_max``.
    """
    g = s.grid
    ei, ej = g.edges()
    labels, count = _components(len(g), ei, ej, s.classes == IN)
    if zero_cells is None:
        zero_cells = _zero_cells(u, s) if u is not None else np.zeros(0, dtype=np.int64)
    r0, r1 = g.radii()
    rim = g.on_rim()
    cells, mins, ann, zc, tr = [], [], [], [], []
    zl = labels[zero_cells] if zero_cells.size else np.zeros(0, dtype=np.int64)
    for k in range(count):
        sel = labels == k
        cells.append(int(sel.sum()))
        mins.append(float(np.min(s.log_modulus[sel])))
        ann.append((float(np.min(r0[sel])), float(np.max(r1[sel]))))
        zc.append(int(np.sum(zl == k)))
        tr.append(bool(np.any(rim[sel])))
    return ComponentMap(labels, count, cells, mins, ann, zc, tr)


# --------------------------------------------------------------------------
# verdicts
# --------------------------------------------------------------------------


@dataclass
class ConnectivityVerdict:
    verdict: str
    eta: float
    level: int
    r_max: float
    cells: int
    counts: dict
    in_components: int
    upper_components: int
    witnesses: list[dict]
    rho_floor: float
    margin_scale: float
    truncation_bound: float
    terms: dict
    history: list[tuple[int, str]] = field(default_factory=list)
    sample: Sample | None = field(default=None, repr=False, compare=False)

    @property
    def connected(self) -> bool:
        return self.verdict == "connected"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "eta": self.eta,
            "level": self.level,
            "r_max": self.r_max,
            "cells": self.cells,
            "counts": self.counts,
            "in_components": self.in_components,
            "upper_components": self.upper_components,
            "witnesses": self.witnesses,
            "margin": {
                "rho_floor": self.rho_floor,
                "margin_scale": self.margin_scale,
                "truncation_bound": self.truncation_bound,
            },
            "terms": dict(sorted(self.terms.items())),
            "history": [[lvl, v] for lvl, v in self.history],
        }


def decide(s: Sample) -> ConnectivityVerdict:
    """Connectivity verdict for one classified grid."""
    g = s.grid
    ei, ej = g.edges()
    inside = s.classes == IN
    lower, n_lower = _components(len(g), ei, ej, inside)
    upper, _ = _components(len(g), ei, ej, s.classes != OUT)
    up_with_in = np.unique(upper[inside])
    witnesses = []
    for k in up_with_in:
        sel = np.flatnonzero(inside & (upper == k))
        best = sel[np.argmin(s.log_modulus[sel])]
        z = g.geometry(np.array([best])).z[0]
        witnesses.append(
            {"cell": int(best), "z": [float(z.real), float(z.imag)], "log_modulus": float(s.log_modulus[best])}
        )
    n_upper_all = int(np.unique(upper[upper >= 0]).size)
    if up_with_in.size >= 2:
        verdict = "disconnected"
    elif n_lower == 1 and n_upper_all == 1:
        verdict = "connected"
    else:
        verdict = "unresolved"
    inside_tau = s.truncation[np.isfinite(s.truncation)]
    return ConnectivityVerdict(
        verdict=verdict,
        eta=s.eta,
        level=s.level,
        r_max=g.r_max,
        cells=len(g),
        counts=s.counts(),
        in_components=n_lower,
        upper_components=int(up_with_in.size),
        witnesses=witnesses,
        rho_floor=s.rho_floor,
        margin_scale=s.margin_scale,
        truncation_bound=float(inside_tau.max()) if inside_tau.size else 0.0,
        terms=dict(s.terms),
        sample=s,
    )


def is_connected(u: InnerSpec, eta: float, policy: RefinementPolicy | None = None) -> ConnectivityVerdict:
    """Refine level by level until two consecutive levels agree on a decisive verdict."""
    policy = policy or RefinementPolicy()
    if not 0.0 < eta < 1.0:
        raise DomainError("eta must lie in (0, 1)")
    history: list[tuple[int, str]] = []
    last = None
    for level in range(policy.levels):
        v = decide(sample(u, eta, level, policy))
        history.append((level, v.verdict))
        if last is not None and v.verdict != "unresolved" and v.verdict == last.verdict:
            break
        last = v
    v.history = history
    return v


@dataclass
class ThresholdResult:
    """Where the verdict flips from disconnected to connected.

    ``status`` is ``"bracketed"`` (interval no wider than the tolerance),
    ``"bracketed_with_gap"`` (an unresolved band sits between the
    disconnected and connected probes), ``"all_connected"`` or
    ``"unresolved"``.
    """

    status: str
    lo: float | None
    hi: float | None
    probes: list[tuple[float, str]]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "lo": self.lo,
            "hi": self.hi,
            "probes": [[e, v] for e, v in sorted(self.probes)],
        }


def threshold_search(
    u: InnerSpec,
    tol_eta: float = 0.01,
    policy: RefinementPolicy | None = None,
    lo: float = 0.05,
    hi: float = 0.95,
) -> ThresholdResult:
    """Bisect on ``eta``; connectedness is monotone in ``eta`` for inner functions."""
    policy = policy or RefinementPolicy()
    cache: dict[float, str] = {}

    def verdict(e: float) -> str:
        if e not in cache:
            cache[e] = is_connected(u, e, policy).verdict
        return cache[e]

    def done(status, a, b):
        return ThresholdResult(status, a, b, list(cache.items()))

    if verdict(hi) != "connected":
        return done("unresolved", None, hi)
    v_lo = verdict(lo)
    if v_lo == "connected":
        return done("all_connected", lo, hi)
    if v_lo != "disconnected":
        return done("unresolved", lo, hi)
    # smallest connected level
    a, b = lo, hi
    while b - a > 0.5 * tol_eta:
        m = 0.5 * (a + b)
        a, b = (a, m) if verdict(m) == "connected" else (m, b)
    c_hi = b
    # largest disconnected level below it
    a, b = lo, c_hi
    while b - a > 0.5 * tol_eta:
        m = 0.5 * (a + b)
        a, b = (m, b) if verdict(m) == "disconnected" else (a, m)
    d_lo = a
    status = "bracketed" if c_hi - d_lo <= tol_eta else "bracketed_with_gap"
    return done(status, d_lo, c_hi)


# --------------------------------------------------------------------------
# topology
# --------------------------------------------------------------------------


def topology_checks(cmap: ComponentMap, s: Sample) -> dict[str, list[bool]]:
    """Hole detection and the zero-or-rim property for every IN component.

    A component has a hole when some connected piece of its complement
    (within the grid) does not reach the rim.
    """
    g = s.grid
    ei, ej = g.edges()
    rim = g.on_rim()
    simply, zero_or_rim = [], []
    for k in range(cmap.count):
        rest = cmap.labels != k
        lab, n = _components(len(g), ei, ej, rest)
        reaching = np.unique(lab[rest & rim])
        simply.append(bool(np.setdiff1d(np.arange(n), reaching).size == 0))
        zero_or_rim.append(bool(cmap.zero_count[k] > 0 or cmap.touches_rim[k]))
    return {"simply_connected": simply, "zero_or_rim": zero_or_rim}


def cells_within_pseudodisks(s: Sample, centers_comp: np.ndarray, radius: float) -> np.ndarray:
    """For every IN cell, whether the whole cell lies in some ``{rho(z, z_n) < radius}``.

    Centers are passed through their complements ``1 - z_n``; the check
    uses the strong triangle inequality of the pseudohyperbolic metric.
    """
    idx = np.flatnonzero(s.classes == IN)
    geo = s.grid.geometry(idx)
    ok = np.zeros(idx.size, dtype=bool)
    for cn in np.asarray(centers_comp, dtype=complex):
        d = pseudo_dist_c(geo.c, cn)
        reach = (d + geo.rho) / (1.0 + d * geo.rho)
        ok |= reach < radius
    return ok


def pseudo_dist_c(c1, c2):
    """Pseudohyperbolic distance between points given by their complements."""
    num = np.abs(c2 - c1)
    den = np.abs(np.conj(c1) + c2 - np.conj(c1) * c2)
    return num / den


def monotone_ladder(samples: list[Sample]) -> bool:
    """IN sets grow and connected never turns into disconnected as ``eta`` increases."""
    order = sorted(range(len(samples)), key=lambda i: samples[i].eta)
    seen_connected = False
    prev = None
    for i in order:
        s = samples[i]
        inside = s.classes == IN
        if prev is not None and np.any(prev & ~inside):
            return False
        prev = inside
        v = decide(s).verdict
        if seen_connected and v == "disconnected":
            return False
        seen_connected |= v == "connected"
    return True

