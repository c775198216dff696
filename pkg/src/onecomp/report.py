"""Analysis reports and the stock experiments.

:func:`analyze` bundles sequence constants, connectivity verdicts, an
optional threshold search and the boundary criterion into one JSON
document.  Everything except the ``timing`` block is a deterministic
function of the inputs and the package version.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .criterion import EVIDENCE_LABEL, criterion_scan
from .errors import DomainError, NotRadial, TruncationBudgetExceeded, Unsupported
from .geometry import DiskPoint, pseudo_disk_to_euclidean
from .inner import (
    Compose,
    FiniteBlaschke,
    FrostmanShift,
    InfiniteBlaschke,
    InnerSpec,
    Product,
    atomic,
    blaschke,
    compose,
    frostman_shift,
    leaves,
    multiply,
)
from .sequences import (
    ZeroSequence,
    blaschke_sum,
    consecutive_rhos,
    eta_star,
    frostman_sum,
    hoffman_constants,
    interpolation_constant,
    separation_constant,
    vhn_ratio,
)
from .serialize import SpecDocument, content_hash, dump_json, write_atomic
from .sublevel import (
    IN,
    RefinementPolicy,
    cells_within_pseudodisks,
    decide,
    is_connected,
    label_components,
    monotone_ladder,
    sample,
    sample_ladder,
    threshold_search,
    topology_checks,
)

__all__ = [
    "AnalysisReport",
    "Experiment",
    "analyze",
    "sequence_constants",
    "hoffman_inclusion",
    "with_budget",
    "stock_experiments",
    "run_suite",
    "CONSTANTS_N",
]

CONSTANTS_N = 2000


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


def sequence_constants(seq: ZeroSequence, N: int | None = None) -> dict[str, Any]:
    """Classifiers of the first ``N`` terms of a zero sequence."""
    N = min(seq.budget, CONSTANTS_N) if N is None else int(N)
    out: dict[str, Any] = {"sequence": seq.to_json(), "N": N}
    bs = blaschke_sum(seq, N)
    out["blaschke_sum"] = {"value": bs.value, "tail_bound": bs.tail_bound}
    if N < 2:
        return out
    rhos = consecutive_rhos(seq, N)
    out["consecutive_rho"] = {"min": float(rhos.min()), "max": float(rhos.max()), "last": float(rhos[-1])}
    out["separation"] = separation_constant(seq, N)
    out["eta_star"] = eta_star(seq, N)
    delta = interpolation_constant(seq, N)
    out["interpolation_constant"] = delta
    try:
        tr = vhn_ratio(seq, N)
        out["vhn_ratio"] = {"sup": tr.sup, "last": tr.last, "approaches_one": tr.approaches_one}
    except NotRadial as exc:
        out["vhn_ratio"] = {"status": "not_radial", "reason": str(exc)}
    out["frostman_sums"] = [
        {"xi": [xi.real, xi.imag], "value": fs.value, "diverging": fs.diverging}
        for xi in seq.cluster_points
        for fs in [frostman_sum(seq, xi, N)]
    ]
    if 0.0 < delta < 1.0:
        h = hoffman_constants(delta)
        out["hoffman"] = {"delta": h.delta, "eta": h.eta, "epsilon": h.epsilon}
    else:
        out["hoffman"] = None
    return out


def _constants_block(u: InnerSpec) -> list[dict]:
    block = []
    for leaf in leaves(u):
        if isinstance(leaf, InfiniteBlaschke):
            N = leaf.terms if leaf.finite else min(leaf.sequence.budget, CONSTANTS_N)
            block.append(sequence_constants(leaf.sequence, min(N, CONSTANTS_N)))
        elif isinstance(leaf, FiniteBlaschke) and len(set(leaf.zeros)) >= 2:
            pts = [[a.real, a.imag] for a in leaf.zeros]
            block.append(sequence_constants(ZeroSequence("explicit", {"points": pts})))
    return block


# --------------------------------------------------------------------------
# the Hoffman inclusion check
# --------------------------------------------------------------------------


def hoffman_inclusion(seq: ZeroSequence, N: int, policy: RefinementPolicy | None = None, level: int = 1) -> dict:
    """Sample the truncated product at its Hoffman ``epsilon`` and test inclusion.

    Every IN cell must lie inside one of the pseudodisks of radius
    ``eta`` around the zeros, and the Euclidean images of those disks
    must be pairwise disjoint.
    """
    policy = policy or RefinementPolicy()
    delta = interpolation_constant(seq, N)
    h = hoffman_constants(delta)
    u = InfiniteBlaschke(seq, N)
    s = sample(u, h.epsilon, level, policy)
    comps = seq.complements(N)
    inside = cells_within_pseudodisks(s, comps, h.eta)
    disks = [pseudo_disk_to_euclidean(DiskPoint.from_complement(c), h.eta) for c in comps]
    disjoint = all(
        abs(disks[i].center - disks[j].center) > disks[i].radius + disks[j].radius
        for i in range(N)
        for j in range(i + 1, N)
    )
    v = decide(s)
    return {
        "N": N,
        "delta": h.delta,
        "eta": h.eta,
        "epsilon": h.epsilon,
        "in_cells": int(inside.size),
        "all_inside": bool(inside.all()),
        "disjoint": bool(disjoint),
        "verdict": v.verdict,
        "in_components": v.in_components,
        "r_max": s.grid.r_max,
    }


# --------------------------------------------------------------------------
# analysis
# --------------------------------------------------------------------------


def with_budget(u: InnerSpec, budget: int) -> InnerSpec:
    """Replace the index budget of every sequence leaf."""
    if isinstance(u, InfiniteBlaschke):
        if u.terms is not None and u.terms > budget:
            raise TruncationBudgetExceeded(f"{u.terms} terms requested but the budget is {budget}")
        seq = ZeroSequence(u.sequence.generator, u.sequence.params, budget)
        return InfiniteBlaschke(seq, u.terms if u.sequence.length is None else None)
    if isinstance(u, Product):
        return Product(tuple(with_budget(f, budget) for f in u.factors))
    if isinstance(u, Compose):
        return Compose(with_budget(u.outer, budget), with_budget(u.inner, budget))
    if isinstance(u, FrostmanShift):
        return FrostmanShift(with_budget(u.base, budget), u.a)
    return u


@dataclass
class AnalysisReport:
    name: str
    spec: dict
    spec_sha256: str
    constants: list
    verdicts: list
    threshold: dict | None
    ladder: dict | None
    criterion: dict
    provenance: dict
    timing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "spec": self.spec,
            "spec_sha256": self.spec_sha256,
            "constants": self.constants,
            "verdicts": self.verdicts,
            "threshold": self.threshold,
            "ladder": self.ladder,
            "criterion": self.criterion,
            "provenance": self.provenance,
            "timing": self.timing,
        }

    def dumps(self) -> str:
        return dump_json(self.to_json())

    def write(self, path) -> Path:
        return write_atomic(path, self.dumps())


def _verdict_block(u: InnerSpec, eta: float, policy: RefinementPolicy) -> dict:
    v = is_connected(u, eta, policy)
    out = v.to_json()
    out["scope"] = {"r_max": v.r_max, "terms": dict(sorted(v.terms.items()))}
    cmap = label_components(v.sample, u)
    out["components"] = cmap.to_json()
    out["topology"] = topology_checks(cmap, v.sample)
    return out


def _ladder_block(u: InnerSpec, etas, policy: RefinementPolicy, level: int) -> dict:
    level = min(level, policy.levels - 1)
    samples = sample_ladder(u, etas, level, policy)
    return {
        "level": level,
        "etas": [s.eta for s in samples],
        "verdicts": [decide(s).verdict for s in samples],
        "in_counts": [int(np.sum(s.classes == IN)) for s in samples],
        "monotone": monotone_ladder(samples),
    }


def _criterion_block(u: InnerSpec) -> dict:
    try:
        rep = criterion_scan(u)
    except Unsupported as exc:
        return {"status": "unsupported", "reason": str(exc), "label": EVIDENCE_LABEL}
    out = rep.to_json()
    out["status"] = "ok"
    return out


def analyze(
    doc: SpecDocument | InnerSpec,
    etas=None,
    policy: RefinementPolicy | None = None,
    threshold: bool = False,
    ladder_level: int = 1,
    name: str | None = None,
) -> AnalysisReport:
    """Run every analysis on one function.

    ``etas=None`` uses the levels stored in the spec document.  An empty
    list skips the connectivity part.
    """
    if isinstance(doc, InnerSpec):
        doc = SpecDocument(doc, name or "function")
    policy = policy or RefinementPolicy()
    u = doc.function
    etas = sorted(float(e) for e in (doc.eta if etas is None else etas))
    for e in etas:
        if not 0.0 < e < 1.0:
            raise DomainError(f"eta={e} must lie in (0, 1)")
    timing: dict[str, float] = {}
    t0 = time.perf_counter()

    echo = doc.to_json()
    constants = _constants_block(u)
    timing["constants"] = time.perf_counter() - t0

    t = time.perf_counter()
    verdicts = [_verdict_block(u, e, policy) for e in etas]
    timing["verdicts"] = time.perf_counter() - t

    t = time.perf_counter()
    ladder = _ladder_block(u, etas, policy, ladder_level) if len(etas) >= 2 else None
    timing["ladder"] = time.perf_counter() - t

    t = time.perf_counter()
    thr = threshold_search(u, policy=policy).to_json() if threshold else None
    timing["threshold"] = time.perf_counter() - t

    t = time.perf_counter()
    crit = _criterion_block(u)
    timing["criterion"] = time.perf_counter() - t
    timing["total"] = time.perf_counter() - t0

    provenance = {
        "tool": "onecomp",
        "version": __version__,
        "numpy": np.__version__,
        "policy": policy.to_json(),
        "verdict_scope": "verdicts refer to the disk |z| <= r_max and the listed truncation terms",
    }
    return AnalysisReport(
        name=name or doc.name,
        spec=echo,
        spec_sha256=content_hash(echo),
        constants=constants,
        verdicts=verdicts,
        threshold=thr,
        ladder=ladder,
        criterion=crit,
        provenance=provenance,
        timing={k: round(v, 6) for k, v in timing.items()},
    )


# --------------------------------------------------------------------------
# stock experiments
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Experiment:
    name: str
    function: InnerSpec
    etas: tuple[float, ...]
    threshold: bool = False
    note: str = ""

    def document(self) -> SpecDocument:
        return SpecDocument(self.function, self.name, self.etas)


def _thin(n: int) -> InfiniteBlaschke:
    return InfiniteBlaschke(ZeroSequence("superexponential"), n)


def _thin_epsilon(seq: ZeroSequence, N: int) -> float:
    return hoffman_constants(interpolation_constant(seq, N)).epsilon


def stock_experiments() -> list[Experiment]:
    """The worked examples, each at a finite truncation."""
    S = atomic()
    geo = ZeroSequence("geometric")
    sup = ZeroSequence("superexponential")
    split = FiniteBlaschke(tuple(1.0 - 2.0 * k ** -float(k) for k in range(2, 6)))
    eps_geo = _thin_epsilon(geo, 20)
    eps_thin = _thin_epsilon(sup, 6)
    return [
        Experiment("atomic", S, (0.1, 0.5, 0.9), threshold=True, note="level sets are horodisks"),
        Experiment(
            "geometric",
            InfiniteBlaschke(geo, 20),
            (eps_geo, 0.5, 0.9),
            note="zeros 1 - 2^-n, N = 20; disconnected at the Hoffman epsilon, connected above the consecutive distance",
        ),
        Experiment("hyperbolic_orbit", InfiniteBlaschke(ZeroSequence("hyperbolic_orbit"), 12), (0.5, 0.8)),
        Experiment("parabolic_orbit", InfiniteBlaschke(ZeroSequence("parabolic_orbit"), 30), (0.8, 0.95)),
        Experiment("thin_times_atomic", multiply([_thin(6), S]), (0.5, 0.9), note="B S with a thin B"),
        Experiment("atomic_of_z2", compose(S, blaschke(0.0, 0.0)), (math.exp(-2.0), 0.5), threshold=True),
        Experiment("frostman_atomic_0.5", frostman_shift(S, 0.5), (0.3, 0.7)),
        Experiment("frostman_atomic_-0.5i", frostman_shift(S, -0.5j), (0.3, 0.7)),
        Experiment("thin", _thin(6), (eps_thin, 0.5), note="zeros 1 - n^-n, n <= 6"),
        Experiment(
            "thin_split_product",
            multiply([_thin(5), split]),
            (_thin_epsilon(ZeroSequence("interleaved_thin"), 8), 0.5),
            note="product of the two halves of the interleaved sequence",
        ),
        Experiment("interleaved", InfiniteBlaschke(ZeroSequence("interleaved_thin"), 8), (0.5,)),
        Experiment(
            "question_4",
            InfiniteBlaschke(ZeroSequence("power", {"p": 2}, 4000)),
            (0.5,),
            note="zeros 1 - n^-2; membership is an open question",
        ),
    ]


# --------------------------------------------------------------------------
# the suite
# --------------------------------------------------------------------------


def _row(name, computed, published, tol, published_text=None):
    err = abs(computed - published)
    return {
        "row": name,
        "computed": computed,
        "published": published_text or published,
        "abs_error": err,
        "tolerance": tol,
        "status": "match" if err <= tol else "mismatch",
    }


def _summary(reports: dict[str, dict]) -> list[dict]:
    rows = []
    hyp = ZeroSequence("hyperbolic_orbit")
    r = consecutive_rhos(hyp, 31)
    worst = float(r[np.argmax(np.abs(r - 0.5))])
    rows.append(_row("hyperbolic consecutive rho (j <= 30)", worst, 0.5, 1e-13))
    par = ZeroSequence("parabolic_orbit")
    r = consecutive_rhos(par, par.budget)
    worst = float(r[np.argmax(np.abs(r - 2**-0.5))])
    rows.append(_row("parabolic consecutive rho", worst, 2**-0.5, 1e-13, "1/sqrt(2)"))
    d = np.abs(par.points(par.budget) - 0.5)
    rows.append(_row("parabolic |z_n - 1/2|", float(d[np.argmax(np.abs(d - 0.5))]), 0.5, 1e-14))
    rows.append(_row("geometric VHN ratio", vhn_ratio(ZeroSequence("geometric"), 60).sup, 0.5, 0.0))
    geo = ZeroSequence("geometric")
    rows.append(_row("geometric rho(z_1, z_2)", float(geo.rho(1, 2)), 0.4, 1e-15))
    # consecutive distances 1/(3 - 2^-n) decrease, so the minimum sits at the last pair
    rows.append(
        _row("geometric separation (N = 20)", separation_constant(geo, 20), 1.0 / (3.0 - 2.0**-19), 1e-13, "1/(3-2^-19)")
    )
    inter = ZeroSequence("interleaved_thin")
    ks = np.arange(2, 9)
    rho = np.array([float(inter.rho(2 * k - 3, 2 * k - 2)) for k in ks])
    closed = 1.0 / (3.0 - 2.0 * ks ** -ks.astype(float))
    row = _row("interleaved consecutive rho (k = 8)", float(rho[-1]), 1.0 / 3.0, 1e-6, "-> 1/3")
    row["max_deviation_from_1/(3-2k^-k)"] = float(np.max(np.abs(rho - closed)))
    rows.append(row)
    thr = (reports.get("atomic_of_z2") or {}).get("threshold")
    if thr:
        lo, hi = thr.get("lo"), thr.get("hi")
        ok = lo is not None and hi is not None and lo <= math.exp(-1.0) <= hi
        rows.append(
            {"row": "S(z^2) connectivity flip", "computed": [lo, hi], "published": "e^-1", "status": "match" if ok else "mismatch"}
        )
    q4 = reports.get("question_4") or {}
    rows.append(
        {
            "row": "open question: zeros 1 - n^-2",
            "computed": [v["verdict"] for v in q4.get("verdicts", [])],
            "published": "open",
            "status": "unresolved",
            "trend": [
                {k: c[k] for k in ("N", "consecutive_rho", "vhn_ratio", "separation") if k in c}
                for c in q4.get("constants", [])
            ],
        }
    )
    return rows


def run_suite(out_dir, policy: RefinementPolicy | None = None, names=None) -> dict:
    """Run the stock experiments and write one report each plus ``summary.json``."""
    out_dir = Path(out_dir)
    policy = policy or RefinementPolicy()
    reports: dict[str, dict] = {}
    failures: dict[str, str] = {}
    for exp in stock_experiments():
        if names is not None and exp.name not in names:
            continue
        try:
            rep = analyze(exp.document(), policy=policy, threshold=exp.threshold)
        except (TruncationBudgetExceeded, Unsupported, DomainError) as exc:
            failures[exp.name] = f"{type(exc).__name__}: {exc}"
            continue
        body = rep.to_json()
        body["note"] = exp.note
        reports[exp.name] = body
        write_atomic(out_dir / f"{exp.name}.json", dump_json(body))
    summary = {
        "version": __version__,
        "experiments": sorted(reports),
        "failures": failures,
        "rows": _summary(reports),
        "verdicts": {
            name: [[v["eta"], v["verdict"]] for v in body["verdicts"]] for name, body in sorted(reports.items())
        },
    }
    write_atomic(out_dir / "summary.json", dump_json(summary))
    return summary

