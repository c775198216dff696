"""Zero sequences in the disk and the constants that classify them.

Every generator returns complements ``1 - z_n`` (1-based ``n``), which
keeps superexponentially convergent sequences such as ``1 - n**-n``
meaningful well past double-precision resolution of ``z_n`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError, EtaOutOfRange, NotRadial, SpecError
from .geometry import BoundaryPoint, DiskPoint

__all__ = [
    "ZeroSequence",
    "GENERATORS",
    "BlaschkeSum",
    "RatioTrend",
    "DeltaTrend",
    "FrostmanSum",
    "HoffmanConstants",
    "blaschke_sum",
    "consecutive_rho",
    "consecutive_rhos",
    "separation_constant",
    "vhn_ratio",
    "interp_delta_n",
    "interpolation_constant",
    "frostman_sum",
    "hoffman_constants",
    "hoffman_eta_max",
    "eta_star",
]

_ROW_CHUNK = 256


# --------------------------------------------------------------------------
# generators
# --------------------------------------------------------------------------


class _Generator:
    real = True
    increasing = True
    max_index: int | None = None
    default_budget = 10_000
    cluster = (1.0 + 0j,)

    def validate(self, params: dict) -> None:
        if params:
            raise SpecError(f"unexpected parameters {sorted(params)}")

    def comp(self, n: np.ndarray, params: dict) -> np.ndarray:
        raise NotImplementedError

    def tail_gap(self, N: int, params: dict) -> float:
        """Upper bound for ``sum_{n > N} (1 - |z_n|)``."""
        raise NotImplementedError

    def length(self, params: dict) -> int | None:
        return None

    def rho(self, n, m, params, cn, cm):
        num = np.abs(cm - cn)
        den = np.abs(np.conj(cn) + cm - np.conj(cn) * cm)
        return num / den


class _Geometric(_Generator):
    # z_n = 1 - 2^-n
    max_index = 1000
    default_budget = 1000

    def comp(self, n, params):
        return np.ldexp(1.0, -n).astype(complex)

    def tail_gap(self, N, params):
        return math.ldexp(1.0, -N)


class _Power(_Generator):
    # z_n = 1 - n^-p, p > 1
    def validate(self, params):
        if set(params) != {"p"}:
            raise SpecError("power generator needs exactly the parameter 'p'")
        if not float(params["p"]) > 1.0:
            raise SpecError("power generator needs p > 1 for the Blaschke condition")

    def comp(self, n, params):
        return (n.astype(float) ** -float(params["p"])).astype(complex)

    def tail_gap(self, N, params):
        p = float(params["p"])
        return N ** (1.0 - p) / (p - 1.0)


class _SuperExponential(_Generator):
    # z_n = 1 - n^-n
    max_index = 140
    default_budget = 64

    def comp(self, n, params):
        nf = n.astype(float)
        return np.exp(-nf * np.log(nf)).astype(complex)

    def tail_gap(self, N, params):
        # sum_{n>N} n^-n <= sum_{n>N} (N+1)^-n = (N+1)^-N / N
        if N < 1:
            return 1.0 + self.tail_gap(1, params)
        return math.exp(-N * math.log(N + 1.0)) / N


class _HyperbolicOrbit(_Generator):
    # x_j = (3^j - 1)/(3^j + 1), zeros of the iterates of (z - 1/2)/(1 - z/2)
    max_index = 600
    default_budget = 600

    def comp(self, n, params):
        return (2.0 / (np.power(3.0, n.astype(float)) + 1.0)).astype(complex)

    def tail_gap(self, N, params):
        return 3.0 ** (-N)


class _ParabolicOrbit(_Generator):
    # z_n = n / (n - i), all on the circle |z - 1/2| = 1/2
    real = False
    increasing = False

    def comp(self, n, params):
        nf = n.astype(float)
        return (1.0 - 1j * nf) / (nf * nf + 1.0)

    def tail_gap(self, N, params):
        # 1 - |z_n| <= 1/(2 n^2)
        return 0.5 / max(N, 1)

    def rho(self, n, m, params, cn, cm):
        # |z_n - z_m| = |n-m| / (|n-i||m-i|), |1 - conj(z_n) z_m| = |1 + i(m-n)| / (|n-i||m-i|)
        d = np.abs(np.asarray(m, dtype=float) - np.asarray(n, dtype=float))
        return d / np.hypot(1.0, d)


class _InterleavedThin(_Generator):
    # pairs 1 - k^-k, 1 - 2 k^-k for k = 2, 3, ...
    increasing = False
    max_index = 2 * 139
    default_budget = 128

    @staticmethod
    def _k(n):
        return (n + 1) // 2 + 1

    def comp(self, n, params):
        k = self._k(n).astype(float)
        base = np.exp(-k * np.log(k))
        return np.where(n % 2 == 1, base, 2.0 * base).astype(complex)

    def tail_gap(self, N, params):
        k_full = 1 + N // 2
        return 3.0 * math.exp(-k_full * math.log(k_full + 1.0)) / k_full


class _Explicit(_Generator):
    real = False
    increasing = False
    cluster = ()

    def validate(self, params):
        if set(params) != {"points"}:
            raise SpecError("explicit generator needs exactly the parameter 'points'")
        pts = params["points"]
        if not isinstance(pts, (list, tuple)) or not pts:
            raise SpecError("explicit generator needs a nonempty point list")
        for p in pts:
            z = _as_complex_param(p)
            if not abs(z) < 1.0:
                raise SpecError(f"explicit point {p} is not inside the unit disk")

    def comp(self, n, params):
        pts = np.array([_as_complex_param(p) for p in params["points"]], dtype=complex)
        return 1.0 - pts[n - 1]

    def tail_gap(self, N, params):
        return 0.0

    def length(self, params):
        return len(params["points"])


def _as_complex_param(p) -> complex:
    if isinstance(p, (list, tuple)):
        if len(p) != 2:
            raise SpecError(f"point {p!r} must be [re, im]")
        return complex(float(p[0]), float(p[1]))
    return complex(p)


GENERATORS: dict[str, _Generator] = {
    "geometric": _Geometric(),
    "power": _Power(),
    "superexponential": _SuperExponential(),
    "hyperbolic_orbit": _HyperbolicOrbit(),
    "parabolic_orbit": _ParabolicOrbit(),
    "interleaved_thin": _InterleavedThin(),
    "explicit": _Explicit(),
}


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """A deterministic, lazily generated sequence of disk points.

    Indices are 1-based.  ``budget`` caps how many terms may be
    materialized.
    """

    generator: str
    params: dict = field(default_factory=dict)
    budget: int | None = None

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise SpecError(f"unknown generator {self.generator!r}")
        gen = GENERATORS[self.generator]
        gen.validate(dict(self.params))
        budget = gen.default_budget if self.budget is None else int(self.budget)
        if gen.max_index is not None:
            budget = min(budget, gen.max_index)
        length = gen.length(self.params)
        if length is not None:
            budget = length if self.budget is None else min(budget, length)
        if budget < 1:
            raise SpecError("sequence budget must be positive")
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "params", dict(self.params))

    def __eq__(self, other):
        return isinstance(other, ZeroSequence) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash((self.generator, repr(sorted(self.params.items())), self.budget))

    @property
    def _gen(self) -> _Generator:
        return GENERATORS[self.generator]

    @property
    def length(self) -> int | None:
        return self._gen.length(self.params)

    @property
    def is_real(self) -> bool:
        if self.generator == "explicit":
            return bool(np.all(self.points(self.budget).imag == 0.0))
        return self._gen.real

    @property
    def cluster_points(self) -> tuple[complex, ...]:
        return self._gen.cluster

    def _check(self, N: int) -> None:
        if N > self.budget:
            raise DomainError(f"index {N} exceeds sequence budget {self.budget}")

    def complements(self, N: int, start: int = 1) -> np.ndarray:
        """``1 - z_n`` for ``n = start..N``."""
        self._check(N)
        n = np.arange(start, N + 1, dtype=np.int64)
        return np.asarray(self._gen.comp(n, self.params), dtype=complex)

    def points(self, N: int, start: int = 1) -> np.ndarray:
        return 1.0 - self.complements(N, start)

    def point(self, n: int) -> DiskPoint:
        return DiskPoint.from_complement(self.complements(n, n)[0])

    def one_minus_abs(self, N: int, start: int = 1) -> np.ndarray:
        c = self.complements(N, start)
        om2 = 2.0 * c.real - np.abs(c) ** 2
        return om2 / (1.0 + np.abs(1.0 - c))

    def tail_gap_bound(self, N: int) -> float:
        """Upper bound for ``sum_{n > N} (1 - |z_n|)``."""
        if self.length is not None and N >= self.length:
            return 0.0
        return float(self._gen.tail_gap(int(N), self.params))

    def rho(self, n, m) -> np.ndarray:
        """Pseudohyperbolic distance between terms ``n`` and ``m`` (arrays broadcast)."""
        n = np.asarray(n, dtype=np.int64)
        m = np.asarray(m, dtype=np.int64)
        top = int(max(np.max(n), np.max(m)))
        comps = self.complements(top)
        return self._gen.rho(n, m, self.params, comps[n - 1], comps[m - 1])

    def to_json(self) -> dict[str, Any]:
        return {"generator": self.generator, "params": dict(self.params), "budget": self.budget}

    @classmethod
    def from_json(cls, obj: dict) -> "ZeroSequence":
        if not isinstance(obj, dict) or "generator" not in obj:
            raise SpecError("sequence spec needs a 'generator' field")
        extra = set(obj) - {"generator", "params", "budget"}
        if extra:
            raise SpecError(f"unexpected sequence fields {sorted(extra)}")
        params = obj.get("params", {}) or {}
        if not isinstance(params, dict):
            raise SpecError("sequence 'params' must be an object")
        budget = obj.get("budget")
        if budget is not None and (not isinstance(budget, int) or isinstance(budget, bool)):
            raise SpecError("sequence 'budget' must be an integer")
        return cls(obj["generator"], params, budget)


# --------------------------------------------------------------------------
# constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BlaschkeSum:
    value: float
    tail_bound: float
    N: int


@dataclass(frozen=True)
class RatioTrend:
    sup: float
    last: float
    approaches_one: bool
    N: int


@dataclass(frozen=True)
class DeltaTrend:
    """Truncated product ``prod_{k != n, k <= N} rho(z_k, z_n)``.

    ``value`` is nonincreasing in the truncation index; ``lower`` bounds
    the untruncated product from below (0 when no tail bound applies).
    """

    value: float
    lower: float
    n: int
    n_trunc: int


@dataclass(frozen=True)
class FrostmanSum:
    value: float
    diverging: bool
    N: int


@dataclass(frozen=True)
class HoffmanConstants:
    delta: float
    eta: float
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError("Hoffman delta must lie in (0, 1)")
        if not 0.0 < self.eta < hoffman_eta_max(self.delta):
            raise EtaOutOfRange(f"eta={self.eta} outside (0, {hoffman_eta_max(self.delta)})")
        eps_max = self.eta * (self.delta - self.eta) / (1.0 - self.delta * self.eta)
        if not 0.0 < self.epsilon < eps_max:
            raise DomainError("Hoffman epsilon outside its admissible range")


def blaschke_sum(seq: ZeroSequence, N: int) -> BlaschkeSum:
    """Partial sum of ``1 - |z_n|**2`` for ``n <= N`` with a tail bound."""
    c = seq.complements(N)
    terms = 2.0 * c.real - np.abs(c) ** 2
    return BlaschkeSum(float(np.sum(terms)), 2.0 * seq.tail_gap_bound(N), N)


def consecutive_rho(seq: ZeroSequence, n: int) -> float:
    return float(seq.rho(n, n + 1))


def consecutive_rhos(seq: ZeroSequence, N: int) -> np.ndarray:
    """``rho(z_n, z_{n+1})`` for ``n = 1..N-1``."""
    n = np.arange(1, N, dtype=np.int64)
    return np.asarray(seq.rho(n, n + 1), dtype=float)


def _pair_rows(seq: ZeroSequence, N: int):
    """Yield ``(rows, matrix)`` blocks of the pairwise distance matrix."""
    cols = np.arange(1, N + 1, dtype=np.int64)
    for start in range(1, N + 1, _ROW_CHUNK):
        rows = np.arange(start, min(start + _ROW_CHUNK, N + 1), dtype=np.int64)
        yield rows, seq.rho(rows[:, None], cols[None, :])


def separation_constant(seq: ZeroSequence, N: int) -> float:
    """``min_{n < m <= N} rho(z_n, z_m)``."""
    if N < 2:
        raise DomainError("separation needs N >= 2")
    best = np.inf
    for rows, mat in _pair_rows(seq, N):
        mask = np.arange(1, N + 1)[None, :] > rows[:, None]
        if mask.any():
            best = min(best, float(np.min(mat[mask])))
    return best


def eta_star(seq: ZeroSequence, N: int) -> float:
    """``max_n min_{m != n} rho(z_n, z_m)`` over the first ``N`` terms."""
    if N < 2:
        raise DomainError("eta_star needs N >= 2")
    worst = 0.0
    for rows, mat in _pair_rows(seq, N):
        mat = mat.copy()
        mat[np.arange(len(rows)), rows - 1] = np.inf
        worst = max(worst, float(np.max(np.min(mat, axis=1))))
    return worst


def vhn_ratio(seq: ZeroSequence, N: int) -> RatioTrend:
    """Sup of ``(1 - x_{n+1}) / (1 - x_n)`` for a real increasing sequence."""
    if N < 2:
        raise DomainError("vhn_ratio needs N >= 2")
    c = seq.complements(N)
    if np.any(c.imag != 0.0):
        raise NotRadial("sequence has non-real terms")
    gaps = c.real
    if np.any(np.diff(gaps) >= 0.0):
        raise NotRadial("sequence is not strictly increasing")
    ratios = gaps[1:] / gaps[:-1]
    sup = float(np.max(ratios))
    last = float(ratios[-1])
    approaches_one = bool(last >= sup and last > 0.95)
    return RatioTrend(sup, last, approaches_one, N)


def interp_delta_n(seq: ZeroSequence, n: int, n_trunc: int) -> DeltaTrend:
    if not 1 <= n <= n_trunc:
        raise DomainError("need 1 <= n <= n_trunc")
    others = np.arange(1, n_trunc + 1, dtype=np.int64)
    others = others[others != n]
    if others.size == 0:
        value = 1.0
    else:
        with np.errstate(divide="ignore"):
            value = float(np.exp(np.sum(np.log(seq.rho(others, n)))))
    gap_n = float(seq.one_minus_abs(n, n)[0])
    X = 4.0 * seq.tail_gap_bound(n_trunc) / gap_n
    if X == 0.0:
        lower = value
    elif X < 1.0:
        lower = value * math.exp(-0.5 * X / (1.0 - X))
    else:
        lower = 0.0
    return DeltaTrend(min(value, 1.0), min(lower, 1.0), n, n_trunc)


def interpolation_constant(seq: ZeroSequence, N: int) -> float:
    """``min_{n <= N} delta_n`` of the ``N``-term truncation.

    For a finite Blaschke product with these zeros this equals
    ``inf (1 - |z_n|**2) |B'(z_n)|``.
    """
    if N == 1:
        return 1.0
    logs = np.zeros(N)
    for rows, mat in _pair_rows(seq, N):
        mat = mat.copy()
        mat[np.arange(len(rows)), rows - 1] = 1.0
        with np.errstate(divide="ignore"):
            logs[rows - 1] = np.sum(np.log(mat), axis=1)
    return float(np.exp(np.min(logs)))


def frostman_sum(seq: ZeroSequence, xi, N: int, ceiling: float = 100.0) -> FrostmanSum:
    """Partial sum of ``(1 - |z_n|**2) / |xi - z_n|``.

    ``diverging`` is set when the partial sum exceeds ``ceiling`` while
    the last tenth of the terms still contributes at least 1% of it.
    """
    xi = complex(xi)
    c = seq.complements(N)
    num = 2.0 * c.real - np.abs(c) ** 2
    # xi - z = (1 - z) - (1 - xi)
    den = np.abs(c - (1.0 - xi))
    terms = num / den
    total = float(np.sum(terms))
    tail = float(np.sum(terms[-max(1, N // 10):]))
    diverging = bool(total > ceiling and tail >= 0.01 * total)
    return FrostmanSum(total, diverging, N)


def hoffman_eta_max(delta: float) -> float:
    return (1.0 - math.sqrt(1.0 - delta * delta)) / delta


def hoffman_constants(delta: float, eta: float | str = "auto") -> HoffmanConstants:
    """Choose admissible Hoffman constants by the midpoint policy.

    With ``eta="auto"`` eta is half its admissible maximum; epsilon is
    always half of ``eta (delta - eta) / (1 - delta eta)``.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must lie in (0, 1)")
    eta_max = hoffman_eta_max(delta)
    if eta == "auto":
        eta_v = 0.5 * eta_max
    else:
        eta_v = float(eta)
        if not 0.0 < eta_v < eta_max:
            raise EtaOutOfRange(f"eta={eta_v} must lie in (0, {eta_max:.6g}) for delta={delta}")
    eps = 0.5 * eta_v * (delta - eta_v) / (1.0 - delta * eta_v)
    return HoffmanConstants(delta, eta_v, eps)
