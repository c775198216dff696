"""Inner functions on the unit disk as immutable expression trees.

Leaves are finite Blaschke products, Blaschke products over a
:class:`~onecomp.sequences.ZeroSequence` (optionally cut at a fixed
number of terms) and singular inner functions with finitely many
atoms.  Nodes are products, compositions and Frostman shifts.

Evaluation works in log-polar form (``log|u|`` and ``arg u``) so that
values such as ``|S(0.999)| = e**-1999`` remain usable, and every
result carries a certified bound for the error caused by truncating
infinite products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DomainError, SpectrumHit, TruncationBudgetExceeded, Unsupported
from .sequences import ZeroSequence

__all__ = [
    "InnerSpec",
    "FiniteBlaschke",
    "InfiniteBlaschke",
    "SingularAtomic",
    "Product",
    "Compose",
    "FrostmanShift",
    "EvalResult",
    "Evaluator",
    "atomic",
    "blaschke",
    "multiply",
    "compose",
    "frostman_shift",
    "evaluate",
    "eval_log_modulus",
    "boundary_derivatives",
    "zeros",
    "preimages",
    "leaves",
    "has_unterminated",
    "required_radius",
]

SPECTRUM_CLEARANCE = 1e-9
_BLOCK = 1 << 20  # points x zeros per evaluation block
_ZERO_BLOCK = 256


class InnerSpec:
    """Base class of all inner-function nodes."""

    def __mul__(self, other: "InnerSpec") -> "InnerSpec":
        return multiply([self, other])

    def __call__(self, z, tol: float = 1e-10):
        return evaluate(self, z, tol).value


@dataclass(frozen=True)
class FiniteBlaschke(InnerSpec):
    """``factor * prod (z - a) / (1 - conj(a) z)``; multiplicity by repetition."""

    zeros: tuple[complex, ...] = ()
    factor: complex = 1.0 + 0j

    def __post_init__(self):
        zs = tuple(complex(a) for a in self.zeros)
        for a in zs:
            if not abs(a) < 1.0:
                raise DomainError(f"Blaschke zero {a} is not inside the unit disk")
        lam = complex(self.factor)
        if abs(abs(lam) - 1.0) > 1e-12:
            raise DomainError("unimodular factor must have modulus 1")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "factor", lam)

    @property
    def degree(self) -> int:
        return len(self.zeros)


@dataclass(frozen=True)
class InfiniteBlaschke(InnerSpec):
    """Blaschke product over a zero sequence, factors positive at the origin.

    With ``terms=None`` the product is infinite and evaluated through a
    certified truncation; with ``terms=N`` it is the exact finite
    product of the first ``N`` factors.
    """

    sequence: ZeroSequence
    terms: int | None = None

    def __post_init__(self):
        if self.terms is not None:
            if self.terms < 1 or self.terms > self.sequence.budget:
                raise DomainError("terms must lie between 1 and the sequence budget")
        elif self.sequence.length is not None:
            object.__setattr__(self, "terms", self.sequence.length)

    @property
    def finite(self) -> bool:
        return self.terms is not None


@dataclass(frozen=True)
class SingularAtomic(InnerSpec):
    """``exp(-sum mass_k (zeta_k + z) / (zeta_k - z))`` for boundary atoms ``zeta_k``."""

    atoms: tuple[tuple[complex, float], ...]

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("a singular inner function needs at least one atom")
        norm = []
        for point, mass in self.atoms:
            p = complex(point)
            if abs(abs(p) - 1.0) > 1e-12:
                raise DomainError(f"atom {p} is not on the unit circle")
            if not float(mass) > 0.0:
                raise DomainError("singular masses must be strictly positive")
            norm.append((p / abs(p), float(mass)))
        object.__setattr__(self, "atoms", tuple(norm))


@dataclass(frozen=True)
class Product(InnerSpec):
    factors: tuple[InnerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise DomainError("empty product")


@dataclass(frozen=True)
class Compose(InnerSpec):
    """``outer(inner(z))``."""

    outer: InnerSpec
    inner: InnerSpec


@dataclass(frozen=True)
class FrostmanShift(InnerSpec):
    """``(a - base(z)) / (1 - conj(a) base(z))``."""

    base: InnerSpec
    a: complex

    def __post_init__(self):
        a = complex(self.a)
        if not abs(a) < 1.0:
            raise DomainError("Frostman parameter must lie inside the unit disk")
        object.__setattr__(self, "a", a)


def atomic(point: complex = 1.0, mass: float = 1.0) -> SingularAtomic:
    """The atomic inner function; ``atomic()`` is ``exp(-(1+z)/(1-z))``."""
    return SingularAtomic(((complex(point), mass),))


def blaschke(*zeros: complex, factor: complex = 1.0) -> FiniteBlaschke:
    return FiniteBlaschke(tuple(zeros), factor)


def multiply(factors) -> InnerSpec:
    factors = list(factors)
    if not factors:
        raise DomainError("cannot multiply an empty list")
    if len(factors) == 1:
        return factors[0]
    flat = []
    for f in factors:
        flat.extend(f.factors if isinstance(f, Product) else [f])
    return Product(tuple(flat))


def compose(outer: InnerSpec, inner: InnerSpec) -> InnerSpec:
    return Compose(outer, inner)


def frostman_shift(u: InnerSpec, a) -> InnerSpec:
    return FrostmanShift(u, complex(a))


def leaves(u: InnerSpec) -> Iterator[InnerSpec]:
    if isinstance(u, Product):
        for f in u.factors:
            yield from leaves(f)
    elif isinstance(u, Compose):
        yield from leaves(u.outer)
        yield from leaves(u.inner)
    elif isinstance(u, FrostmanShift):
        yield from leaves(u.base)
    else:
        yield u


def has_unterminated(u: InnerSpec) -> bool:
    return any(isinstance(leaf, InfiniteBlaschke) and not leaf.finite for leaf in leaves(u))


# --------------------------------------------------------------------------
# evaluation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalResult:
    value: complex | np.ndarray
    truncation_bound: float | np.ndarray


@dataclass
class _Val:
    lm: np.ndarray  # log modulus
    arg: np.ndarray
    abs_b: np.ndarray  # bound on |computed - true|
    log_b: np.ndarray  # bound on |log|computed| - log|true||
    # enclosure of -log|u| over a whole cell (only when a cell is given)
    p_lo: np.ndarray | None = None
    p_hi: np.ndarray | None = None

    def value(self) -> np.ndarray:
        with np.errstate(invalid="ignore", over="ignore"):
            v = np.exp(self.lm + 1j * self.arg)
        return np.where(np.isneginf(self.lm), 0.0, v)

    def complement(self) -> np.ndarray:
        with np.errstate(invalid="ignore", over="ignore"):
            c = -np.expm1(self.lm + 1j * self.arg)
        return np.where(np.isneginf(self.lm), 1.0 + 0j, c)


@dataclass(frozen=True)
class _Cell:
    """A pseudohyperbolic disk of radius ``rho`` (``beta = 1 - rho``) around each point."""

    rho: np.ndarray
    beta: np.ndarray

    def widen(self, delta: np.ndarray) -> "_Cell":
        # strong triangle inequality: radius (rho + delta) / (1 + rho delta)
        rho = (self.rho + delta) / (1.0 + self.rho * delta)
        beta = self.beta * (1.0 - delta) / (1.0 + self.rho * delta)
        return _Cell(np.minimum(rho, 1.0), np.maximum(beta, 0.0))


def _exact(shape) -> tuple[np.ndarray, np.ndarray]:
    return np.zeros(shape), np.zeros(shape)


def _derived_log_bound(lm, abs_b):
    mod = np.exp(lm)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(abs_b > 0, abs_b / mod, 0.0)
        out = np.where(ratio < 1.0, -np.log1p(-np.minimum(ratio, 0.999999999)), np.inf)
    return np.where(abs_b > 0, out, 0.0)


def _one_minus_abs(c: np.ndarray) -> np.ndarray:
    om2 = 2.0 * c.real - np.abs(c) ** 2
    return om2 / (1.0 + np.abs(1.0 - c))


def _factor_bounds(alpha, d, cell: _Cell):
    """Range of ``-log rho(w, a)`` for ``w`` in the cell, given ``d = rho(center, a)``.

    ``alpha = 1 - d`` is passed separately because it carries the
    precision when ``d`` is close to 1.
    """
    beta = cell.beta
    q = alpha + beta - alpha * beta  # 1 - d rho
    with np.errstate(divide="ignore", invalid="ignore"):
        hi = np.where(beta > alpha, -np.log1p(-np.minimum(alpha * (2.0 - beta) / q, 1.0)), np.inf)
        lo = -np.log1p(-alpha * beta / (2.0 - q))
    return lo, hi


def _factor_sum(ca: np.ndarray, c: np.ndarray, normalize: bool, cell: _Cell | None = None):
    """Sum of log-moduli and arguments of ``(z - a)/(1 - conj(a) z)`` over zeros ``a``.

    ``ca = 1 - a`` and ``c = 1 - z``; normalized factors are multiplied
    by ``-|a|/a`` (factor ``z`` for ``a = 0``).  With a cell, also
    returns the enclosure of ``-log|product|`` over the cell.
    """
    lm = np.zeros(c.shape)
    arg = np.zeros(c.shape)
    p_lo = np.zeros(c.shape) if cell is not None else None
    p_hi = np.zeros(c.shape) if cell is not None else None
    if ca.size == 0:
        return lm, arg, p_lo, p_hi
    flat = c.reshape(-1)
    lm_f = lm.reshape(-1)
    arg_f = arg.reshape(-1)
    om_a = 2.0 * ca.real - np.abs(ca) ** 2
    if cell is not None:
        om_c = (2.0 * flat.real - np.abs(flat) ** 2)
        rho_f, beta_f = cell.rho.reshape(-1), cell.beta.reshape(-1)
        lo_f, hi_f = p_lo.reshape(-1), p_hi.reshape(-1)
    # Fixed zero blocks keep the summation order independent of how many
    # points are evaluated at once, so chunked or threaded runs agree bitwise.
    rows = max(1, _BLOCK // _ZERO_BLOCK)
    for k in range(0, ca.size, _ZERO_BLOCK):
        cak = ca[k:k + _ZERO_BLOCK][None, :]
        for i in range(0, flat.size, rows):
            sl = slice(i, i + rows)
            ci = flat[sl, None]
            num = cak - ci
            den = np.conj(cak) + ci - np.conj(cak) * ci
            an, ad = np.abs(num), np.abs(den)
            with np.errstate(divide="ignore"):
                lm_f[sl] += np.sum(np.log(an), axis=1) - np.sum(np.log(ad), axis=1)
            arg_f[sl] += np.sum(np.angle(num), axis=1) - np.sum(np.angle(den), axis=1)
            if cell is not None:
                d = an / ad
                one_minus_d2 = np.maximum(om_c[sl, None] * om_a[None, k:k + _ZERO_BLOCK] / ad**2, 0.0)
                alpha = np.minimum(one_minus_d2 / (1.0 + d), 1.0)
                lo, hi = _factor_bounds(alpha, d, _Cell(rho_f[sl, None], beta_f[sl, None]))
                lo_f[sl] += np.sum(lo, axis=1)
                hi_f[sl] += np.sum(hi, axis=1)
    if normalize:
        a = 1.0 - ca
        nz = a != 0
        arg += float(np.sum(np.angle(-np.conj(a[nz]))))
    return lm, arg, p_lo, p_hi


def _pseudo_error(w: np.ndarray, abs_b: np.ndarray) -> np.ndarray:
    """Bound on the pseudohyperbolic distance between ``w`` and a point within ``abs_b`` of it."""
    aw = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = abs_b / (1.0 - aw * np.minimum(aw + abs_b, 1.0))
    return np.where(abs_b > 0, np.where(np.isfinite(d), np.minimum(d, 1.0), 1.0), 0.0)


class Evaluator:
    """Evaluates ``u`` on points with ``|z| <= radius`` using a fixed truncation plan.

    The plan assigns a number of terms to every unterminated infinite
    Blaschke leaf so that its own tail contributes at most ``leaf_tol``
    anywhere in the disk of the given radius.
    """

    def __init__(self, u: InnerSpec, radius: float, leaf_tol: float):
        if not 0.0 <= radius < 1.0:
            raise DomainError("evaluation radius must lie in [0, 1)")
        self.u = u
        self.radius = radius
        self.leaf_tol = leaf_tol
        self.plan: dict[InfiniteBlaschke, int] = {}
        self._make_plan(u, radius)

    # -- planning ---------------------------------------------------------

    def _make_plan(self, node: InnerSpec, R: float) -> None:
        if isinstance(node, InfiniteBlaschke):
            if not node.finite:
                n = _terms_for(node.sequence, R, self.leaf_tol)
                self.plan[node] = max(self.plan.get(node, 0), n)
        elif isinstance(node, Product):
            for f in node.factors:
                self._make_plan(f, R)
        elif isinstance(node, FrostmanShift):
            self._make_plan(node.base, R)
        elif isinstance(node, Compose):
            self._make_plan(node.inner, R)
            sub = Evaluator(node.inner, 0.0, self.leaf_tol)
            v0 = sub._ev(node.inner, np.zeros(1, complex), np.ones(1, complex))
            m0 = min(1.0, float(np.exp(v0.lm[0])) + float(v0.abs_b[0]))
            R_out = (R + m0) / (1.0 + R * m0)
            if not R_out < 1.0:
                raise TruncationBudgetExceeded("inner function image reaches the unit circle")
            self._make_plan(node.outer, R_out)

    def terms(self) -> dict[str, int]:
        return {f"{k.sequence.generator}": v for k, v in self.plan.items()}

    # -- evaluation -------------------------------------------------------

    def evaluate(self, z, c=None) -> _Val:
        z = np.asarray(z, dtype=complex)
        c = 1.0 - z if c is None else np.asarray(c, dtype=complex)
        if z.size and np.max(np.abs(z)) > self.radius * (1 + 1e-15) + 1e-300:
            raise DomainError("query point outside the planned evaluation radius")
        return self._ev(self.u, z, c)

    def enclose(self, z, c, rho, beta) -> _Val:
        """Evaluate at cell centers and enclose ``-log|u|`` over each cell.

        A cell is the pseudohyperbolic disk of radius ``rho`` around its
        center (``beta = 1 - rho`` is passed for precision).  The
        enclosure uses the strong triangle inequality for every Blaschke
        factor, Harnack's inequality for singular factors and
        Schwarz-Pick to push cells through compositions; truncation
        tails are included.
        """
        z = np.asarray(z, dtype=complex)
        c = np.asarray(c, dtype=complex)
        if z.size and np.max(np.abs(z)) > self.radius * (1 + 1e-15) + 1e-300:
            raise DomainError("query point outside the planned evaluation radius")
        cell = _Cell(np.asarray(rho, dtype=float), np.asarray(beta, dtype=float))
        return self._ev(self.u, z, c, cell)

    def _ev(self, node: InnerSpec, z: np.ndarray, c: np.ndarray, cell: _Cell | None = None) -> _Val:
        if isinstance(node, FiniteBlaschke):
            ca = 1.0 - np.array(node.zeros, dtype=complex)
            lm, arg, lo, hi = _factor_sum(ca, c, False, cell)
            arg = arg + np.angle(node.factor)
            return _Val(lm, arg, *_exact(z.shape), lo, hi)
        if isinstance(node, InfiniteBlaschke):
            N = node.terms if node.finite else self.plan[node]
            ca = node.sequence.complements(N)
            lm, arg, lo, hi = _factor_sum(ca, c, True, cell)
            if node.finite:
                return _Val(lm, arg, *_exact(z.shape), lo, hi)
            tail = node.sequence.tail_gap_bound(N)
            om = _one_minus_abs(c)
            with np.errstate(divide="ignore"):
                s = (2.0 - om) / om * tail
            with np.errstate(over="ignore"):
                abs_b = np.where(s < 50, np.expm1(np.minimum(s, 50)), np.inf)
            s_safe = np.minimum(s, 0.5)
            log_b = np.where(s < 0.5, s_safe / (1.0 - s_safe), np.inf)
            if cell is not None:
                # tail factors only shrink |u|; on the cell 1 - |w| >= (1 - |z|) beta / (1 + |z| rho)
                az = 1.0 - om
                with np.errstate(divide="ignore", invalid="ignore"):
                    s_cell = 2.0 * (1.0 + az * cell.rho) / (om * cell.beta) * tail
                s_cell = np.where(np.isfinite(s_cell), s_cell, np.inf)
                s_c = np.minimum(s_cell, 0.5)
                hi = hi + np.where(s_cell < 0.5, s_c / (1.0 - s_c), np.inf)
            return _Val(lm, arg, abs_b, log_b, lo, hi)
        if isinstance(node, SingularAtomic):
            g = np.zeros(z.shape, dtype=complex)
            for zeta, mass in node.atoms:
                cz = 1.0 - zeta
                with np.errstate(divide="ignore", invalid="ignore"):
                    g += mass * (2.0 - cz - c) / (c - cz)
            lo = hi = None
            if cell is not None:
                # Harnack for the positive harmonic function -log|u|
                h = np.maximum(g.real, 0.0)
                b = cell.beta
                with np.errstate(divide="ignore", invalid="ignore"):
                    lo = h * b / (2.0 - b)
                    hi = np.where(b > 0, h * (2.0 - b) / b, np.inf)
                hi = np.where(h == 0, 0.0, hi)
            return _Val(-g.real, -g.imag, *_exact(z.shape), lo, hi)
        if isinstance(node, Product):
            vals = [self._ev(f, z, c, cell) for f in node.factors]
            lm = sum(v.lm for v in vals)
            arg = sum(v.arg for v in vals)
            abs_b = np.prod([1.0 + v.abs_b for v in vals], axis=0) - 1.0
            log_b = sum(v.log_b for v in vals)
            lo = sum(v.p_lo for v in vals) if cell is not None else None
            hi = sum(v.p_hi for v in vals) if cell is not None else None
            return _Val(lm, arg, abs_b, log_b, lo, hi)
        if isinstance(node, Compose):
            vin = self._ev(node.inner, z, c)
            w, cw = vin.value(), vin.complement()
            inner_cell = cell.widen(_pseudo_error(w, vin.abs_b)) if cell is not None else None
            vout = self._ev(node.outer, w, cw, inner_cell)
            reach = np.minimum(np.abs(w) + vin.abs_b, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                lip = 1.0 / (1.0 - reach * reach)
                prop = np.where(vin.abs_b > 0, vin.abs_b * lip, 0.0)
            abs_b = np.minimum(vout.abs_b + prop, 2.0)
            abs_b = np.where(np.isfinite(prop), abs_b, 2.0)
            log_b = vout.log_b + _derived_log_bound(vout.lm, prop)
            return _Val(vout.lm, vout.arg, abs_b, log_b, vout.p_lo, vout.p_hi)
        if isinstance(node, FrostmanShift):
            vb = self._ev(node.base, z, c)
            w, cw = vb.value(), vb.complement()
            ca = np.array([1.0 - node.a])
            base_cell = cell.widen(_pseudo_error(w, vb.abs_b)) if cell is not None else None
            lm, arg, lo, hi = _factor_sum(ca, cw, False, base_cell)
            arg = arg + np.pi
            a_abs = abs(node.a)
            reach = np.minimum(np.abs(w) + vb.abs_b, 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                prop = np.where(vb.abs_b > 0, vb.abs_b * (1 - a_abs**2) / (1 - a_abs * reach) ** 2, 0.0)
            return _Val(lm, arg, prop, _derived_log_bound(lm, prop), lo, hi)
        raise Unsupported(f"unknown node type {type(node).__name__}")


def _terms_for(seq: ZeroSequence, R: float, tol: float) -> int:
    """Smallest ``N`` whose certified tail on ``|z| <= R`` is within ``tol``."""
    if seq.length is not None:
        return seq.length
    amp = (1.0 + R) / (1.0 - R)
    target = min(math.log1p(tol), tol / (1.0 + tol))
    if amp * seq.tail_gap_bound(seq.budget) > target:
        raise TruncationBudgetExceeded(
            f"{seq.generator}: tail bound at radius {R:.6g} cannot reach {tol:.3g} "
            f"within budget {seq.budget}"
        )
    lo, hi = 1, 1
    while amp * seq.tail_gap_bound(hi) > target:
        lo, hi = hi, min(hi * 2, seq.budget)
    while lo < hi:
        mid = (lo + hi) // 2
        if amp * seq.tail_gap_bound(mid) > target:
            lo = mid + 1
        else:
            hi = mid
    return hi


def _count_unterminated(u: InnerSpec) -> int:
    return sum(1 for leaf in leaves(u) if isinstance(leaf, InfiniteBlaschke) and not leaf.finite)


def _run_with_tol(u: InnerSpec, z: np.ndarray, c: np.ndarray, tol: float, which: str) -> _Val:
    if tol <= 0:
        raise DomainError("tol must be positive")
    radius = float(np.max(np.abs(z))) if z.size else 0.0
    if radius >= 1.0:
        raise DomainError("evaluation points must lie inside the unit disk")
    leaf_tol = tol / max(1, _count_unterminated(u))
    for _ in range(16):
        ev = Evaluator(u, radius, leaf_tol)
        val = ev._ev(u, z, c)
        worst = val.abs_b if which == "abs" else val.log_b[val.lm > -np.inf]
        if worst.size == 0 or float(np.max(worst)) <= tol:
            return val
        if not _count_unterminated(u):
            break
        leaf_tol /= 16.0
    raise TruncationBudgetExceeded(f"could not certify tolerance {tol:g}")


def _points(z):
    scalar = np.ndim(z) == 0
    if hasattr(z, "complement") and not isinstance(z, np.ndarray):
        zz = np.array([complex(z)])
        cc = np.array([z.complement])
    else:
        zz = np.atleast_1d(np.asarray(z, dtype=complex))
        cc = 1.0 - zz
    return scalar, zz, cc


def evaluate(u: InnerSpec, z, tol: float = 1e-10) -> EvalResult:
    """Evaluate ``u`` at interior point(s) with a certified truncation bound ``<= tol``."""
    scalar, zz, cc = _points(z)
    val = _run_with_tol(u, zz, cc, tol, "abs")
    v = val.value()
    if scalar:
        return EvalResult(complex(v[0]), float(val.abs_b[0]))
    return EvalResult(v, val.abs_b)


def eval_log_modulus(u: InnerSpec, z, tol: float = 1e-10):
    """``log|u(z)|`` with certified error ``<= tol`` in log scale."""
    scalar, zz, cc = _points(z)
    val = _run_with_tol(u, zz, cc, tol, "log")
    if scalar:
        return float(val.lm[0])
    return val.lm


# --------------------------------------------------------------------------
# boundary derivatives
# --------------------------------------------------------------------------


def _finite_zeros_of(node) -> tuple[np.ndarray, complex, bool]:
    if isinstance(node, FiniteBlaschke):
        return np.array(node.zeros, dtype=complex), node.factor, False
    if not node.finite:
        raise Unsupported("boundary derivatives are not available for infinite Blaschke products")
    return node.sequence.points(node.terms), 1.0 + 0j, True


def boundary_derivatives(u: InnerSpec, zeta) -> tuple[complex, complex, complex]:
    """``(u(zeta), u'(zeta), u''(zeta))`` at a boundary point off the spectrum."""
    z = complex(zeta)
    if abs(abs(z) - 1.0) > 1e-9:
        raise DomainError("boundary_derivatives needs a point on the unit circle")
    return _bd(u, z / abs(z))


def _bd(node: InnerSpec, z: complex) -> tuple[complex, complex, complex]:
    if isinstance(node, (FiniteBlaschke, InfiniteBlaschke)):
        a, lam, normalized = _finite_zeros_of(node)
        if a.size == 0:
            return lam, 0j, 0j
        zma = z - a
        den = 1.0 - np.conj(a) * z
        val = lam * np.prod(zma / den)
        if normalized:
            nz = a != 0
            val *= np.prod(-np.abs(a[nz]) / a[nz])
        val /= abs(val)
        L1 = np.sum((1.0 - np.abs(a) ** 2) / (zma * den))
        L2 = np.sum(-1.0 / zma**2 + np.conj(a) ** 2 / den**2)
        return complex(val), complex(val * L1), complex(val * (L2 + L1 * L1))
    if isinstance(node, SingularAtomic):
        g = 0j
        L1 = 0j
        L2 = 0j
        for zeta, mass in node.atoms:
            d = zeta - z
            if abs(d) < SPECTRUM_CLEARANCE:
                raise SpectrumHit(f"{z} is within {SPECTRUM_CLEARANCE} of the atom {zeta}")
            g += mass * (zeta + z) / d
            L1 -= 2.0 * mass * zeta / d**2
            L2 -= 4.0 * mass * zeta / d**3
        val = np.exp(-g)
        val /= abs(val)
        return complex(val), complex(val * L1), complex(val * (L2 + L1 * L1))
    if isinstance(node, Product):
        u0, u1, u2 = 1.0 + 0j, 0j, 0j
        for f in node.factors:
            f0, f1, f2 = _bd(f, z)
            u0, u1, u2 = u0 * f0, u1 * f0 + u0 * f1, u2 * f0 + 2.0 * u1 * f1 + u0 * f2
        return u0, u1, u2
    if isinstance(node, Compose):
        w0, w1, w2 = _bd(node.inner, z)
        if abs(abs(w0) - 1.0) > 1e-9:
            raise Unsupported("inner function does not map the point to the circle")
        o0, o1, o2 = _bd(node.outer, w0 / abs(w0))
        return o0, o1 * w1, o2 * w1 * w1 + o1 * w2
    if isinstance(node, FrostmanShift):
        w0, w1, w2 = _bd(node.base, z)
        a = node.a
        q = 1.0 - np.conj(a) * w0
        t0 = (a - w0) / q
        t1 = (abs(a) ** 2 - 1.0) / q**2
        t2 = 2.0 * np.conj(a) * (abs(a) ** 2 - 1.0) / q**3
        t0 /= abs(t0)
        return complex(t0), complex(t1 * w1), complex(t2 * w1 * w1 + t1 * w2)
    raise Unsupported(f"unknown node type {type(node).__name__}")


# --------------------------------------------------------------------------
# zeros and preimages
# --------------------------------------------------------------------------


def _blaschke_poly(zeros: np.ndarray, lam: complex, w: complex) -> np.ndarray:
    """Coefficients of ``lam prod (z - a) - w prod (1 - conj(a) z)``."""
    num = np.poly(zeros) if zeros.size else np.array([1.0 + 0j])
    den = np.array([1.0 + 0j])
    for a in zeros:
        den = np.convolve(den, np.array([-np.conj(a), 1.0]))
    return lam * num - w * den


def _solve_finite(zeros: np.ndarray, lam: complex, w: complex) -> np.ndarray:
    if zeros.size == 0:
        return np.zeros(0, complex)
    coeffs = _blaschke_poly(zeros, lam, w)
    roots = np.roots(coeffs)
    # Newton polish on the rational equation
    with np.errstate(divide="ignore", invalid="ignore"):
        return _polish(roots, zeros, lam, w)


def _polish(roots, zeros, lam, w):
    for _ in range(3):
        B = lam * np.prod((roots[:, None] - zeros[None, :]) / (1 - np.conj(zeros)[None, :] * roots[:, None]), axis=1)
        L1 = np.sum((1 - np.abs(zeros) ** 2)[None, :] /
                    ((roots[:, None] - zeros[None, :]) * (1 - np.conj(zeros)[None, :] * roots[:, None])), axis=1)
        dB = B * L1
        ok = np.isfinite(dB) & (np.abs(dB) > 0)
        roots = np.where(ok, roots - (B - w) / np.where(ok, dB, 1.0), roots)
    return roots


def preimages(u: InnerSpec, w: complex, radius: float):
    """Points ``|z| <= radius`` with ``u(z) = w``, or ``None`` if unsupported."""
    w = complex(w)
    return _pre(u, w, radius)


def _pre(node: InnerSpec, w: complex, radius: float):
    if isinstance(node, FiniteBlaschke):
        r = _solve_finite(np.array(node.zeros, dtype=complex), node.factor, w)
        return r[np.abs(r) <= radius]
    if isinstance(node, InfiniteBlaschke):
        if w != 0:
            if node.finite:
                pts = node.sequence.points(node.terms)
                nz = pts != 0
                lam = complex(np.prod(-np.abs(pts[nz]) / pts[nz]))
                r = _solve_finite(pts, lam, w)
                return r[np.abs(r) <= radius]
            return None
        N = node.terms if node.finite else node.sequence.budget
        pts = node.sequence.points(N)
        om = node.sequence.one_minus_abs(N)
        return pts[om >= 1.0 - radius]
    if isinstance(node, SingularAtomic):
        if w == 0:
            return np.zeros(0, complex)
        if len(node.atoms) != 1:
            return None
        zeta, mass = node.atoms[0]
        base = -np.log(w) / mass
        step = 2.0 * np.pi / mass
        out = []
        for sign in (1, -1):
            k = 0 if sign == 1 else 1
            while True:
                q = base + sign * 1j * step * k
                z = zeta * (q - 1.0) / (q + 1.0)
                if abs(z) > radius:
                    break
                out.append(z)
                k += 1
        return np.array(out, dtype=complex)
    if isinstance(node, Product):
        if w != 0:
            return None
        parts = [_pre(f, 0j, radius) for f in node.factors]
        if any(p is None for p in parts):
            return None
        return np.concatenate(parts) if parts else np.zeros(0, complex)
    if isinstance(node, FrostmanShift):
        a = node.a
        return _pre(node.base, (a - w) / (1.0 - np.conj(a) * w), radius)
    if isinstance(node, Compose):
        v0 = evaluate(node.inner, 0.0, 1e-12)
        m0 = min(1.0, abs(v0.value) + v0.truncation_bound)
        r_out = (radius + m0) / (1.0 + radius * m0)
        mids = _pre(node.outer, w, r_out)
        if mids is None:
            return None
        parts = []
        for p in mids:
            got = _pre(node.inner, complex(p), radius)
            if got is None:
                return None
            parts.append(got)
        return np.concatenate(parts) if parts else np.zeros(0, complex)
    raise Unsupported(f"unknown node type {type(node).__name__}")


def zeros(u: InnerSpec, radius: float):
    """Zeros of ``u`` in ``|z| <= radius`` (``None`` when they cannot be enumerated)."""
    return preimages(u, 0j, radius)


def required_radius(u: InnerSpec) -> float:
    """Largest modulus among explicitly listed zeros (finite leaves of products)."""
    if isinstance(u, FiniteBlaschke):
        return max((abs(a) for a in u.zeros), default=0.0)
    if isinstance(u, InfiniteBlaschke) and u.finite:
        om = u.sequence.one_minus_abs(u.terms)
        return float(1.0 - np.min(om))
    if isinstance(u, Product):
        return max(required_radius(f) for f in u.factors)
    return 0.0
