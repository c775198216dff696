import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from onecomp.errors import DomainError, EtaOutOfRange, NotRadial, SpecError
from onecomp.geometry import pseudo_dist
from onecomp.sublevel import pseudo_dist_c
from onecomp.sequences import (
    ZeroSequence,
    blaschke_sum,
    consecutive_rho,
    consecutive_rhos,
    eta_star,
    frostman_sum,
    hoffman_constants,
    hoffman_eta_max,
    interp_delta_n,
    interpolation_constant,
    separation_constant,
    vhn_ratio,
)

GEO = ZeroSequence("geometric")
HYP = ZeroSequence("hyperbolic_orbit")
PAR = ZeroSequence("parabolic_orbit")
THIN = ZeroSequence("superexponential")
INTER = ZeroSequence("interleaved_thin")


def explicit(*pts):
    return ZeroSequence("explicit", {"points": [[complex(p).real, complex(p).imag] for p in pts]})


# -- generators ---------------------------------------------------------------


def test_parabolic_points_lie_on_circle_through_one():
    z = PAR.points(PAR.budget)
    assert np.max(np.abs(np.abs(z - 0.5) - 0.5)) <= 1e-14


def test_parabolic_closed_form():
    n = np.arange(1, 50)
    assert np.allclose(PAR.points(49), n / (n - 1j), rtol=0, atol=1e-15)


def test_hyperbolic_orbit_recurrence():
    # x_{j+1} is the preimage of x_j under (z - 1/2) / (1 - z/2)
    x = HYP.points(40).real
    inverse = (x[:-1] + 0.5) / (1 + 0.5 * x[:-1])
    assert np.max(np.abs(inverse - x[1:])) <= 1e-14


def test_superexponential_keeps_gaps_below_double_resolution():
    c = THIN.complements(30)
    assert c[-1].real == pytest.approx(30.0**-30, rel=1e-12)
    assert np.all(np.diff(c.real) < 0)


def test_budget_is_enforced():
    with pytest.raises(DomainError):
        GEO.complements(GEO.budget + 1)


def test_unknown_generator_and_bad_params():
    with pytest.raises(SpecError):
        ZeroSequence("nope")
    with pytest.raises(SpecError):
        ZeroSequence("power", {"p": 1.0})
    with pytest.raises(SpecError):
        ZeroSequence("explicit", {"points": [[1.0, 0.0]]})


def test_json_round_trip():
    for seq in (GEO, PAR, ZeroSequence("power", {"p": 3}, 50), explicit(0.1, -0.2j)):
        assert ZeroSequence.from_json(seq.to_json()) == seq


# -- Blaschke sums ------------------------------------------------------------


def test_geometric_blaschke_sum_and_tail():
    # sum (1 - |z_n|) = sum 2^-n = 1; the squared form stays below 2
    N = 40
    assert float(np.sum(GEO.one_minus_abs(N))) == pytest.approx(1 - 2.0**-N, abs=1e-15)
    bs = blaschke_sum(GEO, N)
    assert bs.value < 2.0 and bs.tail_bound <= 2 * 2.0**-N


def test_single_origin_zero_sum():
    assert blaschke_sum(explicit(0.0), 1).value == 1.0


def test_parabolic_squares_closed_form():
    N = 200
    n = np.arange(1, N + 1)
    assert blaschke_sum(PAR, N).value == pytest.approx(float(np.sum(1.0 / (n * n + 1.0))), rel=1e-13)


@given(st.integers(2, 300))
def test_blaschke_partial_sums_nondecreasing(N):
    assert blaschke_sum(PAR, N).value >= blaschke_sum(PAR, N - 1).value


# -- distances ----------------------------------------------------------------


def test_hyperbolic_consecutive_rho_exact():
    r = consecutive_rhos(HYP, 31)
    assert np.max(np.abs(r - 0.5)) <= 1e-13


def test_parabolic_consecutive_rho_exact():
    r = consecutive_rhos(PAR, PAR.budget)
    assert np.max(np.abs(r - 2**-0.5)) <= 1e-13


def test_geometric_consecutive_rho_identity():
    for n in range(1, 40):
        assert consecutive_rho(GEO, n) == pytest.approx(1 / (3 - 2.0**-n), abs=1e-15)


def test_separation_constants():
    assert separation_constant(HYP, 20) == pytest.approx(0.5, abs=1e-13)
    assert separation_constant(explicit(0.3, 0.3), 2) == 0.0
    # consecutive distances decrease toward 1/3, so the last pair is the closest
    assert separation_constant(GEO, 20) == pytest.approx(1 / (3 - 2.0**-19), abs=1e-15)


def test_separation_is_a_true_minimum():
    seq = ZeroSequence("power", {"p": 1.5}, 60)
    c = seq.complements(60)
    d = pseudo_dist_c(c[:, None], c[None, :])
    off = d[~np.eye(60, dtype=bool)]
    assert separation_constant(seq, 60) == pytest.approx(off.min(), rel=1e-12)


def test_vhn_ratio_examples():
    assert vhn_ratio(GEO, 100).sup == 0.5
    tr = vhn_ratio(ZeroSequence("power", {"p": 2}), 100)
    assert tr.sup == pytest.approx((99 / 100) ** 2, abs=1e-12)
    assert tr.approaches_one
    hyp = vhn_ratio(HYP, 30)
    assert hyp.last == pytest.approx(1 / 3, abs=1e-12)


def test_vhn_rejects_non_radial():
    with pytest.raises(NotRadial):
        vhn_ratio(PAR, 10)
    with pytest.raises(NotRadial):
        vhn_ratio(INTER, 10)


def test_eta_star_examples():
    assert eta_star(HYP, 20) == pytest.approx(0.5, abs=1e-13)
    a, b = 0.2 + 0.1j, -0.4j
    assert eta_star(explicit(a, b), 2) == pytest.approx(pseudo_dist(a, b), abs=1e-15)
    assert eta_star(INTER, 16) == pytest.approx(1 / (3 - 2 * 2.0**-2), abs=1e-12)


def test_interleaved_pairs_tend_to_one_third():
    for k in range(2, 40):
        rho = float(INTER.rho(2 * k - 3, 2 * k - 2))
        assert rho == pytest.approx(1 / (3 - 2 * k ** -float(k)), abs=1e-6)


# -- products and thinness ----------------------------------------------------


def test_delta_n_empty_product():
    assert interp_delta_n(explicit(0.3), 1, 1).value == 1.0


def test_interleaved_is_not_thin():
    for k in range(3, 20):
        d = interp_delta_n(INTER, 2 * k - 2, 60)
        assert d.value <= 1 / (3 - 2 * k ** -float(k)) + 1e-12


def test_superexponential_delta_trends_to_one():
    # the nearest neighbour dominates: 1 - delta_n is of order 1/n
    ns = (5, 10, 20, 40, 60)
    vals = [interp_delta_n(THIN, n, 64).value for n in ns]
    assert all(np.diff(vals) > 0) and vals[-1] > 0.97
    assert all((1 - v) * n < 1.5 for v, n in zip(vals, ns))


@given(st.integers(1, 20), st.integers(0, 20))
def test_delta_n_nonincreasing_in_truncation(n, extra):
    a = interp_delta_n(PAR, n, n + extra)
    b = interp_delta_n(PAR, n, n + extra + 5)
    assert 0.0 <= b.value <= a.value <= 1.0
    assert b.lower <= b.value


def test_interpolation_constant_matches_min_delta():
    N = 25
    direct = min(interp_delta_n(GEO, n, N).value for n in range(1, N + 1))
    assert interpolation_constant(GEO, N) == pytest.approx(direct, rel=1e-12)


def test_interpolation_constant_equals_derivative_form():
    # (1 - |z_n|^2) |B'(z_n)| for a finite product equals the product of distances
    z = np.array([0.3, -0.5j, 0.6 + 0.2j, -0.7])
    best = math.inf
    for n, a in enumerate(z):
        others = np.delete(z, n)
        dB = np.prod((a - others) / (1 - np.conj(others) * a)) / (1 - abs(a) ** 2)
        best = min(best, (1 - abs(a) ** 2) * abs(dB))
    assert interpolation_constant(explicit(*z), 4) == pytest.approx(best, rel=1e-12)


# -- Frostman sums ------------------------------------------------------------


def test_geometric_frostman_sums():
    # (1 - z_n^2) / (1 - z_n) = 1 + z_n, so the sum at 1 grows like 2N
    at_one = frostman_sum(GEO, 1.0, 200)
    assert at_one.value == pytest.approx(float(np.sum(1 + GEO.points(200).real)), rel=1e-12)
    assert at_one.diverging
    at_minus = frostman_sum(GEO, -1.0, 200)
    assert not at_minus.diverging and at_minus.value < 2


def test_single_zero_frostman_sum():
    assert frostman_sum(explicit(0.0), 1j, 1).value == 1.0


# -- Hoffman constants --------------------------------------------------------


def test_hoffman_eta_max_value():
    assert hoffman_eta_max(0.9) == pytest.approx((1 - math.sqrt(0.19)) / 0.9, abs=1e-15)
    assert hoffman_eta_max(0.9) == pytest.approx(0.62679, abs=1e-5)
    assert hoffman_eta_max(1 - 1e-12) > 0.999


def test_hoffman_given_eta():
    h = hoffman_constants(0.9, 0.5)
    assert h.eta == 0.5
    assert h.epsilon == pytest.approx(0.5 * 0.5 * 0.4 / 0.55, abs=1e-15)


def test_hoffman_auto_is_midpoint():
    h = hoffman_constants(0.8)
    assert h.eta == pytest.approx(0.5 * hoffman_eta_max(0.8))


def test_hoffman_rejects_large_eta():
    with pytest.raises(EtaOutOfRange):
        hoffman_constants(0.9, 0.7)
    with pytest.raises(DomainError):
        hoffman_constants(1.0)


@given(st.floats(0.01, 0.999))
def test_hoffman_invariants(delta):
    h = hoffman_constants(delta)
    assert 0 < h.eta < hoffman_eta_max(delta)
    assert 0 < h.epsilon < h.eta * (delta - h.eta) / (1 - delta * h.eta)
