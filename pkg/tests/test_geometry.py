import math

import numpy as np
import pytest
from conftest import disk_points
from hypothesis import given, strategies as st

from onecomp.errors import DomainError
from onecomp.geometry import (
    BoundaryPoint,
    DiskPoint,
    EuclideanDisk,
    StolzAngle,
    horodisk,
    in_stolz,
    mobius,
    pseudo_disk_to_euclidean,
    pseudo_dist,
    rho_one_minus,
)
from onecomp.inner import atomic, eval_log_modulus


# oracle: trivial, distance from the origin is the modulus
def test_distance_from_origin_is_modulus():
    assert pseudo_dist(0.0, 0.3 + 0.4j) == pytest.approx(0.5, abs=1e-15)


# oracle: derived, (1/4) / (1 - 3/8)
def test_distance_half_three_quarters():
    assert pseudo_dist(0.5, 0.75) == pytest.approx(0.4, abs=1e-15)
    assert rho_one_minus(0.5, 0.25) == pytest.approx(0.4, abs=1e-15)


# oracle: published value for the hyperbolic orbit x_1 = 1/2, x_2 = 4/5
def test_hyperbolic_orbit_pair_is_half():
    assert pseudo_dist(0.5, 0.8) == pytest.approx(0.5, abs=1e-15)


def test_rho_one_minus_equal_gaps_is_zero():
    assert rho_one_minus(0.3, 0.3) == 0.0


@pytest.mark.parametrize("n", [2, 5, 10, 40])
def test_rho_one_minus_interleaved_pair(n):
    a = n ** -float(n)
    assert rho_one_minus(a, 2 * a) == pytest.approx(1.0 / (3.0 - 2.0 * a), abs=1e-15)


def test_rho_one_minus_rejects_bad_gaps():
    with pytest.raises(DomainError):
        rho_one_minus(0.0, 0.5)
    with pytest.raises(DomainError):
        rho_one_minus(0.5, 1.5)


def test_geometric_consecutive_follows_the_identity():
    # the identity gives 1/(3 - 2^-n); the variant 1/(3 + 2^-n) is off by O(2^-n)
    for n in range(1, 30):
        direct = pseudo_dist(DiskPoint.from_complement(2.0**-n), DiskPoint.from_complement(2.0 ** -(n + 1)))
        assert direct == pytest.approx(1.0 / (3.0 - 2.0**-n), abs=1e-15)


@pytest.mark.parametrize("eta,center,radius", [(math.exp(-1), 0.5, 0.5), (math.exp(-3), 0.75, 0.25)])
def test_horodisk_closed_forms(eta, center, radius):
    d = horodisk(eta)
    assert d.center == pytest.approx(center, abs=1e-15)
    assert d.radius == pytest.approx(radius, abs=1e-15)
    assert abs(d.center) + d.radius == pytest.approx(1.0, abs=1e-15)


def test_horodisk_exhausts_disk_as_eta_grows():
    d = horodisk(1 - 1e-12)
    assert d.radius > 1 - 1e-11 and abs(d.center) < 1e-11


@pytest.mark.parametrize("eta", [0.0, 1.0, -0.2, 1.5])
def test_horodisk_rejects_levels_outside_unit_interval(eta):
    with pytest.raises(DomainError):
        horodisk(eta)


@pytest.mark.parametrize("eta", [0.05, math.exp(-1), 0.5, 0.9])
def test_horodisk_boundary_is_a_level_curve_of_the_atomic_function(eta):
    S = atomic()
    w = horodisk(eta).boundary_samples(101)[1:]  # skip the tangency point
    w = w[np.abs(w) < 1 - 1e-6]
    assert np.allclose(eval_log_modulus(S, w), math.log(eta), atol=1e-9)


def test_pseudo_disk_at_origin():
    d = pseudo_disk_to_euclidean(0.0, 0.3)
    assert d.center == 0 and d.radius == pytest.approx(0.3)


def test_pseudo_disk_closed_form_values():
    # (1 - r^2) z0 / (1 - r^2 z0^2) and r (1 - z0^2) / (1 - r^2 z0^2)
    d = pseudo_disk_to_euclidean(0.9, 0.5)
    assert d.center.real == pytest.approx(0.9 * 0.75 / (1 - 0.25 * 0.81), abs=1e-15)
    assert d.center.real == pytest.approx(0.8463949843260188, abs=1e-15)
    assert d.radius == pytest.approx(0.5 * 0.19 / 0.7975, abs=1e-15)


@given(disk_points(0.99), st.floats(0.01, 0.99))
def test_pseudo_disk_boundary_round_trip(z0, r):
    d = pseudo_disk_to_euclidean(z0, r)
    assert d.inside_closed_unit_disk()
    w = d.boundary_samples(16)
    assert np.allclose(pseudo_dist(z0, w), r, atol=1e-10)


def test_pseudo_disk_near_rim_uses_complement():
    p = DiskPoint.from_complement(1e-17)
    d = pseudo_disk_to_euclidean(p, 0.5)
    assert d.radius > 0 and d.inside_closed_unit_disk()


@given(disk_points(), disk_points())
def test_metric_axioms(z, w):
    d = pseudo_dist(z, w)
    assert d == pseudo_dist(w, z)
    assert 0.0 <= d < 1.0
    assert pseudo_dist(z, z) == 0.0


@given(disk_points(0.99), disk_points(0.99), disk_points(0.9), st.floats(0, 2 * math.pi))
def test_mobius_invariance(z, w, a, theta):
    tau = mobius(a, theta)
    assert pseudo_dist(complex(tau(z)), complex(tau(w))) == pytest.approx(pseudo_dist(z, w), abs=1e-12)


def test_rho_one_minus_matches_direct_formula(rng):
    a = rng.uniform(1e-6, 1.0, 10_000)
    b = rng.uniform(1e-6, 1.0, 10_000)
    ours = np.array([rho_one_minus(x, y) for x, y in zip(a, b)])
    direct = pseudo_dist(1.0 - a, 1.0 - b)
    assert np.max(np.abs(ours - direct)) < 1e-13


def test_stolz_membership():
    cone = StolzAngle(BoundaryPoint(1.0, 0.0), 2.0)
    assert in_stolz(cone, 0.0)
    assert not in_stolz(cone, 0.5j)
    assert all(in_stolz(cone, r) for r in (0.1, 0.9, 0.999))


def test_stolz_needs_opening_above_one():
    with pytest.raises(DomainError):
        StolzAngle(BoundaryPoint(1.0, 0.0), 1.0)


def test_boundary_point_normalizes():
    p = BoundaryPoint(1.0 + 1e-9, 0.0)
    assert abs(complex(p)) == pytest.approx(1.0, abs=1e-15)
    assert BoundaryPoint.from_angle(math.pi / 2).angle == pytest.approx(math.pi / 2)
    with pytest.raises(DomainError):
        BoundaryPoint(0.5, 0.0)


def test_disk_point_rejects_boundary():
    with pytest.raises(DomainError):
        DiskPoint(1.0, 0.0)
    assert DiskPoint.from_complement(1e-20).one_minus_abs2() == pytest.approx(2e-20)


def test_euclidean_disk_rejects_negative_radius():
    with pytest.raises(DomainError):
        EuclideanDisk(0j, -1.0)
