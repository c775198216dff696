"""Acceptance criteria, one test each.

Every test prints a ``criterion N: PASS|FAIL`` line with its runtime,
and the lines are repeated in the pytest terminal summary.
"""

import json
import math

import numpy as np
import pytest

from onecomp.criterion import aleksandrov_ratio, criterion_scan
from onecomp.geometry import horodisk
from onecomp.inner import InfiniteBlaschke, atomic, blaschke, compose
from onecomp.report import hoffman_inclusion, run_suite, stock_experiments
from onecomp.sequences import (
    ZeroSequence,
    consecutive_rhos,
    hoffman_constants,
    interpolation_constant,
    vhn_ratio,
)
from onecomp.sublevel import (
    IN,
    UNCERTAIN,
    RefinementPolicy,
    is_connected,
    label_components,
    monotone_ladder,
    sample,
    sample_ladder,
    threshold_search,
)

S = atomic()


def test_criterion_1_closed_form_constants(criterion):
    with criterion(1, "closed-form sequence constants", limit=1.0):
        # oracle: published value (0.5 for the hyperbolic orbit, all j <= 30)
        hyp = consecutive_rhos(ZeroSequence("hyperbolic_orbit"), 31)
        assert hyp.size == 30
        assert np.max(np.abs(hyp - 0.5)) <= 1e-13

        par = ZeroSequence("parabolic_orbit")
        # oracle: published value 1/sqrt(2)
        assert np.max(np.abs(consecutive_rhos(par, par.budget) - 2**-0.5)) <= 1e-13
        # oracle: published value 1/2 (the orbit lies on the circle |z - 1/2| = 1/2)
        assert np.max(np.abs(np.abs(par.points(par.budget) - 0.5) - 0.5)) <= 1e-14

        # oracle: published value 1/2, exact
        assert vhn_ratio(ZeroSequence("geometric"), 60).sup == 0.5

        # oracle: derived; pairs (1 - 2^-k, 1 - k^-k) have rho = 1/(3 - 2 k^-k) -> 1/3
        inter = ZeroSequence("interleaved_thin")
        for k in range(2, 9):
            rho = float(inter.rho(2 * k - 3, 2 * k - 2))
            assert abs(rho - 1.0 / (3.0 - 2.0 * float(k) ** -k)) <= 1e-6
        assert abs(rho - 1.0 / 3.0) <= 1e-6


def test_criterion_2_horodisk_equivalence(criterion):
    with criterion(2, "horodisk equivalence at refinement level 3", limit=30.0):
        for eta in (math.exp(-1.0), 0.5, math.exp(-3.0)):
            s = sample(S, eta, 3)
            cert = np.flatnonzero(s.classes != UNCERTAIN)
            geo = s.grid.geometry(cert)
            # oracle: derived; {|S| < eta} is the disk |z - L/(L+1)| < 1/(L+1), L = log(1/eta)
            d = horodisk(eta)
            member = np.abs(geo.z - d.center) < d.radius
            agree = np.mean(member == (s.classes[cert] == IN))
            print(f"  eta={eta:.6g}: {cert.size} certified cells, agreement {agree:.6f}")
            assert agree >= 0.999
            assert is_connected(S, eta).verdict == "connected"


def test_criterion_3_two_lobe_flip(criterion):
    u = compose(S, blaschke(0.0, 0.0))
    with criterion(3, "S(z^2) flips between e^-2 and 0.5", limit=60.0):
        v = is_connected(u, math.exp(-2.0))
        assert v.verdict == "disconnected"
        assert len(v.witnesses) == 2
        # oracle: derived; S(z^2) is even, so each lobe is the image of the other under z -> -z
        s = v.sample
        labels = label_components(s, u).labels
        g = s.grid
        cells = [w["cell"] for w in v.witnesses]
        mirrored = g.locate(np.array([-g.geometry(np.array([c])).z[0] for c in cells]))
        assert labels[cells[0]] != labels[cells[1]]
        assert labels[mirrored[0]] == labels[cells[1]] and labels[mirrored[1]] == labels[cells[0]]
        assert is_connected(u, 0.5).verdict == "connected"
        res = threshold_search(u, 0.01)
        print(f"  threshold {res.status}: [{res.lo:.5f}, {res.hi:.5f}]")
        # oracle: published value; the pinch happens at e^-1
        assert res.status in ("bracketed", "bracketed_with_gap")
        assert 0.3 <= res.lo <= math.exp(-1.0) <= res.hi <= 0.45


def test_criterion_4_derivative_ratio(criterion):
    with criterion(4, "derivative ratio of S and of S o B", limit=10.0):
        rng = np.random.default_rng(20240531)
        t = rng.uniform(1e-3, 2 * math.pi - 1e-3, size=1000)
        # oracle: derived; |S''| / |S'|^2 = 1 identically on the circle
        r = np.array([aleksandrov_ratio(S, complex(math.cos(x), math.sin(x))) for x in t])
        assert np.max(np.abs(r - 1.0)) <= 1e-9
        for _ in range(6):
            deg = int(rng.integers(1, 5))
            zs = rng.uniform(-1, 1, size=deg) + 1j * rng.uniform(-1, 1, size=deg)
            zs = np.where(np.abs(zs) > 0.9, 0.9 * zs / np.abs(zs), zs)
            rep = criterion_scan(compose(S, blaschke(*zs)))
            a, b = rep.sups
            print(f"  degree {deg}: sups {a:.6g}, {b:.6g}; probes {[p.value for p in rep.probes]}")
            assert math.isfinite(a) and math.isfinite(b) and not rep.blowup
            assert len(rep.probes) == deg
            assert all(p.value < 0.5 for p in rep.probes)


def test_criterion_5_hoffman_inclusion(criterion):
    geo = ZeroSequence("geometric")
    with criterion(5, "Hoffman inclusion for the geometric sequence, N = 20", limit=60.0):
        res = hoffman_inclusion(geo, 20)
        print(f"  {json.dumps(res)}")
        assert res["in_cells"] > 0
        assert res["all_inside"] and res["disjoint"]
        sigma = float(consecutive_rhos(geo, 20).max()) + 0.1
        assert is_connected(InfiniteBlaschke(geo, 20), sigma).verdict == "connected"


def test_criterion_6_thin_counterexample(criterion):
    seq = ZeroSequence("superexponential")
    with criterion(6, "thin product with zeros 1 - n^-n, n <= 6", limit=60.0):
        u = InfiniteBlaschke(seq, 6)
        eps = hoffman_constants(interpolation_constant(seq, 6)).epsilon
        v = is_connected(u, eps)
        assert v.verdict == "disconnected"
        cmap = label_components(v.sample, u)
        print(f"  epsilon={eps:.6g}: {cmap.count} components, zeros per component {cmap.zero_count}")
        assert cmap.count == 6
        assert cmap.zero_count == [1] * 6


@pytest.fixture(scope="module")
def suite_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("suite_a")
    summary = run_suite(out)
    return out, summary


def test_criterion_7_topology_and_monotonicity(criterion, suite_dir):
    out, summary = suite_dir
    with criterion(7, "topology and monotonicity over the stock experiments"):
        assert summary["failures"] == {}
        for exp in stock_experiments():
            body = json.loads((out / f"{exp.name}.json").read_text())
            for v in body["verdicts"]:
                topo = v["topology"]
                assert all(topo["simply_connected"]), (exp.name, v["eta"])
                assert all(topo["zero_or_rim"]), (exp.name, v["eta"])
            if body["ladder"] is not None:
                assert body["ladder"]["monotone"], exp.name
            # a denser ladder on the final grid of each experiment
            etas = sorted(set(exp.etas) | {0.2, 0.4, 0.6, 0.8})
            assert monotone_ladder(sample_ladder(exp.function, etas, RefinementPolicy().levels - 1)), exp.name


def _without_timing(path):
    body = json.loads(path.read_text())
    body.pop("timing", None)
    return body


def test_criterion_8_determinism(criterion, suite_dir, tmp_path):
    first, _ = suite_dir
    with criterion(8, "suite is reproducible and independent of worker count"):
        second = tmp_path / "b"
        threaded = tmp_path / "c"
        run_suite(second)
        run_suite(threaded, RefinementPolicy(workers=8))
        names = sorted(p.name for p in first.glob("*.json"))
        assert names == sorted(p.name for p in second.glob("*.json"))
        assert names == sorted(p.name for p in threaded.glob("*.json"))
        for name in names:
            if name == "summary.json":
                assert (first / name).read_bytes() == (second / name).read_bytes()
                assert (first / name).read_bytes() == (threaded / name).read_bytes()
                continue
            a = _without_timing(first / name)
            assert a == _without_timing(second / name), name
            assert a == _without_timing(threaded / name), name
