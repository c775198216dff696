import json
import math

import jsonschema
import pytest

from onecomp.errors import DomainError, TruncationBudgetExceeded
from onecomp.inner import InfiniteBlaschke, atomic, blaschke, compose, multiply
from onecomp.report import (
    CONSTANTS_N,
    analyze,
    hoffman_inclusion,
    run_suite,
    sequence_constants,
    stock_experiments,
    with_budget,
)
from onecomp.sequences import ZeroSequence
from onecomp.serialize import REPORT_SCHEMA, SpecDocument
from onecomp.sublevel import RefinementPolicy

FAST = RefinementPolicy().truncated(2)
S = atomic()


def strip_timing(body):
    body = dict(body)
    body.pop("timing")
    return body


def test_report_matches_schema():
    rep = analyze(SpecDocument(compose(S, blaschke(0, 0)), "two_lobes", (0.1, 0.5)), policy=FAST)
    body = json.loads(rep.dumps())
    jsonschema.validate(body, REPORT_SCHEMA)
    assert [v["verdict"] for v in body["verdicts"]] == ["disconnected", "connected"]
    assert body["ladder"]["monotone"] is True
    assert body["criterion"]["label"] == "evidence, not proof"
    assert body["threshold"] is None
    assert body["provenance"]["policy"] == FAST.to_json()


def test_report_is_deterministic(tmp_path):
    doc = SpecDocument(blaschke(0.5, -0.5), "pair", (0.1, 0.4))
    a = analyze(doc, policy=FAST, threshold=True).to_json()
    b = analyze(doc, policy=FAST, threshold=True).to_json()
    assert strip_timing(a) == strip_timing(b)
    assert a["threshold"]["lo"] <= 0.25 <= a["threshold"]["hi"]


def test_spec_hash_tracks_the_function():
    a = analyze(S, etas=[], policy=FAST)
    b = analyze(atomic(1j), etas=[], policy=FAST)
    assert a.spec_sha256 != b.spec_sha256
    assert a.verdicts == [] and a.ladder is None


def test_analyze_rejects_bad_levels():
    with pytest.raises(DomainError):
        analyze(S, etas=[0.0], policy=FAST)


def test_unsupported_criterion_is_reported():
    u = compose(S, InfiniteBlaschke(ZeroSequence("geometric")))
    crit = analyze(u, etas=[], policy=FAST).criterion
    assert crit["status"] == "unsupported"


def test_sequence_constants_geometric():
    c = sequence_constants(ZeroSequence("geometric"), 20)
    # oracle: derived; rho(1 - 2^-n, 1 - 2^-(n+1)) = 1/(3 - 2^-n)
    assert c["consecutive_rho"]["max"] == pytest.approx(0.4, abs=1e-15)
    assert c["consecutive_rho"]["last"] == pytest.approx(1 / (3 - 2.0**-19), abs=1e-13)
    assert c["vhn_ratio"]["sup"] == pytest.approx(0.5)
    assert 0 < c["hoffman"]["epsilon"] < c["hoffman"]["eta"] < 1
    # oracle: derived; sum of 1 - |z_n|^2 = 2 * 2^-n - 4^-n over n <= 20
    want = 2 * (1 - 2.0**-20) - (1 - 4.0**-20) / 3
    assert c["blaschke_sum"]["value"] == pytest.approx(want, rel=1e-14)


def test_constants_cap():
    c = sequence_constants(ZeroSequence("power", {"p": 2}, 10**6))
    assert c["N"] == CONSTANTS_N


def test_non_radial_sequence_is_flagged():
    c = sequence_constants(ZeroSequence("explicit", {"points": [[0.5, 0], [0, 0.5], [-0.5, 0]]}))
    assert c["vhn_ratio"]["status"] == "not_radial"


def test_hoffman_inclusion_small():
    res = hoffman_inclusion(ZeroSequence("geometric"), 8, FAST)
    assert res["all_inside"] and res["disjoint"]
    assert res["verdict"] == "disconnected" and res["in_components"] == 8


def test_with_budget():
    u = multiply([S, InfiniteBlaschke(ZeroSequence("power", {"p": 2}))])
    v = with_budget(u, 50)
    assert v.factors[1].sequence.budget == 50
    with pytest.raises(TruncationBudgetExceeded):
        with_budget(InfiniteBlaschke(ZeroSequence("geometric"), 30), 10)


def test_stock_experiments_are_named_uniquely():
    names = [e.name for e in stock_experiments()]
    assert len(names) == len(set(names))
    for e in stock_experiments():
        assert all(0 < x < 1 for x in e.etas)


def test_suite_subset(tmp_path):
    summary = run_suite(tmp_path, FAST, names=["atomic", "atomic_of_z2"])
    assert summary["failures"] == {}
    assert summary["experiments"] == ["atomic", "atomic_of_z2"]
    body = json.loads((tmp_path / "atomic.json").read_text())
    jsonschema.validate(body, REPORT_SCHEMA)
    assert body["note"] == "level sets are horodisks"
    rows = {r["row"]: r for r in summary["rows"]}
    assert rows["hyperbolic consecutive rho (j <= 30)"]["status"] == "match"
    flip = rows["S(z^2) connectivity flip"]
    assert flip["computed"][0] <= math.exp(-1) <= flip["computed"][1]
