import json

import jsonschema
import pytest
from hypothesis import given, strategies as st

from onecomp.errors import SpecError
from onecomp.inner import atomic, blaschke
from onecomp.report import stock_experiments
from onecomp.serialize import (
    SPEC_SCHEMA,
    SpecDocument,
    canonical_json,
    content_hash,
    dump_json,
    load_spec,
    spec_from_json,
    spec_to_json,
    write_atomic,
)


@pytest.mark.parametrize("exp", stock_experiments(), ids=lambda e: e.name)
def test_stock_specs_round_trip(exp):
    doc = exp.document()
    obj = json.loads(dump_json(doc.to_json()))
    jsonschema.validate(obj, SPEC_SCHEMA)
    back = spec_from_json(obj)
    assert back.function == doc.function
    assert back.name == doc.name and back.eta == doc.eta
    assert content_hash(back.to_json()) == content_hash(doc.to_json())


@given(st.lists(st.complex_numbers(max_magnitude=0.99), max_size=5), st.floats(0.01, 10))
def test_random_specs_round_trip(zs, mass):
    u = blaschke(*zs) * atomic(1j, mass)
    assert spec_from_json(json.loads(json.dumps(spec_to_json(u)))).function == u


def test_bare_node_document():
    doc = spec_from_json({"kind": "singular", "atoms": [{"point": [1, 0], "mass": 1}]})
    assert doc.function == atomic() and doc.name == "function" and doc.eta == ()


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "nonsense"},
        {"kind": "finite_blaschke"},
        {"kind": "finite_blaschke", "zeros": [[0.2]]},
        {"kind": "singular", "atoms": []},
        {"kind": "singular", "atoms": [{"point": [1, 0], "mass": -1}]},
        {"function": {"kind": "finite_blaschke", "zeros": []}, "eta": [1.5]},
        {"function": {"kind": "finite_blaschke", "zeros": []}, "colour": "red"},
        {"kind": "finite_blaschke", "zeros": [[2.0, 0.0]]},
        {"kind": "infinite_blaschke", "sequence": {"generator": "no_such_generator"}},
        {"kind": "compose", "outer": {"kind": "finite_blaschke", "zeros": []}},
        [],
    ],
)
def test_malformed_specs(obj):
    with pytest.raises(SpecError):
        spec_from_json(obj)


def test_load_spec_errors(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SpecError, match="invalid JSON"):
        load_spec(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(SpecDocument(atomic(), "s", (0.5,)).to_json()))
    assert load_spec(good).eta == (0.5,)


def test_canonical_forms():
    # oracle: trivial
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert content_hash({"a": 1}) == content_hash({"a": 1})
    assert dump_json({"b": 1, "a": 2}).endswith("}\n")
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_write_atomic(tmp_path):
    p = write_atomic(tmp_path / "sub" / "f.txt", "hello")
    assert p.read_text() == "hello"
    write_atomic(p, b"bye")
    assert p.read_bytes() == b"bye"
    assert [q.name for q in p.parent.iterdir()] == ["f.txt"]
