from __future__ import annotations

import json

import pytest
from hypothesis import given

from strategies import posets, stratified, two_trusses
from trusskit import fixtures, io
from trusskit.errors import SchemaError, ValidationError
from trusskit.strat import StratTruss


@pytest.mark.parametrize("name", fixtures.names())
def test_fixture_round_trip_is_byte_exact(name):
    raw = fixtures.raw(name)
    doc = io.parse(raw)
    assert io.serialize(doc) == raw
    assert doc.name == name


@given(two_trusses())
def test_truss_round_trip(T):
    doc = io.document_for(T)
    again = io.parse(io.serialize(doc))
    assert again.kind == "truss" and again.payload == T


@given(stratified())
def test_strat_round_trip(X):
    X = X.canonical()
    doc = io.document_for(X)
    back = io.parse(io.serialize(doc)).payload
    assert isinstance(back, StratTruss)
    assert back.bundle == X.bundle
    assert back.strata == X.strata


@given(posets())
def test_poset_round_trip(P):
    P = P.relabel({x: str(x) for x in P})
    assert io.parse(io.serialize(io.document_for(P))).payload == P


def test_malformed_json():
    with pytest.raises(SchemaError):
        io.parse(b"{not json")


def test_schema_pointer():
    obj = json.loads(fixtures.raw("cap"))
    obj["levels"][0]["fibers"][""] = 5
    with pytest.raises(SchemaError) as info:
        io.decode(obj)
    assert info.value.pointer == "/levels/0/fibers/"


def test_wrong_version():
    obj = json.loads(fixtures.raw("cap"))
    obj["format_version"] = 2
    with pytest.raises(SchemaError):
        io.decode(obj)


def test_invalid_word_is_a_validation_error():
    obj = json.loads(fixtures.raw("cap"))
    obj["levels"][0]["fibers"][""] = "RRS"
    with pytest.raises(ValidationError):
        io.decode(obj)


def test_out_of_range_pair():
    obj = json.loads(fixtures.raw("pt2"))
    key = next(iter(obj["levels"][1]["bordisms"]))
    obj["levels"][1]["bordisms"][key] = [[9, 9]]
    with pytest.raises(ValidationError):
        io.decode(obj)


def test_missing_field():
    with pytest.raises(SchemaError):
        io.decode({"kind": "tangle", "format_version": 1, "n": 0, "levels": []})


def test_path_keys():
    assert io.pathkey((1, 0, 2)) == "1-0-2"
    assert io.parse_pathkey("1-0-2", False) == (1, 0, 2)
    assert io.parse_pathkey("", False) == ()
    assert io.parse_pathkey("0:3", True) == ("0", 3)
