import json

import jsonschema

from pdl.engine import EngineOptions, compute_extensions, SKEPTICAL
from pdl.kb import DefaultTheory
from pdl.serialize import OUTCOME_SCHEMA, outcome_to_dict, serialize_outcome


def test_row_one_json(corpus):
    data = json.loads(serialize_outcome(compute_extensions(corpus("01_basic"))))
    jsonschema.validate(data, OUTCOME_SCHEMA)
    (ext,) = data["extensions"]
    assert ext["facts"] == [
        {"literal": "bird(tweety)", "status": "strict", "orders": ["inf"], "rules": ["s#1"]},
        {"literal": "-flies(tweety)", "status": "strict", "orders": ["inf"], "rules": ["s#2"]},
        {"literal": "penguin(tweety)", "status": "asserted", "orders": ["inf"],
         "rules": ["asserted"]},
    ]
    assert data["mode"] == "credulous" and data["semantics"] == "joint"


def test_empty_theory_json():
    data = outcome_to_dict(compute_extensions(DefaultTheory()))
    assert data["extensions"] == [{"facts": [], "trace": []}]


def test_nixon_json_has_two_extensions(corpus):
    outcome = compute_extensions(corpus("03_nixon"), EngineOptions(mode=SKEPTICAL))
    data = json.loads(serialize_outcome(outcome))
    jsonschema.validate(data, OUTCOME_SCHEMA)
    assert len(data["extensions"]) == 2
    assert data["skeptical_core"] == ["quaker(nixon)", "republican(nixon)"]


def test_disjunctions_and_default_orders(corpus):
    data = outcome_to_dict(compute_extensions(corpus("07_broken_arms")))
    jsonschema.validate(data, OUTCOME_SCHEMA)
    for ext in data["extensions"]:
        assert ext["disjunctive_facts"] == ["broken(left) | broken(right)"]
        assert [f["orders"] for f in ext["facts"]] == [[1]]


def test_round_trip_and_determinism(corpus):
    for stem in ("02_transitivity", "08_football", "11_mammal"):
        text = serialize_outcome(compute_extensions(corpus(stem)))
        assert text == serialize_outcome(compute_extensions(corpus(stem)))
        data = json.loads(text)
        jsonschema.validate(data, OUTCOME_SCHEMA)
        assert json.dumps(data, indent=2, ensure_ascii=False) + "\n" == text
