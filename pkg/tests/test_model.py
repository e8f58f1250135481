"""Structural parsing and validation."""

import random

import pytest

from sproutkit import ParseError, parse_sprout, validate

from conftest import SPROUT_FIXTURES

CRITICAL_SETS = {
    "interval2": {"c"},
    "vicsek5": {"c1", "c2", "c3", "c4"},
    "seesaw": {"p5"},
    "star3": {"o"},
    "sixmap": {"c1", "c2", "c3", "c4", "c5"},
    "collision": {"p4", "c1"},
}


def test_validate_flags_match_fixtures(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name]
        if "is_correct" not in exp:
            continue
        report = validate(sprouts[name])
        assert report.structural_ok, name
        assert report.is_correct == exp["is_correct"], name
        assert report.is_regular == exp["is_regular"], name


def test_critical_sets(sprouts):
    for name, want in CRITICAL_SETS.items():
        s = sprouts[name]
        assert set(s.critical_set) == want
        report = validate(s)
        assert set(report.critical_set) == want


def test_correct_sprouts_generate_their_boundary(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        if not expectations[name].get("is_correct"):
            continue
        report = validate(sprouts[name])
        assert set(report.sprout_boundary) == set(sprouts[name].boundary), name


def test_gap3_is_not_correct(sprouts, expectations):
    report = validate(sprouts["gap3"])
    exp = expectations["gap3"]
    assert not report.is_correct
    assert not report.is_regular
    assert set(report.sprout_boundary) == set(exp["generated_boundary"])
    rules = {v.rule: v for v in report.violations}
    violation = rules["not-correct"]
    assert violation.witness == exp["missing_boundary_witness"]
    assert "is not generated from the critical set" in violation.message


def test_stub4_is_correct_but_not_regular(sprouts, expectations):
    report = validate(sprouts["stub4"])
    exp = expectations["stub4"]
    assert report.is_correct
    assert not report.is_regular
    witnesses = {v.witness for v in report.violations if v.rule == "not-regular"}
    assert set(exp["degree_one_blacks"]) <= witnesses
    assert set(exp["degree_one_whites"]) <= witnesses


def test_document_round_trip(sprouts):
    for name in SPROUT_FIXTURES:
        s = sprouts[name]
        again = parse_sprout(s.to_document())
        assert again.whites == s.whites
        assert again.blacks == s.blacks
        assert again.boundary == s.boundary
        assert again.edges == s.edges


def test_accessors(sprouts):
    s = sprouts["interval2"]
    assert s.num_whites == 2
    assert s.white_name(1) == s.whites[0]
    assert s.white_index(s.whites[1]) == 2
    for w in s.whites:
        assert all(e.white == w for e in s.edges_at_white[w])
    for b in s.blacks:
        assert all(e.black == b for e in s.edges_at_black[b])
    # mask helpers round-trip arbitrary boundary subsets
    rng = random.Random(5)
    for _ in range(20):
        pick = [p for p in s.boundary if rng.random() < 0.5]
        mask = s.mask_of(pick)
        assert sorted(s.points_of(mask)) == sorted(pick)
    assert s.points_of(s.full_mask) == s.boundary


BAD_DOCUMENTS = [
    {"whites": ["w"], "blacks": ["b"], "boundary": ["b"]},  # no edges
    {"whites": ["w", "w"], "blacks": ["b"], "boundary": ["b"], "edges": []},
    {"whites": ["w"], "blacks": ["b"], "boundary": ["x"], "edges": []},
    {"whites": ["w"], "blacks": ["b"], "boundary": ["b", "b"], "edges": []},
    {
        "whites": ["w"],
        "blacks": ["b"],
        "boundary": ["b"],
        "edges": [{"w": "nope", "b": "b", "label": "b"}],
    },
    {
        "whites": ["w"],
        "blacks": ["b", "c"],
        "boundary": ["b"],
        "edges": [{"w": "w", "b": "b", "label": "c"}],  # label not boundary
    },
    {
        "whites": ["w"],
        "blacks": ["b"],
        "boundary": ["b"],
        "edges": [
            {"w": "w", "b": "b", "label": "b"},
            {"w": "w", "b": "b", "label": "b"},
        ],
    },
    "not an object",
]


def test_parse_rejects_malformed_documents():
    for doc in BAD_DOCUMENTS:
        with pytest.raises(ParseError):
            parse_sprout(doc)


def test_structural_violations_are_reported():
    # a path white-black-white-black plus a stray edge making a cycle
    doc = {
        "whites": ["w1", "w2"],
        "blacks": ["a", "b"],
        "boundary": ["a", "b"],
        "edges": [
            {"w": "w1", "b": "a", "label": "a"},
            {"w": "w1", "b": "b", "label": "b"},
            {"w": "w2", "b": "a", "label": "b"},
            {"w": "w2", "b": "b", "label": "a"},
        ],
    }
    report = validate(parse_sprout(doc))
    assert not report.structural_ok
    assert "not-a-tree" in {v.rule for v in report.violations}

    forest = {
        "whites": ["w1", "w2"],
        "blacks": ["a", "b", "c"],
        "boundary": ["a", "b", "c"],
        "edges": [
            {"w": "w1", "b": "a", "label": "a"},
            {"w": "w1", "b": "b", "label": "b"},
            {"w": "w2", "b": "c", "label": "c"},
        ],
    }
    report = validate(parse_sprout(forest))
    assert not report.structural_ok
    assert "disconnected" in {v.rule for v in report.violations}


def test_label_violations_are_reported():
    repeated = {
        "whites": ["w1", "w2"],
        "blacks": ["a", "b", "c"],
        "boundary": ["a", "b"],
        "edges": [
            {"w": "w1", "b": "a", "label": "a"},
            {"w": "w1", "b": "c", "label": "a"},
            {"w": "w2", "b": "c", "label": "b"},
            {"w": "w2", "b": "b", "label": "a"},
        ],
    }
    report = validate(parse_sprout(repeated))
    assert "label-injectivity" in {v.rule for v in report.violations}

    unused = {
        "whites": ["w1", "w2"],
        "blacks": ["a", "b", "c"],
        "boundary": ["a", "b"],
        "edges": [
            {"w": "w1", "b": "a", "label": "a"},
            {"w": "w1", "b": "c", "label": "b"},
            {"w": "w2", "b": "c", "label": "a"},
            {"w": "w2", "b": "b", "label": "a"},
        ],
    }
    # every label must name some boundary point; drop b entirely
    unused["edges"][1]["label"] = "a"
    unused["edges"][2]["label"] = "a"
    report = validate(parse_sprout(unused))
    assert "label-surjectivity" in {v.rule for v in report.violations}
