"""Boundary self-maps and subtree helpers."""

import random

import pytest

from sproutkit import (
    Address,
    SproutError,
    boundary_map,
    compose_boundary_maps,
    is_full,
    stable_image_size,
    steiner_subtree,
)

import propsuite
from conftest import SPROUT_FIXTURES


def parse_address(text: str) -> Address:
    """Read back displays like ``112(12)^∞`` (single-digit symbols)."""
    head, _, rest = text.partition("(")
    cycle = rest.split(")")[0]
    return Address.make(tuple(map(int, head)), tuple(map(int, cycle)))


def test_image_sizes_match_fixtures(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("image_sizes")
        if exp is None:
            continue
        for key, want in exp.items():
            assert boundary_map(sprouts[name], int(key)).image_size == want, (name, key)


def test_maps_agree_with_tree_path_oracle(sprouts):
    for name in SPROUT_FIXTURES:
        s = sprouts[name]
        for k in range(1, s.num_whites + 1):
            table = propsuite.oracle_phi(s, k)
            bm = boundary_map(s, k)
            for p in s.boundary:
                assert bm.apply(p) == table[p], (name, k, p)


def test_map_caching_and_bounds(sprouts):
    s = sprouts["interval2"]
    assert boundary_map(s, 1) is boundary_map(s, 1)
    with pytest.raises(SproutError):
        boundary_map(s, 0)
    with pytest.raises(SproutError):
        boundary_map(s, s.num_whites + 1)


def test_composition_order(sprouts):
    s = sprouts["sixmap"]
    rng = random.Random(3)
    for _ in range(50):
        word = [rng.randint(1, s.num_whites) for _ in range(rng.randint(0, 5))]
        composite = compose_boundary_maps(s, word)
        for p in s.boundary:
            x = p
            for k in word:
                x = boundary_map(s, k).apply(x)
            assert composite.apply(p) == x
        assert composite.word == tuple(word)


def test_image_mask_matches_points(sprouts):
    s = sprouts["vicsek5"]
    rng = random.Random(11)
    for _ in range(40):
        pick = [p for p in s.boundary if rng.random() < 0.6]
        k = rng.randint(1, s.num_whites)
        bm = boundary_map(s, k)
        via_mask = set(s.points_of(bm.image_mask(s.mask_of(pick))))
        direct = {bm.apply(p) for p in pick}
        assert via_mask == direct


def test_stable_image_sizes_match_fixtures(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("stable_image_sizes")
        if exp is None:
            continue
        for text, want in exp.items():
            addr = parse_address(text)
            assert stable_image_size(sprouts[name], addr) == want, (name, text)


def test_stable_size_is_reached_by_iteration(sprouts):
    # iterate the subset dynamics explicitly and compare the tail size
    rng = random.Random(23)
    for name in ["seesaw", "sixmap", "vicsek5", "chain5"]:
        s = sprouts[name]
        for _ in range(25):
            pre = tuple(rng.randint(1, s.num_whites) for _ in range(rng.randint(0, 3)))
            per = tuple(rng.randint(1, s.num_whites) for _ in range(rng.randint(1, 3)))
            addr = Address.make(pre, per)
            steps = 2 ** len(s.boundary) + len(addr.preperiod) + len(addr.period)
            symbols = list(addr.expand(steps * max(1, len(addr.period))))
            sizes = propsuite.oracle_image_walk(s, symbols)
            assert all(a >= b for a, b in zip(sizes, sizes[1:]))
            assert sizes[-1] == stable_image_size(s, addr), (name, addr.render())


def test_steiner_subtree_degrees(sprouts):
    s = sprouts["sixmap"]
    view = steiner_subtree(s, ["p1", "p2"])
    # a path between two leaves has inner degree two everywhere
    inner = [v for v in view.vertices if view.degree(v) == 2]
    leaves = [v for v in view.vertices if view.degree(v) == 1]
    assert sorted(leaves) == ["p1", "p2"]
    assert len(inner) == len(view.vertices) - 2


def test_is_full_pairs(sprouts, expectations):
    exp = expectations["collision"]["is_full"]
    s = sprouts["collision"]
    for key, want in exp.items():
        pair = key.split(",")
        assert is_full(s, pair) == want, key


def test_full_boundary_spans_every_white(sprouts):
    for name in SPROUT_FIXTURES:
        s = sprouts[name]
        view = steiner_subtree(s, s.boundary)
        if not validate_ok(sprouts, name):
            continue
        assert set(view.vertices) >= set(s.whites), name


def validate_ok(sprouts, name: str) -> bool:
    from sproutkit import validate

    report = validate(sprouts[name])
    return report.is_correct and report.is_regular
