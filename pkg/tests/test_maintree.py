"""Inner-tree orders, the subset transformation graph, and the point report."""

import pytest

from sproutkit import (
    AddressResolver,
    InfiniteAddressSet,
    SproutError,
    attractor_order,
    main_tree_order,
    point_addresses,
    ramification_report,
    report_rows,
    transformation_graph,
)

from conftest import SPROUT_FIXTURES

REPORTABLE = [
    "interval2",
    "vicsek5",
    "seesaw",
    "doubleloop",
    "sixmap",
    "chain5",
    "star3",
]


def test_boundary_orders(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("boundary_orders")
        if exp is None:
            continue
        for p, want in exp.items():
            assert main_tree_order(sprouts[name], p) == want, (name, p)


def test_critical_orders(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("critical_orders")
        if exp is None:
            continue
        for v, want in exp.items():
            assert main_tree_order(sprouts[name], v) == want, (name, v)


def test_critical_addresses(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("critical_addresses")
        if exp is None:
            continue
        for v, want in exp.items():
            got = [a.render() for a in point_addresses(sprouts[name], v)]
            assert sorted(got) == sorted(want), (name, v)


def test_attractor_orders(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("attractor_orders")
        if exp is None:
            continue
        for p, want in exp.items():
            assert attractor_order(sprouts[name], p) == want, (name, p)


def test_infinite_sets_refuse_loudly(sprouts):
    s = sprouts["doubleloop"]
    with pytest.raises(InfiniteAddressSet) as info:
        point_addresses(s, "p2")
    assert info.value.classification.kind == "uncountable"
    with pytest.raises(InfiniteAddressSet):
        main_tree_order(s, "p2")


def test_seesaw_critical_walk_displays(sprouts, expectations):
    exp = expectations["seesaw"]
    resolver = AddressResolver(sprouts["seesaw"])
    addrs = resolver.vertex_addresses("p5")
    got = sorted(a.render() for a in addrs)
    assert got == sorted(exp["critical_addresses"]["p5"])
    expansions = sorted("".join(map(str, a.expand(9))) for a in addrs)
    assert expansions == sorted(exp["critical_expansions"]["p5"])


# ---------------------------------------------------------------------------
# the subset transformation graph


def graph_shape(s, g):
    subsets = {frozenset(s.points_of(mask)) for mask in g.vq}
    arcs = {
        (frozenset(s.points_of(a)), frozenset(s.points_of(b)), k)
        for a, b, k in g.eq
    }
    terminal = {(frozenset(s.points_of(mask)), "b", v) for mask, v in g.eb}
    terminal |= {(frozenset(s.points_of(mask)), "p", v) for mask, v in g.ep}
    return subsets, arcs, terminal


def test_subset_graphs_match_fixtures(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("subset_graph")
        if exp is None:
            continue
        s = sprouts[name]
        g = transformation_graph(s)
        subsets, arcs, terminal = graph_shape(s, g)
        assert subsets == {frozenset(q) for q in exp["subsets"]}, name
        assert arcs == {
            (frozenset(a), frozenset(b), k) for a, b, k in exp["labeled_arcs"]
        }, name
        assert terminal == {
            (frozenset(q), kind, v) for q, kind, v in exp["terminal_arcs"]
        }, name


def test_graph_dot_is_deterministic(sprouts):
    for name in ["vicsek5", "sixmap", "star3"]:
        g1 = transformation_graph(sprouts[name])
        g2 = transformation_graph(sprouts[name])
        dot = g1.to_dot()
        assert dot == g2.to_dot()
        assert dot.startswith("digraph")


def test_interval2_has_no_walks(sprouts, expectations):
    g = transformation_graph(sprouts["interval2"])
    assert len(g.walks()) == expectations["interval2"]["walk_count"]
    assert g.vq == ()


def test_walks_are_well_formed(sprouts):
    for name in REPORTABLE:
        s = sprouts[name]
        g = transformation_graph(s)
        for walk in g.walks():
            assert walk.kind in {"cycle", "black", "boundary"}
            if walk.kind == "cycle":
                assert walk.cycle, name
                addr = walk.address()
                assert addr.expand(1)  # a genuine infinite address
            else:
                assert walk.terminal is not None
                if walk.kind == "boundary":
                    assert walk.terminal in s.boundary_pos
                else:
                    assert walk.terminal in s.black_pos
                    assert walk.terminal not in s.boundary_pos


# ---------------------------------------------------------------------------
# the report


def test_report_row_counts(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("report_rows")
        if exp is None:
            continue
        rows = report_rows(sprouts[name])
        assert len(rows) == exp, name
        # locations are unique
        locations = [r["location"] for r in rows]
        assert len(set(locations)) == len(locations)


def test_report_sub_rows_match(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("report")
        if exp is None:
            continue
        rows = {r["location"]: r for r in report_rows(sprouts[name])}
        for location, fields in exp.items():
            row = rows[location]
            for key, want in fields.items():
                got = row[key]
                if key == "addresses" and got is not None:
                    got = sorted(got)
                    want = sorted(want)
                assert got == want, (name, location, key)


def test_ramification_rows_match(sprouts, expectations):
    for name in SPROUT_FIXTURES:
        exp = expectations[name].get("ramification")
        if exp is None:
            continue
        rows = report_rows(sprouts[name])
        for item in exp:
            matches = [
                r
                for r in rows
                if r["addresses"] is not None and item["address"] in r["addresses"]
            ]
            assert len(matches) == 1, (name, item)
            row = matches[0]
            assert row["ord_main_tree"] == item["order"], (name, item)
            assert "ramification" in row["class"], (name, item)
            if "location" in item:
                assert row["location"] == item["location"]


def test_sixmap_endpoints(sprouts, expectations):
    rows = {r["location"]: r for r in report_rows(sprouts["sixmap"])}
    for p in expectations["sixmap"]["endpoint_boundary"]:
        assert rows[p]["class"] == "boundary endpoint", p
        assert rows[p]["ord_main_tree"] == 1


def test_report_refuses_bad_sprouts(sprouts):
    with pytest.raises(SproutError):
        report_rows(sprouts["collision"])  # inadmissible
    with pytest.raises(SproutError):
        report_rows(sprouts["gap3"])  # not correct
    with pytest.raises(SproutError):
        report_rows(sprouts["stub4"])  # not regular


def test_report_row_invariants(sprouts):
    for name in REPORTABLE:
        s = sprouts[name]
        for row in report_rows(s):
            if row["addresses"] is None:
                assert row["ord_main_tree"] is None
                assert row["ord_in_K"] == "Infinite"
                assert row["address_class"] in {"countably-infinite", "uncountable"}
            else:
                assert row["address_class"] == "finite"
                if row["kind"] == "boundary":
                    assert row["ord_in_K"] == len(row["addresses"])
                else:
                    assert row["ord_in_K"] is None
                assert row["ord_main_tree"] >= 1 or row["degenerate"]
            assert row["kind"] in {"boundary", "critical", "image", "interior"}
            if row["kind"] == "boundary":
                assert row["class"].startswith("boundary ")


def test_resolver_round_trips(sprouts):
    s = sprouts["sixmap"]
    resolver = AddressResolver(s)
    for base in resolver.vertex_addresses("p3"):
        addr = base.prepend((4,))
        loc = resolver.resolve(addr)
        assert loc.render() == "4·p3"
        assert resolver.member("p3", addr.shift())
    # the same point through the public helper
    assert [a.render() for a in point_addresses(s, ((4,), "p3"))] == ["4(3)^∞"]
