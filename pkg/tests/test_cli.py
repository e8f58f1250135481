"""Command-line behavior: outputs, exit codes, determinism."""

import json

from sproutkit import validate

from conftest import cli_matrix, fixture_path, run_cli


# ---------------------------------------------------------------------------
# validate


def test_validate_text_output():
    code, out, err = run_cli(["validate", fixture_path("interval2")])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "structural: ok"
    assert lines[1] == "correct: yes"
    assert lines[2] == "regular: yes"
    assert lines[3] == "critical set: c"
    assert err == ""


def test_validate_json_output():
    code, out, _ = run_cli(["validate", fixture_path("vicsek5"), "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["is_correct"] and doc["is_regular"]
    assert sorted(doc["critical_set"]) == ["c1", "c2", "c3", "c4"]


def test_validate_rejects_gap3():
    code, out, _ = run_cli(["validate", fixture_path("gap3")])
    assert code == 1
    assert "correct: no" in out
    assert "boundary point 3 is not generated" in out


def test_validate_flags_stub4():
    code, out, _ = run_cli(["validate", fixture_path("stub4")])
    assert code == 1
    assert "correct: yes" in out
    assert "regular: no" in out


# ---------------------------------------------------------------------------
# addresses / classify / admissible


def test_addresses_single_point():
    code, out, _ = run_cli(["addresses", fixture_path("seesaw"), "-p", "p4"])
    assert code == 0
    assert out == "p4: 112(12)^∞ = 112121212...\n"


def test_addresses_critical_point():
    code, out, _ = run_cli(["addresses", fixture_path("seesaw"), "-p", "p5"])
    assert code == 0
    assert sorted(out.splitlines()) == [
        "p5: 11(12)^∞ = 111212121...",
        "p5: 221(12)^∞ = 221121212...",
    ]


def test_addresses_unknown_point_is_usage_error():
    code, _, err = run_cli(["addresses", fixture_path("seesaw"), "-p", "zz"])
    assert code == 2
    assert "no black vertex named zz" in err


def test_addresses_json_round_trip():
    code, out, _ = run_cli(
        ["addresses", fixture_path("seesaw"), "--format", "json"]
    )
    assert code == 0
    rows = {r["point"]: r for r in json.loads(out)}
    assert rows["p4"]["addresses"] == ["1(12)^∞"]
    assert rows["p5"]["count"] == 2


def test_classify_text():
    code, out, _ = run_cli(["classify", fixture_path("doubleloop")])
    assert code == 0
    assert out.splitlines() == [
        "p1: finite(1)",
        "p2: uncountable",
        "p3: finite(1)",
    ]


def test_classify_json_includes_witness():
    code, out, _ = run_cli(
        ["classify", fixture_path("doubleloop"), "--format", "json"]
    )
    assert code == 0
    rows = {r["point"]: r for r in json.loads(out)}
    assert rows["p2"]["kind"] == "uncountable"
    assert rows["p2"]["count"] is None
    # the uncountable witness names a branching vertex, the finite one
    # lists the committed walks themselves
    assert rows["p2"]["witness"] == ["p2"]
    assert rows["p1"] == {
        "point": "p1",
        "kind": "finite",
        "count": 1,
        "witness": [[1]],
    }


def test_admissible_accepts_seesaw():
    code, out, _ = run_cli(["admissible", fixture_path("seesaw")])
    assert code == 0
    assert out == "admissible\n"


def test_admissible_rejects_collision():
    code, out, _ = run_cli(["admissible", fixture_path("collision")])
    assert code == 1
    assert out == "inadmissible: p1 and p3 share address (12)^∞\n"


def test_admissible_json_witness():
    code, out, _ = run_cli(
        ["admissible", fixture_path("collision"), "--format", "json"]
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["admissible"] is False
    assert doc["witness"]["points"] == ["p1", "p3"]
    assert doc["witness"]["cycle"] == [1, 2]
    assert doc["witness"]["shared_address"] == "(12)^∞"


# ---------------------------------------------------------------------------
# phi / diagram / gt / report


def test_phi_text_format():
    code, out, _ = run_cli(["phi", fixture_path("interval2")])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("phi_1 (")
    assert "deg=2" in lines[0]
    assert "image_size=2" in lines[0]
    assert "image={p1, p2}" in lines[0]


def test_phi_json_matches_fixture(expectations):
    code, out, _ = run_cli(["phi", fixture_path("sixmap"), "--format", "json"])
    assert code == 0
    rows = json.loads(out)
    want = expectations["sixmap"]["image_sizes"]
    for row in rows:
        assert row["image_size"] == want[str(row["index"])]
        assert len(row["image"]) == row["image_size"]


def test_diagram_and_gt_emit_dot():
    for cmd, name in [("diagram", "seesaw"), ("gt", "vicsek5")]:
        code, out, _ = run_cli([cmd, fixture_path(name)])
        assert code == 0
        assert out.startswith("digraph")
        assert out.rstrip().endswith("}")


def test_gt_requires_regular():
    code, _, err = run_cli(["gt", fixture_path("stub4")])
    assert code == 1
    assert "not-regular" in err


def test_report_outputs_rows():
    code, out, _ = run_cli(["report", fixture_path("sixmap")])
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 7
    assert {r["location"] for r in rows} >= {"p2", "p3", "4·p3"}


def test_report_refuses_inadmissible():
    code, _, err = run_cli(["report", fixture_path("collision")])
    assert code == 1
    assert "share the address" in err


# ---------------------------------------------------------------------------
# square / iso / extract / render


def test_square_emits_a_valid_sprout(tmp_path):
    code, out, _ = run_cli(["square", fixture_path("interval2"), "-n", "1"])
    assert code == 0
    doc = json.loads(out)
    assert len(doc["whites"]) == 4
    # the output is itself consumable by the CLI
    path = tmp_path / "sq.json"
    path.write_text(out, encoding="utf-8")
    code2, out2, _ = run_cli(["validate", str(path)])
    assert code2 == 0


def test_square_rejects_negative_n():
    code, _, err = run_cli(["square", fixture_path("interval2"), "-n", "-1"])
    assert code == 2
    assert "non-negative" in err


def test_iso_mapping_order():
    code, out, _ = run_cli(
        ["iso", fixture_path("interval2"), fixture_path("interval2_relabeled")]
    )
    assert code == 0
    mapping = json.loads(out)
    from sproutkit import load_sprout

    a = load_sprout(fixture_path("interval2"))
    assert list(mapping) == list(a.whites + a.blacks)


def test_iso_failure_exit():
    code, out, err = run_cli(
        ["iso", fixture_path("vicsek5"), fixture_path("vicsek5_twisted")]
    )
    assert code == 1
    assert out == ""
    assert "not isomorphic" in err


def test_extract_json_document():
    code, out, _ = run_cli(["extract", fixture_path("interval_ifs")])
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"sprout", "point_table", "diagnostics"}
    extracted = doc["sprout"]
    assert len(extracted["boundary"]) == 2
    names = {row["name"] for row in doc["point_table"]}
    assert set(extracted["blacks"]) == names


def test_extract_refuses_overlap():
    code, _, err = run_cli(["extract", fixture_path("overlap_ifs")])
    assert code == 1
    assert err != ""


def test_render_svg_output():
    code, out, _ = run_cli(["render", fixture_path("vicsek_ifs"), "--depth", "3"])
    assert code == 0
    assert out.startswith("<?xml") or out.startswith("<svg")
    assert "<circle" in out


def test_render_with_matching_sprout():
    code, out, _ = run_cli(
        ["render", fixture_path("interval_ifs"), "--sprout", fixture_path("interval2")]
    )
    assert code == 0
    assert "<text" in out
    assert ">p1<" in out and ">p2<" in out


def test_render_with_wrong_sprout_fails():
    code, _, err = run_cli(
        ["render", fixture_path("interval_ifs"), "--sprout", fixture_path("vicsek5")]
    )
    assert code == 1
    assert "not isomorphic" in err


# ---------------------------------------------------------------------------
# error handling and determinism


def test_usage_errors(tmp_path):
    assert run_cli([])[0] == 2
    assert run_cli(["frobnicate"])[0] == 2
    assert run_cli(["validate"])[0] == 2
    assert run_cli(["validate", str(tmp_path / "missing.json")])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run_cli(["validate", str(bad)])[0] == 2
    shallow = tmp_path / "shallow.json"
    shallow.write_text('{"whites": []}', encoding="utf-8")
    assert run_cli(["validate", str(shallow)])[0] == 2
    assert run_cli(["validate", fixture_path("interval2"), "--format", "yaml"])[0] == 2


def test_every_subcommand_is_deterministic():
    for argv in cli_matrix():
        first = run_cli(argv)
        second = run_cli(argv)
        assert first == second, argv
        assert first[0] in (0, 1)
