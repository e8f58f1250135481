import contextlib
import io
import json
import pathlib

import pytest

from sproutkit import Sprout, parse_sprout
from sproutkit.cli import run

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "src" / "sproutkit" / "fixtures"

SPROUT_FIXTURES = [
    "interval2",
    "interval2_relabeled",
    "vicsek5",
    "vicsek5_twisted",
    "seesaw",
    "gap3",
    "stub4",
    "collision",
    "doubleloop",
    "sixmap",
    "chain5",
    "star3",
]

IFS_FIXTURES = ["interval_ifs", "vicsek_ifs", "overlap_ifs"]


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


def fixture_doc(name: str) -> dict:
    with open(fixture_path(name), encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def sprouts() -> dict[str, Sprout]:
    """Every sprout fixture, parsed once."""
    return {name: parse_sprout(fixture_doc(name)) for name in SPROUT_FIXTURES}


@pytest.fixture(scope="session")
def expectations() -> dict[str, dict]:
    return {name: fixture_doc(name).get("expected", {}) for name in SPROUT_FIXTURES}


def run_cli(argv: list[str]) -> tuple[int, str, str]:
    """Run one CLI invocation in-process, capturing both streams."""
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = run(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def cli_matrix() -> list[list[str]]:
    """One representative invocation per subcommand and format."""
    return [
        ["validate", fixture_path("interval2")],
        ["validate", fixture_path("interval2"), "--format", "json"],
        ["diagram", fixture_path("seesaw")],
        ["addresses", fixture_path("seesaw")],
        ["addresses", fixture_path("seesaw"), "-p", "p4"],
        ["addresses", fixture_path("seesaw"), "--format", "json"],
        ["classify", fixture_path("doubleloop")],
        ["classify", fixture_path("doubleloop"), "--format", "json"],
        ["admissible", fixture_path("seesaw")],
        ["admissible", fixture_path("collision"), "--format", "json"],
        ["phi", fixture_path("sixmap")],
        ["phi", fixture_path("sixmap"), "--format", "json"],
        ["gt", fixture_path("vicsek5")],
        ["report", fixture_path("sixmap")],
        ["square", fixture_path("interval2"), "-n", "1"],
        ["iso", fixture_path("interval2"), fixture_path("interval2_relabeled")],
        ["extract", fixture_path("interval_ifs")],
        ["render", fixture_path("vicsek_ifs"), "--depth", "4"],
        ["render", fixture_path("interval_ifs"), "--sprout", fixture_path("interval2")],
    ]
