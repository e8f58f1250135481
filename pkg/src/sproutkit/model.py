"""Core data model: labeled bipartite contact trees ("sprouts") and their validation.

A sprout records how the pieces of a finitely ramified self-similar set touch
each other: white vertices stand for the first-level copies, black vertices for
contact points, and every edge (w, b) carries a label q -- the boundary point
whose image under the w-th map is b.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable


class SproutError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SproutError):
    """A document is malformed or internally inconsistent."""


@dataclass(frozen=True)
class Edge:
    white: str
    black: str
    label: str


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: str
    message: str


@dataclass(frozen=True)
class Sprout:
    """Immutable labeled bipartite tree with a distinguished boundary subset.

    ``boundary`` keeps its declaration order; that order is the canonical
    order of boundary points used for subset bitmasks everywhere else.
    """

    whites: tuple[str, ...]
    blacks: tuple[str, ...]
    boundary: tuple[str, ...]
    edges: tuple[Edge, ...]

    # -- dense index maps ---------------------------------------------------

    @cached_property
    def white_pos(self) -> dict[str, int]:
        return {w: k for k, w in enumerate(self.whites)}

    @cached_property
    def black_pos(self) -> dict[str, int]:
        return {b: k for k, b in enumerate(self.blacks)}

    @cached_property
    def boundary_pos(self) -> dict[str, int]:
        return {p: k for k, p in enumerate(self.boundary)}

    def white_index(self, name: str) -> int:
        """1-based index of a white vertex, matching the map index set."""
        return self.white_pos[name] + 1

    def white_name(self, index: int) -> str:
        return self.whites[index - 1]

    @property
    def num_whites(self) -> int:
        return len(self.whites)

    @property
    def num_boundary(self) -> int:
        return len(self.boundary)

    # -- adjacency ----------------------------------------------------------

    @cached_property
    def edges_at_white(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {w: [] for w in self.whites}
        for e in self.edges:
            out[e.white].append(e)
        return {w: tuple(v) for w, v in out.items()}

    @cached_property
    def edges_at_black(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {b: [] for b in self.blacks}
        for e in self.edges:
            out[e.black].append(e)
        return {b: tuple(v) for b, v in out.items()}

    def degree(self, vertex: str) -> int:
        if vertex in self.white_pos:
            return len(self.edges_at_white[vertex])
        return len(self.edges_at_black[vertex])

    @cached_property
    def neighbors(self) -> dict[str, tuple[str, ...]]:
        """Vertex adjacency over the shared white/black namespace."""
        out: dict[str, list[str]] = {v: [] for v in (*self.whites, *self.blacks)}
        for e in self.edges:
            out[e.white].append(e.black)
            out[e.black].append(e.white)
        return {v: tuple(sorted(set(n))) for v, n in out.items()}

    @cached_property
    def critical_set(self) -> tuple[str, ...]:
        """Black vertices lying in more than one copy, in declaration order."""
        return tuple(b for b in self.blacks if self.degree(b) > 1)

    # -- subsets of the boundary as bitmasks --------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << len(self.boundary)) - 1

    def mask_of(self, points: Iterable[str]) -> int:
        m = 0
        for p in points:
            m |= 1 << self.boundary_pos[p]
        return m

    def points_of(self, mask: int) -> tuple[str, ...]:
        return tuple(p for k, p in enumerate(self.boundary) if mask >> k & 1)

    # -- serialization -------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "whites": list(self.whites),
            "blacks": list(self.blacks),
            "boundary": list(self.boundary),
            "edges": [{"w": e.white, "b": e.black, "label": e.label} for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), indent=2, ensure_ascii=False) + "\n"


def parse_sprout(doc: dict | str) -> Sprout:
    """Parse and structurally check a sprout document.

    Raises ParseError for malformed syntax, duplicate ids, dangling vertex
    references, labels outside the declared boundary, or repeated
    (white, black) pairs.
    """
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    for key in ("whites", "blacks", "boundary", "edges"):
        if key not in doc:
            raise ParseError(f"missing required key {key!r}")
    whites = _string_list(doc["whites"], "whites")
    blacks = _string_list(doc["blacks"], "blacks")
    boundary = _string_list(doc["boundary"], "boundary")
    seen: set[str] = set()
    for name in (*whites, *blacks):
        if name in seen:
            raise ParseError(f"duplicate id {name!r}")
        seen.add(name)
    black_set = set(blacks)
    bset: set[str] = set()
    for p in boundary:
        if p not in black_set:
            raise ParseError(f"boundary point {p!r} is not a declared black vertex")
        if p in bset:
            raise ParseError(f"duplicate boundary point {p!r}")
        bset.add(p)
    if not isinstance(doc["edges"], list):
        raise ParseError("edges must be a list")
    edges: list[Edge] = []
    pairs: set[tuple[str, str]] = set()
    white_set = set(whites)
    for k, raw in enumerate(doc["edges"]):
        if not isinstance(raw, dict) or not {"w", "b", "label"} <= raw.keys():
            raise ParseError(f"edge #{k} must be an object with keys w, b, label")
        w, b, label = raw["w"], raw["b"], raw["label"]
        if w not in white_set:
            raise ParseError(f"edge #{k}: unknown white vertex {w!r}")
        if b not in black_set:
            raise ParseError(f"edge #{k}: unknown black vertex {b!r}")
        if label not in bset:
            raise ParseError(f"edge #{k}: label {label!r} is not a boundary point")
        if (w, b) in pairs:
            raise ParseError(f"edge #{k}: repeated pair ({w!r}, {b!r})")
        pairs.add((w, b))
        edges.append(Edge(w, b, label))
    return Sprout(tuple(whites), tuple(blacks), tuple(boundary), tuple(edges))


def _string_list(value, key: str) -> list[str]:
    if not isinstance(value, list) or not all(isinstance(x, str) and x for x in value):
        raise ParseError(f"{key} must be a list of non-empty strings")
    return list(value)


def load_sprout(path) -> Sprout:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_sprout(fh.read())


@dataclass(frozen=True)
class ValidationReport:
    structural_ok: bool
    critical_set: tuple[str, ...]
    sprout_boundary: tuple[str, ...]
    is_correct: bool
    is_regular: bool
    violations: tuple[Violation, ...]
    notes: tuple[str, ...] = ()
    boundary_iterations: int = 0

    def to_document(self) -> dict:
        return {
            "structural_ok": self.structural_ok,
            "critical_set": list(self.critical_set),
            "sprout_boundary": list(self.sprout_boundary),
            "is_correct": self.is_correct,
            "is_regular": self.is_regular,
            "violations": [
                {"rule": v.rule, "witness": v.witness, "message": v.message}
                for v in self.violations
            ],
            "notes": list(self.notes),
        }


def sprout_boundary(s: Sprout) -> tuple[set[str], int]:
    """Least fixed point of label propagation from the critical set.

    Returns the generated boundary set together with the number of
    iterations until stabilization (at most #P plus one).
    """
    result: set[str] = set()
    frontier: set[str] = set(s.critical_set)
    iterations = 0
    while True:
        new: set[str] = set()
        for b in frontier:
            for e in s.edges_at_black.get(b, ()):
                new.add(e.label)
        iterations += 1
        if new <= result:
            break
        frontier = new - result
        result |= new
    return result, iterations


def validate(s: Sprout) -> ValidationReport:
    """Full validation: structure, correctness and regularity.

    All violations are accumulated; nothing raises.  ``is_regular`` means
    "correct and no spurious degree-one vertex": every black vertex outside
    the boundary and every white vertex must lie in at least two edges.
    """
    violations: list[Violation] = []
    notes: list[str] = []

    n_vertices = len(s.whites) + len(s.blacks)
    tree_ok = len(s.edges) == n_vertices - 1
    if not tree_ok:
        violations.append(
            Violation(
                "not-a-tree",
                f"{len(s.edges)} edges",
                f"a tree on {n_vertices} vertices needs {n_vertices - 1} edges, "
                f"found {len(s.edges)}",
            )
        )
    connected = _is_connected(s)
    if not connected:
        violations.append(
            Violation("disconnected", "", "the bipartite graph is not connected")
        )

    injective = True
    for w in s.whites:
        labels = [e.label for e in s.edges_at_white[w]]
        if len(labels) != len(set(labels)):
            injective = False
            dup = sorted({x for x in labels if labels.count(x) > 1})
            violations.append(
                Violation(
                    "label-injectivity",
                    w,
                    f"white vertex {w} carries repeated labels {dup}",
                )
            )

    used_labels = {e.label for e in s.edges}
    surjective = set(s.boundary) <= used_labels
    for p in s.boundary:
        if p not in used_labels:
            violations.append(
                Violation(
                    "label-surjectivity",
                    p,
                    f"boundary point {p} never occurs as an edge label",
                )
            )

    generated, iterations = sprout_boundary(s)
    is_correct = generated == set(s.boundary)
    if not is_correct:
        for p in sorted(set(s.boundary) - generated):
            violations.append(
                Violation(
                    "not-correct",
                    p,
                    f"sprout is not correctly defined: boundary point {p} is not "
                    f"generated from the critical set",
                )
            )
        for p in sorted(generated - set(s.boundary)):
            violations.append(
                Violation(
                    "not-correct",
                    p,
                    f"sprout is not correctly defined: generated point {p} is not "
                    f"declared in the boundary",
                )
            )

    degree_ok = True
    boundary_set = set(s.boundary)
    for b in s.blacks:
        if b not in boundary_set and s.degree(b) <= 1:
            degree_ok = False
            violations.append(
                Violation(
                    "not-regular",
                    b,
                    f"sprout is not regular: non-boundary black vertex {b} has "
                    f"degree {s.degree(b)}",
                )
            )
    for w in s.whites:
        if s.degree(w) <= 1:
            degree_ok = False
            violations.append(
                Violation(
                    "not-regular",
                    w,
                    f"sprout is not regular: white vertex {w} has degree {s.degree(w)}",
                )
            )
    is_regular = is_correct and degree_ok

    for e in s.edges:
        if e.black in boundary_set:
            notes.append(
                f"boundary point {e.black} lies directly in copy {e.white} "
                f"(degenerate incidence, allowed)"
            )

    structural_ok = tree_ok and connected and injective and surjective
    return ValidationReport(
        structural_ok=structural_ok,
        critical_set=s.critical_set,
        sprout_boundary=tuple(sorted(generated)),
        is_correct=is_correct,
        is_regular=is_regular,
        violations=tuple(violations),
        notes=tuple(notes),
        boundary_iterations=iterations,
    )


def _is_connected(s: Sprout) -> bool:
    vertices = (*s.whites, *s.blacks)
    if not vertices:
        return True
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        v = stack.pop()
        for u in s.neighbors[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == len(vertices)


def require_structural(s: Sprout) -> ValidationReport:
    """Raise unless the sprout is structurally sound (tree, injective, surjective)."""
    report = validate(s)
    if not report.structural_ok:
        msgs = "; ".join(v.message for v in report.violations)
        raise SproutError(f"sprout fails structural validation: {msgs}")
    return report
