"""Boundary self-maps induced by the copies, and subset dynamics.

Rooting the tree at the white vertex w_i splits everything else into branches,
one per edge of w_i.  The i-th boundary map sends every boundary point in the
branch behind an edge to that edge's label; this is the combinatorial shadow
of "where does this contact point sit inside copy i".
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .model import Sprout, SproutError, validate


@dataclass(frozen=True)
class BoundaryMap:
    """A self-map of the boundary, stored as a position table.

    ``table[k]`` is the boundary position of the image of the k-th boundary
    point.  ``word`` records which map indices were composed, first applied
    first.
    """

    sprout: Sprout
    word: tuple[int, ...]
    table: tuple[int, ...]

    def apply(self, point: str) -> str:
        return self.sprout.boundary[self.table[self.sprout.boundary_pos[point]]]

    def image_mask(self, mask: int) -> int:
        out = 0
        k = 0
        while mask >> k:
            if mask >> k & 1:
                out |= 1 << self.table[k]
            k += 1
        return out

    def image_points(self, points: Iterable[str]) -> tuple[str, ...]:
        return self.sprout.points_of(self.image_mask(self.sprout.mask_of(points)))

    @property
    def image_size(self) -> int:
        return len(set(self.table))

    def then(self, later: "BoundaryMap") -> "BoundaryMap":
        """Composite map: self first, then ``later``."""
        if later.sprout is not self.sprout and later.sprout != self.sprout:
            raise SproutError("cannot compose boundary maps of different sprouts")
        return BoundaryMap(
            self.sprout,
            self.word + later.word,
            tuple(later.table[x] for x in self.table),
        )


@lru_cache(maxsize=None)
def boundary_map(s: Sprout, index: int) -> BoundaryMap:
    """The boundary self-map of the ``index``-th copy (1-based)."""
    if not 1 <= index <= s.num_whites:
        raise SproutError(f"map index {index} out of range 1..{s.num_whites}")
    w = s.white_name(index)
    # Which branch of the tree rooted at w does each boundary point sit in?
    branch_label: dict[str, str] = {}
    for e in s.edges_at_white[w]:
        stack = [e.black]
        seen = {w, e.black}
        while stack:
            v = stack.pop()
            if v in s.boundary_pos:
                branch_label[v] = e.label
            for u in s.neighbors[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    missing = [p for p in s.boundary if p not in branch_label]
    if missing:
        raise SproutError(
            f"boundary points {missing} unreachable from copy {index}; "
            f"the sprout is not connected"
        )
    table = tuple(s.boundary_pos[branch_label[p]] for p in s.boundary)
    return BoundaryMap(s, (index,), table)


def compose_boundary_maps(s: Sprout, word: Sequence[int]) -> BoundaryMap:
    """Composite of boundary maps along ``word``; word[0] is applied first."""
    if not word:
        return BoundaryMap(s, (), tuple(range(s.num_boundary)))
    out = boundary_map(s, word[0])
    for j in word[1:]:
        out = out.then(boundary_map(s, j))
    return out


def stable_image_size(s: Sprout, address) -> int:
    """Eventual cardinality of the boundary image along an address.

    Iterating subsets Q_{n+1} = (map along symbol n+1)(Q_n) from the full
    boundary, the cardinality is non-increasing, and once the eventually
    periodic address drives the subset orbit into a cycle the size is
    constant; that constant is returned.
    """
    mask = s.full_mask
    for sym in address.preperiod:
        mask = boundary_map(s, sym).image_mask(mask)
    period = address.period
    seen: set[tuple[int, int]] = set()
    pos = 0
    while (mask, pos) not in seen:
        seen.add((mask, pos))
        mask = boundary_map(s, period[pos]).image_mask(mask)
        pos = (pos + 1) % len(period)
    return mask.bit_count()


@dataclass(frozen=True)
class SubtreeView:
    """The minimal subtree spanning a vertex set, with its inner degrees."""

    vertices: frozenset[str]
    degrees: dict[str, int]
    boundary_inside: tuple[str, ...]

    def degree(self, v: str) -> int:
        return self.degrees.get(v, 0)


def steiner_subtree(s: Sprout, points: Iterable[str]) -> SubtreeView:
    """Minimal connected subtree containing ``points``.

    Computed by repeatedly pruning leaves that are not required, which is
    exact on trees.
    """
    required = set(points)
    for p in required:
        if p not in s.white_pos and p not in s.black_pos:
            raise SproutError(f"unknown vertex {p!r}")
    if not required:
        return SubtreeView(frozenset(), {}, ())
    alive: set[str] = set(s.whites) | set(s.blacks)
    deg = {v: len(s.neighbors[v]) for v in alive}
    queue = [v for v in alive if deg[v] <= 1 and v not in required]
    while queue:
        v = queue.pop()
        if v not in alive or deg[v] > 1 or v in required:
            continue
        alive.discard(v)
        for u in s.neighbors[v]:
            if u in alive:
                deg[u] -= 1
                if deg[u] <= 1 and u not in required:
                    queue.append(u)
    degrees = {
        v: sum(1 for u in s.neighbors[v] if u in alive) for v in alive
    }
    inside = tuple(p for p in s.boundary if p in alive)
    return SubtreeView(frozenset(alive), degrees, inside)


def is_full(s: Sprout, points: Iterable[str]) -> bool:
    """A boundary subset is full when its spanning subtree meets no other
    boundary point."""
    subset = set(points)
    unknown = subset - set(s.boundary)
    if unknown:
        raise SproutError(f"not boundary points: {sorted(unknown)}")
    return set(steiner_subtree(s, subset).boundary_inside) == subset


def complement_components(s: Sprout, index: int) -> int:
    """Number of attractor pieces hanging off copy ``index``.

    Removing the copy splits the rest of the attractor into one piece per
    branch image, except that a boundary point lying directly in the copy
    contributes no piece.  Requires a regular sprout, where every branch of a
    white vertex contains a boundary point.
    """
    report = validate(s)
    if not report.is_regular:
        raise SproutError(
            "complement component count is only defined for regular sprouts"
        )
    bm = boundary_map(s, index)
    w = s.white_name(index)
    adjacent_boundary = sum(
        1 for e in s.edges_at_white[w] if e.black in s.boundary_pos
    )
    return bm.image_size - adjacent_boundary
