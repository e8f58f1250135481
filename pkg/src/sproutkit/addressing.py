"""Index diagram on boundary points, symbolic addresses, and admissibility.

Every edge (w_k, p) whose black end p is a boundary point contributes an arc
p --k--> q in the index diagram, where q is the edge label.  Infinite walks
from p spell out the symbolic addresses of p: the sequences of map indices
under which p survives as a limit point.  Because outgoing arc labels at each
vertex are distinct, a walk is determined by its label sequence.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from ._walks import CommittedWalk, WalkSpace, WalkSpaceError
from .model import Sprout, SproutError, require_structural

FINITE = "finite"
COUNTABLY_INFINITE = "countably-infinite"
UNCOUNTABLE = "uncountable"


def _primitive_period(period: tuple[int, ...]) -> tuple[int, ...]:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and period[:d] * (n // d) == period:
            return period[:d]
    return period


@dataclass(frozen=True)
class Address:
    """Eventually periodic symbol sequence in canonical form.

    Canonical means the period is primitive and the preperiod is as short as
    possible: whenever the preperiod ends with the same symbol the period
    ends with, that symbol is absorbed by rotating the period.
    """

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    @staticmethod
    def make(preperiod: tuple[int, ...], period: tuple[int, ...]) -> "Address":
        if not period:
            raise ValueError("period must be non-empty")
        per = _primitive_period(tuple(period))
        pre = list(preperiod)
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = per[-1:] + per[:-1]
        return Address(tuple(pre), tuple(per))

    def expand(self, n: int) -> tuple[int, ...]:
        """First ``n`` symbols of the infinite sequence."""
        out = list(self.preperiod[:n])
        while len(out) < n:
            out.extend(self.period[: n - len(out)])
        return tuple(out)

    def prepend(self, symbols: tuple[int, ...]) -> "Address":
        return Address.make(tuple(symbols) + self.preperiod, self.period)

    def shift(self) -> "Address":
        """Drop the first symbol (the one-sided shift)."""
        if self.preperiod:
            return Address.make(self.preperiod[1:], self.period)
        return Address.make((), self.period[1:] + self.period[:1])

    def first(self) -> int:
        return self.preperiod[0] if self.preperiod else self.period[0]

    def render(self) -> str:
        return render_symbol_split(self.preperiod, self.period)

    def sort_key(self) -> tuple:
        return (self.preperiod, self.period)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.render()


def render_symbol_split(head: tuple[int, ...], cycle: tuple[int, ...]) -> str:
    """Render ``head`` then ``cycle`` repeated forever, e.g. ``112(12)^∞``.

    Symbols are concatenated without separators while all map indices are
    single digits, and dot-separated otherwise.
    """
    big = any(x > 9 for x in (*head, *cycle))
    sep = "." if big else ""
    return f"{sep.join(map(str, head))}({sep.join(map(str, cycle))})^∞"


@dataclass(frozen=True)
class AddressEntry:
    """One address of a boundary point, with its walk-order presentation.

    ``head``/``cycle`` follow the walk itself: symbols up to the first repeated
    diagram vertex, then the traversed cycle.  ``address`` is the canonical
    value, which may absorb part of the head into the period.
    """

    address: Address
    head: tuple[int, ...]
    cycle: tuple[int, ...]

    def display(self) -> str:
        return render_symbol_split(self.head, self.cycle)


@dataclass(frozen=True)
class AddressSet:
    """Classification of a boundary point's address set, with evidence.

    ``witness`` explains the verdict: the distinct terminal cycles (finite),
    a cycle-reaches-different-cycle vertex pair (countably infinite), or the
    vertices of a component carrying two distinct cycles (uncountable).
    ``note`` flags degenerate finite cases.
    """

    point: str
    kind: str  # finite | countably-infinite | uncountable
    count: int | None
    entries: tuple[AddressEntry, ...]
    witness: tuple = ()
    note: str | None = None

    @property
    def addresses(self) -> tuple[Address, ...]:
        return tuple(e.address for e in self.entries)


@dataclass(frozen=True)
class AdmissibilityWitness:
    point_a: str
    point_b: str
    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    @property
    def shared_address(self) -> Address:
        return Address.make(self.prefix, self.cycle)


@dataclass(frozen=True)
class AdmissibilityResult:
    admissible: bool
    witness: AdmissibilityWitness | None


@dataclass(frozen=True)
class CycleRelations:
    """Simple cycles of the diagram and their mutual reachability structure.

    Cycles are arc tuples; relations refer to cycles by position.  ``linked``
    and ``independent`` hold unordered pairs (i < j); ``precedes`` holds
    ordered pairs (i, j) with cycle i strictly one-way reaching cycle j;
    ``vertex_precedes`` lists (point, cycle index) pairs where the point
    strictly one-way reaches the cycle.
    """

    cycles: tuple[tuple, ...]
    linked: tuple[tuple[int, int], ...]
    precedes: tuple[tuple[int, int], ...]
    independent: tuple[tuple[int, int], ...]
    vertex_precedes: tuple[tuple[str, int], ...]

    def cycle_vertices(self, i: int) -> tuple[str, ...]:
        return tuple(a.src for a in self.cycles[i])

    def cycle_labels(self, i: int) -> tuple[int, ...]:
        return tuple(a.label for a in self.cycles[i])


class IndexDiagram:
    """Directed multigraph on boundary points with map-index arc labels."""

    def __init__(self, sprout: Sprout):
        require_structural(sprout)
        self.sprout = sprout
        arcs: list[tuple[str, str, int]] = []
        boundary = set(sprout.boundary)
        for e in sprout.edges:
            if e.black in boundary:
                arcs.append((e.black, e.label, sprout.white_index(e.white)))
        arcs.sort(
            key=lambda a: (
                sprout.boundary_pos[a[0]],
                a[2],
                sprout.boundary_pos[a[1]],
            )
        )
        self.arcs = tuple(arcs)
        self._check_injectivity()
        self.space: WalkSpace[str, int] = WalkSpace(sprout.boundary, self.arcs)

    def _check_injectivity(self) -> None:
        out_seen: set[tuple[str, int]] = set()
        in_seen: set[tuple[str, int]] = set()
        for src, dst, label in self.arcs:
            if (src, label) in out_seen:
                raise SproutError(
                    f"outgoing labels at {src} are not distinct (label {label})"
                )
            if (dst, label) in in_seen:
                raise SproutError(
                    f"incoming labels at {dst} are not distinct (label {label})"
                )
            out_seen.add((src, label))
            in_seen.add((dst, label))

    # -- walks and addresses -------------------------------------------------

    def out_degree(self, p: str) -> int:
        return len(self.space.out[p])

    def step(self, p: str, label: int) -> str | None:
        """Follow the unique arc with the given label, if present."""
        for a in self.space.out[p]:
            if a.label == label:
                return a.dst
        return None

    def addresses_of(self, p: str) -> AddressSet:
        if p not in self.sprout.boundary_pos:
            raise SproutError(f"{p!r} is not a boundary point")
        cls = self.space.classify(p)
        if not cls.is_finite:
            return AddressSet(p, cls.kind, None, (), cls.witness)
        entries = tuple(walk_entry(w) for w in self.space.committed_walks(p))
        if len({e.address for e in entries}) != len(entries):
            raise SproutError(
                f"distinct walks from {p} produced equal addresses; "
                f"the diagram labels are inconsistent"
            )
        note = (
            "combinatorially boundary-less: no infinite walk leaves this vertex"
            if not entries
            else None
        )
        return AddressSet(p, FINITE, len(entries), entries, cls.witness, note)

    def all_address_sets(self) -> dict[str, AddressSet]:
        return {p: self.addresses_of(p) for p in self.sprout.boundary}

    def uniform_address_bound(self) -> int | None:
        """Upper bound for the number of addresses of any single point.

        Every address of any point of the attractor continues into an
        infinite walk from some boundary point, and distinct addresses of one
        point give distinct walks, so the total number of committed walks
        over all boundary points is a bound.  None when some address set is
        infinite.
        """
        sets = self.all_address_sets()
        if any(a.kind != FINITE for a in sets.values()):
            return None
        return sum(a.count or 0 for a in sets.values())

    # -- address membership ----------------------------------------------------

    def trace(self, p: str, address: Address) -> bool:
        """True when the address spells an infinite walk starting at ``p``.

        Follows the preperiod, then runs the period until the (vertex,
        position-in-period) pair repeats.
        """
        cur: str | None = p
        for sym in address.preperiod:
            cur = self.step(cur, sym)
            if cur is None:
                return False
        seen: set[tuple[str, int]] = set()
        pos = 0
        while (cur, pos) not in seen:
            seen.add((cur, pos))
            cur = self.step(cur, address.period[pos])
            if cur is None:
                return False
            pos = (pos + 1) % len(address.period)
        return True

    def points_with_address(self, address: Address) -> tuple[str, ...]:
        return tuple(p for p in self.sprout.boundary if self.trace(p, address))

    # -- admissibility -----------------------------------------------------------

    @cached_property
    def pair_space(self) -> WalkSpace[tuple[str, str], int]:
        """Synchronized dynamics on unordered pairs of distinct boundary points.

        Incoming-label injectivity guarantees two distinct points never map
        to the same point under a shared symbol, so the pair set is closed.
        """
        pos = self.sprout.boundary_pos
        pairs = [
            (a, b)
            for i, a in enumerate(self.sprout.boundary)
            for b in self.sprout.boundary[i + 1 :]
        ]
        arcs: list[tuple[tuple[str, str], tuple[str, str], int]] = []
        for a, b in pairs:
            labels_a = {arc.label: arc.dst for arc in self.space.out[a]}
            labels_b = {arc.label: arc.dst for arc in self.space.out[b]}
            for label in sorted(labels_a.keys() & labels_b.keys()):
                na, nb = labels_a[label], labels_b[label]
                if na == nb:
                    raise SproutError(
                        f"points {a} and {b} merge under map {label}; "
                        f"incoming labels are not injective"
                    )
                dst = (na, nb) if pos[na] < pos[nb] else (nb, na)
                arcs.append(((a, b), dst, label))
        return WalkSpace(pairs, arcs)

    def check_admissibility(self) -> AdmissibilityResult:
        """A sprout is admissible when no two boundary points share an address.

        Two points share an address exactly when the synchronized pair
        dynamics admits an infinite run, i.e. some pair reaches a cycle.
        """
        space = self.pair_space
        for pair in space.vertices:
            cyclic = [
                v for v in space.vertices
                if space.is_cyclic_vertex(v) and v in space.reachable_from(pair)
            ]
            if not cyclic:
                continue
            prefix, entry = _shortest_path(space, pair, set(cyclic))
            cycle = _shortest_cycle(space, entry)
            return AdmissibilityResult(
                False,
                AdmissibilityWitness(
                    pair[0],
                    pair[1],
                    tuple(a.label for a in prefix),
                    tuple(a.label for a in cycle),
                ),
            )
        return AdmissibilityResult(True, None)

    # -- cycle structure -----------------------------------------------------------

    def cycle_relations(self, cap: int = 10_000) -> "CycleRelations":
        """All simple cycles and how they relate to each other.

        Two cycles are *linked* when each can reach the other (sharing a
        vertex is a special case), one *precedes* the other when only one
        direction of reachability holds, and they are *independent* when
        neither does.  A vertex precedes a cycle when it reaches the cycle
        but the cycle cannot return to it.  Raises for more than ``cap``
        cycles; classification does not need the explicit list.
        """
        try:
            cycles = self.space.simple_cycles(cap)
        except WalkSpaceError as exc:
            raise SproutError(
                f"{exc}; use address-set classification, which avoids "
                f"explicit cycle enumeration"
            ) from exc
        vertex_sets = [frozenset(a.src for a in cyc) for cyc in cycles]
        reach = {v: self.space.reachable_from(v) for v in self.sprout.boundary}
        # A cycle's vertices are mutually reachable, so one representative
        # decides reachability for the whole cycle.
        pos = self.sprout.boundary_pos
        rep = [min(vs, key=pos.get) for vs in vertex_sets]

        def reaches(i: int, j: int) -> bool:
            return bool(vertex_sets[j] & reach[rep[i]])

        linked: list[tuple[int, int]] = []
        precedes: list[tuple[int, int]] = []
        independent: list[tuple[int, int]] = []
        for i in range(len(cycles)):
            for j in range(i + 1, len(cycles)):
                fwd, back = reaches(i, j), reaches(j, i)
                if fwd and back:
                    linked.append((i, j))
                elif fwd:
                    precedes.append((i, j))
                elif back:
                    precedes.append((j, i))
                else:
                    independent.append((i, j))
        vertex_precedes = tuple(
            (p, j)
            for p in self.sprout.boundary
            for j in range(len(cycles))
            if vertex_sets[j] & reach[p] and p not in reach[rep[j]]
        )
        return CycleRelations(
            cycles=tuple(cycles),
            linked=tuple(linked),
            precedes=tuple(precedes),
            independent=tuple(independent),
            vertex_precedes=vertex_precedes,
        )

    # -- export -----------------------------------------------------------------

    def to_dot(self) -> str:
        lines = ["digraph index_diagram {"]
        for p in self.sprout.boundary:
            lines.append(f'  "{p}";')
        for src, dst, label in self.arcs:
            lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def walk_entry(walk: CommittedWalk) -> AddressEntry:
    head, cycle = walk.display_split()
    pre, per = walk.label_pair()
    return AddressEntry(Address.make(pre, per), head, cycle)


def walk_multiindex(arcs) -> tuple[int, ...]:
    """Label sequence of a finite walk; the walk's start point equals the
    composite map along these labels applied to its end point."""
    arcs = tuple(arcs)
    for a, b in zip(arcs, arcs[1:]):
        if a.dst != b.src:
            raise SproutError(
                f"walk is not contiguous: arc into {a.dst!r} followed by "
                f"arc out of {b.src!r}"
            )
    return tuple(a.label for a in arcs)


def _shortest_path(space: WalkSpace, start, targets: set):
    """BFS path (as arcs) from start to the nearest target; deterministic."""
    if start in targets:
        return (), start
    parent = {start: None}
    queue = [start]
    while queue:
        nxt = []
        for v in queue:
            for a in space.out[v]:
                if a.dst not in parent:
                    parent[a.dst] = a
                    if a.dst in targets:
                        arcs = []
                        cur = a.dst
                        while parent[cur] is not None:
                            arcs.append(parent[cur])
                            cur = parent[cur].src
                        return tuple(reversed(arcs)), a.dst
                    nxt.append(a.dst)
        queue = nxt
    raise WalkSpaceError("no target reachable")


def _shortest_cycle(space: WalkSpace, v):
    """Shortest arc cycle through ``v``, found by BFS back to ``v``."""
    best = None
    for first in space.out[v]:
        if first.dst == v:
            return (first,)
        try:
            arcs, _ = _shortest_path(space, first.dst, {v})
        except WalkSpaceError:
            continue
        cand = (first, *arcs)
        if best is None or len(cand) < len(best):
            best = cand
    if best is None:
        raise WalkSpaceError(f"no cycle through {v!r}")
    return best
