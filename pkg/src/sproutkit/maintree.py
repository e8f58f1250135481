"""Subset dynamics, walk enumeration, and branch orders of special points.

The boundary maps push the full boundary set around; tracking every image of
size at least three in a directed graph surfaces the finitely many symbolic
locations where the attractor's inner tree can branch.  Walks of that graph
are converted back into concrete points -- boundary points, contact vertices,
their map images, or interior limit points -- and each point's branching
order is computed from its full symbolic address set.

The key primitive is *resolution*: given one address of a point, find the
shortest factorization ``x = S_word(vertex)`` by shifting the address until
the tail lands in some vertex's address set.  Distinct vertices have disjoint
address sets, so the factorization is canonical and lets reports merge every
way of reaching the same point into a single row.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from ._walks import WalkSpace
from .addressing import (
    FINITE,
    Address,
    AddressSet,
    IndexDiagram,
    _shortest_cycle,
    _shortest_path,
)
from .model import Sprout, SproutError, validate
from .phi import boundary_map, stable_image_size, steiner_subtree

INFINITE = "Infinite"

_KIND_BOUNDARY = "boundary"
_KIND_CRITICAL = "critical"
_KIND_IMAGE = "image"
_KIND_INTERIOR = "interior"


class InfiniteAddressSet(SproutError):
    """Raised when an operation needs a finite address set but the point
    has infinitely many addresses; carries the classification evidence."""

    def __init__(self, message: str, classification: AddressSet):
        super().__init__(message)
        self.classification = classification


def render_word(word: Sequence[int]) -> str:
    sep = "." if any(x > 9 for x in word) else ""
    return sep.join(map(str, word))


@dataclass(frozen=True)
class Location:
    """Canonical symbolic location of a point.

    Vertex-rooted points carry the (possibly empty) map word and the vertex
    name; points that are no map image of any vertex carry their single
    address instead.
    """

    word: tuple[int, ...]
    base: str | None
    address: Address | None = None

    def render(self) -> str:
        if self.base is None:
            assert self.address is not None
            return self.address.render()
        if not self.word:
            return self.base
        return f"{render_word(self.word)}·{self.base}"

    def key(self) -> tuple:
        if self.base is None:
            return ("interior", self.address.sort_key())
        return ("vertex", self.word, self.base)


class AddressResolver:
    """Shared address machinery over one sprout: per-vertex address sets,
    membership tests, and shortest-factorization resolution."""

    def __init__(self, sprout: Sprout, diagram: IndexDiagram | None = None):
        self.sprout = sprout
        self.diagram = diagram if diagram is not None else IndexDiagram(sprout)
        self._boundary_sets: dict[str, AddressSet] = {}
        self._vertex_data: dict[str, tuple[str, tuple[Address, ...] | None]] = {}

    # -- per-vertex address sets ----------------------------------------------

    def boundary_set(self, p: str) -> AddressSet:
        if p not in self._boundary_sets:
            self._boundary_sets[p] = self.diagram.addresses_of(p)
        return self._boundary_sets[p]

    def vertex_data(self, v: str) -> tuple[str, tuple[Address, ...] | None]:
        """(class, sorted addresses or None when infinite) for any black vertex."""
        if v in self._vertex_data:
            return self._vertex_data[v]
        s = self.sprout
        if v in s.boundary_pos:
            aset = self.boundary_set(v)
            addrs = (
                tuple(sorted(aset.addresses, key=Address.sort_key))
                if aset.kind == FINITE
                else None
            )
            out = (aset.kind, addrs)
        elif v in s.black_pos:
            kinds: list[str] = []
            collected: list[Address] = []
            for e in s.edges_at_black[v]:
                k = s.white_index(e.white)
                sub = self.boundary_set(e.label)
                kinds.append(sub.kind)
                if sub.kind == FINITE:
                    collected.extend(a.prepend((k,)) for a in sub.addresses)
            if "uncountable" in kinds:
                out = ("uncountable", None)
            elif "countably-infinite" in kinds:
                out = ("countably-infinite", None)
            else:
                addrs = tuple(sorted(collected, key=Address.sort_key))
                if len(set(addrs)) != len(addrs):
                    raise SproutError(
                        f"different edges at {v} produced the same address; "
                        f"per-white labels are not injective"
                    )
                out = (FINITE, addrs)
        else:
            raise SproutError(f"{v!r} is not a black vertex")
        self._vertex_data[v] = out
        return out

    def vertex_addresses(self, v: str) -> tuple[Address, ...]:
        kind, addrs = self.vertex_data(v)
        if addrs is None:
            payload = (
                self.boundary_set(v)
                if v in self.sprout.boundary_pos
                else AddressSet(v, kind, None, ())
            )
            raise InfiniteAddressSet(
                f"{v} has a {kind} address set; cannot enumerate", payload
            )
        return addrs

    def some_address(self, v: str) -> Address:
        """One eventually periodic address of a vertex, also when the full
        set is infinite."""
        kind, addrs = self.vertex_data(v)
        if addrs is not None:
            if not addrs:
                raise SproutError(f"{v} has no address at all")
            return addrs[0]
        if v in self.sprout.boundary_pos:
            space = self.diagram.space
            cyclic = {
                u
                for u in space.reachable_from(v)
                if space.is_cyclic_vertex(u)
            }
            prefix, entry = _shortest_path(space, v, cyclic)
            cycle = _shortest_cycle(space, entry)
            return Address.make(
                tuple(a.label for a in prefix), tuple(a.label for a in cycle)
            )
        e = self.sprout.edges_at_black[v][0]
        k = self.sprout.white_index(e.white)
        return self.some_address(e.label).prepend((k,))

    # -- membership and resolution ----------------------------------------------

    def member(self, v: str, address: Address) -> bool:
        """Exact test whether ``address`` belongs to the vertex's address set."""
        s = self.sprout
        if v in s.boundary_pos:
            return self.diagram.trace(v, address)
        if v not in s.black_pos:
            raise SproutError(f"{v!r} is not a black vertex")
        first = address.first()
        for e in s.edges_at_black[v]:
            if s.white_index(e.white) == first:
                return self.diagram.trace(e.label, address.shift())
        return False

    @cached_property
    def _vertex_order(self) -> tuple[str, ...]:
        s = self.sprout
        rest = tuple(b for b in s.blacks if b not in s.boundary_pos)
        return s.boundary + rest

    def resolve(self, address: Address) -> Location:
        """Shortest factorization of the point with the given address.

        Shifting an eventually periodic address cycles after preperiod +
        period many steps, so only that many shifts need testing; if none of
        them lands in a vertex address set, the point is not a map image of
        any vertex and its address set is the singleton ``{address}``.
        """
        limit = len(address.preperiod) + len(address.period)
        cur = address
        for n in range(limit):
            for v in self._vertex_order:
                if self.member(v, cur):
                    return Location(address.expand(n), v)
            cur = cur.shift()
        return Location((), None, address)

    def location_of(self, loc) -> Location:
        """Normalize user-facing location inputs to a canonical Location.

        Accepts a vertex name, an Address, or a (word, vertex name) pair.
        """
        s = self.sprout
        if isinstance(loc, Address):
            return self.resolve(loc)
        if isinstance(loc, str):
            if loc not in s.black_pos:
                raise SproutError(f"{loc!r} is not a black vertex")
            return Location((), loc)
        word, base = loc
        word = tuple(word)
        if base not in s.black_pos:
            raise SproutError(f"{base!r} is not a black vertex")
        if any(not 1 <= k <= s.num_whites for k in word):
            raise SproutError(f"word {word} uses map indices outside 1..{s.num_whites}")
        if not word:
            return Location((), base)
        return self.resolve(self.some_address(base).prepend(word))

    def location_data(
        self, location: Location
    ) -> tuple[str, tuple[Address, ...] | None]:
        """(class, full sorted address set or None) of a resolved location."""
        if location.base is None:
            return (FINITE, (location.address,))
        kind, addrs = self.vertex_data(location.base)
        if addrs is None:
            return (kind, None)
        prefixed = tuple(
            sorted((a.prepend(location.word) for a in addrs), key=Address.sort_key)
        )
        return (kind, prefixed)


# -- transformation graph --------------------------------------------------------


@dataclass(frozen=True)
class GraphWalk:
    """One relevant walk: an infinite run into a subset cycle, or a finite
    run ending at a terminal black/boundary vertex."""

    kind: str  # "cycle" | "black" | "boundary"
    word: tuple[int, ...]
    cycle: tuple[int, ...] = ()
    terminal: str | None = None

    def address(self) -> Address:
        if self.kind != "cycle":
            raise SproutError("only cycle walks define an address")
        return Address.make(self.word, self.cycle)


class TransformationGraph:
    """Directed graph tracking boundary-subset images of size at least 3.

    Subset vertices are bitmasks over the boundary.  Labeled arcs follow one
    boundary map when the image again has size >= 3; unlabeled terminal arcs
    point at black vertices of degree >= 3 or boundary points of degree >= 2
    inside the subset's spanning subtree.
    """

    def __init__(self, sprout: Sprout):
        report = validate(sprout)
        if not report.is_correct:
            raise SproutError("subset graph requires a correctly defined sprout")
        if not report.is_regular:
            raise SproutError("subset graph requires a regular sprout")
        self.sprout = sprout
        s = sprout

        vq: list[int] = []
        eq: list[tuple[int, int, int]] = []
        if s.num_boundary >= 3:
            vq.append(s.full_mask)
            seen = {s.full_mask}
            frontier = [s.full_mask]
            while frontier:
                nxt: list[int] = []
                for mask in frontier:
                    for i in range(1, s.num_whites + 1):
                        img = boundary_map(s, i).image_mask(mask)
                        if img.bit_count() < 3:
                            continue
                        eq.append((mask, img, i))
                        if img not in seen:
                            seen.add(img)
                            vq.append(img)
                            nxt.append(img)
                frontier = nxt
        self.vq = tuple(vq)
        self.eq = tuple(eq)

        eb: list[tuple[int, str]] = []
        ep: list[tuple[int, str]] = []
        for mask in self.vq:
            points = s.points_of(mask)
            inside = set(points)
            sub = steiner_subtree(s, points)
            for b in s.blacks:
                if b in sub.vertices and b not in inside and sub.degree(b) >= 3:
                    eb.append((mask, b))
            for p in points:
                if sub.degree(p) >= 2:
                    ep.append((mask, p))
        self.eb = tuple(eb)
        self.ep = tuple(ep)

        self.vb = tuple(b for b in s.blacks if len(s.neighbors[b]) >= 3)
        self.vp = tuple(p for p in s.boundary if len(s.neighbors[p]) >= 2)

        self.space: WalkSpace[int, int] = WalkSpace(
            self.vq, [(a, b, i) for a, b, i in self.eq]
        )
        self._assert_invariants()

    def _assert_invariants(self) -> None:
        terminal_out: dict[int, int] = {mask: 0 for mask in self.vq}
        for mask, _ in self.eb:
            terminal_out[mask] += 1
        for mask, _ in self.ep:
            terminal_out[mask] += 1
        eq_out: dict[int, int] = {mask: 0 for mask in self.vq}
        for mask, _, _ in self.eq:
            eq_out[mask] += 1
        for mask in self.vq:
            if eq_out[mask] + terminal_out[mask] < 1:
                raise SproutError(
                    f"subset {self._subset_name(mask)} has no outgoing arc; "
                    f"every reachable subset must map forward under some symbol"
                )
            if self.space.is_cyclic_vertex(mask):
                if eq_out[mask] != 1 or terminal_out[mask] != 0:
                    raise SproutError(
                        f"cyclic subset {self._subset_name(mask)} must have "
                        f"exactly one outgoing arc, found {eq_out[mask]} "
                        f"labeled and {terminal_out[mask]} terminal"
                    )

    def _subset_name(self, mask: int) -> str:
        return "{" + ",".join(self.sprout.points_of(mask)) + "}"

    def subsets(self) -> tuple[tuple[str, ...], ...]:
        return tuple(self.sprout.points_of(mask) for mask in self.vq)

    def walks(self) -> tuple[GraphWalk, ...]:
        """The complete finite set of relevant walks from the full boundary.

        Infinite walks commit to a subset cycle; cyclic subsets have a
        unique outgoing arc, so each transient simple path contributes one
        walk.  Finite walks follow a simple labeled path and end with one
        terminal arc; cyclic subsets carry no terminal arcs, so these paths
        stay in the transient part and are finitely many.
        """
        s = self.sprout
        if s.full_mask not in set(self.vq):
            return ()
        out: list[GraphWalk] = []
        for w in self.space.committed_walks(s.full_mask):
            walk = GraphWalk(
                "cycle",
                tuple(a.label for a in w.prefix),
                tuple(a.label for a in w.cycle),
            )
            if stable_image_size(s, walk.address()) < 3:
                raise SproutError(
                    f"cycle walk {walk.address().render()} stabilizes below "
                    f"size 3; subset graph arcs are inconsistent"
                )
            out.append(walk)

        terminals: dict[int, list[tuple[str, str]]] = {m: [] for m in self.vq}
        for mask, b in self.eb:
            kind = "boundary" if b in s.boundary_pos else "black"
            terminals[mask].append((kind, b))
        for mask, p in self.ep:
            terminals[mask].append(("boundary", p))

        word: list[int] = []
        visited: set[int] = set()

        def visit(mask: int) -> None:
            for kind, v in terminals[mask]:
                out.append(GraphWalk(kind, tuple(word), (), v))
            if self.space.is_cyclic_vertex(mask):
                return
            for a in self.space.out[mask]:
                if a.dst in visited:
                    continue
                visited.add(a.dst)
                word.append(a.label)
                visit(a.dst)
                word.pop()
                visited.discard(a.dst)

        visited.add(s.full_mask)
        visit(s.full_mask)
        return tuple(out)

    def to_dot(self) -> str:
        lines = ["digraph transformation_graph {"]
        for mask in self.vq:
            name = self._subset_name(mask)
            lines.append(f'  "{name}" [shape=box];')
        terminal_nodes: list[str] = []
        for _, b in self.eb:
            node = f"b:{b}"
            if node not in terminal_nodes:
                terminal_nodes.append(node)
        for _, p in self.ep:
            node = f"p:{p}"
            if node not in terminal_nodes:
                terminal_nodes.append(node)
        for node in terminal_nodes:
            lines.append(f'  "{node}" [shape=ellipse];')
        for src, dst, i in self.eq:
            lines.append(
                f'  "{self._subset_name(src)}" -> '
                f'"{self._subset_name(dst)}" [label="{i}"];'
            )
        for src, b in self.eb:
            lines.append(
                f'  "{self._subset_name(src)}" -> "b:{b}" [style=dashed];'
            )
        for src, p in self.ep:
            lines.append(
                f'  "{self._subset_name(src)}" -> "p:{p}" [style=dotted];'
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


def transformation_graph(s: Sprout) -> TransformationGraph:
    return TransformationGraph(s)


# -- orders ---------------------------------------------------------------------


def point_addresses(s: Sprout, loc) -> tuple[Address, ...]:
    """Full address set of a vertex or of a map image of a vertex.

    ``loc`` is a black vertex name or a (word, vertex name) pair; the word
    is applied as an address prefix.  Refuses with the classification as
    payload when the underlying set is infinite.
    """
    resolver = AddressResolver(s)
    if isinstance(loc, str):
        word: tuple[int, ...] = ()
        base = loc
    else:
        word, base = loc
        word = tuple(word)
    addrs = resolver.vertex_addresses(base)
    return tuple(sorted((a.prepend(word) for a in addrs), key=Address.sort_key))


def _order_from_addresses(
    s: Sprout,
    addresses: Sequence[Address],
    on_boundary: bool,
) -> tuple[int, tuple[Address, ...], tuple[int, ...], bool, bool]:
    """(order, branching sublist, stable sizes, degenerate, bound_only).

    The order counts subtree branches at the point: with several branching
    addresses the contributions N-1 add up; with a single one the point
    gains a branch when it is not a boundary point of the attractor; with
    none the point is a degenerate endpoint candidate and the order is 0 by
    convention.  ``bound_only`` marks single-address non-boundary points of
    computed order 2, where the walk analysis guarantees only a lower bound.
    """
    sizes = tuple(stable_image_size(s, a) for a in addresses)
    branching = tuple(a for a, n in zip(addresses, sizes) if n > 1)
    branching_sizes = [n for n in sizes if n > 1]
    degenerate = False
    if len(branching) > 1:
        order = sum(n - 1 for n in branching_sizes)
    elif len(branching) == 1:
        order = branching_sizes[0] - 1 if on_boundary else branching_sizes[0]
    else:
        order = 0
        degenerate = True
    bound_only = (
        not on_boundary and order == 2 and len(addresses) == 1
    )
    return order, branching, sizes, degenerate, bound_only


def main_tree_order(s: Sprout, loc) -> int:
    """Branching order of a point inside the attractor's inner tree.

    ``loc`` may be a black vertex name, a (word, vertex) pair, or an
    Address; the point's full address set must be finite.
    """
    resolver = AddressResolver(s)
    location = resolver.location_of(loc)
    kind, addrs = resolver.location_data(location)
    if addrs is None:
        raise InfiniteAddressSet(
            f"{location.render()} has a {kind} address set; "
            f"its inner-tree order is not a finite computation",
            AddressSet(location.render(), kind, None, ()),
        )
    on_boundary = location.base in s.boundary_pos and not location.word
    order, _, _, _, _ = _order_from_addresses(s, addrs, on_boundary)
    return order


def attractor_order(s: Sprout, p: str):
    """Order of a boundary point in the whole attractor: the number of its
    addresses, or "Infinite" when the address set is infinite."""
    if p not in s.boundary_pos:
        raise SproutError(f"{p!r} is not a boundary point")
    aset = IndexDiagram(s).addresses_of(p)
    if aset.kind != FINITE:
        return INFINITE
    return aset.count


# -- ramification report ----------------------------------------------------------


@dataclass(frozen=True)
class PointReport:
    """One analyzed point: its canonical location, full address set, and
    branching orders in the inner tree and in the attractor."""

    location: str
    kind: str  # boundary | critical | image | interior
    addresses: tuple[Address, ...] | None
    address_class: str
    branching_addresses: tuple[Address, ...] | None
    stable_sizes: tuple[int, ...] | None
    ord_main_tree: int | None
    ord_in_k: int | str | None
    classification: str
    degenerate: bool = False
    bound_only: bool = False

    def to_row(self) -> dict:
        return {
            "location": self.location,
            "addresses": (
                [a.render() for a in self.addresses]
                if self.addresses is not None
                else None
            ),
            "ord_main_tree": self.ord_main_tree,
            "ord_in_K": self.ord_in_k,
            "class": self.classification,
            "kind": self.kind,
            "address_class": self.address_class,
            "branching_addresses": (
                [a.render() for a in self.branching_addresses]
                if self.branching_addresses is not None
                else None
            ),
            "stable_sizes": (
                list(self.stable_sizes) if self.stable_sizes is not None else None
            ),
            "degenerate": self.degenerate,
            "bound_only": self.bound_only,
        }


def _classification_label(order: int | None, on_boundary: bool) -> str:
    if order is None:
        core = "ramification point"
    elif order >= 3:
        core = "ramification point"
    elif order == 2:
        core = "cut point"
    else:
        core = "endpoint"
    return f"boundary {core}" if on_boundary else core


def _row_kind(location: Location, s: Sprout) -> str:
    if location.base is None:
        return _KIND_INTERIOR
    if location.word:
        return _KIND_IMAGE
    if location.base in s.boundary_pos:
        return _KIND_BOUNDARY
    return _KIND_CRITICAL


def _build_row(resolver: AddressResolver, location: Location) -> PointReport:
    s = resolver.sprout
    kind = _row_kind(location, s)
    addr_class, addrs = resolver.location_data(location)
    on_boundary = kind == _KIND_BOUNDARY
    if addrs is None:
        ord_in_k = INFINITE
        return PointReport(
            location=location.render(),
            kind=kind,
            addresses=None,
            address_class=addr_class,
            branching_addresses=None,
            stable_sizes=None,
            ord_main_tree=None,
            ord_in_k=ord_in_k,
            classification=_classification_label(None, on_boundary),
        )
    order, branching, sizes, degenerate, bound_only = _order_from_addresses(
        s, addrs, on_boundary
    )
    ord_in_k = len(addrs) if on_boundary else None
    return PointReport(
        location=location.render(),
        kind=kind,
        addresses=addrs,
        address_class=addr_class,
        branching_addresses=branching,
        stable_sizes=sizes,
        ord_main_tree=order,
        ord_in_k=ord_in_k,
        classification=_classification_label(order, on_boundary),
        degenerate=degenerate,
        bound_only=bound_only,
    )


def ramification_report(s: Sprout) -> tuple[PointReport, ...]:
    """Analyze every boundary point and every point surfaced by a walk of
    the subset graph, one row per distinct point.

    Requires a correct, regular sprout whose boundary points have pairwise
    disjoint address sets; otherwise two symbolic locations could denote the
    same point without the report noticing.
    """
    report = validate(s)
    if not report.is_correct or not report.is_regular:
        raise SproutError("the report requires a correct and regular sprout")
    diagram = IndexDiagram(s)
    adm = diagram.check_admissibility()
    if not adm.admissible:
        w = adm.witness
        raise SproutError(
            f"refusing to report: boundary points {w.point_a} and {w.point_b} "
            f"share the address {w.shared_address.render()}"
        )
    resolver = AddressResolver(s, diagram)

    locations: dict[tuple, Location] = {}

    def add(location: Location) -> None:
        locations.setdefault(location.key(), location)

    for p in s.boundary:
        add(Location((), p))

    graph = transformation_graph(s)
    for walk in graph.walks():
        if walk.kind == "cycle":
            add(resolver.resolve(walk.address()))
        else:
            if walk.word:
                rep = resolver.some_address(walk.terminal).prepend(walk.word)
                add(resolver.resolve(rep))
            else:
                add(Location((), walk.terminal))

    rows = [_build_row(resolver, loc) for loc in locations.values()]

    finite_sets = [set(r.addresses) for r in rows if r.addresses is not None]
    for i in range(len(finite_sets)):
        for j in range(i + 1, len(finite_sets)):
            if finite_sets[i] & finite_sets[j]:
                raise SproutError(
                    "two report rows share an address; point merging failed"
                )

    kind_rank = {
        _KIND_BOUNDARY: 0,
        _KIND_CRITICAL: 1,
        _KIND_IMAGE: 2,
        _KIND_INTERIOR: 3,
    }

    def sort_key(r: PointReport):
        if r.kind == _KIND_BOUNDARY:
            return (0, s.boundary_pos[r.location], "")
        return (1, kind_rank[r.kind], r.location)

    rows.sort(key=sort_key)
    return tuple(rows)


def report_rows(s: Sprout) -> list[dict]:
    """The report as JSON-ready dictionaries."""
    return [r.to_row() for r in ramification_report(s)]
