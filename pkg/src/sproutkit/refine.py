"""Refinement (squaring) and isomorphism testing for sprouts.

``square`` builds the sprout of the once-refined system: whites become
ordered pairs of whites, and each contact point of the refined system is
either the image of an old contact inside one copy or an old contact
between copies.  ``canonical_form`` and ``isomorphic`` decide equality of
sprouts up to renaming of vertices, including permutations of the
boundary set that act consistently on edge labels.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import deque

from .model import Edge, Sprout, SproutError, require_structural

#: refuse to square a sprout whose result would have more whites than this
WHITE_CAP = 100_000

#: refuse canonization when the boundary symmetry group is larger than this
PERMUTATION_CAP = 100_000


def _pair(a: str, b: str) -> str:
    return f"{a}×{b}"


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[object, object] = {}

    def find(self, x: object) -> object:
        parent = self.parent
        if x not in parent:
            parent[x] = x
            return x
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: object, b: object) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def square(s: Sprout) -> Sprout:
    """Return the sprout of the squared system.

    Whites are ordered pairs ``a×b`` (outer map applied after inner).
    Black vertices are classes of the formal set {white × black} together
    with the original blacks, glued by the rule that the copy of a label
    point inside a white equals the contact the edge points at.  A class
    that absorbs an original black keeps its name; untouched formal
    points are named ``w×b``.
    """
    require_structural(s)
    if s.num_whites * s.num_whites > WHITE_CAP:
        raise SproutError(
            f"refusing to square: {s.num_whites}^2 whites exceeds cap {WHITE_CAP}"
        )

    uf = _UnionFind()
    for e in s.edges:
        uf.union(("f", e.white, e.label), ("o", e.black))

    # Name every class.  Classes only ever join a formal point to an
    # original black, so a class holds at most one original.
    class_name: dict[object, str] = {}
    originals_in_class: dict[object, list[str]] = {}
    for b in s.blacks:
        originals_in_class.setdefault(uf.find(("o", b)), []).append(b)
    for root, members in originals_in_class.items():
        if len(members) != 1:
            raise SproutError(
                f"squaring merged two original contacts {members}; "
                "the sprout violates label injectivity"
            )
        class_name[root] = members[0]

    blacks: list[str] = list(s.blacks)
    for w in s.whites:
        for b in s.blacks:
            root = uf.find(("f", w, b))
            if root not in class_name:
                class_name[root] = _pair(w, b)
                blacks.append(class_name[root])

    whites = [_pair(a, b) for a in s.whites for b in s.whites]
    names = set(whites) | set(blacks)
    if len(names) != len(whites) + len(blacks):
        raise SproutError("squaring produced a vertex name clash")

    edges = []
    for a in s.whites:
        for e in s.edges:
            black = class_name[uf.find(("f", a, e.black))]
            edges.append(Edge(white=_pair(a, e.white), black=black, label=e.label))

    return Sprout(
        whites=tuple(whites),
        blacks=tuple(blacks),
        boundary=s.boundary,
        edges=tuple(edges),
    )


def iterate_square(s: Sprout, n: int) -> Sprout:
    """Square a sprout ``n`` times; ``n = 0`` returns the sprout itself."""
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    out = s
    for _ in range(n):
        out = square(out)
    return out


# ---------------------------------------------------------------------------
# canonization


def _adjacency(s: Sprout) -> dict[str, list[tuple[str, str]]]:
    """Neighbor lists as (neighbor, edge label) pairs, both directions."""
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in s.whites + s.blacks}
    for e in s.edges:
        adj[e.white].append((e.black, e.label))
        adj[e.black].append((e.white, e.label))
    return adj


def _centers(s: Sprout) -> tuple[str, ...]:
    """The one or two middle vertices of the tree (by leaf peeling)."""
    adj = _adjacency(s)
    degree = {v: len(nb) for v, nb in adj.items()}
    alive = set(degree)
    layer = deque(sorted(v for v, d in degree.items() if d <= 1))
    while len(alive) > 2:
        for _ in range(len(layer)):
            v = layer.popleft()
            alive.discard(v)
            for u, _lab in adj[v]:
                if u in alive:
                    degree[u] -= 1
                    if degree[u] == 1:
                        layer.append(u)
    return tuple(sorted(alive))


def _boundary_colors(s: Sprout) -> dict[str, str]:
    """Isomorphism-invariant colors of boundary points, WL-refined.

    Two boundary points can only correspond under an isomorphism if they
    end up with the same color, so canonization only has to try
    permutations inside color classes.
    """
    label_edges: dict[str, list[tuple[str, str]]] = {p: [] for p in s.boundary}
    for e in s.edges:
        label_edges[e.label].append((e.white, e.black))

    def degree(v: str) -> int:
        return len(s.neighbors[v])

    color: dict[str, str] = {}
    for p in s.boundary:
        own = sorted(degree(e.white) for e in s.edges_at_black.get(p, ()))
        usage = sorted(
            (degree(w), degree(b), b in s.boundary_pos)
            for w, b in label_edges[p]
        )
        color[p] = repr((degree(p), own, usage))
    for _ in range(len(s.boundary)):
        nxt: dict[str, str] = {}
        for p in s.boundary:
            own = sorted(
                (degree(e.white), color[e.label])
                for e in s.edges_at_black.get(p, ())
            )
            usage = sorted(
                (degree(w), degree(b), color.get(b, ""))
                for w, b in label_edges[p]
            )
            nxt[p] = repr((color[p], own, usage))
        if len(set(nxt.values())) == len(set(color.values())):
            # partition stopped refining; keep the old, shorter names
            break
        color = nxt
    return color


def _boundary_orderings(s: Sprout):
    """Yield candidate boundary orderings compatible with the WL colors."""
    color = _boundary_colors(s)
    buckets: dict[str, list[str]] = {}
    for p in s.boundary:
        buckets.setdefault(color[p], []).append(p)
    keys = sorted(buckets)
    total = 1
    for k in keys:
        for i in range(2, len(buckets[k]) + 1):
            total *= i
        if total > PERMUTATION_CAP:
            raise SproutError(
                "boundary symmetry group too large to canonize "
                f"(more than {PERMUTATION_CAP} candidate orderings)"
            )
    for combo in itertools.product(
        *(itertools.permutations(buckets[k]) for k in keys)
    ):
        order: list[str] = []
        for part in combo:
            order.extend(part)
        yield tuple(order)


def _bucket_signature(s: Sprout) -> tuple[tuple[str, int], ...]:
    color = _boundary_colors(s)
    sizes: dict[str, int] = {}
    for p in s.boundary:
        sizes[color[p]] = sizes.get(color[p], 0) + 1
    return tuple(sorted(sizes.items()))


def _rooted_code(
    s: Sprout,
    root: str,
    index: dict[str, int],
    adj: dict[str, list[tuple[str, str]]],
) -> tuple[str, dict[str, str], dict[str, list[str]]]:
    """AHU-style canonical string of the tree rooted at ``root``.

    ``index`` maps boundary names to their canonical positions; edge
    labels and boundary vertices are encoded through it so the code is
    invariant under the corresponding renaming.  Also returns per-vertex
    codes and children lists for mapping reconstruction.
    """
    parent: dict[str, tuple[str, str] | None] = {root: None}
    children: dict[str, list[tuple[str, str]]] = {}
    order = [root]
    for v in order:
        children[v] = []
        for u, lab in adj[v]:
            if u not in parent:
                parent[u] = (v, lab)
                children[v].append((u, lab))
                order.append(u)

    code: dict[str, str] = {}
    child_names: dict[str, list[str]] = {}
    for v in reversed(order):
        if v in s.boundary_pos:
            head = f"P{index[v]}"
        elif v in s.black_pos:
            head = "B"
        else:
            head = "W"
        pieces = []
        for u, lab in children[v]:
            pieces.append((f"{index[lab]}:" + code[u], u))
        pieces.sort()
        child_names[v] = [u for _piece, u in pieces]
        code[v] = "(" + head + "".join(piece for piece, _u in pieces) + ")"
    return code[root], code, child_names


def _best_code(s: Sprout):
    """Minimal rooted code over centers and admissible boundary orderings."""
    adj = _adjacency(s)
    centers = _centers(s)
    best = None
    for order in _boundary_orderings(s):
        index = {p: k for k, p in enumerate(order)}
        for root in centers:
            full, code, kids = _rooted_code(s, root, index, adj)
            if best is None or full < best[0]:
                best = (full, root, index, code, kids)
    assert best is not None
    return best


def canonical_form(s: Sprout) -> str:
    """A renaming-invariant digest of the sprout.

    Two sprouts get the same digest exactly when one can be renamed into
    the other, allowing arbitrary renaming of whites and blacks and any
    permutation of the boundary set applied to labels as well.
    """
    require_structural(s)
    full, *_rest = _best_code(s)
    return hashlib.sha256(full.encode("utf-8")).hexdigest()


def isomorphic(a: Sprout, b: Sprout) -> dict[str, str] | None:
    """Explicit vertex mapping from ``a`` onto ``b``, or None.

    The mapping is rebuilt from the canonical rootings and then verified
    edge by edge, so a hash collision can never produce a bogus answer.
    """
    require_structural(a)
    require_structural(b)
    if (
        a.num_whites != b.num_whites
        or len(a.blacks) != len(b.blacks)
        or a.num_boundary != b.num_boundary
        or len(a.edges) != len(b.edges)
        or _bucket_signature(a) != _bucket_signature(b)
    ):
        return None

    code_a, root_a, _ia, codes_a, kids_a = _best_code(a)
    code_b, root_b, _ib, codes_b, kids_b = _best_code(b)
    if code_a != code_b:
        return None

    mapping: dict[str, str] = {}
    queue = deque([(root_a, root_b)])
    while queue:
        va, vb = queue.popleft()
        mapping[va] = vb
        ca, cb = kids_a[va], kids_b[vb]
        assert len(ca) == len(cb), "equal codes must have equal arity"
        assert [codes_a[u] for u in ca] == [codes_b[u] for u in cb]
        queue.extend(zip(ca, cb))

    # independent verification: the rebuilt mapping must be a genuine
    # color- and label-preserving bijection
    assert sorted(mapping) == sorted(a.whites + a.blacks)
    assert sorted(mapping.values()) == sorted(b.whites + b.blacks)
    for w in a.whites:
        assert mapping[w] in b.white_pos
    for p in a.boundary:
        assert mapping[p] in b.boundary_pos
    image = {(mapping[e.white], mapping[e.black], mapping[e.label]) for e in a.edges}
    target = {(e.white, e.black, e.label) for e in b.edges}
    assert image == target, "canonical codes matched but edges do not"
    return mapping
