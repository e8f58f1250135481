"""Shared machinery for walks in labeled directed multigraphs.

Both the index diagram on boundary points and the subset-level transformation
graph ask the same questions: how many infinite walks leave a vertex, and what
do they look like?  The answers depend only on the cycle structure, so the
strongly-connected-component analysis and the committed-walk enumeration live
here, independent of what the vertices mean.

Terminology used below:

* a component is *cyclic* if it contains at least one arc among its own
  vertices (a self-loop counts);
* a cyclic component is *branching* if it has strictly more internal arcs
  than vertices -- equivalently it contains two distinct cycles through a
  common vertex, which forces uncountably many infinite walks;
* the *finite regime* holds when no reachable component is branching and no
  reachable cyclic component can reach a different cyclic component.  Then
  every infinite walk is "committed": a cycle-free prefix followed by one
  simple cycle repeated forever.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Generic, Hashable, Iterable, Sequence, TypeVar

V = TypeVar("V", bound=Hashable)
L = TypeVar("L", bound=Hashable)


class WalkSpaceError(Exception):
    pass


@dataclass(frozen=True)
class Arc(Generic[V, L]):
    src: V
    dst: V
    label: L


@dataclass(frozen=True)
class CommittedWalk(Generic[V, L]):
    """An eventually periodic infinite walk: prefix arcs, then cycle arcs forever."""

    prefix: tuple[Arc, ...]
    cycle: tuple[Arc, ...]

    @property
    def start(self) -> V:
        return self.prefix[0].src if self.prefix else self.cycle[0].src

    def label_pair(self) -> tuple[tuple, tuple]:
        """(prefix labels, cycle labels) -- raw, not yet canonicalized."""
        return (
            tuple(a.label for a in self.prefix),
            tuple(a.label for a in self.cycle),
        )

    def display_split(self) -> tuple[tuple, tuple]:
        """Labels until the walk first revisits a vertex, then the cycle.

        The walk revisits a vertex for the first time exactly when it has
        finished one full turn of its cycle, so the head part is the prefix
        followed by one copy of the cycle.
        """
        head = tuple(a.label for a in self.prefix) + tuple(a.label for a in self.cycle)
        return head, tuple(a.label for a in self.cycle)


@dataclass(frozen=True)
class WalkClassification:
    """How many infinite walks leave a vertex, with an explanation.

    ``witness`` depends on ``kind``:

    * finite -- the distinct terminal cycles, each as its label sequence;
    * countably-infinite -- a pair (u, v) of vertices where u lies on a
      reachable cycle that can reach the different cycle through v;
    * uncountable -- the vertices of a reachable component carrying two
      distinct cycles.
    """

    kind: str  # "finite" | "countably-infinite" | "uncountable"
    count: int | None  # number of infinite walks when kind == "finite"
    witness: tuple = ()

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"


class WalkSpace(Generic[V, L]):
    """A finite directed multigraph with labeled arcs and walk analysis."""

    def __init__(self, vertices: Iterable[V], arcs: Iterable[tuple[V, V, L]]):
        self.vertices: tuple[V, ...] = tuple(vertices)
        vertex_set = set(self.vertices)
        self.arcs: tuple[Arc, ...] = tuple(Arc(s, d, l) for s, d, l in arcs)
        for a in self.arcs:
            if a.src not in vertex_set or a.dst not in vertex_set:
                raise WalkSpaceError(f"arc {a} references an unknown vertex")
        out: dict[V, list[Arc]] = {v: [] for v in self.vertices}
        for a in self.arcs:
            out[a.src].append(a)
        self.out: dict[V, tuple[Arc, ...]] = {
            v: tuple(sorted(lst, key=lambda a: (a.label, str(a.dst))))
            for v, lst in out.items()
        }

    # -- reachability and components -----------------------------------------

    def reachable_from(self, start: V) -> set[V]:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for a in self.out[v]:
                if a.dst not in seen:
                    seen.add(a.dst)
                    stack.append(a.dst)
        return seen

    @cached_property
    def _scc(self) -> tuple[dict[V, int], list[tuple[V, ...]]]:
        """Iterative Tarjan; returns (component id per vertex, component lists)."""
        index: dict[V, int] = {}
        low: dict[V, int] = {}
        on_stack: set[V] = set()
        stack: list[V] = []
        comp_of: dict[V, int] = {}
        comps: list[tuple[V, ...]] = []
        counter = 0
        for root in self.vertices:
            if root in index:
                continue
            work: list[tuple[V, int]] = [(root, 0)]
            while work:
                v, pi = work[-1]
                if pi == 0:
                    index[v] = low[v] = counter
                    counter += 1
                    stack.append(v)
                    on_stack.add(v)
                recurse = False
                arcs = self.out[v]
                while pi < len(arcs):
                    u = arcs[pi].dst
                    pi += 1
                    if u not in index:
                        work[-1] = (v, pi)
                        work.append((u, 0))
                        recurse = True
                        break
                    if u in on_stack:
                        low[v] = min(low[v], index[u])
                if recurse:
                    continue
                work.pop()
                if low[v] == index[v]:
                    comp: list[V] = []
                    while True:
                        u = stack.pop()
                        on_stack.discard(u)
                        comp_of[u] = len(comps)
                        comp.append(u)
                        if u == v:
                            break
                    comps.append(tuple(comp))
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
        return comp_of, comps

    @property
    def component_of(self) -> dict[V, int]:
        return self._scc[0]

    @property
    def components(self) -> list[tuple[V, ...]]:
        return self._scc[1]

    @cached_property
    def _component_stats(self) -> tuple[list[int], list[bool], list[bool]]:
        comp_of, comps = self._scc
        intra = [0] * len(comps)
        for a in self.arcs:
            if comp_of[a.src] == comp_of[a.dst]:
                intra[comp_of[a.src]] += 1
        cyclic = [intra[c] > 0 for c in range(len(comps))]
        branching = [intra[c] > len(comps[c]) for c in range(len(comps))]
        return intra, cyclic, branching

    def is_cyclic_vertex(self, v: V) -> bool:
        return self._component_stats[1][self.component_of[v]]

    def is_branching_vertex(self, v: V) -> bool:
        return self._component_stats[2][self.component_of[v]]

    @cached_property
    def _component_dag(self) -> dict[int, set[int]]:
        comp_of = self.component_of
        dag: dict[int, set[int]] = {c: set() for c in range(len(self.components))}
        for a in self.arcs:
            cs, cd = comp_of[a.src], comp_of[a.dst]
            if cs != cd:
                dag[cs].add(cd)
        return dag

    def _component_reaches_other_cycle(self, comp: int) -> bool:
        _, cyclic, _ = self._component_stats
        seen = {comp}
        stack = [comp]
        while stack:
            c = stack.pop()
            for d in self._component_dag[c]:
                if d not in seen:
                    if cyclic[d]:
                        return True
                    seen.add(d)
                    stack.append(d)
        return False

    # -- classification --------------------------------------------------------

    def in_finite_regime(self, start: V) -> bool:
        _, cyclic, branching = self._component_stats
        comp_of = self.component_of
        seen_comps = {comp_of[v] for v in self.reachable_from(start)}
        for c in seen_comps:
            if branching[c]:
                return False
            if cyclic[c] and self._component_reaches_other_cycle(c):
                return False
        return True

    def _nearest_other_cycle(self, comp: int) -> int:
        """Closest distinct cyclic component reachable from ``comp`` (BFS)."""
        _, cyclic, _ = self._component_stats
        seen = {comp}
        frontier = [comp]
        while frontier:
            nxt: list[int] = []
            for c in frontier:
                for d in sorted(self._component_dag[c]):
                    if d not in seen:
                        if cyclic[d]:
                            return d
                        seen.add(d)
                        nxt.append(d)
            frontier = nxt
        raise WalkSpaceError(f"component {comp} reaches no other cycle")

    def classify(self, start: V) -> WalkClassification:
        _, cyclic, branching = self._component_stats
        comp_of = self.component_of
        vertex_order = {v: k for k, v in enumerate(self.vertices)}
        seen_comps = {comp_of[v] for v in self.reachable_from(start)}
        for c in sorted(seen_comps):
            if branching[c]:
                members = tuple(sorted(self.components[c], key=vertex_order.get))
                return WalkClassification("uncountable", None, members)
        for c in sorted(seen_comps):
            if cyclic[c] and self._component_reaches_other_cycle(c):
                d = self._nearest_other_cycle(c)
                pair = (
                    min(self.components[c], key=vertex_order.get),
                    min(self.components[d], key=vertex_order.get),
                )
                return WalkClassification("countably-infinite", None, pair)
        walks = self.committed_walks(start)
        cycles = tuple(
            sorted({tuple(a.label for a in w.cycle) for w in walks})
        )
        return WalkClassification("finite", len(walks), cycles)

    # -- committed walks --------------------------------------------------------

    def cycle_through(self, v: V) -> tuple[Arc, ...]:
        """The unique simple cycle through a cyclic vertex in the finite regime."""
        comp = self.component_of[v]
        cycle: list[Arc] = []
        cur = v
        while True:
            intra = [a for a in self.out[cur] if self.component_of[a.dst] == comp]
            if len(intra) != 1:
                raise WalkSpaceError(
                    f"vertex {cur!r} has {len(intra)} internal arcs; "
                    f"the cycle through it is not unique"
                )
            cycle.append(intra[0])
            cur = intra[0].dst
            if cur == v:
                return tuple(cycle)

    def committed_walks(self, start: V) -> list[CommittedWalk]:
        """All infinite walks from ``start``, as prefix + repeated cycle.

        Only valid in the finite regime; the enumeration visits the acyclic
        part depth-first in label order, committing to the unique cycle at
        the first cyclic vertex a walk reaches.
        """
        if not self.in_finite_regime(start):
            raise WalkSpaceError(
                "infinite walk set is not finite; use classify() instead"
            )
        walks: list[CommittedWalk] = []
        prefix: list[Arc] = []

        def visit(v: V) -> None:
            if self.is_cyclic_vertex(v):
                walks.append(CommittedWalk(tuple(prefix), self.cycle_through(v)))
                return
            for a in self.out[v]:
                prefix.append(a)
                visit(a.dst)
                prefix.pop()

        visit(start)
        return walks

    # -- simple cycles -----------------------------------------------------------

    def simple_cycles(self, cap: int = 10_000) -> list[tuple[Arc, ...]]:
        """Every simple cycle, as its arc sequence, deterministically ordered.

        Cycles are rooted at their smallest vertex in ``self.vertices`` order;
        raises when more than ``cap`` cycles exist.
        """
        order = {v: k for k, v in enumerate(self.vertices)}
        cycles: list[tuple[Arc, ...]] = []
        path: list[Arc] = []
        on_path: set[V] = set()

        def search(root: V, v: V) -> None:
            for a in self.out[v]:
                if a.dst == root:
                    cycles.append(tuple(path) + (a,))
                    if len(cycles) > cap:
                        raise WalkSpaceError(
                            f"more than {cap} simple cycles; enumeration aborted"
                        )
                elif a.dst not in on_path and order[a.dst] > order[root]:
                    path.append(a)
                    on_path.add(a.dst)
                    search(root, a.dst)
                    on_path.discard(a.dst)
                    path.pop()

        for root in self.vertices:
            on_path.add(root)
            search(root, root)
            on_path.discard(root)
        return cycles
