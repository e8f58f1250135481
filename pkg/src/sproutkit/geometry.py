"""Planar IFS geometry: clouds, contact detection, sprout extraction, SVG.

All certification is done with bounding balls of copies: the attractor
lies in a computable ball, so the copy under a composition word lies in
the image ball whose radius shrinks with the word's contraction factor.
Two copies are certified disjoint when their balls separate; a contact
is localized by refining overlapping ball pairs until they collapse to
a point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import ParseError, Sprout, SproutError, validate

#: hard cap on m^depth for cloud generation
CLOUD_CAP = 2_000_000

#: hard cap on examined ball pairs per copy pair before declaring overlap
PAIR_CAP = 200_000

#: more surviving ball pairs than this means the copies share a continuum
SURVIVOR_CAP = 512


class ExtractionError(SproutError):
    """The IFS could not be turned into a valid sprout."""


class AffineMap:
    """A contracting injective affine map of the plane."""

    def __init__(self, linear, translation) -> None:
        self.linear = np.asarray(linear, dtype=float).reshape(2, 2)
        self.translation = np.asarray(translation, dtype=float).reshape(2)
        norm = float(np.linalg.norm(self.linear, 2))
        if not norm < 1.0:
            raise ParseError(f"affine map is not a contraction (norm {norm:.6g})")
        if abs(float(np.linalg.det(self.linear))) == 0.0:
            raise ParseError("affine map is singular (not injective)")
        self.norm = norm

    @classmethod
    def from_coefficients(cls, a: float, b: float, c: float, d: float,
                          e: float, f: float) -> "AffineMap":
        return cls([[a, b], [c, d]], [e, f])

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.linear.T + self.translation

    def inverse(self, point: np.ndarray) -> np.ndarray:
        return np.linalg.solve(self.linear, np.asarray(point, dtype=float) - self.translation)

    def fixed_point(self) -> np.ndarray:
        return np.linalg.solve(np.eye(2) - self.linear, self.translation)

    def after(self, inner: "AffineMap") -> "AffineMap":
        """The composition self ∘ inner."""
        return AffineMap(
            self.linear @ inner.linear,
            self.linear @ inner.translation + self.translation,
        )


class PlanarIFS:
    """An ordered system of 1..32 contracting affine injections."""

    def __init__(self, maps: Sequence[AffineMap]) -> None:
        maps = tuple(maps)
        if not 1 <= len(maps) <= 32:
            raise ParseError(f"an IFS needs 1..32 maps, got {len(maps)}")
        self.maps = maps

    @property
    def m(self) -> int:
        return len(self.maps)

    @property
    def r_max(self) -> float:
        return max(mp.norm for mp in self.maps)

    def bounding_ball(self) -> tuple[np.ndarray, float]:
        """A ball certainly containing the attractor."""
        cached = getattr(self, "_ball", None)
        if cached is None:
            c = self.maps[0].fixed_point()
            drift = max(float(np.linalg.norm(mp(c) - c)) for mp in self.maps)
            radius = drift / (1.0 - self.r_max) if drift > 0 else 0.0
            cached = (c, radius)
            self._ball = cached
        return cached

    def map_word(self, word: tuple[int, ...]) -> AffineMap:
        """Composition S_{w1} ∘ … ∘ S_{wk} for a 1-based word."""
        out = self.maps[word[0] - 1]
        for k in word[1:]:
            out = out.after(self.maps[k - 1])
        return out


def parse_ifs(doc) -> PlanarIFS:
    """Build an IFS from a JSON document {maps: [{a,b,c,d,e,f}, …]}."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or "maps" not in doc:
        raise ParseError("IFS document must be an object with a 'maps' list")
    maps = []
    for k, row in enumerate(doc["maps"], start=1):
        try:
            maps.append(
                AffineMap.from_coefficients(
                    float(row["a"]), float(row["b"]), float(row["c"]),
                    float(row["d"]), float(row["e"]), float(row["f"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad coefficients in map {k}: {exc}") from exc
    return PlanarIFS(maps)


def load_ifs(path: str) -> PlanarIFS:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_ifs(json.load(handle))


def attractor_points(ifs: PlanarIFS, depth: int, cap: int = CLOUD_CAP) -> np.ndarray:
    """All points S_w(x0) over words of the given length, x0 = fix(S_1).

    Points are ordered lexicographically by word, so the first-symbol
    block structure is index // m^(depth-1).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if ifs.m ** depth > cap:
        raise SproutError(f"cloud size {ifs.m}^{depth} exceeds cap {cap}")
    pts = ifs.maps[0].fixed_point().reshape(1, 2)
    for _ in range(depth):
        pts = np.concatenate([mp(pts) for mp in ifs.maps], axis=0)
    return pts


class _Ball:
    """Bounding ball of the copy under a composition word."""

    __slots__ = ("word", "linear", "translation", "center", "radius")

    def __init__(self, word, linear, translation, base_center, base_radius):
        self.word = word
        self.linear = linear
        self.translation = translation
        self.center = tuple(linear @ base_center + translation)
        self.radius = float(np.linalg.norm(linear, 2)) * base_radius


def _root_ball(ifs: PlanarIFS, i: int) -> _Ball:
    c, r = ifs.bounding_ball()
    mp = ifs.maps[i - 1]
    return _Ball((i,), mp.linear, mp.translation, c, r)


def _children(ifs: PlanarIFS, ball: _Ball) -> list[_Ball]:
    c0, r0 = ifs.bounding_ball()
    out = []
    for k in range(1, ifs.m + 1):
        inner = ifs.maps[k - 1]
        out.append(
            _Ball(
                ball.word + (k,),
                ball.linear @ inner.linear,
                ball.linear @ inner.translation + ball.translation,
                c0,
                r0,
            )
        )
    return out


def _dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class PairContacts:
    """Contact analysis of one unordered pair of first-level copies."""

    first: int
    second: int
    verdict: str                      # "empty" | "singleton" | "suspected-non-singleton"
    contacts: tuple[tuple[float, float], ...]
    margin: float | None              # certified extra separation of pruned pairs
    exhausted: bool = False           # pair cap hit: treated as overlap


@dataclass(frozen=True)
class IntersectionReport:
    pairs: tuple[PairContacts, ...]
    depth: int
    tol: float

    @property
    def sip_ok(self) -> bool:
        return all(p.verdict != "suspected-non-singleton" for p in self.pairs)

    @property
    def contacts(self) -> tuple[tuple[float, float], ...]:
        out = []
        for p in self.pairs:
            out.extend(p.contacts)
        return tuple(out)

    @property
    def sip_margin(self) -> float | None:
        margins = [p.margin for p in self.pairs if p.margin is not None]
        return min(margins) if margins else None


def _polish(
    ifs: PlanarIFS,
    pairs: list[tuple[_Ball, _Ball]],
    tol: float,
) -> tuple[float, float]:
    """Refine surviving ball pairs to machine precision, return the contact.

    Seeding with every pair of a cluster matters: an individual survivor
    may be a pair of merely tangent balls whose copies never meet, and
    chasing that one would stall at a spurious midpoint.
    """
    frontier = sorted(
        pairs,
        key=lambda uv: (_dist(uv[0].center, uv[1].center), uv[0].word, uv[1].word),
    )[:8]
    for _ in range(240):
        best = min(frontier, key=lambda uv: (_dist(uv[0].center, uv[1].center),
                                             uv[0].word, uv[1].word))
        u, v = best
        scale = 1.0 + abs(u.center[0]) + abs(u.center[1])
        if max(u.radius, v.radius) <= 1e-14 * scale:
            break
        nxt = []
        for (bu, bv) in frontier:
            if bu.radius >= bv.radius:
                cands = [(ch, bv) for ch in _children(ifs, bu)]
            else:
                cands = [(bu, ch) for ch in _children(ifs, bv)]
            for cu, cv in cands:
                if _dist(cu.center, cv.center) <= cu.radius + cv.radius + tol:
                    nxt.append((cu, cv))
        nxt.sort(key=lambda uv: (_dist(uv[0].center, uv[1].center),
                                 uv[0].word, uv[1].word))
        frontier = nxt[:8] or frontier
        if not nxt:
            break
    u, v = min(frontier, key=lambda uv: (_dist(uv[0].center, uv[1].center),
                                         uv[0].word, uv[1].word))
    return (
        (u.center[0] + v.center[0]) / 2.0,
        (u.center[1] + v.center[1]) / 2.0,
    )


def _pair_contacts(ifs: PlanarIFS, i: int, j: int, depth: int, tol: float) -> PairContacts:
    worklist = [(_root_ball(ifs, i), _root_ball(ifs, j))]
    survivors: list[tuple[_Ball, _Ball]] = []
    margin: float | None = None
    examined = 0
    exhausted = False
    while worklist:
        u, v = worklist.pop()
        examined += 1
        if examined > PAIR_CAP or len(survivors) > SURVIVOR_CAP:
            exhausted = True
            break
        d = _dist(u.center, v.center)
        if d > u.radius + v.radius + tol:
            gap = d - u.radius - v.radius
            margin = gap if margin is None else min(margin, gap)
            continue
        if len(u.word) >= depth and len(v.word) >= depth:
            survivors.append((u, v))
            continue
        refine_first = (u.radius, -len(u.word)) >= (v.radius, -len(v.word))
        if len(v.word) >= depth:
            refine_first = True
        if len(u.word) >= depth:
            refine_first = False
        if refine_first:
            worklist.extend((ch, v) for ch in _children(ifs, u))
        else:
            worklist.extend((u, ch) for ch in _children(ifs, v))

    if not survivors:
        return PairContacts(i, j, "empty", (), margin)
    if exhausted:
        return PairContacts(i, j, "suspected-non-singleton", (), margin, True)

    # single-linkage clustering of surviving pairs at ball scale
    survivors.sort(key=lambda uv: (uv[0].word, uv[1].word))
    n = len(survivors)
    mids = [((u.center[0] + v.center[0]) / 2, (u.center[1] + v.center[1]) / 2)
            for u, v in survivors]
    sizes = [max(u.radius, v.radius) for u, v in survivors]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(n):
        for b in range(a + 1, n):
            if _dist(mids[a], mids[b]) <= 2 * (sizes[a] + sizes[b]) + 10 * tol:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    clusters: dict[int, list[int]] = {}
    for a in range(n):
        clusters.setdefault(find(a), []).append(a)
    groups = sorted(clusters.values(), key=lambda g: mids[g[0]])

    point_like = []
    for g in groups:
        diam = max(
            (_dist(mids[a], mids[b]) for a in g for b in g), default=0.0
        )
        scale = max(sizes[a] for a in g)
        point_like.append(diam <= 6 * scale + 10 * tol)

    if len(groups) > 1 or not all(point_like):
        reps = tuple(
            _polish(ifs, [survivors[k] for k in g], tol) if ok else mids[min(g)]
            for g, ok in zip(groups, point_like)
        )
        return PairContacts(i, j, "suspected-non-singleton", reps, margin)

    rep = _polish(ifs, [survivors[k] for k in groups[0]], tol)
    return PairContacts(i, j, "singleton", (rep,), margin)


def detect_intersections(ifs: PlanarIFS, depth: int, tol: float) -> IntersectionReport:
    """Classify every pair of first-level copies: disjoint, one contact, or worse."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    pairs = []
    for i in range(1, ifs.m + 1):
        for j in range(i + 1, ifs.m + 1):
            pairs.append(_pair_contacts(ifs, i, j, depth, tol))
    return IntersectionReport(tuple(pairs), depth, tol)


# ---------------------------------------------------------------------------
# extraction


def _member(ifs: PlanarIFS, point: Sequence[float], copy: int, tol: float) -> bool:
    """Certified-ish membership of a point in the first-level copy."""
    stack = [_root_ball(ifs, copy)]
    steps = 0
    while stack:
        ball = stack.pop()
        steps += 1
        if steps > 100_000:
            raise ExtractionError("membership descent did not converge")
        d = _dist(point, ball.center)
        if d > ball.radius + tol:
            continue
        if ball.radius <= tol / 2:
            if d <= tol:
                return True
            continue
        stack.extend(_children(ifs, ball))
    return False


@dataclass
class _PointRecord:
    point: tuple[float, float]
    is_boundary: bool = False
    is_critical: bool = False
    copies: tuple[int, ...] = ()
    name: str = ""


@dataclass(frozen=True)
class ExtractionResult:
    """A sprout recovered from plane geometry, with provenance per vertex."""

    sprout: Sprout
    point_table: tuple[dict, ...]
    diagnostics: dict


def extract_sprout(ifs: PlanarIFS, depth: int = 10, tol: float = 1e-9) -> ExtractionResult:
    """Recover the boundary sprout of an IFS whose copies meet in points.

    Contact points come from certified pair refinement; the boundary set
    is the closure of copy-preimages of known black points, mirroring
    how a sprout's boundary is generated from its critical set.
    """
    report = detect_intersections(ifs, depth, tol)
    bad = [p for p in report.pairs if p.verdict == "suspected-non-singleton"]
    if bad:
        names = ", ".join(f"({p.first},{p.second})" for p in bad)
        raise ExtractionError(
            f"copies {names} intersect in more than one point; "
            "the system has no finite boundary sprout"
        )

    touching = [p for p in report.pairs if p.verdict == "singleton"]
    if ifs.m > 1:
        # the contact graph of copies must be connected
        seen = {1}
        frontier = [1]
        adj: dict[int, set[int]] = {k: set() for k in range(1, ifs.m + 1)}
        for p in touching:
            adj[p.first].add(p.second)
            adj[p.second].add(p.first)
        while frontier:
            k = frontier.pop()
            for other in adj[k]:
                if other not in seen:
                    seen.add(other)
                    frontier.append(other)
        if len(seen) != ifs.m:
            raise ExtractionError(
                "the copies do not form a connected system; no dendrite"
            )

    records: list[_PointRecord] = []

    def find_or_add(pt: Sequence[float]) -> _PointRecord:
        pt = (float(pt[0]), float(pt[1]))
        for rec in records:
            if _dist(rec.point, pt) <= 10 * tol:
                return rec
        rec = _PointRecord(pt)
        records.append(rec)
        return rec

    for p in touching:
        for contact in p.contacts:
            find_or_add(contact).is_critical = True

    cap = 64 * (ifs.m + sum(len(p.contacts) for p in touching)) ** 2
    queue = list(records)
    processed = 0
    while queue:
        rec = queue.pop(0)
        processed += 1
        if processed > cap or len(records) > cap:
            raise ExtractionError("boundary closure did not stabilize")
        copies = tuple(
            k for k in range(1, ifs.m + 1) if _member(ifs, rec.point, k, tol)
        )
        if not copies:
            raise ExtractionError(
                f"point {rec.point} lies in no copy despite being generated"
            )
        rec.copies = copies
        for k in copies:
            pre = ifs.maps[k - 1].inverse(rec.point)
            prev = find_or_add(pre)
            if not prev.is_boundary:
                prev.is_boundary = True
                if prev.copies:
                    # already processed as critical-only: labels must close
                    pass
                if prev not in queue and not prev.copies:
                    queue.append(prev)

    def sort_key(rec: _PointRecord):
        # quantize so that 1e-14 arithmetic fuzz cannot scramble the naming
        return (round(rec.point[0], 6), round(rec.point[1], 6), rec.point)

    boundary_recs = sorted((r for r in records if r.is_boundary), key=sort_key)
    critical_recs = sorted(
        (r for r in records if r.is_critical and not r.is_boundary), key=sort_key
    )
    for k, rec in enumerate(boundary_recs, start=1):
        rec.name = f"p{k}"
    for k, rec in enumerate(critical_recs, start=1):
        rec.name = f"c{k}"

    blacks = boundary_recs + critical_recs
    by_name = {rec.name: rec for rec in blacks}

    def label_of(point: np.ndarray) -> str:
        for rec in boundary_recs:
            if _dist(rec.point, point) <= 10 * tol:
                return rec.name
        raise ExtractionError(
            f"edge label at {tuple(float(x) for x in point)} "
            "matches no boundary point"
        )

    edge_rows = []
    for k in range(1, ifs.m + 1):
        for rec in blacks:
            if k in rec.copies:
                edge_rows.append(
                    {
                        "w": f"w{k}",
                        "b": rec.name,
                        "label": label_of(ifs.maps[k - 1].inverse(rec.point)),
                    }
                )

    from .model import parse_sprout

    sprout = parse_sprout(
        {
            "whites": [f"w{k}" for k in range(1, ifs.m + 1)],
            "blacks": [rec.name for rec in blacks],
            "boundary": [rec.name for rec in boundary_recs],
            "edges": edge_rows,
        }
    )
    rep = validate(sprout)
    if not (rep.structural_ok and rep.is_correct):
        details = "; ".join(v.message for v in rep.violations)
        raise ExtractionError(f"extracted sprout is not a correct sprout: {details}")

    from .maintree import AddressResolver, InfiniteAddressSet

    resolver = AddressResolver(sprout)
    table = []
    for rec in blacks:
        row = {
            "name": rec.name,
            "coordinates": [rec.point[0], rec.point[1]],
            "boundary": rec.is_boundary,
            "critical": rec.is_critical,
        }
        try:
            row["addresses"] = [a.render() for a in resolver.vertex_addresses(rec.name)]
        except InfiniteAddressSet as exc:
            row["addresses"] = None
            row["address_class"] = exc.classification
        table.append(row)

    diagnostics = {
        "tol": tol,
        "depth": depth,
        "sip_margin": report.sip_margin,
        "contact_count": len(report.contacts),
    }
    return ExtractionResult(sprout, tuple(table), diagnostics)


# ---------------------------------------------------------------------------
# rendering

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
    "#8c6d31", "#843c39", "#7b4173", "#5254a3", "#8ca252", "#bd9e39",
    "#ad494a", "#a55194", "#6b6ecf", "#b5cf6b", "#e7ba52", "#d6616b",
    "#ce6dbd", "#9c9ede", "#cedb9c", "#e7cb94", "#e7969c", "#de9ed6",
    "#3182bd", "#e6550d",
)


def _fmt(x: float) -> str:
    out = f"{x:.6f}"
    return "0.000000" if out == "-0.000000" else out


def render_svg(
    ifs: PlanarIFS,
    result: ExtractionResult | None = None,
    depth: int | None = None,
    size: int = 640,
) -> str:
    """Deterministic SVG figure of the attractor, one color per copy."""
    if depth is None:
        depth = 1
        while ifs.m ** (depth + 1) <= 20_000 and depth < 12:
            depth += 1
    pts = attractor_points(ifs, depth)
    marks: list[tuple[float, float]] = []
    if result is not None:
        marks = [tuple(row["coordinates"]) for row in result.point_table]

    xs = pts[:, 0].tolist() + [p[0] for p in marks]
    ys = pts[:, 1].tolist() + [p[1] for p in marks]
    minx, maxx = min(xs), max(xs)
    miny, maxy = min(ys), max(ys)
    span = max(maxx - minx, maxy - miny, 1e-9)
    pad = 0.08 * span

    def sx(x: float) -> float:
        return (x - minx + pad) / (span + 2 * pad) * size

    def sy(y: float) -> float:
        return size - (y - miny + pad) / (span + 2 * pad) * size

    dot = max(1.2, 0.35 * size * (ifs.r_max ** depth))
    block = ifs.m ** (depth - 1)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for idx in range(pts.shape[0]):
        copy = idx // block
        color = _PALETTE[copy % len(_PALETTE)]
        lines.append(
            f'<circle cx="{_fmt(sx(pts[idx, 0]))}" cy="{_fmt(sy(pts[idx, 1]))}" '
            f'r="{_fmt(dot)}" fill="{color}"/>'
        )
    if result is not None:
        for row in result.point_table:
            x, y = row["coordinates"]
            cx, cy = sx(x), sy(y)
            if row["critical"]:
                lines.append(
                    f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="5.000000" '
                    'fill="none" stroke="black" stroke-width="1.500000"/>'
                )
            if row["boundary"]:
                lines.append(
                    f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="3.000000" fill="black"/>'
                )
            lines.append(
                f'<text x="{_fmt(cx + 7)}" y="{_fmt(cy - 7)}" '
                f'font-family="monospace" font-size="14">{row["name"]}</text>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
