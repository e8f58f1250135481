"""Command-line front end.

Machine-readable results go to stdout, diagnostics to stderr.  Exit
codes: 0 success, 1 analysis verdict (invalid sprout, inadmissible,
not isomorphic, intersection-property violation), 2 usage or input
errors.  All outputs are deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import sys

from .model import ParseError, Sprout, SproutError, load_sprout, validate
from .addressing import Address, IndexDiagram, FINITE
from .phi import boundary_map
from .maintree import AddressResolver, InfiniteAddressSet, report_rows, transformation_graph
from .refine import isomorphic, iterate_square
from .geometry import ExtractionError, extract_sprout, load_ifs, render_svg


def _expansion(address: Address, count: int = 9) -> str:
    symbols = address.expand(count)
    if any(s > 9 for s in symbols):
        return "·".join(str(s) for s in symbols) + "..."
    return "".join(str(s) for s in symbols) + "..."


def _require_correct(s: Sprout, err) -> bool:
    report = validate(s)
    if not (report.structural_ok and report.is_correct):
        for v in report.violations:
            print(f"{v.rule}: {v.message}", file=err)
        return False
    return True


def _cmd_validate(args, out, err) -> int:
    s = load_sprout(args.sprout)
    report = validate(s)
    if args.format == "json":
        print(json.dumps(report.to_document(), ensure_ascii=False, indent=2), file=out)
    else:
        print(f"structural: {'ok' if report.structural_ok else 'FAIL'}", file=out)
        print(f"correct: {'yes' if report.is_correct else 'no'}", file=out)
        print(f"regular: {'yes' if report.is_regular else 'no'}", file=out)
        crit = ", ".join(report.critical_set) or "(empty)"
        bnd = ", ".join(report.sprout_boundary) or "(empty)"
        print(f"critical set: {crit}", file=out)
        print(f"generated boundary: {bnd}", file=out)
        for v in report.violations:
            print(f"violation {v.rule}: {v.message}", file=out)
    ok = report.structural_ok and report.is_correct and report.is_regular
    return 0 if ok else 1


def _cmd_diagram(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if not _require_correct(s, err):
        return 1
    print(IndexDiagram(s).to_dot(), file=out, end="")
    return 0


def _address_lines(s: Sprout, names, out) -> None:
    diagram = IndexDiagram(s)
    resolver = AddressResolver(s, diagram)
    for name in names:
        if name in s.boundary_pos:
            aset = diagram.addresses_of(name)
            if aset.kind != FINITE:
                print(f"{name}: {aset.kind} address set", file=out)
                continue
            for entry in aset.entries:
                print(
                    f"{name}: {entry.display()} = {_expansion(entry.address)}",
                    file=out,
                )
        else:
            try:
                addresses = resolver.vertex_addresses(name)
            except InfiniteAddressSet as exc:
                print(f"{name}: {exc.classification.kind} address set", file=out)
                continue
            for a in addresses:
                print(f"{name}: {a.render()} = {_expansion(a)}", file=out)


def _cmd_addresses(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if not _require_correct(s, err):
        return 1
    if args.point is not None:
        if args.point not in s.black_pos:
            print(f"no black vertex named {args.point}", file=err)
            return 2
        names = [args.point]
    else:
        names = list(s.boundary) + [b for b in s.blacks if b not in s.boundary_pos]
    if args.format == "json":
        rows = []
        diagram = IndexDiagram(s)
        resolver = AddressResolver(s, diagram)
        for name in names:
            if name in s.boundary_pos:
                aset = diagram.addresses_of(name)
                rows.append(
                    {
                        "point": name,
                        "kind": aset.kind,
                        "count": aset.count,
                        "addresses": (
                            None
                            if aset.kind != FINITE
                            else [e.address.render() for e in aset.entries]
                        ),
                    }
                )
            else:
                try:
                    addresses = resolver.vertex_addresses(name)
                    rows.append(
                        {
                            "point": name,
                            "kind": FINITE,
                            "count": len(addresses),
                            "addresses": [a.render() for a in addresses],
                        }
                    )
                except InfiniteAddressSet as exc:
                    rows.append(
                        {
                            "point": name,
                            "kind": exc.classification.kind,
                            "count": None,
                            "addresses": None,
                        }
                    )
        print(json.dumps(rows, ensure_ascii=False, indent=2), file=out)
    else:
        _address_lines(s, names, out)
    return 0


def _cmd_classify(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if not _require_correct(s, err):
        return 1
    diagram = IndexDiagram(s)
    rows = []
    for p in s.boundary:
        aset = diagram.addresses_of(p)
        rows.append(
            {
                "point": p,
                "kind": aset.kind,
                "count": aset.count,
                "witness": list(aset.witness) if aset.witness else None,
            }
        )
    if args.format == "json":
        print(json.dumps(rows, ensure_ascii=False, indent=2), file=out)
    else:
        for row in rows:
            if row["kind"] == FINITE:
                print(f"{row['point']}: finite({row['count']})", file=out)
            else:
                print(f"{row['point']}: {row['kind']}", file=out)
    return 0


def _cmd_admissible(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if not _require_correct(s, err):
        return 1
    result = IndexDiagram(s).check_admissibility()
    if args.format == "json":
        doc = {"admissible": result.admissible}
        if result.witness is not None:
            w = result.witness
            doc["witness"] = {
                "points": [w.point_a, w.point_b],
                "prefix": list(w.prefix),
                "cycle": list(w.cycle),
                "shared_address": w.shared_address.render(),
            }
        else:
            doc["witness"] = None
        print(json.dumps(doc, ensure_ascii=False, indent=2), file=out)
    else:
        if result.admissible:
            print("admissible", file=out)
        else:
            w = result.witness
            print(
                f"inadmissible: {w.point_a} and {w.point_b} share address "
                f"{w.shared_address.render()}",
                file=out,
            )
    return 0 if result.admissible else 1


def _cmd_phi(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if not _require_correct(s, err):
        return 1
    rows = []
    for i, w in enumerate(s.whites, start=1):
        bm = boundary_map(s, i)
        image = sorted(bm.image_points(s.boundary))
        rows.append(
            {
                "index": i,
                "white": w,
                "degree": len(s.edges_at_white[w]),
                "image_size": bm.image_size,
                "image": image,
            }
        )
    if args.format == "json":
        print(json.dumps(rows, ensure_ascii=False, indent=2), file=out)
    else:
        for row in rows:
            image = ", ".join(row["image"])
            print(
                f"phi_{row['index']} ({row['white']}): deg={row['degree']} "
                f"image_size={row['image_size']} image={{{image}}}",
                file=out,
            )
    return 0


def _cmd_gt(args, out, err) -> int:
    s = load_sprout(args.sprout)
    report = validate(s)
    if not (report.structural_ok and report.is_correct and report.is_regular):
        for v in report.violations:
            print(f"{v.rule}: {v.message}", file=err)
        return 1
    print(transformation_graph(s).to_dot(), file=out, end="")
    return 0


def _cmd_report(args, out, err) -> int:
    s = load_sprout(args.sprout)
    try:
        rows = report_rows(s)
    except SproutError as exc:
        print(str(exc), file=err)
        return 1
    print(json.dumps(rows, ensure_ascii=False, indent=2), file=out)
    return 0


def _cmd_square(args, out, err) -> int:
    s = load_sprout(args.sprout)
    if args.n < 0:
        print("-n must be non-negative", file=err)
        return 2
    result = iterate_square(s, args.n)
    print(json.dumps(result.to_document(), ensure_ascii=False, indent=2), file=out)
    return 0


def _cmd_iso(args, out, err) -> int:
    a = load_sprout(args.first)
    b = load_sprout(args.second)
    mapping = isomorphic(a, b)
    if mapping is None:
        print("not isomorphic", file=err)
        return 1
    ordered = {v: mapping[v] for v in a.whites + a.blacks}
    print(json.dumps(ordered, ensure_ascii=False, indent=2), file=out)
    return 0


def _cmd_extract(args, out, err) -> int:
    ifs = load_ifs(args.ifs)
    try:
        result = extract_sprout(ifs, depth=args.depth, tol=args.tol)
    except ExtractionError as exc:
        print(str(exc), file=err)
        return 1
    doc = {
        "sprout": result.sprout.to_document(),
        "point_table": list(result.point_table),
        "diagnostics": result.diagnostics,
    }
    print(json.dumps(doc, ensure_ascii=False, indent=2), file=out)
    return 0


def _cmd_render(args, out, err) -> int:
    ifs = load_ifs(args.ifs)
    result = None
    if args.sprout is not None:
        reference = load_sprout(args.sprout)
        try:
            result = extract_sprout(ifs, depth=args.depth, tol=args.tol)
        except ExtractionError as exc:
            print(str(exc), file=err)
            return 1
        mapping = isomorphic(result.sprout, reference)
        if mapping is None:
            print("extracted sprout is not isomorphic to the given one", file=err)
            return 1
        renamed = tuple(
            {**row, "name": mapping[row["name"]]} for row in result.point_table
        )
        result = type(result)(result.sprout, renamed, result.diagnostics)
    print(render_svg(ifs, result), file=out, end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sproutkit",
        description="analyze boundary sprouts of self-similar dendrites",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("validate", help="check structure, correctness, regularity")
    p.add_argument("sprout")
    with_format(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("diagram", help="DOT of the index diagram")
    p.add_argument("sprout")
    p.set_defaults(func=_cmd_diagram)

    p = sub.add_parser("addresses", help="preperiodic addresses of vertices")
    p.add_argument("sprout")
    p.add_argument("-p", "--point", default=None, help="restrict to one black vertex")
    with_format(p)
    p.set_defaults(func=_cmd_addresses)

    p = sub.add_parser("classify", help="cardinality class of each address set")
    p.add_argument("sprout")
    with_format(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("admissible", help="check that address sets are disjoint")
    p.add_argument("sprout")
    with_format(p)
    p.set_defaults(func=_cmd_admissible)

    p = sub.add_parser("phi", help="branch self-maps of the boundary")
    p.add_argument("sprout")
    with_format(p)
    p.set_defaults(func=_cmd_phi)

    p = sub.add_parser("gt", help="DOT of the subset transformation graph")
    p.add_argument("sprout")
    p.set_defaults(func=_cmd_gt)

    p = sub.add_parser("report", help="orders and classes of distinguished points")
    p.add_argument("sprout")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("square", help="refine the sprout n times")
    p.add_argument("sprout")
    p.add_argument("-n", type=int, default=1)
    p.set_defaults(func=_cmd_square)

    p = sub.add_parser("iso", help="isomorphism test with explicit mapping")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=_cmd_iso)

    p = sub.add_parser("extract", help="recover a sprout from a planar IFS")
    p.add_argument("ifs")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("render", help="SVG figure of the attractor")
    p.add_argument("ifs")
    p.add_argument("--sprout", default=None, help="annotate using this sprout's names")
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_render)

    return parser


def run(argv, out=None, err=None) -> int:
    """Execute one subcommand; returns the process exit code."""
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out, err)
    except FileNotFoundError as exc:
        print(f"cannot read {exc.filename}", file=err)
        return 2
    except json.JSONDecodeError as exc:
        print(f"invalid JSON input: {exc}", file=err)
        return 2
    except ParseError as exc:
        print(str(exc), file=err)
        return 2
    except SproutError as exc:
        print(str(exc), file=err)
        return 1
    except ValueError as exc:
        print(str(exc), file=err)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
