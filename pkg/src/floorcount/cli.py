"""Command-line front end.

Subcommands: ``gw`` and ``w`` print a single invariant, ``diagrams`` streams
(marked) floor diagrams in the text or DOT format, ``oracle`` runs the
independent cross-check suites.

Exit codes: 0 success, 1 usage error, 2 violated mathematical precondition
(e.g. constraint counts failing the dimension condition), 3 oracle suite
failure.  Output is byte-identical across runs and across ``--jobs`` values.
"""

from __future__ import annotations

import argparse
import os
import sys

from .diagram import EdgeSlot, FloorPoint, format_diagram, to_dot
from .enumeration import enumerate_floor_diagrams
from .invariants import (
    Engine,
    InvariantCache,
    UnsupportedDimension,
    cache_load,
    cache_store,
)
from .marking import (
    DimensionMismatch,
    UnsupportedGenus,
    build_constraints,
    count_marked_by_type,
    enumerate_markings,
    format_marked_diagram,
)
from .multiplicity import complex_multiplicity, real_multiplicity
from .oracles import (
    codim_two_formula,
    discriminant_degree,
    kontsevich_rational,
    proposition_checks,
)

CACHE_ENV = "FLOORCOUNT_CACHE"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_l(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="floorcount", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument(
            "--cache",
            default=os.environ.get(CACHE_ENV),
            help=f"cache file path (default: ${CACHE_ENV})",
        )
        p.add_argument(
            "--jobs",
            type=int,
            default=0,
            help="worker processes; 0 means available parallelism, 1 is serial",
        )

    p_gw = sub.add_parser("gw", help="complex curve count")
    p_gw.add_argument("--n", type=int, required=True)
    p_gw.add_argument("--d", type=int, required=True)
    p_gw.add_argument("--g", type=int, required=True)
    p_gw.add_argument("--l", type=_parse_l, required=True, metavar="L0,L1,...")
    common(p_gw)

    p_w = sub.add_parser("w", help="signed real curve count")
    p_w.add_argument("--n", type=int, required=True)
    p_w.add_argument("--d", type=int, required=True)
    common(p_w)

    p_d = sub.add_parser("diagrams", help="stream floor diagrams")
    p_d.add_argument("--d", type=int, required=True)
    p_d.add_argument("--g", type=int, required=True)
    p_d.add_argument("--n", type=int)
    p_d.add_argument("--l", type=_parse_l, metavar="L0,L1,...")
    p_d.add_argument("--marked", action="store_true", help="enumerate markings")
    p_d.add_argument(
        "--group-types",
        action="store_true",
        help="one representative per combinatorial type with count and multiplicities",
    )
    p_d.add_argument(
        "--include-zero",
        action="store_true",
        help="with --group-types, also list types of multiplicity zero",
    )
    p_d.add_argument("--format", choices=("text", "dot"), default="text")
    common(p_d)

    p_o = sub.add_parser("oracle", help="independent cross-check suites")
    p_o.add_argument(
        "--suite", choices=("kontsevich", "formulas", "proposition"), required=True
    )
    p_o.add_argument("--max-d", type=int, required=True)
    common(p_o)
    return parser


def _make_engine(args) -> tuple[Engine, str | None]:
    jobs = args.jobs if args.jobs > 0 else (os.cpu_count() or 1)
    cache = InvariantCache()
    path = args.cache
    if path and os.path.exists(path):
        cache = cache_load(path)
    return Engine(cache=cache, jobs=jobs), path


def _finish_cache(engine: Engine, path: str | None) -> None:
    if path:
        cache_store(engine.cache, path)


def _cmd_gw(args) -> int:
    engine, path = _make_engine(args)
    value = engine.gromov_witten(args.n, args.d, args.g, args.l)
    _finish_cache(engine, path)
    print(value)
    return 0


def _cmd_w(args) -> int:
    engine, path = _make_engine(args)
    value = engine.welschinger(args.n, args.d)
    _finish_cache(engine, path)
    print(value)
    return 0


def _marks_for_dot(marked) -> dict:
    labels: dict = {}
    for rank, p in enumerate(marked.assignment):
        j, idx = marked.spec.label(rank)
        tag = f"x{j}.{idx}"
        if isinstance(p, FloorPoint):
            labels.setdefault(("f", p.floor), []).append(tag)
        else:
            labels.setdefault(("e", p.edge), []).append(tag)
    return labels


def _cmd_diagrams(args) -> int:
    if args.marked and (args.n is None or args.l is None):
        raise DimensionMismatch("--marked needs --n and --l")
    engine, path = _make_engine(args)
    spec = None
    if args.marked:
        spec = build_constraints(args.n, args.d, args.g, args.l)
    first = True
    for diagram in enumerate_floor_diagrams(args.d, args.g):
        if not args.marked:
            if args.format == "dot":
                print(to_dot(diagram), end="")
            else:
                if not first:
                    print()
                print(format_diagram(diagram), end="")
            first = False
            continue
        if args.group_types:
            for marked, count in count_marked_by_type(
                diagram, spec, nondegenerate_only=not args.include_zero
            ):
                mu_c = complex_multiplicity(marked, spec.n, engine._gw_or_zero)
                if mu_c == 0 and not args.include_zero:
                    continue
                if spec.genus == 0 and not any(spec.counts[1:]):
                    mu_r = str(real_multiplicity(marked, spec.n, engine._w_value))
                else:
                    mu_r = "-"
                if not first:
                    print()
                first = False
                if args.format == "dot":
                    print(to_dot(diagram, _marks_for_dot(marked)), end="")
                else:
                    print(format_marked_diagram(marked), end="")
                print(f"type count={count} muC={mu_c} muR={mu_r}")
        else:
            for marked in enumerate_markings(diagram, spec):
                if not first:
                    print()
                first = False
                if args.format == "dot":
                    print(to_dot(diagram, _marks_for_dot(marked)), end="")
                else:
                    print(format_marked_diagram(marked), end="")
    _finish_cache(engine, path)
    return 0


def _cmd_oracle(args) -> int:
    engine, path = _make_engine(args)
    failures = 0
    if args.suite == "kontsevich":
        for d in range(1, args.max_d + 1):
            expected = kontsevich_rational(d)
            got = engine.gromov_witten(2, d, 0, (3 * d - 1,))
            ok = expected == got
            failures += not ok
            print(f"{'pass' if ok else 'FAIL'} d={d}: diagrams {got}, recursion {expected}")
    elif args.suite == "formulas":
        for d in range(3, args.max_d + 1):
            g_max = (d - 1) * (d - 2) // 2
            got = engine.gromov_witten(2, d, g_max - 1, (d * (d + 3) // 2 - 1,))
            expected = discriminant_degree(d)
            ok = expected == got
            failures += not ok
            print(f"{'pass' if ok else 'FAIL'} one-node d={d}: {got} vs {expected}")
        for d in range(4, args.max_d + 1):
            g_max = (d - 1) * (d - 2) // 2
            got = engine.gromov_witten(2, d, g_max - 2, (d * (d + 3) // 2 - 2,))
            expected = codim_two_formula(d)
            ok = expected == got
            failures += not ok
            print(f"{'pass' if ok else 'FAIL'} two-node d={d}: {got} vs {expected}")
    else:
        report = proposition_checks(args.max_d, engine)
        for line in report.lines():
            print(line)
        failures += sum(not c.passed for c in report.checks)
    _finish_cache(engine, path)
    return 3 if failures else 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gw": _cmd_gw,
        "w": _cmd_w,
        "diagrams": _cmd_diagrams,
        "oracle": _cmd_oracle,
    }
    try:
        return handlers[args.command](args)
    except (DimensionMismatch, UnsupportedGenus, UnsupportedDimension) as exc:
        print(f"floorcount: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
