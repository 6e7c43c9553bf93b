"""Command-line front end.  Standard output always carries one JSON document.

Exit codes: 0 found or valid, 2 usage error, 3 proven nonexistent (or a
structure shown invalid), 4 budget exhausted or undecided, 5 internal error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import kernels
from .errors import (BadInput, BeauvilleError, BudgetExhausted, InternalInvariantError, NoneFound,
                     TooLarge)
from .groups import GroupHandle, parse_group_spec
from .structures import (UNFILTERED_SEARCH_CAP, BeauvilleStructure, exhaustive_beauville_search, hom_census,
                         random_search, surface_invariants, verify_structure)

EXIT_OK, EXIT_USAGE, EXIT_NONE, EXIT_BUDGET, EXIT_INTERNAL = 0, 2, 3, 4, 5
DEFAULT_BUDGET = 100_000

log = logging.getLogger("beauville")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _type(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty type")
    return vals


def _workers() -> int:
    env = os.environ.get("BEAUVILLE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"BEAUVILLE_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _structure_doc(s: BeauvilleStructure) -> dict:
    doc = s.to_json()
    doc["exists"] = True
    doc["type"] = [list(t) for t in s.types]
    return doc


def _verdict_code(s: BeauvilleStructure) -> int:
    return EXIT_OK if s.report and s.report.valid else EXIT_BUDGET


# -- subcommands -----------------------------------------------------------------------

def _types_pair(args) -> tuple | None:
    if (args.type1 is None) != (args.type2 is None):
        raise UsageError("--type1 and --type2 go together")
    if args.type1 is None:
        return None
    return args.type1, args.type2


def _default_types(G: GroupHandle):
    from .psl2 import PUBLISHED_SMALL_TYPES, PSL2Group

    if isinstance(G, PSL2Group):
        return PUBLISHED_SMALL_TYPES.get(G.q)
    return None


def cmd_search(args) -> tuple[dict, int]:
    G = parse_group_spec(args.group)
    types = _types_pair(args)
    if types is None and args.budget is None:
        types = _default_types(G)
    exhaustive = args.exhaustive or (args.budget is None and _searchable(G, types))
    if exhaustive:
        s = exhaustive_beauville_search(G, types)
        if s is None:
            return {"group": G.spec, "order": G.order, "exists": False, "method": "exhaustive",
                    "type_filter": None if types is None else [list(t) for t in types]}, EXIT_NONE
        doc = _structure_doc(s)
        doc["method"] = "exhaustive"
        return doc, _verdict_code(s)
    cons = None
    if types is not None:
        if any(len(t) != 3 for t in types):
            raise UsageError("types must be triples")
        cons = tuple(tuple(t) for t in types)
    budget = DEFAULT_BUDGET if args.budget is None else args.budget
    try:
        s = random_search(G, cons, budget, args.seed)
    except BudgetExhausted as exc:
        return {"group": G.spec, "order": G.order, "exists": None, "method": "random",
                "budget": budget, "seed": args.seed, "message": str(exc)}, EXIT_BUDGET
    doc = _structure_doc(s)
    doc["method"] = "random"
    return doc, _verdict_code(s)


def _searchable(G: GroupHandle, types) -> bool:
    from .groups import ENUMERATION_CAP

    return G.order <= (UNFILTERED_SEARCH_CAP if types is None else ENUMERATION_CAP)


def cmd_verify(args) -> tuple[dict, int]:
    G = parse_group_spec(args.group)
    try:
        with open(args.structure) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadInput(f"cannot read structure file: {exc}") from exc
    s = BeauvilleStructure.from_json(obj, G)
    rep = verify_structure(s)
    doc = {"group": G.spec, "valid": rep.valid, "reason": rep.reason, "witness": rep.details,
           "types": [list(t) for t in s.types]}
    if rep.valid is None:
        return doc, EXIT_BUDGET
    return doc, EXIT_OK if rep.valid else EXIT_NONE


def cmd_psl2(args) -> tuple[dict, int]:
    from .psl2 import beauville_psl2

    s = beauville_psl2(args.q)
    if s is None:
        return {"group": f"psl2:{args.q}", "exists": False, "structure": "none"}, EXIT_NONE
    return _structure_doc(s), _verdict_code(s)


def cmd_an(args) -> tuple[dict, int]:
    from .an_search import build_ramification_structure

    if args.type1 is None or args.type2 is None:
        raise UsageError("an needs --type1 and --type2")
    mode = "S_n" if args.sn else "A_n"
    factor = None if args.min_degree_factor == 0 else args.min_degree_factor
    budget = 10**6 if args.budget is None else args.budget
    try:
        s = build_ramification_structure(args.type1, args.type2, args.n, budget, args.seed, mode,
                                         min_degree_factor=factor)
    except BudgetExhausted as exc:
        return {"group": f"{'sn' if args.sn else 'an'}:{args.n}", "exists": None, "budget": budget,
                "seed": args.seed, "message": str(exc)}, EXIT_BUDGET
    doc = _structure_doc(s)
    doc["selection"] = s.report.details.get("selection") if s.report else None
    return doc, _verdict_code(s)


def cmd_hunt(args) -> tuple[dict, int]:
    from .primes import hunt

    try:
        res = hunt(args.r, args.s, args.count, args.limit)
    except NoneFound as exc:
        return {"r": args.r, "s": args.s, "primes": [], "message": str(exc)}, EXIT_BUDGET
    return res.to_json(), EXIT_OK


def cmd_invariants(args) -> tuple[dict, int]:
    if args.type1 is None or args.type2 is None:
        raise UsageError("invariants needs --type1 and --type2")
    inv = surface_invariants(args.order, args.type1, args.type2)
    return inv.to_dict(), EXIT_OK


def cmd_census(args) -> tuple[dict, int]:
    G = parse_group_spec(args.group)
    if len(args.type) != 3:
        raise UsageError("--type needs three integers")
    mode = "sampled" if args.sampled else "exact"
    return hom_census(G, args.type, mode=mode, samples=args.samples, seed=args.seed), EXIT_OK


# -- catalog ------------------------------------------------------------------------

_RANGE = re.compile(r"^(an|sn|psl2|ab2):\[?(\d+)(?:\.\.(\d+))?((?:,\d+)*)\]?$")


def parse_catalog_range(text: str) -> tuple[str, list[int]]:
    """``family:[a..b]``, ``family:[a,b,c]`` or ``family:a``."""
    m = _RANGE.match(text.replace(" ", ""))
    if not m:
        raise UsageError(f"bad catalog range {text!r}")
    fam, first, last, rest = m.groups()
    if last is not None:
        if rest:
            raise UsageError(f"bad catalog range {text!r}")
        values = list(range(int(first), int(last) + 1))
    else:
        values = [int(first)] + [int(v) for v in rest.split(",") if v]
    return fam, values


def _catalog_member(fam: str, n: int, budget: int, seed: int) -> dict | None:
    from .arith import prime_power
    from .psl2 import beauville_psl2

    spec = f"{fam}:{n}"
    start = time.perf_counter()
    try:
        if fam == "psl2":
            if prime_power(n) is None:
                return None
            s = beauville_psl2(n)
        else:
            G = parse_group_spec(spec)
            if G.order <= UNFILTERED_SEARCH_CAP:
                s = exhaustive_beauville_search(G)
            else:
                s = random_search(G, None, budget, seed)
    except BeauvilleError as exc:
        return {"group": spec, "structure": None, "provenance": None,
                "error": {"type": type(exc).__name__, "message": str(exc)},
                "timing_ms": round(1000 * (time.perf_counter() - start), 3)}
    if s is None:
        return None
    doc = s.to_json()
    return {"group": spec, "structure": doc, "provenance": s.provenance,
            "timing_ms": round(1000 * (time.perf_counter() - start), 3)}


def catalog(range_spec: str, budget: int = DEFAULT_BUDGET, seed: int = 0, workers: int = 1) -> list[dict]:
    """Entries for the family members that carry a structure, in range order."""
    fam, values = parse_catalog_range(range_spec)
    if workers > 1 and len(values) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(values))) as pool:
            results = list(pool.map(_catalog_member, [fam] * len(values), values,
                                    [budget] * len(values), [seed] * len(values)))
    else:
        results = [_catalog_member(fam, n, budget, seed) for n in values]
    return [r for r in results if r is not None]


def cmd_catalog(args) -> tuple[list, int]:
    entries = []
    for spec in args.ranges:
        entries += catalog(spec, args.budget or DEFAULT_BUDGET, args.seed, _workers())
    failed = any("error" in e for e in entries)
    return entries, EXIT_BUDGET if failed else EXIT_OK


# -- driver ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="beauville", description="Beauville structures on finite groups.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def typed(sp, required=False):
        sp.add_argument("--type1", type=_type, required=required)
        sp.add_argument("--type2", type=_type, required=required)

    def budgeted(sp):
        sp.add_argument("--budget", type=int)
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify", help="check a structure file")
    sp.add_argument("group")
    sp.add_argument("--structure", required=True)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="find a structure on a group")
    sp.add_argument("group")
    typed(sp)
    sp.add_argument("--exhaustive", action="store_true")
    budgeted(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("psl2", help="explicit structure on PSL(2, q)")
    sp.add_argument("q", type=int)
    sp.set_defaults(func=cmd_psl2)

    sp = sub.add_parser("an", help="class selection and sampling on A_n / S_n")
    sp.add_argument("n", type=int)
    typed(sp)
    sp.add_argument("--sn", action="store_true")
    sp.add_argument("--min-degree-factor", type=int, default=100,
                    help="require n above this multiple of the largest order (0 disables)")
    budgeted(sp)
    sp.set_defaults(func=cmd_an)

    sp = sub.add_parser("hunt", help="primes p with typed structures on PSL(2, p)")
    sp.add_argument("r", type=int)
    sp.add_argument("s", type=int)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--limit", type=int, default=100_000)
    sp.set_defaults(func=cmd_hunt)

    sp = sub.add_parser("invariants", help="genera and surface invariants")
    sp.add_argument("--order", type=int, required=True)
    typed(sp)
    sp.set_defaults(func=cmd_invariants)

    sp = sub.add_parser("census", help="count (r, s, t) generating pairs")
    sp.add_argument("group")
    sp.add_argument("--type", type=_type, required=True)
    sp.add_argument("--sampled", action="store_true")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_census)

    sp = sub.add_parser("catalog", help="structures over a range of groups")
    sp.add_argument("ranges", nargs="+", help="e.g. psl2:[7..32] ab2:[2..7]")
    budgeted(sp)
    sp.set_defaults(func=cmd_catalog)
    return p


def _error_doc(kind: str, exc: BaseException) -> dict:
    return {"error": {"type": kind, "message": str(exc)}}


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
        log.info("kernel backend: %s", kernels.BACKEND)
        doc, code = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        doc, code = _error_doc("UsageError", exc), EXIT_USAGE
    except (InternalInvariantError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        doc, code = _error_doc(type(exc).__name__, exc), EXIT_INTERNAL
    except (BeauvilleError, ValueError, ArithmeticError, TooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        doc, code = _error_doc(type(exc).__name__, exc), EXIT_USAGE
    json.dump(doc, out)
    out.write("\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
