"""Command-line interface."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .cache import (
    ResultCache,
    default_cache_dir,
    fv_key,
    profile_key,
    verify_fv_entry,
    verify_profile_entry,
)
from .enumeration import connected_chains_up_to_action, connected_cycles_up_to_action
from .errors import ChainProfileError, InputError
from .inputs import (
    bundled_examples,
    format_chain,
    load_example,
    load_input,
    parse_chain,
    read_delta,
)
from .profiles import (
    Budget,
    ProfileTable,
    chain2_bound,
    disk_combination,
    finite_profile,
    minimal_filling,
    phi_table,
    psi_table,
)
from .skeleton import (
    chain_from_json,
    chain_to_json,
    norm,
    skeleton_fingerprint,
    validate,
)


def _load(args):
    override = getattr(args, "oracle_radius", None)
    if os.path.exists(args.input):
        return load_input(args.input, radius_override=override)
    if args.input in bundled_examples():
        return load_example(args.input, radius_override=override)
    raise InputError(f"input {args.input!r} is neither a file nor a bundled name")


def _budget(args) -> Budget:
    return Budget(fill_volume_cap=args.fill_cap, node_cap=args.node_cap)


def _cache_for(args):
    if args.no_cache:
        return None
    return ResultCache(args.cache or default_cache_dir())


def _print_json(data):
    print(json.dumps(data, indent=2, sort_keys=True))


def _emit_table(table: ProfileTable, fmt: str, notes=()):
    if fmt == "json":
        _print_json(table.to_json_dict())
    elif fmt == "csv":
        print("n,value")
        for n, v in enumerate(table.values):
            print(f"{n},{v}")
    else:
        width = len(str(len(table.values) - 1))
        for n, v in enumerate(table.values):
            print(f"{n:>{width}}  {v}")
        for note in notes:
            print(f"note: {note}")


def _cached_profile(args, kind, s, oracle, n, budget, compute):
    cache = _cache_for(args)
    fingerprint = skeleton_fingerprint(s, oracle)
    if cache is None:
        return compute()
    key = profile_key(kind, fingerprint, n, budget)
    entry = cache.get(key)
    if entry is not None:
        if verify_profile_entry(entry, kind, n, s, oracle):
            return ProfileTable(kind, fingerprint, entry["budget"],
                                entry["values"], entry["witnesses"])
        cache.evict(key)
        print("cached result failed verification; recomputing", file=sys.stderr)
    table = compute()
    cache.put(key, {"values": table.values, "witnesses": table.witnesses,
                    "budget": table.budget})
    return table


_DIM4_NOTE = ("in dimension 4 and above this table equals the manifold-type "
              "isoperimetric profile of the group")


def cmd_examples(args) -> int:
    examples = bundled_examples()
    if args.format == "json":
        _print_json(examples)
    else:
        width = max(len(n) for n in examples)
        for name, data in examples.items():
            print(f"{name:<{width}}  {data.get('description', '')}")
    return 0


def cmd_validate(args) -> int:
    s, oracle = _load(args)
    validate(s, oracle)
    info = {
        "fingerprint": skeleton_fingerprint(s, oracle),
        "dim": s.q,
        "oracle": oracle.name,
        "cells": {str(d): s.n_cells(d) for d in range(s.q + 1)},
    }
    if args.format == "json":
        _print_json(info)
    else:
        print("ok: boundary of boundary vanishes on every cell")
        print(f"fingerprint {info['fingerprint']}, dimension {s.q}, "
              f"oracle {oracle.name}")
        for d in range(s.q + 1):
            print(f"  {s.n_cells(d)} cells in dimension {d}")
    return 0


def cmd_enumerate(args) -> int:
    s, oracle = _load(args)
    fn = connected_cycles_up_to_action if args.cycles else connected_chains_up_to_action
    got = fn(s, oracle, args.chain_dim, args.max_norm, node_cap=args.node_cap)
    counts = {n: len(v) for n, v in sorted(got.items())}
    if args.format == "json":
        data = {"counts": {str(n): c for n, c in counts.items()}}
        if args.list:
            data["chains"] = {str(n): [format_chain(a, s) for a in v]
                              for n, v in sorted(got.items())}
        _print_json(data)
    elif args.format == "csv":
        print("norm,count")
        for n, c in counts.items():
            print(f"{n},{c}")
    else:
        kind = "cycles" if args.cycles else "chains"
        total = sum(counts.values())
        print(f"{total} connected {kind} up to the group action, "
              f"norm at most {args.max_norm}, dimension {args.chain_dim}")
        for n, c in counts.items():
            print(f"  norm {n}: {c}")
            if args.list:
                for a in got[n]:
                    print(f"    {format_chain(a, s)}")
    return 0


def cmd_fv(args) -> int:
    s, oracle = _load(args)
    target = parse_chain(args.chain, s, oracle)
    budget = _budget(args)
    cache = _cache_for(args)
    fingerprint = skeleton_fingerprint(s, oracle)
    target_json = chain_to_json(target, s)
    entry = None
    if cache is not None:
        key = fv_key(fingerprint, target_json, budget)
        entry = cache.get(key)
        if entry is not None and not verify_fv_entry(entry, target, s, oracle):
            cache.evict(key)
            print("cached result failed verification; recomputing", file=sys.stderr)
            entry = None
    if entry is None:
        filling = minimal_filling(target, s, oracle, budget=budget)
        entry = {"value": norm(filling), "filling": chain_to_json(filling, s)}
        if cache is not None:
            cache.put(key, entry)
    if args.format == "json":
        _print_json(entry)
    elif args.format == "csv":
        print("value")
        print(entry["value"])
    else:
        filling = chain_from_json(entry["filling"], s, oracle)
        print(f"filling volume {entry['value']}")
        print(f"filling: {format_chain(filling, s)}")
    return 0


def cmd_psi(args) -> int:
    s, oracle = _load(args)
    budget = _budget(args)
    table = _cached_profile(
        args, "psi", s, oracle, args.max_size, budget,
        lambda: psi_table(s, oracle, args.max_size, budget=budget,
                          workers=args.workers))
    _emit_table(table, args.format, notes=[_DIM4_NOTE] if s.q >= 4 else [])
    return 0


def cmd_phi(args) -> int:
    s, oracle = _load(args)
    budget = _budget(args)
    table = _cached_profile(
        args, "phi", s, oracle, args.max_size, budget,
        lambda: phi_table(s, oracle, args.max_size, budget=budget,
                          workers=args.workers))
    _emit_table(table, args.format, notes=[_DIM4_NOTE] if s.q >= 4 else [])
    return 0


def cmd_finite_profile(args) -> int:
    s, oracle = _load(args)
    budget = _budget(args)
    table = _cached_profile(
        args, "finite", s, oracle, args.max_size, budget,
        lambda: finite_profile(s, oracle, args.max_size, budget=budget))
    _emit_table(table, args.format)
    return 0


def _emit_values(values, fmt):
    if fmt == "json":
        _print_json({"values": values})
    elif fmt == "csv":
        print("n,value")
        for n, v in enumerate(values):
            print(f"{n},{v}")
    else:
        width = len(str(len(values) - 1))
        for n, v in enumerate(values):
            print(f"{n:>{width}}  {v}")


def cmd_chain2_bound(args) -> int:
    delta = read_delta(args.delta)
    _emit_values(chain2_bound(delta), args.format)
    return 0


def cmd_disk_bound(args) -> int:
    delta = read_delta(args.delta)
    _emit_values(disk_combination(delta, args.parts), args.format)
    return 0


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True,
                        help="input JSON file or bundled example name")
    common.add_argument("--format", choices=("human", "json", "csv"),
                        default="human")
    common.add_argument("--cache", default=None, metavar="DIR",
                        help="cache directory (default: CHAINPROFILE_CACHE_DIR "
                             "or ~/.cache/chainprofile)")
    common.add_argument("--no-cache", action="store_true",
                        help="compute without reading or writing the cache")
    common.add_argument("--fill-cap", type=int, default=24,
                        help="largest filling norm the search will try")
    common.add_argument("--node-cap", type=int, default=1_000_000,
                        help="largest number of search states per query")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes for independent fillings")
    common.add_argument("--oracle-radius", type=int, default=None,
                        help="override the search radius of a bounded-bfs oracle")

    p = argparse.ArgumentParser(
        prog="chainprofile",
        description="Filling volumes and isoperimetric profiles of chains "
                    "over group presentations.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("examples", help="list bundled inputs")
    sp.add_argument("--format", choices=("human", "json"), default="human")
    sp.set_defaults(func=cmd_examples)

    sp = sub.add_parser("validate", parents=[common],
                        help="check the complex and report its fingerprint")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("enumerate", parents=[common],
                        help="connected chains up to the group action")
    sp.add_argument("--chain-dim", type=int, required=True)
    sp.add_argument("--max-norm", type=int, required=True)
    sp.add_argument("--cycles", action="store_true",
                    help="keep only chains with vanishing boundary")
    sp.add_argument("--list", action="store_true",
                    help="print each chain, not only the counts")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("fv", parents=[common],
                        help="least filling norm of a cycle")
    sp.add_argument("--chain", required=True,
                    help="chain literal such as '(1, e_a) + (a, e_b) - (b, e_a) - (1, e_b)'")
    sp.set_defaults(func=cmd_fv)

    sp = sub.add_parser("psi", parents=[common],
                        help="worst filling volume of one connected cycle, by size")
    sp.add_argument("-n", "--max-size", type=int, required=True)
    sp.set_defaults(func=cmd_psi)

    sp = sub.add_parser("phi", parents=[common],
                        help="profile over all cycle sizes via partitions")
    sp.add_argument("-n", "--max-size", type=int, required=True)
    sp.set_defaults(func=cmd_phi)

    sp = sub.add_parser("finite-profile", parents=[common],
                        help="exact profile over a finite multiplication table")
    sp.add_argument("-n", "--max-size", type=int, required=True)
    sp.set_defaults(func=cmd_finite_profile)

    sp = sub.add_parser("chain2-bound",
                        help="profile bound from a one-piece filling table")
    sp.add_argument("--delta", required=True, metavar="FILE",
                    help="file of integers delta(0..n), delta(0) = 0")
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.set_defaults(func=cmd_chain2_bound)

    sp = sub.add_parser("disk-bound",
                        help="best table sum over a fixed number of pieces")
    sp.add_argument("--delta", required=True, metavar="FILE")
    sp.add_argument("--parts", type=int, required=True)
    sp.add_argument("--format", choices=("human", "json", "csv"), default="human")
    sp.set_defaults(func=cmd_disk_bound)

    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
        return args.func(args)
    except ChainProfileError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
