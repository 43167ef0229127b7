"""qcrank command line: construct, rank, bounds, check, export, simulate.

Exit status is 0 on success, 1 when a requested check fails and 2 for
usage or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import constructions
from .constructions import ConstructionError, burst_erasure_check, build_from_descriptor
from .decoder import CSV_HEADER, CodeInstance, monte_carlo
from .dispersion import BudgetExceeded, disperse, expand
from .fmat import BinaryMatrix, girth_lower_bound, rank_gf2, rc_constraint_check, sm_constraint_check
from .formats import FormatError, format_alist, format_base, read_alist, read_base, read_descriptor
from .galois import FieldError
from .transform import (
    low_rank_redundancy,
    transform_rank,
    zero_free_redundancy,
)

ORACLE_MAX_R = 5

_DESCRIPTOR_FLAGS = ("r", "m", "n", "row_offset", "col_offset", "consecutive", "seed", "m_w",
                     "n_w", "c_w", "blocks", "m_g", "block_size", "generator", "shifts",
                     "col_weights", "col_counts", "length")


class UsageError(Exception):
    pass


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _int_list(raw: str) -> list[int]:
    return [int(x, 0) for x in raw.split(",") if x.strip()]


def _row_list(raw: str) -> list[int]:
    """Comma-separated row indices and inclusive ranges, e.g. ``0-9,15``."""
    out: list[int] = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        lo, _, hi = part.partition("-")
        out.extend(range(int(lo), int(hi or lo) + 1))
    return out


def _descriptor_from_args(args) -> dict:
    if args.descriptor:
        desc = read_descriptor(args.descriptor)
        if args.family and args.family != desc["family"]:
            raise UsageError(f"family {args.family!r} conflicts with descriptor {desc['family']!r}")
    else:
        if not args.family:
            raise UsageError("give a family or --descriptor")
        desc = {"family": args.family}
    for key in _DESCRIPTOR_FLAGS:
        val = getattr(args, key, None)
        if val is not None:
            desc[key] = val
    return desc


def _load(args):
    base, block = read_base(args.base)
    if getattr(args, "block_size", None):
        block = args.block_size
    return base, block


# -- subcommands ------------------------------------------------------------

def cmd_construct(args) -> int:
    desc = _descriptor_from_args(args)
    base, block = build_from_descriptor(desc)
    _emit(format_base(base, block), args.out)
    if args.alist:
        H = expand(disperse(base, block), args.budget)
        _emit(format_alist(H), args.alist)
    return 0


def cmd_rank(args) -> int:
    base, block = _load(args)
    report = transform_rank(base, block_size=block)
    if args.json:
        _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    else:
        _emit(report.to_text() + "\n", args.out)
    return 0


def cmd_bounds(args) -> int:
    base, block = _load(args)
    rep = transform_rank(base, block_size=block)
    t = rep.table
    c1 = t.rows[1].size if t.count > 1 else 0
    data = {
        "exact_rank": rep.exact_rank,
        "recursive_bound": rep.recursive_bound,
        "weight_bound": rep.weight_bound,
        "redundant_rows": rep.redundant_rows,
        "redundancy": round(rep.redundancy, 4),
        "weight_redundancy_floor": rep.rows - rep.weight_bound,
        "low_rank_redundancy_floor": low_rank_redundancy(rep.m, t.mu1, c1) if rep.m <= rep.n else None,
        "zero_free_redundancy_floor": (zero_free_redundancy(rep.m, t.mu1, c1)
                                       if not (base.values == 0).any() and rep.m <= rep.n else None),
    }
    if args.json:
        _emit(json.dumps(data, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"{k}: {v}\n" for k, v in data.items()), args.out)
    return 0


def cmd_check(args) -> int:
    base, block = _load(args)
    results: list[tuple[str, bool, str]] = []

    bad = sm_constraint_check(base)
    results.append(("sm-constraint", bad is None, "" if bad is None else f"singular minor rows {bad[0]} cols {bad[1]}"))

    need_h = args.rc or args.oracle or args.burst is not None
    if args.oracle and base.ctx.r > ORACLE_MAX_R and not args.allow_large:
        raise UsageError(f"oracle check refused for r={base.ctx.r} > {ORACLE_MAX_R}; "
                         "pass --allow-large with --budget")
    H = expand(disperse(base, block), args.budget) if need_h else None

    if args.rc:
        pair = rc_constraint_check(H)
        results.append(("rc-constraint", pair is None, "" if pair is None else f"rows {pair}"))
        results.append(("girth>=6", girth_lower_bound(H) >= 6, ""))
    if args.oracle:
        fast = transform_rank(base, block_size=block).exact_rank
        slow = rank_gf2(H)
        results.append(("transform-vs-oracle", fast == slow, f"transform {fast}, elimination {slow}"))
    if args.burst is not None:
        rep = burst_erasure_check(H, args.burst)
        note = f"max correctable burst {rep.correctable}"
        if rep.failing_start is not None:
            note += f", first failing start {rep.failing_start}"
        results.append((f"burst<={args.burst}", rep.ok, note))

    failed = 0
    for name, ok, note in results:
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({note})" if note else ""))
    return 1 if failed else 0


def cmd_export(args) -> int:
    base, block = _load(args)
    _emit(format_alist(expand(disperse(base, block), args.budget)), args.out)
    return 0


def cmd_simulate(args) -> int:
    if bool(args.alist) == bool(args.base):
        raise UsageError("give exactly one of --alist or --base")
    if args.alist:
        H = read_alist(args.alist)
    else:
        base, block = read_base(args.base)
        H = expand(disperse(base, block), args.budget)
    if args.rows is not None:
        rows = _row_list(args.rows)
        if not rows or min(rows) < 0 or max(rows) >= H.shape[0]:
            raise UsageError(f"--rows must select indices in [0, {H.shape[0] - 1}]")
        H = BinaryMatrix.from_dense(H.to_dense()[sorted(set(rows))])
    code = CodeInstance.from_matrix(H)
    lines = [CSV_HEADER]
    for p in args.points:
        res = monte_carlo(code, args.channel, p, args.frames, args.max_iters, args.seed,
                          args.algorithm, args.scale)
        lines.append(res.csv_row())
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- parser -----------------------------------------------------------------

def _add_base(p):
    p.add_argument("base", help="base-matrix file (header 'r m n [e]', exponent rows, -1 = zero)")
    p.add_argument("--block-size", type=int, help="dispersion size dividing q-1")
    p.add_argument("--out", "-o", help="output path (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcrank", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a base matrix (and optionally its alist)")
    p.add_argument("family", nargs="?", choices=constructions.FAMILIES)
    p.add_argument("--descriptor", help="key = value construction file")
    for flag in ("r", "m", "n", "row-offset", "col-offset", "seed", "m-w", "n-w", "c-w",
                 "blocks", "m-g", "block-size", "length"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--generator", type=lambda s: int(s, 0), help="generator polynomial bitmask")
    for flag in ("shifts", "col-weights", "col-counts"):
        p.add_argument(f"--{flag}", type=_int_list, help="comma-separated integers")
    p.add_argument("--consecutive", action="store_true", default=None)
    p.add_argument("--random-partition", dest="consecutive", action="store_false")
    p.add_argument("--out", "-o")
    p.add_argument("--alist", help="also write the dispersed matrix as alist")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("rank", help="exact rank, bounds and per-class table")
    _add_base(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bounds", help="rank bounds and redundancy floors")
    _add_base(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("check", help="structural and rank checks")
    _add_base(p)
    p.add_argument("--rc", action="store_true", help="RC-constraint and girth flag on the expansion")
    p.add_argument("--oracle", action="store_true", help="compare against GF(2) elimination")
    p.add_argument("--allow-large", action="store_true", help="permit the oracle for r > 5")
    p.add_argument("--budget", type=int, help="expansion memory budget in bytes")
    p.add_argument("--burst", type=int, metavar="L", help="verify all bursts of length <= L")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="write the dispersed matrix as alist")
    _add_base(p)
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("simulate", help="Monte Carlo decoding, CSV output")
    p.add_argument("--alist")
    p.add_argument("--base")
    p.add_argument("--channel", choices=("awgn", "bsc"), default="awgn")
    p.add_argument("--points", type=lambda s: [float(x) for x in s.split(",")], required=True,
                   help="Eb/N0 values in dB (awgn) or crossover probabilities (bsc)")
    p.add_argument("--frames", type=int, default=1000)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algorithm", choices=("spa", "msa"), default="spa")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--budget", type=int)
    p.add_argument("--rows", help="decode with this row subset only, e.g. 0-299,310")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConstructionError, FieldError, FormatError, BudgetExceeded,
            FileNotFoundError, ValueError) as exc:
        print(f"qcrank {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
