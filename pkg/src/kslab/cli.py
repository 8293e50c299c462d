"""Command-line front end: ``kslab stats|check|scan|region``.

Exit codes: 0 when every checked assertion held, 2 on a violation, 3 on bad
input or refused bounds.  Reports are JSON on stdout (or ``--out``) and are
byte-identical for identical arguments; wall-clock timing is only included
with ``--timing``.  ``KSLAB_WORKERS`` sets the worker count for ``scan``.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path
from typing import Callable, Iterable

from . import __version__
from .equality import (
    PreconditionError,
    ScanReport,
    ks_equality_report,
    scan_poset,
    stanley_equality_report,
)
from .io import DocumentError, PosetDocument, dumps, encode_value, load_document, poset_hash
from .poset import ChainPartition, LinearExtension, Poset, PosetError, width2_partition
from .region import RegionError, enumerate_regions, path_of_extension, region_of, render
from .stats import (
    SameChainError,
    check_ks,
    check_q_ks,
    check_q_stanley,
    check_stanley,
    f_dist,
    f_mq_dist,
    f_q_dist,
    n_dist,
    n_mq_dist,
    n_q_dist,
)

OK, VIOLATION, INPUT_ERROR = 0, 2, 3

LIMITS = {"general_n": 9, "region_n": 12, "random_n": 12, "random_count": 100000}


class InputError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _load(path: str) -> tuple[PosetDocument, Poset]:
    doc = load_document(path)
    return doc, doc.poset()


def _element(p: Poset, raw: str | None, name: str) -> int | None:
    if raw is None:
        return None
    try:
        u = int(raw)
    except ValueError:
        raise InputError(f"{name} must be an element id, got {raw!r}")
    if not 1 <= u <= p.n:
        raise InputError(f"{name} = {u} is not an element of a poset on {p.n} elements")
    return u


def _partition(doc: PosetDocument, why: str) -> ChainPartition:
    if doc.chains is None:
        raise InputError(f"{why} needs a chain partition ('chains' in the poset file)")
    return doc.partition()


def _k_range(spec: str | None, n: int) -> list[int]:
    if spec is None or spec == "all":
        return list(range(2, n))
    try:
        if "-" in spec:
            lo, hi = spec.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in spec.split(",")]
    except ValueError:
        raise InputError(f"bad k range {spec!r}; use e.g. 3, 2-5 or 2,4,6")


def _table(dist) -> dict:
    return {str(k): encode_value(v) for k, v in sorted(dist.table.items())}


def _instance(p: Poset, **extra) -> dict:
    out = {"poset": poset_hash(p), "n": p.n}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def _emit(report: dict, out: str | None) -> None:
    text = dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------------ stats


def cmd_stats(args) -> int:
    doc, p = _load(args.poset)
    x = _element(p, args.x, "x")
    y = _element(p, args.y, "y")
    if y is not None and y == x:
        raise InputError("x and y must be distinct")
    report = {"command": "stats", "version": __version__, "instance": _instance(p, x=x, y=y)}
    tables = {}
    if y is None:
        tables["N"] = _table(n_dist(p, x))
    else:
        tables["F"] = _table(f_dist(p, x, y))
    if args.q or args.mq:
        cp = _partition(doc, "--q/--mq")
        if args.q:
            tables["Nq" if y is None else "Fq"] = _table(n_q_dist(p, cp, x) if y is None else f_q_dist(p, cp, x, y))
        if args.mq:
            tables["Nmq" if y is None else "Fmq"] = _table(
                n_mq_dist(p, cp, x) if y is None else f_mq_dist(p, cp, x, y)
            )
    report["tables"] = tables
    _emit(report, args.out)
    return OK


# ------------------------------------------------------------------ check


CHECKS: dict[str, Callable] = {
    "stanley": lambda doc, p, x, y: check_stanley(p, x),
    "ks": lambda doc, p, x, y: check_ks(p, x, y),
    "q-stanley": lambda doc, p, x, y: check_q_stanley(p, _partition(doc, "q-stanley"), x),
    "q-ks": lambda doc, p, x, y: check_q_ks(p, _partition(doc, "q-ks"), x, y),
}


def cmd_check(args) -> int:
    doc, p = _load(args.poset)
    x = _element(p, args.x, "x")
    y = _element(p, args.y, "y")
    needs_y = args.which in ("ks", "q-ks")
    if needs_y and y is None:
        raise InputError(f"{args.which} needs y")
    if y is not None and x == y:
        raise InputError("x and y must be distinct")
    ks = _k_range(args.k, p.n)
    report = {
        "command": "check",
        "version": __version__,
        "which": args.which,
        "instance": _instance(p, x=x, y=y),
    }
    status = OK
    if args.which == "equality":
        cp = _partition(doc, "equality")
        rows = []
        for k in ks:
            if y is None:
                rep = stanley_equality_report(p, cp, x, k)
            else:
                rep = ks_equality_report(p, cp, x, y, k)
            rows.append({"k": k, "conditions": rep.conds, "epsilon": rep.epsilon, "consistent": rep.consistent})
            if not rep.consistent:
                status = VIOLATION
        report["verdicts"] = rows
    else:
        verdicts = CHECKS[args.which](doc, p, x, y)
        chosen = set(ks)
        rows = []
        for v in verdicts:
            if v.k not in chosen:
                continue
            rows.append({"k": v.k, "holds": v.holds, "difference": encode_value(v.difference)})
            if not v.holds:
                status = VIOLATION
        report["verdicts"] = rows
    report["ok"] = status == OK
    _emit(report, args.out)
    return status


# ------------------------------------------------------------------- scan


def _general_source(args) -> Iterable[Poset]:
    from .generate import posets_of_size, random_poset

    if args.mode == "exhaustive":
        for n in range(args.min_n, args.max_n + 1):
            yield from posets_of_size(n)
    else:
        rng = random.Random(args.seed)
        for _ in range(args.count):
            yield random_poset(args.n, args.density, rng)


def _region_source(args):
    from .generate import random_region

    a, b = args.region_ab
    if args.mode == "exhaustive":
        yield from enumerate_regions(a, b)
    else:
        rng = random.Random(args.seed)
        for _ in range(args.count):
            yield random_region(a, b, rng)


def _scan_one(p: Poset) -> ScanReport:
    return scan_poset(p)


def _region_one(reg):
    from .batch import SweepTally, sweep_region

    tallies = (SweepTally(), SweepTally(), SweepTally())
    sweep_region(reg, *tallies)
    return tallies


def _workers() -> int:
    raw = os.environ.get("KSLAB_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"KSLAB_WORKERS must be an integer, got {raw!r}")


def _mapped(fn, items):
    """Order-preserving map, fanned out to a process pool when workers > 1."""
    w = _workers()
    if w == 1:
        return map(fn, items)
    return _pooled(fn, items, w)


def _pooled(fn, items, w: int):
    from multiprocessing import Pool

    with Pool(w) as pool:
        yield from pool.imap(fn, items, chunksize=16)


def _check_bounds(args) -> None:
    if args.region_ab is not None:
        a, b = args.region_ab
        if a < 0 or b < 0 or a + b > LIMITS["region_n"]:
            raise InputError(f"region size a + b = {a + b} exceeds {LIMITS['region_n']}; try --region-ab 4,4")
    elif args.mode == "exhaustive":
        if args.max_n is None:
            raise InputError("exhaustive general scans need --max-n")
        if args.max_n > LIMITS["general_n"]:
            raise InputError(f"--max-n {args.max_n} exceeds {LIMITS['general_n']}; try --max-n 7")
        if args.min_n < 1 or args.min_n > args.max_n:
            raise InputError("--min-n must lie between 1 and --max-n")
    else:
        if args.n is None:
            raise InputError("random general scans need --n")
        if not 1 <= args.n <= LIMITS["random_n"]:
            raise InputError(f"--n {args.n} outside 1..{LIMITS['random_n']}; try --n 8")
        if not 0.0 <= args.density <= 1.0:
            raise InputError("--density must lie in [0, 1]")
    if args.mode == "random" and not 1 <= args.count <= LIMITS["random_count"]:
        raise InputError(f"--count must lie in 1..{LIMITS['random_count']}; try --count 1000")


def cmd_scan(args) -> int:
    _check_bounds(args)
    start = time.perf_counter()
    report = {"command": "scan", "version": __version__, "mode": args.mode}
    if args.mode == "random":
        report["seed"] = args.seed
        report["count"] = args.count
    if args.region_ab is not None:
        from .batch import SweepTally

        a, b = args.region_ab
        report["suite"] = "regions"
        report["shape"] = [a, b]
        names = ("q_kahn_saks", "stanley_equality", "kahn_saks_equality")
        totals = [SweepTally() for _ in names]
        for part in _mapped(_region_one, _region_source(args)):
            for tot, t in zip(totals, part):
                tot.regions += t.regions
                tot.instances += t.instances
                tot.failures += t.failures
                tot.examples.extend(t.examples[: max(0, 5 - len(tot.examples))])
        report["results"] = {
            name: {"regions": t.regions, "instances": t.instances, "failures": t.failures, "examples": t.examples}
            for name, t in zip(names, totals)
        }
        ok = all(t.ok for t in totals)
    else:
        report["suite"] = "general"
        if args.mode == "exhaustive":
            report["range"] = [args.min_n, args.max_n]
        else:
            report["n"] = args.n
            report["density"] = args.density
        rep = ScanReport()
        posets = 0
        for part in _mapped(_scan_one, _general_source(args)):
            rep = rep.merge(part)
            posets += 1
        report["posets"] = posets
        report["results"] = rep.to_json()
        report["specimen_count"] = len(rep.specimens)
        ok = rep.ok
    report["ok"] = ok
    if args.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(report, args.out)
    return OK if ok else VIOLATION


# ----------------------------------------------------------------- region


def cmd_region(args) -> int:
    doc, p = _load(args.poset)
    # without explicit chains, any partition into two chains will do
    cp = doc.partition() if doc.chains is not None else width2_partition(p)
    reg = region_of(p, cp)
    path = None
    if args.extension:
        try:
            order = [int(v) for v in args.extension.split(",")]
        except ValueError:
            raise InputError("--extension must be a comma-separated element order")
        if sorted(order) != list(range(1, p.n + 1)):
            raise InputError("--extension must list every element exactly once")
        L = LinearExtension.from_order(order)
        if not L.is_valid_for(p):
            raise InputError("--extension is not a linear extension of the poset")
        path = path_of_extension(p, cp, L)
    sys.stdout.write(render(reg, path) + "\n")
    if path is not None:
        sys.stdout.write(f"path:  {''.join(path.steps)}\n")
    return OK


# ----------------------------------------------------------------- parser


def _pair(raw: str) -> tuple[int, int]:
    try:
        a, b = (int(v) for v in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a,b")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kslab", description="Linear-extension statistics of finite posets.")
    ap.add_argument("--version", action="version", version=f"kslab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("stats", help="N(k) or F(k) tables, optionally q-weighted")
    s.add_argument("poset")
    s.add_argument("x")
    s.add_argument("y", nargs="?")
    s.add_argument("--q", action="store_true", help="weight by the sum of first-chain ranks")
    s.add_argument("--mq", action="store_true", help="multivariate weight (first-chain rank gaps)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_stats)

    c = sub.add_parser("check", help="log-concavity or equality verdicts per k")
    c.add_argument("poset")
    c.add_argument("x")
    c.add_argument("y", nargs="?")
    c.add_argument("--which", choices=["stanley", "ks", "q-stanley", "q-ks", "equality"], default="stanley")
    c.add_argument("--k", help="k values: 3, 2-5, 2,4 or all (default: 2..n-1)")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    sc = sub.add_parser("scan", help="exhaustive or random sweeps")
    sc.add_argument("mode", choices=["exhaustive", "random"])
    sc.add_argument("--max-n", type=int)
    sc.add_argument("--min-n", type=int, default=1)
    sc.add_argument("--n", type=int, help="poset size for random general scans")
    sc.add_argument("--density", type=float, default=0.35)
    sc.add_argument("--region-ab", type=_pair, help="run the width-two region suite on shape a,b")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--count", type=int, default=100)
    sc.add_argument("--timing", action="store_true")
    sc.add_argument("--out")
    sc.set_defaults(func=cmd_scan)

    r = sub.add_parser("region", help="ASCII picture of the lattice-path region")
    r.add_argument("poset")
    r.add_argument("--extension", help="overlay the path of this element order, e.g. 1,4,2,3")
    r.set_defaults(func=cmd_region)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code not in (0, None) else OK
    try:
        return args.func(args)
    except (InputError, DocumentError, PosetError, RegionError, PreconditionError) as exc:
        sys.stderr.write(f"kslab: error: {exc}\n")
        return INPUT_ERROR
    except SameChainError as exc:
        sys.stderr.write(f"kslab: refused: {exc}\n")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
