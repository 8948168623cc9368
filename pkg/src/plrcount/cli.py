"""Command-line surface: counting, polynomials, class counts, and the
cross-verification battery.

Exit codes: 0 success, 1 verification failure, 2 infeasible request.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import factorial

from . import chromatic, classes, incexc, oracle, sade
from .core import Shape, TriPoly, WeightDistribution

CACHE_ENV = "PLRCOUNT_CACHE"

_ORACLE_NODE_LIMIT = 300_000_000
_SADE_LIMIT = lambda s, n: s + n <= 16 and s * n <= 64  # noqa: E731


class InfeasibleError(Exception):
    pass


# ---------------------------------------------------------------------------
# Result cache: append-only text lines "<KIND> <r> <s> <n> <m> <count>"
# ---------------------------------------------------------------------------


class ResultCache:
    def __init__(self, path: str | None):
        self.path = path
        self.entries: dict[tuple[str, int, int, int, int], int] = {}
        if path and os.path.exists(path):
            with open(path, "r", encoding="ascii") as fh:
                for line in fh:
                    parts = line.split()
                    if len(parts) != 6:
                        continue
                    kind, r, s, n, m, count = parts
                    key = (kind, int(r), int(s), int(n), int(m))
                    value = int(count)
                    old = self.entries.get(key)
                    if old is not None and old != value:
                        print(
                            f"warning: cache conflict for {key}: "
                            f"{old} overwritten by {value}",
                            file=sys.stderr,
                        )
                    self.entries[key] = value

    def get(self, kind: str, shape: Shape, m: int) -> int | None:
        return self.entries.get((kind, shape.r, shape.s, shape.n, m))

    def put_distribution(self, kind: str, shape: Shape, dist: WeightDistribution):
        if not self.path:
            return
        with open(self.path, "a", encoding="ascii") as fh:
            for m, count in enumerate(dist):
                key = (kind, shape.r, shape.s, shape.n, m)
                old = self.entries.get(key)
                if old is not None and old != count:
                    print(
                        f"warning: cache value changed for {key}: {old} -> {count}",
                        file=sys.stderr,
                    )
                self.entries[key] = count
                fh.write(f"{kind} {shape.r} {shape.s} {shape.n} {m} {count}\n")


# ---------------------------------------------------------------------------
# Count dispatch
# ---------------------------------------------------------------------------


def _oracle_feasible(shape: Shape) -> bool:
    from math import comb

    total_bound = sum(
        comb(shape.cells, m) * min(shape.n, max(shape.r, shape.s)) ** m
        for m in range(min(shape.cells, 6) + 1)
    )
    return total_bound <= _ORACLE_NODE_LIMIT and shape.cells * shape.n <= 160


def compute_distribution(
    shape: Shape,
    method: str,
    plain_tail_rows: int = 0,
    threads: int = 1,
    max_ones: int | None = None,
) -> WeightDistribution:
    if method == "oracle":
        if not _oracle_feasible(shape):
            raise InfeasibleError(
                f"oracle: exhaustive backtracking infeasible at {shape}"
            )
        return oracle.count_all(shape)
    if method == "sade":
        o = sade.orient_shape(shape)
        if not _SADE_LIMIT(o.s, o.n):
            raise InfeasibleError(f"sade: {shape} exceeds the 64-bit code limit")
        return sade.sade_count(shape, plain_tail_rows=plain_tail_rows, threads=threads)
    if method == "blocks":
        side = max(shape.r, shape.s)
        if side > 8:
            raise InfeasibleError(f"blocks: grid side {side} exceeds the block cap")
        if max_ones is not None and max_ones < shape.cells:
            raise InfeasibleError(
                f"blocks: weights above --max-ones {max_ones} were requested; "
                f"pass --m at most {max_ones} or raise the cap"
            )
        return chromatic.count_distribution(shape)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _render_counts(shape: Shape, counts, method: str, fmt: str, out) -> None:
    if fmt == "json":
        payload = {
            "r": shape.r,
            "s": shape.s,
            "n": shape.n,
            "method": method,
            "counts": [str(c) for c in counts],
        }
        out.write(json.dumps(payload) + "\n")
        return
    if fmt == "csv":
        out.write("m,count\n")
        for m, c in enumerate(counts):
            out.write(f"{m},{c}\n")
        out.write(f"total,{sum(counts)}\n")
        return
    width = max(len(str(sum(counts))), 5)
    out.write(f"#PLR({shape.r},{shape.s},{shape.n};m) by {method}\n")
    out.write(f"{'m':>4} {'count':>{width}}\n")
    for m, c in enumerate(counts):
        out.write(f"{m:>4} {c:>{width}}\n")
    out.write(f"{'all':>4} {sum(counts):>{width}}\n")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_count(args, out=sys.stdout) -> int:
    shape = Shape(args.r, args.s, args.n)
    cache = ResultCache(args.cache)
    try:
        if (
            args.method == "blocks"
            and args.m is not None
            and (args.max_ones is None or args.m <= args.max_ones)
        ):
            # single-weight block assembly only needs blocks up to m ones
            side = max(shape.r, shape.s)
            if side > 8:
                raise InfeasibleError(f"blocks: grid side {side} exceeds the cap")
            value = chromatic.count_via_blocks(shape, args.m)
            if args.format == "table":
                out.write(
                    f"#PLR({shape.r},{shape.s},{shape.n};{args.m}) = {value}\n"
                )
            else:
                _render_counts(shape, [value], args.method, args.format, out)
            return 0
        dist = compute_distribution(
            shape, args.method, plain_tail_rows=args.plain_tail_rows,
            threads=args.threads, max_ones=args.max_ones,
        )
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    cache.put_distribution("PLR", shape, dist)
    if args.m is not None:
        counts = [dist[args.m]]
        if args.format == "table":
            out.write(f"#PLR({shape.r},{shape.s},{shape.n};{args.m}) = {dist[args.m]}\n")
        else:
            _render_counts(shape, counts, args.method, args.format, out)
    else:
        _render_counts(shape, list(dist), args.method, args.format, out)
    return 0


def cmd_poly(args, out=sys.stdout) -> int:
    if args.method == "blocks":
        if args.m > 13:
            print("infeasible: block tables cap at m = 13", file=sys.stderr)
            return 2
        poly = chromatic.f_m_polynomial(args.m)
    else:
        if args.m < 1:
            print("infeasible: truncated polynomials need m >= 1", file=sys.stderr)
            return 2
        poly = incexc.f_m_truncated(args.m, args.max_vertices)
    out.write(f"f_{args.m}(r,s,n) [{args.method}]\n")
    out.write(poly.bar_string() + "\n")
    if args.expanded:
        out.write(poly.expanded_string() + "\n")
    if args.eval:
        r, s, n = (int(x) for x in args.eval.split(","))
        value = poly.evaluate(r, s, n)
        out.write(f"f_{args.m}({r},{s},{n}) = {value}\n")
        out.write(
            f"#PLR({r},{s},{n};{args.m}) = {value // factorial(args.m)}\n"
        )
    return 0


def cmd_classes(args, out=sys.stdout) -> int:
    shape = Shape(args.r, args.s, args.n)
    cache = ResultCache(args.cache)
    if args.kind == "isom":
        if len({args.r, args.s, args.n}) != 1:
            print("infeasible: isomorphism classes need r = s = n", file=sys.stderr)
            return 2
        dist = classes.isom_count(args.n)
        kind_tag = "ISOM"
    elif args.kind == "isot":
        dist = classes.isot_count(shape)
        kind_tag = "ISOT"
    else:
        dist = classes.mc_count(shape)
        kind_tag = "MC"
    cache.put_distribution(kind_tag, shape, dist)
    _render_counts(shape, list(dist), f"classes-{args.kind}", args.format, out)
    return 0


def cmd_classes_unbounded(args, out=sys.stdout) -> int:
    kind = "isotopism" if args.kind in ("isotopism", "isot") else "main"
    counts = classes.unbounded_class_counts(args.max_m, kind)
    if args.format == "json":
        out.write(
            json.dumps({"kind": kind, "counts": [str(c) for c in counts]}) + "\n"
        )
    else:
        out.write(f"{kind} classes with r, s, n >= m\n")
        for m, c in enumerate(counts):
            out.write(f"{m:>4} {c}\n")
    return 0


# ---------------------------------------------------------------------------
# Verification battery
# ---------------------------------------------------------------------------


def _best_distribution(shape: Shape, threads: int = 1) -> WeightDistribution | None:
    if _oracle_feasible(shape):
        return oracle.count_all(shape)
    o = sade.orient_shape(shape)
    if _SADE_LIMIT(o.s, o.n):
        return sade.cached_sade_count(shape)
    return None


def cmd_verify(args, out=sys.stdout) -> int:
    shape = Shape(args.r, args.s, args.n)
    failures = 0
    skipped = 0
    checks = 0

    def report(name: str, ok: bool | None) -> None:
        nonlocal failures, skipped, checks
        checks += 1
        if ok is None:
            skipped += 1
            out.write(f"SKIP  {name}\n")
        elif ok:
            out.write(f"PASS  {name}\n")
        else:
            failures += 1
            out.write(f"FAIL  {name}\n")

    base = _best_distribution(shape, args.threads)
    if base is None:
        print(f"infeasible: no method can count {shape}", file=sys.stderr)
        return 2

    # (a) congruence checks against smaller shapes, per axis and k
    ks = [args.k] if args.k is not None else None
    for axis, dim in (("rows", shape.r), ("cols", shape.s), ("syms", shape.n)):
        for k in ks if ks is not None else range(dim):
            if k >= dim:
                continue
            modulus = dim - k
            if modulus == 1:
                continue
            name = f"congruence {axis}: k={k} (mod {modulus})"
            if k == 0:
                small: WeightDistribution | None = None
                small_counts = [1] + [0] * shape.cells
            else:
                if axis == "rows":
                    small_shape = Shape(k, shape.s, shape.n)
                elif axis == "cols":
                    small_shape = Shape(shape.r, k, shape.n)
                else:
                    small_shape = Shape(shape.r, shape.s, k)
                small = _best_distribution(small_shape, args.threads)
                if small is None:
                    report(name, None)
                    continue
                small_counts = [small[m] for m in range(shape.cells + 1)]
            ok = all(
                (base[m] - small_counts[m]) % modulus == 0
                for m in range(shape.cells + 1)
            )
            report(name, ok)

    # (b) cross-method agreement
    others = []
    for method in ("oracle", "sade", "blocks"):
        try:
            others.append((method, compute_distribution(shape, method)))
        except InfeasibleError:
            report(f"cross-method: {method}", None)
    for method, dist in others:
        report(f"cross-method: {method}", dist.counts == base.counts)

    # (c) parastrophe invariance of the distribution
    import itertools as _it

    seen = set()
    for perm in _it.permutations(shape.dims):
        if perm in seen:
            continue
        seen.add(perm)
        other = Shape(*perm)
        dist = _best_distribution(other, args.threads)
        name = f"parastrophe invariance: {other}"
        if dist is None:
            report(name, None)
            continue
        length = max(shape.cells, other.cells) + 1
        report(
            name,
            [base[m] for m in range(length)] == [dist[m] for m in range(length)],
        )

    out.write(
        f"verify {shape}: {checks} checks, {failures} failures, {skipped} skipped\n"
    )
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plrcount",
        description="Enumerate partial Latin rectangles by weight and count "
        "their equivalence classes.",
    )
    parser.add_argument(
        "--cache",
        default=os.environ.get(CACHE_ENV),
        help=f"result cache file (default from ${CACHE_ENV})",
    )
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument(
        "--format", choices=("table", "csv", "json"), default="table"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="weight distribution of PLR(r,s,n)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("oracle", "sade", "blocks"), default="sade")
    p.add_argument("--m", type=int, default=None, help="single weight to print")
    p.add_argument("--plain-tail-rows", type=int, default=0, dest="plain_tail_rows")
    p.add_argument(
        "--max-ones", type=int, default=None, dest="max_ones",
        help="cap on block sizes for the blocks method",
    )
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("poly", help="weight-m counting polynomial")
    p.add_argument("--m", type=int, required=True)
    p.add_argument(
        "--method", choices=("blocks", "incexc-truncated"), default="blocks"
    )
    p.add_argument("--max-vertices", type=int, default=5, dest="max_vertices")
    p.add_argument("--expanded", action="store_true")
    p.add_argument("--eval", default=None, help="evaluate at r,s,n")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("classes", help="isomorphism/isotopism/main class counts")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("isom", "isot", "mc"), required=True)
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser(
        "classes-unbounded", help="class counts when r, s, n all exceed m"
    )
    p.add_argument("--max-m", type=int, required=True, dest="max_m")
    p.add_argument("--kind", choices=("isotopism", "isot", "main"), required=True)
    p.set_defaults(func=cmd_classes_unbounded)

    p = sub.add_parser("verify", help="congruence and cross-method battery")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
