"""Equivalence-class counting: Burnside sums over conjugacy classes, and
constructive enumeration of classes at unbounded shape.

Burnside needs one fixed-point count per conjugacy class of the acting
group.  Conjugacy classes of isotopisms are triples of cycle structures; for
paratopisms with a non-trivial role permutation they reduce to the normal
forms (Id, beta, gamma) with pi = (12) and (Id, Id, gamma) with pi = (123).
An lcm feasibility test discards most triples without any search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm

from . import oracle
from .canon import ColoredGraph, canonical_code
from .core import (
    CycleStructure,
    Isotopism,
    Paratopism,
    Permutation,
    Shape,
    WeightDistribution,
    cycle_structures,
    permutations_with_structure,
)


@dataclass(frozen=True)
class DeltaKey:
    """Conjugacy data selecting one fixed-point count.

    kind "identity": structures (z1 on [r], z2 on [s], z3 on [n]), pi = Id.
    kind "swap":     structures (z2 on [r], z3 on [n]), pi = (12), needs r=s.
    kind "three-cycle": structures (z3 on [r],), pi = (123), needs r=s=n.
    """

    kind: str
    structures: tuple[CycleStructure, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "swap", "three-cycle"):
            raise ValueError(f"unknown kind {self.kind!r}")
        expected = {"identity": 3, "swap": 2, "three-cycle": 1}[self.kind]
        if len(self.structures) != expected:
            raise ValueError(f"{self.kind} needs {expected} cycle structures")


def _lcm_feasible(z1: CycleStructure, z2: CycleStructure, z3: CycleStructure) -> bool:
    """Whether any non-empty PLR is fixed by an isotopism with these
    structures: some present triple (i, j, k) must satisfy
    lcm(i,j) = lcm(i,k) = lcm(j,k) = lcm(i,j,k)."""
    for i in z1.lengths():
        for j in z2.lengths():
            lij = lcm(i, j)
            for k in z3.lengths():
                if lij == lcm(i, k) == lcm(j, k) == lcm(i, j, k):
                    return True
    return False


def representative_paratopism(key: DeltaKey, shape: Shape) -> Paratopism:
    r, s, n = shape.dims
    if key.kind == "identity":
        z1, z2, z3 = key.structures
        if (z1.degree, z2.degree, z3.degree) != (r, s, n):
            raise ValueError(f"{key} does not fit {shape}")
        return Paratopism(
            Isotopism(z1.representative(), z2.representative(), z3.representative()),
            Permutation.identity(3),
        )
    if key.kind == "swap":
        if r != s:
            raise ValueError("swap kind requires r = s")
        z2, z3 = key.structures
        if (z2.degree, z3.degree) != (r, n):
            raise ValueError(f"{key} does not fit {shape}")
        return Paratopism(
            Isotopism(
                Permutation.identity(r), z2.representative(), z3.representative()
            ),
            Permutation([1, 0, 2]),
        )
    if r != s or s != n:
        raise ValueError("three-cycle kind requires r = s = n")
    (z3,) = key.structures
    if z3.degree != r:
        raise ValueError(f"{key} does not fit {shape}")
    return Paratopism(
        Isotopism(Permutation.identity(r), Permutation.identity(r), z3.representative()),
        Permutation([1, 2, 0]),
    )


@lru_cache(maxsize=4096)
def _delta_cached(key: DeltaKey, dims: tuple[int, int, int]) -> tuple[int, ...]:
    shape = Shape(*dims)
    if key.kind == "identity":
        z1, z2, z3 = key.structures
        if not _lcm_feasible(z1, z2, z3):
            return (1,) + (0,) * shape.cells
    return oracle.count_fixed_by(representative_paratopism(key, shape), shape).counts


def delta(key: DeltaKey, shape: Shape) -> WeightDistribution:
    """Fixed-point weight distribution of one representative paratopism with
    the requested conjugacy data (well-defined across the class)."""
    return WeightDistribution(shape, _delta_cached(key, shape.dims))


def _structure_weight(z: CycleStructure) -> Fraction:
    """Fraction of S_t with cycle structure z."""
    return Fraction(permutations_with_structure(z), factorial(z.degree))


def isom_count(n: int) -> WeightDistribution:
    """Number of isomorphism classes of partial Latin squares of order n,
    by weight: Burnside over the diagonal action."""
    shape = Shape(n, n, n)
    acc = [Fraction(0)] * (shape.cells + 1)
    for z in cycle_structures(n):
        denom = 1
        for i, d in z.multiplicities.items():
            denom *= factorial(d) * i**d
        dist = delta(DeltaKey("identity", (z, z, z)), shape)
        for m, c in enumerate(dist):
            acc[m] += Fraction(c, denom)
    return _exact_distribution(shape, acc)


def isot_count(shape: Shape) -> WeightDistribution:
    """Number of isotopism classes in PLR(r,s,n), by weight: Burnside over
    cycle-structure triples."""
    acc = [Fraction(0)] * (shape.cells + 1)
    for z1 in cycle_structures(shape.r):
        w1 = _structure_weight(z1)
        for z2 in cycle_structures(shape.s):
            w12 = w1 * _structure_weight(z2)
            for z3 in cycle_structures(shape.n):
                w = w12 * _structure_weight(z3)
                dist = delta(DeltaKey("identity", (z1, z2, z3)), shape)
                for m, c in enumerate(dist):
                    if c:
                        acc[m] += w * c
    return _exact_distribution(shape, acc)


def mc_count(shape: Shape) -> WeightDistribution:
    """Number of main classes in PLR(r,s,n), by weight.

    Dimensions are rearranged so an equal pair, if any, sits in the first
    two coordinates (main-class counts are parastrophe-invariant); then
    Burnside over the paratopism group reduces to the isotopism sum plus
    swap and three-cycle correction terms.
    """
    r, s, n = shape.dims
    if len({r, s, n}) == 3:
        return isot_count(shape)
    if r == s == n:
        work = shape
    else:
        a = r if r == s or r == n else s
        b = next(d for d in (r, s, n) if d != a)
        work = Shape(a, a, b)

    isot = isot_count(work)
    acc = [Fraction(c) for c in isot]
    if work.r == work.s == work.n:
        acc = [c / 6 for c in acc]
    else:
        acc = [c / 2 for c in acc]

    for z2 in cycle_structures(work.r):
        w2 = _structure_weight(z2)
        for z3 in cycle_structures(work.n):
            w = w2 * _structure_weight(z3)
            dist = delta(DeltaKey("swap", (z2, z3)), work)
            factor = Fraction(1, 2)
            for m, c in enumerate(dist):
                if c:
                    acc[m] += factor * w * c

    if work.r == work.s == work.n:
        for z3 in cycle_structures(work.r):
            w = _structure_weight(z3)
            dist = delta(DeltaKey("three-cycle", (z3,)), work)
            for m, c in enumerate(dist):
                if c:
                    acc[m] += Fraction(1, 3) * w * c

    dist = _exact_distribution(work, acc)
    if work == shape:
        return dist
    counts = [dist[m] for m in range(shape.cells + 1)]
    assert sum(counts) == dist.total(), "rearranged weights exceed original grid"
    return WeightDistribution(shape, counts)


def _exact_distribution(shape: Shape, acc: list[Fraction]) -> WeightDistribution:
    counts = []
    for m, val in enumerate(acc):
        if val.denominator != 1:
            raise AssertionError(f"Burnside sum not integral at m={m}: {val}")
        counts.append(int(val))
    return WeightDistribution(shape, counts)


# ---------------------------------------------------------------------------
# Constructive enumeration at unbounded shape
# ---------------------------------------------------------------------------

Entry = tuple[int, int, int]


def _normalize(entries: tuple[Entry, ...]) -> tuple[Entry, ...]:
    """Relabel rows/columns/symbols by first appearance in sorted order."""
    maps: tuple[dict[int, int], ...] = ({}, {}, {})
    for e in sorted(entries):
        for t in range(3):
            if e[t] not in maps[t]:
                maps[t][e[t]] = len(maps[t])
    return tuple(
        sorted((maps[0][i], maps[1][j], maps[2][k]) for (i, j, k) in entries)
    )


def _class_code(entries: tuple[Entry, ...], kind: str) -> bytes:
    """Canonical code of the PLR's colored incidence graph.

    Entries are one color and attach to their row, column, and symbol
    vertices.  For isotopism classes the three roles carry distinct colors;
    for main classes they share one color and three hub vertices (one per
    role, adjacent to all its role's vertices) force any isomorphism to
    permute the roles globally.
    """
    rows = 1 + max((e[0] for e in entries), default=-1)
    cols = 1 + max((e[1] for e in entries), default=-1)
    syms = 1 + max((e[2] for e in entries), default=-1)
    base = rows + cols + syms
    m = len(entries)
    edges = []
    for idx, (i, j, k) in enumerate(entries):
        ev = base + idx
        edges.append((i, ev))
        edges.append((rows + j, ev))
        edges.append((rows + cols + k, ev))
    if kind == "isotopism":
        colors = [0] * rows + [1] * cols + [2] * syms + [3] * m
        return canonical_code(ColoredGraph(base + m, colors, edges))
    colors = [0] * base + [1] * m + [2] * 3
    hub = base + m
    for i in range(rows):
        edges.append((i, hub))
    for j in range(cols):
        edges.append((rows + j, hub + 1))
    for k in range(syms):
        edges.append((rows + cols + k, hub + 2))
    return canonical_code(ColoredGraph(base + m + 3, colors, edges))


def _extensions(entries: tuple[Entry, ...]) -> list[tuple[Entry, ...]]:
    rows = 1 + max((e[0] for e in entries), default=-1)
    cols = 1 + max((e[1] for e in entries), default=-1)
    syms = 1 + max((e[2] for e in entries), default=-1)
    cells = {(i, j) for (i, j, _) in entries}
    row_sym = {(i, k) for (i, _, k) in entries}
    col_sym = {(j, k) for (_, j, k) in entries}
    out = []
    for i in range(rows + 1):
        for j in range(cols + 1):
            if (i, j) in cells:
                continue
            for k in range(syms + 1):
                if (i, k) in row_sym or (j, k) in col_sym:
                    continue
                out.append(_normalize(entries + ((i, j, k),)))
    return out


def unbounded_class_counts(max_m: int, kind: str) -> list[int]:
    """Class counts of weight-m PLRs when r, s, n all exceed m, for
    m = 0..max_m; kind is "isotopism" or "main".

    Extends every representative of weight m-1 by one entry, allowing fresh
    rows/columns/symbols, and deduplicates by the canonical incidence-graph
    code.
    """
    if kind not in ("isotopism", "main"):
        raise ValueError(f"kind must be 'isotopism' or 'main', got {kind!r}")
    counts = [1]
    reps: list[tuple[Entry, ...]] = [()]
    for _ in range(max_m):
        seen_raw: set[tuple[Entry, ...]] = set()
        for rep in reps:
            seen_raw.update(_extensions(rep))
        level: dict[bytes, tuple[Entry, ...]] = {}
        for cand in seen_raw:
            code = _class_code(cand, kind)
            if code not in level:
                level[code] = cand
        reps = list(level.values())
        counts.append(len(reps))
    return counts
