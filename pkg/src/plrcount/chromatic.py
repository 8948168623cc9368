"""Exact counting through rook-graph blocks and chromatic polynomials.

A weight-m PLR is a proper n-coloring of an m-vertex induced subgraph of the
r x s rook's graph; such subgraphs decompose into connected blocks (0/1
matrices with no empty row or column).  Counting reduces to: tabulate the
blocks once with their stabilizer sizes and chromatic polynomials, then sum
the closed-form contribution of every multiset of blocks, with a transpose
flag sequence handling the rows<=columns storage convention.

The same assembly run symbolically (falling factorials in r and s, chromatic
polynomials in n) yields the exact weight-m counting polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .canon import ColoredGraph, automorphism_count, canonical_code
from .core import Shape, TriPoly, UniPoly

_BLOCK_CACHE_VERSION = 1


@dataclass(frozen=True)
class Block:
    """A connected block in canonical orientation (rows <= columns).

    row_masks[i] bit j is the (i,j) cell; aut_size is the order of the
    row/column stabilizer, i.e. of the color-preserving automorphism group of
    the associated row/column bipartite graph.
    """

    rows: int
    cols: int
    row_masks: tuple[int, ...]
    ones: int
    aut_size: int
    chromatic: UniPoly

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def cells(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i, mask in enumerate(self.row_masks)
            for j in range(self.cols)
            if (mask >> j) & 1
        ]

    def matrix_str(self) -> str:
        return "/".join(
            "".join("1" if (mask >> j) & 1 else "0" for j in range(self.cols))
            for mask in self.row_masks
        )


def _bipartite_graph(rows: int, cols: int, cells: frozenset[tuple[int, int]]) -> ColoredGraph:
    return ColoredGraph(
        rows + cols,
        [0] * rows + [1] * cols,
        [(i, rows + j) for (i, j) in cells],
    )


def _cells_code(rows: int, cols: int, cells: frozenset[tuple[int, int]]) -> bytes:
    return canonical_code(_bipartite_graph(rows, cols, cells))


def _transpose(cells: frozenset[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    return frozenset((j, i) for (i, j) in cells)


def _grow(
    max_ones: int, max_rows: int | None, max_cols: int | None
) -> list[tuple[int, int, frozenset[tuple[int, int]]]]:
    """Orderly generation of connected cell sets, one representative per
    row/column-permutation class, without orientation normalization."""
    cap_r = max_rows if max_rows is not None else max_ones
    cap_c = max_cols if max_cols is not None else max_ones
    level = {(1, 1, frozenset([(0, 0)])): None}
    out = [(1, 1, frozenset([(0, 0)]))]
    for _ in range(1, max_ones):
        next_level: dict[bytes, tuple[int, int, frozenset]] = {}
        for (r, c, cells) in level:
            candidates = []
            for i in range(r):
                for j in range(c):
                    if (i, j) not in cells:
                        candidates.append((i, j, r, c))
            if r < cap_r:
                for j in range(c):
                    candidates.append((r, j, r + 1, c))
            if c < cap_c:
                for i in range(r):
                    candidates.append((i, c, r, c + 1))
            for (i, j, nr, nc) in candidates:
                ncells = cells | {(i, j)}
                code = _cells_code(nr, nc, ncells)
                if code not in next_level:
                    next_level[code] = (nr, nc, ncells)
        level = {v: None for v in next_level.values()}
        out.extend(next_level.values())
    return out


@lru_cache(maxsize=32)
def _block_table(
    max_ones: int, max_rows: int | None, max_cols: int | None
) -> tuple[Block, ...]:
    blocks: dict[bytes, Block] = {}
    for (r, c, cells) in _grow(max_ones, max_rows, max_cols):
        if r > c:
            r, c, cells = c, r, _transpose(cells)
        # Square blocks that are not transpose-symmetric stay as two distinct
        # canonical classes; the assembly never transposes squares.
        code = _cells_code(r, c, cells)
        if code in blocks:
            continue
        masks = [0] * r
        for (i, j) in cells:
            masks[i] |= 1 << j
        blocks[code] = Block(
            rows=r,
            cols=c,
            row_masks=tuple(masks),
            ones=len(cells),
            aut_size=automorphism_count(_bipartite_graph(r, c, cells)),
            chromatic=rook_chromatic(tuple(masks), c),
        )
    return tuple(
        sorted(
            blocks.values(),
            key=lambda b: (b.ones, b.rows, b.cols, b.row_masks),
        )
    )


def generate_blocks(
    max_ones: int,
    max_rows: int | None = None,
    max_cols: int | None = None,
    cache_path: str | None = None,
) -> tuple[Block, ...]:
    """All blocks with 1..max_ones ones, canonical under row/column
    permutations and stored with rows <= columns.

    Optional max_rows/max_cols cap the dimensions during growth (used when
    assembling counts for a fixed grid).  With cache_path, the table is
    loaded from or saved to a line-oriented text file.
    """
    if max_ones < 1:
        raise ValueError("max_ones must be >= 1")
    if cache_path is not None:
        cached = load_block_table(cache_path, max_ones, max_rows, max_cols)
        if cached is not None:
            return cached
    table = _block_table(max_ones, max_rows, max_cols)
    if cache_path is not None:
        save_block_table(cache_path, table, max_ones, max_rows, max_cols)
    return table


def save_block_table(path, blocks, max_ones, max_rows=None, max_cols=None) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(
            f"plrcount-blocks v{_BLOCK_CACHE_VERSION} max_ones={max_ones} "
            f"max_rows={max_rows} max_cols={max_cols}\n"
        )
        for b in blocks:
            coeffs = ",".join(str(c) for c in b.chromatic.coeffs)
            fh.write(f"{b.rows}x{b.cols} {b.matrix_str()} {b.aut_size} {coeffs}\n")


def load_block_table(path, max_ones, max_rows=None, max_cols=None):
    try:
        fh = open(path, "r", encoding="ascii")
    except OSError:
        return None
    with fh:
        header = fh.readline().split()
        expected = [
            f"plrcount-blocks",
            f"v{_BLOCK_CACHE_VERSION}",
            f"max_ones={max_ones}",
            f"max_rows={max_rows}",
            f"max_cols={max_cols}",
        ]
        if header != expected:
            return None
        blocks = []
        for line in fh:
            dims, matrix, aut, coeffs = line.split()
            r, c = (int(x) for x in dims.split("x"))
            masks = tuple(
                sum(1 << j for j, ch in enumerate(row) if ch == "1")
                for row in matrix.split("/")
            )
            blocks.append(
                Block(
                    rows=r,
                    cols=c,
                    row_masks=masks,
                    ones=sum(m.bit_count() for m in masks),
                    aut_size=int(aut),
                    chromatic=UniPoly([int(x) for x in coeffs.split(",")]),
                )
            )
    return tuple(blocks)


# ---------------------------------------------------------------------------
# Chromatic polynomials by deletion-contraction
# ---------------------------------------------------------------------------

_chrom_memo: dict[bytes, UniPoly] = {}
_CHROM_MEMO_CAP = 200_000
_DENSE_VERTEX_THRESHOLD = 10

try:
    import numpy as _np
    from numba import njit as _njit

    @_njit(cache=True)
    def _partition_dp(v, indep, indep_start, indep_end, out):
        size = 1 << v
        f = _np.zeros((size, v + 1), dtype=_np.int64)
        f[0, 0] = 1
        for S in range(1, size):
            low = 0
            while not (S >> low) & 1:
                low += 1
            for idx in range(indep_start[low], indep_end[low]):
                T = indep[idx]
                if T & S == T:
                    rest = S & ~T
                    for k in range(1, v + 1):
                        val = f[rest, k - 1]
                        if val:
                            f[S, k] += val
        for k in range(v + 1):
            out[k] = f[size - 1, k]

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _independent_sets_by_low(v: int, adj: list[int]) -> list[list[int]]:
    """Nonempty independent vertex sets, grouped by their lowest vertex."""
    by_low: list[list[int]] = [[] for _ in range(v)]

    def grow(mask: int, low: int, allowed: int) -> None:
        by_low[low].append(mask)
        rest = allowed
        while rest:
            bit = rest & -rest
            rest ^= bit
            w = bit.bit_length() - 1
            grow(mask | bit, low, allowed & ~((bit << 1) - 1) & ~adj[w])

    for u in range(v):
        above = ~((1 << (u + 1)) - 1)
        grow(1 << u, u, above & ~adj[u] & ((1 << v) - 1))
    return by_low


def _chromatic_dense(v: int, edges: frozenset[tuple[int, int]]) -> UniPoly:
    """Chromatic polynomial in the falling-factorial basis: the number of
    partitions of the vertices into exactly k independent classes, summed
    against [n]_k.  Subset DP; exact, and fast when independent sets are
    few (rook blocks have classes of at most min(rows, cols) cells)."""
    adj = [0] * v
    for (a, b) in edges:
        adj[a] |= 1 << b
        adj[b] |= 1 << a
    by_low = _independent_sets_by_low(v, adj)
    if _HAVE_NUMBA:
        flat = []
        starts = []
        ends = []
        for low in range(v):
            starts.append(len(flat))
            flat.extend(by_low[low])
            ends.append(len(flat))
        out = _np.zeros(v + 1, dtype=_np.int64)
        _partition_dp(
            v,
            _np.array(flat, dtype=_np.int64),
            _np.array(starts, dtype=_np.int64),
            _np.array(ends, dtype=_np.int64),
            out,
        )
        pk = [int(x) for x in out]
    else:
        size = 1 << v
        f = [None] * size
        f[0] = [1] + [0] * v
        for S in range(1, size):
            row = [0] * (v + 1)
            low = (S & -S).bit_length() - 1
            for T in by_low[low]:
                if T & S == T:
                    sub = f[S & ~T]
                    for k in range(1, v + 1):
                        if sub[k - 1]:
                            row[k] += sub[k - 1]
            f[S] = row
        pk = f[size - 1]
    poly = UniPoly.zero()
    for k, count in enumerate(pk):
        if count:
            poly = poly + UniPoly.falling_factorial(k) * count
    return poly


def rook_chromatic(row_masks: tuple[int, ...], cols: int) -> UniPoly:
    """Chromatic polynomial of the rook-graph subgraph induced by the 1-cells
    (two cells adjacent iff they share a row or a column)."""
    cells = [
        (i, j)
        for i, mask in enumerate(row_masks)
        for j in range(cols)
        if (mask >> j) & 1
    ]
    if not cells:
        return UniPoly.constant(1)
    index = {cell: v for v, cell in enumerate(cells)}
    edges = frozenset(
        (index[a], index[b])
        for a, b in itertools.combinations(cells, 2)
        if a[0] == b[0] or a[1] == b[1]
    )
    return _chromatic_of_graph(len(cells), edges)


def _chromatic_of_graph(v: int, edges: frozenset[tuple[int, int]]) -> UniPoly:
    if not edges:
        return UniPoly([0] * v + [1])
    if len(edges) == v * (v - 1) // 2:
        return UniPoly.falling_factorial(v)
    code = canonical_code(ColoredGraph(v, [0] * v, edges))
    hit = _chrom_memo.get(code)
    if hit is not None:
        return hit
    if v >= _DENSE_VERTEX_THRESHOLD:
        result = _chromatic_dense(v, edges)
        _chrom_memo[code] = result
        return result

    # Split into connected components; the polynomial is multiplicative.
    parent = list(range(v))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (a, b) in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    comps: dict[int, list[int]] = {}
    for x in range(v):
        comps.setdefault(find(x), []).append(x)

    if len(comps) > 1:
        result = UniPoly.constant(1)
        for members in comps.values():
            remap = {u: i for i, u in enumerate(members)}
            sub = frozenset(
                (remap[a], remap[b]) for (a, b) in edges if a in remap and b in remap
            )
            result = result * _chromatic_of_graph(len(members), sub)
    else:
        a, b = next(iter(edges))
        deleted = frozenset(e for e in edges if e != (a, b))
        result = _chromatic_of_graph(v, deleted) - _contract(v, edges, a, b)

    if len(_chrom_memo) >= _CHROM_MEMO_CAP:
        _chrom_memo.clear()
    _chrom_memo[code] = result
    return result


def _contract(v: int, edges: frozenset[tuple[int, int]], a: int, b: int) -> UniPoly:
    """Chromatic polynomial of the simple graph after contracting edge ab."""
    remap = {}
    nxt = 0
    for x in range(v):
        if x == b:
            continue
        remap[x] = nxt
        nxt += 1
    remap[b] = remap[a]
    new_edges = set()
    for (x, y) in edges:
        nx, ny = remap[x], remap[y]
        if nx == ny:
            continue
        new_edges.add((nx, ny) if nx < ny else (ny, nx))
    return _chromatic_of_graph(v - 1, frozenset(new_edges))


# ---------------------------------------------------------------------------
# Assembly of counts and counting polynomials
# ---------------------------------------------------------------------------


def _iter_multisets(blocks: tuple[Block, ...], m: int, dim_budget: int | None = None):
    """Multisets of blocks whose ones sum to m, as [(block, count), ...].

    dim_budget prunes on total rows+cols (each block occupies rows+cols lines
    of the grid in either orientation, so multisets exceeding r+s lines can
    never be placed)."""
    usable = [b for b in blocks if b.ones <= m]

    def rec(idx: int, remaining: int, budget: int | None, acc: list):
        if remaining == 0:
            yield list(acc)
            return
        for i in range(idx, len(usable)):
            b = usable[i]
            if b.ones > remaining:
                continue
            dims = b.rows + b.cols
            top = remaining // b.ones
            for count in range(1, top + 1):
                if budget is not None and count * dims > budget:
                    break
                acc.append((b, count))
                yield from rec(
                    i + 1,
                    remaining - count * b.ones,
                    None if budget is None else budget - count * dims,
                    acc,
                )
                acc.pop()

    yield from rec(0, m, dim_budget, [])


def _transpose_choices(multiset):
    """Per-distinct-block transposed-copy counts allowed by good sequences:
    square blocks are never transposed; k copies of a non-square block admit
    0..k transposed copies."""
    ranges = [
        range(1) if blk.is_square else range(count + 1) for blk, count in multiset
    ]
    return itertools.product(*ranges)


def count_via_blocks(shape: Shape, m: int, blocks: tuple[Block, ...] | None = None) -> int:
    """#PLR(r,s,n;m) assembled from the block table.

    All intermediate arithmetic is exact rational; the result is asserted to
    be a non-negative integer.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return 1
    if m > shape.cells:
        return 0
    r, s, n = shape.dims
    if blocks is None:
        side = max(r, s)
        blocks = generate_blocks(shape.cells, max_rows=side, max_cols=side)
    total = Fraction(0)
    for multiset in _iter_multisets(blocks, m, dim_budget=r + s):
        aut_denom = 1
        chrom_val = 1
        for blk, count in multiset:
            aut_denom *= blk.aut_size**count
            chrom_val *= blk.chromatic.evaluate(n) ** count
        if chrom_val == 0:
            continue
        for transposed in _transpose_choices(multiset):
            e_row = e_col = 0
            # Copies of one stored block split into a transposed and count-a
            # untransposed placed matrices; identical placed matrices are
            # interchangeable, hence the a!(count-a)! divisor.
            copies_denom = 1
            for (blk, count), a in zip(multiset, transposed):
                e_row += a * blk.cols + (count - a) * blk.rows
                e_col += a * blk.rows + (count - a) * blk.cols
                copies_denom *= factorial(a) * factorial(count - a)
            if e_row > r or e_col > s:
                continue
            ff = (
                factorial(r)
                // factorial(r - e_row)
                * (factorial(s) // factorial(s - e_col))
            )
            total += Fraction(ff * chrom_val, aut_denom * copies_denom)
    assert total.denominator == 1 and total >= 0, "block assembly must be integral"
    return int(total)


def count_distribution(shape: Shape, blocks: tuple[Block, ...] | None = None):
    """Full weight distribution via the block assembly."""
    from .core import WeightDistribution

    if blocks is None:
        side = max(shape.r, shape.s)
        blocks = generate_blocks(shape.cells, max_rows=side, max_cols=side)
    return WeightDistribution(
        shape, [count_via_blocks(shape, m, blocks) for m in range(shape.cells + 1)]
    )


@lru_cache(maxsize=32)
def f_m_polynomial(m: int) -> TriPoly:
    """The exact degree-3m symmetric counting polynomial for weight m,
    normalized as m! times the count (so the leading term is (rsn)^m)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return TriPoly.constant(1)
    blocks = generate_blocks(m)
    total = TriPoly.zero()
    for multiset in _iter_multisets(blocks, m):
        aut_denom = 1
        chrom = UniPoly.constant(1)
        for blk, count in multiset:
            aut_denom *= blk.aut_size**count
            for _ in range(count):
                chrom = chrom * blk.chromatic
        chrom_tp = chrom.to_tripoly(2)
        for transposed in _transpose_choices(multiset):
            e_row = e_col = 0
            copies_denom = 1
            for (blk, count), a in zip(multiset, transposed):
                e_row += a * blk.cols + (count - a) * blk.rows
                e_col += a * blk.rows + (count - a) * blk.cols
                copies_denom *= factorial(a) * factorial(count - a)
            term = (
                UniPoly.falling_factorial(e_row).to_tripoly(0)
                * UniPoly.falling_factorial(e_col).to_tripoly(1)
                * chrom_tp
                * Fraction(1, aut_denom * copies_denom)
            )
            total = total + term
    return (total * factorial(m)).to_int_coeffs()
