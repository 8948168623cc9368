"""Row-by-row dynamic programming over column/symbol structure classes.

Prefixes whose column symbol sets agree up to column and symbol permutations
extend to full rectangles in exactly the same number of ways per weight, so
each level of the DP keeps one representative per equivalence class together
with a multiplier.  Classes are fingerprinted by an integer built from the
canonically labeled column/symbol bipartite graph; the fingerprints fit in 64
bits whenever s*n <= 64.

The fingerprint of a class doubles as a serialized representative: its bits
are the biadjacency matrix of the canonical graph, i.e. a set of column
masks, which is all that extension generation needs.
"""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from functools import lru_cache

from .canon import ColoredGraph, canonical_form
from .core import PartialLatinRectangle, Shape, WeightDistribution

logger = logging.getLogger(__name__)

_MAGIC = b"SADE"
_VERSION = 1


class SadeSizeError(ValueError):
    """Shape exceeds the 64-bit fingerprint limit (s+n > 16 or s*n > 64)."""


@dataclass(frozen=True)
class SadeRecord:
    """One equivalence class in a level database."""

    sade_number: int
    weight: int
    multiplier: int
    col_masks: tuple[int, ...]


def _check_limits(s: int, n: int) -> None:
    if s + n > 16 or s * n > 64:
        raise SadeSizeError(
            f"column/symbol structure of {s}x{n} does not fit the 64-bit code"
        )


def sade_number_of_masks(col_masks: tuple[int, ...], s: int, n: int) -> int:
    """Fingerprint of a column-mask structure (mask bit k = symbol k present).

    Equal numbers identify structures equivalent under column and symbol
    permutations; the bits are the canonical biadjacency matrix read
    row-major, first bit most significant.
    """
    _check_limits(s, n)
    edges = [
        (i, s + k)
        for i in range(s)
        for k in range(n)
        if (col_masks[i] >> k) & 1
    ]
    g = ColoredGraph(s + n, [0] * s + [1] * n, edges)
    order = canonical_form(g).relabeling.inverse()
    num = 0
    for p in range(s):
        mask = col_masks[order(p)]
        for q in range(n):
            if (mask >> (order(s + q) - s)) & 1:
                num |= 1 << ((s - 1 - p) * n + (n - 1 - q))
    return num


def masks_from_sade_number(num: int, s: int, n: int) -> tuple[int, ...]:
    """Decode a fingerprint back into a representative column-mask tuple."""
    masks = [0] * s
    for p in range(s):
        for q in range(n):
            if (num >> ((s - 1 - p) * n + (n - 1 - q))) & 1:
                masks[p] |= 1 << q
    return tuple(masks)


def sade_number(plr: PartialLatinRectangle) -> int:
    """Fingerprint of a PLR prefix's column/symbol structure."""
    s, n = plr.shape.s, plr.shape.n
    masks = [0] * s
    for (_, j, k) in plr.entry_set():
        masks[j] |= 1 << k
    return sade_number_of_masks(tuple(masks), s, n)


def orient_shape(shape: Shape) -> Shape:
    """Parastrophic rearrangement actually run by the engine: sorts the last
    two dimensions so that s <= n.  Counts are invariant under the swap."""
    if shape.s <= shape.n:
        return shape
    return Shape(shape.r, shape.n, shape.s)


def _row_extensions(col_masks: tuple[int, ...], s: int, n: int):
    """All (new_col_masks, added_weight) for one additional row, including
    partially empty rows."""
    full = (1 << n) - 1
    out: list[tuple[tuple[int, ...], int]] = []
    acc = list(col_masks)

    def rec(j: int, row_used: int, placed: int) -> None:
        if j == s:
            out.append((tuple(acc), placed))
            return
        rec(j + 1, row_used, placed)
        avail = full & ~(row_used | col_masks[j])
        while avail:
            low = avail & -avail
            avail ^= low
            acc[j] |= low
            rec(j + 1, row_used | low, placed + 1)
            acc[j] ^= low

    rec(0, 0, 0)
    return out


def _pack_sorted(masks, n: int) -> int:
    """Sorted column masks folded into one integer key; its set bits are the
    filled (column, symbol) incidences, so the key also encodes the weight."""
    key = 0
    for mask in sorted(masks):
        key = (key << n) | mask
    return key


def _unpack(key: int, s: int, n: int) -> tuple[int, ...]:
    full = (1 << n) - 1
    return tuple((key >> (n * i)) & full for i in range(s - 1, -1, -1))


def _extend_chunk(args):
    """Extend a chunk of records; returns {packed sorted masks: mult_sum}."""
    records, s, n = args
    acc: dict[int, int] = {}
    full = (1 << n) - 1
    for (col_masks, _weight, mult) in records:
        masks = list(col_masks)

        def rec(j: int, row_used: int) -> None:
            if j == s:
                key = _pack_sorted(masks, n)
                acc[key] = acc.get(key, 0) + mult
                return
            rec(j + 1, row_used)
            avail = full & ~(row_used | col_masks[j])
            while avail:
                low = avail & -avail
                avail ^= low
                masks[j] |= low
                rec(j + 1, row_used | low)
                masks[j] ^= low

        rec(0, 0)
    return acc


def _build_next_level(
    records: list[SadeRecord], s: int, n: int, threads: int = 1
) -> list[SadeRecord]:
    plain = [(rec.col_masks, rec.weight, rec.multiplier) for rec in records]
    if threads > 1 and len(plain) > 1:
        import multiprocessing as mp

        chunks = [
            (plain[i::threads], s, n) for i in range(threads) if plain[i::threads]
        ]
        with mp.get_context("fork").Pool(len(chunks)) as pool:
            partials = pool.map(_extend_chunk, chunks)
        merged: dict[int, int] = partials[0]
        for part in partials[1:]:
            for key, mult in part.items():
                merged[key] = merged.get(key, 0) + mult
    else:
        merged = _extend_chunk((plain, s, n))

    by_number: dict[int, list] = {}
    for key, mult in merged.items():
        masks = _unpack(key, s, n)
        weight = key.bit_count()
        num = sade_number_of_masks(masks, s, n)
        slot = by_number.get(num)
        if slot is None:
            by_number[num] = [weight, mult, masks]
        else:
            # Sade-equivalent prefixes must share a weight.
            assert slot[0] == weight
            slot[1] += mult
    return [
        SadeRecord(num, weight, mult, masks)
        for num, (weight, mult, masks) in sorted(by_number.items())
    ]


def _tail_counts(
    col_masks: tuple[int, ...], rows_left: int, s: int, n: int, memo: dict
) -> tuple[int, ...]:
    """Number of ways to append rows_left more rows, by added weight."""
    if rows_left == 0:
        return (1,)
    key = (tuple(sorted(col_masks)), rows_left)
    hit = memo.get(key)
    if hit is not None:
        return hit
    acc = [0] * (rows_left * s + 1)
    for new_masks, dw in _row_extensions(col_masks, s, n):
        sub = _tail_counts(new_masks, rows_left - 1, s, n, memo)
        for d2, ways in enumerate(sub):
            if ways:
                acc[dw + d2] += ways
    result = tuple(acc)
    memo[key] = result
    return result


def sade_count(
    shape: Shape,
    plain_tail_rows: int = 0,
    checkpoint_dir: str | None = None,
    threads: int = 1,
) -> WeightDistribution:
    """Exact weight distribution of PLR(r,s,n), equal to oracle.count_all.

    plain_tail_rows > 0 counts the last rows by direct backtracking instead
    of class merging; it never changes results.  With checkpoint_dir set,
    each finished level is written to disk and an interrupted run resumes
    from the last complete level.
    """
    oriented = orient_shape(shape)
    r, s, n = oriented.dims
    _check_limits(s, n)
    tail = max(0, min(plain_tail_rows, r))
    levels = r - tail

    start_level = 0
    records = [SadeRecord(0, 0, 1, (0,) * s)]
    if checkpoint_dir:
        resumed = _load_latest_checkpoint(checkpoint_dir, oriented, levels)
        if resumed is not None:
            start_level, records = resumed

    for level in range(start_level + 1, levels + 1):
        records = _build_next_level(records, s, n, threads=threads)
        logger.debug(
            "sade %s level %d/%d: %d classes", oriented, level, levels, len(records)
        )
        if checkpoint_dir:
            write_checkpoint(
                os.path.join(
                    checkpoint_dir, f"sade_{r}x{s}x{n}_level{level}.chk"
                ),
                oriented,
                level,
                records,
            )

    counts = [0] * (shape.cells + 1)
    if tail == 0:
        for rec in records:
            counts[rec.weight] += rec.multiplier
    else:
        memo: dict = {}
        for rec in records:
            for dw, ways in enumerate(_tail_counts(rec.col_masks, tail, s, n, memo)):
                if ways:
                    counts[rec.weight + dw] += rec.multiplier * ways
    return WeightDistribution(shape, counts)


# ---------------------------------------------------------------------------
# Checkpoint files
# ---------------------------------------------------------------------------


def write_checkpoint(
    path: str, shape: Shape, level: int, records: list[SadeRecord]
) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">HHHHH", _VERSION, shape.r, shape.s, shape.n, level))
        for rec in records:
            fh.write(struct.pack(">QH", rec.sade_number, rec.weight))
            mag = rec.multiplier.to_bytes(
                max(1, (rec.multiplier.bit_length() + 7) // 8), "big"
            )
            fh.write(struct.pack(">H", len(mag)))
            fh.write(mag)


def read_checkpoint(path: str) -> tuple[Shape, int, list[SadeRecord]]:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not a Sade checkpoint")
        version, r, s, n, level = struct.unpack(">HHHHH", fh.read(10))
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        records = []
        while True:
            head = fh.read(10)
            if not head:
                break
            num, weight = struct.unpack(">QH", head)
            (mlen,) = struct.unpack(">H", fh.read(2))
            mult = int.from_bytes(fh.read(mlen), "big")
            records.append(
                SadeRecord(num, weight, mult, masks_from_sade_number(num, s, n))
            )
    return Shape(r, s, n), level, records


def _load_latest_checkpoint(
    directory: str, shape: Shape, max_level: int
) -> tuple[int, list[SadeRecord]] | None:
    r, s, n = shape.dims
    best = None
    for level in range(max_level, 0, -1):
        path = os.path.join(directory, f"sade_{r}x{s}x{n}_level{level}.chk")
        if os.path.exists(path):
            chk_shape, chk_level, records = read_checkpoint(path)
            if chk_shape == shape and chk_level == level:
                best = (level, records)
                break
    return best


@lru_cache(maxsize=64)
def _cached_counts(dims: tuple[int, int, int]) -> tuple[int, ...]:
    return tuple(sade_count(Shape(*dims)).counts)


def cached_sade_count(shape: Shape) -> WeightDistribution:
    """Memoized sade_count for repeated verification queries."""
    return WeightDistribution(shape, _cached_counts(shape.dims))
