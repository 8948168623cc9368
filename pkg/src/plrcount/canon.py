"""Canonical labeling and automorphism counting for small vertex-colored
graphs.

The labeler runs ordered-partition refinement (degree counts against every
cell, iterated to an equitable partition) followed by backtracking over the
first non-singleton cell, keeping the lexicographically least relabeled
adjacency code.  Automorphisms discovered as code-equal leaves prune sibling
branches.  Only isomorphism-invariance of the code is contractual; the
particular order chosen inside a color class is an implementation detail.

Intended scale is at most 64 vertices, which covers every caller in this
package (column/symbol graphs, block row/column graphs, PLR incidence
graphs).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Permutation

MAX_VERTICES = 64


class GraphSizeError(ValueError):
    """Graph exceeds the supported vertex cap."""


class ColoredGraph:
    """Undirected simple graph with an integer color per vertex."""

    __slots__ = ("vertex_count", "colors", "edges")

    def __init__(
        self,
        vertex_count: int,
        colors: Sequence[int],
        edges: Iterable[tuple[int, int]],
    ):
        if len(colors) != vertex_count:
            raise ValueError("one color per vertex required")
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValueError(f"edge ({u},{v}) out of range")
            norm.add((u, v) if u < v else (v, u))
        self.vertex_count = vertex_count
        self.colors = tuple(colors)
        self.edges = frozenset(norm)

    def adjacency_masks(self) -> list[int]:
        adj = [0] * self.vertex_count
        for u, v in self.edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return adj

    def relabel(self, perm: Permutation) -> "ColoredGraph":
        """Image graph where vertex v becomes perm(v)."""
        colors = [0] * self.vertex_count
        for v, c in enumerate(self.colors):
            colors[perm(v)] = c
        return ColoredGraph(
            self.vertex_count, colors, [(perm(u), perm(v)) for u, v in self.edges]
        )

    def __repr__(self) -> str:
        return (
            f"ColoredGraph({self.vertex_count}, colors={self.colors}, "
            f"edges={sorted(self.edges)})"
        )


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical relabeling (vertex -> position) and the invariant code."""

    relabeling: Permutation
    code: bytes


def _refine(adj: list[int], cells: list[list[int]]) -> list[list[int]]:
    """Iterate degree-within-cell splitting until the partition is equitable.

    Cell order is preserved; a split cell is replaced, in place, by its
    fragments sorted by signature.  The procedure commutes with color
    preserving relabelings, which is what makes the final code invariant.
    """
    while True:
        masks = [0] * len(cells)
        for idx, cell in enumerate(cells):
            m = 0
            for v in cell:
                m |= 1 << v
            masks[idx] = m
        new_cells: list[list[int]] = []
        changed = False
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            sigs: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                a = adj[v]
                sig = tuple((a & m).bit_count() for m in masks)
                sigs.setdefault(sig, []).append(v)
            if len(sigs) == 1:
                new_cells.append(cell)
            else:
                changed = True
                for sig in sorted(sigs):
                    new_cells.append(sigs[sig])
        if not changed:
            return new_cells
        cells = new_cells


def _initial_cells(g: ColoredGraph) -> list[list[int]]:
    by_color: dict[int, list[int]] = {}
    for v, c in enumerate(g.colors):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


class _DSU:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


class _CanonSearch:
    def __init__(self, g: ColoredGraph):
        self.n = g.vertex_count
        self.adj = g.adjacency_masks()
        self.best_bits: tuple[int, ...] | None = None
        self.best_order: list[int] | None = None
        self.aut_gens: list[tuple[int, ...]] = []
        self._gen_seen: set[tuple[int, ...]] = set()

    def run(self, cells: list[list[int]]) -> list[int]:
        self._rec(cells, ())
        assert self.best_order is not None
        return self.best_order

    def _leaf_bits(self, order: list[int]) -> tuple[int, ...]:
        pos = [0] * self.n
        for p, v in enumerate(order):
            pos[v] = p
        bits = []
        for v in order:
            row = 0
            a = self.adj[v]
            while a:
                low = a & -a
                row |= 1 << pos[low.bit_length() - 1]
                a ^= low
            bits.append(row)
        return tuple(bits)

    def _rec(self, cells: list[list[int]], base: tuple[int, ...]) -> None:
        cells = _refine(self.adj, cells)
        tgt = next((i for i, c in enumerate(cells) if len(c) > 1), None)
        if tgt is None:
            order = [c[0] for c in cells]
            bits = self._leaf_bits(order)
            if self.best_bits is None or bits < self.best_bits:
                self.best_bits = bits
                self.best_order = order
            elif bits == self.best_bits:
                assert self.best_order is not None
                phi = [0] * self.n
                for p in range(self.n):
                    phi[self.best_order[p]] = order[p]
                key = tuple(phi)
                if key not in self._gen_seen:
                    self._gen_seen.add(key)
                    self.aut_gens.append(key)
            return
        target = cells[tgt]
        explored: list[int] = []
        for v in target:
            if explored and self._orbit_pruned(v, explored, base):
                explored.append(v)
                continue
            explored.append(v)
            child = (
                cells[:tgt]
                + [[v], [u for u in target if u != v]]
                + cells[tgt + 1 :]
            )
            self._rec(child, base + (v,))

    def _orbit_pruned(
        self, v: int, explored: list[int], base: tuple[int, ...]
    ) -> bool:
        # Skip v when a known automorphism fixing the individualized prefix
        # maps an already-explored sibling onto it.
        usable = [
            g for g in self.aut_gens if all(g[b] == b for b in base)
        ]
        if not usable:
            return False
        dsu = _DSU(self.n)
        for g in usable:
            for x in range(self.n):
                dsu.union(x, g[x])
        root = dsu.find(v)
        return any(dsu.find(u) == root for u in explored)


def _check_size(g: ColoredGraph) -> None:
    if g.vertex_count > MAX_VERTICES:
        raise GraphSizeError(
            f"{g.vertex_count} vertices exceeds the {MAX_VERTICES}-vertex cap"
        )


def canonical_order(g: ColoredGraph) -> list[int]:
    """Canonical vertex order (position -> original vertex).

    Color classes stay contiguous and appear in ascending color order.
    """
    _check_size(g)
    if g.vertex_count == 0:
        return []
    return _CanonSearch(g).run(_initial_cells(g))


def canonical_form(g: ColoredGraph) -> CanonicalForm:
    """Deterministic, isomorphism-invariant canonical form.

    canonical_form(g).code == canonical_form(g.relabel(sigma)).code for every
    color-preserving relabeling sigma, and distinct codes imply the graphs are
    not color-isomorphic.
    """
    order = canonical_order(g)
    pos = [0] * g.vertex_count
    for p, v in enumerate(order):
        pos[v] = p
    relabeling = Permutation(pos)
    colors = tuple(g.colors[v] for v in order)
    rows = []
    adj = g.adjacency_masks()
    for v in order:
        row = 0
        a = adj[v]
        while a:
            low = a & -a
            row |= 1 << pos[low.bit_length() - 1]
            a ^= low
        rows.append(row)
    payload = "{}|{}|{}".format(
        g.vertex_count, ",".join(map(str, colors)), ",".join(map(str, rows))
    )
    return CanonicalForm(relabeling=relabeling, code=payload.encode("ascii"))


def canonical_code(g: ColoredGraph) -> bytes:
    return canonical_form(g).code


def automorphism_count(g: ColoredGraph) -> int:
    """Order of the color-preserving automorphism group.

    Backtracks over vertices in refined-cell order; candidate images are
    restricted to the vertex's own equitable cell, which automorphisms must
    preserve.
    """
    _check_size(g)
    n = g.vertex_count
    if n == 0:
        return 1
    adj = g.adjacency_masks()
    cells = _refine(adj, _initial_cells(g))
    cell_of = [0] * n
    for idx, cell in enumerate(cells):
        for v in cell:
            cell_of[v] = idx
    order = [v for cell in cells for v in cell]
    image = [-1] * n
    used = [False] * n
    count = 0

    def rec(depth: int) -> None:
        nonlocal count
        if depth == n:
            count += 1
            return
        v = order[depth]
        av = adj[v]
        for w in cells[cell_of[v]]:
            if used[w]:
                continue
            aw = adj[w]
            ok = True
            for d in range(depth):
                u = order[d]
                if ((av >> u) & 1) != ((aw >> image[u]) & 1):
                    ok = False
                    break
            if ok:
                image[v] = w
                used[w] = True
                rec(depth + 1)
                used[w] = False
        image[v] = -1

    rec(0)
    return count


def connected_components(g: ColoredGraph) -> int:
    """Number of connected components; isolated vertices count."""
    n = g.vertex_count
    if n == 0:
        return 0
    dsu = _DSU(n)
    for u, v in g.edges:
        dsu.union(u, v)
    return len({dsu.find(v) for v in range(n)})
