"""Leading terms of the counting polynomials by inclusion-exclusion over
clash graphs.

Each weight-m count, times m!, equals a signed sum over isolated-vertex-free
graphs G of binom(m, v) (rsn)^(m-v+1) (v!/|Aut G|) P(G), where P(G) sums
(-2)^(#black) r^(c1-1) s^(c2-1) n^(c3-1) over all {red, blue, green, black}
edge colorings (ci counts components after deleting one primary color).

Graphs with v - c(G) >= B contribute only at degree <= 3m - 2B, so keeping
v - c(G) <= B - 1 is exact in every monomial of degree >= 3m - 2B + 1
(>= 3m - 9 at the default horizon B = 5).  Disconnected contributors factor
through the product rule P(G1 u G2) = rsn P(G1) P(G2), so only connected
graphs up to B vertices are ever enumerated directly.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .canon import ColoredGraph, automorphism_count, canonical_code, connected_components
from .core import TriPoly

MAX_PG_EDGES = 10


class GraphSizeCapError(ValueError):
    pass


@lru_cache(maxsize=16)
def graphs_no_isolated(max_vertices: int) -> tuple[tuple[ColoredGraph, int], ...]:
    """One representative per isomorphism class of graphs without isolated
    vertices, with |Aut(G)|, for vertex counts 0 and 2..max_vertices.

    Enumerates all labeled graphs per vertex count and buckets by canonical
    form; 2^21 labeled graphs at v=7 is the practical ceiling.
    """
    if max_vertices > 7:
        raise GraphSizeCapError("graphs_no_isolated caps at 7 vertices")
    out: list[tuple[ColoredGraph, int]] = [(ColoredGraph(0, [], []), 1)]
    for v in range(2, max_vertices + 1):
        pairs = [(a, b) for a in range(v) for b in range(a + 1, v)]
        seen: dict[bytes, ColoredGraph] = {}
        for bits in range(1 << len(pairs)):
            touched = 0
            edges = []
            rest = bits
            while rest:
                low = rest & -rest
                rest ^= low
                a, b = pairs[low.bit_length() - 1]
                edges.append((a, b))
                touched |= (1 << a) | (1 << b)
            if touched != (1 << v) - 1:
                continue
            g = ColoredGraph(v, [0] * v, edges)
            code = canonical_code(g)
            if code not in seen:
                seen[code] = g
        for code in sorted(seen):
            g = seen[code]
            out.append((g, automorphism_count(g)))
    return tuple(out)


def p_of_g(graph: ColoredGraph) -> TriPoly:
    """The edge-coloring sum P(G; r, s, n), via direct enumeration of the
    4^e colorings with precomputed component counts per edge subset."""
    e = len(graph.edges)
    if e > MAX_PG_EDGES:
        raise GraphSizeCapError(f"p_of_g caps at {MAX_PG_EDGES} edges, got {e}")
    v = graph.vertex_count
    edge_list = sorted(graph.edges)
    full = (1 << e) - 1

    comp = [0] * (1 << e)
    for subset in range(1 << e):
        parent = list(range(v))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        rest = subset
        while rest:
            low = rest & -rest
            rest ^= low
            a, b = edge_list[low.bit_length() - 1]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        comp[subset] = len({find(x) for x in range(v)})

    acc: dict[tuple[int, int, int], int] = {}
    red = full
    while True:
        rest1 = full ^ red
        c1 = comp[full ^ red]
        blue = rest1
        while True:
            rest2 = rest1 ^ blue
            c2 = comp[full ^ blue]
            green = rest2
            while True:
                c3 = comp[full ^ green]
                black = e - red.bit_count() - blue.bit_count() - green.bit_count()
                key = (c1 - 1, c2 - 1, c3 - 1)
                acc[key] = acc.get(key, 0) + ((-2) ** black)
                if green == 0:
                    break
                green = (green - 1) & rest2
            if blue == 0:
                break
            blue = (blue - 1) & rest1
        if red == 0:
            break
        red = (red - 1) & full
    return TriPoly(acc)


@lru_cache(maxsize=16)
def _connected_pieces(max_vertices: int):
    """(v, e, aut, graph) for connected isolated-vertex-free graphs with
    2..max_vertices vertices.  P(G) is computed lazily: horizons above 5
    admit pieces denser than the direct-enumeration edge cap, which only
    matter when binom(m, v) is non-zero."""
    pieces = []
    for g, aut in graphs_no_isolated(max_vertices):
        if g.vertex_count >= 2 and connected_components(g) == 1:
            pieces.append((g.vertex_count, len(g.edges), aut, g))
    return tuple(pieces)


_piece_poly_memo: dict[tuple[int, int], TriPoly] = {}


def _piece_poly(max_vertices: int, idx: int) -> TriPoly:
    key = (max_vertices, idx)
    hit = _piece_poly_memo.get(key)
    if hit is None:
        hit = p_of_g(_connected_pieces(max_vertices)[idx][3])
        _piece_poly_memo[key] = hit
    return hit


def _piece_multisets(pieces, excess_budget: int):
    """Multisets of connected pieces with sum(v_i - 1) <= excess_budget."""

    def rec(idx: int, budget: int, acc: list):
        yield list(acc)
        for i in range(idx, len(pieces)):
            cost = pieces[i][0] - 1
            if cost <= budget:
                acc.append(i)
                yield from rec(i, budget - cost, acc)
                acc.pop()

    yield from rec(0, excess_budget, [])


def f_m_truncated(m: int, max_vertices: int) -> TriPoly:
    """(rsn)^m plus the contributions of every isolated-vertex-free graph
    with v - c(G) <= max_vertices - 1 (components up to max_vertices
    vertices, disconnected graphs composed via the product rule).

    Omitted graphs have degree at most 3m - 2*max_vertices, so the result is
    exact in every monomial of degree >= 3m - 2*max_vertices + 1 (>= 3m - 9
    for the default horizon of 5), and exact in full for m <= max_vertices,
    where the omitted graphs would need more than m vertices.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    pieces = _connected_pieces(max_vertices)
    rsn = TriPoly.rsn()
    total = rsn**m
    for multiset in _piece_multisets(pieces, max_vertices - 1):
        if not multiset:
            continue
        v = sum(pieces[i][0] for i in multiset)
        if v > m:
            continue
        e = sum(pieces[i][1] for i in multiset)
        c = len(multiset)
        aut = 1
        mult: dict[int, int] = {}
        prod = TriPoly.constant(1)
        for i in multiset:
            mult[i] = mult.get(i, 0) + 1
            aut *= pieces[i][2]
            prod = prod * _piece_poly(max_vertices, i)
        for k in mult.values():
            aut *= factorial(k)
        orbit = Fraction(factorial(v), aut)
        assert orbit.denominator == 1, "v!/|Aut| must be an integer"
        coeff = comb(m, v) * int(orbit) * ((-1) ** e)
        total = total + (rsn ** (m - v + 1)) * (rsn ** (c - 1)) * prod * coeff
    return total
