import itertools
from math import factorial

import pytest

from plrcount import chromatic, oracle
from plrcount.canon import ColoredGraph, automorphism_count
from plrcount.core import Shape, TriPoly, UniPoly
from conftest import load_blocks_fixture


def matrix_code(matrix_str: str) -> bytes:
    rows = matrix_str.split("/")
    cells = frozenset(
        (i, j) for i, row in enumerate(rows) for j, ch in enumerate(row) if ch == "1"
    )
    return chromatic._cells_code(len(rows), len(rows[0]), cells)


class TestGenerateBlocks:
    def test_published_table_reproduced_exactly(self):
        blocks = chromatic.generate_blocks(5)
        fixture = load_blocks_fixture()
        assert len(blocks) == len(fixture) == 16
        by_code = {
            matrix_code(b.matrix_str()): (b.aut_size, b.chromatic.coeffs)
            for b in blocks
        }
        assert len(by_code) == 16
        for matrix, aut, coeffs in fixture:
            code = matrix_code(matrix)
            assert code in by_code, matrix
            got_aut, got_coeffs = by_code[code]
            assert got_aut == aut, matrix
            assert got_coeffs == coeffs, matrix

    def test_single_cell_block(self):
        blocks = chromatic.generate_blocks(1)
        assert len(blocks) == 1
        assert blocks[0].chromatic == UniPoly([0, 1])
        assert blocks[0].aut_size == 1

    def test_no_more_rows_than_columns(self):
        for b in chromatic.generate_blocks(6):
            assert b.rows <= b.cols
            assert all(mask for mask in b.row_masks)
            for j in range(b.cols):
                assert any((mask >> j) & 1 for mask in b.row_masks)

    def test_dimension_caps(self):
        for b in chromatic.generate_blocks(8, max_rows=2, max_cols=2):
            assert b.rows <= 2 and b.cols <= 2

    def test_cache_file_round_trip(self, tmp_path):
        path = str(tmp_path / "blocks.txt")
        first = chromatic.generate_blocks(4, cache_path=path)
        again = chromatic.generate_blocks(4, cache_path=path)
        assert first == again
        # a different cap ignores the stale cache
        other = chromatic.generate_blocks(3, cache_path=path)
        assert max(b.ones for b in other) == 3


class TestRookChromatic:
    def test_single_cell(self):
        assert chromatic.rook_chromatic((1,), 1) == UniPoly([0, 1])

    def test_published_2x3_block(self):
        # 111/100 -> n(n-1)^2(n-2)
        got = chromatic.rook_chromatic((0b111, 0b001), 3)
        want = (
            UniPoly([0, 1])
            * UniPoly([-1, 1])
            * UniPoly([-1, 1])
            * UniPoly([-2, 1])
        )
        assert got == want

    def test_one_coloring_iff_no_shared_lines(self):
        for masks, cols in [((0b11,), 2), ((0b01, 0b10), 2), ((0b1, 0b1), 1)]:
            poly = chromatic.rook_chromatic(masks, cols)
            cells = [
                (i, j)
                for i, m in enumerate(masks)
                for j in range(cols)
                if (m >> j) & 1
            ]
            clash = any(
                a[0] == b[0] or a[1] == b[1]
                for a, b in itertools.combinations(cells, 2)
            )
            assert poly.evaluate(1) == (0 if clash else 1)

    def test_block_diagonal_product(self):
        a = chromatic.rook_chromatic((0b11,), 2)
        b = chromatic.rook_chromatic((0b1, 0b1), 1)
        combined = chromatic.rook_chromatic((0b011, 0b100, 0b100), 3)
        assert combined == a * b

    def test_dense_path_matches_deletion_contraction(self):
        # full 3x3 board via both code paths
        dense = chromatic._chromatic_dense
        cells = [(i, j) for i in range(3) for j in range(3)]
        index = {c: v for v, c in enumerate(cells)}
        edges = frozenset(
            (index[a], index[b])
            for a, b in itertools.combinations(cells, 2)
            if a[0] == b[0] or a[1] == b[1]
        )
        assert dense(9, edges) == chromatic.rook_chromatic((0b111,) * 3, 3)
        assert dense(9, edges).evaluate(3) == 12


class TestCountViaBlocks:
    def test_weight_zero(self):
        assert chromatic.count_via_blocks(Shape(3, 3, 3), 0) == 1

    def test_published_values(self):
        assert chromatic.count_via_blocks(Shape(2, 2, 7), 2) == 266
        assert chromatic.count_via_blocks(Shape(3, 3, 7), 7) == 5560380

    @pytest.mark.parametrize("dims", [(2, 2, 2), (3, 3, 3), (2, 3, 4), (4, 3, 2)])
    def test_matches_oracle(self, dims):
        shape = Shape(*dims)
        assert chromatic.count_distribution(shape) == oracle.count_all(shape)


class TestStabilizerFormula:
    def test_orbit_sizes_all_3x3_matrices(self):
        # r!s!/Gamma must equal the brute-force orbit size under row/column
        # permutations, with Gamma from the block decomposition.
        r = s = 3
        perms = list(itertools.permutations(range(3)))

        def blocks_of(cells):
            cells = sorted(cells)
            parent = list(range(len(cells)))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for a, b in itertools.combinations(range(len(cells)), 2):
                if cells[a][0] == cells[b][0] or cells[a][1] == cells[b][1]:
                    parent[find(a)] = find(b)
            groups = {}
            for idx, cell in enumerate(cells):
                groups.setdefault(find(idx), []).append(cell)
            return list(groups.values())

        for bits in range(1 << 9):
            cells = frozenset(
                (i, j) for i in range(3) for j in range(3) if (bits >> (3 * i + j)) & 1
            )
            orbit = {
                frozenset((rp[i], cp[j]) for (i, j) in cells)
                for rp in perms
                for cp in perms
            }
            e_row = len({i for (i, _) in cells})
            e_col = len({j for (_, j) in cells})
            gamma = factorial(r - e_row) * factorial(s - e_col)
            canonical_counts: dict[bytes, int] = {}
            for comp in blocks_of(cells):
                rows = sorted({i for (i, _) in comp})
                colsu = sorted({j for (_, j) in comp})
                rmap = {v: i for i, v in enumerate(rows)}
                cmap = {v: i for i, v in enumerate(colsu)}
                norm = frozenset((rmap[i], cmap[j]) for (i, j) in comp)
                code = chromatic._cells_code(len(rows), len(colsu), norm)
                canonical_counts[code] = canonical_counts.get(code, 0) + 1
                gamma *= automorphism_count(
                    chromatic._bipartite_graph(len(rows), len(colsu), norm)
                )
            for k in canonical_counts.values():
                gamma *= factorial(k)
            assert factorial(r) * factorial(s) // gamma == len(orbit), cells


class TestBlockStabilizerEqualsGraphAut:
    def test_blocks_up_to_four_ones(self):
        for b in chromatic.generate_blocks(4):
            stab = 0
            for rp in itertools.permutations(range(b.rows)):
                for cp in itertools.permutations(range(b.cols)):
                    moved = [0] * b.rows
                    for i, mask in enumerate(b.row_masks):
                        row = 0
                        for j in range(b.cols):
                            if (mask >> j) & 1:
                                row |= 1 << cp[j]
                        moved[rp[i]] = row
                    if tuple(moved) == b.row_masks:
                        stab += 1
            assert stab == b.aut_size, b.matrix_str()


class TestFmPolynomial:
    def test_m1_is_rsn(self):
        assert chromatic.f_m_polynomial(1) == TriPoly.rsn()

    def test_m2_closed_form(self):
        want = TriPoly.rsn() ** 2 + TriPoly.rsn() * (
            TriPoly.constant(2) - TriPoly.bar(1, 0, 0)
        )
        assert chromatic.f_m_polynomial(2) == want

    def test_f2_matches_oracle_at_2x2x2(self):
        assert chromatic.f_m_polynomial(2).evaluate(2, 2, 2) == 32
        assert 2 * oracle.count_all(Shape(2, 2, 2))[2] == 32

    @pytest.mark.parametrize("m", range(1, 7))
    def test_evaluations_match_oracle(self, m):
        poly = chromatic.f_m_polynomial(m)
        for dims in [(2, 2, 2), (3, 3, 3), (2, 3, 4), (4, 2, 4), (5, 4, 3)]:
            shape = Shape(*dims)
            assert poly.evaluate(*dims) == factorial(m) * oracle.count_all(shape)[m]

    @pytest.mark.parametrize("m", range(1, 7))
    def test_structural_properties(self, m):
        poly = chromatic.f_m_polynomial(m)
        assert poly.is_symmetric()
        assert poly.degree() == 3 * m
        assert poly.terms.get((m, m, m)) == 1
        assert all(a >= 1 and b >= 1 and c >= 1 for (a, b, c) in poly.terms)
