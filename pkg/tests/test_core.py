import itertools
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plrcount.core import (
    CycleStructure,
    Isotopism,
    Paratopism,
    PartialLatinRectangle,
    Permutation,
    Shape,
    ShapeMismatchError,
    TriPoly,
    UniPoly,
    WeightDistribution,
    apply_paratopism,
    compose_paratopisms,
    cycle_structure,
    cycle_structures,
    invert_paratopism,
    parastrophism_group,
    permutations_with_structure,
)


def all_paratopisms(shape):
    out = []
    for pi in parastrophism_group(shape):
        for a in itertools.permutations(range(shape.r)):
            for b in itertools.permutations(range(shape.s)):
                for g in itertools.permutations(range(shape.n)):
                    out.append(
                        Paratopism(
                            Isotopism(Permutation(a), Permutation(b), Permutation(g)),
                            pi,
                        )
                    )
    return out


def all_plrs(shape):
    def rec(pos, rows, row_masks, col_masks):
        if pos == shape.cells:
            yield PartialLatinRectangle(shape, [row[:] for row in rows])
            return
        i, j = divmod(pos, shape.s)
        yield from rec(pos + 1, rows, row_masks, col_masks)
        for k in range(1, shape.n + 1):
            bit = 1 << k
            if not ((row_masks[i] | col_masks[j]) & bit):
                rows[i][j] = k
                row_masks[i] |= bit
                col_masks[j] |= bit
                yield from rec(pos + 1, rows, row_masks, col_masks)
                rows[i][j] = 0
                row_masks[i] &= ~bit
                col_masks[j] &= ~bit

    yield from rec(
        0,
        [[0] * shape.s for _ in range(shape.r)],
        [0] * shape.r,
        [0] * shape.s,
    )


class TestShape:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            Shape(0, 1, 1)

    def test_no_ordering_assumed(self):
        assert Shape(5, 2, 1).dims == (5, 2, 1)


class TestPartialLatinRectangle:
    def test_row_repeat_rejected(self):
        with pytest.raises(ValueError):
            PartialLatinRectangle(Shape(1, 2, 2), [[1, 1]])

    def test_column_repeat_rejected(self):
        with pytest.raises(ValueError):
            PartialLatinRectangle(Shape(2, 1, 2), [[2], [2]])

    def test_entry_round_trip(self):
        shape = Shape(2, 3, 3)
        entries = {(0, 0, 0), (1, 2, 1)}
        plr = PartialLatinRectangle.from_entries(shape, entries)
        assert plr.entry_set() == entries
        assert plr.weight == 2


class TestApplyParatopism:
    def test_identity_fixes_everything(self):
        shape = Shape(2, 3, 4)
        plr = PartialLatinRectangle.from_entries(shape, [(0, 1, 2), (1, 0, 3)])
        assert apply_paratopism(Paratopism.identity(shape), plr) == plr

    def test_symmetric_entry_set_fixed_by_transpose(self):
        shape = Shape(2, 2, 2)
        plr = PartialLatinRectangle.from_entries(shape, [(0, 0, 0), (1, 1, 1)])
        p = Paratopism(Isotopism.identity(shape), Permutation([1, 0, 2]))
        assert apply_paratopism(p, plr) == plr

    def test_row_swap_moves_entry(self):
        shape = Shape(2, 2, 2)
        plr = PartialLatinRectangle.from_entries(shape, [(0, 0, 0)])
        p = Paratopism(
            Isotopism(
                Permutation([1, 0]), Permutation.identity(2), Permutation.identity(2)
            ),
            Permutation.identity(3),
        )
        assert apply_paratopism(p, plr).entry_set() == {(1, 0, 0)}

    def test_shape_mismatch_rejected(self):
        shape = Shape(2, 3, 2)
        plr = PartialLatinRectangle.empty(shape)
        bad = Paratopism(Isotopism.identity(shape), Permutation([1, 0, 2]))
        with pytest.raises(ShapeMismatchError):
            apply_paratopism(bad, plr)

    def test_group_action_exhaustive_2x2x2(self):
        shape = Shape(2, 2, 2)
        paras = all_paratopisms(shape)
        samples = [
            PartialLatinRectangle.from_entries(shape, [(0, 0, 0), (1, 1, 1)]),
            PartialLatinRectangle.from_entries(shape, [(0, 1, 0)]),
            PartialLatinRectangle.empty(shape),
        ]
        for p1 in paras:
            for p2 in paras:
                comp = compose_paratopisms(p1, p2)
                for plr in samples:
                    assert apply_paratopism(
                        p2, apply_paratopism(p1, plr)
                    ) == apply_paratopism(comp, plr)

    def test_group_action_sampled_3x3x3(self):
        import random

        rng = random.Random(7)
        shape = Shape(3, 3, 3)
        plr = PartialLatinRectangle.from_entries(
            shape, [(0, 0, 0), (1, 1, 1), (2, 2, 2), (0, 1, 2)]
        )

        def random_paratopism():
            perms = []
            for t in (3, 3, 3):
                images = list(range(t))
                rng.shuffle(images)
                perms.append(Permutation(images))
            pi = list(range(3))
            rng.shuffle(pi)
            return Paratopism(Isotopism(*perms), Permutation(pi))

        for _ in range(300):
            p1, p2 = random_paratopism(), random_paratopism()
            comp = compose_paratopisms(p1, p2)
            assert apply_paratopism(
                p2, apply_paratopism(p1, plr)
            ) == apply_paratopism(comp, plr)
            inv = invert_paratopism(p1)
            assert apply_paratopism(inv, apply_paratopism(p1, plr)) == plr

    def test_weight_preserved(self):
        shape = Shape(2, 2, 2)
        for plr in all_plrs(shape):
            for p in all_paratopisms(shape):
                assert apply_paratopism(p, plr).weight == plr.weight


class TestCycleStructure:
    def test_identity(self):
        z = cycle_structure(Permutation.identity(4))
        assert z.multiplicities == {1: 4}

    def test_published_example(self):
        # (12)(345)(78)(9) read as a permutation of its 8 listed points.
        p = Permutation.from_cycles(8, [[0, 1], [2, 3, 4], [5, 6]])
        z = cycle_structure(p)
        assert z.multiplicities == {3: 1, 2: 2, 1: 1}
        assert str(z) == "3^1 2^2 1^1"

    def test_three_cycle(self):
        assert cycle_structure(Permutation([1, 2, 0])).multiplicities == {3: 1}

    def test_representative_round_trip(self):
        for t in range(1, 7):
            for z in cycle_structures(t):
                assert cycle_structure(z.representative()) == z


class TestPermutationsWithStructure:
    def test_identity_structure(self):
        for t in (1, 4, 9):
            assert permutations_with_structure(CycleStructure({1: t})) == 1

    def test_derived_s3_counts(self):
        by_structure = {}
        for images in itertools.permutations(range(3)):
            z = cycle_structure(Permutation(images))
            key = tuple(sorted(z.multiplicities.items()))
            by_structure[key] = by_structure.get(key, 0) + 1
        assert permutations_with_structure(CycleStructure({2: 1, 1: 1})) == (
            by_structure[((1, 1), (2, 1))]
        )
        assert permutations_with_structure(CycleStructure({3: 1})) == (
            by_structure[((3, 1),)]
        )

    @pytest.mark.parametrize("t", range(1, 10))
    def test_total_is_factorial(self, t):
        assert (
            sum(permutations_with_structure(z) for z in cycle_structures(t))
            == factorial(t)
        )


class TestWeightDistribution:
    def test_out_of_range_weight_is_zero(self):
        d = WeightDistribution(Shape(1, 2, 1), [1, 2, 1])
        assert d[5] == 0
        assert d[2] == 1

    def test_requires_one_empty_plr(self):
        with pytest.raises(ValueError):
            WeightDistribution(Shape(1, 1, 1), [2, 0])


coeffs = st.integers(min_value=-6, max_value=6)
exponents = st.tuples(
    st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)
)
tripolys = st.dictionaries(exponents, coeffs, max_size=6).map(TriPoly)
points = st.tuples(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))


class TestTriPoly:
    @given(tripolys, tripolys, points)
    @settings(max_examples=200, deadline=None)
    def test_addition_evaluates_pointwise(self, p, q, pt):
        assert (p + q).evaluate(*pt) == p.evaluate(*pt) + q.evaluate(*pt)

    @given(tripolys, tripolys, points)
    @settings(max_examples=200, deadline=None)
    def test_product_evaluates_pointwise(self, p, q, pt):
        assert (p * q).evaluate(*pt) == p.evaluate(*pt) * q.evaluate(*pt)

    def test_bar_expansion(self):
        assert len(TriPoly.bar(2, 1, 0).terms) == 6
        assert len(TriPoly.bar(2, 1, 1).terms) == 3
        assert TriPoly.bar(1, 1, 1) == TriPoly.rsn()

    def test_bar_terms_requires_symmetry(self):
        with pytest.raises(ValueError):
            TriPoly.monomial(2, 0, 0).bar_terms()

    def test_fraction_coefficients_normalize(self):
        p = TriPoly({(1, 0, 0): Fraction(4, 2)})
        assert p.terms == {(1, 0, 0): 2}
        assert p.is_integral()


class TestUniPoly:
    def test_falling_factorial(self):
        ff = UniPoly.falling_factorial(3)
        assert [ff.evaluate(x) for x in range(5)] == [0, 0, 0, 6, 24]

    def test_mul_matches_eval(self):
        p = UniPoly([1, 2])
        q = UniPoly([-3, 0, 1])
        for x in range(-3, 4):
            assert (p * q).evaluate(x) == p.evaluate(x) * q.evaluate(x)

    def test_to_tripoly(self):
        p = UniPoly([0, 1]).to_tripoly(2)
        assert p == TriPoly.monomial(0, 0, 1)
