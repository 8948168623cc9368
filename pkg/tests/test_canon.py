import itertools
import random
from math import factorial

import pytest

from plrcount.canon import (
    ColoredGraph,
    GraphSizeError,
    automorphism_count,
    canonical_code,
    canonical_form,
    connected_components,
)
from plrcount.core import Permutation


def brute_automorphisms(g: ColoredGraph) -> int:
    edges = g.edges
    count = 0
    for images in itertools.permutations(range(g.vertex_count)):
        if any(g.colors[v] != g.colors[images[v]] for v in range(g.vertex_count)):
            continue
        mapped = {tuple(sorted((images[u], images[v]))) for (u, v) in edges}
        if mapped == edges:
            count += 1
    return count


def random_graph(rng, v, colored=True):
    edges = [
        (a, b)
        for a in range(v)
        for b in range(a + 1, v)
        if rng.random() < rng.choice((0.25, 0.5, 0.75))
    ]
    colors = [rng.randrange(3) if colored else 0 for _ in range(v)]
    return ColoredGraph(v, colors, edges)


class TestCanonicalForm:
    def test_edgeless_uniform_code_is_labeling_independent(self):
        g = ColoredGraph(5, [0] * 5, [])
        codes = {
            canonical_code(g.relabel(Permutation(p)))
            for p in itertools.permutations(range(5))
        }
        assert len(codes) == 1

    def test_degree_distinct_graphs_differ(self):
        c4 = ColoredGraph(4, [0] * 4, [(0, 1), (1, 2), (2, 3), (3, 0)])
        other = ColoredGraph(4, [0] * 4, [(0, 1), (1, 2), (2, 3), (1, 3)])
        assert canonical_code(c4) != canonical_code(other)

    def test_all_relabelings_of_fixed_colored_graph(self):
        g = ColoredGraph(4, [0, 1, 0, 1], [(0, 1), (1, 2), (2, 3)])
        codes = {
            canonical_code(g.relabel(Permutation(p)))
            for p in itertools.permutations(range(4))
        }
        assert len(codes) == 1

    def test_exhaustive_invariance_small_graphs(self):
        # every graph on <= 4 vertices, two colorings, every relabeling
        for v in range(1, 5):
            pairs = list(itertools.combinations(range(v), 2))
            for bits in range(1 << len(pairs)):
                edges = [pairs[i] for i in range(len(pairs)) if (bits >> i) & 1]
                for colors in ([0] * v, [i % 2 for i in range(v)]):
                    g = ColoredGraph(v, colors, edges)
                    base = canonical_code(g)
                    for p in itertools.permutations(range(v)):
                        assert canonical_code(g.relabel(Permutation(p))) == base

    def test_relabeling_is_consistent(self):
        g = ColoredGraph(5, [0, 0, 1, 1, 1], [(0, 2), (0, 3), (1, 3), (1, 4)])
        cf = canonical_form(g)
        relabeled = g.relabel(cf.relabeling)
        assert canonical_code(relabeled) == cf.code
        # canonical order keeps color classes contiguous and ascending
        order = cf.relabeling.inverse()
        ordered_colors = [g.colors[order(p)] for p in range(5)]
        assert ordered_colors == sorted(ordered_colors)

    def test_size_cap(self):
        with pytest.raises(GraphSizeError):
            canonical_form(ColoredGraph(65, [0] * 65, []))


class TestRandomizedSuites:
    def test_invariance_random_6_vertex(self):
        rng = random.Random(20260810)
        for _ in range(2000):
            v = rng.randint(2, 6)
            g = random_graph(rng, v)
            base = canonical_code(g)
            for _ in range(3):
                images = list(range(v))
                rng.shuffle(images)
                assert canonical_code(g.relabel(Permutation(images))) == base

    def test_automorphism_counts_random_6_vertex(self):
        rng = random.Random(42)
        for _ in range(800):
            v = rng.randint(1, 6)
            g = random_graph(rng, v, colored=rng.random() < 0.5)
            assert automorphism_count(g) == brute_automorphisms(g)


class TestAutomorphismCount:
    def test_complete_graph(self):
        g = ColoredGraph(4, [0] * 4, list(itertools.combinations(range(4), 2)))
        assert automorphism_count(g) == 24

    def test_published_two_by_two_block(self):
        g = ColoredGraph(4, [0, 0, 1, 1], [(0, 2), (0, 3), (1, 2), (1, 3)])
        assert automorphism_count(g) == 4

    def test_path_five(self):
        g = ColoredGraph(5, [0] * 5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        assert automorphism_count(g) == 2

    def test_divides_color_class_factorials(self):
        rng = random.Random(3)
        for _ in range(200):
            v = rng.randint(1, 6)
            g = random_graph(rng, v)
            bound = 1
            for c in set(g.colors):
                bound *= factorial(sum(1 for x in g.colors if x == c))
            assert bound % automorphism_count(g) == 0


class TestConnectedComponents:
    def test_edgeless(self):
        assert connected_components(ColoredGraph(7, [0] * 7, [])) == 7

    def test_published_merged_clash_graph(self):
        g = ColoredGraph(
            4, [0] * 4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]
        )
        assert connected_components(g) == 1

    def test_two_triangles(self):
        g = ColoredGraph(
            6, [0] * 6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
        )
        assert connected_components(g) == 2
