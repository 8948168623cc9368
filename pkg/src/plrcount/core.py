"""Shared domain types: grids, permutations, paratopisms, cycle structures,
weight distributions, and exact polynomial arithmetic.

Conventions
-----------
* Rows, columns, and symbols are 0-based everywhere inside the library.
  Textual I/O (CLI, fixtures, repr) is 1-based; conversion happens at the
  boundary.
* Grid cells hold 0 for "empty" and 1..n for symbols, so validity checks
  reduce to bitmask tests.  Entry triples use 0-based symbols.
* All counts are plain Python ints (arbitrary precision); no floats appear
  on any counting path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence


class ShapeMismatchError(ValueError):
    """A permutation/paratopism does not fit the grid it is applied to."""


@dataclass(frozen=True)
class Shape:
    """Dimensions of a partial Latin rectangle: r rows, s columns, n symbols.

    No ordering among r, s, n is assumed; n may be smaller than both r and s.
    """

    r: int
    s: int
    n: int

    def __post_init__(self) -> None:
        if self.r < 1 or self.s < 1 or self.n < 1:
            raise ValueError(f"shape dimensions must be positive, got {self}")

    @property
    def cells(self) -> int:
        return self.r * self.s

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.r, self.s, self.n)

    def sorted(self) -> "Shape":
        a, b, c = sorted(self.dims)
        return Shape(a, b, c)

    def __str__(self) -> str:
        return f"{self.r}x{self.s}x{self.n}"


class Permutation:
    """A bijection on [t], stored as the image tuple (0-based)."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        imgs = tuple(images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation: {imgs}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, t: int) -> "Permutation":
        return cls(range(t))

    @classmethod
    def from_cycles(cls, t: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles given in 0-based point labels."""
        images = list(range(t))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)([cyc[0]])):
                images[a] = b
        return cls(images)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        """Composition acting left-to-right: (p*q)(x) = q(p(x))."""
        if self.degree != other.degree:
            raise ShapeMismatchError("composing permutations of different degree")
        return Permutation([other.images[i] for i in self.images])

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, im in enumerate(self.images):
            inv[im] = i
        return Permutation(inv)

    def cycles(self) -> list[list[int]]:
        seen = [False] * self.degree
        out = []
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            x = self.images[start]
            while x != start:
                cyc.append(x)
                seen[x] = True
                x = self.images[x]
            out.append(cyc)
        return out

    def is_identity(self) -> bool:
        return all(i == im for i, im in enumerate(self.images))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"


class CycleStructure:
    """Multiset of cycle lengths of a permutation; fixes its conjugacy class."""

    __slots__ = ("multiplicities", "degree")

    def __init__(self, multiplicities: Mapping[int, int]):
        mult = {int(i): int(d) for i, d in multiplicities.items() if d}
        if any(i < 1 or d < 1 for i, d in mult.items()):
            raise ValueError(f"bad cycle structure {multiplicities}")
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "degree", sum(i * d for i, d in mult.items()))

    @classmethod
    def of(cls, p: Permutation) -> "CycleStructure":
        mult: dict[int, int] = {}
        for cyc in p.cycles():
            mult[len(cyc)] = mult.get(len(cyc), 0) + 1
        return cls(mult)

    def lengths(self) -> list[int]:
        return sorted(self.multiplicities)

    def representative(self) -> Permutation:
        """Canonical permutation with this structure: cycles laid out in
        decreasing length over consecutive points."""
        images = []
        base = 0
        for length in sorted(self.multiplicities, reverse=True):
            for _ in range(self.multiplicities[length]):
                images.extend(base + (k + 1) % length for k in range(length))
                base += length
        return Permutation(images)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CycleStructure)
            and self.multiplicities == other.multiplicities
        )

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.multiplicities.items())))

    def __str__(self) -> str:
        return " ".join(
            f"{i}^{d}" for i, d in sorted(self.multiplicities.items(), reverse=True)
        )

    def __repr__(self) -> str:
        return f"CycleStructure({self.multiplicities!r})"


def cycle_structure(p: Permutation) -> CycleStructure:
    """Cycle-length multiset from the unique cycle decomposition of p."""
    return CycleStructure.of(p)


def permutations_with_structure(z: CycleStructure) -> int:
    """Number of degree-t permutations with cycle structure z:
    t! / prod_i(d_i! * i^d_i)."""
    denom = 1
    for i, d in z.multiplicities.items():
        denom *= factorial(d) * i**d
    q, rem = divmod(factorial(z.degree), denom)
    assert rem == 0
    return q


def cycle_structures(t: int) -> list[CycleStructure]:
    """All cycle structures of S_t, i.e. the integer partitions of t."""
    out = []
    for part in _partitions(t):
        mult: dict[int, int] = {}
        for i in part:
            mult[i] = mult.get(i, 0) + 1
        out.append(CycleStructure(mult))
    return out


def _partitions(t: int, maximum: int | None = None) -> Iterator[tuple[int, ...]]:
    if t == 0:
        yield ()
        return
    if maximum is None or maximum > t:
        maximum = t
    for first in range(maximum, 0, -1):
        for rest in _partitions(t - first, first):
            yield (first,) + rest


@dataclass(frozen=True)
class Isotopism:
    """A triple of permutations acting on rows, columns, and symbols."""

    alpha: Permutation
    beta: Permutation
    gamma: Permutation

    @classmethod
    def identity(cls, shape: Shape) -> "Isotopism":
        return cls(
            Permutation.identity(shape.r),
            Permutation.identity(shape.s),
            Permutation.identity(shape.n),
        )

    @property
    def components(self) -> tuple[Permutation, Permutation, Permutation]:
        return (self.alpha, self.beta, self.gamma)

    def fits(self, shape: Shape) -> bool:
        return (
            self.alpha.degree == shape.r
            and self.beta.degree == shape.s
            and self.gamma.degree == shape.n
        )


@dataclass(frozen=True)
class Paratopism:
    """An isotopism combined with a permutation of the three coordinate roles.

    The role permutation pi acts on {0,1,2}.  To act on a fixed shape it must
    stabilize the dimension triple: dims[pi(t)] == dims[t] for each t.
    """

    theta: Isotopism
    pi: Permutation

    def __post_init__(self) -> None:
        if self.pi.degree != 3:
            raise ValueError("role permutation must act on 3 points")

    @classmethod
    def identity(cls, shape: Shape) -> "Paratopism":
        return cls(Isotopism.identity(shape), Permutation.identity(3))

    def fits(self, shape: Shape) -> bool:
        dims = shape.dims
        return self.theta.fits(shape) and all(
            dims[self.pi(t)] == dims[t] for t in range(3)
        )

    def entry_image(self, entry: tuple[int, int, int]) -> tuple[int, int, int]:
        """Image of a single entry triple under this paratopism."""
        comps = self.theta.components
        return tuple(comps[t](entry[self.pi(t)]) for t in range(3))  # type: ignore[return-value]


def compose_paratopisms(p1: Paratopism, p2: Paratopism) -> Paratopism:
    """The paratopism acting as "apply p1, then p2"."""
    pi3 = Permutation([p1.pi(p2.pi(t)) for t in range(3)])
    c1 = p1.theta.components
    c2 = p2.theta.components
    comps = [c1[p2.pi(t)] * c2[t] for t in range(3)]
    return Paratopism(Isotopism(*comps), pi3)


def invert_paratopism(p: Paratopism) -> Paratopism:
    pi_inv = p.pi.inverse()
    comps = p.theta.components
    inv = [comps[pi_inv(t)].inverse() for t in range(3)]
    return Paratopism(Isotopism(*inv), pi_inv)


def parastrophism_group(shape: Shape) -> list[Permutation]:
    """Role permutations stabilizing (r, s, n)."""
    dims = shape.dims
    return [
        pi
        for perm in itertools.permutations(range(3))
        for pi in [Permutation(perm)]
        if all(dims[pi(t)] == dims[t] for t in range(3))
    ]


class PartialLatinRectangle:
    """An r x s grid over [n] with no symbol repeated in any row or column.

    Cells hold 0 for empty; entry triples expose 0-based symbols.
    """

    __slots__ = ("shape", "rows")

    def __init__(self, shape: Shape, rows: Sequence[Sequence[int]]):
        grid = tuple(tuple(row) for row in rows)
        if len(grid) != shape.r or any(len(row) != shape.s for row in grid):
            raise ValueError("grid does not match shape")
        for i, row in enumerate(grid):
            seen = 0
            for v in row:
                if v < 0 or v > shape.n:
                    raise ValueError(f"symbol {v} out of range in row {i}")
                if v:
                    bit = 1 << v
                    if seen & bit:
                        raise ValueError(f"symbol {v} repeated in row {i}")
                    seen |= bit
        for j in range(shape.s):
            seen = 0
            for i in range(shape.r):
                v = grid[i][j]
                if v:
                    bit = 1 << v
                    if seen & bit:
                        raise ValueError(f"symbol {v} repeated in column {j}")
                    seen |= bit
        self.shape = shape
        self.rows = grid

    @classmethod
    def empty(cls, shape: Shape) -> "PartialLatinRectangle":
        return cls(shape, [[0] * shape.s for _ in range(shape.r)])

    @classmethod
    def from_entries(
        cls, shape: Shape, entries: Iterable[tuple[int, int, int]]
    ) -> "PartialLatinRectangle":
        """Build from 0-based (row, col, symbol) triples."""
        grid = [[0] * shape.s for _ in range(shape.r)]
        for i, j, k in entries:
            if not (0 <= i < shape.r and 0 <= j < shape.s and 0 <= k < shape.n):
                raise ValueError(f"entry {(i, j, k)} out of bounds for {shape}")
            if grid[i][j]:
                raise ValueError(f"two symbols in cell {(i, j)}")
            grid[i][j] = k + 1
        return cls(shape, grid)

    def entry_set(self) -> frozenset[tuple[int, int, int]]:
        return frozenset(
            (i, j, v - 1)
            for i, row in enumerate(self.rows)
            for j, v in enumerate(row)
            if v
        )

    @property
    def weight(self) -> int:
        return sum(1 for row in self.rows for v in row if v)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, PartialLatinRectangle)
            and self.shape == other.shape
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.shape, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(
            " ".join(str(v) if v else "." for v in row) for row in self.rows
        )
        return f"PLR({self.shape}: {body})"


def apply_paratopism(
    p: Paratopism, plr: PartialLatinRectangle
) -> PartialLatinRectangle:
    """The paratopic image (L^pi)^Theta: rearrange each entry's coordinates by
    pi, then permute each coordinate by the matching component of Theta.

    Preserves weight; raises ShapeMismatchError if p does not fit L's shape.
    """
    if not p.fits(plr.shape):
        raise ShapeMismatchError(f"{p} does not act on {plr.shape}")
    return PartialLatinRectangle.from_entries(
        plr.shape, (p.entry_image(e) for e in plr.entry_set())
    )


class WeightDistribution:
    """Counts of partial Latin rectangles indexed by weight m = 0..r*s."""

    __slots__ = ("shape", "counts")

    def __init__(self, shape: Shape, counts: Sequence[int]):
        cnt = tuple(int(c) for c in counts)
        if len(cnt) != shape.cells + 1:
            raise ValueError(
                f"expected {shape.cells + 1} counts for {shape}, got {len(cnt)}"
            )
        if cnt[0] != 1:
            raise ValueError("counts[0] must be 1 (the empty PLR)")
        if any(c < 0 for c in cnt):
            raise ValueError("negative count")
        self.shape = shape
        self.counts = cnt

    def __getitem__(self, m: int) -> int:
        # Weights beyond r*s are legal queries and yield 0.
        if m < 0:
            raise IndexError(m)
        return self.counts[m] if m < len(self.counts) else 0

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.counts)

    def total(self) -> int:
        return sum(self.counts)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WeightDistribution)
            and self.shape == other.shape
            and self.counts == other.counts
        )

    def __repr__(self) -> str:
        return f"WeightDistribution({self.shape}, {list(self.counts)})"


# ---------------------------------------------------------------------------
# Exact polynomial arithmetic
# ---------------------------------------------------------------------------

Coeff = int | Fraction
_VARS = ("r", "s", "n")


class TriPoly:
    """Polynomial in (r, s, n) with exact coefficients, stored fully expanded.

    Symmetric polynomials can be rendered in bar notation, where "abc" stands
    for the sum of the distinct monic monomials whose exponent multiset is
    {a, b, c}.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int, int], Coeff] | None = None):
        clean: dict[tuple[int, int, int], Coeff] = {}
        if terms:
            for expo, coeff in terms.items():
                if isinstance(coeff, Fraction) and coeff.denominator == 1:
                    coeff = int(coeff)
                if coeff:
                    clean[tuple(int(e) for e in expo)] = coeff  # type: ignore[index]
        self.terms = clean

    @classmethod
    def zero(cls) -> "TriPoly":
        return cls()

    @classmethod
    def constant(cls, c: Coeff) -> "TriPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def monomial(cls, a: int, b: int, c: int, coeff: Coeff = 1) -> "TriPoly":
        return cls({(a, b, c): coeff})

    @classmethod
    def rsn(cls) -> "TriPoly":
        return cls({(1, 1, 1): 1})

    @classmethod
    def bar(cls, a: int, b: int, c: int, coeff: Coeff = 1) -> "TriPoly":
        """Sum of the distinct monic monomials with exponent multiset {a,b,c}."""
        return cls({expo: coeff for expo in set(itertools.permutations((a, b, c)))})

    def __add__(self, other: "TriPoly | Coeff") -> "TriPoly":
        if isinstance(other, (int, Fraction)):
            other = TriPoly.constant(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            terms[expo] = terms.get(expo, 0) + coeff
        return TriPoly(terms)

    __radd__ = __add__

    def __sub__(self, other: "TriPoly | Coeff") -> "TriPoly":
        if isinstance(other, (int, Fraction)):
            other = TriPoly.constant(other)
        terms = dict(self.terms)
        for expo, coeff in other.terms.items():
            terms[expo] = terms.get(expo, 0) - coeff
        return TriPoly(terms)

    def __rsub__(self, other: "Coeff") -> "TriPoly":
        return TriPoly.constant(other) - self

    def __neg__(self) -> "TriPoly":
        return TriPoly({e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "TriPoly | Coeff") -> "TriPoly":
        if isinstance(other, (int, Fraction)):
            return TriPoly({e: c * other for e, c in self.terms.items()})
        terms: dict[tuple[int, int, int], Coeff] = {}
        for (a1, b1, c1), x in self.terms.items():
            for (a2, b2, c2), y in other.terms.items():
                expo = (a1 + a2, b1 + b2, c1 + c2)
                terms[expo] = terms.get(expo, 0) + x * y
        return TriPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TriPoly":
        out = TriPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def evaluate(self, r: int, s: int, n: int) -> Coeff:
        return sum(
            coeff * r**a * s**b * n**c for (a, b, c), coeff in self.terms.items()
        )

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def restrict_min_degree(self, d: int) -> "TriPoly":
        return TriPoly({e: c for e, c in self.terms.items() if sum(e) >= d})

    def is_symmetric(self) -> bool:
        for expo, coeff in self.terms.items():
            for perm in itertools.permutations(expo):
                if self.terms.get(perm, 0) != coeff:
                    return False
        return True

    def is_integral(self) -> bool:
        return all(
            not isinstance(c, Fraction) or c.denominator == 1
            for c in self.terms.values()
        )

    def to_int_coeffs(self) -> "TriPoly":
        if not self.is_integral():
            raise ValueError("polynomial has non-integer coefficients")
        return TriPoly({e: int(c) for e, c in self.terms.items()})

    def bar_terms(self) -> dict[tuple[int, int, int], Coeff]:
        """Coefficients grouped by descending exponent multiset.

        Raises ValueError when the polynomial is not symmetric.
        """
        if not self.is_symmetric():
            raise ValueError("bar notation requires a symmetric polynomial")
        out: dict[tuple[int, int, int], Coeff] = {}
        for expo, coeff in self.terms.items():
            key = tuple(sorted(expo, reverse=True))
            out[key] = coeff  # symmetric: all orbit members share the coefficient
        return out

    def bar_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.bar_terms(), reverse=True):
            coeff = self.bar_terms()[key]
            name = "".join(str(e) for e in key)
            if key == (0, 0, 0):
                text = str(coeff)
            elif key == (1, 1, 1):
                body = "rsn"
                text = body if coeff == 1 else f"-{body}" if coeff == -1 else f"{coeff}*{body}"
            else:
                body = f"[{name}]"
                text = body if coeff == 1 else f"-{body}" if coeff == -1 else f"{coeff}*{body}"
            parts.append(text)
        return " + ".join(parts).replace("+ -", "- ")

    def expanded_string(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for expo in sorted(self.terms, reverse=True):
            coeff = self.terms[expo]
            factors = [
                f"{v}^{e}" if e > 1 else v for v, e in zip(_VARS, expo) if e
            ]
            mono = "*".join(factors) if factors else "1"
            parts.append(f"{coeff}*{mono}" if mono != "1" else str(coeff))
        return " + ".join(parts).replace("+ -", "- ")

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TriPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"TriPoly({self.terms!r})"


class UniPoly:
    """Polynomial in n with exact integer coefficients (index = exponent)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Coeff]):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls) -> "UniPoly":
        return cls([])

    @classmethod
    def x(cls) -> "UniPoly":
        return cls([0, 1])

    @classmethod
    def constant(cls, c: Coeff) -> "UniPoly":
        return cls([c])

    @classmethod
    def falling_factorial(cls, e: int) -> "UniPoly":
        """x(x-1)...(x-e+1) as a polynomial."""
        out = cls([1])
        for i in range(e):
            out = out * cls([-i, 1])
        return out

    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else 0

    def __add__(self, other: "UniPoly") -> "UniPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return UniPoly(out)

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + UniPoly([-c for c in other.coeffs])

    def __mul__(self, other: "UniPoly | Coeff") -> "UniPoly":
        if isinstance(other, (int, Fraction)):
            return UniPoly([c * other for c in self.coeffs])
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def evaluate(self, x: int) -> Coeff:
        acc: Coeff = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_tripoly(self, var: int) -> TriPoly:
        """Lift to a TriPoly in the given variable (0=r, 1=s, 2=n)."""
        terms = {}
        for e, c in enumerate(self.coeffs):
            expo = [0, 0, 0]
            expo[var] = e
            terms[tuple(expo)] = c
        return TriPoly(terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"UniPoly({list(self.coeffs)})"
