"""Ground-truth counting by exhaustive backtracking.

Everything else in the package is validated against this module.  The
weight-distribution counter walks cells in row-major order with per-row and
per-column symbol bitmasks and credits every partial placement it visits, so
each partial Latin rectangle is counted exactly once, at the node where its
last filled cell is placed.

The hot loop is compiled with numba when the counts provably fit in int64;
a pure-Python twin of the same recursion handles the rest and doubles as a
cross-check in the tests.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

from .core import (
    Paratopism,
    PartialLatinRectangle,
    Permutation,
    Shape,
    ShapeMismatchError,
    WeightDistribution,
    parastrophism_group,
)

_INT64_SAFE = 1 << 62

try:
    import numpy as _np
    from numba import njit as _njit

    @_njit(cache=True)
    def _count_kernel(pos, weight, r, s, n, row_masks, col_masks, counts):
        counts[weight] += 1
        for p in range(pos, r * s):
            i = p // s
            j = p % s
            used = row_masks[i] | col_masks[j]
            for k in range(n):
                bit = 1 << k
                if not (used & bit):
                    row_masks[i] |= bit
                    col_masks[j] |= bit
                    _count_kernel(p + 1, weight + 1, r, s, n, row_masks, col_masks, counts)
                    row_masks[i] &= ~bit
                    col_masks[j] &= ~bit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _count_py(pos, weight, r, s, n, row_masks, col_masks, counts):
    counts[weight] += 1
    for p in range(pos, r * s):
        i, j = divmod(p, s)
        used = row_masks[i] | col_masks[j]
        for k in range(n):
            bit = 1 << k
            if not (used & bit):
                row_masks[i] |= bit
                col_masks[j] |= bit
                _count_py(p + 1, weight + 1, r, s, n, row_masks, col_masks, counts)
                row_masks[i] &= ~bit
                col_masks[j] &= ~bit


def _int64_safe(shape: Shape) -> bool:
    # counts[m] <= C(rs, m) * n^m: choose the filled cells, then symbols freely.
    return all(
        comb(shape.cells, m) * shape.n**m < _INT64_SAFE
        for m in range(shape.cells + 1)
    )


@lru_cache(maxsize=256)
def _count_all_dims(r: int, s: int, n: int) -> tuple[int, ...]:
    if _HAVE_NUMBA and _int64_safe(Shape(r, s, n)):
        counts = _np.zeros(r * s + 1, dtype=_np.int64)
        _count_kernel(
            0,
            0,
            r,
            s,
            n,
            _np.zeros(r, dtype=_np.int64),
            _np.zeros(s, dtype=_np.int64),
            counts,
        )
        return tuple(int(c) for c in counts)
    counts = [0] * (r * s + 1)
    _count_py(0, 0, r, s, n, [0] * r, [0] * s, counts)
    return tuple(counts)


def count_all(shape: Shape) -> WeightDistribution:
    """#PLR(r,s,n;m) for every m, by plain exhaustive backtracking.

    Feasible when the total count is modest (roughly r,s,n <= 4 instantly,
    isolated larger shapes in seconds to minutes); the caller is responsible
    for picking feasible sizes.
    """
    return WeightDistribution(shape, _count_all_dims(*shape.dims))


def triple_orbits(p: Paratopism, shape: Shape) -> list[list[tuple[int, int, int]]]:
    """Orbits of [r] x [s] x [n] under the entry map of the paratopism."""
    if not p.fits(shape):
        raise ShapeMismatchError(f"{p} does not act on {shape}")
    seen: set[tuple[int, int, int]] = set()
    orbits = []
    for t in itertools.product(range(shape.r), range(shape.s), range(shape.n)):
        if t in seen:
            continue
        orbit = [t]
        seen.add(t)
        u = p.entry_image(t)
        while u != t:
            orbit.append(u)
            seen.add(u)
            u = p.entry_image(u)
        orbits.append(orbit)
    return orbits


def _orbit_clashes(orbit: list[tuple[int, int, int]]) -> bool:
    for (a, b) in itertools.combinations(orbit, 2):
        same = (a[0] == b[0]) + (a[1] == b[1]) + (a[2] == b[2])
        if same >= 2:
            return True
    return False


def count_fixed_by(p: Paratopism, shape: Shape) -> WeightDistribution:
    """Weight distribution of the PLRs fixed by the paratopism p.

    A fixed PLR's entry set is a union of orbits of the entry map, so the
    search backtracks over orbit subsets, rejecting any orbit whose own
    triples clash (two triples agreeing in two coordinates) and any pair of
    chosen orbits that clash across.
    """
    if not p.fits(shape):
        raise ShapeMismatchError(f"{p} does not act on {shape}")
    if p.pi.is_identity() and all(c.is_identity() for c in p.theta.components):
        return count_all(shape)

    r, s, n = shape.dims
    usable = []
    for orbit in triple_orbits(p, shape):
        if _orbit_clashes(orbit):
            continue
        cmask = rsmask = csmask = 0
        for (i, j, k) in orbit:
            cmask |= 1 << (i * s + j)
            rsmask |= 1 << (i * n + k)
            csmask |= 1 << (j * n + k)
        usable.append((cmask, rsmask, csmask, len(orbit)))

    counts = [0] * (shape.cells + 1)
    norb = len(usable)

    def rec(idx: int, weight: int, cm: int, rm: int, sm: int) -> None:
        counts[weight] += 1
        for t in range(idx, norb):
            oc, ors, ocs, osize = usable[t]
            if not ((cm & oc) or (rm & ors) or (sm & ocs)):
                rec(t + 1, weight + osize, cm | oc, rm | ors, sm | ocs)

    rec(0, 0, 0, 0, 0)
    return WeightDistribution(shape, counts)


def count_isotopisms(
    P: PartialLatinRectangle,
    Q: PartialLatinRectangle,
    method: str = "auto",
) -> int:
    """Number of isotopisms Theta with P^Theta = Q.

    "brute" filters all r!s!n! isotopisms and doubles as the oracle for the
    propagation path, which backtracks over row images and entry matchings
    and multiplies factorials of the unconstrained remainders.
    """
    if P.shape != Q.shape:
        raise ShapeMismatchError("isotopism counting requires equal shapes")
    if P.weight != Q.weight:
        return 0
    if method == "auto":
        r, s, n = P.shape.dims
        small = factorial(r) * factorial(s) * factorial(n) <= 1_000_000
        method = "brute" if small else "propagation"
    if method == "brute":
        return _count_isotopisms_brute(P, Q)
    if method == "propagation":
        return _count_isotopisms_prop(P, Q)
    raise ValueError(f"unknown method {method!r}")


def _count_isotopisms_brute(P: PartialLatinRectangle, Q: PartialLatinRectangle) -> int:
    r, s, n = P.shape.dims
    target = Q.entry_set()
    entries = sorted(P.entry_set())
    count = 0
    for alpha in itertools.permutations(range(r)):
        for beta in itertools.permutations(range(s)):
            for gamma in itertools.permutations(range(n)):
                if all((alpha[i], beta[j], gamma[k]) in target for i, j, k in entries):
                    count += 1
    return count


def _count_isotopisms_prop(P: PartialLatinRectangle, Q: PartialLatinRectangle) -> int:
    r, s, n = P.shape.dims
    p_rows = [sorted((j, v - 1) for j, v in enumerate(row) if v) for row in P.rows]
    q_rows = [sorted((j, v - 1) for j, v in enumerate(row) if v) for row in Q.rows]
    p_nonempty = [i for i in range(r) if p_rows[i]]
    q_nonempty = [i for i in range(r) if q_rows[i]]
    if sorted(len(p_rows[i]) for i in p_nonempty) != sorted(
        len(q_rows[i]) for i in q_nonempty
    ):
        return 0

    beta: dict[int, int] = {}
    gamma: dict[int, int] = {}
    beta_used: set[int] = set()
    gamma_used: set[int] = set()
    total = 0

    def match_entries(i_idx: int, ents_p, ents_q, pos: int) -> None:
        if pos == len(ents_p):
            assign_row(i_idx + 1)
            return
        j, k = ents_p[pos]
        for (j2, k2) in ents_q:
            if beta.get(j, j2) != j2 or gamma.get(k, k2) != k2:
                continue
            if j not in beta and j2 in beta_used:
                continue
            if k not in gamma and k2 in gamma_used:
                continue
            if (j2, k2) in used_targets:
                continue
            new_b = j not in beta
            new_g = k not in gamma
            if new_b:
                beta[j] = j2
                beta_used.add(j2)
            if new_g:
                gamma[k] = k2
                gamma_used.add(k2)
            used_targets.add((j2, k2))
            match_entries(i_idx, ents_p, ents_q, pos + 1)
            used_targets.discard((j2, k2))
            if new_b:
                del beta[j]
                beta_used.discard(j2)
            if new_g:
                del gamma[k]
                gamma_used.discard(k2)

    alpha_used: set[int] = set()
    used_targets: set[tuple[int, int]] = set()

    def assign_row(i_idx: int) -> None:
        nonlocal total
        if i_idx == len(p_nonempty):
            free_rows = factorial(r - len(p_nonempty))
            free_cols = factorial(s - len(beta))
            free_syms = factorial(n - len(gamma))
            total += free_rows * free_cols * free_syms
            return
        i = p_nonempty[i_idx]
        for i2 in q_nonempty:
            if i2 in alpha_used or len(q_rows[i2]) != len(p_rows[i]):
                continue
            alpha_used.add(i2)
            match_entries(i_idx, p_rows[i], q_rows[i2], 0)
            alpha_used.discard(i2)

    assign_row(0)
    return total


def parastrophe(plr: PartialLatinRectangle, pi: Permutation) -> PartialLatinRectangle:
    """Rearrange entry coordinates by a shape-stabilizing role permutation."""
    p = Paratopism(
        theta=_identity_isotopism(plr.shape),
        pi=pi,
    )
    if not p.fits(plr.shape):
        raise ShapeMismatchError(f"{pi} does not stabilize {plr.shape}")
    return PartialLatinRectangle.from_entries(
        plr.shape,
        (tuple(e[pi(t)] for t in range(3)) for e in plr.entry_set()),
    )


def _identity_isotopism(shape: Shape):
    from .core import Isotopism

    return Isotopism.identity(shape)


def class_sizes(P: PartialLatinRectangle) -> tuple[int, int, int]:
    """(isotopism class size, main class size, isotopism classes per main
    class) of P, via the Orbit-Stabilizer Theorem.

    All divisions must be exact; an inexact one signals a bug.
    """
    r, s, n = P.shape.dims
    group = factorial(r) * factorial(s) * factorial(n)
    aut = count_isotopisms(P, P)
    paras = parastrophism_group(P.shape)
    par_count = sum(count_isotopisms(P, parastrophe(P, pi)) for pi in paras)

    isot_size, rem1 = divmod(group, aut)
    main_size, rem2 = divmod(len(paras) * group, par_count)
    per_main, rem3 = divmod(len(paras) * aut, par_count)
    if rem1 or rem2 or rem3:
        raise AssertionError("inexact orbit-stabilizer division (bug)")
    return isot_size, main_size, per_main
