"""Brute-force oracles shared by the test modules.

They enumerate directly over atom colourings and never call the search
routines of the package, so they serve as independent checks.  The random
generators at the end build compatible inputs from weighted directed cycles.
"""

from __future__ import annotations

import itertools
from fractions import Fraction as F
from typing import Iterable

from homspec.cantor import ZERO, Clopen
from homspec.coeff import RatLex, RatVector
from homspec.matrices import CompatMatrix, Polycycle
from homspec.measure import FiniteMeasure


def subset_sums(mu: FiniteMeasure) -> dict:
    """Value of every join of atoms, keyed by the tuple of atom indices."""
    out = {}
    n = len(mu.atoms)
    for r in range(n + 1):
        for idx in itertools.combinations(range(n), r):
            total = mu.system.zero_element
            for i in idx:
                total = total + mu.values[i]
            out[idx] = total
    return out


def three_partition_triples(mu: FiniteMeasure, atoms: Iterable[int] | None = None) -> set:
    """Value triples of all ordered 3-partitions of the join of ``atoms`` into non-zero parts."""
    idx = list(range(len(mu.atoms))) if atoms is None else list(atoms)
    zero = mu.system.zero_element
    out = set()
    for colours in itertools.product(range(3), repeat=len(idx)):
        if len(set(colours)) < 3:
            continue
        sums = [zero, zero, zero]
        for i, c in zip(idx, colours):
            sums[c] = sums[c] + mu.values[i]
        out.add(tuple(sums))
    return out


def join(parts: Iterable[Clopen]) -> Clopen:
    out = ZERO
    for p in parts:
        out = out | p
    return out


def clopens_of(mu: FiniteMeasure) -> list[Clopen]:
    """Every element of the finite algebra generated by the atoms."""
    n = len(mu.atoms)
    return [join(mu.atoms[i] for i in idx) for r in range(n + 1) for idx in itertools.combinations(range(n), r)]


def random_balanced_rows(rng, n: int, weight, total=None, zero=0):
    """Raw ``n``-square rows (``None`` for empty) whose row sums equal their column sums.

    The matrix is a sum of weighted directed cycles covering every index; a
    zero ``weight()`` is allowed.  When ``total`` is given, the first diagonal
    entry absorbs the difference so that all entries add up to it.
    """
    rows = [[None] * n for _ in range(n)]

    def add(i, j, w):
        rows[i][j] = w if rows[i][j] is None else rows[i][j] + w

    uncovered = set(range(n))
    while uncovered or rng.random() < 0.4:
        start = rng.choice(sorted(uncovered)) if uncovered else rng.randrange(n)
        others = [k for k in range(n) if k != start]
        cycle = [start] + rng.sample(others, rng.randrange(len(others) + 1))
        w = weight()
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            add(a, b, w)
        uncovered -= set(cycle)
    if total is not None:
        current = sum((x for r in rows for x in r if x is not None), zero)
        add(0, 0, total - current)
    return rows


def scale_rows(rows, factor):
    return [[None if x is None else x * factor for x in r] for r in rows]


def rows_total(rows, zero=0):
    return sum((x for r in rows for x in r if x is not None), zero)


Q = RatLex(1)
Q2 = RatVector(2)


def random_positive_matrix(rng, n):
    rows = random_balanced_rows(rng, n, lambda: F(rng.randint(1, 9), rng.randint(1, 5)))
    return CompatMatrix.from_rows(Q, scale_rows(rows, 1 / rows_total(rows)))


def random_ring_matrix(rng, system, n, total):
    if system.integral:
        weight = lambda: system(rng.randint(-3, 3))  # noqa: E731
    else:
        weight = lambda: system(F(rng.randint(-6, 6), rng.randint(1, 4)))  # noqa: E731
    return CompatMatrix.from_rows(system, random_balanced_rows(rng, n, weight, system(total), system.zero_element))


def random_qvector_matrix(rng, n):
    weight = lambda: Q2(F(rng.randint(-4, 4), rng.randint(1, 3)), F(rng.randint(-4, 4), rng.randint(1, 3)))  # noqa: E731
    return CompatMatrix.from_rows(Q2, random_balanced_rows(rng, n, weight, Q2(0, 0), Q2.zero_element))


def random_polycycle(rng, length):
    ws = [F(rng.randint(1, 9)) for _ in range(length)]
    ns = [rng.randint(1, 4) for _ in range(length)]
    total = sum(ws)
    return Polycycle.of(Q, [(w / total / n, n) for w, n in zip(ws, ns)])
