"""
Binary spectra over the two-element group
=========================================

Enumerate every binary spectrum with values in Z/2 and realize the one with
total 1 that misses the pair (1, 1) by a point mass taken mod 2.
"""

import itertools

from homspec.cantor import ONE, ZERO, cylinders
from homspec.coeff import ModInt
from homspec.measure import FiniteMeasure
from homspec.spectrum import AXIOMS, check_axioms, check_h2, enumerate_h2_small, h2_to_h3

Z2 = ModInt(2)

found = enumerate_h2_small(Z2)
for h in found:
    pairs = sorted((int(a.value), int(b.value)) for a, b in h.enumerate())
    axioms = check_axioms(h2_to_h3(h), AXIOMS, bound=40)
    failing = [r.axiom for r in axioms.results if r.verdict != "pass"]
    print(f"total {h.e.value}: pairs {pairs}; binary axioms {all(check_h2(h).values())}; failing {failing or 'none'}")

# A point mass mod 2: value 1 exactly on clopens containing the point 000...
cells = list(cylinders(3))
point = FiniteMeasure(Z2, tuple(cells), tuple(Z2(1 if c.words == ("000",) else 0) for c in cells))


def join(idx):
    out = ZERO
    for i in idx:
        out = out | cells[i]
    return out


# Pairs of values of disjoint non-empty clopens whose union is not everything.
seen = set()
for colours in itertools.product(range(3), repeat=len(cells)):
    a = join(i for i, c in enumerate(colours) if c == 0)
    b = join(i for i, c in enumerate(colours) if c == 1)
    if a.is_zero or b.is_zero or (a | b) == ONE:
        continue
    seen.add((int(point.evaluate(a).value), int(point.evaluate(b).value)))
print("pairs realized by the point mass:", sorted(seen))
