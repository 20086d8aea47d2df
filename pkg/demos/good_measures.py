"""
Good measures from spectra
==========================

Build a probability measure on the Cantor space from its spectrum, then look
at equal splittings and at extending a value-preserving partial isomorphism.
"""

from fractions import Fraction

from homspec.cantor import ONE, Clopen
from homspec.coeff import RatLex
from homspec.measure import PartialIso, SynthContext, equi_partition, extend_partial_iso, mu_N, replay, synthesize
from homspec.spectrum import Good, check_axioms

Q = RatLex(1)
good = Good(Q, Q(1))

# The spectrum of the rational good measures: all positive triples adding up to 1.
report = check_axioms(good, bound=100)
print("axioms:", report.overall)
for result in report.results:
    print(f"  {result.axiom:5} {result.verdict:10} witnesses={result.witnesses}")

# Synthesis refines cylinders level by level and logs every step.
mu, log = synthesize(good, 3, realize_pairs=3)
print("atoms:", len(mu.atoms))
print("values:", sorted({str(v.value[0]) for v in mu.values}))
assert replay(log) == mu

# Cut the left half into three parts of equal value.
ctx = SynthContext(good, mu, log)
thirds = equi_partition(ctx, Clopen.of("0"), 3)
print("common value of the thirds:", thirds.common)

# mu_N is the atomwise value of such splittings.
half = mu_N(SynthContext(good, mu), 2)
print("mu_2 on the first atom:", half.values[0], "versus", mu.values[0])

# Back and forth: start from the identity on the whole space and add clopens
# alternately on each side.
phi = PartialIso.make(ctx.measure, [ONE], [ONE])
for step, word in enumerate(["01", "110", "0011", "10"]):
    side = "source" if step % 2 == 0 else "target"
    phi = extend_partial_iso(ctx, phi, Clopen.of(word), side=side)
    print(f"after {side:6} {word:5}: {len(phi.source)} atoms, values preserved: {phi.preserves_values(ctx.measure)}")

scale = Fraction(1, 2)
print("scaling check:", all(x.scale(scale) == y for x, y in zip(mu.values, half.values)))
