"""
Matrices of partial isomorphisms
================================

Value matrices of partial isomorphisms, their cyclic decompositions, joint
targets and the closed-form Rokhlin criteria.
"""

from fractions import Fraction

from homspec.cantor import Clopen
from homspec.coeff import IntVector, ModInt, RatLex, RatVector
from homspec.matrices import (
    CompatMatrix,
    Polycycle,
    bounded_joint_search,
    cyclic_decompose,
    gamma_of,
    is_compatible_matrix,
    joint_polycycle_goodlike,
    joint_target_ring,
    polycycle_convert,
    rokhlin_criterion,
    verify_morphism,
)
from homspec.measure import FiniteMeasure, PartialIso
from homspec.spectrum import Full, Good

Q = RatLex(1)
good = Good(Q, Q(1))

# Swapping two quarters inside a measure with values 1/4, 1/4, 1/2.
mu = FiniteMeasure.build(Q, {"00": "1/4", "01": "1/4", "1": "1/2"})
atoms = [Clopen.of("00"), Clopen.of("01"), Clopen.of("1")]
swap = PartialIso.make(mu, atoms, [atoms[1], atoms[0], atoms[2]])
gamma = gamma_of(swap, mu)
print("gamma:", gamma)
print("compatible:", is_compatible_matrix(gamma, good))

# A dense matrix splits into cycles; the morphism records where each new index came from.
dense = CompatMatrix.from_rows(Q, [["1/8", "1/8", "1/4"], ["1/8", "1/8", None], ["1/4", None, None]])
cyclic, f = cyclic_decompose(dense, good)
print("cycles:", polycycle_convert(cyclic))
print("morphism verified:", verify_morphism(f))

# Two polycycles always have a common refinement over the rationals.
gamma_p = Polycycle.of(Q, [(Fraction(1, 2), 1), (Fraction(1, 4), 2)])
delta_p = Polycycle.of(Q, [(Fraction(1, 3), 3)])
eps, tau, rho = joint_polycycle_goodlike(gamma_p, delta_p, Q(1))
print("joint polycycle:", eps, "legs", tau.mapping, rho.mapping)

# Over the integers the total value decides: 1 is a unit, 2 is not.
Z = IntVector(1)
a = CompatMatrix.from_rows(Z, [[0, 1], [1, -1]])
b = CompatMatrix.from_rows(Z, [[1, 0], [0, 0]])
target, _, _ = joint_target_ring(a, b, Full(Z, Z(1)))
print("ring joint target has", target.dim, "indices")
flip = CompatMatrix.from_rows(Z, [[None, 1], [1, None]])
stay = CompatMatrix.from_rows(Z, [[1, None], [None, 1]])
print("search at total 2:", bounded_joint_search(flip, stay, Full(Z, Z(2)), 4))

print("zd (2,3):", rokhlin_criterion("zd", (2, 3)), " zd (2,4):", rokhlin_criterion("zd", (2, 4)))
for system, e in [(RatVector(2), (0, 0)), (ModInt(3), 1), (ModInt(4), 1)]:
    print(f"filling {system!r} with total {e}:", rokhlin_criterion("filling", e, system))
