"""Gauss sums and the finite-field Selberg sum."""
import itertools
import math

from localselberg.characters import QuasiCharacter, gauss_sum, hasse_davenport_sides
from localselberg.errors import PoleError
from localselberg.fields import LocalFieldDesc
from localselberg.identities import _rhs_ff, lhs_ff_selberg

F7 = LocalFieldDesc.finite(7)
print("|g(chi_j)| on F_7:", [round(abs(gauss_sum(QuasiCharacter.finite(F7, j))), 12)
                             for j in range(1, 6)], "sqrt 7 =", round(math.sqrt(7), 12))

lhs, rhs = hasse_davenport_sides(5, 1, 2, 1)
print(f"Hasse-Davenport on F_25 / F_5, j=1: {lhs:.6f} vs {rhs:.6f}")

# every admissible character triple on F_5, n = 2, against the Gauss-sum product
F5 = LocalFieldDesc.finite(5)
for j in itertools.product(range(4), repeat=3):
    try:
        r = _rhs_ff(*j, 2, F5)
    except PoleError:
        continue
    print(f"indices {j}: sum {lhs_ff_selberg(*j, 2, F5):.6f}  product {r:.6f}")
