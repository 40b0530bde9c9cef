"""Selberg integrals over Q_p for n = 2 and n = 3.

n = 2 uses the folded cell engine, which needs no tail.  n = 3 splits the
space by where the roots reduce and samples the annuli; a short run is
enough to see agreement with the gamma product.
"""
import time
from fractions import Fraction

from localselberg.fields import LocalFieldDesc
from localselberg.identities import rhs_theorem, selberg_padic_n2
from localselberg.polylab import MonicPoly, splitting_type_padic
from localselberg.stratified import selberg_padic_exact, selberg_padic_mc

print("splitting types over Q_5:")
for low in [(-5, 0), (-2, 0), (-5, 0, 0), (-2, 0, 0), (1, 1, 0)]:
    f = MonicPoly(tuple(Fraction(x) for x in reversed(low)))
    print(f"  coeffs {low}: {splitting_type_padic(f, 5).label}")

for p in (3, 5, 7):
    fld = LocalFieldDesc.Qp(p)
    lhs = selberg_padic_n2(p, 0.25, 0.25, 0.1).value
    print(f"n=2 Q_{p}: cells {lhs.real:.12f}  gamma product {rhs_theorem(0.25, 0.25, 0.1, 2, fld).real:.12f}")

fld = LocalFieldDesc.Qp(5)
rhs = rhs_theorem(0.15, 0.15, 0.05, 3, fld).real
print(f"\nn=3 Q_5 gamma product        {rhs:.8f}")
print(f"n=3 exact cluster annuli     {selberg_padic_exact(5, 0.15, 0.15, 0.05, 3).value.real:.8f}")
t = time.time()
est = selberg_padic_mc(5, 0.15, 0.15, 0.05, 3, N=30_000, seed=2)
print(f"n=3 sampled annuli (N=3e4)   {est.value.real:.8f} +- {est.mc_sigma:.8f}  ({time.time() - t:.0f} s)")
