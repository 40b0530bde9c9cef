"""Gamma factors of unramified characters, two ways each.

On a p-adic field the closed form is compared with the shell-by-shell sum
of psi(x)|x|^{s-1}.  Over C the sine form and the reflection form are
evaluated side by side.
"""
from localselberg.characters import gamma_complex, gamma_padic, gamma_via_integral
from localselberg.fields import LocalFieldDesc

print("p-adic: closed form vs shell sum")
for p, f, d in [(3, 1, 0), (5, 1, 0), (3, 2, 1), (5, 2, 2)]:
    fld = LocalFieldDesc.extension(p, f, d)
    for s in (0.2, 0.5, 0.8):
        g, o = gamma_padic(fld, s), gamma_via_integral(fld, s)
        print(f"  q={fld.q:3d} d={d} s={s}:  {g.real:+.12f}  {o.real:+.12f}  diff {abs(g - o):.1e}")

# Gamma(s) Gamma(1-s) = 1 once the character is unramified
Q7 = LocalFieldDesc.Qp(7)
print("\nfunctional equation on Q_7:", abs(gamma_padic(Q7, 0.3) * gamma_padic(Q7, 0.7)))

print("\ncomplex gamma (both closed forms agree internally):")
for s in (0.1, 0.25, 0.5, 0.75):
    print(f"  s={s}: {gamma_complex(s).real:+.12f}")
