"""Beta integrals over Q_p, over C and on a trace hyperplane."""
from localselberg.fields import LocalFieldDesc
from localselberg.identities import IdentityCase, verify
from localselberg.integrators import ExtComponent, trace_hyperplane_integrate

for p in (2, 3, 5):
    rep = verify(IdentityCase("beta", LocalFieldDesc.Qp(p), a=0.3, b=0.4))
    print(f"Q_{p}: shells {rep.lhs.value.real:.12f}  gamma ratio {rep.rhs.real:.12f}")

rep = verify(IdentityCase("beta", LocalFieldDesc.complex(), a=0.4, b=0.4, samples=200_000, seed=1))
print(f"C:   MC {rep.lhs.value.real:.4f} +- {rep.lhs.mc_sigma:.4f}   closed {rep.rhs.real:.4f}")

# one unramified quadratic extension: the integral over {Tr x = 1}
for p in (3, 5):
    rep = verify(IdentityCase("gen_beta", LocalFieldDesc.Qp(p), comps=((2, 0.2, None),)))
    print(f"E = Q_{p}^2, s = 0.2: {rep.lhs.value.real:.12f} vs {rep.rhs.real:.12f}")

# twisting the trace form by a in E rescales by |a|_E^{-s}
base = trace_hyperplane_integrate(3, [ExtComponent(2, 0.2)]).value
for tw in [(1, 1), (3, 0), (9, 3)]:
    val = trace_hyperplane_integrate(3, [ExtComponent(2, 0.2, tw)]).value
    print(f"twist {tw}: ratio to untwisted {abs(val / base):.10f}")
