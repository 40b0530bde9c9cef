"""Built-in batches of identity cases."""
from __future__ import annotations

from fractions import Fraction

from .fields import LocalFieldDesc
from .identities import IdentityCase

GAMMA_QD = ((2, 1), (3, 1), (5, 1), (3, 2), (5, 2), (3, 3))  # (p, f) for q = 2, 3, 5, 9, 25, 27
S_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


def _qp(p: int) -> LocalFieldDesc:
    return LocalFieldDesc.Qp(p)


def desk_suite(seed: int = 0) -> list[IdentityCase]:
    """Every numeric acceptance case, in a fixed order with fixed seeds."""
    cases: list[IdentityCase] = []
    for p, f in GAMMA_QD:
        for d in (0, 1, 2):
            fld = LocalFieldDesc.extension(p, f, d)
            for s in S_GRID:
                cases.append(IdentityCase("gamma_integral", fld, a=s,
                                          case_id=f"gamma-q{p**f}-d{d}-s{s}"))
    for p in (2, 5):
        for a, b in ((0.3, 0.4), (0.2, 0.2)):
            cases.append(IdentityCase("beta", _qp(p), a=a, b=b, case_id=f"beta-Q{p}-{a}-{b}"))
    for p in (3, 5):
        cases.append(IdentityCase("gen_beta", _qp(p), comps=((2, 0.2, None),),
                                  case_id=f"genbeta-Q{p}^2-0.2"))
    cases.append(IdentityCase("gen_beta", _qp(3), comps=((2, 0.2, (2, 1)),),
                              case_id="genbeta-Q3^2-0.2-twisted"))
    cases.append(IdentityCase("prop1", _qp(3), a=0.3, G=(Fraction(0), Fraction(1)),
                              case_id="prop1-Q3-x2+1"))
    cases.append(IdentityCase("prop2", _qp(5), a=0.25, b=0.25, c=0.1, G=(Fraction(-2),),
                              case_id="prop2-Q5-x-2"))
    for p in (3, 5):
        for a, b, c in ((0.25, 0.25, 0.1), (0.2, 0.3, 0.08)):
            cases.append(IdentityCase("theorem", _qp(p), a=a, b=b, c=c, n=2,
                                      case_id=f"theorem-n2-Q{p}-{a}-{b}-{c}"))
    cases.append(IdentityCase("recursion", _qp(5), a=0.25, b=0.25, c=0.1, n=2,
                              case_id="recursion-n2-Q5"))
    cases.append(IdentityCase("theorem", _qp(5), a=0.15, b=0.15, c=0.05, n=3, seed=seed,
                              samples=1_000_000, case_id="theorem-n3-Q5-mc"))
    C = LocalFieldDesc.complex()
    cases.append(IdentityCase("beta", C, a=0.4, b=0.4, seed=seed + 1, samples=1_000_000,
                              case_id="beta-C-0.4-0.4"))
    cases.append(IdentityCase("complex_aomoto", C, a=0.3, b=0.3, c=0.05, n=2, seed=seed + 2,
                              samples=4_000_000, case_id="aomoto-C-n2"))
    for j in ((2, 2, 1), (2, 2, 3)):
        cases.append(IdentityCase("ff_selberg", LocalFieldDesc.finite(5), a=j[0], b=j[1], c=j[2],
                                  n=2, case_id=f"ff-F5-n2-{j}"))
    cases.append(IdentityCase("ff_selberg", LocalFieldDesc.finite(7), a=2, b=3, c=1, n=3,
                              case_id="ff-F7-n3-(2, 3, 1)"))
    return cases


def smoke_suite(seed: int = 0) -> list[IdentityCase]:
    """A few seconds' worth of cases touching every backend."""
    keep = {"gamma-q3-d0-s0.5", "beta-Q2-0.3-0.4", "genbeta-Q3^2-0.2", "prop1-Q3-x2+1",
            "theorem-n2-Q3-0.25-0.25-0.1", "ff-F5-n2-(2, 2, 1)"}
    out = [c for c in desk_suite(seed) if c.case_id in keep]
    out.append(IdentityCase("beta", LocalFieldDesc.complex(), a=0.4, b=0.4, seed=seed + 1,
                            samples=20_000, case_id="beta-C-small"))
    return out


SUITES = {"desk": desk_suite, "smoke": smoke_suite}
