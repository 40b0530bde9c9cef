"""Closed-form right-hand sides, left-hand-side drivers and the comparator.

Every identity compares a numerically integrated left side with a product
of gamma factors.  The drivers pick an engine per backend: exact shell
sums in one p-adic variable, certified cell summation plus a fitted tail
in two, stratified Monte Carlo beyond that, importance sampling over C^n
and exhaustive enumeration over F_q.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .characters import (
    QuasiCharacter,
    _chi_table,
    gamma_ext,
    gamma_for,
    gamma_padic,
    gamma_via_integral,
    gauss_sum,
)
from .errors import PoleError, RegionError, SingularInput
from .fields import GF, LocalFieldDesc, vp
from .integrators import (
    Cell,
    CellIntegrand,
    ExtComponent,
    FactorLaw,
    IntegralEstimate,
    MPoly,
    beta_shell_integral,
    complex_mc_integrate,
    ff_enumerate_sum,
    integrate_cells,
    padic_full_integrate,
    padic_line_integrate,
    selberg_sampler,
    trace_hyperplane_integrate,
)
from .polylab import MonicPoly, discriminant, resultant, splitting_type_padic

IDENTITIES = (
    "gamma_integral", "beta", "gen_beta", "prop1", "prop2",
    "theorem", "recursion", "complex_aomoto", "ff_selberg",
)


# --------------------------------------------------------------------------
# cases and reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCase:
    """One identity instance.

    ``a``, ``b``, ``c`` are exponents of unramified characters |.|^s on
    p-adic and complex backends, and character indices on F_q.  ``G`` is
    the fixed polynomial of prop1/prop2 as low-degree coefficients of a
    monic polynomial (b_{k-1}, ..., b_0).  ``comps`` lists (m, s, twist)
    for gen_beta.  ``engine`` carries per-engine overrides.
    """

    identity: str
    field: LocalFieldDesc
    a: complex = 0.0
    b: complex = 0.0
    c: complex = 0.0
    n: int = 1
    G: tuple | None = None
    comps: tuple = ()
    seed: int = 0
    samples: int = 0
    engine: dict = field(default_factory=dict, hash=False, compare=False)
    case_id: str = ""

    def __post_init__(self):
        if self.identity not in IDENTITIES:
            raise ValueError(f"unknown identity {self.identity!r}")

    @property
    def backend(self) -> str:
        fld = self.field
        if fld.kind == "complex":
            return "C"
        if fld.kind == "finite":
            return f"F_{fld.q}"
        return f"Q_{fld.p}" if fld.f == 1 and fld.d == 0 else f"E(q={fld.q},d={fld.d})"

    def params(self) -> dict:
        out = {"n": self.n}
        if self.field.kind == "finite":
            out.update(a=int(self.a.real), b=int(self.b.real), c=int(self.c.real))
        else:
            for k in "abc":
                z = complex(getattr(self, k))
                out[k] = z.real if z.imag == 0 else [z.real, z.imag]
        if self.G is not None:
            out["G"] = [str(x) for x in self.G]
        if self.comps:
            out["comps"] = [[m, complex(s).real, list(t) if t else None] for m, s, t in self.comps]
        return out


@dataclass(frozen=True)
class VerificationReport:
    case: IdentityCase
    lhs: IntegralEstimate
    rhs: complex
    abs_dev: float
    rel_dev: float
    sigma_dist: float
    passed: bool
    gate: float
    floor: float
    runtime_ms: float
    engine: str
    extra: dict = field(default_factory=dict)

    @property
    def allowed(self) -> float:
        e = self.lhs
        return e.cert_err + e.tail_bound + self.gate * e.mc_sigma + self.floor


# --------------------------------------------------------------------------
# region checks
# --------------------------------------------------------------------------


def _re(z) -> float:
    return complex(z).real


def check_region(case: IdentityCase) -> None:
    """Raise RegionError when the case lies outside its convergence region."""
    a, b, c, n = _re(case.a), _re(case.b), _re(case.c), case.n
    ident = case.identity
    if case.field.kind == "finite":
        if ident != "ff_selberg":
            raise RegionError(f"{ident} is not defined over a finite field")
        if n < 1:
            raise RegionError("n must be positive")
        return
    if ident == "ff_selberg":
        raise RegionError("ff_selberg needs a finite field")
    if ident == "gamma_integral":
        if not 0 < a < 1:
            raise RegionError(f"gamma integral needs 0 < Re s < 1, got {a}")
    elif ident == "beta":
        if not (a > 0 and b > 0 and a + b < 1):
            raise RegionError(f"beta needs Re a, Re b > 0 and Re a + Re b < 1, got ({a}, {b})")
    elif ident == "gen_beta":
        if not case.comps:
            raise RegionError("gen_beta needs at least one component")
        tot = sum(m * _re(s) for m, s, _ in case.comps)
        if any(_re(s) <= 0 for _, s, _ in case.comps) or not tot < 1:
            raise RegionError(f"gen_beta needs Re s_i > 0 and sum m_i Re s_i < 1, got {tot}")
    elif ident == "prop1":
        if case.G is None:
            raise RegionError("prop1 needs G")
        k = len(case.G)
        if not 0 < k * a < 1:
            raise RegionError(f"prop1 needs 0 < n Re chi < 1, got {k * a}")
    elif ident == "prop2":
        if case.G is None:
            raise RegionError("prop2 needs G")
        k = len(case.G) + 1
        if not (a > 0 and b > 0 and c > 0 and a + b + (k - 1) * c < 1):
            raise RegionError("prop2 needs Re a, Re b, Re c > 0 and Re a + Re b + (n-1) Re c < 1")
    elif ident in ("theorem", "recursion", "complex_aomoto"):
        if n < 1 or (ident == "recursion" and n < 2):
            raise RegionError(f"n = {n} not allowed for {ident}")
        c_ok = c > 0 or (n == 1 and c == 0)
        if not (a > 0 and b > 0 and c_ok and a + b + 2 * (n - 1) * c < 1):
            raise RegionError(
                f"({a}, {b}, {c}) outside R_{n}: need positive parts and a + b + 2(n-1)c < 1"
            )
        if ident == "complex_aomoto" and case.field.kind != "complex":
            raise RegionError("complex_aomoto needs the complex backend")
    if case.field.kind == "padic" and ident in ("theorem", "recursion", "prop1", "prop2"):
        deg = n if ident in ("theorem", "recursion") else len(case.G or ())
        if case.field.p <= max(deg, 1):
            raise RegionError(f"p = {case.field.p} is wild for degree {deg}")


# --------------------------------------------------------------------------
# integrands
# --------------------------------------------------------------------------


def correction_factor(f: MonicPoly, fld: LocalFieldDesc, c) -> complex:
    """prod_h Gamma_h(c) / Gamma(c)^{deg h} over the irreducible factors of f.

    Trivial over C.  Over F_q it equals eta(Delta(f)), eta the quadratic
    character, once gamma factors are normalised as g(chi)/sqrt(q).
    """
    if fld.kind == "complex":
        return 1.0
    if fld.kind == "finite":
        F = GF.get(fld.p, fld.f)
        D = _ff_disc(F, [x.value if hasattr(x, "value") else int(x) for x in f.coeffs])
        return complex(_chi_table(fld.p, fld.f, (fld.q - 1) // 2)[D]) if fld.q % 2 else 1.0
    if fld.f != 1 or fld.d != 0:
        raise NotImplementedError("splitting types are computed over Q_p only")
    st = splitting_type_padic(f, fld.p)
    g1 = gamma_padic(fld, c)
    val = 1.0 + 0j
    for t in st.factors:
        val *= gamma_ext((t.e, t.f, t.d), fld, c) / g1**t.deg
    return val


def _abs(x, fld: LocalFieldDesc) -> float:
    if fld.kind == "complex":
        return abs(complex(x)) ** 2
    v = vp(Fraction(x), fld.p)
    if v == math.inf:
        raise SingularInput("zero argument")
    return float(fld.p) ** (-v)


def selberg_integrand(f: MonicPoly, a, b, c, fld: LocalFieldDesc) -> complex:
    """Point value of the Selberg integrand at the monic polynomial f.

    p-adic and complex: |f(0)|^{a-1} |f(1)|^{b-1} |Delta|^{c-1/2} times the
    splitting-type correction.  F_q: alpha(f(0)) beta(f(1)) (gamma eta)(Delta)
    with a, b, c character indices.
    """
    if fld.kind == "finite":
        F = GF.get(fld.p, fld.f)
        co = [x.value if hasattr(x, "value") else int(x) for x in f.coeffs]
        f0 = co[-1]
        f1 = 1
        for x in co:
            f1 = F.add(f1, x)
        D = _ff_disc(F, co)
        eta = (fld.q - 1) // 2 if fld.q % 2 else 0
        ta = _chi_table(fld.p, fld.f, int(a))
        tb = _chi_table(fld.p, fld.f, int(b))
        tc = _chi_table(fld.p, fld.f, int(c) + eta)
        return complex(ta[f0] * tb[f1] * tc[D])
    f0, f1, D = f(0), f(1), discriminant(f)
    for name, x in (("f(0)", f0), ("f(1)", f1), ("Delta", D)):
        if x == 0:
            raise SingularInput(f"{name} vanishes")
    val = _abs(f0, fld) ** (complex(a) - 1) * _abs(f1, fld) ** (complex(b) - 1)
    val *= _abs(D, fld) ** (complex(c) - 0.5)
    return complex(val * correction_factor(f, fld, c))


# --------------------------------------------------------------------------
# right-hand sides
# --------------------------------------------------------------------------


def _G(fld: LocalFieldDesc, s) -> complex:
    try:
        return gamma_for(fld, s)
    except PoleError as e:
        raise PoleError(f"Gamma({complex(s).real:g}{complex(s).imag:+g}j): {e}") from None


def rhs_beta(a, b, fld: LocalFieldDesc) -> complex:
    """Gamma(a) Gamma(b) / Gamma(a + b)."""
    return _G(fld, a) * _G(fld, b) / _G(fld, complex(a) + complex(b))


def rhs_theorem(a, b, c, n: int, fld: LocalFieldDesc) -> complex:
    """prod_{j<n} Gamma(a+jc) Gamma(b+jc) Gamma((j+1)c) / (Gamma(a+b+(n+j-1)c) Gamma(c)).

    For n = 1 the Gamma(c) factors cancel and the beta ratio is returned
    through :func:`rhs_beta` itself.  Over F_q, a, b, c are character
    indices and Gamma is the plain Gauss sum.
    """
    if fld.kind == "finite":
        return _rhs_ff(int(a), int(b), int(c), n, fld)
    if n == 1:
        return rhs_beta(a, b, fld)
    a, b, c = complex(a), complex(b), complex(c)
    val = 1.0 + 0j
    gc = _G(fld, c)
    for j in range(n):
        num = _G(fld, a + j * c) * _G(fld, b + j * c) * _G(fld, (j + 1) * c)
        val *= num / (_G(fld, a + b + (n + j - 1) * c) * gc)
    return val


def _rhs_ff(ja: int, jb: int, jc: int, n: int, fld: LocalFieldDesc) -> complex:
    m = fld.q - 1

    def g(j):
        j %= m
        if j == 0:
            raise PoleError("trivial character inside the Gauss-sum product")
        return gauss_sum(QuasiCharacter.finite(fld, j))

    val = 1.0 + 0j
    for j in range(n):
        val *= g(ja + j * jc) * g(jb + j * jc) * g((j + 1) * jc)
        val /= g(ja + jb + (n + j - 1) * jc) * g(jc)
    return val


def _factor_gammas(G: MonicPoly, fld: LocalFieldDesc, s) -> complex:
    """prod_i Gamma_{g_i}(s) over the irreducible factors of G."""
    if fld.kind == "complex":
        return _G(fld, s) ** G.degree
    st = splitting_type_padic(G, fld.p)
    val = 1.0 + 0j
    for t in st.factors:
        val *= gamma_ext((t.e, t.f, t.d), fld, s)
    return val


def _as_monic(G) -> MonicPoly:
    return G if isinstance(G, MonicPoly) else MonicPoly(tuple(Fraction(x) for x in G))


def rhs_prop1(G, s, fld: LocalFieldDesc) -> complex:
    """|Delta(G)|^{-1/2} |R(G, G')|^s prod Gamma_{g_i}(s) / Gamma(k s), k = deg G."""
    G = _as_monic(G)
    k = G.degree
    D = discriminant(G)
    R = resultant(G, G.derivative())
    if D == 0:
        raise SingularInput("G is not squarefree")
    s = complex(s)
    val = _abs(D, fld) ** -0.5 * _abs(R, fld) ** s
    return val * _factor_gammas(G, fld, s) / _G(fld, k * s)


def rhs_prop2(G, a, b, c, fld: LocalFieldDesc) -> complex:
    """The fixed-G closed form with the alpha(-1) sign (1 for unramified alpha)."""
    G = _as_monic(G)
    k = G.degree
    n = k + 1
    G0, G1 = G(0), G(1)
    if G0 == 0 or G1 == 0:
        raise SingularInput("prop2 needs G(0) G(1) != 0")
    D = discriminant(G)
    if D == 0:
        raise SingularInput("G is not squarefree")
    R = resultant(G, G.derivative())
    a, b, c = complex(a), complex(b), complex(c)
    val = _abs(D, fld) ** -0.5
    val *= _abs(G0, fld) ** (a + c - 1) * _abs(G1, fld) ** (b + c - 1) * _abs(R, fld) ** c
    val *= _G(fld, a) * _G(fld, b) * _factor_gammas(G, fld, c)
    return val / _G(fld, a + b + (n - 1) * c)


def rhs_gen_beta(comps: Sequence[ExtComponent], base: LocalFieldDesc) -> complex:
    """prod Gamma_{E_i}(c_i) / Gamma(c) * prod c_i(a_i^{-1}), c = prod c_i restricted to F."""
    p = base.p
    val = 1.0 + 0j
    tot = 0j
    for comp in comps:
        ext = LocalFieldDesc.extension(p, comp.m, 0)
        val *= gamma_padic(ext, comp.s)
        tot += comp.m * comp.s
        if comp.twist is not None:
            val *= twist_norm_abs(p, comp) ** (-comp.s)
    return val / gamma_padic(base, tot)


def twist_norm_abs(p: int, comp: ExtComponent) -> float:
    """|a|_E for the twist a of an unramified component, via its norm."""
    from .integrators import _mult_matrix
    from .polylab import bareiss_det

    N = bareiss_det(_mult_matrix(p, comp.m, [Fraction(x) for x in comp.twist]))
    return float(p) ** (-vp(N, p))


# --------------------------------------------------------------------------
# p-adic left-hand sides
# --------------------------------------------------------------------------


def delta_weights(p: int, c) -> dict:
    """Correction factor of a monic quadratic, keyed by the class of its discriminant.

    The table is filled by classifying x^2 - D/4 for a representative D of
    each (valuation parity, unit residue) class.
    """
    fld = LocalFieldDesc.Qp(p)
    out = {}
    for parity in (0, 1):
        for u in range(1, p):
            D = Fraction(u * p**parity)
            out[(parity, u)] = correction_factor(MonicPoly((Fraction(0), -D / 4)), fld, c)
    return out


def _quadratic_polys(nv: int = 2):
    b1, b0 = MPoly.var(nv, 0), MPoly.var(nv, 1)
    one = MPoly.const(nv, 1)
    return b0, one + b1 + b0, b1 * b1 - b0 * 4


def _reduced_selfsim(p: int, e: complex, c: complex, wD: dict, depth: int) -> list:
    """Cell integrals J(u) over (u + pZ_p) x Z_p of |b0|^{e} |Delta|^{c-1/2} w(Delta).

    The only point where b0 and Delta both vanish is the origin, and the
    box p Z_p x p^2 Z_p is a scaled copy of Z_p^2 with ratio p^{-2e-2c-2}.
    That linear relation closes J(0) in terms of the other cells.
    """
    f0, _, D = _quadratic_polys()
    f = CellIntegrand(p, 2, [(f0, FactorLaw(p, e)), (D, FactorLaw(p, c - 0.5, wD))])
    pf = Fraction(p)
    J = [0j] * p
    err = 0.0
    for u in range(1, p):
        acc = integrate_cells(f, [Cell((Fraction(u), Fraction(w)), (1, 1)) for w in range(p)],
                              max_depth=depth)
        J[u] = acc.value
        err += acc.cert_err
    roots = [Cell((Fraction(0), Fraction(w)), (1, 1)) for w in range(1, p)]
    roots += [Cell((pf * u, pf * w), (2, 2)) for u in range(p) for w in range(1, p)]
    acc = integrate_cells(f, roots, max_depth=depth)
    err += acc.cert_err
    rho = float(p) ** (-2 * e - 2 * c - 2)
    total = (acc.value + sum(J[1:])) / (1 - rho)
    J[0] = acc.value + rho * total
    return J, err / abs(1 - rho)


def selberg_cell_integrand_n2(
    p: int, a, b, c, depth: int = 12, weights: dict | None = None
) -> tuple[CellIntegrand, float]:
    """Cell integrand of S_2 over Q_p with exact hooks at x^2 and (x-1)^2.

    Near the double root at 0 the integrand is self-similar under
    (b1, b0) -> (p b1, p^2 b0); level-(2,2) cells around it get the
    rescaled value rho J(u).  The point (x-1)^2 is mapped there by
    x -> 1 - x, which swaps the roles of a and b.  ``weights`` replaces
    the correction table keyed by the class of Delta.
    """
    a, b, c = complex(a), complex(b), complex(c)
    wD = weights if weights is not None else delta_weights(p, c)
    f0, f1, D = _quadratic_polys()
    f = CellIntegrand(p, 2, [
        (f0, FactorLaw(p, a - 1)), (f1, FactorLaw(p, b - 1)), (D, FactorLaw(p, c - 0.5, wD)),
    ])
    Ja, ea = _reduced_selfsim(p, a - 1, c, wD, depth)
    Jb, eb = _reduced_selfsim(p, b - 1, c, wD, depth)
    rho_a = float(p) ** (-2 * a - 2 * c)
    rho_b = float(p) ** (-2 * b - 2 * c)
    p2 = p * p

    def hook(cell: Cell):
        if cell.levels != (2, 2):
            return None
        c1, c0 = cell.center
        if vp(c0, p) >= 2 and vp(c1, p) >= 1:
            u = int(c1 / p) % p
            return rho_a * Ja[u]
        if vp(c1 + 2, p) >= 1 and vp(1 + c1 + c0, p) >= 2:
            u = int((c1 + 2) / p) % p
            return rho_b * Jb[(-u) % p]
        return None

    f.hook = hook
    # each hooked cell inherits the certified error of the reduced integrals
    hook_err = (p - 1) * p * (abs(rho_a) * ea + abs(rho_b) * eb) / p2
    return f, hook_err


def selberg_padic_n2(p: int, a, b, c, depth: int = 12, weights: dict | None = None) -> IntegralEstimate:
    """S_2(a, b, c) over Q_p as four certified integrals over subsets of Z_p^2.

    f -> x^2 f(1/x) / f(0) carries the integrand with exponents (a, b) to
    the one with (a', b), a' = 1 - a - b - 2c, with matching measures, and
    x -> 1 - x swaps a and b.  Polynomials with a root outside Z_p are
    therefore folded back: both roots large onto f = x^2 mod p, one large
    root and one unit root onto f = x(x - u), and one large root and one
    root in pZ_p onto f = x(x - 1) with exponents (a', a).
    """
    a, b, c = complex(a), complex(b), complex(c)
    a2 = 1 - a - b - 2 * c
    pf = Fraction(p)
    pieces = [
        ((a, b), [Cell((Fraction(0), Fraction(0)), (0, 0))]),
        ((a2, b), [Cell((pf * 0, pf * 0), (1, 1))]),
        ((a2, b), [Cell((Fraction(u), Fraction(0)), (1, 1)) for u in range(1, p)]),
        ((a2, a), [Cell((Fraction(-1), Fraction(0)), (1, 1))]),
    ]
    total = IntegralEstimate(0j)
    for (x, y), roots in pieces:
        f, herr = selberg_cell_integrand_n2(p, x, y, c, depth=depth, weights=weights)
        acc = integrate_cells(f, roots, max_depth=depth)
        total = total + IntegralEstimate(acc.value, acc.cert_err + herr, strata=acc.strata,
                                         uncertified_mass=acc.uncertified)
    return total


def selberg_padic_n2_shells(p: int, a, b, c, depth: int = 12, **kw) -> IntegralEstimate:
    """Same integral by plain box shells plus a fitted geometric tail (slow; cross-check)."""
    f, herr = selberg_cell_integrand_n2(p, a, b, c, depth=depth)
    est = padic_full_integrate(f, depth=depth, **kw)
    est.cert_err += herr
    return est


def _ff_disc(F: GF, coeffs: Sequence[int]) -> int:
    if len(coeffs) == 1:
        return 1
    return discriminant(MonicPoly(tuple(F(int(x)) for x in coeffs))).value


# --------------------------------------------------------------------------
# fixed-G integrands
# --------------------------------------------------------------------------


def _monic_mpoly(nv: int) -> list:
    """Coefficient list (high first) of the generic monic polynomial in nv variables."""
    return [MPoly.const(nv, 1)] + [MPoly.var(nv, j) for j in range(nv)]


def _resultant_mpoly(G: MonicPoly, f_full: list, nv: int) -> MPoly:
    """R(G, f) = prod_{G(r)=0} f(r) with f given by MPoly coefficients."""
    from .integrators import _det_poly

    g = [MPoly.const(nv, Fraction(x)) for x in G.full()]
    zero = MPoly.const(nv, 0)
    if len(f_full) == 1:
        return f_full[0] ** G.degree
    rows = []
    n, m = len(g) - 1, len(f_full) - 1
    for i in range(m):
        rows.append([zero] * i + g + [zero] * (m - 1 - i))
    for i in range(n):
        rows.append([zero] * i + f_full + [zero] * (n - 1 - i))
    return _det_poly(rows)


def prop1_integrand(G: MonicPoly, s, p: int) -> CellIntegrand:
    """|R(G, f)|^{s-1} on monic f of degree deg G - 1."""
    nv = G.degree - 1
    R = _resultant_mpoly(G, _monic_mpoly(nv), nv)
    return CellIntegrand(p, nv, [(R, FactorLaw(p, complex(s) - 1))])


def prop2_integrand(G: MonicPoly, a, b, c, p: int) -> CellIntegrand:
    """|f(0)|^{a-1} |f(1)|^{b-1} |R(G, f)|^{c-1} on monic f of degree deg G + 1."""
    nv = G.degree + 1
    full = _monic_mpoly(nv)
    f0 = full[-1]
    f1 = MPoly.const(nv, 0)
    for x in full:
        f1 = f1 + x
    R = _resultant_mpoly(G, full, nv)
    a, b, c = complex(a), complex(b), complex(c)
    return CellIntegrand(p, nv, [
        (f0, FactorLaw(p, a - 1)), (f1, FactorLaw(p, b - 1)), (R, FactorLaw(p, c - 1)),
    ])


def _integrate_padic(f: CellIntegrand, outer_exponent, settings: dict) -> IntegralEstimate:
    if f.nvars == 0:
        return IntegralEstimate(f.point_value([]))
    if f.nvars == 1:
        return padic_line_integrate(f, outer_exponent, depth=settings.get("depth", 40))
    keys = ("max_shell", "tol", "min_shell", "safety", "depth", "max_cells")
    return padic_full_integrate(f, **{k: settings[k] for k in keys if k in settings})


def lhs_prop1(G, s, fld: LocalFieldDesc, settings: dict | None = None) -> IntegralEstimate:
    G = _as_monic(G)
    f = prop1_integrand(G, s, fld.p)
    return _integrate_padic(f, G.degree * (complex(s) - 1), settings or {})


def lhs_prop2(G, a, b, c, fld: LocalFieldDesc, settings: dict | None = None) -> IntegralEstimate:
    G = _as_monic(G)
    f = prop2_integrand(G, a, b, c, fld.p)
    return _integrate_padic(f, None, settings or {"tol": 1e-11, "max_shell": 80})


# --------------------------------------------------------------------------
# theorem drivers
# --------------------------------------------------------------------------


def lhs_beta_padic(a, b, fld: LocalFieldDesc) -> IntegralEstimate:
    return IntegralEstimate(beta_shell_integral(fld.q, complex(a), complex(b)))


def lhs_theorem_n1_padic(a, b, p: int) -> IntegralEstimate:
    """S_1 on the line f = x + t with the cell engine and an exact outer sum."""
    t = MPoly.var(1, 0)
    f = CellIntegrand(p, 1, [(t, FactorLaw(p, complex(a) - 1)),
                             (t + 1, FactorLaw(p, complex(b) - 1))])
    return padic_line_integrate(f, complex(a) + complex(b) - 2)


def complex_root_integral(a, b, c, n: int, N: int, seed: int) -> IntegralEstimate:
    """int_{C^n} prod |z_i|^{2a-2} |1-z_i|^{2b-2} prod_{i<j} |z_i-z_j|^{4c}, self-dual measure."""
    a, b, c = float(complex(a).real), float(complex(b).real), float(complex(c).real)

    def logf(Z):
        out = (2 * a - 2) * np.log(np.abs(Z)).sum(axis=1)
        out += (2 * b - 2) * np.log(np.abs(1 - Z)).sum(axis=1)
        for i in range(n):
            for j in range(i + 1, n):
                out += 4 * c * np.log(np.abs(Z[:, i] - Z[:, j]))
        return out

    return complex_mc_integrate(logf, n, selberg_sampler(a, b, c, n), N, seed=seed)


def rhs_complex_aomoto(a, b, c, n: int) -> complex:
    """n! times the gamma product over C, checked against the sine form."""
    fld = LocalFieldDesc.complex()
    val = math.factorial(n) * rhs_theorem(a, b, c, n, fld)
    sine = complex_sine_form(a, b, c, n)
    if abs(val - sine) > 1e-9 * abs(val):
        raise ArithmeticError(f"gamma and sine forms disagree: {val} vs {sine}")
    return val


def classical_selberg(a, b, c, n: int) -> float:
    """int_{[0,1]^n} prod t^{a-1} (1-t)^{b-1} prod_{i<j} |t_i - t_j|^{2c} as a gamma product."""
    from scipy.special import gammaln

    lg = 0.0
    for j in range(n):
        lg += gammaln(a + j * c) + gammaln(b + j * c) + gammaln(1 + (j + 1) * c)
        lg -= gammaln(a + b + (n + j - 1) * c) + gammaln(1 + c)
    return math.exp(lg)


def complex_sine_form(a, b, c, n: int) -> float:
    a, b, c = (float(complex(x).real) for x in (a, b, c))
    num, den = 1.0, float(math.factorial(n))
    for j in range(n):
        num *= 2 * math.sin(math.pi * (a + j * c)) * math.sin(math.pi * (b + j * c))
        # sin(pi (j+1) c) / sin(pi c) tends to j + 1 as c -> 0
        num *= math.sin(math.pi * (j + 1) * c) / math.sin(math.pi * c) if c else j + 1
        den *= math.sin(math.pi * (a + b + (n + j - 1) * c))
    return num / den * classical_selberg(a, b, c, n) ** 2


def lhs_theorem(case: IdentityCase) -> tuple[IntegralEstimate, str]:
    fld, n = case.field, case.n
    a, b, c = case.a, case.b, case.c
    if fld.kind == "complex":
        N = case.samples or 1_000_000
        est = complex_root_integral(a, b, c, n, N, case.seed)
        return est.scaled(1 / math.factorial(n)), "complex-mc"
    if fld.f != 1 or fld.d != 0:
        raise NotImplementedError("theorem LHS is implemented over Q_p")
    p = fld.p
    if n == 1:
        return lhs_theorem_n1_padic(a, b, p), "padic-line"
    if n == 2:
        return selberg_padic_n2(p, a, b, c, depth=case.engine.get("depth", 12)), "padic-cells"
    from .stratified import selberg_padic_mc

    N = case.samples or 1_000_000
    return selberg_padic_mc(p, a, b, c, n, N, seed=case.seed, **case.engine), "padic-mc"


# --------------------------------------------------------------------------
# finite fields
# --------------------------------------------------------------------------


def lhs_ff_selberg(ja: int, jb: int, jc: int, n: int, fld: LocalFieldDesc,
                   budget: int = 10**7) -> complex:
    """alpha^n(-1) * sum over all monic f of degree n of the integrand (counting measure)."""
    F = GF.get(fld.p, fld.f)
    q = fld.q

    def summand(rows):
        return np.array([selberg_integrand(MonicPoly(tuple(F(int(x)) for x in r)), ja, jb, jc, fld)
                         for r in rows])

    total = ff_enumerate_sum(summand, q, n, budget=budget)
    sign = _chi_table(fld.p, fld.f, ja * n)[F.neg(1)]
    return complex(sign * total)


# --------------------------------------------------------------------------
# verification
# --------------------------------------------------------------------------


def _recursion(case: IdentityCase):
    """S_n against S_{n-1}(a+c, b+c, c) Gamma(a) Gamma(b) Gamma(nc) / (Gamma(a+b+(n-1)c) Gamma(c))."""
    fld, n = case.field, case.n
    a, b, c = complex(case.a), complex(case.b), complex(case.c)
    top, eng = lhs_theorem(case)
    lower = replace(case, identity="theorem", n=n - 1, a=a + c, b=b + c, seed=case.seed + 1)
    low, _ = lhs_theorem(lower)
    factor = _G(fld, a) * _G(fld, b) * _G(fld, n * c) / (_G(fld, a + b + (n - 1) * c) * _G(fld, c))
    low = low.scaled(factor)
    combined = IntegralEstimate(
        top.value, top.cert_err + low.cert_err, math.hypot(top.mc_sigma, low.mc_sigma),
        top.tail_bound + low.tail_bound, top.strata + low.strata, top.samples + low.samples,
    )
    return combined, low.value, eng, {"lower_value": [low.value.real, low.value.imag]}


def evaluate(case: IdentityCase):
    """(lhs estimate, rhs value, engine name, extra info) without region checks."""
    fld = case.field
    ident = case.identity
    a, b, c, n = case.a, case.b, case.c, case.n
    st = case.engine
    if ident == "gamma_integral":
        return IntegralEstimate(gamma_via_integral(fld, a)), gamma_padic(fld, a), "shell-sum", {}
    if ident == "beta":
        rhs = rhs_beta(a, b, fld)
        if fld.kind == "complex":
            N = case.samples or 1_000_000
            return complex_root_integral(a, b, 0.0, 1, N, case.seed), rhs, "complex-mc", {}
        return lhs_beta_padic(a, b, fld), rhs, "padic-shells", {}
    if ident == "gen_beta":
        comps = [ExtComponent(m, complex(s), tuple(t) if t else None) for m, s, t in case.comps]
        lhs = trace_hyperplane_integrate(fld.p, comps, depth=st.get("depth", 12))
        return lhs, rhs_gen_beta(comps, fld), "trace-hyperplane", {}
    if ident == "prop1":
        return lhs_prop1(case.G, a, fld, st), rhs_prop1(case.G, a, fld), "padic-cells", {}
    if ident == "prop2":
        return lhs_prop2(case.G, a, b, c, fld, st or None), rhs_prop2(case.G, a, b, c, fld), \
            "padic-cells+tail", {}
    if ident == "theorem":
        lhs, eng = lhs_theorem(case)
        return lhs, rhs_theorem(a, b, c, n, fld), eng, {}
    if ident == "recursion":
        lhs, rhs, eng, extra = _recursion(case)
        extra["closed_form"] = [complex(rhs_theorem(a, b, c, n, fld)).real,
                                complex(rhs_theorem(a, b, c, n, fld)).imag]
        return lhs, rhs, eng, extra
    if ident == "complex_aomoto":
        N = case.samples or 4_000_000
        return complex_root_integral(a, b, c, n, N, case.seed), rhs_complex_aomoto(a, b, c, n), \
            "complex-mc", {}
    if ident == "ff_selberg":
        ja, jb, jc = (int(complex(x).real) for x in (a, b, c))
        return IntegralEstimate(lhs_ff_selberg(ja, jb, jc, n, fld, st.get("budget", 10**7))), _rhs_ff(ja, jb, jc, n, fld), \
            "ff-enumeration", {}
    raise ValueError(ident)


def verify(case: IdentityCase, gate: float = 3.0, floor: float = 1e-9) -> VerificationReport:
    """Region check, both sides, and the pass/fail decision.

    Passes iff |LHS - RHS| <= certified error + tail bound + gate * sigma + floor.
    """
    check_region(case)
    t0 = time.perf_counter()
    lhs, rhs, eng, extra = evaluate(case)
    rhs = complex(rhs)
    dev = abs(lhs.value - rhs)
    rel = dev / abs(rhs) if rhs != 0 else math.inf
    sig = dev / lhs.mc_sigma if lhs.mc_sigma > 0 else None
    allowed = lhs.cert_err + lhs.tail_bound + gate * lhs.mc_sigma + floor
    ms = (time.perf_counter() - t0) * 1000
    return VerificationReport(case, lhs, rhs, dev, rel, sig, dev <= allowed, gate, floor, ms, eng,
                              extra)


def fubini_sides(p: int, a, b, c, depth: int = 12) -> tuple[IntegralEstimate, IntegralEstimate]:
    """The n = 2 double integral computed in both orders.

    Inner integral over Q first: the fixed-G closed form with G = P of
    degree 1, leaving a line integral in P.  Inner integral over P first:
    the degree-2 closed form with G = Q, whose class-dependent part is
    tabulated from pointwise evaluations and then integrated like S_2.
    """
    fld = LocalFieldDesc.Qp(p)
    a, b, c = complex(a), complex(b), complex(c)
    t = MPoly.var(1, 0)
    const = _G(fld, a) * _G(fld, b) * _G(fld, c) / _G(fld, a + b + c)
    fP = CellIntegrand(p, 1, [(t, FactorLaw(p, a + c - 1)), (t + 1, FactorLaw(p, b + c - 1))],
                       prefactor=const)
    # sanity: the prefactor is the pointwise closed form at P = x + t
    probe = Fraction(2, 7)
    expect = rhs_prop2((probe,), a, b, c, fld)
    if abs(fP.point_value([probe]) - expect) > 1e-12 * abs(expect):
        raise ArithmeticError("fixed-G closed form and line integrand disagree")
    TP = padic_line_integrate(fP, a + b + 2 * c - 2)
    weights = {}
    for parity in (0, 1):
        for u in range(1, p):
            D = Fraction(u * p**parity)
            Q = MonicPoly((Fraction(0), -D / 4))
            weights[(parity, u)] = rhs_prop1(Q, c, fld) / _abs(D, fld) ** (c - 0.5)
    TQ = selberg_padic_n2(p, a, b, c, depth=depth, weights=weights)
    return TP, TQ
