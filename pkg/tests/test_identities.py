import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from localselberg.characters import gamma_complex, gamma_padic, gamma_via_integral
from localselberg.errors import PoleError, RegionError
from localselberg.fields import LocalFieldDesc
from localselberg.identities import (
    IdentityCase, check_region, classical_selberg, complex_root_integral, complex_sine_form,
    fubini_sides, lhs_beta_padic, lhs_theorem_n1_padic, rhs_beta, rhs_gen_beta, rhs_theorem,
    selberg_padic_n2, verify,
)
from localselberg.integrators import ExtComponent, trace_hyperplane_integrate
from localselberg.stratified import selberg_padic_exact, selberg_padic_mc

Q3, Q5 = LocalFieldDesc.Qp(3), LocalFieldDesc.Qp(5)


def test_gamma_half_is_one():
    assert abs(gamma_padic(Q3, 0.5) - 1) < 1e-15
    assert abs(gamma_complex(0.5) - 1) < 1e-12


@pytest.mark.parametrize("s", [0.0, 1.0])
def test_gamma_poles(s):
    with pytest.raises(PoleError):
        gamma_padic(Q3, s) if s == 0 else gamma_complex(0.0)


def test_gamma_functional_equation_padic():
    # Gamma(s) Gamma(1 - s) = 1 for unramified characters on Q_p
    for s in (0.2, 0.35, 0.7):
        assert abs(gamma_padic(Q5, s) * gamma_padic(Q5, 1 - s) - 1) < 1e-13


def test_gamma_oracle_with_conductor():
    E = LocalFieldDesc.extension(3, 2, 1)
    assert abs(gamma_padic(E, 0.3) - gamma_via_integral(E, 0.3)) < 1e-12


def test_theorem_n1_reduces_to_beta_rhs():
    for a, b in ((0.3, 0.4), (0.2, 0.2)):
        assert rhs_theorem(a, b, 0.0, 1, Q3) == rhs_beta(a, b, Q3)
        lhs = lhs_theorem_n1_padic(a, b, 3)
        assert abs(lhs.value - lhs_beta_padic(a, b, Q3).value) < 1e-12


def test_twist_covariance():
    """A unit-norm twist leaves the value alone; a twist by p scales by |p|^-s."""
    rng = np.random.default_rng(5)
    s = 0.2
    base = trace_hyperplane_integrate(3, [ExtComponent(2, s)]).value
    for _ in range(3):
        tw = tuple(int(x) for x in rng.integers(1, 3, size=2))
        val = trace_hyperplane_integrate(3, [ExtComponent(2, s, tw)]).value
        assert abs(val - base) < 1e-9
    scaled = trace_hyperplane_integrate(3, [ExtComponent(2, s, (3, 0))]).value
    # |3|_E = 9^-1, twist factor c(a^-1) = |a|_E^-s
    assert abs(scaled - base * 9 ** s) < 1e-8 * abs(base)
    assert abs(rhs_gen_beta([ExtComponent(2, s, (3, 0))], Q3) - base * 9**s) < 1e-9 * abs(base)


def test_classical_selberg_quadrature():
    val, err = integrate.dblquad(lambda y, x: (x - y) ** 2, 0, 1, 0, 1)
    assert abs(val - 1 / 6) < 1e-12
    assert abs(classical_selberg(1, 1, 1, 2) - 1 / 6) < 1e-12
    a, b, c = 0.7, 1.3, 0.4
    f = lambda y, x: (x * y) ** (a - 1) * ((1 - x) * (1 - y)) ** (b - 1) * abs(x - y) ** (2 * c)
    val, _ = integrate.dblquad(f, 0, 1, 0, 1, epsabs=1e-10)
    assert abs(val - classical_selberg(a, b, c, 2)) < 1e-6


def test_complex_gamma_and_sine_forms_agree():
    fld = LocalFieldDesc.complex()
    for args in ((0.3, 0.3, 0.05, 2), (0.2, 0.25, 0.1, 3), (0.4, 0.4, 0.0, 1)):
        lhs = math.factorial(args[3]) * rhs_theorem(*args, fld)
        assert abs(lhs - complex_sine_form(*args)) < 1e-9 * abs(lhs)


@pytest.mark.parametrize("p", [3, 5])
def test_n2_fold_matches_cluster_engine(p):
    for a, b, c in ((0.25, 0.25, 0.1), (0.1, 0.4, 0.2)):
        fold = selberg_padic_n2(p, a, b, c).value
        clus = selberg_padic_exact(p, a, b, c, 2).value
        assert abs(fold - clus) < 1e-10 * abs(clus)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_cluster_engine_matches_closed_form(p):
    for n, (a, b, c) in ((2, (0.25, 0.25, 0.1)), (3, (0.15, 0.15, 0.05)), (3, (0.2, 0.1, 0.07))):
        fld = LocalFieldDesc.Qp(p)
        assert abs(selberg_padic_exact(p, a, b, c, n).value - rhs_theorem(a, b, c, n, fld)) \
            < 1e-10 * abs(rhs_theorem(a, b, c, n, fld))


def test_fubini_orders_agree():
    TP, TQ = fubini_sides(5, 0.25, 0.25, 0.1)
    assert abs(TP.value - TQ.value) <= TP.error + TQ.error + 1e-9 * abs(TP.value)


def test_seed_determinism():
    a = complex_root_integral(0.4, 0.4, 0.0, 1, 5000, seed=3)
    b = complex_root_integral(0.4, 0.4, 0.0, 1, 5000, seed=3)
    c = complex_root_integral(0.4, 0.4, 0.0, 1, 5000, seed=4)
    assert a.value == b.value and a.mc_sigma == b.mc_sigma
    assert a.value != c.value
    m1 = selberg_padic_mc(5, 0.15, 0.15, 0.05, 3, N=600, seed=9)
    m2 = selberg_padic_mc(5, 0.15, 0.15, 0.05, 3, N=600, seed=9)
    assert m1.value == m2.value and m1.mc_sigma == m2.mc_sigma


@pytest.mark.parametrize("identity, kw", [
    ("beta", dict(a=0.5, b=0.5)),
    ("beta", dict(a=0.0, b=0.5)),
    ("theorem", dict(a=0.3, b=0.3, c=0.1, n=2)),  # a + b + 2c = 0.8 is fine
    ("theorem", dict(a=0.3, b=0.3, c=0.2, n=2)),  # a + b + 2c = 1
    ("theorem", dict(a=0.3, b=0.3, c=-0.01, n=2)),
    ("gamma_integral", dict(a=1.0)),
    ("recursion", dict(a=0.2, b=0.2, c=0.1, n=1)),
])
def test_region_boundary_probes(identity, kw):
    case = IdentityCase(identity, Q5, **kw)
    inside = identity == "theorem" and kw["c"] == 0.1
    if inside:
        check_region(case)
    else:
        with pytest.raises(RegionError):
            check_region(case)
        with pytest.raises(RegionError):
            verify(case)


def test_wild_prime_and_wrong_backend_rejected():
    with pytest.raises(RegionError):
        check_region(IdentityCase("theorem", LocalFieldDesc.Qp(2), a=0.2, b=0.2, c=0.05, n=2))
    with pytest.raises(RegionError):
        check_region(IdentityCase("complex_aomoto", Q5, a=0.2, b=0.2, c=0.05, n=2))
    with pytest.raises(RegionError):
        check_region(IdentityCase("ff_selberg", Q5, a=1, b=1, c=1, n=2))


def test_ff_trivial_character_is_a_pole():
    case = IdentityCase("ff_selberg", LocalFieldDesc.finite(5), a=1, b=1, c=1, n=2)
    with pytest.raises(PoleError):
        verify(case)


def test_recursion_consistency():
    base = IdentityCase("theorem", Q5, a=0.2, b=0.3, c=0.08, n=2)
    lower = replace(base, n=1, a=0.28, b=0.38)
    rec = replace(base, identity="recursion")
    assert verify(base).passed and verify(lower).passed
    assert verify(rec).passed


def test_prop1_small_case():
    case = IdentityCase("prop1", LocalFieldDesc.Qp(7), a=0.2, G=(Fraction(0), Fraction(-3)))
    assert verify(case).passed
