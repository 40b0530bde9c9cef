from fractions import Fraction
from itertools import combinations

from hypothesis import given, settings
from hypothesis import strategies as st

from localselberg.fields import GF
from localselberg.polylab import (
    MonicPoly, _disc_int, bareiss_det, discriminant, factor_ff, poly_mul, resultant,
    roots_to_coeffs,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)
roots = st.lists(small, min_size=1, max_size=4)


def _prod(xs):
    out = Fraction(1)
    for x in xs:
        out *= x
    return out


@settings(max_examples=60, deadline=None)
@given(roots, roots)
def test_resultant_is_product_over_root_pairs(al, be):
    f, g = roots_to_coeffs(al), roots_to_coeffs(be)
    assert resultant(f, g) == _prod(x - y for x in al for y in be)
    assert resultant(f, g) == _prod(g(x) for x in al)


@settings(max_examples=60, deadline=None)
@given(roots)
def test_resultant_with_derivative_is_signed_discriminant(al):
    f = roots_to_coeffs(al)
    n = len(al)
    sign = (-1) ** (n * (n - 1) // 2)
    assert resultant(f, f.derivative()) == sign * discriminant(f)
    assert discriminant(f) == _prod((x - y) ** 2 for x, y in combinations(al, 2))


@settings(max_examples=60, deadline=None)
@given(roots, roots, roots)
def test_resultant_multiplicative_in_each_argument(a1, a2, be):
    f1, f2, g = roots_to_coeffs(a1), roots_to_coeffs(a2), roots_to_coeffs(be)
    assert resultant(f1, f2 * g) == resultant(f1, f2) * resultant(f1, g)
    assert resultant(f1 * f2, g) == resultant(f1, g) * resultant(f2, g)


def test_resultant_with_constant():
    f = MonicPoly((Fraction(3), Fraction(-1), Fraction(2)))
    assert resultant(f, [Fraction(5)]) == 125


def _elementary(xs, k):
    return sum((_prod(c) for c in combinations(xs, k)), Fraction(0))


def _jacobian(zs):
    """d b_k / d z_i for b_k = (-1)^k e_k(z), the coefficients of prod (x - z_i)."""
    n = len(zs)
    rows = []
    for k in range(1, n + 1):
        row = []
        for i in range(n):
            rest = zs[:i] + zs[i + 1:]
            row.append((-1) ** k * _elementary(rest, k - 1))
        rows.append(row)
    return rows


@settings(max_examples=50, deadline=None)
@given(st.lists(small, min_size=2, max_size=4, unique=True))
def test_jacobian_squared_is_discriminant(zs):
    J = bareiss_det(_jacobian(zs))
    vdm = _prod((x - y) ** 2 for x, y in combinations(zs, 2))
    assert J * J == vdm
    assert discriminant(roots_to_coeffs(zs)) == vdm


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=2, max_size=4))
def test_integer_discriminant_matches_sylvester(low):
    low = list(low) + [1]
    f = MonicPoly(tuple(Fraction(x) for x in reversed(low[:-1])))
    assert _disc_int(low) == discriminant(f)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.lists(st.integers(0, 6), min_size=1, max_size=5))
def test_ff_factorisation_multiplies_back(p, digits):
    F = GF.get(p, 1)
    f = MonicPoly(tuple(F(x % p) for x in digits))
    prod = [F(1)]
    for phi, mult in factor_ff(f, F):
        for _ in range(mult):
            prod = poly_mul(prod, phi.full())
    assert [x.value for x in prod] == [x.value for x in f.full()]
