import math
import random
from fractions import Fraction

import pytest

from localselberg.characters import QuasiCharacter, gauss_sum, hasse_davenport_sides
from localselberg.errors import SingularInput
from localselberg.fields import LocalFieldDesc, unram_root_search, vp
from localselberg.polylab import (
    FactorType, MonicPoly, _classify_integral, _disc_int, splitting_type_padic,
)

U1, U2, U3 = FactorType(1, 1, 1, 0), FactorType(2, 1, 2, 0), FactorType(3, 1, 3, 0)
R2, R3 = FactorType(2, 2, 1, 1), FactorType(3, 3, 1, 2)


def _poly(*low_first):
    """Monic polynomial from its non-leading coefficients, constant term first."""
    return MonicPoly(tuple(Fraction(x) for x in reversed(low_first)))


@pytest.mark.parametrize("low, expect", [
    ((-5, 0), (R2,)),
    ((-2, 0), (U2,)),
    ((-1, 0), (U1, U1)),
    ((-5, 0, 0), (R3,)),
    ((-25, 0, 0), (R3,)),
    ((-2, 0, 0), (U1, U2)),
])
def test_splitting_types_over_q5(low, expect):
    assert splitting_type_padic(_poly(*low), 5).factors == tuple(sorted(expect))


def test_product_of_known_factors():
    # (x - 5)(x^2 - 10): a rational root and a ramified quadratic
    f = MonicPoly(tuple(Fraction(x) for x in (-5, -10, 50)))
    assert splitting_type_padic(f, 5).factors == tuple(sorted((U1, R2)))
    # (x - 1)(x^2 + x + 1) over Q_5: x^2 + x + 1 is irreducible mod 5
    g = _poly(-1, 0, 0)
    assert splitting_type_padic(g, 5).factors == tuple(sorted((U1, U2)))


def test_unramified_cubic_and_rational_scaling():
    # x^3 + x + 1 is irreducible mod 5, and scaling x -> x/5 keeps the type
    f = _poly(1, 1, 0)
    assert splitting_type_padic(f, 5).factors == (U3,)
    g = MonicPoly((Fraction(0), Fraction(1, 25), Fraction(1, 125)))
    assert splitting_type_padic(g, 5).factors == (U3,)


def test_singular_input():
    with pytest.raises(SingularInput):
        splitting_type_padic(_poly(0, 0), 5)


@pytest.mark.parametrize("p", [5, 7])
def test_splitting_type_locally_constant(p):
    """Perturbing integral coefficients by p^(2 v(disc) + 2) never changes the type."""
    rng = random.Random(p)
    checked = 0
    while checked < 25:
        low = [p * rng.randrange(-p**3, p**3) for _ in range(3)] + [1]
        low[0] = p * low[0] + rng.choice([0, p])
        D = _disc_int(low)
        if D == 0:
            continue
        v = int(vp(D, p))
        if 2 * v + 2 > 30:
            continue
        base = _classify_integral(tuple(low), p, v, 64)
        for _ in range(3):
            pert = [c + rng.randrange(-9, 10) * p ** (2 * v + 2) for c in low[:-1]] + [1]
            assert int(vp(_disc_int(pert), p)) == v
            assert _classify_integral(tuple(pert), p, v, 64) == base
        checked += 1


def test_root_search_finds_hensel_lifts():
    roots = unram_root_search((Fraction(0), Fraction(-2)), 7, 1, 20)  # x^2 - 2 over Q_7
    assert len(roots) == 2
    for r in roots:
        x = r.coords[0]
        assert vp(x * x - 2, 7) >= 20


@pytest.mark.parametrize("p, f", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1)])
def test_gauss_sum_modulus(p, f):
    fld = LocalFieldDesc.finite(p, f)
    for j in range(1, fld.q - 1):
        g = gauss_sum(QuasiCharacter.finite(fld, j))
        assert abs(abs(g) - math.sqrt(fld.q)) < 1e-9
    assert abs(gauss_sum(QuasiCharacter.finite(fld, 0)) + 1) < 1e-9


@pytest.mark.parametrize("p, f", [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1)])
@pytest.mark.parametrize("m", [2, 3])
def test_hasse_davenport(p, f, m):
    if (p**f) ** m > 400:
        pytest.skip("lifted field too large for a quick check")
    for j in range(p**f - 1):
        lhs, rhs = hasse_davenport_sides(p, f, m, j)
        assert abs(lhs - rhs) < 1e-8


def _type_from_counts(low, p):
    eta = tuple(Fraction(c) for c in reversed(low[:-1]))
    c1, c2, c3 = (len(unram_root_search(eta, p, m, 40)) for m in (1, 2, 3))
    a2, a3 = (c2 - c1) // 2, (c3 - c1) // 3
    ram = 3 - c1 - 2 * a2 - 3 * a3
    fac = [U1] * c1 + [U2] * a2 + [U3] * a3 + {0: [], 2: [R2], 3: [R3]}[ram]
    return tuple(sorted(fac))


def test_cubic_shortcut_agrees_with_full_root_counts():
    rng = random.Random(11)
    p, seen = 5, set()
    for _ in range(150):
        low = [p ** rng.randrange(0, 3) * rng.randrange(1, 200), p * rng.randrange(0, 50),
               p * rng.randrange(0, 5), 1]
        D = _disc_int(low)
        if D == 0 or vp(D, p) > 12:
            continue
        got = _classify_integral(tuple(low), p, int(vp(D, p)), 40).factors
        assert got == _type_from_counts(low, p)
        seen.add(got)
    assert len(seen) >= 3
