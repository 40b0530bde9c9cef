"""Monic polynomials: resultants, discriminants, F_q factorisation, splitting types.

Polynomials in M_n are identified with F^n through the coefficient vector
(b_{n-1}, ..., b_0) of x^n + b_{n-1} x^{n-1} + ... + b_0.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import PrecisionError, SingularInput, UnsupportedDegree
from .fields import (
    DEFAULT_PREC,
    GF,
    FFElem,
    _monic_integral_scaling,
    unram_root_search,
    vp,
)


@dataclass(frozen=True)
class MonicPoly:
    """x^n + b_{n-1} x^{n-1} + ... + b_0, stored as ``coeffs = (b_{n-1}, ..., b_0)``.

    Coefficients may be ints, Fractions, complex numbers, PAdicNums or
    FFElems; evaluation uses whatever arithmetic they carry.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def full(self) -> list:
        """Coefficient list high degree first, leading 1 included."""
        one = self.coeffs[0] * 0 + 1 if self.coeffs else 1
        return [one] + list(self.coeffs)

    def __call__(self, x):
        acc = x * 0 + 1
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def derivative(self) -> list:
        n = self.degree
        return [c * (n - i) for i, c in enumerate(self.full()[:-1])]

    @classmethod
    def from_roots(cls, roots: Sequence) -> "MonicPoly":
        return roots_to_coeffs(roots)

    def __mul__(self, other: "MonicPoly") -> "MonicPoly":
        return MonicPoly(tuple(poly_mul(self.full(), other.full())[1:]))


def poly_mul(a: Sequence, b: Sequence) -> list:
    """Product of coefficient lists (either ordering, consistently)."""
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def roots_to_coeffs(roots: Sequence) -> MonicPoly:
    """Expand prod (x - z_i) into a :class:`MonicPoly`."""
    full = [1]
    for z in roots:
        full = poly_mul(full, [1, -z])
    return MonicPoly(tuple(full[1:]))


# --------------------------------------------------------------------------
# Resultant and discriminant
# --------------------------------------------------------------------------


def _is_zero(x) -> bool:
    try:
        return x == 0
    except TypeError:
        return False


def _exact_div(a, b):
    if isinstance(a, int) and isinstance(b, int):
        q, r = divmod(a, b)
        if r:
            raise ArithmeticError("inexact integer division in Bareiss elimination")
        return q
    return a / b


def bareiss_det(M: list[list]):
    """Fraction-free determinant; pivots on the largest entry for floats."""
    n = len(M)
    if n == 0:
        return 1
    M = [row[:] for row in M]
    sign = 1
    prev = 1
    floaty = any(isinstance(x, (float, complex)) for row in M for x in row)
    for k in range(n - 1):
        if floaty:
            piv = max(range(k, n), key=lambda r: abs(M[r][k]))
        else:
            piv = next((r for r in range(k, n) if not _is_zero(M[r][k])), None)
            if piv is None:
                return M[0][0] * 0
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        if _is_zero(M[k][k]):
            return M[0][0] * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = _exact_div(M[i][j] * M[k][k] - M[i][k] * M[k][j], prev)
        prev = M[k][k]
    return M[n - 1][n - 1] if sign > 0 else -M[n - 1][n - 1]


def sylvester_matrix(f: Sequence, g: Sequence) -> list[list]:
    """Sylvester matrix of two coefficient lists (high degree first)."""
    n, m = len(f) - 1, len(g) - 1
    zero = f[0] * 0
    rows = []
    for i in range(m):
        rows.append([zero] * i + list(f) + [zero] * (m - 1 - i))
    for i in range(n):
        rows.append([zero] * i + list(g) + [zero] * (n - 1 - i))
    return rows


def _as_full(h) -> list:
    if isinstance(h, MonicPoly):
        return h.full()
    if isinstance(h, (list, tuple)):
        return list(h)
    return [h]


def resultant(f, g):
    """R(f, g) = a^m prod g(alpha_i) via the Sylvester determinant.

    ``f`` and ``g`` are :class:`MonicPoly` instances, coefficient lists
    (high degree first, leading coefficient included) or scalars.
    """
    f, g = _as_full(f), _as_full(g)
    n, m = len(f) - 1, len(g) - 1
    if n == 0 and m == 0:
        return f[0] * 0 + 1
    if m == 0:
        return g[0] ** n
    if n == 0:
        return f[0] ** m
    return bareiss_det(sylvester_matrix(f, g))


def discriminant(f: MonicPoly):
    """(-1)^(n(n-1)/2) R(f, f'); the empty product 1 in degree one."""
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    if n == 1:
        return f.full()[0] * 0 + 1
    r = resultant(f, f.derivative())
    return r if (n * (n - 1) // 2) % 2 == 0 else -r


def _disc_int(low: Sequence[int]) -> int:
    """Exact integer discriminant of a monic integer polynomial (low first)."""
    n = len(low) - 1
    if n == 1:
        return 1
    if n == 2:
        c, b = low[0], low[1]
        return b * b - 4 * c
    if n == 3:
        d, c, b = low[0], low[1], low[2]
        return b * b * c * c - 4 * c**3 - 4 * b**3 * d - 27 * d * d + 18 * b * c * d
    return int(discriminant(MonicPoly(tuple(int(x) for x in reversed(low[:-1])))))


# --------------------------------------------------------------------------
# Factorisation over F_q
# --------------------------------------------------------------------------


class _GFPoly:
    """Polynomial arithmetic over a :class:`GF` on encoded ints, low degree first."""

    def __init__(self, F: GF):
        self.F = F

    def trim(self, a):
        a = list(a)
        while a and a[-1] == 0:
            a.pop()
        return a

    def add(self, a, b):
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return self.trim([self.F.add(x, y) for x, y in zip(a, b)])

    def sub(self, a, b):
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return self.trim([self.F.sub(x, y) for x, y in zip(a, b)])

    def mul(self, a, b):
        if not a or not b:
            return []
        F = self.F
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = F.add(out[i + j], F.mul(x, y))
        return self.trim(out)

    def divmod(self, a, b):
        F = self.F
        a = self.trim(a)
        b = self.trim(b)
        inv = F.inv(b[-1])
        q = [0] * max(len(a) - len(b) + 1, 0)
        while len(a) >= len(b) and a:
            c = F.mul(a[-1], inv)
            s = len(a) - len(b)
            q[s] = c
            for i, y in enumerate(b):
                a[s + i] = F.sub(a[s + i], F.mul(c, y))
            a = self.trim(a)
        return self.trim(q), a

    def monic(self, a):
        inv = self.F.inv(a[-1])
        return [self.F.mul(x, inv) for x in a]

    def gcd(self, a, b):
        a, b = self.trim(a), self.trim(b)
        while b:
            a, b = b, self.divmod(a, b)[1]
        return self.monic(a) if a else a

    def powmod(self, base, e, mod):
        result = [1]
        base = self.divmod(base, mod)[1]
        while e:
            if e & 1:
                result = self.divmod(self.mul(result, base), mod)[1]
            base = self.divmod(self.mul(base, base), mod)[1]
            e >>= 1
        return result

    def deriv(self, a):
        F = self.F
        return self.trim([F.mul(c, i % F.p) for i, c in enumerate(a)][1:])

    def pth_root(self, a):
        F = self.F
        e = F.q // F.p
        return [F.pow(c, e) for c in a[:: F.p]]


def _squarefree(P: _GFPoly, f) -> list[tuple[list, int]]:
    """Squarefree decomposition (Yun / char-p variant)."""
    out = []
    p = P.F.p
    if len(f) <= 1:
        return out
    d = P.deriv(f)
    if not d:
        for g, m in _squarefree(P, P.pth_root(f)):
            out.append((g, m * p))
        return out
    c = P.gcd(f, d)
    w = P.divmod(f, c)[0]
    i = 1
    while len(w) > 1:
        y = P.gcd(w, c)
        z = P.divmod(w, y)[0]
        if len(z) > 1:
            out.append((P.monic(z), i))
        i += 1
        w = y
        c = P.divmod(c, y)[0]
    if len(c) > 1:
        for g, m in _squarefree(P, P.pth_root(c)):
            out.append((g, m * p))
    return out


def _distinct_degree(P: _GFPoly, f) -> list[tuple[list, int]]:
    q = P.F.q
    out = []
    h = [0, 1]
    i = 0
    while len(f) - 1 >= 2 * (i + 1):
        i += 1
        h = P.powmod(h, q, f)
        g = P.gcd(f, P.sub(h, [0, 1]))
        if len(g) > 1:
            out.append((g, i))
            f = P.divmod(f, g)[0]
            h = P.divmod(h, f)[1]
    if len(f) > 1:
        out.append((P.monic(f), len(f) - 1))
    return out


def _equal_degree(P: _GFPoly, f, d: int, rng: random.Random) -> list[list]:
    n = len(f) - 1
    if n == d:
        return [f]
    F = P.F
    while True:
        a = P.trim([rng.randrange(F.q) for _ in range(n)])
        if len(a) <= 1:
            continue
        if F.p == 2:
            k = F.f * d
            t, x = [], a
            for _ in range(k):
                t = P.add(t, x)
                x = P.divmod(P.mul(x, x), f)[1]
            g = P.gcd(f, t)
        else:
            g = P.gcd(f, P.sub(P.powmod(a, (F.q**d - 1) // 2, f), [1]))
        if 1 < len(g) < len(f):
            return _equal_degree(P, g, d, rng) + _equal_degree(P, P.divmod(f, g)[0], d, rng)


def factor_ff(f: MonicPoly, F: GF | None = None) -> list[tuple[MonicPoly, int]]:
    """Complete factorisation of a monic polynomial over F_q.

    Coefficients may be FFElems (the field is read from them) or ints
    (prime field ``F`` required).  Returns (monic irreducible, multiplicity)
    pairs sorted by degree then coefficients; factors carry the same
    coefficient type as the input.
    """
    if f.degree < 1:
        raise ValueError("factor_ff needs degree >= 1")
    elems = any(isinstance(c, FFElem) for c in f.coeffs)
    if F is None:
        if not elems:
            raise ValueError("pass the field for integer coefficients")
        F = next(c.field for c in f.coeffs if isinstance(c, FFElem))
    enc = [c.value if isinstance(c, FFElem) else int(c) % F.p for c in f.coeffs]
    low = list(reversed(enc)) + [1]
    P = _GFPoly(F)
    rng = random.Random(12345)
    found = []
    for g, m in _squarefree(P, low):
        for h, d in _distinct_degree(P, g):
            for irr in _equal_degree(P, h, d, rng):
                found.append((tuple(irr), m))
    found.sort(key=lambda t: (len(t[0]), t[0][::-1]))
    out = []
    for irr, m in found:
        hi = tuple(reversed(irr[:-1]))
        coeffs = tuple(F(c) for c in hi) if elems else hi
        out.append((MonicPoly(coeffs), m))
    return out


def ff_factor_degrees(low_mod_p: Sequence[int], p: int) -> tuple[int, ...]:
    """Sorted degrees of the irreducible factors of a squarefree poly mod p."""
    f = MonicPoly(tuple(int(c) % p for c in reversed(low_mod_p[:-1])))
    return _ff_degrees_cached(f.coeffs, p)


@lru_cache(maxsize=100_000)
def _ff_degrees_cached(coeffs: tuple, p: int) -> tuple[int, ...]:
    out = []
    for g, m in factor_ff(MonicPoly(coeffs), GF.get(p)):
        out.extend([g.degree] * m)
    return tuple(sorted(out))


# --------------------------------------------------------------------------
# p-adic splitting types
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class FactorType:
    """Invariants of one irreducible factor h: degree, e, f and different exponent."""

    deg: int
    e: int
    f: int
    d: int


@dataclass(frozen=True)
class SplittingType:
    """Multiset of factor invariants of a squarefree polynomial over Q_p."""

    factors: tuple[FactorType, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))
        for t in self.factors:
            if t.deg != t.e * t.f:
                raise ValueError(f"inconsistent factor type {t}")

    @property
    def degree(self) -> int:
        return sum(t.deg for t in self.factors)

    @property
    def label(self) -> str:
        return "+".join(f"{t.deg}({t.e},{t.f},{t.d})" for t in self.factors)


def _unram(f: int) -> FactorType:
    return FactorType(f, 1, f, 0)


def _tame_ram(e: int, f: int = 1) -> FactorType:
    return FactorType(e * f, e, f, e - 1)


def _is_square_qp(x: Fraction, p: int) -> bool:
    v = vp(x, p)
    if v == math.inf:
        return True
    if v % 2:
        return False
    u = x / Fraction(p) ** v
    r = u.numerator * pow(u.denominator, -1, p) % p
    return pow(r, (p - 1) // 2, p) == 1


def _quadratic_roots_qp(b: Fraction, c: Fraction, p: int, prec: int):
    """Roots in Q_p of y^2 + b y + c (None if irrational); repeated roots allowed."""
    D = b * b - 4 * c
    if vp(D, p) >= prec:
        return (-b / 2, -b / 2)
    if not _is_square_qp(D, p):
        return None
    roots = unram_root_search((b, c), p, 1, prec)
    if len(roots) != 2:
        raise PrecisionError("could not separate resolvent roots")
    return tuple(r.coords[0] for r in roots)


def _quartic_splits_into_quadratics(low: Sequence[Fraction], p: int, prec: int) -> bool:
    """Whether a quartic with no unramified roots factors into two quadratics over Q_p.

    Uses the resolvent cubic: for every Q_p-rational root theta, the pairs
    (alpha1 + alpha2, alpha3 + alpha4) and (alpha1 alpha2, alpha3 alpha4)
    are roots of y^2 + b3 y + (b2 - theta) and z^2 - theta z + b0; the
    quartic splits iff for some theta both quadratics split over Q_p with
    a pairing compatible with the linear coefficient.
    """
    b0, b1, b2, b3 = low[0], low[1], low[2], low[3]
    res = (-b2, b1 * b3 - 4 * b0, -(b3 * b3 * b0 - 4 * b2 * b0 + b1 * b1))
    for th in unram_root_search(res, p, 1, prec):
        theta = th.coords[0]
        st = _quadratic_roots_qp(b3, b2 - theta, p, prec)
        pq = _quadratic_roots_qp(-theta, b0, p, prec)
        if st is None or pq is None:
            continue
        s, t = st
        for P1, P2 in (pq, pq[::-1]):
            lin = -(s * P2 + t * P1)
            if vp(lin - b1, p) >= prec // 2 or abs(lin - b1) == 0:
                return True
    return False


def _classify_integral(low: tuple[int, ...], p: int, vdisc: int, prec: int) -> SplittingType:
    """Splitting type of a monic integral polynomial (low first, exact ints)."""
    n = len(low) - 1
    if vdisc == 0:
        return SplittingType(tuple(_unram(k) for k in ff_factor_degrees(low, p)))
    eta = tuple(Fraction(c) for c in reversed(low[:-1]))
    c1 = len(unram_root_search(eta, p, 1, prec))
    if n == c1:
        return SplittingType((_unram(1),) * n)
    if n - c1 == 2 and n <= 3:
        # the leftover quadratic has discriminant disc / f'(r)^2, same parity
        return SplittingType((_unram(1),) * c1 + ((_tame_ram(2),) if vdisc % 2 else (_unram(2),)))
    if n == 3:
        # irreducible cubic: unramified iff it splits over the cubic extension
        if unram_root_search(eta, p, 3, prec):
            return SplittingType((_unram(3),))
        return SplittingType((_tame_ram(3),))
    counts = {1: c1}
    counts.update({m: len(unram_root_search(eta, p, m, prec)) for m in range(2, n + 1)})
    a1 = counts[1]
    a2 = (counts.get(2, a1) - a1) // 2
    a3 = (counts.get(3, a1) - a1) // 3
    a4 = (counts.get(4, a1) - a1 - 2 * a2) // 4
    factors = [_unram(1)] * a1 + [_unram(2)] * a2 + [_unram(3)] * a3 + [_unram(4)] * a4
    ram = n - (a1 + 2 * a2 + 3 * a3 + 4 * a4)
    if ram == 2:
        factors.append(_tame_ram(2))
    elif ram == 3:
        factors.append(_tame_ram(3))
    elif ram == 4:
        # no unramified roots at all; the ramified factors carry the whole
        # discriminant parity: f(e-1) is 3 for (4,1) and even for (2,2) or 2x(2,1)
        if vdisc % 2:
            factors.append(_tame_ram(4))
        elif _quartic_splits_into_quadratics([Fraction(c) for c in low], p, prec):
            factors += [_tame_ram(2), _tame_ram(2)]
        else:
            factors.append(_tame_ram(2, 2))
    elif ram != 0:
        raise AssertionError(f"impossible ramified degree {ram}")
    return SplittingType(tuple(factors))


@lru_cache(maxsize=200_000)
def _classify_cached(key: tuple[int, ...], p: int, vdisc: int, prec: int) -> SplittingType:
    return _classify_integral(key, p, vdisc, prec)


def splitting_type_padic(f, p: int, prec: int = DEFAULT_PREC) -> SplittingType:
    """Extension invariants (deg, e, f, d) of the irreducible factors of f over Q_p.

    ``f`` is a :class:`MonicPoly` (or its coefficient vector) with rational
    coefficients, degree <= 4, and p > degree.  The type is locally
    constant: it only depends on the coefficients modulo p^(2 v(disc) + 2)
    after scaling to integral form, and results are cached on that key.
    """
    coeffs = f.coeffs if isinstance(f, MonicPoly) else tuple(f)
    n = len(coeffs)
    if n > 4:
        raise UnsupportedDegree(f"degree {n} > 4")
    if p <= n:
        raise ValueError(f"p={p} <= degree {n}: wild case not supported")
    if n == 1:
        return SplittingType((_unram(1),))
    scaled, _ = _monic_integral_scaling(coeffs, p)
    low = tuple(int(c) if c.denominator == 1 else c for c in scaled)
    disc = _disc_int(low) if all(isinstance(c, int) for c in low) else discriminant(
        MonicPoly(tuple(reversed(low[:-1]))))
    if disc == 0:
        raise SingularInput("polynomial has a repeated root")
    vdisc = int(vp(disc, p))
    r = 2 * vdisc + 2
    if r > prec:
        raise PrecisionError(f"v(disc)={vdisc} too large for precision {prec}")
    mod = p**r
    key = tuple((c.numerator * pow(c.denominator, -1, mod) if isinstance(c, Fraction) else c) % mod
                for c in low[:-1]) + (1,)
    return _classify_cached(key, p, vdisc, prec)


def with_precision_escalation(fn: Callable, *args, start: int = DEFAULT_PREC, doublings: int = 4, **kw):
    """Call ``fn(*args, prec=k)`` doubling k on PrecisionError, up to ``doublings`` times."""
    k = start
    for attempt in range(doublings + 1):
        try:
            return fn(*args, prec=k, **kw)
        except PrecisionError:
            if attempt == doublings:
                raise
            k *= 2
