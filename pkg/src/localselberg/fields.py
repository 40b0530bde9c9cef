"""Arithmetic substrate: p-adic numbers, unramified extensions, finite fields.

Everything here is immutable once built.  Cached tables (defining
polynomials, discrete logarithms) are created on first use and never
mutated afterwards, so instances can be shared freely between workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np

from .errors import PrecisionError

DEFAULT_PREC = 24


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    r = math.isqrt(n)
    return all(n % d for d in range(3, r + 1, 2))


def vp(x, p: int) -> float:
    """p-adic valuation of an int or Fraction; ``inf`` for zero."""
    if x == 0:
        return math.inf
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    x = abs(int(x))
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _to_int_mod(x, p: int, modulus: int) -> int:
    """Reduce a p-integral rational to an integer modulo ``modulus``."""
    if isinstance(x, Fraction):
        return x.numerator * pow(x.denominator, -1, modulus) % modulus
    return int(x) % modulus


# --------------------------------------------------------------------------
# Field descriptors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalFieldDesc:
    """Which local field we work over.

    ``kind`` is ``"padic"`` (an unramified-character view of a p-adic field
    with residue cardinality ``p**f`` and different exponent ``d``),
    ``"finite"`` (the finite field with ``p**f`` elements) or ``"complex"``.
    """

    kind: str
    p: int = 0
    f: int = 1
    d: int = 0

    def __post_init__(self):
        if self.kind not in ("padic", "finite", "complex"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "complex":
            return
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.f < 1 or self.d < 0:
            raise ValueError("need f >= 1 and d >= 0")
        if self.kind == "finite" and self.d:
            raise ValueError("finite fields carry no different exponent")

    @property
    def q(self) -> int:
        if self.kind == "complex":
            raise AttributeError("complex field has no residue cardinality")
        return self.p**self.f

    @classmethod
    def Qp(cls, p: int) -> "LocalFieldDesc":
        return cls("padic", p, 1, 0)

    @classmethod
    def extension(cls, p: int, f: int, d: int) -> "LocalFieldDesc":
        return cls("padic", p, f, d)

    @classmethod
    def finite(cls, p: int, f: int = 1) -> "LocalFieldDesc":
        return cls("finite", p, f, 0)

    @classmethod
    def complex(cls) -> "LocalFieldDesc":
        return cls("complex")

    def check_tame(self, n: int) -> None:
        """Refuse configurations in the wild regime p <= n."""
        if self.kind == "padic" and self.p <= n:
            raise ValueError(f"p={self.p} <= n={n}: wild ramification is not supported")


# --------------------------------------------------------------------------
# p-adic numbers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PAdicNum:
    """``p**valuation * unit`` with ``unit`` known modulo ``p**prec``.

    An exact zero has ``valuation == inf``.  A number that is only known to
    be divisible by ``p**N`` (an inexact zero) has ``unit == 0``,
    ``prec == 0`` and ``valuation == N``.
    """

    p: int
    valuation: float
    unit: int
    prec: int

    @classmethod
    def from_rational(cls, p: int, x, prec: int = DEFAULT_PREC) -> "PAdicNum":
        x = Fraction(x)
        if x == 0:
            return cls(p, math.inf, 0, prec)
        v = vp(x, p)
        u = x / Fraction(p) ** v
        return cls(p, v, _to_int_mod(u, p, p**prec), prec)

    @classmethod
    def exact_zero(cls, p: int, prec: int = DEFAULT_PREC) -> "PAdicNum":
        return cls(p, math.inf, 0, prec)

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == math.inf

    @property
    def is_inexact_zero(self) -> bool:
        return self.valuation != math.inf and self.prec == 0

    @property
    def abs_prec(self) -> float:
        """Absolute precision: the value is known modulo ``p**abs_prec``."""
        return self.valuation + self.prec

    @property
    def unit_digits(self) -> tuple[int, ...]:
        digits, u = [], self.unit
        for _ in range(self.prec):
            u, r = divmod(u, self.p)
            digits.append(r)
        return tuple(digits)

    def _mk(self, v, unit, prec):
        return PAdicNum(self.p, v, unit, prec)

    def _coerce(self, other) -> "PAdicNum":
        if isinstance(other, PAdicNum):
            if other.p != self.p:
                raise ValueError("mixing different primes")
            return other
        return PAdicNum.from_rational(self.p, other, max(self.prec, 1))

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        p = self.p
        vm = min(self.valuation, other.valuation)
        A = min(self.abs_prec, other.abs_prec)
        span = int(A - vm)
        if span <= 0:
            return self._mk(A, 0, 0)
        mod = p**span
        s = (self.unit * p ** int(self.valuation - vm) + other.unit * p ** int(other.valuation - vm)) % mod
        if s == 0:
            return self._mk(A, 0, 0)
        k = int(vp(s, p))
        return self._mk(vm + k, (s // p**k) % p ** (span - k), span - k)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact_zero or self.prec == 0:
            return self
        return self._mk(self.valuation, (-self.unit) % self.p**self.prec, self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_exact_zero or other.is_exact_zero:
            return PAdicNum.exact_zero(self.p, max(self.prec, other.prec))
        if self.prec == 0 or other.prec == 0:
            return self._mk(self.valuation + other.valuation + min(self.prec, other.prec), 0, 0)
        k = min(self.prec, other.prec)
        return self._mk(self.valuation + other.valuation, self.unit * other.unit % self.p**k, k)

    __rmul__ = __mul__

    def inverse(self) -> "PAdicNum":
        if self.is_exact_zero:
            raise ZeroDivisionError("inverse of exact zero")
        if self.prec == 0:
            raise PrecisionError("inverse of a number indistinguishable from zero")
        return self._mk(-self.valuation, pow(self.unit, -1, self.p**self.prec), self.prec)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e: int):
        out = PAdicNum.from_rational(self.p, 1, self.prec)
        base = self if e >= 0 else self.inverse()
        for _ in range(abs(e)):
            out = out * base
        return out

    def __eq__(self, other):
        if isinstance(other, PAdicNum):
            return (self.p, self.valuation, self.unit, self.prec) == (
                other.p, other.valuation, other.unit, other.prec)
        if other == 0:
            return self.is_exact_zero or self.is_inexact_zero
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.valuation, self.unit, self.prec))

    def agrees_with(self, other: "PAdicNum") -> bool:
        """True when both numbers are equal on all digits known to both."""
        d = self - other
        return d.is_exact_zero or d.is_inexact_zero or d.valuation >= min(self.abs_prec, other.abs_prec)

    def to_fraction(self) -> Fraction:
        if self.is_exact_zero:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** int(self.valuation)

    def __repr__(self):
        if self.is_exact_zero:
            return f"PAdicNum(0, p={self.p})"
        return f"PAdicNum(p={self.p}, v={self.valuation}, unit={self.unit}, prec={self.prec})"


def padic_abs(x: PAdicNum) -> Fraction:
    """Normalised absolute value ``p**(-val x)`` as an exact rational."""
    if x.is_exact_zero:
        return Fraction(0)
    if x.prec == 0:
        raise PrecisionError(f"value is O({x.p}^{x.valuation}); valuation unresolved")
    return Fraction(x.p) ** (-int(x.valuation))


def complex_norm(z: complex) -> float:
    """The normalised absolute value on C: the squared modulus."""
    z = complex(z)
    return z.real * z.real + z.imag * z.imag


# --------------------------------------------------------------------------
# Polynomials over F_p (coefficient lists, low degree first)
# --------------------------------------------------------------------------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def fp_divmod(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    a = list(a)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for i, y in enumerate(b):
            a[s + i] = (a[s + i] - c * y) % p
        _trim(a)
    return _trim(q), a


def fp_gcd(a, b, p):
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, fp_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def fp_powmod(base, e, mod, p):
    result = [1]
    base = fp_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = fp_divmod(fp_mul(result, base, p), mod, p)[1]
        base = fp_divmod(fp_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def fp_is_irreducible(f, p) -> bool:
    """Rabin-style test: no factor of degree <= deg/2."""
    f = _trim([x % p for x in f])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    xp = x
    for _ in range(1, n // 2 + 1):
        xp = fp_powmod(xp, p, f, p)
        diff = _trim([(a - b) % p for a, b in zip(xp + [0] * (len(x) - len(xp)), x + [0] * (len(xp) - len(x)))])
        if len(fp_gcd(f, diff, p)) > 1:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree ``m`` over F_p.

    Candidates are ordered by the coefficient vector (b_{m-1}, ..., b_0);
    the result is returned low degree first, leading 1 included.
    """
    for idx in range(p**m):
        digits = []
        t = idx
        for _ in range(m):
            t, r = divmod(t, p)
            digits.append(r)
        hi_to_lo = digits[::-1]  # most significant digit is b_{m-1}
        poly = list(reversed(hi_to_lo)) + [1]
        if fp_is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("no irreducible polynomial found")


# --------------------------------------------------------------------------
# Finite fields
# --------------------------------------------------------------------------


class GF:
    """The finite field with ``p**f`` elements.

    Elements are encoded as ints ``sum c_i p**i`` where ``c_i`` is the
    coefficient of theta**i and theta is a root of
    :func:`smallest_irreducible`.  Multiplication goes through cached
    discrete-log tables relative to a fixed generator.
    """

    def __init__(self, p: int, f: int = 1):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p, self.f, self.q = p, f, p**f
        self.modulus = smallest_irreducible(p, f)
        q = self.q
        pw = p ** np.arange(f)
        self._pw = pw
        self.digits = np.array([[(a // p**i) % p for i in range(f)] for a in range(q)], dtype=np.int64)
        self.exp, self.log = self._build_log_tables()
        self._frob = None

    @classmethod
    @lru_cache(maxsize=None)
    def get(cls, p: int, f: int = 1) -> "GF":
        return cls(p, f)

    def _poly_mul_int(self, a: int, b: int) -> int:
        p, f = self.p, self.f
        da = [(a // p**i) % p for i in range(f)]
        db = [(b // p**i) % p for i in range(f)]
        r = fp_divmod(fp_mul(_trim(da), _trim(db), p), list(self.modulus), p)[1]
        return sum(c * p**i for i, c in enumerate(r))

    def _build_log_tables(self):
        q = self.q
        n = q - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        for g in range(1, q):
            x = 1
            ok = True
            for k in range(n):
                exp[k] = x
                x = self._poly_mul_int(x, g)
                if x == 1 and k < n - 1:
                    ok = False
                    break
            if ok:
                self.generator = g
                break
        exp[n:] = exp[:n]
        log = np.full(q, -1, dtype=np.int64)
        log[exp[:n]] = np.arange(n)
        return exp, log

    # scalar operations on encoded ints
    def add(self, a, b):
        return int(((self.digits[a] + self.digits[b]) % self.p) @ self._pw)

    def neg(self, a):
        return int(((-self.digits[a]) % self.p) @ self._pw)

    def sub(self, a, b):
        return int(((self.digits[a] - self.digits[b]) % self.p) @ self._pw)

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in GF")
        return int(self.exp[(self.q - 1 - self.log[a]) % (self.q - 1)])

    def pow(self, a, e):
        if a == 0:
            return 0 if e > 0 else 1
        return int(self.exp[(self.log[a] * e) % (self.q - 1)])

    # vectorised versions on numpy int arrays
    def vadd(self, a, b):
        return ((self.digits[a] + self.digits[b]) % self.p) @ self._pw

    def vsub(self, a, b):
        return ((self.digits[a] - self.digits[b]) % self.p) @ self._pw

    def vmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        out = self.exp[(self.log[a] + self.log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def trace_to_prime(self, a) -> int:
        """Absolute trace Tr_{F_q/F_p}, returned as an int in [0, p)."""
        t, x = 0, a
        for _ in range(self.f):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        return t  # lies in the prime field, encoded as its own residue

    def traces(self) -> np.ndarray:
        if self._frob is None:
            self._frob = np.array([self.trace_to_prime(a) for a in range(self.q)], dtype=np.int64)
        return self._frob

    def from_prime(self, c: int) -> int:
        return c % self.p

    def __call__(self, a: int) -> "FFElem":
        return FFElem(self, int(a))

    def elements(self):
        return [FFElem(self, a) for a in range(self.q)]

    def __repr__(self):
        return f"GF({self.p}^{self.f})"


@dataclass(frozen=True)
class FFElem:
    """An element of a :class:`GF`; supports the usual field operators."""

    field: GF
    value: int

    def _v(self, other):
        if isinstance(other, FFElem):
            return other.value
        return self.field.from_prime(int(other))

    def __add__(self, o):
        return FFElem(self.field, self.field.add(self.value, self._v(o)))

    __radd__ = __add__

    def __sub__(self, o):
        return FFElem(self.field, self.field.sub(self.value, self._v(o)))

    def __rsub__(self, o):
        return FFElem(self.field, self.field.sub(self._v(o), self.value))

    def __neg__(self):
        return FFElem(self.field, self.field.neg(self.value))

    def __mul__(self, o):
        return FFElem(self.field, self.field.mul(self.value, self._v(o)))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return FFElem(self.field, self.field.mul(self.value, self.field.inv(self._v(o))))

    def __pow__(self, e):
        if e < 0:
            return FFElem(self.field, self.field.inv(self.field.pow(self.value, -e)))
        return FFElem(self.field, self.field.pow(self.value, e))

    def __eq__(self, o):
        if isinstance(o, FFElem):
            return self.field is o.field and self.value == o.value
        if isinstance(o, int):
            return self.value == self.field.from_prime(o)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __repr__(self):
        return f"FFElem({self.value} in {self.field})"


# --------------------------------------------------------------------------
# Unramified extensions of Q_p
# --------------------------------------------------------------------------


class UnramExt:
    """The ring of integers of the unramified extension of degree ``m``.

    Elements are tuples of ``m`` ints reduced modulo ``p**prec``: coordinates
    on the power basis 1, theta, ..., theta^(m-1), where theta is a root of
    the lift of :func:`smallest_irreducible`.  Since the extension is
    unramified this basis is integral and the valuation of an element is
    the minimum coordinate valuation.
    """

    def __init__(self, p: int, m: int, prec: int = DEFAULT_PREC):
        self.p, self.m, self.prec = p, m, prec
        self.mod = p**prec
        self.phi = smallest_irreducible(p, m)
        if not fp_is_irreducible(list(self.phi), p):
            raise AssertionError("defining polynomial must be irreducible mod p")
        self.residue_field = GF.get(p, m)

    @classmethod
    @lru_cache(maxsize=None)
    def get(cls, p: int, m: int, prec: int = DEFAULT_PREC) -> "UnramExt":
        return cls(p, m, prec)

    @property
    def zero(self):
        return (0,) * self.m

    @property
    def one(self):
        return (1,) + (0,) * (self.m - 1)

    def from_base(self, c) -> tuple:
        return (_to_int_mod(c, self.p, self.mod),) + (0,) * (self.m - 1)

    def add(self, x, y):
        return tuple((a + b) % self.mod for a, b in zip(x, y))

    def sub(self, x, y):
        return tuple((a - b) % self.mod for a, b in zip(x, y))

    def neg(self, x):
        return tuple((-a) % self.mod for a in x)

    def scale(self, x, c: int):
        return tuple(a * c % self.mod for a in x)

    def mul(self, x, y):
        m, mod = self.m, self.mod
        if m == 1:
            return (x[0] * y[0] % mod,)
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    prod[i + j] += a * b
        phi = self.phi
        for k in range(2 * m - 2, m - 1, -1):
            c = prod[k]
            if c:
                prod[k] = 0
                for i in range(m):
                    prod[k - m + i] -= c * phi[i]
        return tuple(c % mod for c in prod[:m])

    def pow(self, x, e: int):
        out = self.one
        while e:
            if e & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            e >>= 1
        return out

    def valuation(self, x) -> int:
        """Valuation, capped at ``prec`` for elements that vanish mod p^prec."""
        return int(min(min(vp(a, self.p), self.prec) for a in x))

    def residue(self, x) -> int:
        return sum((a % self.p) * self.p**i for i, a in enumerate(x))

    def lift(self, r: int) -> tuple:
        return tuple((r // self.p**i) % self.p for i in range(self.m))

    def inverse(self, x):
        """Inverse of a unit by Newton iteration from the residue inverse."""
        r = self.residue(x)
        if r == 0:
            raise ZeroDivisionError("not a unit")
        y = self.lift(self.residue_field.inv(r))
        two = self.from_base(2)
        for _ in range(max(1, math.ceil(math.log2(self.prec)) + 1)):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        return y

    def divide_by_p_power(self, x, k: int):
        pk = self.p**k
        return tuple(a // pk for a in x)

    def mult_matrix(self, x) -> list[list[int]]:
        """Matrix of multiplication by ``x`` on the power basis (columns = images)."""
        cols = []
        basis = [tuple(int(i == j) for i in range(self.m)) for j in range(self.m)]
        for b in basis:
            cols.append(self.mul(x, b))
        return [[cols[j][i] for j in range(self.m)] for i in range(self.m)]

    def trace(self, x) -> int:
        M = self.mult_matrix(x)
        return sum(M[i][i] for i in range(self.m)) % self.mod

    def norm(self, x) -> int:
        return _int_det([row[:] for row in self.mult_matrix(x)]) % self.mod

    def evaluate(self, coeffs_low_first, x):
        """Horner evaluation of a polynomial with coefficients in this ring."""
        acc = self.zero
        for c in reversed(coeffs_low_first):
            acc = self.add(self.mul(acc, x), c)
        return acc

    def conjugates(self, x) -> list[tuple]:
        """All images of ``x`` under the automorphisms, via the roots of phi."""
        roots = unram_root_search(tuple(reversed(self.phi[:-1])), self.p, self.m, self.prec)
        out = []
        for r in roots:
            theta = tuple(_to_int_mod(c, self.p, self.mod) for c in r.coords)
            out.append(self.evaluate([self.from_base(c) for c in x], theta))
        return out


def _int_det(M: list[list[int]]) -> int:
    """Bareiss fraction-free determinant over the integers."""
    n = len(M)
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k] != 0:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1] if n else 1


# --------------------------------------------------------------------------
# Root finding in unramified extensions
# --------------------------------------------------------------------------


class ExtRoot(NamedTuple):
    """A root in an unramified extension, as power-basis coordinates.

    ``coords`` are exact rationals approximating the root; it is correct
    modulo ``p**precision`` (absolute precision, after undoing any scaling).
    """

    coords: tuple[Fraction, ...]
    precision: int


def _taylor_shift(ext: UnramExt, g: list, c) -> list:
    """Coefficients of g(c + p*y) as a polynomial in y (low degree first)."""
    n = len(g) - 1
    # synthetic division repeatedly gives the Taylor coefficients at c
    coeffs = list(g)
    out = []
    for k in range(n + 1):
        acc = ext.zero
        new = [None] * (len(coeffs) - 1)
        for i in range(len(coeffs) - 1, 0, -1):
            acc = ext.add(ext.mul(acc, c), coeffs[i])
            new[i - 1] = acc
        rem = ext.add(ext.mul(acc, c), coeffs[0])
        out.append(rem)
        coeffs = new
        if not coeffs:
            break
    # out[k] = k-th Taylor coefficient; scale by p^k
    return [ext.scale(t, ext.p**k) for k, t in enumerate(out)]


def _residue_roots(ext: UnramExt, g: list) -> tuple[list[int], list[int]]:
    """Roots in F_{p^m} of the reduction of ``g``, and of its derivative."""
    F = ext.residue_field
    red = [ext.residue(c) for c in g]
    if ext.m == 1:
        p = ext.p
        roots, droots = [], []
        for x in range(p):
            acc = 0
            for c in reversed(red):
                acc = (acc * x + c) % p
            if acc == 0:
                roots.append(x)
                droots.append(sum(i * red[i] * pow(x, i - 1, p) for i in range(1, len(red))) % p)
        return roots, droots
    xs = np.arange(F.q)
    acc = np.zeros(F.q, dtype=np.int64)
    dacc = np.zeros(F.q, dtype=np.int64)
    n = len(red) - 1
    for i in range(n, -1, -1):
        if i >= 1:
            dacc = F.vadd(F.vmul(dacc, xs), np.full(F.q, F.vmul(np.array([red[i]]), np.array([i % ext.p]))[0]))
        acc = F.vadd(F.vmul(acc, xs), np.full(F.q, red[i]))
    roots = [int(x) for x in np.nonzero(acc == 0)[0]]
    return roots, [int(dacc[r]) for r in roots]


def _newton_lift(ext: UnramExt, g: list, x, A: int):
    dg = [ext.scale(c, i) for i, c in enumerate(g)][1:]
    for _ in range(max(1, math.ceil(math.log2(max(A, 2)))) + 2):
        gx = ext.evaluate(g, x)
        if ext.valuation(gx) >= A:
            break
        x = ext.sub(x, ext.mul(gx, ext.inverse(ext.evaluate(dg, x))))
    return x


def _integral_roots(ext: UnramExt, g: list, A: int, depth: int = 0) -> list[tuple[tuple, int]]:
    """Roots in O_E of g whose coefficients are known modulo p^A.

    Returns (root, absolute precision) pairs.  g must be squarefree.
    """
    p = ext.p
    v = min(ext.valuation(c) for c in g)
    if v >= A:
        raise PrecisionError("polynomial vanishes at working precision; raise prec")
    if v:
        g = [ext.divide_by_p_power(c, v) for c in g]
        A -= v
    if all(ext.residue(c) == 0 for c in g[1:]):
        return []  # nonzero constant residue: no roots
    roots, droots = _residue_roots(ext, g)
    out = []
    for r, dr in zip(roots, droots):
        c = ext.lift(r)
        if dr != 0:
            out.append((_newton_lift(ext, g, c, A), A))
            continue
        if A <= 1:
            raise PrecisionError("Hensel lifting stalled; raise prec")
        h = _taylor_shift(ext, g, c)
        for y, prec in _integral_roots(ext, h, A, depth + 1):
            out.append((ext.add(c, ext.scale(y, p)), prec + 1))
    return out


def _monic_integral_scaling(coeffs: Sequence, p: int) -> tuple[list[Fraction], int]:
    """Scale x -> x / p^j so a monic polynomial gets p-integral coefficients.

    ``coeffs`` is (b_{n-1}, ..., b_0).  Returns low-first integral
    coefficients of p^(nj) f(x / p^j) and j.
    """
    n = len(coeffs)
    low = [Fraction(c) for c in reversed(coeffs)] + [Fraction(1)]
    j = 0
    for i in range(n):
        v = vp(low[i], p)
        if v != math.inf and v < 0:
            j = max(j, math.ceil(-v / (n - i)))
    scaled = [low[i] * Fraction(p) ** ((n - i) * j) for i in range(n + 1)]
    return scaled, j


def unram_root_search(coeffs: Sequence, p: int, m: int, prec: int = DEFAULT_PREC) -> list[ExtRoot]:
    """All roots of a monic squarefree polynomial over Q_p in Q_{p^m}.

    ``coeffs`` is the coefficient vector (b_{n-1}, ..., b_0) of a monic
    polynomial with rational (p-adically approximated) coefficients.  The
    search enumerates residues in F_{p^m}, Hensel-lifts simple residue roots
    and recurses on multiple ones.  Raises :class:`PrecisionError` when the
    working precision cannot separate the roots.
    """
    ext = UnramExt.get(p, m, prec)
    scaled, j = _monic_integral_scaling(coeffs, p)
    g = [ext.from_base(c) for c in scaled]
    out = []
    scale = Fraction(p) ** j
    half = ext.mod // 2
    for root, A in _integral_roots(ext, g, prec):
        sym = tuple(c - ext.mod if c > half else c for c in root)
        out.append(ExtRoot(tuple(Fraction(c) / scale for c in sym), A - j))
    return out


def count_unram_roots(coeffs: Sequence, p: int, m: int, prec: int = DEFAULT_PREC) -> int:
    return len(unram_root_search(coeffs, p, m, prec))
