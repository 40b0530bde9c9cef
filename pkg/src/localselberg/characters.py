"""Quasi-characters, their gamma factors and finite-field Gauss sums."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import gamma as classical_gamma

from .errors import PoleError
from .fields import GF, FFElem, LocalFieldDesc, PAdicNum, complex_norm, padic_abs


@dataclass(frozen=True)
class AdditiveCharDesc:
    """The fixed additive character of a backend.

    For p-adic fields ``conductor`` is the largest m with psi trivial on
    P^{-m}: 0 on Q_p, d on an extension with different exponent d (psi
    composed with the trace).  Over C, psi(z) = exp(4 pi i Re z); over F_q,
    psi(x) = exp(2 pi i Tr(x) / p).
    """

    field: LocalFieldDesc

    @property
    def conductor(self) -> int:
        if self.field.kind != "padic":
            raise AttributeError("conductor exponent only exists for p-adic fields")
        return self.field.d

    def __call__(self, x) -> complex:
        kind = self.field.kind
        if kind == "complex":
            return cmath.exp(4j * math.pi * complex(x).real)
        if kind == "finite":
            F = GF.get(self.field.p, self.field.f)
            a = x.value if isinstance(x, FFElem) else int(x)
            return cmath.exp(2j * math.pi * F.trace_to_prime(a) / F.p)
        if self.field.f != 1 or self.field.d != 0:
            raise NotImplementedError("pointwise psi only for Q_p itself")
        # psi(x) = exp(2 pi i {x}_p), {x}_p the p-adic fractional part
        x = Fraction(x)
        den = x.denominator
        k = 0
        while den % self.field.p == 0:
            den //= self.field.p
            k += 1
        pk = self.field.p**k
        frac = (x.numerator * pow(den, -1, pk)) % pk if k else 0
        return cmath.exp(2j * math.pi * frac / pk)


@dataclass(frozen=True)
class QuasiCharacter:
    """A quasi-character of F^*.

    On p-adic and complex fields only unramified ones are modelled,
    x -> |x|_F^s with |z|_C = |z|^2.  On F_q the character is the j-th
    power of the character sending the field generator to exp(2 pi i/(q-1)),
    extended by chi(0) = 0.
    """

    field: LocalFieldDesc
    s: complex = 0.0
    index: int = 0

    @classmethod
    def unramified(cls, field: LocalFieldDesc, s: complex) -> "QuasiCharacter":
        if field.kind == "finite":
            raise ValueError("use QuasiCharacter.finite for F_q")
        return cls(field, complex(s))

    @classmethod
    def finite(cls, field: LocalFieldDesc, j: int) -> "QuasiCharacter":
        if field.kind != "finite":
            raise ValueError("finite characters need a finite field")
        return cls(field, 0.0, j % (field.q - 1))

    @classmethod
    def chi0(cls, field: LocalFieldDesc) -> "QuasiCharacter":
        """The absolute value |x|_F."""
        return cls.unramified(field, 1.0)

    @property
    def real_part(self) -> float:
        return 0.0 if self.field.kind == "finite" else self.s.real

    @property
    def is_trivial(self) -> bool:
        if self.field.kind == "finite":
            return self.index == 0
        return self.s == 0

    def __mul__(self, other: "QuasiCharacter") -> "QuasiCharacter":
        if self.field != other.field:
            raise ValueError("characters live on different fields")
        if self.field.kind == "finite":
            return QuasiCharacter.finite(self.field, self.index + other.index)
        return QuasiCharacter(self.field, self.s + other.s)

    def __pow__(self, k: int) -> "QuasiCharacter":
        if self.field.kind == "finite":
            return QuasiCharacter.finite(self.field, self.index * k)
        return QuasiCharacter(self.field, self.s * k)

    def abs_value(self, x) -> float:
        """|x|_F for the character's backend."""
        kind = self.field.kind
        if kind == "complex":
            return complex_norm(x)
        if isinstance(x, PAdicNum):
            return float(padic_abs(x))
        x = Fraction(x)
        if x == 0:
            return 0.0
        p = self.field.p
        v = 0
        num, den = x.numerator, x.denominator
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        return float(self.field.q) ** (-v)

    def __call__(self, x) -> complex:
        if self.field.kind == "finite":
            F = GF.get(self.field.p, self.field.f)
            a = x.value if isinstance(x, FFElem) else int(x)
            if a == 0:
                return 0j
            return cmath.exp(2j * math.pi * self.index * int(F.log[a]) / (F.q - 1))
        a = self.abs_value(x)
        if a == 0:
            raise ZeroDivisionError("quasi-character evaluated at 0")
        return complex(a**self.s)


def _exponent(chi) -> complex:
    return chi.s if isinstance(chi, QuasiCharacter) else complex(chi)


# --------------------------------------------------------------------------
# p-adic gamma factors
# --------------------------------------------------------------------------


def gamma_padic(field: LocalFieldDesc, chi) -> complex:
    """Gamma factor of x -> |x|^s on a p-adic field with data (q, d).

        q^{d(s - 1/2)} (1 - q^{s-1}) / (1 - q^{-s})

    ``chi`` is a :class:`QuasiCharacter` or the exponent s itself.  The
    d-dependent factor is the one produced by :func:`gamma_via_integral`.
    """
    s = _exponent(chi)
    q = field.q
    den = 1 - q ** (-s)
    if abs(den) < 1e-14:
        raise PoleError(f"gamma pole: q^(-s) = 1 at q={q}, s={s}")
    return complex(q ** (field.d * (s - 0.5)) * (1 - q ** (s - 1)) / den)


def rho_padic(field: LocalFieldDesc, chi) -> complex:
    """rho = Gamma / chi(-1); the two coincide for unramified characters."""
    return gamma_padic(field, chi)


def psi_shell_integral(v: int, q: int, d: int) -> Fraction:
    """Integral of psi over the shell {val x = v} for the self-dual measure.

    psi has conductor exponent d and vol(O) = q^{-d/2}; the returned value
    is the shell integral divided by q^{-d/2} so that it stays rational.
    """
    if v >= -d:
        return Fraction(q - 1, q) * Fraction(q) ** (-v)
    if v == -d - 1:
        # the ball P^v integrates to zero, so the shell is minus the inner ball
        return -Fraction(q) ** (-(v + 1))
    return Fraction(0)


def gamma_via_integral(field: LocalFieldDesc, chi) -> complex:
    """Integral of psi(x) |x|^{s-1} dx over the field, summed shell by shell.

    Shells v >= -d carry their full mass and form a geometric series in
    q^{-s}; the shell v = -d - 1 contributes a single term; shells further
    out integrate to zero.  The geometric series is summed in closed form.
    """
    s = _exponent(chi)
    if not 0 < s.real < 1:
        raise PoleError(f"shell series diverges for Re s = {s.real}")
    q, d = field.q, field.d
    vol = q ** (-d / 2)
    r = q ** (-s)  # ratio between consecutive inner shells of |x|^{s-1} * mass
    first = float(psi_shell_integral(-d, q, d)) * q ** (-(-d) * (s - 1))
    inner = first / (1 - r)
    edge = float(psi_shell_integral(-d - 1, q, d)) * q ** ((d + 1) * (s - 1))
    return complex(vol * (inner + edge))


def gamma_ext(invariants: Sequence[int], base: LocalFieldDesc, chi) -> complex:
    """Gamma of chi o N on the extension with invariants (e, f, d) of ``base``.

    For unramified chi = |.|^s on the base, chi o N = |.|_E^s, so only the
    residue cardinality q^f and the different exponent d of E matter.
    """
    e, f, d = invariants
    ext = LocalFieldDesc.extension(base.p, base.f * f, base.d * e + d)
    return gamma_padic(ext, chi)


# --------------------------------------------------------------------------
# complex gamma
# --------------------------------------------------------------------------


def _cgamma(z: complex) -> complex:
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise PoleError(f"classical Gamma pole at {z.real:g}")
    return complex(classical_gamma(z))


def gamma_complex(chi) -> complex:
    """Gamma factor of z -> |z|_C^s with psi(z) = exp(4 pi i Re z).

    Evaluates 2^{1-2s} pi^{-2s} Gamma(s)^2 sin(pi s) and
    (2 pi)^{1-s} Gamma(s) / ((2 pi)^s Gamma(1 - s)) and checks they agree.
    """
    s = complex(_exponent(chi))
    g = _cgamma(s)
    g1 = _cgamma(1 - s)
    a = 2 ** (1 - 2 * s) * math.pi ** (-2 * s) * g * g * cmath.sin(math.pi * s)
    b = (2 * math.pi) ** (1 - s) * g / ((2 * math.pi) ** s * g1)
    if abs(a - b) > 1e-10 * max(abs(a), abs(b), 1e-300):
        raise ArithmeticError(f"complex gamma closed forms disagree at s={s}: {a} vs {b}")
    return b


def gamma_for(field: LocalFieldDesc, chi) -> complex:
    """Backend dispatch: p-adic or complex gamma factor."""
    if field.kind == "complex":
        return gamma_complex(chi)
    if field.kind == "padic":
        return gamma_padic(field, chi)
    raise ValueError("finite fields use gauss_sum")


# --------------------------------------------------------------------------
# finite fields
# --------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _psi_table(p: int, f: int) -> np.ndarray:
    F = GF.get(p, f)
    return np.exp(2j * np.pi * F.traces() / p)


@lru_cache(maxsize=None)
def _chi_table(p: int, f: int, j: int) -> np.ndarray:
    F = GF.get(p, f)
    n = F.q - 1
    out = np.zeros(F.q, dtype=complex)
    out[1:] = np.exp(2j * np.pi * (j % n) * F.log[1:] / n)
    return out


def character_table(chi: QuasiCharacter) -> np.ndarray:
    """Values of a finite-field character on all encoded elements 0..q-1."""
    return _chi_table(chi.field.p, chi.field.f, chi.index)


def gauss_sum(chi: QuasiCharacter, psi: AdditiveCharDesc | None = None) -> complex:
    """sum over x in F_q^* of chi(x) psi(x)."""
    fld = chi.field
    if psi is not None and psi.field != fld:
        raise ValueError("chi and psi live on different fields")
    return complex(np.sum(_chi_table(fld.p, fld.f, chi.index) * _psi_table(fld.p, fld.f)))


def hasse_davenport_sides(p: int, f: int, m: int, j: int) -> tuple[complex, complex]:
    """Both sides of -g(chi o N) = (-g(chi))^m for chi = chi_j on F_{p^f}.

    Everything happens inside F_{p^{fm}}: the base field is the subfield
    generated by h = g^{(Q-1)/(q-1)}, chi_j(h^k) = exp(2 pi i jk/(q-1)),
    and the norm x -> x^{(Q-1)/(q-1)} turns chi_j o N into the character
    of index j on the exponent of g.  The base Gauss sum uses the trace of
    the subfield, so nothing depends on identifying two separate models.
    """
    big = GF.get(p, f * m)
    q, Q = p**f, p ** (f * m)
    M = (Q - 1) // (q - 1)
    # base sum over the subfield {h^k}
    base = 0j
    for k in range(q - 1):
        y = int(big.exp[(M * k) % (Q - 1)])
        t, x = 0, y
        for _ in range(f):
            t = big.add(t, x)
            x = big.pow(x, p)
        # t lies in F_p, encoded as its residue
        base += cmath.exp(2j * math.pi * j * k / (q - 1)) * cmath.exp(2j * math.pi * t / p)
    log = big.log[1:]
    lifted_chi = np.exp(2j * np.pi * (j % (q - 1)) * log / (q - 1))
    lifted = complex(np.sum(lifted_chi * _psi_table(p, f * m)[1:]))
    return -lifted, (-base) ** m
