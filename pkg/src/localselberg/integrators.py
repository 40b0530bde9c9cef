"""Integration engines over p-adic boxes, the complex plane and finite fields.

The p-adic engine works on *cells* ``c + p^k Z_p^n`` (per-coordinate
levels k).  An integrand is a product of *factor laws* applied to
polynomials in the coordinates.  On a cell a factor is either constant
(its value valuation beats every Taylor correction), or *linearly
critical* (the linear Taylor part dominates the higher ones); when the
linear parts of all critical factors are jointly of full rank mod p, the
critical values are independent and uniform on balls, so the cell
integral is an exact product of one-dimensional expectations.  Anything
else is subdivided.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import BudgetError, PrecisionError, SingularInput, TailNotDecaying
from .fields import GF, LocalFieldDesc, smallest_irreducible, vp


@dataclass
class IntegralEstimate:
    """An integral value together with everything known about its error."""

    value: complex
    cert_err: float = 0.0
    mc_sigma: float = 0.0
    tail_bound: float = 0.0
    strata: int = 0
    samples: int = 0
    aborted: int = 0
    uncertified_mass: float = 0.0
    increments: list = field(default_factory=list)
    fitted_ratio: float | None = None
    safety: float = 4.0

    @property
    def error(self) -> float:
        """Deterministic part of the error budget (certified + tail)."""
        return self.cert_err + self.tail_bound

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        return IntegralEstimate(
            self.value + other.value,
            self.cert_err + other.cert_err,
            math.hypot(self.mc_sigma, other.mc_sigma),
            self.tail_bound + other.tail_bound,
            self.strata + other.strata,
            self.samples + other.samples,
            self.aborted + other.aborted,
            self.uncertified_mass + other.uncertified_mass,
        )

    def scaled(self, z: complex) -> "IntegralEstimate":
        a = abs(z)
        return IntegralEstimate(
            self.value * z, self.cert_err * a, self.mc_sigma * a, self.tail_bound * a,
            self.strata, self.samples, self.aborted, self.uncertified_mass,
            [x * z for x in self.increments], self.fitted_ratio, self.safety,
        )


# --------------------------------------------------------------------------
# measures
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureSpec:
    """Normalisation of the self-dual Haar measure on a backend."""

    field: LocalFieldDesc

    @property
    def ring_volume(self) -> float:
        """vol(O) = q^{-d/2} for p-adic fields."""
        return self.field.q ** (-self.field.d / 2)

    @property
    def lebesgue_factor(self) -> float:
        """Self-dual measure on C is twice Lebesgue (psi = exp(4 pi i Re z))."""
        if self.field.kind != "complex":
            raise AttributeError("only the complex measure has a Lebesgue factor")
        return 2.0


def measure_scale(D: Sequence[Sequence], field: LocalFieldDesc) -> float:
    """|det D|_F^{1/2}: the self-dual measure for psi(x^T D y) in units of dx."""
    from .polylab import bareiss_det

    M = [[Fraction(x) if field.kind == "padic" else x for x in row] for row in D]
    det = bareiss_det(M)
    if det == 0:
        raise SingularInput("measure_scale needs a nondegenerate matrix")
    if field.kind == "padic":
        return float(field.q) ** (-vp(det, field.p) / (2 * field.f))
    if field.kind == "complex":
        return abs(complex(det))  # |det|_C^{1/2} = |det|
    raise ValueError("measure_scale is defined for p-adic and complex fields")


# --------------------------------------------------------------------------
# multivariate polynomials with exact Taylor expansion
# --------------------------------------------------------------------------


class MPoly:
    """Polynomial in ``nvars`` variables with rational coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict):
        self.nvars = nvars
        self.terms = {tuple(e): Fraction(c) for e, c in terms.items() if c != 0}

    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, j: int) -> "MPoly":
        e = [0] * nvars
        e[j] = 1
        return cls(nvars, {tuple(e): 1})

    def __add__(self, o):
        o = o if isinstance(o, MPoly) else MPoly.const(self.nvars, o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return MPoly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o if isinstance(o, MPoly) else MPoly.const(self.nvars, -o))

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if not isinstance(o, MPoly):
            return MPoly(self.nvars, {e: c * o for e, c in self.terms.items()})
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return MPoly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MPoly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, x: Sequence) -> Fraction:
        tot = Fraction(0)
        for e, c in self.terms.items():
            m = c
            for xi, k in zip(x, e):
                if k:
                    m *= xi**k
            tot += m
        return tot

    def taylor(self, center: Sequence, scales: Sequence) -> dict:
        """Coefficients of y -> P(center + scales * y)."""
        out: dict = {}
        for e, c in self.terms.items():
            parts = []
            for cj, sj, ej in zip(center, scales, e):
                parts.append([(i, comb(ej, i) * cj ** (ej - i) * sj**i) for i in range(ej + 1)])
            for combo in product(*parts):
                key = tuple(i for i, _ in combo)
                val = c
                for _, w in combo:
                    val *= w
                if val:
                    out[key] = out.get(key, 0) + val
        return out


# --------------------------------------------------------------------------
# factor laws
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FactorLaw:
    """x -> q^{-v(x) e} * w(v(x) mod 2, unit residue of x).

    ``q`` is the residue cardinality of the base field (only p itself is
    used here).  ``weight`` is a table ``{(parity, residue): value}`` or
    ``None`` for the constant 1; residues run over 1..p-1.
    """

    p: int
    exponent: complex
    weight: dict | None = None

    def _w(self, parity: int, u: int) -> complex:
        if self.weight is None:
            return 1.0
        return self.weight[(parity, u)]

    def value(self, x: Fraction) -> complex:
        v = vp(x, self.p)
        if v == math.inf:
            raise SingularInput("factor vanishes")
        v = int(v)
        unit = x / Fraction(self.p) ** v
        u = unit.numerator * pow(unit.denominator, -1, self.p) % self.p
        return self.p ** (-v * self.exponent) * self._w(v % 2, u)

    def value_vu(self, v: int, u: int) -> complex:
        return self.p ** (-v * self.exponent) * self._w(v % 2, u)

    def _avg(self, parity: int) -> complex:
        if self.weight is None:
            return 1.0
        return sum(self.weight[(parity, u)] for u in range(1, self.p)) / (self.p - 1)

    def ball_mean(self, g: int) -> complex:
        """Mean of the law over x uniform on p^g Z_p."""
        p, e = self.p, self.exponent
        r = p ** (-1 - e)
        if abs(r) >= 1:
            raise TailNotDecaying(f"factor exponent {e} not integrable near 0")
        a0, a1 = self._avg(g % 2), self._avg((g + 1) % 2)
        return (1 - 1 / p) * p ** (-g * e) * (a0 + r * a1) / (1 - r * r)

    def abs_bound_mean(self, g: int) -> float:
        """Mean of |law| over p^g Z_p, with the weight replaced by its max modulus."""
        wmax = 1.0 if self.weight is None else max(abs(x) for x in self.weight.values())
        e = self.exponent.real if isinstance(self.exponent, complex) else float(self.exponent)
        p = self.p
        r = p ** (-1 - e)
        return wmax * (1 - 1 / p) * p ** (-g * e) / (1 - r)


# --------------------------------------------------------------------------
# cells
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """The box prod_j (center_j + p^{levels_j} Z_p)."""

    center: tuple
    levels: tuple

    def volume(self, p: int) -> float:
        return float(p) ** (-sum(self.levels))

    def children(self, p: int) -> list["Cell"]:
        steps = [Fraction(p) ** k for k in self.levels]
        lv = tuple(k + 1 for k in self.levels)
        out = []
        for digits in product(range(p), repeat=len(self.center)):
            c = tuple(cj + d * s for cj, d, s in zip(self.center, digits, steps))
            out.append(Cell(c, lv))
        return out

    def contains(self, x: Sequence, p: int) -> bool:
        return all(vp(Fraction(xi) - cj, p) >= k for xi, cj, k in zip(x, self.center, self.levels))


class CellIntegrand:
    """prefactor * prod_i law_i(P_i(x)) * extra(x) on Q_p^n.

    ``extra`` is an optional locally constant function (for example a
    splitting-type correction); ``extra_constant(cell, info)`` must say
    whether it is constant on a cell whose factors are all constant.
    ``hook(cell)`` may return an exact cell integral, bypassing the engine.
    """

    def __init__(
        self,
        p: int,
        nvars: int,
        factors: Sequence[tuple[MPoly, FactorLaw]],
        prefactor: complex = 1.0,
        extra: Callable | None = None,
        extra_constant: Callable | None = None,
        hook: Callable | None = None,
        tilt: Callable | None = None,
    ):
        self.p = p
        self.nvars = nvars
        self.factors = list(factors)
        self.prefactor = prefactor
        self.extra = extra
        self.extra_constant = extra_constant
        self.hook = hook
        self.tilt = tilt

    def point_value(self, x: Sequence[Fraction]) -> complex:
        val = self.prefactor
        for P, law in self.factors:
            val *= law.value(P(x))
        if self.extra is not None:
            val *= self.extra(x)
        return val


@dataclass
class _FactorState:
    kind: str  # "const" | "crit" | "open"
    v0: float
    g: float
    h: float
    unit: int
    row: tuple | None


def _factor_state(P: MPoly, c: Cell, p: int) -> _FactorState:
    scales = [Fraction(p) ** k for k in c.levels]
    T = P.taylor(c.center, scales)
    n = len(c.center)
    zero = (0,) * n
    c0 = T.get(zero, Fraction(0))
    v0 = vp(c0, p)
    g = h = math.inf
    lin = [Fraction(0)] * n
    for e, coef in T.items():
        s = sum(e)
        if s == 1:
            j = e.index(1)
            lin[j] = coef
            g = min(g, vp(coef, p))
        elif s >= 2:
            h = min(h, vp(coef, p))
    unit = 0
    if v0 < math.inf:
        u = c0 / Fraction(p) ** int(v0)
        unit = u.numerator * pow(u.denominator, -1, p) % p
    if v0 < min(g, h):
        return _FactorState("const", v0, g, h, unit, None)
    if h > g:
        gi = int(g)
        # x / p^g is p-integral; reduce it mod p
        row = tuple(
            (x / Fraction(p) ** gi).numerator * pow((x / Fraction(p) ** gi).denominator, -1, p) % p
            if x else 0
            for x in lin
        )
        return _FactorState("crit", v0, g, h, unit, row)
    return _FactorState("open", v0, g, h, unit, None)


def _rank_mod_p(rows: list[tuple], p: int) -> int:
    M = [list(r) for r in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(M)) if M[i][col] % p), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = pow(M[rank][col], -1, p)
        for i in range(len(M)):
            if i != rank and M[i][col] % p:
                f = M[i][col] * inv % p
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


@dataclass
class _Accum:
    value: complex = 0j
    cert_err: float = 0.0
    var: float = 0.0
    strata: int = 0
    samples: int = 0
    aborted: int = 0
    uncertified: float = 0.0


def _cell_exact(f: CellIntegrand, c: Cell):
    """Exact cell integral, or the factor states if the cell must be split."""
    p = f.p
    states = [_factor_state(P, c, p) for P, _ in f.factors]
    if any(s.kind == "open" for s in states):
        return None, states
    crit = [s for s in states if s.kind == "crit"]
    if crit and _rank_mod_p([s.row for s in crit], p) < len(crit):
        return None, states
    if f.extra is not None and not f.extra_constant(c, states):
        return None, states
    val = f.prefactor * c.volume(p)
    for (P, law), s in zip(f.factors, states):
        if s.kind == "const":
            val *= law.value_vu(int(s.v0), s.unit)
        else:
            val *= law.ball_mean(int(s.g))
    if f.extra is not None:
        val *= f.extra(c.center)
    return val, states


def _rng_for(seed: int, key: Iterable) -> np.random.Generator:
    words = [seed & 0xFFFFFFFF]
    for x in key:
        fx = Fraction(x)
        words.append(hash((fx.numerator, fx.denominator)) & 0xFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(words))


_SAMPLE_DIGITS = 18


def _sample_cell(f: CellIntegrand, c: Cell, n_samples: int, seed: int, acc: _Accum):
    """Uniform (optionally tilted) MC inside a stratum; adds mean and variance."""
    p = f.p
    rng = _rng_for(seed, c.center + c.levels)
    vals = []
    aborted = 0
    scale = [Fraction(p) ** k for k in c.levels]
    for _ in range(n_samples):
        ys = [int(rng.integers(0, p**_SAMPLE_DIGITS)) for _ in c.center]
        x = [cj + sj * y for cj, sj, y in zip(c.center, scale, ys)]
        weight = 1.0
        if f.tilt is not None:
            x, weight = f.tilt(c, x, rng)
        try:
            vals.append(f.point_value(x) * weight)
        except (PrecisionError, SingularInput):
            aborted += 1
            vals.append(0j)
    arr = np.array(vals, dtype=complex)
    vol = c.volume(p)
    acc.value += vol * arr.mean()
    if n_samples > 1:
        acc.var += vol**2 * float(np.var(arr, ddof=1).real) / n_samples
    acc.samples += n_samples
    acc.aborted += aborted


def integrate_cells(
    f: CellIntegrand,
    roots: Sequence[Cell],
    max_depth: int = 12,
    max_cells: int = 2_000_000,
    mode: str = "certified",
    mc_depth: int | None = None,
    samples_per_stratum: int = 0,
    seed: int = 0,
) -> _Accum:
    """Adaptive exact summation over a list of disjoint root cells.

    In ``mc`` mode, cells still unresolved at ``mc_depth`` become strata
    sampled with ``samples_per_stratum`` points each; in certified mode
    cells unresolved at ``max_depth`` contribute an estimated bound.
    """
    p = f.p
    acc = _Accum()
    stack = [(c, 0) for c in reversed(roots)]
    seen = 0
    limit = max_depth if mode == "certified" else (mc_depth if mc_depth is not None else max_depth)
    while stack:
        c, depth = stack.pop()
        seen += 1
        if seen > max_cells:
            raise BudgetError(f"more than {max_cells} cells")
        if f.hook is not None:
            h = f.hook(c)
            if h is not None:
                acc.value += h
                acc.strata += 1
                continue
        val, states = _cell_exact(f, c)
        if val is not None:
            acc.value += val
            acc.strata += 1
            continue
        if depth >= limit:
            acc.strata += 1
            if mode == "mc":
                _sample_cell(f, c, samples_per_stratum, seed, acc)
            else:
                acc.uncertified += c.volume(p)
                acc.cert_err += _residual_bound(f, c, states)
            continue
        for ch in reversed(c.children(p)):
            stack.append((ch, depth + 1))
    return acc


def _residual_bound(f: CellIntegrand, c: Cell, states: list[_FactorState]) -> float:
    """Worst-case-exponent estimate for an unresolved cell.

    Each non-constant factor is charged the mean of |law| over the ball of
    its smallest attainable valuation on the cell.
    """
    b = abs(f.prefactor) * c.volume(f.p)
    for (_, law), s in zip(f.factors, states):
        if s.kind == "const":
            b *= abs(law.value_vu(int(s.v0), s.unit))
        else:
            g = int(min(s.v0, s.g, s.h))
            b *= law.abs_bound_mean(g)
    if f.extra is not None:
        b *= getattr(f, "extra_bound", 1.0)
    return b


# --------------------------------------------------------------------------
# boxes, shells and full-space integrals
# --------------------------------------------------------------------------


def shell_cells(n: int, m: int, p: int) -> list[Cell]:
    """Cells covering (p^{-m} Z_p)^n minus (p^{-m+1} Z_p)^n (the whole box if m = 0)."""
    if m == 0:
        return [Cell((Fraction(0),) * n, (0,) * n)]
    step = Fraction(p) ** (-m)
    out = []
    for digits in product(range(p), repeat=n):
        if any(digits):
            out.append(Cell(tuple(d * step for d in digits), (-m + 1,) * n))
    return out


def padic_box_integrate(
    f: CellIntegrand, box_exponent: int = 0, depth: int = 12, **kw
) -> IntegralEstimate:
    """Integral over the box (p^{-m} Z_p)^n."""
    n = f.nvars
    roots = [Cell((Fraction(0),) * n, (-box_exponent,) * n)]
    acc = integrate_cells(f, roots, max_depth=depth, **kw)
    return _to_estimate(acc)


def _to_estimate(acc: _Accum) -> IntegralEstimate:
    return IntegralEstimate(
        complex(acc.value), acc.cert_err, math.sqrt(acc.var), 0.0,
        acc.strata, acc.samples, acc.aborted, acc.uncertified,
    )


def fit_tail(increments: Sequence[complex], safety: float = 4.0, window: int = 3):
    """Geometric tail bound from the last increments.

    Returns (ratio, bound) with bound = safety * r * |last| / (1 - r),
    r the largest ratio of successive increment moduli in the window.
    """
    mags = [abs(x) for x in increments]
    if len(mags) < window + 1:
        raise TailNotDecaying("not enough shells to fit a tail")
    last = mags[-(window + 1):]
    if last[-1] == 0 and all(x == 0 for x in last):
        return 0.0, 0.0
    ratios = [b / a if a > 0 else math.inf for a, b in zip(last, last[1:])]
    r = max(ratios)
    if not r < 1:
        raise TailNotDecaying(f"shell increments not decreasing (ratio {r:.3g})")
    return r, safety * r * last[-1] / (1 - r)


def padic_full_integrate(
    f: CellIntegrand,
    max_shell: int = 40,
    mode: str = "certified",
    tol: float = 1e-12,
    min_shell: int = 6,
    safety: float = 4.0,
    depth: int = 12,
    mc_depth: int = 2,
    samples_per_stratum: int = 64,
    seed: int = 0,
    max_cells: int = 2_000_000,
) -> IntegralEstimate:
    """Integral over all of Q_p^n by boxes m = 0, 1, ... plus a fitted tail.

    Shells are added until the fitted tail bound falls below ``tol``
    (relative to the running value) or ``max_shell`` is reached.
    """
    n, p = f.nvars, f.p
    total = _Accum()
    increments = []
    ratio, bound = None, math.inf
    for m in range(0, max_shell + 1):
        acc = integrate_cells(
            f, shell_cells(n, m, p), max_depth=depth, max_cells=max_cells, mode=mode,
            mc_depth=mc_depth, samples_per_stratum=samples_per_stratum, seed=seed + 7919 * m,
        )
        increments.append(acc.value)
        total.value += acc.value
        total.cert_err += acc.cert_err
        total.var += acc.var
        total.strata += acc.strata
        total.samples += acc.samples
        total.aborted += acc.aborted
        total.uncertified += acc.uncertified
        if m >= min_shell:
            ratio, bound = fit_tail(increments[1:], safety)
            if bound <= tol * max(abs(total.value), 1e-300):
                break
    else:
        if ratio is None:
            ratio, bound = fit_tail(increments[1:], safety)
    est = _to_estimate(total)
    est.tail_bound = bound
    est.increments = increments
    est.fitted_ratio = ratio
    est.safety = safety
    return est


def padic_line_integrate(
    f: CellIntegrand, outer_exponent: complex, outer_from: int | None = None, depth: int = 40
) -> IntegralEstimate:
    """One-dimensional integral over Q_p with an exactly summed outer region.

    ``outer_exponent`` is E such that the integrand equals
    prefactor_out * |x|^{E} for every |x| >= p^{outer_from}; it is checked
    on the first outer shell and the rest is a geometric series.
    The inner box (p^{-outer_from+1} Z_p) is integrated by the cell engine.
    """
    p = f.p
    if f.nvars != 1:
        raise ValueError("padic_line_integrate is one-dimensional")
    if outer_from is None:
        # beyond the largest root size every |P_i(x)| is |lead_i| |x|^{deg P_i}
        outer_from = 1
        for P, _ in f.factors:
            d = P.degree
            lead = P.terms[(d,)]
            for (i,), c in P.terms.items():
                if i < d:
                    v = vp(c / lead, p)
                    outer_from = max(outer_from, math.floor(-v / (d - i)) + 2)
    inner_root = Cell((Fraction(0),), (-(outer_from - 1),))
    acc = integrate_cells(f, [inner_root], max_depth=depth)
    # outer shells |x| = p^M, M >= outer_from: integrand is const * p^{M E}
    x0 = Fraction(p) ** (-outer_from)
    probe = f.point_value([x0])
    const = probe / float(p) ** (outer_from * outer_exponent)
    rho = float(p) ** (1 + outer_exponent)
    if abs(rho) >= 1:
        raise TailNotDecaying("outer exponent makes the line integral diverge")
    first = (1 - 1 / p) * float(p) ** outer_from * float(p) ** (outer_from * outer_exponent) * const
    tail = first / (1 - rho)
    est = _to_estimate(acc)
    est.value += tail
    est.increments = [acc.value, tail]
    return est


def beta_shell_integral(q: int, a: complex, b: complex) -> complex:
    """Exact sum of |x|^{a-1} |1-x|^{b-1} dx over a p-adic field with residue field of size q.

    Shells of x: v(x) > 0 (|1-x| = 1), v(x) < 0 (|1-x| = |x|), and the unit
    sphere, split into x != 1 mod P and the shells of 1 - x.
    """
    inner = (1 - 1 / q) * q ** (-a) / (1 - q ** (-a))
    outer = (1 - 1 / q) * q ** (a + b - 1) / (1 - q ** (a + b - 1))
    generic_units = (q - 2) / q
    near_one = (1 - 1 / q) * q ** (-b) / (1 - q ** (-b))
    return complex(inner + outer + generic_units + near_one)


# --------------------------------------------------------------------------
# trace hyperplane
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtComponent:
    """An unramified extension E = Q_p(theta) of degree m with character |.|_E^s.

    ``twist`` is an element a of E given by its coordinates in the basis
    1, theta, ..., theta^{m-1}; the hyperplane uses Tr(a x).
    """

    m: int
    s: complex
    twist: tuple | None = None


def _companion(p: int, m: int) -> list[list[int]]:
    """Multiplication-by-theta matrix for theta a root of the integer lift of
    the smallest irreducible polynomial of degree m mod p."""
    phi = smallest_irreducible(p, m)  # low first, monic
    C = [[0] * m for _ in range(m)]
    for i in range(1, m):
        C[i][i - 1] = 1
    for i in range(m):
        C[i][m - 1] = -phi[i]
    return C


def _matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def _mult_matrix(p: int, m: int, coords: Sequence) -> list[list]:
    """Matrix of multiplication by sum coords_j theta^j (columns = images of basis)."""
    C = _companion(p, m)
    P = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    out = [[Fraction(0)] * m for _ in range(m)]
    for cj in coords:
        out = [[out[i][j] + cj * P[i][j] for j in range(m)] for i in range(m)]
        P = _matmul(C, P)
    return out


def _det_poly(M: list[list]):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    tot = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det_poly(minor)
        tot = tot + term if j % 2 == 0 else tot - term
    return tot


def trace_hyperplane_integrand(p: int, comps: Sequence[ExtComponent]):
    """CellIntegrand on the hyperplane sum_i Tr(a_i x_i) = 1, parametrised by
    all coordinates but one, including the Jacobian |l_*|^{-1}."""
    D = sum(c.m for c in comps)
    # linear form l on Q_p^D: x_i = sum_j x_ij theta^j
    ell = []
    for c in comps:
        a = c.twist if c.twist is not None else (1,) + (0,) * (c.m - 1)
        Ma = _mult_matrix(p, c.m, [Fraction(x) for x in a])
        C = _companion(p, c.m)
        P = [[Fraction(int(i == j)) for j in range(c.m)] for i in range(c.m)]
        for j in range(c.m):
            # Tr(a theta^j) = trace of Ma * theta^j
            prod = _matmul(Ma, P)
            ell.append(sum(prod[i][i] for i in range(c.m)))
            P = _matmul(C, P)
    star = min(range(D), key=lambda j: vp(ell[j], p))
    if ell[star] == 0:
        raise SingularInput("trace form vanishes identically")
    nv = D - 1
    t = [MPoly.var(nv, j) for j in range(nv)]
    it = iter(t)
    free = [j for j in range(D) if j != star]
    full = [None] * D
    for j in free:
        full[j] = next(it)
    rest = MPoly.const(nv, 1)
    for j in free:
        rest = rest - full[j] * ell[j]
    full[star] = rest * (Fraction(1) / ell[star])
    factors = []
    off = 0
    for c in comps:
        xs = full[off:off + c.m]
        off += c.m
        M = _mult_matrix_poly(p, c.m, xs, nv)
        N = _det_poly(M)
        factors.append((N, FactorLaw(p, c.s - 1)))
    jac = float(p) ** (vp(ell[star], p))  # |l_*|^{-1}
    return CellIntegrand(p, nv, factors, prefactor=jac), ell, star


def _mult_matrix_poly(p: int, m: int, xs: Sequence[MPoly], nv: int):
    C = _companion(p, m)
    P = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    out = [[MPoly.const(nv, 0) for _ in range(m)] for _ in range(m)]
    for xj in xs:
        out = [[out[i][j] + xj * P[i][j] for j in range(m)] for i in range(m)]
        P = _matmul(C, P)
    return out


def trace_hyperplane_integrate(
    p: int, comps: Sequence[ExtComponent], max_shell: int = 60, depth: int = 12
) -> IntegralEstimate:
    """Integral of prod_i |x_i|_{E_i}^{s_i - 1} over sum_i Tr(a_i x_i) = 1.

    The hyperplane measure is the one for which (a, s) -> a s turns
    |a|^{D-1} da ds into the product of self-dual measures.
    """
    f, _, _ = trace_hyperplane_integrand(p, comps)
    if f.nvars == 0:
        x = []
        return IntegralEstimate(f.point_value(x))
    if f.nvars == 1:
        E = sum((c.s - 1) * c.m for c in comps)  # |N x_i| ~ |t|^{m_i} far out
        return padic_line_integrate(f, outer_exponent=E, depth=depth)
    return padic_full_integrate(f, max_shell=max_shell, depth=depth)


# --------------------------------------------------------------------------
# complex Monte Carlo
# --------------------------------------------------------------------------


def _log_gamma_variates(rng: np.random.Generator, shape: float, N: int) -> np.ndarray:
    """log of Gamma(shape) variates; shape < 1 uses G = G' U^{1/shape}, G' ~ Gamma(shape + 1)."""
    if shape >= 1:
        return np.log(rng.gamma(shape, size=N))
    return np.log(rng.gamma(shape + 1, size=N)) + np.log1p(-rng.uniform(size=N)) / shape


@dataclass(frozen=True)
class RadialComponent:
    """Density on C proportional to rho^{kappa-1} (1+rho)^{-kappa-tau}, rho = |z - z0|^2."""

    z0: complex
    kappa: float
    tau: float

    def sample(self, rng: np.random.Generator, N: int) -> np.ndarray:
        # rho = G1 / G2 with G_i gamma variates, drawn in log space since a
        # small shape underflows G2 to 0 with non-negligible probability
        log_rho = _log_gamma_variates(rng, self.kappa, N) - _log_gamma_variates(rng, self.tau, N)
        log_rho = np.clip(log_rho, -690.0, 690.0)
        th = rng.uniform(0, 2 * math.pi, size=N)
        return self.z0 + np.exp(0.5 * log_rho + 1j * th)

    def logpdf(self, z: np.ndarray) -> np.ndarray:
        from scipy.special import betaln

        rho = np.abs(z - self.z0) ** 2
        return (
            (self.kappa - 1) * np.log(rho)
            - (self.kappa + self.tau) * np.log1p(rho)
            - math.log(math.pi)
            - betaln(self.kappa, self.tau)
        )


@dataclass(frozen=True)
class ComplexSampler:
    """Equal-weight mixture of radial components, used independently per coordinate."""

    components: tuple

    def sample(self, rng: np.random.Generator, N: int) -> tuple[np.ndarray, np.ndarray]:
        k = len(self.components)
        which = rng.integers(0, k, size=N)
        z = np.empty(N, dtype=complex)
        for i, comp in enumerate(self.components):
            idx = np.nonzero(which == i)[0]
            z[idx] = comp.sample(rng, len(idx))
        logs = np.stack([c.logpdf(z) for c in self.components])
        mx = logs.max(axis=0)
        logq = mx + np.log(np.exp(logs - mx).mean(axis=0))
        return z, logq


def selberg_sampler(a: float, b: float, c: float, n: int) -> ComplexSampler:
    """Mixture with bumps at 0 and 1 tuned so the weights have finite variance."""
    tau = max(1 - a - b - 2 * (n - 1) * c, 0.02)
    return ComplexSampler((RadialComponent(0j, a, tau), RadialComponent(1 + 0j, b, tau)))


def complex_mc_integrate(
    log_integrand: Callable[[np.ndarray], np.ndarray],
    n: int,
    sampler: ComplexSampler,
    N: int,
    seed: int = 0,
    chunk: int = 250_000,
    kurtosis_limit: float = 1e4,
) -> IntegralEstimate:
    """Importance-sampled integral over C^n of exp(log_integrand(z)) d z_1...d z_n.

    ``log_integrand`` maps an (N, n) array to real log-values.  The measure
    is the self-dual one, twice Lebesgue per coordinate (factor 2^n).
    """
    rng = np.random.default_rng(seed)
    s1 = s2 = s4 = 0.0
    done = 0
    while done < N:
        m = min(chunk, N - done)
        zs, lq = [], np.zeros(m)
        for _ in range(n):
            z, l = sampler.sample(rng, m)
            zs.append(z)
            lq += l
        Z = np.stack(zs, axis=1)
        w = np.exp(log_integrand(Z) - lq)
        s1 += w.sum()
        s2 += (w * w).sum()
        s4 += (w**4).sum()
        done += m
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0)
    sigma = math.sqrt(var / N)
    kurt = (s4 / N) / (s2 / N) ** 2 if s2 > 0 else 0.0
    est = IntegralEstimate(complex(2**n * mean), mc_sigma=2**n * sigma, samples=N)
    if kurt > kurtosis_limit:
        import warnings

        warnings.warn(f"importance weights look heavy-tailed (kurtosis {kurt:.3g})", RuntimeWarning)
    return est


# --------------------------------------------------------------------------
# finite fields
# --------------------------------------------------------------------------


def ff_enumerate_sum(
    summand: Callable[[np.ndarray], np.ndarray], q: int, n: int, budget: int = 10**7
) -> complex:
    """Sum over all monic degree-n polynomials over F_q.

    ``summand`` receives an (q^n, n) int array of encoded coefficients
    (b_{n-1}, ..., b_0) and returns the complex terms.
    """
    if q**n > budget:
        raise BudgetError(f"q^n = {q**n} exceeds the enumeration budget")
    grids = np.indices((q,) * n).reshape(n, -1).T
    return complex(np.sum(summand(grids)))


def ff_field_for(q: int) -> GF:
    p = next(d for d in range(2, q + 1) if q % d == 0)
    f = round(math.log(q, p))
    if p**f != q:
        raise ValueError(f"{q} is not a prime power")
    return GF.get(p, f)
