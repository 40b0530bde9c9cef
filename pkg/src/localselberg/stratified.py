"""Selberg integrals over Q_p by cluster decomposition (degree <= 3).

Group the roots of a monic f by their reduction in P^1(F_p-bar).  Hensel
factorisation writes f as a product of cluster polynomials, one for each
closed point of the reduced divisor, and the multiplication map is
measure preserving between coprime-mod-p clusters.  The integrand factors
accordingly: |f(0)| only sees the cluster at 0, |f(1)| the cluster at 1,
and Delta and the splitting-type correction are multiplicative.  Roots of
absolute value > 1 form a cluster at infinity; inverting them turns it
into a cluster at 0 with exponent a' - 1, a' = 1 - a - b - 2(n-1)c.

A cluster integral over {g = x^m mod p} splits into the box where every
root has valuation >= 1 (a scaled copy of the whole space Z_p^m) and an
annulus.  The box gives a linear equation; the annulus is either summed
in closed form from the Newton polygon (``exact``) or sampled (``mc``).
"""
from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

from .characters import gamma_ext, gamma_padic
from .errors import PrecisionError, SingularInput, UnsupportedDegree
from .fields import LocalFieldDesc, vp
from .integrators import IntegralEstimate
from .fields import GF
from .polylab import MonicPoly, _disc_int, discriminant, factor_ff


@lru_cache(maxsize=None)
def _patterns(p: int, m: int) -> tuple:
    """Factorisation patterns of all monic degree-m polynomials over F_p.

    Each entry is a tuple of (u, d, mult): u the root for linear factors
    (None otherwise), d the degree of the irreducible factor.
    """
    F = GF.get(p, 1)
    out = []
    for digits in product(range(p), repeat=m):
        fac = factor_ff(MonicPoly(tuple(F(x) for x in digits)), F)
        pat = []
        for phi, mult in fac:
            if phi.degree == 1:
                pat.append((F.neg(phi.coeffs[0].value), 1, mult))
            else:
                pat.append((None, phi.degree, mult))
        out.append(tuple(sorted(pat, key=repr)))
    return tuple(out)


class ClusterCalc:
    """Cluster integrals K_m(e) over {g = x^m mod p} for one value of c."""

    def __init__(self, p: int, c: complex, annulus=None):
        self.p = p
        self.c = complex(c)
        self.fld = LocalFieldDesc.Qp(p)
        self._memo: dict = {}
        self.annulus = annulus or self.annulus_exact
        g1 = gamma_padic(self.fld, self.c)
        self.corr = {
            key: gamma_ext(key, self.fld, self.c) / g1 ** (key[0] * key[1])
            for key in ((2, 1, 1), (3, 1, 2), (1, 2, 0), (1, 3, 0))
        }

    def unram(self, d: int) -> complex:
        return self.corr[(1, d, 0)] if d > 1 else 1.0

    def rho(self, m: int, e: complex) -> complex:
        """Scale factor of the box {v(b_i) >= m - i} relative to Z_p^m."""
        p, c = self.p, self.c
        return float(p) ** (-(m * (m + 1) // 2) - m * e - m * (m - 1) * (c - 0.5))

    def annulus_exact(self, m: int, e: complex) -> complex:
        p, c = float(self.p), self.c
        q = 1 - 1 / p
        cr2, cr3 = self.corr[(2, 1, 1)], self.corr[(3, 1, 2)]
        if m == 1:
            return 0.0
        if m == 2:
            return q * p**-2 * p**-e * p ** -(c - 0.5) * cr2
        if m == 3:
            out = q * p**-3 * p**-e * p ** (-2 * (c - 0.5)) * cr3
            out += q * p**-5 * p ** (-2 * e) * p ** (-4 * (c - 0.5)) * cr3
            out += q * q * p**-4 * p ** (-2 * e) * p ** (-3 * (c - 0.5)) * cr2
            r = p ** (-(1 + e))
            out += q * q * p**-2 * r**3 / (1 - r) * p ** (-3 * (c - 0.5)) * cr2
            return out
        raise UnsupportedDegree(f"cluster of multiplicity {m}")

    def cluster(self, d: int, mult: int, e: complex) -> complex:
        if d > 1:
            if mult != 1:
                raise UnsupportedDegree("repeated irreducible factor of degree > 1")
            return float(self.p) ** (-d) * self.unram(d)
        return self.K(mult, e)

    def pattern_value(self, pat, exps: dict) -> complex:
        val = 1.0 + 0j
        for u, d, mult in pat:
            val *= self.cluster(d, mult, exps.get(u, 0.0) if d == 1 else 0.0)
        return val

    def K(self, m: int, e: complex) -> complex:
        e = complex(e)
        key = (m, e)
        if key in self._memo:
            return self._memo[key]
        p = self.p
        rho = self.rho(m, e)
        if m == 1:
            val = rho * (1 - 1 / p) / (1 - rho)
            self._memo[key] = val
            return val
        # Z_m(e) = sum over residue patterns; patterns (x - u)^m with the
        # same exponent as the one being solved for feed back linearly
        cnt, rest = 0, 0j
        for pat in _patterns(p, m):
            if len(pat) == 1 and pat[0][1] == 1 and pat[0][2] == m:
                u = pat[0][0]
                eu = e if u == 0 else 0j
                if eu == e:
                    cnt += 1
                    continue
            rest += self.pattern_value(pat, {0: e})
        val = (self.annulus(m, e) + rho * rest) / (1 - rho * cnt)
        self._memo[key] = val
        return val


def selberg_clusters(p: int, a, b, c, n: int, calc: ClusterCalc | None = None) -> complex:
    """S_n(a, b, c) over Q_p as a finite sum of cluster products."""
    if n > 3:
        raise UnsupportedDegree("cluster engine handles n <= 3")
    if p <= n:
        raise ValueError(f"p = {p} is wild for degree {n}")
    a, b, c = complex(a), complex(b), complex(c)
    calc = calc or ClusterCalc(p, c)
    e_inf = -a - b - 2 * (n - 1) * c
    total = 0j
    for k in range(n + 1):
        inf_part = 1.0 if k == 0 else calc.K(k, e_inf)
        fin = 0j
        if n - k == 0:
            fin = 1.0
        else:
            for pat in _patterns(p, n - k):
                fin += calc.pattern_value(pat, {0: a - 1, 1: b - 1})
        total += inf_part * fin
    return total


def selberg_padic_exact(p: int, a, b, c, n: int) -> IntegralEstimate:
    return IntegralEstimate(selberg_clusters(p, a, b, c, n))


# --------------------------------------------------------------------------
# Monte Carlo annuli
# --------------------------------------------------------------------------


_DIGITS = 16


def cluster_integrand(g: MonicPoly, e: complex, c: complex, fld: LocalFieldDesc) -> complex:
    """|g(0)|^e |Delta(g)|^{c-1/2} times the splitting-type correction, pointwise."""
    from .identities import correction_factor

    p = fld.p
    g0 = g(0)
    if all(isinstance(x, int) or x.denominator == 1 for x in g.coeffs):
        D = _disc_int(tuple(int(x) for x in reversed(g.coeffs)) + (1,))
    else:
        D = discriminant(g)
    if g0 == 0 or D == 0:
        raise SingularInput("cluster polynomial on the singular locus")
    val = float(p) ** (-vp(g0, p) * e) * float(p) ** (-vp(D, p) * (c - 0.5))
    return complex(val * correction_factor(g, fld, c))


class AnnulusSampler:
    """Unbiased estimates of annulus integrals with a tilted law on v(g(0)).

    The annulus is {all b_i in pZ_p} minus {v(b_i) >= m - i}.  b_0 is drawn
    as p^v u with P(v) proportional to p^{-v(1 + Re e)}, which cancels
    the |g(0)|^e factor, and the other coefficients uniformly; points in the box score zero.
    """

    def __init__(self, p: int, c: complex, samples: int, seed: int):
        self.p = p
        self.c = complex(c)
        self.samples = samples
        self.seed = seed
        self.fld = LocalFieldDesc.Qp(p)
        self.results: dict = {}

    def _rng(self, m: int, e: complex) -> np.random.Generator:
        key = [self.seed & 0xFFFFFFFF, m, int(round(e.real * 1e9)) & 0xFFFFFFFF,
               int(round(e.imag * 1e9)) & 0xFFFFFFFF]
        return np.random.default_rng(np.random.SeedSequence(key))

    def __call__(self, m: int, e: complex) -> complex:
        e = complex(e)
        if m == 1:
            return 0.0
        key = (m, e)
        if key in self.results:
            return self.results[key][0]
        p = self.p
        rng = self._rng(m, e)
        r = float(p) ** (-(1 + e.real))
        N = self.samples
        vals = np.empty(N, dtype=complex)
        aborted = 0
        for i in range(N):
            v = int(rng.geometric(1 - r))
            unit = int(rng.integers(1, p)) + p * int(rng.integers(0, p ** (_DIGITS - 1)))
            b0 = p**v * unit
            rest = [p * int(rng.integers(0, p**_DIGITS)) for _ in range(m - 1)]
            co = tuple(rest) + (b0,)  # (b_{m-1}, ..., b_1, b_0)
            in_box = all(vp(co[m - 1 - i], p) >= m - i for i in range(m))
            if in_box:
                vals[i] = 0
                continue
            # density of the tilted law relative to Haar measure on (pZ_p)^m
            pv = (1 - r) * r ** (v - 1)
            shell = (1 - 1 / p) * float(p) ** (-v)
            w = float(p) ** (-(m - 1)) * shell / pv
            try:
                vals[i] = w * cluster_integrand(MonicPoly(co), e, self.c, self.fld)
            except (PrecisionError, SingularInput):
                aborted += 1
                vals[i] = 0
        mean = complex(vals.mean())
        sig = float(np.sqrt(np.var(vals, ddof=1).real / N)) if N > 1 else math.inf
        self.results[key] = (mean, sig, aborted)
        return mean


def selberg_padic_mc(p: int, a, b, c, n: int, N: int = 1_000_000, seed: int = 0,
                     **_ignored) -> IntegralEstimate:
    """Cluster decomposition with sampled annuli; sigma by linear propagation.

    ``N`` is the total number of samples, shared equally between the
    annuli that occur.
    """
    a, b, c = complex(a), complex(b), complex(c)
    probe = ClusterCalc(p, c)
    selberg_clusters(p, a, b, c, n, probe)
    keys = sorted({k for k in probe._memo if k[0] > 1}, key=repr)
    per = max(N // max(len(keys), 1), 2)
    sampler = AnnulusSampler(p, c, per, seed)
    for m, e in keys:
        sampler(m, e)

    def run(shift: dict) -> complex:
        def ann(m, e):
            base = sampler(m, complex(e))
            return base + shift.get((m, complex(e)), 0.0)
        return selberg_clusters(p, a, b, c, n, ClusterCalc(p, c, annulus=ann))

    value = run({})
    var = 0.0
    for key in keys:
        mean, sig, _ = sampler.results[key]
        if sig == 0:
            continue
        grad = (run({key: sig}) - value) / sig
        var += (abs(grad) * sig) ** 2
    aborted = sum(r[2] for r in sampler.results.values())
    return IntegralEstimate(value, mc_sigma=math.sqrt(var), strata=len(keys),
                            samples=per * len(keys), aborted=aborted)
