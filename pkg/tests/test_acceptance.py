"""One test per acceptance criterion, each recording a pass/fail summary line."""
import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

from scipy import integrate

from conftest import record_criterion
from localselberg.characters import (
    QuasiCharacter, gamma_padic, gamma_via_integral, gauss_sum, hasse_davenport_sides,
)
from localselberg.errors import PoleError
from localselberg.fields import LocalFieldDesc
from localselberg.identities import (
    IdentityCase, classical_selberg, lhs_ff_selberg, rhs_gen_beta, _rhs_ff, verify,
)
from localselberg.integrators import ExtComponent, trace_hyperplane_integrate

HERE = Path(__file__).parent


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.dt = time.perf_counter() - self.t0


def _judge(k, checks, detail):
    ok = all(checks)
    record_criterion(k, ok, detail)
    assert ok, detail


def _verify_all(cases, **kw):
    reps = [verify(c, **kw) for c in cases]
    worst = max(r.abs_dev / max(r.allowed, 1e-300) for r in reps)
    return reps, worst


def test_criterion_1_gamma_oracle():
    qs = ((2, 1), (3, 1), (5, 1), (3, 2), (5, 2), (3, 3))
    worst = 0.0
    with Clock() as clk:
        for (p, f), d in itertools.product(qs, (0, 1, 2)):
            fld = LocalFieldDesc.extension(p, f, d)
            for k in range(1, 10):
                s = k / 10
                worst = max(worst, abs(gamma_padic(fld, s) - gamma_via_integral(fld, s)))
    _judge(1, [worst <= 1e-12, clk.dt < 1.0],
           f"max |closed - shell sum| = {worst:.2e} over 486 points, {clk.dt:.3f} s")


def test_criterion_2_beta_exact():
    cases = [IdentityCase("beta", LocalFieldDesc.Qp(p), a=a, b=b)
             for p in (2, 5) for a, b in ((0.3, 0.4), (0.2, 0.2))]
    with Clock() as clk:
        reps, _ = _verify_all(cases)
    dev = max(r.abs_dev for r in reps)
    _judge(2, [dev <= 1e-9, all(r.passed for r in reps), clk.dt < 1.0],
           f"max deviation {dev:.2e} on Q_2, Q_5, {clk.dt:.3f} s")


def test_criterion_3_trace_hyperplane():
    with Clock() as clk:
        cases = [IdentityCase("gen_beta", LocalFieldDesc.Qp(p), comps=((2, 0.2, None),))
                 for p in (3, 5)]
        reps, _ = _verify_all(cases)
        # covariance: twisting by a in E multiplies by |a|_E^{-s}
        cov = []
        for p in (3, 5):
            base = trace_hyperplane_integrate(p, [ExtComponent(2, 0.2)]).value
            for tw in ((1, 1), (2, 1), (p, 0), (p, p)):
                comp = ExtComponent(2, 0.2, tw)
                val = trace_hyperplane_integrate(p, [comp]).value
                factor = rhs_gen_beta([comp], LocalFieldDesc.Qp(p)) / rhs_gen_beta(
                    [ExtComponent(2, 0.2)], LocalFieldDesc.Qp(p))
                cov.append(abs(val - base * factor) / abs(base))
    dev = max(r.abs_dev for r in reps)
    _judge(3, [all(r.passed for r in reps), max(cov) < 1e-9, clk.dt < 10.0],
           f"untwisted deviation {dev:.2e}, twist covariance {max(cov):.2e}, {clk.dt:.2f} s")


def test_criterion_4_prop1():
    case = IdentityCase("prop1", LocalFieldDesc.Qp(3), a=0.3, G=(Fraction(0), Fraction(1)))
    with Clock() as clk:
        rep = verify(case, floor=1e-6)
    _judge(4, [rep.passed, clk.dt < 30.0],
           f"|LHS - RHS| = {rep.abs_dev:.2e} <= {rep.allowed:.2e}, {clk.dt:.2f} s")


def test_criterion_5_prop2():
    case = IdentityCase("prop2", LocalFieldDesc.Qp(5), a=0.25, b=0.25, c=0.1, G=(Fraction(-2),))
    with Clock() as clk:
        rep = verify(case)
    _judge(5, [rep.passed, clk.dt < 300.0],
           f"|LHS - RHS| = {rep.abs_dev:.2e} <= {rep.allowed:.2e}, {clk.dt:.2f} s")


def test_criterion_6_theorem_n2_and_recursion():
    lines, checks = [], []
    for p in (3, 5):
        for a, b, c in ((0.25, 0.25, 0.1), (0.2, 0.3, 0.08)):
            case = IdentityCase("theorem", LocalFieldDesc.Qp(p), a=a, b=b, c=c, n=2)
            with Clock() as clk:
                rep = verify(case)
            checks += [rep.passed, clk.dt < 600.0]
            lines.append(f"Q_{p}{(a, b, c)} dev {rep.abs_dev:.1e} ({clk.dt:.1f} s)")
    with Clock() as clk:
        rec = verify(IdentityCase("recursion", LocalFieldDesc.Qp(5), a=0.25, b=0.25, c=0.1, n=2))
    checks += [rec.passed, clk.dt < 600.0]
    lines.append(f"recursion dev {rec.abs_dev:.1e}")
    _judge(6, checks, "; ".join(lines))


def test_criterion_7_theorem_n3_mc():
    case = IdentityCase("theorem", LocalFieldDesc.Qp(5), a=0.15, b=0.15, c=0.05, n=3,
                        samples=1_000_000, seed=0)
    with Clock() as clk:
        rep = verify(case)
    sig = rep.lhs.mc_sigma
    rel = sig / abs(rep.rhs)
    _judge(7, [rep.lhs.samples >= 999_990, rep.abs_dev <= 3 * sig + 1e-9, rel <= 0.02,
               clk.dt < 1800.0],
           f"{rep.abs_dev / sig:.2f} sigma, sigma/|RHS| = {rel:.1e}, "
           f"N = {rep.lhs.samples}, {clk.dt:.0f} s")


def test_criterion_8_complex():
    C = LocalFieldDesc.complex()
    with Clock() as c1:
        beta = verify(IdentityCase("beta", C, a=0.4, b=0.4, samples=1_000_000, seed=11))
    with Clock() as c2:
        aom = verify(IdentityCase("complex_aomoto", C, a=0.3, b=0.3, c=0.05, n=2,
                                  samples=4_000_000, seed=12))
    quad, _ = integrate.dblquad(lambda y, x: (x - y) ** 2, 0, 1, 0, 1)
    checks = [beta.passed, c1.dt < 60.0, aom.passed, c2.dt < 600.0,
              abs(quad - 1 / 6) < 1e-12, abs(classical_selberg(1, 1, 1, 2) - 1 / 6) < 1e-12]
    _judge(8, checks,
           f"beta {beta.abs_dev / beta.lhs.mc_sigma:.2f} sigma ({c1.dt:.1f} s); "
           f"n=2 {aom.abs_dev / aom.lhs.mc_sigma:.2f} sigma ({c2.dt:.1f} s); "
           f"S_2(1,1,1) quadrature {quad:.15f}")


def test_criterion_9_finite_fields():
    with Clock() as clk:
        gauss, hd = 0.0, 0.0
        for p, f in ((2, 1), (3, 1), (2, 2), (5, 1), (7, 1)):
            fld = LocalFieldDesc.finite(p, f)
            for j in range(1, fld.q - 1):
                gauss = max(gauss, abs(abs(gauss_sum(QuasiCharacter.finite(fld, j)))
                                       - math.sqrt(fld.q)))
            for m in (2, 3):
                if fld.q ** m > 400:
                    continue
                for j in range(fld.q - 1):
                    lhs, rhs = hasse_davenport_sides(p, f, m, j)
                    hd = max(hd, abs(lhs - rhs))
        F5 = LocalFieldDesc.finite(5)
        worst, admissible = 0.0, 0
        for ja, jb, jc in itertools.product(range(4), repeat=3):
            try:
                rhs = _rhs_ff(ja, jb, jc, 2, F5)
            except PoleError:
                continue
            admissible += 1
            worst = max(worst, abs(lhs_ff_selberg(ja, jb, jc, 2, F5) - rhs))
    _judge(9, [gauss < 1e-9, hd < 1e-8, admissible > 0, worst <= 1e-9],
           f"|g| - sqrt q {gauss:.1e}; Hasse-Davenport {hd:.1e}; "
           f"q=5 n=2 {admissible} admissible triples, max dev {worst:.1e} ({clk.dt:.1f} s)")


def test_criterion_10_property_suites():
    targets = [str(HERE / "test_algebra.py"), str(HERE / "test_fields.py"),
               str(HERE / "test_identities.py") + "::test_seed_determinism"]
    with Clock() as clk:
        proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                               *targets], capture_output=True, text=True, cwd=HERE.parent)
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    _judge(10, [proc.returncode == 0, clk.dt < 120.0], f"{tail} ({clk.dt:.1f} s)")
