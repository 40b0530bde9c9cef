"""Command-line front end: ``verify`` runs identity cases, ``gamma`` prints gamma factors.

Config files are TOML.  Top-level keys: ``seed``, ``format``, ``output``,
``workers``, an optional ``suite`` name, an optional ``[engine]`` table of
precision overrides applied to every case, and an array of ``[[case]]``
tables.  A case table takes ``identity``, ``field`` (Qp, ext, C or Fq),
``p``, ``f``, ``d``, ``a``, ``b``, ``c``, ``n``, ``G``, ``comps``, ``seed``,
``samples``, ``engine`` and ``id``.  Unknown keys are errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from fractions import Fraction

import tomli

from .characters import gamma_complex, gamma_padic, gamma_via_integral, rho_padic
from .errors import BudgetError, LocalSelbergError, PoleError, RegionError
from .fields import LocalFieldDesc
from .identities import IDENTITIES, IdentityCase, check_region, verify
from .suites import SUITES

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
WORKERS_ENV = "LOCALSELBERG_WORKERS"
FORMATS = ("csv", "json", "table")

TOP_KEYS = {"seed", "format", "output", "workers", "suite", "engine", "case"}
CASE_KEYS = {"identity", "field", "p", "f", "d", "a", "b", "c", "n", "G", "comps", "seed",
             "samples", "engine", "id"}
COMP_KEYS = {"m", "s", "twist"}


class ConfigError(LocalSelbergError, ValueError):
    """Malformed run configuration."""


# --------------------------------------------------------------------------
# config parsing
# --------------------------------------------------------------------------


def make_field(kind: str, p: int | None = None, f: int = 1, d: int = 0) -> LocalFieldDesc:
    kind = kind.lower()
    if kind in ("c", "complex"):
        return LocalFieldDesc.complex()
    if p is None:
        raise ConfigError(f"field {kind!r} needs a prime p")
    if kind == "qp":
        return LocalFieldDesc.Qp(p)
    if kind == "ext":
        return LocalFieldDesc.extension(p, f, d)
    if kind == "fq":
        return LocalFieldDesc.finite(p, f)
    raise ConfigError(f"unknown field kind {kind!r}")


def _number(x, what: str):
    if isinstance(x, bool) or not isinstance(x, (int, float, list)):
        raise ConfigError(f"{what} must be a number or [re, im]")
    if isinstance(x, list):
        if len(x) != 2:
            raise ConfigError(f"{what} as a list must be [re, im]")
        return complex(float(x[0]), float(x[1]))
    return x


def case_from_table(t: dict, index: int, seed: int, engine: dict) -> IdentityCase:
    extra = set(t) - CASE_KEYS
    if extra:
        raise ConfigError(f"case {index}: unknown keys {sorted(extra)}")
    if "identity" not in t or "field" not in t:
        raise ConfigError(f"case {index}: identity and field are required")
    if t["identity"] not in IDENTITIES:
        raise ConfigError(f"case {index}: unknown identity {t['identity']!r}")
    fld = make_field(str(t["field"]), t.get("p"), t.get("f", 1), t.get("d", 0))
    kw = {k: _number(t[k], f"case {index}: {k}") for k in "abc" if k in t}
    if "G" in t:
        kw["G"] = tuple(Fraction(str(x)) for x in t["G"])
    if "comps" in t:
        comps = []
        for ct in t["comps"]:
            bad = set(ct) - COMP_KEYS
            if bad:
                raise ConfigError(f"case {index}: unknown component keys {sorted(bad)}")
            tw = ct.get("twist")
            comps.append((int(ct["m"]), _number(ct["s"], "s"), tuple(tw) if tw else None))
        kw["comps"] = tuple(comps)
    eng = dict(engine)
    eng.update(t.get("engine", {}))
    return IdentityCase(
        t["identity"], fld, n=int(t.get("n", 1)), seed=int(t.get("seed", seed + index)),
        samples=int(t.get("samples", 0)), engine=eng,
        case_id=str(t.get("id", f"case-{index}")), **kw,
    )


def load_config(text: str) -> dict:
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc
    extra = set(raw) - TOP_KEYS
    if extra:
        raise ConfigError(f"unknown top-level keys {sorted(extra)}")
    seed = int(raw.get("seed", 0))
    engine = raw.get("engine", {})
    if not isinstance(engine, dict):
        raise ConfigError("engine must be a table")
    fmt = raw.get("format", "json")
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}")
    cases = []
    if "suite" in raw:
        if raw["suite"] not in SUITES:
            raise ConfigError(f"unknown suite {raw['suite']!r}")
        cases += [replace(c, engine={**engine, **c.engine}) for c in SUITES[raw["suite"]](seed)]
    for i, t in enumerate(raw.get("case", [])):
        if not isinstance(t, dict):
            raise ConfigError(f"case {i} is not a table")
        cases.append(case_from_table(t, i, seed, engine))
    if not cases:
        raise ConfigError("config defines no cases")
    return {"seed": seed, "format": fmt, "output": raw.get("output"),
            "workers": raw.get("workers"), "cases": cases}


# --------------------------------------------------------------------------
# running and reporting
# --------------------------------------------------------------------------


def record(case: IdentityCase) -> dict:
    """Verify one case and flatten the report.  Runs in worker processes."""
    rep = verify(case)
    est = rep.lhs
    return {
        "case_id": case.case_id,
        "identity": case.identity,
        "backend": case.backend,
        "params": case.params(),
        "lhs_re": est.value.real,
        "lhs_im": est.value.imag,
        "rhs_re": rep.rhs.real,
        "rhs_im": rep.rhs.imag,
        "cert_err": est.cert_err + est.tail_bound,
        "mc_sigma": est.mc_sigma,
        "sigma_dist": rep.sigma_dist,
        "pass": rep.passed,
        "seed": case.seed,
        "engine": rep.engine,
        "strata": est.strata,
        "samples": est.samples,
        "runtime_ms": round(rep.runtime_ms, 3),
    }


def _safe_record(case: IdentityCase):
    try:
        return record(case), None
    except BudgetError as exc:
        return None, f"{case.case_id}: budget exhausted: {exc}"
    except RegionError as exc:
        return None, f"{case.case_id}: region violation: {exc}"
    except PoleError as exc:
        return None, f"{case.case_id}: pole: {exc}"


def worker_count(requested) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return max(1, min(4, os.cpu_count() or 1))


def run_cases(cases: list[IdentityCase], workers: int) -> list:
    if workers == 1 or len(cases) == 1:
        return [_safe_record(c) for c in cases]
    # heaviest cases first so the pool is not left waiting on a straggler
    order = sorted(range(len(cases)), key=lambda i: -cases[i].samples)
    out = [None] * len(cases)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futs = {i: pool.submit(_safe_record, cases[i]) for i in order}
        for i, fut in futs.items():
            out[i] = fut.result()
    return out


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(records, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow({**r, "params": json.dumps(r["params"], sort_keys=True)})
        return buf.getvalue()
    cols = ("case_id", "backend", "lhs_re", "rhs_re", "cert_err", "mc_sigma", "pass", "runtime_ms")
    rows = [[_cell(r[k]) for k in cols] for r in records]
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(cols)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(cols, widths))]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "PASS" if v else "FAIL"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _single_case(args) -> IdentityCase:
    fld = make_field(args.field, args.p, args.f, args.d)
    kw = {}
    if args.G:
        kw["G"] = tuple(Fraction(x) for x in args.G)
    return IdentityCase(args.identity, fld, a=args.a, b=args.b, c=args.c, n=args.n,
                        seed=args.seed, samples=args.samples, case_id=args.id or args.identity,
                        **kw)


def cmd_verify(args) -> int:
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = load_config(fh.read())
        elif args.suite:
            cfg = {"seed": args.seed, "format": "json", "output": None, "workers": None,
                   "cases": SUITES[args.suite](args.seed)}
        elif args.identity:
            cfg = {"seed": args.seed, "format": "json", "output": None, "workers": None,
                   "cases": [_single_case(args)]}
        else:
            raise ConfigError("give --config, --suite or --identity")
        for case in cfg["cases"]:
            try:
                check_region(case)
            except RegionError as exc:
                raise RegionError(f"{case.case_id}: {exc}") from exc
    except (ConfigError, RegionError, OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    fmt = args.format or cfg["format"]
    out_path = args.output or cfg["output"]
    results = run_cases(cfg["cases"], worker_count(args.workers or cfg["workers"]))
    errors = [msg for _, msg in results if msg]
    if errors:
        for msg in errors:
            print(f"error: {msg}", file=sys.stderr)
        return EXIT_BUDGET if all("budget exhausted" in m for m in errors) else EXIT_INPUT
    records = [r for r, _ in results]
    text = render(records, fmt)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r["case_id"] for r in records if not r["pass"]]
    for cid in failed:
        print(f"FAIL {cid}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_gamma(args) -> int:
    if args.field.lower() in ("fq",):
        print("error: finite fields use Gauss sums, not gamma factors", file=sys.stderr)
        return EXIT_INPUT
    fld = make_field(args.field, args.p, args.f, args.d)
    rows = []
    for s in args.s:
        try:
            if fld.kind == "complex":
                g = gamma_complex(s)
                rows.append((s, g, g, None))
                continue
            g, rho = gamma_padic(fld, s), rho_padic(fld, s)
            if 0 < s < 1:
                oracle = gamma_via_integral(fld, s)
            elif args.continuation:
                oracle = None
            else:
                print(f"error: s = {s} is outside 0 < s < 1; pass --continuation", file=sys.stderr)
                return EXIT_INPUT
            rows.append((s, g, rho, oracle))
        except PoleError as exc:
            print(f"pole error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    name = "C" if fld.kind == "complex" else f"q={fld.q} d={fld.d}"
    print(f"field {name}")
    print(f"{'s':>8}  {'Gamma':>24}  {'rho':>24}  {'oracle':>24}  agree")
    for s, g, rho, oracle in rows:
        agree = "-" if oracle is None else ("yes" if abs(g - oracle) <= 1e-12 * max(1, abs(g))
                                            else "NO")
        orc = "-" if oracle is None else _cz(oracle)
        print(f"{s:>8g}  {_cz(g):>24}  {_cz(rho):>24}  {orc:>24}  {agree}")
    return EXIT_OK


def _cz(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.15g}" if abs(z.imag) < 1e-15 else f"{z.real:.10g}{z.imag:+.10g}j"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="localselberg")
    sub = ap.add_subparsers(dest="cmd", required=True)

    v = sub.add_parser("verify", help="check identities on both sides")
    v.add_argument("--config", help="TOML run configuration")
    v.add_argument("--suite", choices=sorted(SUITES))
    v.add_argument("--identity", choices=IDENTITIES)
    v.add_argument("--field", default="Qp")
    v.add_argument("--p", type=int)
    v.add_argument("--f", type=int, default=1)
    v.add_argument("--d", type=int, default=0)
    v.add_argument("--a", type=float, default=0.0)
    v.add_argument("--b", type=float, default=0.0)
    v.add_argument("--c", type=float, default=0.0)
    v.add_argument("--n", type=int, default=1)
    v.add_argument("--G", nargs="+", help="low coefficients of the monic G, top first")
    v.add_argument("--samples", type=int, default=0)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--id")
    v.add_argument("--format", choices=FORMATS)
    v.add_argument("--output")
    v.add_argument("--workers", type=int)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gamma", help="print gamma factors with the integral oracle")
    g.add_argument("--field", default="Qp")
    g.add_argument("--p", type=int)
    g.add_argument("--f", type=int, default=1)
    g.add_argument("--d", type=int, default=0)
    g.add_argument("--s", type=float, nargs="+", required=True)
    g.add_argument("--continuation", action="store_true",
                   help="allow s outside the strip (no oracle column)")
    g.set_defaults(func=cmd_gamma)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
