"""Run the full pipeline on a SystemSpec and render the result."""

from __future__ import annotations

import json
from math import comb
from dataclasses import dataclass, field

from ..exact_core import format_rational
from ..spencer_analysis import (
    InterpolationMismatch,
    cartan_characters,
    cartan_test,
    chars_from_cohomology,
    cohomology_from_chars,
    cohomology_table,
    hilbert_data,
    is_involutive_symbolic,
)
from ..symbol_systems import build_system, prolong_by_intersection, spencer_slice
from .spec import GENERATORS, SCHEMA, SystemSpec, build_symbol

PASS, FAIL, SKIP = "pass", "fail", "skipped"


@dataclass
class AnalysisReport:
    spec: SystemSpec
    dims: tuple
    cohomology: dict
    h: list | None
    cartan: object
    cartan_pass: bool
    verdict: object
    obstruction: str
    hilbert: object
    checks: list = field(default_factory=list)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c[1] == FAIL]


def _check(checks, name, ok, detail=""):
    checks.append((name, PASS if ok else FAIL, detail))


def analyze(spec: SystemSpec, characters_only: bool = False) -> AnalysisReport:
    symbol = build_symbol(spec)
    k, n = spec.order, spec.n
    T = spec.truncation if not characters_only else max(spec.truncation, k + 1)
    sys = build_system(symbol, T)
    checks = []
    cartan = cartan_characters(sys, spec.seed)
    cpass = cartan_test(sys, cartan.characters)
    _check(checks, "characters sum to dim g_k", sum(cartan.characters) == sys.dim(k),
           f"{sum(cartan.characters)} vs {sys.dim(k)}")
    _check(checks, "characters decrease", all(a >= b for a, b in zip(cartan.characters, cartan.characters[1:])))
    if cpass:
        _check(checks, "prolonged characters are tail sums", cartan.derived == cartan.derived_direct,
               f"{list(cartan.derived)} vs {list(cartan.derived_direct)}")
    else:
        checks.append(("prolonged characters are tail sums", SKIP, "Cartan test fails"))
    obstruction = GENERATORS[spec.generator].obstruction if spec.generator else "not assessed"
    if characters_only:
        return AnalysisReport(spec, sys.dims, {}, None, cartan, cpass, None, obstruction, None, checks)

    for t in range(k + 1, T + 1):
        d, _ = prolong_by_intersection(sys, t)
        _check(checks, f"intersection prolongation t={t}", d == sys.dim(t), f"{d} vs {sys.dim(t)}")
    _check(checks, "delta squared vanishes", all(spencer_slice(sys, t).composites_vanish() for t in range(T + 1)))
    table = cohomology_table(sys, T)
    _check(checks, "Euler characteristic of slices", table.euler_ok())
    verdict = is_involutive_symbolic(table, k, cartan) if T >= k + 2 else None
    if verdict is not None:
        stray = ", ".join(f"H^{{{i},{j}}}" for i, j in verdict.offending)
        _check(checks, "cohomology corroborates the Cartan verdict", not (cpass and stray), stray)

    full_h = T >= k + n - 1
    h = table.h_vector() if full_h else None
    s_full = [sys.fiber_dim, *cartan.characters]
    hilbert = None
    why = None if cpass and full_h else ("system is not involutive" if not cpass else f"truncation below {k + n - 1}")
    if why is None:
        _check(checks, "characters from cohomology", chars_from_cohomology(h, k, n) == s_full)
        _check(checks, "cohomology from characters", cohomology_from_chars(s_full, k, n) == h)
        ok = True
        for t in range(k, T + 1):
            alt = sum((-1) ** i * sys.dim(t - i) * comb(n, i) for i in range(n + 1) if t - i >= 0)
            want = (-1) ** (t - k + 1) * (h[t - k + 1] if t - k + 1 <= n else 0)
            ok &= alt == want
        _check(checks, "Euler characteristic against h", ok)
        try:
            hilbert = hilbert_data(sys, h=h, s=s_full)
            _check(checks, "Hilbert polynomial routes agree", True, ", ".join(hilbert.routes))
        except InterpolationMismatch as exc:
            _check(checks, "Hilbert polynomial routes agree", False, str(exc))
    else:
        for name in ("characters from cohomology", "cohomology from characters", "Euler characteristic against h"):
            checks.append((name, SKIP, why))
        try:
            hilbert = hilbert_data(sys)
            _check(checks, "Hilbert polynomial routes agree", True, ", ".join(hilbert.routes))
        except (InterpolationMismatch, ValueError) as exc:
            checks.append(("Hilbert polynomial routes agree", SKIP, str(exc)))
    return AnalysisReport(spec, sys.dims, table.dims, h, cartan, cpass, verdict, obstruction, hilbert, checks)


# -- rendering ------------------------------------------------------------------

def _poly_json(p):
    return [format_rational(c) for c in p.coeffs]


def to_json(r: AnalysisReport) -> dict:
    c = r.cartan
    out = {
        "schema": SCHEMA,
        "spec": r.spec.to_json(),
        "dims": list(r.dims),
        "cartan": {
            "characters": list(c.characters),
            "flag": [[format_rational(x) for x in row] for row in c.flag.rows()],
            "seed": c.seed,
            "derived": list(c.derived),
            "derived_direct": list(c.derived_direct),
            "test": {"weighted_sum": c.weighted_sum, "dim_next": c.dim_next, "pass": r.cartan_pass},
        },
        "checks": [{"name": a, "status": b, "detail": d} for a, b, d in r.checks],
    }
    if r.cohomology:
        out["cohomology"] = {
            "total_degree": r.spec.truncation,
            "nonzero": [[i, j, d] for (i, j), d in sorted(r.cohomology.items()) if d],
            "h": r.h,
        }
    if r.verdict is not None:
        out["involutivity"] = {
            "symbolic": r.verdict.involutive,
            "cartan_test": r.verdict.cartan_pass,
            "cohomology_clean": r.verdict.cohomology_clean,
            "obstruction": r.obstruction,
        }
    if r.hilbert is not None:
        out["hilbert"] = {
            "dim_g": _poly_json(r.hilbert.dim_poly),
            "binomial": [format_rational(x) for x in r.hilbert.binomial_coeffs],
            "cumulative": _poly_json(r.hilbert.cumulative),
            "routes": list(r.hilbert.routes),
        }
    return out


def _cartan_line(r: AnalysisReport) -> str:
    s = r.cartan.characters
    terms = " + ".join(str(x) if i == 1 else f"{i}·{x}" for i, x in enumerate(s, 1))
    k = r.spec.order
    if r.cartan_pass:
        return f"Cartan test: {terms} = {r.cartan.weighted_sum} = dim g_{k + 1}"
    return f"Cartan test: {terms} = {r.cartan.weighted_sum} ≠ {r.cartan.dim_next} = dim g_{k + 1}"


def _poly_text(coeffs) -> str:
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        mono = "" if i == 0 else "z" if i == 1 else f"z^{i}"
        val = format_rational(c)
        if mono and val == "1":
            val = ""
        elif mono and "/" in val:
            val = f"({val})"
        parts.append(f"{val}{mono}" or "1")
    return " + ".join(parts) or "0"


def to_text(r: AnalysisReport) -> str:
    spec = r.spec
    name = spec.generator or "explicit"
    lines = [f"system: {name}  n={spec.n}  order={spec.order}  truncation={spec.truncation}  seed={spec.seed}", ""]
    lines.append("dim g_t: " + ", ".join(f"g_{t}={d}" for t, d in enumerate(r.dims)))
    if r.cohomology:
        T = spec.truncation
        lines += ["", "Spencer cohomology dim H^{i,j} (rows i, columns j):"]
        lines.append("      " + "".join(f"{j:>7}" for j in range(spec.n + 1)))
        for i in range(T + 1):
            cells = [f"{r.cohomology[(i, j)]:>7}" if (i, j) in r.cohomology else f"{'.':>7}" for j in range(spec.n + 1)]
            lines.append(f"  {i:>3} " + "".join(cells))
        nz = ", ".join(f"H^{{{i},{j}}}={d}" for (i, j), d in sorted(r.cohomology.items()) if d)
        lines.append(f"nonzero: {nz}")
        if r.h is not None:
            lines.append(f"h = ({', '.join(map(str, r.h))})")
    c = r.cartan
    lines += ["", "Cartan characters: " + ", ".join(f"s_{i}={x}" for i, x in enumerate(c.characters, 1)),
              _cartan_line(r)]
    genre, integer = c.genre
    lines.append(f"Cartan genre {genre}, integer {integer}")
    if r.verdict is not None:
        lines += ["", f"involutive (symbolic): {'yes' if r.verdict.involutive else 'no'}",
                  f"structure obstruction: {r.obstruction}"]
    if r.hilbert is not None:
        lines += ["", f"dim g_z = {_poly_text(r.hilbert.dim_poly.coeffs)}",
                  f"H(z) = {_poly_text(r.hilbert.cumulative.coeffs)}"]
    lines += ["", "checks:"]
    for a, b, d in r.checks:
        lines.append(f"  [{b}] {a}" + (f" ({d})" if d else ""))
    return "\n".join(lines) + "\n"


def render(r: AnalysisReport, fmt: str = "text") -> bytes:
    if fmt == "json":
        return (json.dumps(to_json(r), sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()
    if fmt == "text":
        return to_text(r).encode()
    raise ValueError(f"unknown format {fmt!r}")
