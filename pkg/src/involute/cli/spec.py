"""System specification files: parsing, validation and symbol construction."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from ..exact_core import RationalMatrix, format_rational, parse_rational, sym_dim
from ..field_equations import (
    Metric,
    block_triangular_symbol,
    einstein_maxwell_symbol,
    maxwell_symbol,
    ricci_symbol,
    scalar_coupling_symbol,
    wave_symbol,
)
from ..symbol_systems import SymbolMap

SCHEMA = "involute/1"
FORMATS = ("text", "json")


class SpecError(Exception):
    pass


class ParseError(SpecError):
    pass


class ShapeError(SpecError):
    pass


class UnknownGenerator(SpecError):
    pass


@dataclass(frozen=True)
class Generator:
    name: str
    order: int | None  # None: any order, read from the input file
    summary: str
    obstruction: str  # what is known about the order-k structure obstruction
    params: tuple = ()
    min_n: int = 1


GENERATORS = {
    g.name: g
    for g in (
        Generator("einstein_vacuum", 2, "Ricci symbol of the vacuum Einstein equations",
                  "asserted by source (Bianchi identities)", min_n=3),
        Generator("maxwell_source_free", 2, "Maxwell operator on the potential, J = 0",
                  "asserted by source (codifferential squares to zero)"),
        Generator("einstein_maxwell", 2, "weakly uncoupled Einstein-Maxwell system, J = 0",
                  "asserted by source (Bianchi and codifferential identities)", min_n=3),
        Generator("scalar_wave", 2, "scalar wave operator (determined)",
                  "none: determined operator"),
        Generator("einstein_scalar", 2, "Einstein block coupled to a scalar wave operator, block-triangular",
                  "asserted by source (Bianchi identities)", ("coupled",), min_n=3),
        Generator("free", None, "no equations: g_t is the full space", "none: empty system",
                  ("fiber_dim",)),
    )
}


@dataclass(frozen=True)
class SystemSpec:
    n: int
    order: int
    truncation: int
    seed: int
    generator: str | None = None
    metric: object = "minkowski"  # name or tuple of rows of Fraction
    parameters: dict = field(default_factory=dict)
    source_fiber_dim: int | None = None
    target_fiber_dim: int | None = None
    matrix: tuple | None = None
    format: str = "text"

    def to_json(self) -> dict:
        out = {"schema": SCHEMA, "n": self.n, "order": self.order,
               "truncation": self.truncation, "seed": self.seed, "format": self.format}
        if self.generator is not None:
            metric = self.metric if isinstance(self.metric, str) else [[format_rational(x) for x in r] for r in self.metric]
            gen = {"name": self.generator, "metric": metric}
            if self.parameters:
                gen["parameters"] = dict(self.parameters)
            out["generator"] = gen
        else:
            out["explicit"] = {
                "source_fiber_dim": self.source_fiber_dim,
                "target_fiber_dim": self.target_fiber_dim,
                "matrix": [[format_rational(x) for x in r] for r in self.matrix],
            }
        return out


def _fail(path: str, msg: str):
    raise ParseError(f"{path}: {msg}")


def _keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    extra = sorted(set(obj) - set(required) - set(optional))
    if extra:
        _fail(path, f"unknown field(s) {', '.join(extra)}")
    missing = [k for k in required if k not in obj]
    if missing:
        _fail(path, f"missing field(s) {', '.join(missing)}")


def _count(value, path, minimum=0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    if value < minimum:
        _fail(path, f"must be >= {minimum}")
    return value


def _rational(value, path) -> Fraction:
    if isinstance(value, float):
        _fail(path, "floats are not accepted; write rationals as \"num/den\" strings")
    try:
        return parse_rational(value)
    except ZeroDivisionError:
        _fail(path, "zero denominator")
    except (TypeError, ValueError) as exc:
        _fail(path, f"bad rational {value!r} ({exc})")


def _rows(value, path) -> tuple:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        _fail(path, "expected a list of rows")
    return tuple(tuple(_rational(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)) for i, r in enumerate(value))


def parse_metric(value, path="$.metric"):
    if isinstance(value, str):
        if value not in ("minkowski", "euclidean"):
            _fail(path, f"unknown metric {value!r}")
        return value
    return _rows(value, path)


def parse_spec(data: bytes | str, seed_default: int = 0) -> SystemSpec:
    """Validate a JSON system specification."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8 ({exc})") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    _keys(doc, "$", ("n",), ("schema", "order", "generator", "explicit", "truncation", "seed", "format"))
    if "schema" in doc and doc["schema"] != SCHEMA:
        _fail("$.schema", f"expected {SCHEMA!r}")
    n = _count(doc["n"], "$.n", 1)
    if ("generator" in doc) == ("explicit" in doc):
        _fail("$", "exactly one of 'generator' and 'explicit' is required")
    fmt = doc.get("format", "text")
    if fmt not in FORMATS:
        _fail("$.format", f"expected one of {', '.join(FORMATS)}")
    seed = doc.get("seed", seed_default)
    if isinstance(seed, bool) or not isinstance(seed, int):
        _fail("$.seed", "expected an integer")

    if "generator" in doc:
        g = doc["generator"]
        _keys(g, "$.generator", ("name",), ("metric", "parameters"))
        name = g["name"]
        if name not in GENERATORS:
            raise UnknownGenerator(f"unknown generator {name!r}; known: {', '.join(sorted(GENERATORS))}")
        gen = GENERATORS[name]
        metric = parse_metric(g.get("metric", "minkowski"), "$.generator.metric")
        params = g.get("parameters", {})
        _keys(params, "$.generator.parameters", (), gen.params)
        if name == "free":
            if "fiber_dim" in params:
                _count(params["fiber_dim"], "$.generator.parameters.fiber_dim", 1)
        elif "coupled" in params and not isinstance(params["coupled"], bool):
            _fail("$.generator.parameters.coupled", "expected true or false")
        order = doc.get("order", gen.order)
        if order is None:
            _fail("$.order", "required for this generator")
        order = _count(order, "$.order")
        if gen.order is not None and order != gen.order:
            raise ShapeError(f"generator {name} has order {gen.order}, spec says {order}")
        if n < gen.min_n:
            raise ShapeError(f"generator {name} needs n >= {gen.min_n}")
        if not isinstance(metric, str):
            if len(metric) != n or any(len(r) != n for r in metric):
                raise ShapeError(f"metric must be {n} x {n}")
            try:
                Metric.from_rows(metric)
            except ValueError as exc:
                raise ShapeError(f"metric: {exc}") from None
        truncation = _count(doc.get("truncation", order + 5), "$.truncation")
        if truncation < order:
            raise ShapeError(f"truncation {truncation} below the order {order}")
        return SystemSpec(n, order, truncation, seed, name, metric, dict(params), format=fmt)

    e = doc["explicit"]
    _keys(e, "$.explicit", ("source_fiber_dim", "target_fiber_dim", "matrix"))
    if "order" not in doc:
        _fail("$.order", "required for explicit systems")
    order = _count(doc["order"], "$.order")
    m = _count(e["source_fiber_dim"], "$.explicit.source_fiber_dim", 1)
    v = _count(e["target_fiber_dim"], "$.explicit.target_fiber_dim")
    rows = _rows(e["matrix"], "$.explicit.matrix")
    cols = sym_dim(n, order) * m
    if len(rows) != v:
        raise ShapeError(f"matrix has {len(rows)} rows, expected target_fiber_dim = {v}")
    for i, r in enumerate(rows):
        if len(r) != cols:
            raise ShapeError(f"matrix row {i} has {len(r)} columns, expected {cols} = dim S^{order} * {m}")
    truncation = _count(doc.get("truncation", order + 5), "$.truncation")
    if truncation < order:
        raise ShapeError(f"truncation {truncation} below the order {order}")
    return SystemSpec(n, order, truncation, seed, None, "minkowski", {}, m, v, rows, fmt)


def resolve_metric(spec: SystemSpec) -> Metric:
    if spec.metric == "minkowski":
        return Metric.minkowski(spec.n)
    if spec.metric == "euclidean":
        return Metric.euclidean(spec.n)
    return Metric.from_rows(spec.metric)


def build_symbol(spec: SystemSpec) -> SymbolMap:
    if spec.generator is None:
        mat = RationalMatrix(spec.matrix, sym_dim(spec.n, spec.order) * spec.source_fiber_dim)
        return SymbolMap(spec.n, spec.order, spec.source_fiber_dim, spec.target_fiber_dim, mat, "explicit")
    name = spec.generator
    if name == "free":
        m = spec.parameters.get("fiber_dim", 1)
        cols = sym_dim(spec.n, spec.order) * m
        return SymbolMap(spec.n, spec.order, m, 0, RationalMatrix.zeros(0, cols), "free")
    metric = resolve_metric(spec)
    if name == "einstein_vacuum":
        return ricci_symbol(metric)
    if name == "maxwell_source_free":
        return maxwell_symbol(metric)
    if name == "einstein_maxwell":
        return einstein_maxwell_symbol(metric)
    if name == "scalar_wave":
        return wave_symbol(metric)
    if name == "einstein_scalar":
        ric, wave = ricci_symbol(metric), wave_symbol(metric)
        if spec.parameters.get("coupled", False):
            coupling = scalar_coupling_symbol(metric)
        else:
            coupling = SymbolMap(spec.n, 2, ric.source_dim, 1, RationalMatrix.zeros(1, ric.matrix.ncols), "zero")
        return block_triangular_symbol(ric, coupling, wave)
    raise UnknownGenerator(name)
