"""JSON reading and writing of certificates.

Exact certificates store rationals as ``"p/q"`` strings and keep a ``scale``
per term.  Float certificates fold ``sqrt(scale)`` into the coefficients and
store them as JSON numbers (``repr`` round-trips doubles exactly).
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .certificate import SHAPES, CertTerm, Certificate
from .errors import InputError, ParseError
from .ncpoly import EXACT, FLOAT, H, X, NcPoly, parse_word, word_key, word_str
from .unipoly import GLOBAL, INTERVAL, KINDS, RAY_LEFT, RAY_RIGHT, IntervalSpec, parse_number

R_WEIGHTS = ("x-a", "b-x", "x-b", "a-x")


def _num_out(c, mode):
    if mode == EXACT:
        return str(Fraction(c))
    return float(c)


def _endpoint_out(v):
    # float endpoints stay JSON numbers so that strings always read back exactly
    return str(v) if isinstance(v, Fraction) else float(v)


def _poly_out(p: NcPoly, mode):
    return [[_num_out(p.terms[w], mode), word_str(w)] for w in sorted(p.terms, key=word_key)]


def to_document(c: Certificate) -> dict:
    doc = {"kind": c.interval.kind}
    if c.interval.a is not None:
        doc["a"] = _endpoint_out(c.interval.a)
    if c.interval.b is not None:
        doc["b"] = _endpoint_out(c.interval.b)
    doc["mode"] = c.mode
    terms = []
    for t in c.terms:
        entry = {"shape": t.shape}
        if t.shape == "R":
            entry["weight"] = t.weight
        if c.mode == FLOAT:
            poly = t.poly if t.scale == 1 else t.poly.scale(math.sqrt(t.scale))
            entry["poly"] = _poly_out(poly, FLOAT)
        else:
            entry["poly"] = _poly_out(t.poly, EXACT)
            if t.scale != 1:
                entry["scale"] = str(Fraction(t.scale))
        terms.append(entry)
    doc["terms"] = terms
    if c.meta:
        doc["meta"] = {k: v for k, v in c.meta.items() if isinstance(v, (int, float, str))}
    return doc


def codec_write(c: Certificate, pretty: bool = False) -> str:
    """JSON text; ``pretty`` puts each term on its own line."""
    doc = to_document(c)
    if not pretty:
        return json.dumps(doc)
    head = {k: v for k, v in doc.items() if k != "terms"}
    lines = [f" {json.dumps(k)}: {json.dumps(v)}," for k, v in head.items()]
    body = ",\n".join("  " + json.dumps(t) for t in doc["terms"])
    return "{\n" + "\n".join(lines) + '\n "terms": [\n' + body + "\n ]\n}"


# -- reading ------------------------------------------------------------------

def _number_in(value, mode, where):
    if isinstance(value, bool):
        raise ParseError(f"{where}: boolean is not a number")
    if isinstance(value, int):
        return Fraction(value) if mode == EXACT else float(value)
    if isinstance(value, float):
        if mode == EXACT:
            raise ParseError(f"{where}: float coefficient in an exact certificate")
        if not math.isfinite(value):
            raise ParseError(f"{where}: non-finite number")
        return value
    if isinstance(value, str):
        try:
            v = parse_number(value)
        except (InputError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{where}: bad number {value!r}") from exc
        if mode == EXACT and not isinstance(v, Fraction):
            raise ParseError(f"{where}: inexact number {value!r} in an exact certificate")
        return Fraction(v) if mode == EXACT else float(v)
    raise ParseError(f"{where}: expected a number, got {type(value).__name__}")


def _poly_in(items, mode, where) -> NcPoly:
    if not isinstance(items, list) or not items:
        raise ParseError(f"{where}: poly must be a nonempty list")
    table = {}
    for pair in items:
        if not isinstance(pair, list) or len(pair) != 2 or not isinstance(pair[1], str):
            raise ParseError(f"{where}: each poly entry must be [coefficient, word]")
        try:
            word = parse_word(pair[1])
        except InputError as exc:
            raise ParseError(f"{where}: {exc}") from exc
        if not set(word) <= {X, H}:
            raise ParseError(f"{where}: words may only use the letters x and h")
        table[word] = table.get(word, 0) + _number_in(pair[0], mode, where)
    p = NcPoly(table, mode)
    if p.is_zero():
        raise ParseError(f"{where}: zero polynomial")
    return p


def from_document(doc) -> Certificate:
    if not isinstance(doc, dict):
        raise ParseError("certificate document must be a JSON object")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r}")
    mode = doc.get("mode", EXACT)
    if mode not in (EXACT, FLOAT):
        raise ParseError(f"unknown mode {mode!r}")
    need = {GLOBAL: (), INTERVAL: ("a", "b"), RAY_RIGHT: ("b",), RAY_LEFT: ("a",)}[kind]
    for key in ("a", "b"):
        if key in need and key not in doc:
            raise ParseError(f"kind {kind} needs endpoint {key!r}")
        if key not in need and key in doc:
            raise ParseError(f"kind {kind} takes no endpoint {key!r}")
    ends = {}
    for key in need:
        v = doc[key]
        if isinstance(v, str):
            try:
                ends[key] = parse_number(v)
            except (InputError, ValueError, ZeroDivisionError) as exc:
                raise ParseError(f"bad endpoint {key}={v!r}") from exc
        else:
            ends[key] = _number_in(v, FLOAT, f"endpoint {key}")
    try:
        interval = IntervalSpec(kind, ends.get("a"), ends.get("b"))
    except InputError as exc:
        raise ParseError(str(exc)) from exc
    if mode == EXACT and not interval.exact:
        raise ParseError("exact certificate with inexact endpoints")

    raw_terms = doc.get("terms")
    if not isinstance(raw_terms, list):
        raise ParseError("terms must be a list")
    terms = []
    for i, entry in enumerate(raw_terms):
        where = f"term {i}"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: must be an object")
        shape = entry.get("shape")
        if shape not in SHAPES:
            raise ParseError(f"{where}: unknown shape {shape!r}")
        weight = entry.get("weight")
        if shape == "R":
            if weight not in R_WEIGHTS:
                raise ParseError(f"{where}: R needs a weight among {R_WEIGHTS}")
        elif weight is not None:
            raise ParseError(f"{where}: only R terms carry a weight")
        poly = _poly_in(entry.get("poly"), mode, where)
        scale = _number_in(entry.get("scale", 1), mode, f"{where} scale")
        if scale < 0:
            raise ParseError(f"{where}: negative scale")
        terms.append(CertTerm(shape, poly, weight, scale))
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("meta must be an object")
    return Certificate(interval, mode, tuple(terms), dict(meta))


def codec_read(text: str) -> Certificate:
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise ParseError(f"not a JSON document: {exc}") from exc
    return from_document(doc)
