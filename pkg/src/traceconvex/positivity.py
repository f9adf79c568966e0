"""Nonnegativity certificates for univariate polynomials on R, intervals and rays.

Every decomposition writes ``q`` as a sum of terms
``A * weight(x) * prod (x - b_k)**2`` with ``A > 0`` and the weight drawn from
the generators allowed on the domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import (InputError, InternalError, NotNonnegative, NotNonnegativeOnInterval,
                     NumericalError, ResourceError)
from .ncpoly import EXACT, FLOAT, coerce_scalar
from .roots import Factorization, real_factorization
from .unipoly import GLOBAL, INTERVAL, RAY_LEFT, RAY_RIGHT, IntervalSpec, UniPoly, second_derivative

ENDPOINT_TOL = 1e-9
MAX_TERMS = 2 ** 16

# weight name -> (count of (x - lower), count of (upper - x))
WEIGHTS = {
    INTERVAL: {(0, 0): "1", (1, 0): "x-a", (0, 1): "b-x", (1, 1): "(x-a)(b-x)"},
    RAY_RIGHT: {(0, 0): "1", (1, 0): "x-b"},
    RAY_LEFT: {(0, 0): "1", (0, 1): "a-x"},
    GLOBAL: {(0, 0): "1"},
}


def legal_weights(interval: IntervalSpec) -> set:
    return set(WEIGHTS[interval.kind].values())


def weight_factors(weight: str, interval: IntervalSpec) -> list:
    """Linear factors of a weight as ``(name, shift, flipped)``.

    ``flipped`` marks ``c - x = -(x - c)``.
    """
    if weight not in legal_weights(interval):
        raise InputError(f"weight {weight!r} is not legal on {interval.kind}")
    table = {
        "1": [],
        "x-a": [("x-a", interval.a, False)],
        "b-x": [("b-x", interval.b, True)],
        "(x-a)(b-x)": [("x-a", interval.a, False), ("b-x", interval.b, True)],
        "x-b": [("x-b", interval.b, False)],
        "a-x": [("a-x", interval.a, True)],
    }
    return table[weight]


def weight_poly(weight: str, interval: IntervalSpec, mode: str) -> UniPoly:
    out = UniPoly.constant(1, mode)
    for _, shift, flipped in weight_factors(weight, interval):
        lin = UniPoly.linear(shift, mode)
        out = out * (-lin if flipped else lin)
    return out


@dataclass(frozen=True)
class PositivityTerm:
    multiplier: object
    weight: str
    squared_roots: tuple

    def expand(self, interval: IntervalSpec, mode: str) -> UniPoly:
        out = weight_poly(self.weight, interval, mode).scale(self.multiplier)
        for r in self.squared_roots:
            out = out * UniPoly.linear(r, mode) ** 2
        return out


@dataclass(frozen=True)
class PositivityDecomposition:
    interval: IntervalSpec
    terms: tuple
    mode: str

    def expand(self) -> UniPoly:
        out = UniPoly((), self.mode)
        for t in self.terms:
            out = out + t.expand(self.interval, self.mode)
        return out

    def residual(self, q: UniPoly) -> float:
        return float((self.expand() - q.to_mode(self.mode)).max_abs_coefficient())


# -- witnesses ----------------------------------------------------------------

def _domain_box(interval: IntervalSpec, fact: Factorization | None):
    span = 1.0
    if fact is not None and fact.real_roots:
        span = 1.0 + max(abs(float(r)) for r, _ in fact.real_roots)
    lo = interval.lower
    hi = interval.upper
    flo = float(lo) if lo is not None else (float(hi) - 2 * span - 10 if hi is not None else -2 * span - 10)
    fhi = float(hi) if hi is not None else (float(lo) + 2 * span + 10 if lo is not None else 2 * span + 10)
    return flo, fhi


def _candidates(interval: IntervalSpec, fact: Factorization | None):
    lo, hi = interval.lower, interval.upper
    if interval.kind == GLOBAL:
        yield from (1, -1, 0, 2, -2)
    elif interval.kind == INTERVAL:
        w = hi - lo
        yield from (lo + w / 2, lo + w / 4, lo + 3 * w / 4)
    elif interval.kind == RAY_RIGHT:
        yield from (lo + 1, lo + Fraction(1, 2), lo + 2)
    else:
        yield from (hi - 1, hi - Fraction(1, 2), hi - 2)
    roots = sorted(float(r) for r, _ in fact.real_roots) if fact is not None else []
    flo, fhi = _domain_box(interval, fact)
    pts = [flo] + [r for r in roots if flo < r < fhi] + [fhi]
    for u, v in zip(pts, pts[1:]):
        yield (u + v) / 2
    for r in roots:
        for eps in (1e-3, 1e-6):
            yield r - eps * max(1.0, abs(r))
            yield r + eps * max(1.0, abs(r))
    yield from np.linspace(flo, fhi, 2001)[1:-1]


def find_negative_point(q: UniPoly, interval: IntervalSpec, fact: Factorization | None = None):
    """A point of the open domain where ``q < 0``, or None if none was found."""
    for x0 in _candidates(interval, fact):
        if q.mode == EXACT:
            if isinstance(x0, (int, Fraction)):
                points = [Fraction(x0)]
            else:
                # prefer a short rational near the float candidate
                points = [Fraction(float(x0)).limit_denominator(1000), Fraction(float(x0))]
        else:
            points = [float(x0)]
        for pt in points:
            if interval.contains(pt):
                val = q(pt)
                if val < 0:
                    return pt, val
    return None


def _fail(q, interval, fact, why):
    hit = find_negative_point(q, interval, fact)
    if hit is None:
        raise NumericalError(f"{why}, but no negative sample point was found")
    cls = NotNonnegative if interval.kind == GLOBAL else NotNonnegativeOnInterval
    raise cls(hit[0], hit[1])


# -- decompositions -------------------------------------------------------------

def _decompose(q: UniPoly, interval: IntervalSpec, tol: float, seed: int) -> PositivityDecomposition:
    if q.is_zero():
        mode = q.mode if interval.exact else FLOAT
        return PositivityDecomposition(interval, (), mode)
    fact = real_factorization(q, tol, seed)
    mode = EXACT if fact.exact and interval.exact and q.mode == EXACT else FLOAT
    lo = coerce_scalar(interval.lower, mode) if interval.lower is not None else None
    hi = coerce_scalar(interval.upper, mode) if interval.upper is not None else None
    cs = lambda v: coerce_scalar(v, mode)  # noqa: E731

    sign = 1
    squares = []
    # each generator is a list of alternatives (constant, n_lower, n_upper, roots)
    generators = []
    for r, m in fact.real_roots:
        r = cs(r)
        squares += [r] * (m // 2)
        if m % 2 == 0:
            continue
        near_lo = lo is not None and abs(r - lo) <= ENDPOINT_TOL * max(1.0, abs(float(lo)))
        near_hi = hi is not None and abs(r - hi) <= ENDPOINT_TOL * max(1.0, abs(float(hi)))
        if mode == EXACT:
            near_lo = lo is not None and r == lo
            near_hi = hi is not None and r == hi
        if near_lo:
            generators.append([(cs(1), 1, 0, ())])
        elif lo is not None and r < lo:
            generators.append([(cs(1), 1, 0, ()), (lo - r, 0, 0, ())])
        elif near_hi:
            sign = -sign
            generators.append([(cs(1), 0, 1, ())])
        elif hi is not None and r > hi:
            sign = -sign
            generators.append([(cs(1), 0, 1, ()), (r - hi, 0, 0, ())])
        else:
            _fail(q, interval, fact, f"odd-multiplicity root {r} inside the domain")
    for al, bs, m in fact.complex_pairs:
        for _ in range(m):
            generators.append([(cs(1), 0, 0, (cs(al),)), (cs(bs), 0, 0, ())])

    lead = cs(fact.leading) * sign
    if lead < 0:
        _fail(q, interval, fact, "negative leading constant")

    count = 1
    for g in generators:
        count *= len(g)
        if count > MAX_TERMS:
            raise ResourceError(f"decomposition would need more than {MAX_TERMS} terms")

    merged = {}
    for combo in itertools.product(*generators):
        c = lead
        n_lo = n_hi = 0
        roots = list(squares)
        for const, a, b, rs in combo:
            c = c * const
            n_lo += a
            n_hi += b
            roots += rs
        roots += [lo] * (n_lo // 2) + [hi] * (n_hi // 2)
        weight = WEIGHTS[interval.kind][(n_lo % 2, n_hi % 2)]
        key = (weight, tuple(sorted(roots)))
        merged[key] = merged.get(key, 0) + c

    terms = []
    for (weight, roots), c in merged.items():
        if c == 0:
            continue
        if c < 0:
            raise InternalError("negative multiplier in positivity decomposition")
        terms.append(PositivityTerm(c, weight, roots))
    dec = PositivityDecomposition(interval, tuple(terms), mode)

    res = dec.residual(q)
    if mode == EXACT and res != 0:
        raise InternalError("exact decomposition does not reproduce its input")
    if mode == FLOAT and res > max(tol, 1e-8) * max(1.0, float(q.max_abs_coefficient())):
        raise NumericalError(f"decomposition residual {res:.3e} exceeds tolerance")
    return dec


def global_psd_decompose(q: UniPoly, tol: float = 1e-9, seed: int = 0) -> PositivityDecomposition:
    return _decompose(q, IntervalSpec.global_(), tol, seed)


def interval_decompose(q: UniPoly, interval: IntervalSpec, tol: float = 1e-9,
                       seed: int = 0) -> PositivityDecomposition:
    if interval.kind == GLOBAL:
        raise InputError("interval_decompose needs a bounded interval or a ray")
    return _decompose(q, interval, tol, seed)


def decompose(q: UniPoly, interval: IntervalSpec, tol: float = 1e-9, seed: int = 0):
    return _decompose(q, interval, tol, seed)


class ConvexityVerdict(NamedTuple):
    convex: bool
    witness: object
    decomposition: PositivityDecomposition | None


def is_convex_on(p: UniPoly, interval: IntervalSpec, tol: float = 1e-9, seed: int = 0) -> ConvexityVerdict:
    """Convexity of ``p`` on the domain; a failing verdict carries ``x0`` with ``p''(x0) < 0``."""
    try:
        dec = _decompose(second_derivative(p), interval, tol, seed)
    except NotNonnegative as exc:
        return ConvexityVerdict(False, exc.witness, None)
    return ConvexityVerdict(True, None, dec)
