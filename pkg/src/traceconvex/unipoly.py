"""Commutative univariate polynomials, their text grammar, and real domains."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import InputError, ParseError
from .ncpoly import EXACT, FLOAT, MODES, X, NcPoly, coerce_scalar


@dataclass(frozen=True)
class UniPoly:
    """Dense polynomial, coefficients in ascending order of degree."""

    coeffs: tuple
    mode: str = EXACT

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown coefficient mode {self.mode!r}")
        cs = [coerce_scalar(c, self.mode) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, coeffs: Sequence, mode: str | None = None) -> "UniPoly":
        if mode is None:
            mode = EXACT if all(isinstance(c, Rational) for c in coeffs) else FLOAT
        return cls(tuple(coeffs), mode)

    @classmethod
    def x(cls, mode: str = EXACT) -> "UniPoly":
        return cls((0, 1), mode)

    @classmethod
    def constant(cls, c, mode: str = EXACT) -> "UniPoly":
        return cls((c,), mode)

    @classmethod
    def linear(cls, root, mode: str = EXACT) -> "UniPoly":
        """The monic factor ``x - root``."""
        return cls((-coerce_scalar(root, mode), 1), mode)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else coerce_scalar(0, self.mode)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _lift(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            if other.mode != self.mode:
                raise InputError(f"coefficient mode mismatch: {self.mode} vs {other.mode}")
            return other
        return UniPoly.constant(other, self.mode)

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return UniPoly(tuple(u + v for u, v in zip(a, b)), self.mode)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly(tuple(-c for c in self.coeffs), self.mode)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "UniPoly":
        c = coerce_scalar(c, self.mode)
        return UniPoly(tuple(c * v for v in self.coeffs), self.mode)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return self.scale(other)
        other = self._lift(other)
        if self.is_zero() or other.is_zero():
            return UniPoly((), self.mode)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(tuple(out), self.mode)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = UniPoly.constant(1, self.mode)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "UniPoly":
        return UniPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i), self.mode)

    def integrate(self) -> "UniPoly":
        """Antiderivative with zero constant term."""
        if self.mode == EXACT:
            body = tuple(Fraction(c) / (i + 1) for i, c in enumerate(self.coeffs))
        else:
            body = tuple(c / (i + 1) for i, c in enumerate(self.coeffs))
        return UniPoly((0,) + body, self.mode) if self.coeffs else self

    def divmod(self, other: "UniPoly"):
        other = self._lift(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.leading
        quot = [coerce_scalar(0, self.mode)] * max(len(rem) - dq, 0)
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            quot[i - dq] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return UniPoly(tuple(quot), self.mode), UniPoly(tuple(rem[:dq]), self.mode)

    def monic(self) -> "UniPoly":
        return self.scale(1 / self.leading if self.mode == FLOAT else Fraction(1) / self.leading)

    def to_float(self) -> "UniPoly":
        return self if self.mode == FLOAT else UniPoly(tuple(float(c) for c in self.coeffs), FLOAT)

    def to_mode(self, mode: str) -> "UniPoly":
        if mode == self.mode:
            return self
        if mode == FLOAT:
            return self.to_float()
        raise InputError("cannot convert a float polynomial to exact mode")

    def to_ncpoly(self, letter: int = X) -> NcPoly:
        return NcPoly({(letter,) * i: c for i, c in enumerate(self.coeffs)}, self.mode)

    def max_abs_coefficient(self):
        return max((abs(c) for c in self.coeffs), default=0)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mag = -c if c < 0 else c
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{_fmt(mag)}*{mono}"
            else:
                body = _fmt(mag)
            sign = "-" if c < 0 else "+"
            parts.append(("-" + body) if not parts and sign == "-" else body if not parts else f"{sign} {body}")
        return " ".join(parts)


def _fmt(c):
    return str(c) if isinstance(c, Fraction) else repr(c)


def second_derivative(p: UniPoly) -> UniPoly:
    return p.derivative().derivative()


def from_roots(roots: Sequence, leading=1, mode: str | None = None) -> UniPoly:
    if mode is None:
        mode = EXACT if all(isinstance(r, Rational) for r in list(roots) + [leading]) else FLOAT
    out = UniPoly.constant(leading, mode)
    for r in roots:
        out = out * UniPoly.linear(r, mode)
    return out


# -- text grammar -----------------------------------------------------------

_NUM = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?(\s*/\s*\d+)?")
_INT = re.compile(r"\d+")


def parse_number(text: str):
    """Integer, decimal or ``p/q`` literal as a Fraction; exponent notation gives a float."""
    s = text.strip()
    m = _NUM.fullmatch(s.lstrip("+-"))
    if not m:
        raise ParseError(f"bad number {text!r}", 0)
    sign = -1 if s.startswith("-") else 1
    return sign * _number_value(m)


def _number_value(m):
    body, exp, den = m.group(1), m.group(2), m.group(3)
    if exp:
        if den:
            return float(body + exp) / int(den.split("/")[1])
        return float(body + exp)
    val = Fraction(body)
    if den:
        d = int(den.split("/")[1])
        if d == 0:
            raise ZeroDivisionError
        val = val / d
    return val


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, msg):
        raise ParseError(msg, self.pos)

    def parse(self):
        terms = []
        if self.peek() == "":
            self.error("empty polynomial")
        sign = 1
        if self.peek() in "+-":
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        terms.append(self.term(sign))
        while self.peek():
            ch = self.peek()
            if ch not in "+-":
                self.error(f"unexpected character {ch!r}")
            self.pos += 1
            terms.append(self.term(-1 if ch == "-" else 1))
        return terms

    def term(self, sign):
        coeff = Fraction(sign)
        power = 0
        seen = False
        while True:
            ch = self.peek()
            if ch and (ch.isdigit() or ch == "."):
                m = _NUM.match(self.text, self.pos)
                if not m:
                    self.error("bad number")
                try:
                    val = _number_value(m)
                except ZeroDivisionError:
                    self.error("division by zero in literal")
                coeff = coeff * val
                self.pos = m.end()
            elif ch == "x":
                self.pos += 1
                k = 1
                if self.peek() == "^" or self.text.startswith("**", self.pos):
                    self.pos += 2 if self.text.startswith("**", self.pos) else 1
                    self.skip()
                    m = _INT.match(self.text, self.pos)
                    if not m:
                        self.error("expected integer exponent")
                    k = int(m.group())
                    self.pos = m.end()
                power += k
            else:
                self.error("expected a number or 'x'" if not seen else "expected a factor after '*'")
            seen = True
            nxt = self.peek()
            if nxt == "*" and not self.text.startswith("**", self.pos):
                self.pos += 1
                continue
            if nxt and (nxt.isdigit() or nxt == "." or nxt == "x"):
                continue
            return coeff, power


def parse_unipoly(text: str) -> UniPoly:
    """Parse e.g. ``"15*x^2 - 5*x^4 + x^6"``.

    Integer, decimal and ``p/q`` literals are exact; any literal written with an
    exponent (``1e-3``) switches the result to float mode.
    """
    terms = _Parser(text).parse()
    exact = all(isinstance(c, Fraction) for c, _ in terms)
    mode = EXACT if exact else FLOAT
    deg = max(k for _, k in terms)
    cs = [0] * (deg + 1)
    for c, k in terms:
        cs[k] = cs[k] + c
    return UniPoly(tuple(cs), mode)


# -- domains ----------------------------------------------------------------

GLOBAL, INTERVAL, RAY_RIGHT, RAY_LEFT = "global", "interval", "ray_right", "ray_left"
KINDS = (GLOBAL, INTERVAL, RAY_RIGHT, RAY_LEFT)


@dataclass(frozen=True)
class IntervalSpec:
    """An open real domain: all of R, (a, b), (b, inf) or (-inf, a).

    ``RayRight(b)`` stores ``b``; ``RayLeft(a)`` stores ``a``.
    """

    kind: str = GLOBAL
    a: object = None
    b: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown interval kind {self.kind!r}")
        need_a = self.kind in (INTERVAL, RAY_LEFT)
        need_b = self.kind in (INTERVAL, RAY_RIGHT)
        for name, need in (("a", need_a), ("b", need_b)):
            v = getattr(self, name)
            if need:
                if v is None or not math.isfinite(float(v)):
                    raise InputError(f"{self.kind}: endpoint {name} must be finite")
                if isinstance(v, bool) or not isinstance(v, (Rational, float)):
                    raise InputError(f"bad endpoint {v!r}")
                if isinstance(v, Rational) and not isinstance(v, Fraction):
                    object.__setattr__(self, name, Fraction(v))
            elif v is not None:
                raise InputError(f"{self.kind} takes no endpoint {name}")
        if self.kind == INTERVAL and not self.a < self.b:
            raise InputError("interval needs a < b")

    @classmethod
    def global_(cls) -> "IntervalSpec":
        return cls(GLOBAL)

    @classmethod
    def interval(cls, a, b) -> "IntervalSpec":
        return cls(INTERVAL, a, b)

    @classmethod
    def ray_right(cls, b) -> "IntervalSpec":
        return cls(RAY_RIGHT, None, b)

    @classmethod
    def ray_left(cls, a) -> "IntervalSpec":
        return cls(RAY_LEFT, a, None)

    @property
    def lower(self):
        """Finite left endpoint or None."""
        return {INTERVAL: self.a, RAY_RIGHT: self.b}.get(self.kind)

    @property
    def upper(self):
        return {INTERVAL: self.b, RAY_LEFT: self.a}.get(self.kind)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Rational) for v in (self.a, self.b) if v is not None)

    def contains(self, x) -> bool:
        lo, hi = self.lower, self.upper
        return (lo is None or x > lo) and (hi is None or x < hi)

    def __str__(self):
        if self.kind == GLOBAL:
            return "R"
        if self.kind == INTERVAL:
            return f"({self.a}, {self.b})"
        if self.kind == RAY_RIGHT:
            return f"({self.b}, inf)"
        return f"(-inf, {self.a})"
