"""Noncommutative directional derivatives and the symmetrizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from numbers import Rational
from typing import Sequence

from .errors import InputError, ResourceError
from .ncpoly import EXACT, FLOAT, H, X, NcPoly, coerce_scalar

SYM_MAX_ARITY = 10


@dataclass(frozen=True)
class AffineArg:
    """Either the affine factor ``x - shift`` or a bare direction letter."""

    shift: object = None
    direction: int | None = None

    def __post_init__(self):
        if (self.shift is None) == (self.direction is None):
            raise InputError("AffineArg needs exactly one of shift / direction")

    @classmethod
    def affine(cls, shift) -> "AffineArg":
        return cls(shift=shift)

    @classmethod
    def along(cls, letter: int) -> "AffineArg":
        return cls(direction=letter)

    def to_poly(self, mode: str) -> NcPoly:
        if self.direction is not None:
            return NcPoly.letter(self.direction, mode)
        return NcPoly({(X,): 1, (): -coerce_scalar(self.shift, mode)}, mode)


def _infer_mode(scalars) -> str:
    return EXACT if all(isinstance(s, Rational) for s in scalars) else FLOAT


def directional_derivative(p: NcPoly, order: int, direction: int = H, variable: int = X) -> NcPoly:
    """``d^order/dt^order p(x + t*h)`` at ``t = 0``, expanded exactly."""
    if order < 1:
        raise InputError("derivative order must be at least 1")
    if direction == variable or direction in p.letters():
        raise InputError("direction letter must not occur in the polynomial")
    fact = math.factorial(order)
    table = {}
    for w, c in p.terms.items():
        slots = [i for i, a in enumerate(w) if a == variable]
        for chosen in combinations(slots, order):
            nw = list(w)
            for i in chosen:
                nw[i] = direction
            nw = tuple(nw)
            table[nw] = table.get(nw, 0) + c * fact
    return NcPoly(table, p.mode)


def hessian(p: NcPoly) -> NcPoly:
    return directional_derivative(p, 2, H)


def sym_bruteforce(args: Sequence, mode: str | None = None) -> NcPoly:
    """Average of the products of ``args`` over all orderings.

    ``args`` may mix :class:`AffineArg` and :class:`NcPoly`.  The sum over all
    ``d!`` orderings is evaluated by recursion on the last factor, grouping
    equal arguments, which yields the same exact sum without materialising
    every permutation.
    """
    d = len(args)
    if d > SYM_MAX_ARITY:
        raise ResourceError(f"symmetrizer arity {d} exceeds {SYM_MAX_ARITY}")
    if mode is None:
        modes = {a.mode for a in args if isinstance(a, NcPoly)}
        shifts = [a.shift for a in args if isinstance(a, AffineArg) and a.shift is not None]
        mode = FLOAT if FLOAT in modes or _infer_mode(shifts) == FLOAT else EXACT
    polys = [a.to_poly(mode) if isinstance(a, AffineArg) else a.to_mode(mode) for a in args]

    distinct: list[NcPoly] = []
    counts: list[int] = []
    for q in polys:
        for i, r in enumerate(distinct):
            if r == q:
                counts[i] += 1
                break
        else:
            distinct.append(q)
            counts.append(1)

    memo = {tuple(0 for _ in counts): NcPoly.constant(1, mode)}

    def total(state):
        got = memo.get(state)
        if got is not None:
            return got
        acc = NcPoly.zero(mode)
        for i, m in enumerate(state):
            if m:
                prev = state[:i] + (m - 1,) + state[i + 1:]
                acc = acc + (total(prev) * distinct[i]).scale(m)
        memo[state] = acc
        return acc

    whole = total(tuple(counts))
    return whole.scale(Fraction(1, math.factorial(d)) if mode == EXACT else 1.0 / math.factorial(d))


def sym_naive(args: Sequence[NcPoly]) -> NcPoly:
    """Literal average over ``itertools.permutations``; only for small arity."""
    d = len(args)
    if d > 7:
        raise ResourceError("sym_naive is limited to arity 7")
    mode = args[0].mode if args else EXACT
    acc = NcPoly.zero(mode)
    for perm in permutations(args):
        term = NcPoly.constant(1, mode)
        for y in perm:
            term = term * y
        acc = acc + term
    return acc.scale(Fraction(1, math.factorial(d)) if mode == EXACT else 1.0 / math.factorial(d))


def elementary_symmetric(values: Sequence, mode: str) -> list:
    """``e_0..e_d`` of ``values``."""
    e = [coerce_scalar(1, mode)] + [coerce_scalar(0, mode)] * len(values)
    for v in values:
        v = coerce_scalar(v, mode)
        for j in range(len(e) - 1, 0, -1):
            e[j] = e[j] + e[j - 1] * v
    return e


def sym_powers(k: int, directions=(H, H), mode: str = EXACT) -> NcPoly:
    """Closed form of Sym(x, ..., x, h1, h2) with ``k`` copies of x."""
    h1, h2 = directions
    n = k + 2
    if h1 == h2:
        c = Fraction(2, n * (n - 1))
        pairs = combinations(range(n), 2)
    else:
        c = Fraction(1, n * (n - 1))
        pairs = permutations(range(n), 2)
    table = {}
    for i, j in pairs:
        w = [X] * n
        w[i] = h1
        w[j] = h2
        table[tuple(w)] = c if mode == EXACT else float(c)
    return NcPoly(table, mode)


def sym_affine(roots: Sequence, directions=(H, H), mode: str | None = None) -> NcPoly:
    """Sym(x - b_1, ..., x - b_d, h1, h2) via expansion over subsets of the roots."""
    if mode is None:
        mode = _infer_mode(roots)
    d = len(roots)
    e = elementary_symmetric([-coerce_scalar(b, mode) for b in roots], mode)
    acc = NcPoly.zero(mode)
    for j in range(d + 1):
        if e[j] != 0:
            acc = acc + sym_powers(d - j, directions, mode).scale(e[j])
    return acc


def hessian_from_second_derivative(factored: Sequence, mode: str | None = None) -> NcPoly:
    """Hessian of any ``p`` whose ordinary second derivative is
    ``sum(A * prod(x - r for r in roots))`` over the ``(A, roots)`` pairs."""
    if not factored:
        raise InputError("need at least one factored term")
    if mode is None:
        scalars = [A for A, _ in factored] + [r for _, roots in factored for r in roots]
        mode = _infer_mode(scalars)
    acc = NcPoly.zero(mode)
    for A, roots in factored:
        acc = acc + sym_affine(list(roots), (H, H), mode).scale(coerce_scalar(A, mode))
    return acc
