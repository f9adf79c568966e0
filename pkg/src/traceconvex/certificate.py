"""Sum-of-hermitian-squares certificates for noncommutative Hessians.

For a term ``A * w(x) * prod (x - b_k)**2`` of a nonnegativity decomposition of
``p''``, the Hessian contribution is ``A * Sym(x - a_1, .., x - b_1, .., h, h)``
(the ``a_i`` being the roots of the linear weight factors).  Up to cyclic
equivalence that symmetrizer equals

    sum over subsets M of the a-factors:
        n_M(x) * W^T * m_M(x) * G_|M| * W

where ``m_M`` collects the factors in ``M`` (they sit between the two ``h``),
``n_M`` the rest, ``W`` stacks the vectors ``f_s`` and ``G_l`` is a block
expansion of a PSD Hankel matrix.  Factoring each ``G_l`` turns the identity
into hermitian squares, possibly weighted by the interval generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Sequence

import numpy as np

from .calculus import hessian
from .errors import InputError, InternalError, NotConvex, NotConvexOnInterval, NotNonnegative, NumericalError
from .linalg import DEFAULT_TOL, psd_factor, psd_factor_exact
from .ncpoly import EXACT, FLOAT, H, H2, X, NcPoly, coerce_scalar, cyc_residual, word_key
from .positivity import decompose, legal_weights, weight_factors, weight_poly
from .unipoly import GLOBAL, INTERVAL, IntervalSpec, UniPoly, second_derivative

SHAPES = ("Q", "R", "T", "U")
LEGAL_SHAPES = {GLOBAL: {"Q"}, "ray_right": {"Q", "R"}, "ray_left": {"Q", "R"}, INTERVAL: set(SHAPES)}
FLOAT_BINOMIAL_LIMIT = 60


def _mode_of(values) -> str:
    return EXACT if all(isinstance(v, Rational) for v in values) else FLOAT


# -- Hankel blocks ---------------------------------------------------------------

@dataclass(frozen=True)
class HankelH:
    d: int
    k: int
    ell: int
    matrix: tuple  # (d+1) x (d+1) nested tuples of Fractions

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix])


def hankel_H(d: int, k: int, ell: int, mode: str = EXACT) -> HankelH:
    """``H[r][s] = 1 / ((2d+k+1) * ell! * (k-ell)! * C(2d+k, ell+r+s))``."""
    if not 0 <= ell <= k:
        raise InputError(f"need 0 <= ell <= k, got ell={ell}, k={k}")
    if d < 0:
        raise InputError("d must be nonnegative")
    N = 2 * d + k
    if mode == FLOAT and N > FLOAT_BINOMIAL_LIMIT:
        raise InputError(f"2d+k = {N} too large for float mode")
    pref = Fraction(1, (N + 1) * math.factorial(ell) * math.factorial(k - ell))
    rows = tuple(tuple(pref / math.comb(N, ell + r + s) for s in range(d + 1)) for r in range(d + 1))
    return HankelH(d, k, ell, rows)


def block_expand(Hm, sizes: Sequence[int]):
    """Replace entry ``(i, j)`` by an ``sizes[i] x sizes[j]`` block of that value."""
    Hm = [list(row) for row in Hm]
    if len(Hm) != len(sizes) or any(len(row) != len(sizes) for row in Hm):
        raise InputError("block sizes must match the matrix dimension")
    out = []
    for i, ni in enumerate(sizes):
        row = []
        for j, nj in enumerate(sizes):
            row += [Hm[i][j]] * nj
        out += [list(row) for _ in range(ni)]
    return out


# -- the W vector ----------------------------------------------------------------

@dataclass(frozen=True)
class WVector:
    """Stacked ``f_0, .., f_d``: entry for subset S is ``prod_S (x-b) * h * prod_rest (x-b)``."""

    roots: tuple
    direction: int
    entries: tuple
    subsets: tuple

    @property
    def d(self) -> int:
        return len(self.roots)

    @property
    def block_sizes(self) -> list:
        return [math.comb(self.d, s) for s in range(self.d + 1)]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]


def _linear_nc(shift, mode) -> NcPoly:
    return NcPoly({(X,): 1, (): -coerce_scalar(shift, mode)}, mode)


def w_vector(roots: Sequence, direction: int = H, mode: str | None = None) -> WVector:
    roots = tuple(roots)
    if mode is None:
        mode = _mode_of(roots)
    d = len(roots)
    lin = [_linear_nc(b, mode) for b in roots]
    h = NcPoly.letter(direction, mode)
    entries, subsets = [], []
    for s in range(d + 1):
        for S in combinations(range(d), s):
            left = NcPoly.constant(1, mode)
            right = NcPoly.constant(1, mode)
            for i in range(d):
                if i in S:
                    left = left * lin[i]
                else:
                    right = right * lin[i]
            entries.append(left * h * right)
            subsets.append(S)
    return WVector(roots, direction, tuple(entries), tuple(subsets))


# -- Gram identities ------------------------------------------------------------------

@dataclass(frozen=True)
class RawTerm:
    """``left(x) * W_left^T * mid(x) * gram * W_right``."""

    left: UniPoly
    left_idx: tuple
    gram: tuple
    mid: UniPoly
    mid_idx: tuple
    w_left: WVector
    w_right: WVector

    @property
    def ell(self) -> int:
        return len(self.mid_idx)


def gram_identity(a_weights: Sequence, roots: Sequence, directions=(H, H2),
                  mode: str | None = None) -> list:
    """Raw Gram terms whose sum is cyclically equivalent to
    ``Sym(x - a_1, .., x - a_k, x - b_1, .., x - b_d, x - b_1, .., x - b_d, h1, h2)``."""
    a_weights, roots = tuple(a_weights), tuple(roots)
    k, d = len(a_weights), len(roots)
    if k > 2:
        raise InputError("at most two linear weight factors are supported")
    if mode is None:
        mode = _mode_of(a_weights + roots)
    W1 = w_vector(roots, directions[0], mode)
    W2 = W1 if directions[1] == directions[0] else w_vector(roots, directions[1], mode)
    sizes = W1.block_sizes
    out = []
    for ell in range(k + 1):
        Hl = hankel_H(d, k, ell)
        mult = math.factorial(ell) * math.factorial(k - ell)
        gram = block_expand([[v * mult for v in row] for row in Hl.matrix], sizes)
        if mode == FLOAT:
            gram = [[float(v) for v in row] for row in gram]
        gram = tuple(tuple(row) for row in gram)
        for M in combinations(range(k), ell):
            left = UniPoly.constant(1, mode)
            mid = UniPoly.constant(1, mode)
            for i in range(k):
                lin = UniPoly.linear(a_weights[i], mode)
                if i in M:
                    mid = mid * lin
                else:
                    left = left * lin
            rest = tuple(i for i in range(k) if i not in M)
            out.append(RawTerm(left, rest, gram, mid, M, W1, W2))
    return out


def expand_raw_terms(terms: Sequence[RawTerm]) -> NcPoly:
    if not terms:
        raise InputError("no raw terms")
    mode = terms[0].left.mode
    acc = NcPoly.zero(mode)
    for t in terms:
        n_nc, m_nc = t.left.to_ncpoly(), t.mid.to_ncpoly()
        for i, wi in enumerate(t.w_left.entries):
            combo = NcPoly.zero(mode)
            for j, wj in enumerate(t.w_right.entries):
                if t.gram[i][j]:
                    combo = combo + wj.scale(t.gram[i][j])
            acc = acc + n_nc * wi.involute() * m_nc * combo
    return acc


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class CertTerm:
    """One weighted hermitian square, contributing ``scale`` times:

    Q: q^T q;  R: r^T w r;  T: t^T (x-a)(b-x) t;  U: (x-a) u^T (b-x) u.
    """

    shape: str
    poly: NcPoly
    weight: str | None = None
    scale: object = 1

    def root_poly(self) -> NcPoly:
        """The polynomial with the scale folded in (float)."""
        return self.poly.to_float().scale(math.sqrt(float(self.scale)))


@dataclass(frozen=True)
class Certificate:
    interval: IntervalSpec
    mode: str
    terms: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def counts(self) -> dict:
        out = {s: 0 for s in SHAPES}
        for t in self.terms:
            out[t.shape] += 1
        return out

    def structural_problems(self) -> list:
        problems = []
        legal = LEGAL_SHAPES[self.interval.kind]
        weights = legal_weights(self.interval) - {"1", "(x-a)(b-x)"}
        for i, t in enumerate(self.terms):
            if t.shape not in legal:
                problems.append(f"term {i}: shape {t.shape} not allowed on {self.interval.kind}")
            if t.shape == "R" and t.weight not in weights:
                problems.append(f"term {i}: weight {t.weight!r} not allowed on {self.interval.kind}")
            if t.poly.is_zero():
                problems.append(f"term {i}: zero polynomial")
            elif not t.poly.is_homogeneous_in(H, 1) or not t.poly.letters() <= {X, H}:
                problems.append(f"term {i}: polynomial is not homogeneous of degree one in h")
            if t.scale < 0:
                problems.append(f"term {i}: negative scale")
            if t.poly.mode != self.mode:
                problems.append(f"term {i}: coefficient mode differs from certificate")
        return problems


def _weight_nc(weight: str, interval: IntervalSpec, mode: str) -> NcPoly:
    return weight_poly(weight, interval, mode).to_ncpoly()


def expand_certificate(c: Certificate) -> NcPoly:
    mode = c.mode
    acc = NcPoly.zero(mode)
    iv = c.interval
    for t in c.terms:
        p, pt = t.poly, t.poly.involute()
        if t.shape == "Q":
            body = pt * p
        elif t.shape == "R":
            body = pt * _weight_nc(t.weight, iv, mode) * p
        elif t.shape == "T":
            body = pt * _weight_nc("(x-a)(b-x)", iv, mode) * p
        elif t.shape == "U":
            body = _weight_nc("x-a", iv, mode) * pt * _weight_nc("b-x", iv, mode) * p
        else:
            raise InputError(f"unknown shape {t.shape!r}")
        acc = acc + body.scale(t.scale)
    return acc


def _classify(left_names: tuple, mid_names: tuple, v: NcPoly):
    """Rotate ``n * v^T * m * v`` into a canonical shape: (shape, weight, poly)."""
    L, M = tuple(sorted(left_names)), tuple(sorted(mid_names))
    if not L and not M:
        return "Q", None, v
    if not L and len(M) == 1:
        return "R", M[0], v
    if len(L) == 1 and not M:
        return "R", L[0], v.involute()
    if not L and len(M) == 2:
        return "T", None, v
    if len(L) == 2 and not M:
        return "T", None, v.involute()
    if L == ("x-a",) and M == ("b-x",):
        return "U", None, v
    if L == ("b-x",) and M == ("x-a",):
        return "U", None, v.involute()
    raise InternalError(f"unexpected weight placement {L} / {M}")


def _normalize(poly: NcPoly, scale):
    """Make the first coefficient 1, moving its square into ``scale``."""
    w0 = min(poly.terms, key=word_key)
    c = poly.terms[w0]
    inv = (Fraction(1) / c) if poly.mode == EXACT else 1.0 / c
    return poly.scale(inv), scale * c * c


def _gram_rows(gram, mode, tol, report):
    if mode == EXACT:
        return psd_factor_exact(gram)
    R = psd_factor(np.array(gram, dtype=float), tol, report)
    return [(1.0, list(row)) for row in R]


def _certify(p: UniPoly, interval: IntervalSpec, tol: float, seed: int, mode: str | None) -> Certificate:
    if mode == FLOAT:
        p = p.to_float()
    q = second_derivative(p)
    try:
        dec = decompose(q, interval, tol, seed)
    except NotNonnegative as exc:
        cls = NotConvex if interval.kind == GLOBAL else NotConvexOnInterval
        raise cls(exc.witness, exc.value) from exc
    cmode = dec.mode
    if mode == EXACT and cmode != EXACT:
        raise NumericalError("no exact certificate: the decomposition needs irrational roots")
    report = {"clipped": 0.0}
    merged: dict = {}
    order = []
    for term in dec.terms:
        factors = weight_factors(term.weight, interval)
        shifts = [coerce_scalar(s, cmode) for _, s, _ in factors]
        names = [n for n, _, _ in factors]
        roots = [coerce_scalar(r, cmode) for r in term.squared_roots]
        for raw in gram_identity(shifts, roots, directions=(H, H), mode=cmode):
            left_names = tuple(names[i] for i in raw.left_idx)
            mid_names = tuple(names[i] for i in raw.mid_idx)
            for dl, vec in _gram_rows(raw.gram, cmode, tol, report):
                scale = term.multiplier * dl
                if scale < 0:
                    raise InternalError("negative multiplier in certificate assembly")
                v = NcPoly.zero(cmode)
                for coef, wi in zip(vec, raw.w_left.entries):
                    if coef:
                        v = v + wi.scale(coef)
                if v.is_zero() or scale == 0:
                    continue
                shape, weight, poly = _classify(left_names, mid_names, v)
                poly, scale = _normalize(poly, scale)
                key = (shape, weight, poly)
                if key not in merged:
                    order.append(key)
                    merged[key] = scale
                else:
                    merged[key] = merged[key] + scale

    terms = []
    for shape, weight, poly in order:
        scale = merged[(shape, weight, poly)]
        if cmode == FLOAT:
            poly = poly.scale(math.sqrt(scale))
            scale = 1.0
        terms.append(CertTerm(shape, poly, weight, scale))
    cert = Certificate(interval, cmode, tuple(terms), {"clipped_mass": report["clipped"]})

    problems = cert.structural_problems()
    if problems:
        raise InternalError("; ".join(problems))
    target = hessian(p.to_mode(cmode).to_ncpoly())
    residual = cyc_residual(expand_certificate(cert), target)
    cert.meta["residual"] = float(residual)
    if cmode == EXACT and residual != 0:
        raise InternalError("exact certificate does not reproduce the Hessian")
    if cmode == FLOAT and residual > tol * max(1.0, float(target.max_abs_coefficient())):
        raise NumericalError(f"certificate residual {float(residual):.3e} exceeds tolerance")
    return cert


def certify_global(p: UniPoly, tol: float = DEFAULT_TOL, seed: int = 0, mode: str | None = None) -> Certificate:
    return _certify(p, IntervalSpec.global_(), tol, seed, mode)


def certify_local(p: UniPoly, interval: IntervalSpec, tol: float = DEFAULT_TOL, seed: int = 0,
                  mode: str | None = None) -> Certificate:
    if interval.kind == GLOBAL:
        raise InputError("certify_local needs a bounded interval or a ray")
    return _certify(p, interval, tol, seed, mode)


def certify(p: UniPoly, interval: IntervalSpec | None = None, tol: float = DEFAULT_TOL, seed: int = 0,
            mode: str | None = None) -> Certificate:
    return _certify(p, interval or IntervalSpec.global_(), tol, seed, mode)
