"""Real factorization of univariate polynomials.

Exact inputs go through a square-free (Yun) decomposition, so multiplicities
are known exactly; each square-free factor is solved numerically with
Aberth-Ehrlich iteration, the number of real roots is fixed by a Sturm count,
and rational roots / rational quadratic factors are recovered and confirmed by
exact arithmetic.  Float inputs are solved directly and multiplicities come
from clustering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InputError, NumericalError
from .ncpoly import EXACT, FLOAT
from .unipoly import UniPoly

ABERTH_MAX_ITER = 500
# double roots separate by ~sqrt(eps); an m-fold root by ~eps**(1/m)
CLUSTER_BASE = 1e-12
REAL_IMAG_TOL = 1e-8


def aberth(coeffs, seed: int = 0, max_iter: int = ABERTH_MAX_ITER) -> np.ndarray:
    """All complex roots of the polynomial with ascending ``coeffs``."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1:
        return np.zeros(0, dtype=complex)
    c = c / c[-1]
    if n == 1:
        return np.array([-c[0]])
    desc = c[::-1]
    ddesc = np.polyder(desc)
    radius = 1 + np.max(np.abs(c[:-1]))
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * (np.arange(n) / n) + rng.uniform(0, 2 * np.pi / n, n)
    # Cauchy-style start radius shrunk toward the bulk of the roots
    r0 = min(radius, max(abs(c[0]) ** (1.0 / n), 1e-3) * 2)
    z = r0 * np.exp(1j * angles)
    for _ in range(max_iter):
        pz = np.polyval(desc, z)
        dz = np.polyval(ddesc, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            w = ratio / (1 - ratio * s)
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        # relative test: an absolute one would accept iterates stalled near 0
        if np.all(np.abs(w) <= 1e-15 * np.abs(z)):
            return z
    raise NumericalError("Aberth iteration did not converge")


def complex_roots(coeffs, seed: int = 0) -> np.ndarray:
    """Aberth-Ehrlich, falling back to companion-matrix eigenvalues.

    Exact zero roots (vanishing low coefficients) are split off first: the
    iteration starts near ``|c_0|**(1/n)`` and would otherwise stall at 0.
    """
    coeffs = list(coeffs)
    zeros = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
        zeros += 1
    if zeros:
        return np.concatenate([np.zeros(zeros, dtype=complex), complex_roots(coeffs, seed)])
    try:
        z = aberth(coeffs, seed)
    except NumericalError:
        z = np.roots(np.asarray(coeffs, dtype=float)[::-1])
        if len(z) != len(coeffs) - 1 or not np.all(np.isfinite(z)):
            raise NumericalError("root finding failed (Aberth and companion fallback)")
    return z


def _newton_polish(coeffs, z, steps=3):
    desc = np.asarray(coeffs, dtype=complex)[::-1]
    ddesc = np.polyder(desc)
    for _ in range(steps):
        dz = np.polyval(ddesc, z)
        if dz == 0:
            break
        step = np.polyval(desc, z) / dz
        if not np.isfinite(step):
            break
        z = z - step
    return z


# -- exact helpers ----------------------------------------------------------

def poly_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic() if not a.is_zero() else a


def squarefree_decomposition(f: UniPoly) -> list:
    """Yun's algorithm: monic square-free ``g_i`` with ``monic(f) = prod g_i**i``."""
    f = f.monic()
    out = []
    fp = f.derivative()
    a = poly_gcd(f, fp)
    b = f.divmod(a)[0]
    c = fp.divmod(a)[0]
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        g = poly_gcd(b, d)
        out.append((g, i))
        b = b.divmod(g)[0]
        c = d.divmod(g)[0]
        d = c - b.derivative()
        i += 1
    return [(g, m) for g, m in out if g.degree > 0]


def sturm_real_root_count(f: UniPoly) -> int:
    """Number of distinct real roots of an exact polynomial."""
    seq = [f, f.derivative()]
    while not seq[-1].is_zero() and seq[-1].degree > 0:
        seq.append(-(seq[-2].divmod(seq[-1])[1]))
    seq = [s for s in seq if not s.is_zero()]

    def changes(signs):
        signs = [s for s in signs if s != 0]
        return sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)

    at_pos = [1 if s.leading > 0 else -1 for s in seq]
    at_neg = [(1 if s.leading > 0 else -1) * (-1) ** s.degree for s in seq]
    return changes(at_neg) - changes(at_pos)


def _integer_leading(g: UniPoly) -> int:
    den = math.lcm(*[Fraction(c).denominator for c in g.coeffs])
    ints = [int(Fraction(c) * den) for c in g.coeffs]
    cont = math.gcd(*ints)
    return abs(ints[-1] // cont)


# -- factorization ----------------------------------------------------------

@dataclass(frozen=True)
class Factorization:
    """``leading * prod (x - r)**m * prod ((x - alpha)**2 + beta_sq)**m``."""

    leading: object
    real_roots: tuple  # ((r, m), ...) sorted by r
    complex_pairs: tuple  # ((alpha, beta_sq, m), ...)
    exact: bool

    @property
    def mode(self) -> str:
        return EXACT if self.exact else FLOAT

    def pairs_with_beta(self):
        return [(al, math.sqrt(float(bs)), m) for al, bs, m in self.complex_pairs]

    def expand(self) -> UniPoly:
        mode = self.mode
        out = UniPoly.constant(self.leading, mode)
        for r, m in self.real_roots:
            out = out * UniPoly.linear(r, mode) ** m
        for al, bs, m in self.complex_pairs:
            quad = UniPoly.linear(al, mode) ** 2 + UniPoly.constant(bs, mode)
            out = out * quad ** m
        return out

    def residual(self, q: UniPoly) -> float:
        diff = self.expand() - q.to_mode(self.mode)
        return float(diff.max_abs_coefficient())


def _factor_squarefree(g: UniPoly, seed: int):
    """Roots of a monic exact square-free factor: (reals, pairs, exact_ok)."""
    fc = [float(c) for c in g.coeffs]
    z = complex_roots(fc, seed)
    nreal = sturm_real_root_count(g)
    order = np.argsort(np.abs(z.imag), kind="stable")
    real_part = sorted(float(_newton_polish(fc, complex(z[i].real)).real) for i in order[:nreal])
    cplx = [complex(_newton_polish(fc, complex(z[i]))) for i in order[nreal:]]
    upper = sorted((w for w in cplx if w.imag > 0), key=lambda w: (w.real, w.imag))
    if 2 * len(upper) != len(cplx):
        raise NumericalError("complex roots do not pair into conjugates")

    # Snap each numerical root to a nearby rational candidate and confirm it by
    # exact division of what is left of g.  g is square-free, so a factor that
    # was already taken out cannot be accepted a second time; closest
    # candidates are tried first so that a root is not claimed by a neighbour.
    lead_int = max(_integer_leading(g), 1)
    rest = g
    exact_ok = True
    snapped = [(Fraction(r).limit_denominator(lead_int), r) for r in real_part]
    found = {}
    for cand, r in sorted(snapped, key=lambda t: abs(float(t[0]) - t[1])):
        lin = UniPoly.linear(cand, EXACT)
        quo, rem = rest.divmod(lin)
        if rem.is_zero():
            rest = quo
            found[r] = cand
    reals = []
    for r in real_part:
        if r in found:
            reals.append(found[r])
        else:
            exact_ok = False
            reals.append(r)
    candidates = []
    for w in upper:
        lin = Fraction(-2 * w.real).limit_denominator(lead_int)
        const = Fraction(w.real ** 2 + w.imag ** 2).limit_denominator(lead_int ** 2)
        dist = abs(float(lin) + 2 * w.real) + abs(float(const) - abs(w) ** 2)
        candidates.append((dist, w, lin, const))
    found = {}
    for dist, w, lin, const in sorted(candidates, key=lambda t: t[0]):
        quad = UniPoly((const, lin, 1), EXACT)
        quo, rem = rest.divmod(quad)
        if rem.is_zero() and lin * lin < 4 * const:
            rest = quo
            found[w] = (lin, const)
    pairs = []
    for w in upper:
        if w in found:
            lin, const = found[w]
            al = -lin / 2
            pairs.append((al, const - al * al))
        else:
            exact_ok = False
            pairs.append((w.real, w.imag ** 2))
    return reals, pairs, exact_ok


def _cluster(z: np.ndarray):
    """Group roots into multiplicity clusters; returns [(centroid, size)].

    A group of ``m`` roots is accepted when all of them lie within
    ``CLUSTER_BASE**(1/m)`` (relative) of their centroid; larger groups win.
    """
    pts = [complex(v) for v in z]
    free = list(range(len(pts)))
    out = []
    while free:
        best = None
        for i in free:
            near = sorted(free, key=lambda j: abs(pts[j] - pts[i]))
            for m in range(len(near), 1, -1):
                group = near[:m]
                cen = np.mean([pts[j] for j in group])
                spread = max(abs(pts[j] - cen) for j in group)
                if spread <= CLUSTER_BASE ** (1.0 / m) * max(1.0, abs(cen)):
                    if best is None or m > len(best[0]) or (m == len(best[0]) and spread < best[1]):
                        best = (group, spread)
                    break
        if best is None:
            out += [(pts[j], 1) for j in free]
            break
        group = best[0]
        out.append((complex(np.mean([pts[j] for j in group])), len(group)))
        free = [j for j in free if j not in group]
    return out


def real_factorization(q: UniPoly, tol: float = 1e-9, seed: int = 0) -> Factorization:
    """Leading coefficient, real roots and complex-conjugate pairs of ``q``."""
    if q.is_zero():
        raise InputError("cannot factor the zero polynomial")
    if q.degree == 0:
        return Factorization(q.leading, (), (), q.mode == EXACT)

    if q.mode == EXACT:
        reals, pairs, exact = [], [], True
        for g, m in squarefree_decomposition(q):
            rs, ps, ok = _factor_squarefree(g, seed)
            exact = exact and ok
            reals += [(r, m) for r in rs]
            pairs += [(al, bs, m) for al, bs in ps]
        lead = q.leading
        if not exact:
            lead = float(lead)
            reals = [(float(r), m) for r, m in reals]
            pairs = [(float(al), float(bs), m) for al, bs, m in pairs]
        reals.sort(key=lambda t: t[0])
        fact = Factorization(lead, tuple(reals), tuple(pairs), exact)
    else:
        z = complex_roots(list(q.coeffs), seed)
        reals, pairs = [], []
        for c, m in _cluster(z):
            # an m-fold root is a simple root of the (m-1)-th derivative
            dq = q
            for _ in range(m - 1):
                dq = dq.derivative()
            c = complex(_newton_polish(list(dq.coeffs), c, steps=5))
            if abs(c.imag) <= REAL_IMAG_TOL * max(1.0, abs(c.real)):
                reals.append((c.real, m))
            elif c.imag > 0:
                pairs.append((c.real, c.imag ** 2, m))
        reals.sort(key=lambda t: t[0])
        fact = Factorization(q.leading, tuple(reals), tuple(pairs), False)

    if fact.exact:
        if fact.residual(q) != 0:
            raise NumericalError("exact factorization failed to reproduce the input")
    else:
        scale = max(1.0, float(q.max_abs_coefficient()))
        if fact.residual(q) > max(tol, 1e-8) * scale:
            raise NumericalError(f"factorization residual {fact.residual(q):.3e} too large")
    return fact
