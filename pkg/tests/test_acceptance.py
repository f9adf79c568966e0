"""Acceptance criteria 1 to 10.

Each test carries ``@pytest.mark.acceptance(number, title)``; the summary
hook in conftest prints one PASS/FAIL line per criterion after the run.
"""

import math
import time
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from scipy.integrate import quad

from traceconvex.calculus import AffineArg, hessian, hessian_from_second_derivative, sym_bruteforce
from traceconvex.certificate import (Certificate, CertTerm, block_expand, certify, certify_global, certify_local,
                                     expand_certificate, expand_raw_terms, gram_identity, hankel_H)
from traceconvex.cli import main
from traceconvex.codec import codec_read
from traceconvex.errors import NotConvex, NotConvexOnInterval
from traceconvex.linalg import ldl_rational, min_eigenvalue
from traceconvex.ncpoly import EXACT, FLOAT, H, H2, X, NcPoly, cyc_equal, cyclic_canonical, evaluate, parse_word
from traceconvex.positivity import global_psd_decompose
from traceconvex.unipoly import IntervalSpec, UniPoly, from_roots, parse_unipoly
from traceconvex.verify import (matrix_nonconvexity_witness, midpoint_convexity_fuzz, trace_positivity_fuzz,
                                verify_certificate)

F = Fraction
G = IntervalSpec.global_()
SEXTIC_TEXT = "15*x^2 - 5*x^4 + x^6"
SEXTIC = parse_unipoly(SEXTIC_TEXT)


def P(table, mode=EXACT):
    return NcPoly({parse_word(w): c for w, c in table.items()}, mode)


# -- 1 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(1, "sextic worked example: exact certificate, reference squares and Gram matrix")
def test_criterion_1_sextic_example(tmp_path, capsys):
    out = tmp_path / "sextic.json"
    start = time.perf_counter()
    code = main(["certify", "-p", SEXTIC_TEXT, "--out", str(out)])
    elapsed = time.perf_counter() - start
    capsys.readouterr()
    assert code == 0 and elapsed < 1.0
    c = codec_read(out.read_text())
    assert c.mode == EXACT
    report = verify_certificate(SEXTIC, c)
    assert report.passed and report.symbolic_residual == 0
    dec = global_psd_decompose(parse_unipoly("30x^4 - 60x^2 + 30"))
    assert dec.mode == EXACT and [(t.multiplier, t.squared_roots) for t in dec.terms] == [(30, (-1, 1))]

    s, t, u = 1 / math.sqrt(6), math.sqrt(5 / 2), math.sqrt(30) / 3
    q1 = P({"h*x*x": s, "x*h*x": -2 * s, "x*x*h": s}, FLOAT)
    q2 = P({"h*x*x": t, "x*x*h": -t}, FLOAT)
    q3 = P({"h": 3 * u, "h*x*x": -u, "x*h*x": -u, "x*x*h": -u}, FLOAT)
    reference = Certificate(G, FLOAT, tuple(CertTerm("Q", q) for q in (q1, q2, q3)))
    report = verify_certificate(SEXTIC, reference, tol=1e-12)
    assert report.passed and report.symbolic_residual <= 1e-12

    gram = [[30, -10, -10, -10], [-10, 6, 3, 1], [-10, 3, 4, 3], [-10, 1, 3, 6]]
    v = [P({"h": 1}), P({"h*x*x": 1}), P({"x*h*x": 1}), P({"x*x*h": 1})]
    vXv = NcPoly.zero()
    for i in range(4):
        for j in range(4):
            vXv = vXv + (v[i].involute() * v[j]).scale(F(gram[i][j]))
    assert cyc_equal(vXv, hessian(SEXTIC.to_ncpoly()), 0)


# -- 2 ----------------------------------------------------------------------------------

def _gram_in_basis(terms, basis):
    """Sum of scale * c c^T, with c the coefficients of each square in ``basis``."""
    G2 = [[F(0)] * len(basis) for _ in basis]
    for t in terms:
        assert set(t.poly.terms) <= set(basis)
        c = [F(t.poly.terms.get(w, 0)) for w in basis]
        for i in range(len(basis)):
            for j in range(len(basis)):
                G2[i][j] += F(t.scale) * c[i] * c[j]
    return G2


@pytest.mark.acceptance(2, "quartic certificate matches the hand-computed squares")
def test_criterion_2_quartic_squares():
    c = certify_global(parse_unipoly("x^4"))
    expanded = P({"x*h*h*x": 4, "h*x*x*h": 4, "x*h*x*h": 2, "h*x*h*x": 2})
    assert expand_certificate(c) == expanded
    assert cyc_equal(expanded, hessian(parse_unipoly("x^4").to_ncpoly()), 0)
    # two lists of squares agree up to an orthogonal remix iff their Gram matrices agree
    basis = [parse_word("h*x"), parse_word("x*h")]
    reference = [CertTerm("Q", P({"h*x": 1, "x*h": 1}), scale=3), CertTerm("Q", P({"h*x": 1, "x*h": -1}))]
    assert _gram_in_basis(c.terms, basis) == _gram_in_basis(reference, basis) == [[4, 2], [2, 4]]
    ref_cert = Certificate(G, EXACT, tuple(reference))
    assert expand_certificate(ref_cert) == expanded


# -- 3 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(3, "Hessian from a factored second derivative, 50 random factorizations")
def test_criterion_3_factored_hessian():
    rng = np.random.default_rng(3)
    start = time.perf_counter()
    for _ in range(50):
        d = int(rng.integers(0, 6))
        den = int(rng.integers(1, 5))
        roots = [F(int(rng.integers(-3 * den, 3 * den + 1)), den) for _ in range(d)]
        p = from_roots(roots).integrate().integrate()
        assert hessian(p.to_ncpoly()) == hessian_from_second_derivative([(F(1), roots)])
    assert time.perf_counter() - start < 10.0


# -- 4 ----------------------------------------------------------------------------------

def _moment(N, m):
    """``(N + 1) * integral_0^inf x**m / (1 + x)**(N + 2) dx`` by adaptive quadrature."""
    f = lambda x: x ** m / (1 + x) ** (N + 2)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    return (N + 1) * (quad(f, 0, 1, **opts)[0] + quad(f, 1, np.inf, **opts)[0])


@pytest.mark.acceptance(4, "Hankel blocks are PSD and match the moment integrals")
def test_criterion_4_hankel_sweep():
    for d in range(7):
        for k in range(5):
            N = 2 * d + k
            sizes = [math.comb(d, s) for s in range(d + 1)]
            for ell in range(k + 1):
                Hm = hankel_H(d, k, ell)
                assert min_eigenvalue(Hm.to_array()) >= -1e-12
                assert min_eigenvalue(np.array(block_expand(Hm.to_array().tolist(), sizes))) >= -1e-12
                _, D = ldl_rational([list(r) for r in Hm.matrix])
                assert all(v >= 0 for v in D)
                if N > 10:
                    continue
                unscaled = (N + 1) * math.factorial(ell) * math.factorial(k - ell)
                for r in range(d + 1):
                    for s in range(d + 1):
                        entry = float(Hm.matrix[r][s] * unscaled)
                        assert abs(entry - _moment(N, ell + r + s)) <= 1e-9


# -- 5 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(5, "cyclic-class coefficients of the symmetrizer follow the binomial formula")
def test_criterion_5_coefficient_formula():
    checked = 0
    for d in range(4):
        for k in range(5):
            N = 2 * d + k
            if N + 2 > 8:
                continue
            letters = list(range(3, 3 + N))  # k a-factors, then two copies of the d b-factors
            args = [NcPoly.letter(y) for y in letters] + [NcPoly.letter(H), NcPoly.letter(H2)]
            canon = cyclic_canonical(sym_bruteforce(args))
            per_set = {}
            for w, c in canon.terms.items():
                i = w.index(H)
                rot = w[i:] + w[:i]
                between = frozenset(rot[1:rot.index(H2)])
                per_set[between] = per_set.get(between, 0) + c
            for size in range(N + 1):
                for A in combinations(letters, size):
                    assert per_set[frozenset(A)] == F(1, math.comb(N, size) * (N + 1))
                    checked += 1
            assert sum(per_set.values()) == 1
    assert checked > 0


# -- 6 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(6, "Gram identities equal the symmetrizer up to cyclic equivalence")
def test_criterion_6_gram_identities():
    rng = np.random.default_rng(6)

    def rat():
        return F(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))

    for d in range(3):
        for k in range(3):
            for _ in range(20):
                a, b = [rat() for _ in range(k)], [rat() for _ in range(d)]
                lhs = expand_raw_terms(gram_identity(a, b, mode=EXACT))
                args = ([AffineArg.affine(v) for v in a] + [AffineArg.affine(v) for v in b] * 2
                        + [AffineArg.along(H), AffineArg.along(H2)])
                assert cyc_equal(lhs, sym_bruteforce(args, mode=EXACT), 0)


# -- 7 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(7, "cubic on a ray: single weighted square, and failure on the opposite ray")
def test_criterion_7_local_certificate():
    p = parse_unipoly("x^3")
    c = certify_local(p, IntervalSpec.ray_right(0))
    assert len(c.terms) == 1
    (t,) = c.terms
    assert t.shape == "R" and t.weight == "x-b"
    root = t.root_poly()
    assert set(root.terms) == {(H,)} and abs(abs(root.terms[(H,)]) - math.sqrt(6)) <= 1e-15
    report = verify_certificate(p, c)
    assert report.passed and report.symbolic_residual == 0
    with pytest.raises(NotConvexOnInterval) as info:
        certify_local(p, IntervalSpec.ray_left(0))
    assert info.value.witness < 0 and info.value.value < 0


# -- 8 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(8, "midpoint fuzz separates the cubic from convex polynomials")
def test_criterion_8_midpoint_fuzz():
    r = midpoint_convexity_fuzz(parse_unipoly("x^3"), G, 1, 100, seed=1, eps=1e-8)
    assert not r.passed and r.witness is not None
    x, y = float(r.witness["X"][0, 0]), float(r.witness["Y"][0, 0])
    assert (x ** 3 + y ** 3) / 2 - ((x + y) / 2) ** 3 < -1e-8
    for text in ("x^4", SEXTIC_TEXT):
        r = midpoint_convexity_fuzz(parse_unipoly(text), G, 8, 500, seed=1, eps=1e-8)
        assert r.passed and r.trials_failed == 0 and r.trials_run == 500


# -- 9 ----------------------------------------------------------------------------------

@pytest.mark.acceptance(9, "quartic Hessian is trace-positive but not matrix-positive")
def test_criterion_9_matrix_witness():
    A = matrix_nonconvexity_witness(parse_unipoly("x^4"), 2, 10_000, seed=1)
    assert A is not None
    Xm, Hm = A[X], A[H]
    # direct formula: the Hessian of x^4 is 2 * sum of the six placements of two h among four letters
    M = 2 * (Xm @ Xm @ Hm @ Hm + Xm @ Hm @ Xm @ Hm + Xm @ Hm @ Hm @ Xm
             + Hm @ Xm @ Xm @ Hm + Hm @ Xm @ Hm @ Xm + Hm @ Hm @ Xm @ Xm)
    assert np.allclose(M, evaluate(hessian(parse_unipoly("x^4").to_float().to_ncpoly()), A))
    assert np.trace(M) >= -1e-8
    assert np.linalg.eigvalsh((M + M.T) / 2)[0] < -1e-6


# -- 10 ---------------------------------------------------------------------------------

def _convex_corpus(rng):
    out = []
    for i in range(30):
        if i % 2 == 0:
            # generic float: p'' = g1^2 + g2^2 with random real coefficients
            q = UniPoly.of([], FLOAT)
            for _ in range(2):
                g = UniPoly.of([float(v) for v in rng.uniform(-2, 2, int(rng.integers(1, 5)))], FLOAT)
                q = q + g * g
        else:
            # rational: squares of rational factorizations plus positive quadratics
            q = UniPoly.of([])
            for _ in range(int(rng.integers(1, 3))):
                roots = [F(int(v), 2) for v in rng.integers(-6, 7, int(rng.integers(0, 3)))]
                sq = from_roots(roots)
                quad_factor = UniPoly.of([F(int(rng.integers(0, 4))), 0, 1]) if rng.random() < 0.5 else UniPoly.of([1])
                q = q + (sq * sq * quad_factor).scale(F(int(rng.integers(1, 5))))
        out.append(q.integrate().integrate())
    return out


def _nonconvex_corpus(rng):
    out = []
    for i in range(30):
        g = UniPoly.of([F(int(v), 2) for v in rng.integers(-4, 5, int(rng.integers(1, 3)))])
        sos = g * g + UniPoly.of([F(int(rng.integers(1, 4)))])
        if i % 2 == 0:
            r = F(int(rng.integers(-12, 13)), 4)
            q = UniPoly.linear(r) * sos
            if rng.random() < 0.5:
                q = q.scale(F(-1))
        else:
            r1 = F(int(rng.integers(-12, 11)), 4)
            r2 = r1 + F(int(rng.integers(2, 9)), 4)
            q = (UniPoly.linear(r1) * UniPoly.linear(r2)).scale(F(-1)) * sos
        out.append(q.integrate().integrate())
    return out


def _agree(p):
    """(certified and verified, fuzz clean)."""
    try:
        c = certify(p, G)
    except NotConvex:
        certified = False
    else:
        certified = verify_certificate(p, c).passed
        assert certified, f"verify rejected the certificate of {p}"
    tr = trace_positivity_fuzz(p, G, 4, 200, seed=10)
    mid = midpoint_convexity_fuzz(p, G, 1, 200, seed=10)
    return certified, tr.passed and mid.passed


@pytest.mark.acceptance(10, "certify, verify and the fuzzers agree on a mixed corpus")
def test_criterion_10_soundness_pipe():
    rng = np.random.default_rng(10)
    start = time.perf_counter()
    convex, nonconvex = _convex_corpus(rng), _nonconvex_corpus(rng)
    assert all(p.degree <= 10 for p in convex + nonconvex)
    for p in convex:
        assert _agree(p) == (True, True), str(p)
    for p in nonconvex:
        assert _agree(p) == (False, False), str(p)
    assert time.perf_counter() - start < 120.0
