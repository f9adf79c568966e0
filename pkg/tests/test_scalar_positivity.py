"""Root finding and nonnegativity decompositions of univariate polynomials."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from traceconvex.errors import InputError, NotNonnegative, NotNonnegativeOnInterval, ResourceError
from traceconvex.ncpoly import EXACT, FLOAT
from traceconvex.positivity import (MAX_TERMS, decompose, global_psd_decompose, interval_decompose,
                                    is_convex_on, legal_weights, weight_poly)
from traceconvex.roots import aberth, complex_roots, real_factorization, squarefree_decomposition, sturm_real_root_count
from traceconvex.unipoly import IntervalSpec, UniPoly, from_roots, parse_unipoly

G = IntervalSpec.global_()
F = Fraction


class TestFactorization:
    def test_simple_roots(self):
        f = real_factorization(parse_unipoly("x^2 - 1"))
        assert f.exact and f.real_roots == ((-1, 1), (1, 1))

    def test_double_root(self):
        f = real_factorization(parse_unipoly("x^2 - 2x + 1"))
        assert f.real_roots == ((1, 2),)

    def test_complex_pair(self):
        f = real_factorization(parse_unipoly("x^2 + 1"))
        assert f.real_roots == () and f.complex_pairs == ((0, 1, 1),)

    def test_irrational_roots_fall_back_to_float(self):
        f = real_factorization(parse_unipoly("x^2 - 2"))
        assert not f.exact
        assert [r for r, _ in f.real_roots] == pytest.approx([-2 ** 0.5, 2 ** 0.5])

    def test_rational_root_not_borrowed_by_irrational_neighbour(self):
        # roots -1 and about -1.4656; rounding the latter to an integer also hits a root
        q = parse_unipoly("x^4 + 2x^3 + x^2 + x + 1")
        f = real_factorization(q)
        assert len(f.real_roots) == 2 and f.residual(q) <= 1e-12

    def test_float_multiplicities_by_clustering(self):
        q = from_roots([1.0] * 4 + [-1.0] * 4)
        f = real_factorization(q)
        assert [(round(r, 8), m) for r, m in f.real_roots] == [(-1.0, 4), (1.0, 4)]

    def test_zero_polynomial(self):
        with pytest.raises(InputError):
            real_factorization(UniPoly.of([]))

    def test_sturm_and_yun(self):
        q = from_roots([F(1), F(1), F(2), F(-3), F(-3), F(-3)])
        assert sturm_real_root_count(q) == 3
        assert [(g.degree, m) for g, m in squarefree_decomposition(q)] == [(1, 1), (1, 2), (1, 3)]

    def test_aberth_against_known_roots(self):
        z = np.sort_complex(aberth([-6, 11, -6, 1], seed=3))
        assert np.allclose(z, [1, 2, 3])

    @pytest.mark.parametrize("c0", [0.0, 1e-30])
    def test_far_root_found_next_to_a_cluster_at_zero(self, c0):
        z = complex_roots([c0, 0, 0, 0, 0.875, -0.5])
        assert np.max(z.real) == pytest.approx(1.75, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=5), min_size=1, max_size=6))
    def test_exact_rational_roots_recovered(self, roots):
        q = from_roots(roots, leading=F(3, 2))
        f = real_factorization(q)
        assert f.exact and f.residual(q) == 0
        assert sorted(r for r, m in f.real_roots for _ in range(m)) == sorted(roots)


class TestDecompositions:
    def test_global_examples(self):
        d = global_psd_decompose(parse_unipoly("x^4 - 2x^2 + 1"))
        assert [(t.multiplier, t.weight, t.squared_roots) for t in d.terms] == [(1, "1", (-1, 1))]
        d = global_psd_decompose(parse_unipoly("x^2 + 1"))
        assert sorted((t.multiplier, t.squared_roots) for t in d.terms) == [(1, ()), (1, (0,))]
        with pytest.raises(NotNonnegative) as info:
            global_psd_decompose(parse_unipoly("-x^2"))
        assert info.value.witness == 1

    def test_interval_examples(self):
        d = interval_decompose(parse_unipoly("6x"), IntervalSpec.ray_right(0))
        assert [(t.multiplier, t.weight, t.squared_roots) for t in d.terms] == [(6, "x-b", ())]
        d = interval_decompose(parse_unipoly("1 - x^2"), IntervalSpec.interval(-1, 1))
        assert [(t.multiplier, t.weight, t.squared_roots) for t in d.terms] == [(1, "(x-a)(b-x)", ())]
        with pytest.raises(NotNonnegativeOnInterval) as info:
            interval_decompose(parse_unipoly("x"), IntervalSpec.interval(-1, 1))
        assert info.value.witness == F(-1, 2)

    def test_interval_decompose_needs_bounds(self):
        with pytest.raises(InputError):
            interval_decompose(parse_unipoly("1"), G)

    def test_odd_degree_is_negative_globally(self):
        with pytest.raises(NotNonnegative):
            global_psd_decompose(parse_unipoly("x^3 + x"))

    def test_term_guard(self):
        pairs = 17
        q = UniPoly.of([1])
        for j in range(pairs):
            q = q * UniPoly.of([1 + j, 0, 1])
        with pytest.raises(ResourceError):
            global_psd_decompose(q)
        assert 2 ** pairs > MAX_TERMS

    @pytest.mark.parametrize("interval", [
        IntervalSpec.interval(F(-1), F(2)), IntervalSpec.ray_right(F(-1, 2)), IntervalSpec.ray_left(F(3, 2)),
        IntervalSpec.interval(0.5, 1.75),
    ])
    @settings(max_examples=25, deadline=None)
    @given(data=st.data())
    def test_round_trip_from_allowed_forms(self, interval, data):
        """Sums of allowed weighted squares decompose and re-expand to themselves."""
        weights = sorted(legal_weights(interval))
        mode = EXACT if interval.exact else FLOAT
        q = UniPoly.of([], mode)
        for _ in range(data.draw(st.integers(1, 3))):
            w = data.draw(st.sampled_from(weights))
            roots = data.draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3), max_size=2))
            A = data.draw(st.fractions(min_value=F(1, 2), max_value=5, max_denominator=2))
            sq = from_roots(roots, mode=mode)
            q = q + (weight_poly(w, interval, mode) * sq * sq).scale(A if mode == EXACT else float(A))
        dec = decompose(q, interval)
        assert all(t.multiplier > 0 and t.weight in weights for t in dec.terms)
        if dec.mode == EXACT:
            assert dec.residual(q) == 0
        else:
            assert dec.residual(q) <= 1e-8 * max(1.0, float(q.max_abs_coefficient()))


class TestConvexity:
    def test_examples(self):
        assert is_convex_on(parse_unipoly("x^6 - 5x^4 + 15x^2"), G).convex
        v = is_convex_on(parse_unipoly("x^3"), G)
        assert not v.convex and v.witness == -1
        assert is_convex_on(parse_unipoly("x^3"), IntervalSpec.ray_right(0)).convex

    @pytest.mark.parametrize("seed", range(8))
    def test_agrees_with_dense_sampling(self, seed):
        rng = np.random.default_rng(seed)
        roots = [F(int(v), 4) for v in rng.integers(-12, 13, rng.integers(1, 5))]
        p = from_roots(roots, leading=F(int(rng.choice([-1, 1])))).integrate().integrate()
        a, b = sorted(F(int(v), 2) for v in rng.choice(np.arange(-8, 9), 2, replace=False))
        interval = IntervalSpec.interval(a, b)
        q = p.derivative().derivative().to_float()
        grid = np.linspace(float(a), float(b), 10_002)[1:-1]
        sampled = all(q(float(t)) >= -1e-12 for t in grid)
        assert is_convex_on(p, interval).convex == sampled
