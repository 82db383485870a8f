import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from matchlab.graphs import Graph, Pinning, matchings_by_size
from matchlab.gibbs import (
    MatchingPolynomial,
    as_fraction,
    exact_gibbs,
    expected_size,
    expected_size_via_roots,
    marginal_probability,
    matching_polynomial,
    polynomial_roots,
    root_spectrum_check,
    vertex_gibbs_exact,
)

from helpers import complete_graph, cycle_graph, path_graph, star_graph


def random_graph(rng: random.Random, max_n: int = 7, p: float = 0.5) -> Graph:
    n = rng.randint(2, max_n)
    edges = [e for e in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph(n, edges)


class TestMatchingPolynomial:
    def test_frozen_small_cases(self):
        assert matching_polynomial(path_graph(4)).coeffs == (1, 3, 1)
        assert matching_polynomial(complete_graph(3)).coeffs == (1, 3)
        assert matching_polynomial(cycle_graph(6)).coeffs == (1, 6, 9, 2)
        assert matching_polynomial(star_graph(3)).coeffs == (1, 3)
        assert matching_polynomial(Graph(3, [])).coeffs == (1,)

    def test_matches_enumeration_histogram(self):
        rng = random.Random(5)
        for _ in range(30):
            g = random_graph(rng)
            if g.m == 0:
                continue
            assert list(matching_polynomial(g).coeffs) == matchings_by_size(g)

    def test_multiplicative_over_disjoint_union(self):
        # two disjoint edges: (1 + x)^2
        g = Graph(4, [(0, 1), (2, 3)])
        assert matching_polynomial(g).coeffs == (1, 2, 1)

    def test_evaluate_and_derivative(self):
        p = MatchingPolynomial((1, 3, 1))
        assert p.evaluate(2) == Fraction(11)
        assert p.derivative().coeffs == (3, 2)
        assert p.degree == 2


class TestExactGibbs:
    def test_p3_at_lambda_2(self):
        dist = exact_gibbs(path_graph(3), 2)
        assert dist.support == (frozenset(), frozenset({0}), frozenset({1}))
        assert dist.probs == (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))

    def test_probabilities_sum_to_one(self):
        rng = random.Random(1)
        for _ in range(20):
            g = random_graph(rng)
            lam = rng.choice([Fraction(1, 2), 1, 2, Fraction(7, 3)])
            dist = exact_gibbs(g, lam)
            assert sum(dist.probs) == 1

    def test_conditioning_matches_filter_oracle(self):
        rng = random.Random(2)
        g = cycle_graph(5)
        full = exact_gibbs(g, Fraction(3, 2))
        for eid in g.edge_ids:
            pin = Pinning(edges_absent=frozenset({eid}))
            cond = exact_gibbs(g, Fraction(3, 2), pin)
            keep = [(M, p) for M, p in zip(full.support, full.probs)
                    if eid not in M]
            z = sum(p for _, p in keep)
            assert cond.support == tuple(M for M, _ in keep)
            assert cond.probs == tuple(p / z for _, p in keep)

    def test_unsatisfiable_pinning_raises(self):
        g = path_graph(3)
        with pytest.raises(ValueError):
            exact_gibbs(g, 1, Pinning(edges_present=frozenset({0, 1})))

    def test_pinning_deletion_equivalence(self):
        # conditioning on an edge's absence is the Gibbs law of the deletion;
        # conditioning on its presence is the law of the neighborhood-free graph
        rng = random.Random(3)
        for _ in range(15):
            g = random_graph(rng, max_n=6)
            if g.m < 2:
                continue
            lam = Fraction(rng.randint(1, 5), rng.randint(1, 3))
            eid = rng.choice(g.edge_ids)
            minus = exact_gibbs(g, lam, Pinning(edges_absent=frozenset({eid})))
            deleted = exact_gibbs(g.delete_edge(eid), lam)
            assert minus.support == deleted.support
            assert minus.probs == deleted.probs

            plus = exact_gibbs(g, lam, Pinning(edges_present=frozenset({eid})))
            stripped = g.delete_edges(set(g.adjacent_edges(eid)) | {eid})
            reduced = exact_gibbs(stripped, lam)
            mapped = {M - {eid}: p for M, p in zip(plus.support, plus.probs)}
            assert mapped == reduced.as_dict()

    def test_fugacity_validation(self):
        with pytest.raises(ValueError):
            exact_gibbs(path_graph(3), 0)
        with pytest.raises(ValueError):
            as_fraction(-1)


class TestExpectedSize:
    def test_frozen_values(self):
        assert expected_size(path_graph(4), 2) == Fraction(14, 11)
        assert expected_size(complete_graph(3), 1) == Fraction(3, 4)

    def test_agrees_with_distribution_mean(self):
        rng = random.Random(4)
        for _ in range(20):
            g = random_graph(rng)
            if g.m == 0:
                continue
            lam = Fraction(rng.randint(1, 7), rng.randint(1, 4))
            assert expected_size(g, lam) == exact_gibbs(g, lam).mean_size()

    def test_monotone_in_lambda(self):
        g = cycle_graph(6)
        vals = [expected_size(g, lam) for lam in (Fraction(1, 2), 1, 2, 4, 8)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


class TestRoots:
    def test_p4_roots(self):
        rs = polynomial_roots(matching_polynomial(path_graph(4)))
        want = sorted([(-3 - math.sqrt(5)) / 2, (-3 + math.sqrt(5)) / 2])
        assert rs.multiplicities == (1, 1)
        assert rs.all_real_negative
        for got, exp in zip(rs.roots, want):
            assert abs(got - exp) < 1e-12

    def test_triangle_root(self):
        rs = polynomial_roots(matching_polynomial(complete_graph(3)))
        assert len(rs.roots) == 1
        assert abs(rs.roots[0] + Fraction(1, 3)) < 1e-12

    def test_repeated_root(self):
        rs = polynomial_roots((1, 2, 1))  # (1 + x)^2
        assert rs.roots == (-1.0,)
        assert rs.multiplicities == (2,)
        assert rs.all_real_negative

    def test_residual_tiny(self):
        rng = random.Random(6)
        for _ in range(25):
            g = random_graph(rng)
            if g.m == 0:
                continue
            rs = polynomial_roots(matching_polynomial(g))
            assert rs.residual <= 1e-10
            assert rs.all_real_negative

    def test_against_numpy_roots(self):
        rng = random.Random(7)
        for _ in range(25):
            g = random_graph(rng)
            poly = matching_polynomial(g)
            if poly.degree == 0:
                continue
            rs = polynomial_roots(poly)
            got = sorted(rs.flattened)
            ref = sorted(np.roots(list(reversed(poly.coeffs))).real)
            assert len(got) == len(ref)
            for a, b in zip(got, ref):
                assert abs(a - b) < 1e-7 * max(1.0, abs(b))

    def test_size_identity_via_roots(self):
        rng = random.Random(8)
        for _ in range(15):
            g = random_graph(rng)
            poly = matching_polynomial(g)
            if poly.degree == 0:
                continue
            roots = polynomial_roots(poly).flattened
            for lam in (0.1, 1.0, 10.0):
                direct = float(expected_size(g, lam))
                via = expected_size_via_roots(roots, lam)
                assert abs(direct - via) <= 1e-6


class TestSpectrumReport:
    def test_triangle(self):
        rep = root_spectrum_check(matching_polynomial(complete_graph(3)), 2, 0.5)
        assert rep.min_abs_bound == pytest.approx(0.25)
        assert rep.min_abs_ok
        assert rep.ok

    def test_p4_fraction(self):
        rep = root_spectrum_check(matching_polynomial(path_graph(4)), 2, 0.5)
        assert rep.threshold == pytest.approx(64.0)
        assert rep.fraction_within == 1.0
        assert rep.ok

    def test_degree_one_skips_lower_bound(self):
        rep = root_spectrum_check(matching_polynomial(path_graph(2)), 1, 0.5)
        assert rep.min_abs_bound is None
        assert rep.min_abs_ok

    def test_epsilon_validated(self):
        with pytest.raises(ValueError):
            root_spectrum_check((1, 1), 2, 0.0)


class TestVertexGibbs:
    def test_c4_pushforward(self):
        dist = vertex_gibbs_exact(cycle_graph(4), 1)
        d = dist.as_dict()
        assert d[frozenset()] == Fraction(1, 7)
        assert d[frozenset({0, 1, 2, 3})] == Fraction(2, 7)
        pair_keys = [k for k in d if len(k) == 2]
        assert len(pair_keys) == 4
        assert all(d[k] == Fraction(1, 7) for k in pair_keys)

    def test_restriction_to_subset(self):
        g = path_graph(3)
        dist = vertex_gibbs_exact(g, 1, vertex_set={0})
        # matchings: empty, {e0} covers 0, {e1} does not
        assert dist.as_dict() == {
            frozenset(): Fraction(2, 3),
            frozenset({0}): Fraction(1, 3),
        }


class TestMarginals:
    def test_c4_vertex_marginal(self):
        # 4 of the 7 unit-weight matchings cover any fixed vertex
        got = marginal_probability(cycle_graph(4), 1,
                                   Pinning(vertices_matched=frozenset({0})))
        assert got == Fraction(4, 7)

    def test_degree_bound_on_vertex_marginal(self):
        rng = random.Random(9)
        for _ in range(20):
            g = random_graph(rng, max_n=6)
            if g.m == 0:
                continue
            lam = Fraction(rng.randint(1, 4), rng.randint(1, 2))
            v = rng.choice(g.vertices)
            p = marginal_probability(g, lam, Pinning(vertices_matched=frozenset({v})))
            d = g.degree(v)
            assert p <= Fraction(lam) * d / (1 + Fraction(lam) * d)

    def test_edge_marginal_event(self):
        g = path_graph(3)
        p = marginal_probability(g, 1, Pinning(edges_present=frozenset({0})))
        assert p == Fraction(1, 3)
