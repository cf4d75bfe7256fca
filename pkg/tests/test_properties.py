"""Property-based tests for multigraph and constraint invariants using Hypothesis.

These tests check laws that must hold for every input:

- Product and sum decompositions over vertex subsets
- Edit distance is a metric and the submultigraph order is a partial order
- Membership is closed downwards and bounds every multiplicity by q
- Canonical forms are invariant under relabeling
- Membership is equivalent to an empty violation list
- The +1 shift raises every s-set sum by C(s,2)
- Regime classification reconstructs q
- Closed-form and brute-force bad-configuration counts agree
- Integer roots and AM-GM bounds are exact
"""

import sys
import os
from math import comb, prod

import pytest
from hypothesis import given, settings, strategies as st

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.core.multigraph import (
    Multigraph, canonical_form, canonical_representative, cross_product,
    edit_distance, is_isomorphic, is_submultigraph, max_multiplicity, plus_one,
    product_total, restricted_product, restricted_sum, star_sum, sum_total,
)
from src.core.constraints import (
    ConstraintSpec, Regime, bad_sets, classify, count_bad_configs,
    is_member, violations,
)
from src.core.data_loader import multigraph_to_record, parse_multigraph
from src.core.formulas import amgm_bound, integer_root
from src.core.search import SearchConfig, count_bad_configs_bruteforce


@st.composite
def multigraphs(draw, min_n=1, max_n=6, max_weight=3):
    """Random labeled multigraph with small multiplicities."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    weights = draw(st.lists(st.integers(0, max_weight), min_size=comb(n, 2), max_size=comb(n, 2)))
    return Multigraph(n, tuple(weights))


@st.composite
def relabeled_pairs(draw):
    """A multigraph together with a random relabeling of it."""
    G = draw(multigraphs(min_n=2))
    perm = draw(st.permutations(list(range(G.n))))
    return G, G.relabel(perm)


@st.composite
def lowered_pairs(draw):
    """A multigraph together with a pointwise smaller copy."""
    G = draw(multigraphs(min_n=3))
    lower = tuple(draw(st.integers(0, w)) for w in G.weights)
    return Multigraph(G.n, lower), G


@st.composite
def split_graphs(draw):
    """A multigraph with a nonempty proper vertex subset."""
    G = draw(multigraphs(min_n=2))
    X = draw(st.sets(st.integers(0, G.n - 1), min_size=1, max_size=G.n - 1))
    return G, X


class TestAggregateLaws:

    @settings(max_examples=200, deadline=None)
    @given(data=split_graphs())
    def test_bipartition_product(self, data):
        G, X = data
        rest = set(range(G.n)) - X
        assert product_total(G) == restricted_product(G, X) * cross_product(G, X, rest) * restricted_product(G, rest)

    @settings(max_examples=200, deadline=None)
    @given(data=split_graphs(), pick=st.integers(0, 10 ** 6))
    def test_adding_a_vertex(self, data, pick):
        G, X = data
        outside = sorted(set(range(G.n)) - X)
        z = outside[pick % len(outside)]
        assert restricted_sum(G, X | {z}) == restricted_sum(G, X) + star_sum(G, z, X)


class TestOrderAndDistance:

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=2, max_n=5), H=multigraphs(min_n=2, max_n=5), K=multigraphs(min_n=2, max_n=5))
    def test_edit_distance_is_a_metric(self, G, H, K):
        assert edit_distance(G, G).count == 0
        if G.n == H.n:
            d = edit_distance(G, H).count
            assert d == edit_distance(H, G).count
            assert (d == 0) == (G == H)
            if H.n == K.n:
                assert edit_distance(G, K).count <= d + edit_distance(H, K).count

    @settings(max_examples=200, deadline=None)
    @given(pair=lowered_pairs(), extra=st.integers(0, 3))
    def test_submultigraph_partial_order(self, pair, extra):
        H, G = pair
        upper = Multigraph(G.n, tuple(w + extra for w in G.weights))
        assert is_submultigraph(G, G)
        assert is_submultigraph(H, G) and is_submultigraph(G, upper)
        assert is_submultigraph(H, upper)
        if is_submultigraph(G, H):
            assert G == H

    @settings(max_examples=200, deadline=None)
    @given(pair=lowered_pairs(), s=st.integers(2, 4), q=st.integers(0, 12))
    def test_membership_is_downward_closed(self, pair, s, q):
        H, G = pair
        spec = ConstraintSpec(s, q)
        if is_member(G, spec):
            assert is_member(H, spec)

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=3), s=st.integers(2, 3), q=st.integers(0, 12))
    def test_members_have_bounded_multiplicity(self, G, s, q):
        if is_member(G, ConstraintSpec(s, q)):
            assert max_multiplicity(G) <= q


class TestCanonicalForms:

    @settings(max_examples=200, deadline=None)
    @given(pair=relabeled_pairs())
    def test_relabeling_invariance(self, pair):
        G, H = pair
        assert canonical_form(G) == canonical_form(H)
        assert is_isomorphic(G, H)

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs())
    def test_representative_shares_form(self, G):
        rep = canonical_representative(G)
        assert canonical_form(rep) == canonical_form(G)
        assert sorted(rep.weights) == sorted(G.weights)

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=2), H=multigraphs(min_n=2))
    def test_different_multisets_never_isomorphic(self, G, H):
        if G.n != H.n or sorted(G.weights) != sorted(H.weights):
            assert canonical_form(G) != canonical_form(H)


class TestMembership:

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=3), s=st.integers(2, 4), q=st.integers(0, 12))
    def test_member_iff_no_violations(self, G, s, q):
        spec = ConstraintSpec(s, q)
        found = violations(G, spec)
        assert is_member(G, spec) == (not found)
        assert all(restricted_sum(G, X) == total > q for X, total in found)

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=3), s=st.integers(2, 4), q=st.integers(0, 12))
    def test_plus_one_shifts_budget(self, G, s, q):
        spec = ConstraintSpec(s, q)
        shifted = ConstraintSpec(s, q + comb(s, 2))
        assert is_member(G, spec) == is_member(plus_one(G), shifted)
        assert sum_total(plus_one(G)) == sum_total(G) + comb(G.n, 2)

    @settings(max_examples=200, deadline=None)
    @given(G=multigraphs(min_n=3), q=st.integers(0, 8))
    def test_bad_sets_are_violations(self, G, q):
        spec = ConstraintSpec(3, q)
        heavy = {X for X, _ in violations(G, spec)}
        assert set(bad_sets(G, spec)) <= heavy


class TestClassification:

    @settings(max_examples=200, deadline=None)
    @given(s=st.integers(2, 12), q=st.integers(0, 400))
    def test_parameters_reconstruct_q(self, s, q):
        regime = classify(s, q)
        pairs = comb(s, 2)
        if regime.kind == Regime.CASE_I:
            assert q == regime.a * pairs + regime.b
        elif regime.kind == Regime.CASE_II:
            assert q == regime.a * pairs - regime.t
            assert regime.t == 1 or 2 <= regime.t <= s // 2
        elif regime.kind == Regime.PRODUCT_ZERO:
            assert q < pairs

    @settings(max_examples=50, deadline=None)
    @given(s=st.integers(2, 3), q=st.integers(0, 4))
    def test_bad_config_count_matches_bruteforce(self, s, q):
        assert count_bad_configs(s, q) == count_bad_configs_bruteforce(s, q, SearchConfig())


class TestIntegerArithmetic:

    @settings(max_examples=200, deadline=None)
    @given(x=st.integers(0, 10 ** 60), k=st.integers(1, 9))
    def test_integer_root_brackets(self, x, k):
        r = integer_root(x, k)
        assert r ** k <= x < (r + 1) ** k

    @settings(max_examples=200, deadline=None)
    @given(values=st.lists(st.integers(1, 9), min_size=1, max_size=6))
    def test_amgm_bound_dominates(self, values):
        assert prod(values) <= amgm_bound(len(values), sum(values))


class TestRecords:

    @settings(max_examples=100, deadline=None)
    @given(G=multigraphs())
    def test_emission_parses_back(self, G):
        assert parse_multigraph(multigraph_to_record(G)) == G


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
