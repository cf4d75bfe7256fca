"""Tests for the closed-form extremal values."""

import sys
import os
from fractions import Fraction
from math import prod

import mpmath
import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.core.formulas import (
    BOUND_ONLY, EXACT, INTERVAL, DensityValue, FormulaError, amgm_bound,
    amgm_int_max, compare_power, counting_lower_bounds,
    density_inequality_check, enumeration_base, ex_pi_density, ex_pi_exact,
    ex_sigma_density, ex_sigma_exact, integer_root,
)


def _multisets(l, budget, low=1):
    """Nondecreasing l-tuples of integers >= low with sum <= budget."""
    if l == 0:
        yield ()
        return
    for first in range(low, budget // l + 1):
        for rest in _multisets(l - 1, budget - first, first):
            yield (first,) + rest


class TestProductFormulas:
    """ex_Pi(n, s, q) for finite n."""

    @pytest.mark.parametrize("n,s,q,expected", [
        (4, 3, 6, 64),
        (4, 3, 7, 144),
        (4, 3, 5, 16),
        (5, 3, 5, 64),
        (5, 3, 6, 1024),
        (4, 3, 4, 4),
        (5, 3, 4, 4),
        (4, 4, 2, 0),
        (4, 4, 9, 8),
        (5, 4, 9, 32),
        (6, 4, 9, 64),
    ])
    def test_exact_values(self, n, s, q, expected):
        result = ex_pi_exact(n, s, q)
        assert result.status == EXACT
        assert result.value == expected

    def test_interval_for_middle_b(self):
        # (5, 12): a=1, b=2 with s-2=3
        result = ex_pi_exact(5, 5, 12)
        assert result.status == INTERVAL
        assert result.lower == 1
        assert result.upper == 2 ** ((2 * 5) // 3)
        assert result.contains(4) and not result.contains(100)

    def test_caseii_larger_t(self):
        # (4, 10): a=2, t=2, two Turan parts
        assert ex_pi_exact(4, 4, 10).value == 16
        assert ex_pi_exact(5, 4, 10).value == 64

    def test_special_needs_oracle_beyond_known(self):
        with pytest.raises(FormulaError):
            ex_pi_exact(7, 4, 9)
        assert ex_pi_exact(7, 4, 9, c3c4_oracle=lambda n: 8).value == 256

    def test_uncovered(self):
        with pytest.raises(FormulaError):
            ex_pi_exact(5, 4, 15)

    def test_needs_n_at_least_s(self):
        with pytest.raises(FormulaError):
            ex_pi_exact(3, 4, 6)

    def test_display_and_dict(self):
        result = ex_pi_exact(4, 3, 7)
        assert result.display() == "144"
        assert result.to_dict()['value'] == 144
        assert ex_pi_exact(5, 5, 12).display() == "[1, 8]"


class TestDensities:
    """Symbolic product densities and sum densities."""

    def test_product_densities(self):
        assert ex_pi_density(3, 7) == DensityValue(Fraction(2))
        assert ex_pi_density(3, 5) == DensityValue(Fraction(1), Fraction(2), 1, 2)
        assert ex_pi_density(4, 2).base1 == 0

    def test_log2_value(self):
        with mpmath.workprec(128):
            assert abs(ex_pi_density(3, 5).log2_value - mpmath.mpf('0.5')) < mpmath.mpf(10) ** -30
        assert abs(ex_pi_density(3, 7).log2_value - 1) < mpmath.mpf(10) ** -30
        assert ex_pi_density(4, 2).log2_value == mpmath.ninf

    def test_display(self):
        assert ex_pi_density(3, 5).display() == "1*(2)^(1/2)"
        assert ex_pi_density(3, 6).display() == "2"

    def test_no_density_for_special(self):
        with pytest.raises(FormulaError):
            ex_pi_density(4, 9)

    def test_sum_densities(self):
        assert ex_sigma_density(3, 6) == 2
        assert ex_sigma_density(3, 5) == Fraction(3, 2)


class TestSumFormulas:
    """ex_Sigma(n, s, q)."""

    @pytest.mark.parametrize("n,s,q,expected", [
        (4, 3, 6, 12),
        (5, 3, 6, 20),
        (4, 3, 5, 10),
        (5, 3, 5, 16),
        (3, 3, 4, 4),
        (5, 4, 10, 16),
        (4, 3, 0, 0),
    ])
    def test_exact_values(self, n, s, q, expected):
        result = ex_sigma_exact(n, s, q)
        assert result.status == EXACT
        assert result.value == expected

    def test_bound_only(self):
        result = ex_sigma_exact(5, 5, 12)
        assert result.status == BOUND_ONLY
        assert result.value == 10 + 3
        assert result.display() == "<= 13"

    def test_no_sum_formula(self):
        with pytest.raises(FormulaError):
            ex_sigma_exact(5, 4, 15)


class TestIntegerArithmetic:
    """Integer roots, AM-GM maxima and exact power comparisons."""

    def test_integer_root(self):
        assert integer_root(27, 3) == 3
        assert integer_root(26, 3) == 2
        assert integer_root(10 ** 30, 3) == 10 ** 10
        assert integer_root(2 ** 200 - 1, 2) == 2 ** 100 - 1
        assert integer_root(0, 5) == 0

    def test_integer_root_rejects(self):
        with pytest.raises(FormulaError):
            integer_root(-1, 2)
        with pytest.raises(FormulaError):
            integer_root(4, 0)

    def test_amgm_examples(self):
        assert amgm_int_max(3, 1, 2) == (4, (2, 2, 1))
        assert amgm_int_max(2, 0, 3) == (9, (3, 3))
        assert amgm_int_max(6, 2, 3) == (324, (3, 3, 3, 3, 2, 2))

    def test_amgm_matches_exhaustive_search(self):
        for l in range(2, 7):
            for a in range(1, 5):
                for k in range(l + 1 if a >= 2 else 1):
                    budget = a * l - k
                    products = {}
                    for t in _multisets(l, budget):
                        products.setdefault(prod(t), []).append(t)
                    best = max(products)
                    value, witness = amgm_int_max(l, k, a)
                    assert value == best, (l, k, a)
                    # the balanced multiset is the only maximiser
                    assert products[best] == [tuple(sorted(witness))], (l, k, a)

    def test_amgm_infeasible(self):
        with pytest.raises(FormulaError):
            amgm_int_max(3, 1, 1)
        with pytest.raises(FormulaError):
            amgm_int_max(1, 0, 2)

    def test_amgm_bound(self):
        assert amgm_bound(0, 5) == 1
        assert amgm_bound(3, 2) == 0
        assert amgm_bound(3, 7) == 12

    def test_compare_power(self):
        root2 = DensityValue(Fraction(1), Fraction(2), 1, 2)
        assert compare_power(16, root2, 6) == 1
        assert compare_power(8, root2, 6) == 0
        assert compare_power(7, root2, 6) == -1
        assert compare_power(2, DensityValue(Fraction(4)), Fraction(1, 2)) == 0

    def test_density_inequality(self):
        assert density_inequality_check(4, 3, 6, 64)
        assert density_inequality_check(4, 3, 5, 16)
        assert density_inequality_check(4, 3, 7, 144)
        assert not density_inequality_check(4, 3, 6, 63)


class TestCountingBounds:
    """Lower bounds on |F(n,s,q)|."""

    def test_enumeration_base(self):
        assert enumeration_base(3, 3) == DensityValue(Fraction(2))

    def test_counting_lower_bounds(self):
        bounds = counting_lower_bounds(4, 3, 3)
        assert bounds.bound_a == 1
        assert bounds.exponent == 6
        assert abs(bounds.bound_b_log2 - 6) < mpmath.mpf(10) ** -30
        assert bounds.holds_for(64) == (True, True)
        assert bounds.holds_for(63) == (True, False)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
