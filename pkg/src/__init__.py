"""
Multigraph Extremal Laboratory

An exact-arithmetic toolkit for (n,s,q)-multigraphs: multigraphs on n
vertices in which every s vertices span at most q edges.

Features:
- Membership checks, violation reports and canonical forms
- Regime classification and the extremal constructions
- Closed-form product and sum maxima
- Branch-and-bound oracles for products, sums and counts
- ex(n, {C3, C4}) by girth-5 graph generation
- A validation harness with golden values and CSV reports
"""

__version__ = "1.0.0"
__author__ = "Extremal Combinatorics Tooling Team"

from .core import (
    ConstraintSpec, Multigraph, SearchConfig, ValidationHarness,
    classify, ex_pi_exact, max_product, max_sum,
)

__all__ = [
    "ConstraintSpec",
    "Multigraph",
    "SearchConfig",
    "ValidationHarness",
    "classify",
    "ex_pi_exact",
    "max_product",
    "max_sum",
]
