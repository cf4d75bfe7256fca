"""Core multigraph, constraint, formula, search and validation components."""
from .multigraph import (
    Multigraph, MultigraphError, canonical_form, describe, edit_distance, is_isomorphic,
    product_total, sum_total,
)
from .constraints import ConstraintError, ConstraintSpec, Regime, classify, is_member, violations
from .constructions import ConstructionError, build_family_member, enumerate_family, parse_family
from .formulas import FormulaError, ex_pi_density, ex_pi_exact, ex_sigma_density, ex_sigma_exact
from .search import (
    CapExceededError, SearchConfig, SearchError, count_members, ex_c3c4,
    max_product, max_sum, near_extremal_scan,
)
from .data_loader import (
    GoldenStore, MultigraphFormatError, dump_multigraph, load_multigraph,
    load_suite, multigraph_to_record,
)
from .validation import ValidationHarness, any_disagreement, summarize

__all__ = [
    "Multigraph", "MultigraphError", "canonical_form", "describe", "edit_distance", "is_isomorphic",
    "product_total", "sum_total",
    "ConstraintError", "ConstraintSpec", "Regime", "classify", "is_member", "violations",
    "ConstructionError", "build_family_member", "enumerate_family", "parse_family",
    "FormulaError", "ex_pi_density", "ex_pi_exact", "ex_sigma_density", "ex_sigma_exact",
    "CapExceededError", "SearchConfig", "SearchError", "count_members", "ex_c3c4",
    "max_product", "max_sum", "near_extremal_scan",
    "GoldenStore", "MultigraphFormatError", "dump_multigraph", "load_multigraph",
    "load_suite", "multigraph_to_record",
    "ValidationHarness", "any_disagreement", "summarize",
]
