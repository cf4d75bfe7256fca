"""
Constraint Module

Membership in F(n,s,q) and everything derived from it:
- Membership and violation extraction over all s-subsets
- Bad-configuration sets and the labeled count g(s,q)
- Exact disjoint packing of heavy subsets (k(G))
- Regime classification of (s,q)
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb
from typing import List, Optional, Tuple
import logging

from .multigraph import (
    Multigraph, max_multiplicity, pair_index, restricted_product, restricted_sum,
)

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]


class ConstraintError(ValueError):
    """Raised for invalid (s, q) parameters or packing requests."""


@dataclass(frozen=True)
class ConstraintSpec:
    """The pair (s, q) defining F(n, s, q)."""
    s: int
    q: int

    def __post_init__(self):
        if not isinstance(self.s, int) or self.s < 2:
            raise ConstraintError(f"s must be an integer >= 2, got {self.s!r}")
        if not isinstance(self.q, int) or self.q < 0:
            raise ConstraintError(f"q must be an integer >= 0, got {self.q!r}")

    @property
    def pair_count(self) -> int:
        return comb(self.s, 2)

    def __str__(self) -> str:
        return f"(s={self.s}, q={self.q})"


class Regime(str, Enum):
    PRODUCT_ZERO = 'ProductZero'
    CASE_I = 'CaseI'
    CASE_II = 'CaseII'
    SPECIAL_49 = 'Special49'
    UNCOVERED = 'Uncovered'


@dataclass(frozen=True)
class RegimeClassification:
    """Which closed-form case covers (s, q).

    CaseI carries q = a*C(s,2) + b; CaseII carries q = a*C(s,2) - t.
    """
    kind: Regime
    s: int
    q: int
    a: Optional[int] = None
    b: Optional[int] = None
    t: Optional[int] = None

    @property
    def is_covered(self) -> bool:
        return self.kind != Regime.UNCOVERED

    @property
    def caseii_part_count(self) -> Optional[int]:
        """Number of Turan parts s - t for CaseII."""
        return self.s - self.t if self.kind == Regime.CASE_II else None

    def __str__(self) -> str:
        if self.kind == Regime.CASE_I:
            return f"CaseI{{a={self.a}, b={self.b}}}"
        if self.kind == Regime.CASE_II:
            return f"CaseII{{a={self.a}, t={self.t}}}"
        return self.kind.value

    def to_dict(self) -> dict:
        record = {'regime': self.kind.value, 's': self.s, 'q': self.q}
        for key in ('a', 'b', 't'):
            value = getattr(self, key)
            if value is not None:
                record[key] = value
        return record


def classify(s: int, q: int) -> RegimeClassification:
    """Place (s, q) in exactly one regime."""
    spec = ConstraintSpec(s, q)
    pairs = spec.pair_count
    if q < pairs:
        return RegimeClassification(Regime.PRODUCT_ZERO, s, q)
    if (s, q) == (4, 9):
        return RegimeClassification(Regime.SPECIAL_49, s, q)
    a, b = divmod(q, pairs)
    if b <= s - 2:
        return RegimeClassification(Regime.CASE_I, s, q, a=a, b=b)
    t = pairs - b
    if t == 1 or (s >= 4 and 2 <= t <= s // 2):
        return RegimeClassification(Regime.CASE_II, s, q, a=a + 1, t=t)
    return RegimeClassification(Regime.UNCOVERED, s, q)


def _subset_pair_indices(n: int, s: int) -> List[Tuple[Subset, List[int]]]:
    return [
        (X, [pair_index(n, u, v) for u, v in combinations(X, 2)])
        for X in combinations(range(n), s)
    ]


def violations(G: Multigraph, spec: ConstraintSpec) -> List[Tuple[Subset, int]]:
    """All s-subsets X with S(X) > q, in lexicographic order."""
    found = []
    for X, indices in _subset_pair_indices(G.n, spec.s):
        total = sum(G.weights[i] for i in indices)
        if total > spec.q:
            found.append((X, total))
    return found


def is_member(G: Multigraph, spec: ConstraintSpec) -> bool:
    """True iff every s-subset spans at most q (vacuous for n < s)."""
    weights = G.weights
    for _, indices in _subset_pair_indices(G.n, spec.s):
        if sum(weights[i] for i in indices) > spec.q:
            return False
    return True


def is_bounded_member(G: Multigraph, spec: ConstraintSpec, mu_cap: int) -> bool:
    """Membership in F_{<=mu_cap}(n, s, q)."""
    if G.n >= 2 and max_multiplicity(G) > mu_cap:
        return False
    return is_member(G, spec)


def in_reduced_class(G: Multigraph) -> bool:
    """Membership in D(n): multiplicities at most 2, in F(n,4,9) and F(n,3,5)."""
    return is_bounded_member(G, ConstraintSpec(4, 9), 2) and is_member(G, ConstraintSpec(3, 5))


def heavy_triples_isolated(G: Multigraph) -> bool:
    """True iff every triple X with S(X) >= 6 has P(X) <= 8 and only weight-1 pairs leaving it.

    Holds for every member of F(n,4,9) with positive product, n >= 4; then
    P(G) = P(X) * P(V \\ X).
    """
    for X in combinations(range(G.n), 3):
        if restricted_sum(G, X) < 6:
            continue
        rest = [y for y in range(G.n) if y not in X]
        if restricted_product(G, X) > 8:
            return False
        if any(G.weight(x, y) != 1 for x in X for y in rest):
            return False
    return True


def bad_sets(G: Multigraph, spec: ConstraintSpec) -> List[Subset]:
    """H(G,s,q): s-sets X with S(X) > q whose induced multiplicities are all <= q."""
    found = []
    for X, indices in _subset_pair_indices(G.n, spec.s):
        values = [G.weights[i] for i in indices]
        if sum(values) > spec.q and max(values) <= spec.q:
            found.append(X)
    return found


def capped_compositions(total: int, parts: int, cap: int) -> int:
    """Number of vectors in {0..cap}^parts with coordinate sum <= total."""
    if total < 0 or parts < 0 or cap < 0:
        return 0
    count = 0
    for j in range(parts + 1):
        remaining = total - j * (cap + 1)
        if remaining < 0:
            break
        count += (-1) ** j * comb(parts, j) * comb(remaining + parts, parts)
    return count


def count_bad_configs(s: int, q: int) -> int:
    """g(s,q): weight functions on C(s,2) pairs in [0,q] with sum > q."""
    spec = ConstraintSpec(s, q)
    m = spec.pair_count
    return (q + 1) ** m - capped_compositions(q, m, q)


def disjoint_violation_packing(G: Multigraph, r: int, threshold: int) -> Tuple[int, List[Subset]]:
    """Maximum number of pairwise disjoint r-sets Y with S(Y) >= threshold.

    Exact backtracking over qualifying sets in lexicographic order, seeded
    with a greedy packing and cut by the free-vertex bound.
    """
    if not isinstance(r, int) or not 1 <= r <= G.n:
        raise ConstraintError(f"Set size r must satisfy 1 <= r <= {G.n}, got {r!r}")

    candidates = [
        X for X in combinations(range(G.n), r)
        if sum(G.weight(u, v) for u, v in combinations(X, 2)) >= threshold
    ]
    masks = [sum(1 << x for x in X) for X in candidates]

    best: List[int] = []
    used = 0
    for i, mask in enumerate(masks):
        if not mask & used:
            best.append(i)
            used |= mask

    chosen: List[int] = []

    def extend(start: int, used_mask: int) -> None:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        free = G.n - bin(used_mask).count('1')
        if len(chosen) + free // r <= len(best):
            return
        for i in range(start, len(candidates)):
            if masks[i] & used_mask:
                continue
            chosen.append(i)
            extend(i + 1, used_mask | masks[i])
            chosen.pop()

    extend(0, 0)
    witness = [candidates[i] for i in best]
    logger.debug(f"Packing of {len(candidates)} qualifying {r}-sets: k={len(witness)}")
    return len(witness), witness


def caseii_violation_packing(G: Multigraph, spec: ConstraintSpec) -> Tuple[int, List[Subset]]:
    """k(G) for CaseII with t >= 2: r = s-t+1 and threshold a*C(r,2)."""
    regime = classify(spec.s, spec.q)
    if regime.kind != Regime.CASE_II or regime.t < 2:
        raise ConstraintError(f"k(G) needs CaseII with t >= 2, got {regime} for {spec}")
    r = spec.s - regime.t + 1
    return disjoint_violation_packing(G, r, regime.a * comb(r, 2))

