"""
Formulas Module

Closed-form extremal values for every covered regime:
- Exact product maxima (or sandwich intervals) for finite n
- Product densities kept symbolic as b1 * b2^(num/den)
- Sum maxima, exact or bound-only
- Integer AM-GM maximiser and exact integer k-th roots
- Enumeration lower bounds and exact density comparisons
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Dict, Optional, Tuple, Union
import logging

import mpmath

from .constraints import ConstraintSpec, Regime, classify
from .constructions import turan_edge_count

logger = logging.getLogger(__name__)

EXACT = 'exact'
BOUND_ONLY = 'bound-only'
INTERVAL = 'interval'

LOG2_PRECISION_BITS = 128

# Certified values of ex(n, {C3, C4}); larger n go through the search oracle.
C3C4_KNOWN: Dict[int, int] = {4: 3, 5: 5, 6: 6}

Number = Union[int, Fraction]


class FormulaError(ValueError):
    """Raised for uncovered regimes or infeasible parameters."""


@dataclass(frozen=True)
class FormulaResult:
    """A formula output: an exact value, an upper bound, or an interval."""
    status: str
    value: Optional[int] = None
    lower: Optional[int] = None
    upper: Optional[int] = None
    source: str = ''

    def contains(self, x: int) -> bool:
        if self.status == EXACT:
            return x == self.value
        low = self.lower if self.lower is not None else 0
        high = self.upper if self.upper is not None else self.value
        return low <= x <= high

    def display(self) -> str:
        if self.status == EXACT:
            return str(self.value)
        if self.status == BOUND_ONLY:
            return f"<= {self.value}"
        return f"[{self.lower}, {self.upper}]"

    def to_dict(self) -> dict:
        record = {'status': self.status}
        if self.status == INTERVAL:
            record['lower'] = self.lower
            record['upper'] = self.upper
        else:
            record['value'] = self.value
        record['source'] = self.source
        return record


@dataclass(frozen=True)
class DensityValue:
    """The real number base1 * base2^(num/den) with exact parts."""
    base1: Fraction
    base2: Fraction = Fraction(1)
    num: int = 0
    den: int = 1

    def __post_init__(self):
        if self.den < 1:
            raise FormulaError(f"Exponent denominator must be >= 1, got {self.den}")
        object.__setattr__(self, 'base1', Fraction(self.base1))
        object.__setattr__(self, 'base2', Fraction(self.base2))

    @property
    def log2_value(self) -> mpmath.mpf:
        with mpmath.workprec(LOG2_PRECISION_BITS):
            if self.base1 == 0:
                return mpmath.ninf
            value = mpmath.log(mpmath.mpf(self.base1.numerator) / self.base1.denominator, 2)
            if self.num:
                ratio = mpmath.mpf(self.base2.numerator) / self.base2.denominator
                value += mpmath.mpf(self.num) / self.den * mpmath.log(ratio, 2)
            return value

    def display(self) -> str:
        if self.num == 0 or self.base2 == 1:
            return str(self.base1)
        return f"{self.base1}*({self.base2})^({self.num}/{self.den})"

    def to_dict(self) -> dict:
        return {
            'base1': str(self.base1),
            'base2': str(self.base2),
            'exponent': f"{self.num}/{self.den}",
            'log2': mpmath.nstr(self.log2_value, 20),
        }


def compare_power(value: Number, density: DensityValue, exponent: Number) -> int:
    """Sign of value - density^exponent, compared as exact integers.

    Both sides are raised to den * exponent.denominator so only integer
    powers of rationals remain.
    """
    value = Fraction(value)
    exponent = Fraction(exponent)
    if value < 0 or exponent < 0:
        raise FormulaError("compare_power expects nonnegative value and exponent")
    scale = density.den * exponent.denominator
    lhs = value ** scale
    rhs = density.base1 ** (exponent.numerator * density.den) * density.base2 ** (exponent.numerator * density.num)
    return (lhs > rhs) - (lhs < rhs)


def integer_root(x: int, k: int) -> int:
    """Floor of the k-th root of x by Newton iteration."""
    if k <= 0 or x < 0:
        raise FormulaError(f"integer_root needs x >= 0 and k >= 1, got x={x}, k={k}")
    if k == 1 or x <= 1:
        return x
    guess = 1 << -(-x.bit_length() // k)
    while True:
        nxt = ((k - 1) * guess + x // guess ** (k - 1)) // k
        if nxt >= guess:
            break
        guess = nxt
    while guess ** k > x:
        guess -= 1
    while (guess + 1) ** k <= x:
        guess += 1
    return guess


def amgm_bound(count: int, budget: int) -> int:
    """Max product of `count` positive integers with sum <= budget (0 if none exist)."""
    if count == 0:
        return 1
    if budget < count:
        return 0
    base, extra = divmod(budget, count)
    return (base + 1) ** extra * base ** (count - extra)


def amgm_int_max(l: int, k: int, a: int) -> Tuple[int, Tuple[int, ...]]:
    """Max product of l positive integers summing to at most a*l - k, with witness."""
    if l < 2 or not 0 <= k <= l or a < 1:
        raise FormulaError(f"amgm_int_max needs l >= 2, 0 <= k <= l, a >= 1; got l={l}, k={k}, a={a}")
    if a == 1 and k >= 1:
        raise FormulaError(f"Infeasible: {l} positive integers cannot sum to at most {l - k}")
    witness = (a,) * (l - k) + (a - 1,) * k
    return a ** (l - k) * (a - 1) ** k, witness


def _require_order(n: int, s: int) -> None:
    if n < s:
        raise FormulaError(f"Formulas need n >= s, got n={n}, s={s}")


def ex_pi_exact(n: int, s: int, q: int,
                c3c4_oracle: Optional[Callable[[int], int]] = None) -> FormulaResult:
    """ex_Pi(n, s, q) for every covered regime.

    CaseI with 0 < b < s-2 yields an interval since only sandwich bounds
    are known there.
    """
    _require_order(n, s)
    regime = classify(s, q)
    pairs = comb(n, 2)

    if regime.kind == Regime.PRODUCT_ZERO:
        return FormulaResult(EXACT, value=0, source='q below C(s,2)')

    if regime.kind == Regime.CASE_I:
        a, b = regime.a, regime.b
        if b == 0:
            return FormulaResult(EXACT, value=a ** pairs, source='CaseI b=0: U_a(n)')
        k = (b * n) // (b + 1)
        upper = a ** (pairs - k) * (a + 1) ** k
        if b == s - 2:
            return FormulaResult(EXACT, value=upper, source='CaseI b=s-2: U_{s-1,a}(n)')
        logger.warning(f"(s={s}, q={q}) has 0 < b < s-2: returning an interval")
        return FormulaResult(INTERVAL, lower=a ** pairs, upper=upper, source='CaseI 0<b<s-2 sandwich')

    if regime.kind == Regime.CASE_II:
        a, t = regime.a, regime.t
        cross = turan_edge_count(s - t, n)
        return FormulaResult(EXACT, value=(a - 1) ** (pairs - cross) * a ** cross,
                             source=f"CaseII: T_{{{s - t},{a}}}(n)")

    if regime.kind == Regime.SPECIAL_49:
        if c3c4_oracle is not None:
            edges = c3c4_oracle(n)
        elif n in C3C4_KNOWN:
            edges = C3C4_KNOWN[n]
        else:
            raise FormulaError(f"ex(n,{{C3,C4}}) for n={n} needs a search oracle")
        return FormulaResult(EXACT, value=2 ** edges, source='(4,9): 2^ex(n,{C3,C4})')

    raise FormulaError(f"No closed form for (s={s}, q={q}): regime {regime}")


def ex_pi_density(s: int, q: int) -> DensityValue:
    """ex_Pi(s, q) as an exact symbolic value."""
    regime = classify(s, q)
    if regime.kind == Regime.PRODUCT_ZERO:
        return DensityValue(Fraction(0))
    if regime.kind == Regime.CASE_I:
        return DensityValue(Fraction(regime.a))
    if regime.kind == Regime.CASE_II:
        a, parts = regime.a, s - regime.t
        return DensityValue(Fraction(a - 1), Fraction(a, a - 1), parts - 1, parts)
    raise FormulaError(f"No closed-form product density for (s={s}, q={q}): regime {regime}")


def _sum_decomposition(s: int, q: int) -> Tuple[str, int, int]:
    """('I', a, b) with q = a*C(s,2)+b or ('II', a, t) with q = a*C(s,2)-t."""
    ConstraintSpec(s, q)
    pairs = comb(s, 2)
    a, b = divmod(q, pairs)
    if q == 0 or (a >= 1 and b <= s - 2):
        return 'I', a, b
    t = pairs - b
    if t == 1 or (s >= 4 and 2 <= t <= s // 2):
        return 'II', a + 1, t
    raise FormulaError(f"No sum formula for (s={s}, q={q})")


def ex_sigma_exact(n: int, s: int, q: int) -> FormulaResult:
    """ex_Sigma(n, s, q); bound-only for CaseI with 0 < b < s-2."""
    _require_order(n, s)
    case, a, rest = _sum_decomposition(s, q)
    pairs = comb(n, 2)
    if case == 'I':
        value = a * pairs + (rest * n) // (rest + 1)
        if rest in (0, s - 2):
            return FormulaResult(EXACT, value=value, source=f"a*C(n,2)+floor(bn/(b+1)), b={rest}")
        return FormulaResult(BOUND_ONLY, value=value, upper=value, source='upper bound for 0<b<s-2')
    parts = s - rest
    return FormulaResult(EXACT, value=(a - 1) * pairs + turan_edge_count(parts, n),
                         source=f"(a-1)*C(n,2)+t_{parts}(n)")


def ex_sigma_density(s: int, q: int) -> Fraction:
    """Limit of ex_Sigma(n,s,q)/C(n,2) from the sum formulas."""
    case, a, rest = _sum_decomposition(s, q)
    if case == 'I':
        return Fraction(a)
    parts = s - rest
    return Fraction(a - 1) + Fraction(parts - 1, parts)


def enumeration_base(s: int, q: int) -> DensityValue:
    """Growth base of |F(n,s,q)|: ex_Pi(s, q + C(s,2))."""
    ConstraintSpec(s, q)
    return ex_pi_density(s, q + comb(s, 2))


@dataclass(frozen=True)
class CountingBounds:
    """Lower bounds on |F(n,s,q)|."""
    bound_a: int
    bound_b: DensityValue
    exponent: int

    @property
    def bound_b_log2(self) -> mpmath.mpf:
        with mpmath.workprec(LOG2_PRECISION_BITS):
            return self.exponent * self.bound_b.log2_value

    def holds_for(self, count: int) -> Tuple[bool, bool]:
        """(count >= bound_a, count >= bound_b^exponent) in exact arithmetic."""
        return count >= self.bound_a, compare_power(count, self.bound_b, self.exponent) >= 0


def counting_lower_bounds(n: int, s: int, q: int,
                          c3c4_oracle: Optional[Callable[[int], int]] = None) -> CountingBounds:
    """bound_a = ex_Pi(n,s,q) (interval lower end if needed); bound_b from the growth base."""
    base = enumeration_base(s, q)
    product = ex_pi_exact(n, s, q, c3c4_oracle)
    bound_a = product.value if product.status == EXACT else product.lower
    return CountingBounds(bound_a=bound_a, bound_b=base, exponent=comb(n, 2))


def density_inequality_check(n: int, s: int, q: int, oracle_value: int) -> bool:
    """oracle_value >= ex_Pi(s,q)^C(n,2), exactly."""
    _require_order(n, s)
    return compare_power(oracle_value, ex_pi_density(s, q), comb(n, 2)) >= 0
