"""
Search Module

Independent exact oracles over F(n,s,q):
- Product and sum maximisation by depth-first branch and bound
- Extremal witness sets up to isomorphism
- Exact labeled counting and member enumeration
- Near-extremal scans with exact threshold comparison
- ex(n, {C3, C4}) by vertex-by-vertex generation of girth-5 graphs
- Brute-force count of bad configurations

Edges are assigned in lexicographic pair order, values tried from the
residual cap downwards. The search may split on the first edge's value
across worker threads; results do not depend on the thread count.
"""

import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import networkx as nx
from dotenv import load_dotenv

from .multigraph import (
    Multigraph, canonical_form, canonical_representative, edit_distance,
    product_total, sum_total,
)
from .constraints import ConstraintSpec, Regime, classify, is_member
from .constructions import FamilyDescriptor, enumerate_family
from .formulas import amgm_bound, integer_root

load_dotenv()

logger = logging.getLogger(__name__)

PRODUCT = 'product'
SUM = 'sum'
COUNT = 'count'

_CHARGE_EVERY = 1024


class SearchError(ValueError):
    """Raised when a search precondition fails (for example n < s)."""


class CapExceededError(RuntimeError):
    """Raised when a node, time, vertex or state-space cap is exceeded."""


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


@dataclass
class SearchConfig:
    """Caps and parallelism for the search oracles.

    Unset fields are read from the environment (MGLAB_*), falling back to
    conservative defaults.
    """
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None
    threads: Optional[int] = None
    max_vertices: Optional[int] = None
    girth_max_vertices: Optional[int] = None
    count_space: Optional[int] = None

    def __post_init__(self):
        if self.max_nodes is None:
            self.max_nodes = _env_int('MGLAB_MAX_NODES', 10 ** 8)
        if self.max_seconds is None:
            self.max_seconds = float(os.getenv('MGLAB_MAX_SECONDS', '600'))
        if self.threads is None:
            self.threads = _env_int('MGLAB_THREADS', 1)
        if self.max_vertices is None:
            self.max_vertices = _env_int('MGLAB_MAX_VERTICES', 8)
        if self.girth_max_vertices is None:
            self.girth_max_vertices = _env_int('MGLAB_GIRTH_MAX_VERTICES', 10)
        if self.count_space is None:
            self.count_space = _env_int('MGLAB_COUNT_SPACE', 2 * 10 ** 6)
        for name in ('max_nodes', 'max_seconds', 'threads', 'max_vertices', 'girth_max_vertices', 'count_space'):
            if getattr(self, name) <= 0:
                raise SearchError(f"{name} must be positive, got {getattr(self, name)}")

    def to_dict(self) -> dict:
        return {
            'max_nodes': self.max_nodes,
            'max_seconds': self.max_seconds,
            'threads': self.threads,
        }


@dataclass
class ExtremalCertificate:
    """Exact extremal value with witnesses up to isomorphism."""
    mode: str
    n: int
    spec: ConstraintSpec
    value: int
    witnesses: List[Multigraph] = field(default_factory=list)
    witness_count_labeled: int = 0
    nodes_explored: int = 0
    all_witnesses: bool = False

    def to_dict(self, include_stats: bool = False) -> dict:
        from .data_loader import multigraph_to_record

        record = {
            'mode': self.mode,
            'n': self.n,
            's': self.spec.s,
            'q': self.spec.q,
            'value': self.value,
            'all_witnesses': self.all_witnesses,
            'witness_classes': len(self.witnesses),
            'witness_count_labeled': self.witness_count_labeled,
            'witnesses': [multigraph_to_record(G) for G in self.witnesses],
        }
        if include_stats:
            record['nodes_explored'] = self.nodes_explored
        return record


class Incumbent:
    """Best objective value seen by any worker; only ever increases."""

    def __init__(self, value: int = -1):
        self._lock = threading.Lock()
        self.value = value

    def improve(self, value: int) -> bool:
        with self._lock:
            if value > self.value:
                self.value = value
                return True
            return False


class _Budget:
    """Shared node and wall-clock budget."""

    def __init__(self, config: SearchConfig):
        self._lock = threading.Lock()
        self.max_nodes = config.max_nodes
        self.deadline = time.monotonic() + config.max_seconds
        self.nodes = 0
        self.exceeded = False

    def charge(self, nodes: int) -> None:
        with self._lock:
            self.nodes += nodes
            if self.nodes > self.max_nodes:
                self.exceeded = True
                raise CapExceededError(f"Search exceeded {self.max_nodes} nodes")
            if time.monotonic() > self.deadline:
                self.exceeded = True
                raise CapExceededError("Search exceeded its time limit")
            if self.exceeded:
                raise CapExceededError("Search aborted: another worker exceeded a cap")


class _Frame:
    """Static incidence structure between pairs and s-subsets of [n]."""

    def __init__(self, n: int, s: int):
        self.n = n
        self.s = s
        self.pairs = list(combinations(range(n), 2))
        index = {p: i for i, p in enumerate(self.pairs)}
        self.subset_pairs = [[index[p] for p in combinations(X, 2)] for X in combinations(range(n), s)]
        self.pair_subsets: List[List[int]] = [[] for _ in self.pairs]
        self.closing: List[List[int]] = [[] for _ in self.pairs]
        for x, indices in enumerate(self.subset_pairs):
            for e in indices:
                self.pair_subsets[e].append(x)
            self.closing[max(indices)].append(x)
        # every pair lies in this many s-subsets
        self.per_pair = comb(n - 2, s - 2)


@dataclass
class _TaskResult:
    best: int = -1
    leaves: List[Tuple[int, ...]] = field(default_factory=list)
    count: int = 0
    nodes: int = 0


class _Worker:
    """Depth-first search over one subtree, with incremental s-set bookkeeping."""

    def __init__(self, frame: _Frame, q: int, mode: str, floor: int,
                 incumbent: Incumbent, budget: _Budget, collect_ties: bool,
                 threshold: Optional[Tuple[int, int, int]] = None):
        self.frame = frame
        self.q = q
        self.mode = mode
        self.floor = floor
        self.incumbent = incumbent
        self.budget = budget
        self.collect_ties = collect_ties
        self.threshold = threshold
        self.set_sum = [0] * len(frame.subset_pairs)
        self.set_open = [len(indices) for indices in frame.subset_pairs]
        self.weights = [0] * len(frame.pairs)
        self.result = _TaskResult()
        self._pending = 0

    # -- bookkeeping -------------------------------------------------------

    def cap(self, e: int) -> int:
        q, floor = self.q, self.floor
        return min(q - self.set_sum[x] - (self.set_open[x] - 1) * floor for x in self.frame.pair_subsets[e])

    def assign(self, e: int, v: int) -> None:
        self.weights[e] = v
        for x in self.frame.pair_subsets[e]:
            self.set_sum[x] += v
            self.set_open[x] -= 1
        for x in self.frame.closing[e]:
            if self.set_sum[x] > self.q:
                raise SearchError(f"Residual cap let s-set {x} exceed q")

    def unassign(self, e: int, v: int) -> None:
        self.weights[e] = 0
        for x in self.frame.pair_subsets[e]:
            self.set_sum[x] -= v
            self.set_open[x] += 1

    def tick(self) -> None:
        self._pending += 1
        if self._pending >= _CHARGE_EVERY:
            self.flush()

    def flush(self) -> None:
        self.result.nodes += self._pending
        pending, self._pending = self._pending, 0
        self.budget.charge(pending)

    # -- bounds ------------------------------------------------------------

    def product_bound(self, e: int, partial: int) -> int:
        by_caps = partial
        for f in range(e, len(self.weights)):
            c = self.cap(f)
            if c < self.floor:
                return 0
            by_caps *= c
        by_sets = partial ** self.frame.per_pair
        for x, open_count in enumerate(self.set_open):
            if open_count:
                by_sets *= amgm_bound(open_count, self.q - self.set_sum[x])
                if by_sets == 0:
                    return 0
        return min(by_caps, integer_root(by_sets, self.frame.per_pair))

    def sum_bound(self, e: int, partial: int) -> int:
        by_caps = sum(max(self.cap(f), 0) for f in range(e, len(self.weights)))
        room = sum(self.q - self.set_sum[x] for x, open_count in enumerate(self.set_open) if open_count)
        return partial + min(by_caps, room // self.frame.per_pair)

    def _pruned(self, bound: int) -> bool:
        if self.threshold is not None:
            target, p, r = self.threshold
            return bound ** r < target ** (r - p)
        if bound < self.incumbent.value:
            return True
        return not self.collect_ties and bound <= self.result.best

    # -- leaves ------------------------------------------------------------

    def offer(self, value: int) -> None:
        result = self.result
        if self.threshold is not None:
            target, p, r = self.threshold
            if value ** r >= target ** (r - p):
                result.leaves.append(tuple(self.weights))
            return
        if value > result.best:
            result.best = value
            result.leaves = [tuple(self.weights)]
            if self.incumbent.improve(value):
                logger.debug(f"Incumbent {self.mode} value improved to {value}")
        elif value == result.best and self.collect_ties:
            result.leaves.append(tuple(self.weights))

    # -- search ------------------------------------------------------------

    def run(self, e: int, partial: int) -> None:
        self.tick()
        total = len(self.weights)
        if e == total:
            if self.mode == COUNT:
                self.result.count += 1
            else:
                self.offer(partial)
            return

        c = self.cap(e)
        if c < self.floor:
            return
        if self.mode == COUNT:
            if e == total - 1:
                self.result.count += c - self.floor + 1
                return
        elif self.mode == PRODUCT:
            if self._pruned(self.product_bound(e, partial)):
                return
        elif self._pruned(self.sum_bound(e, partial)):
            return

        for v in range(c, self.floor - 1, -1):
            self.assign(e, v)
            if self.mode == PRODUCT:
                self.run(e + 1, partial * v)
            else:
                self.run(e + 1, partial + v)
            self.unassign(e, v)


def _check_order(n: int, spec: ConstraintSpec, config: SearchConfig) -> None:
    if n < spec.s:
        raise SearchError(f"Search needs n >= s, got n={n}, s={spec.s}")
    if n > config.max_vertices:
        raise CapExceededError(f"n={n} exceeds the vertex cap {config.max_vertices}")


def _run_tasks(n: int, spec: ConstraintSpec, mode: str, floor: int, config: SearchConfig,
               collect_ties: bool = False,
               threshold: Optional[Tuple[int, int, int]] = None) -> List[_TaskResult]:
    """Split on the first edge's value and search each subtree."""
    frame = _Frame(n, spec.s)
    incumbent = Incumbent()
    budget = _Budget(config)

    probe = _Worker(frame, spec.q, mode, floor, incumbent, budget, collect_ties, threshold)
    first_values = list(range(probe.cap(0), floor - 1, -1))

    def task(v: int) -> _TaskResult:
        worker = _Worker(frame, spec.q, mode, floor, incumbent, budget, collect_ties, threshold)
        worker.assign(0, v)
        worker.run(1, v)
        worker.flush()
        return worker.result

    if config.threads > 1 and len(first_values) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            results = list(executor.map(task, first_values))
    else:
        results = [task(v) for v in first_values]
    logger.debug(f"{mode} search on n={n}, {spec}: {sum(r.nodes for r in results)} nodes")
    return results


def _classes(graphs: Sequence[Multigraph]) -> List[Multigraph]:
    """Canonical representatives of the distinct isomorphism classes, sorted."""
    seen: Dict[bytes, Multigraph] = {}
    for G in graphs:
        key = canonical_form(G)
        if key not in seen:
            seen[key] = canonical_representative(G)
    return [seen[key] for key in sorted(seen)]


def _verify(certificate: ExtremalCertificate) -> ExtremalCertificate:
    objective = product_total if certificate.mode == PRODUCT else sum_total
    for G in certificate.witnesses:
        if not is_member(G, certificate.spec) or objective(G) != certificate.value:
            raise SearchError(f"Witness {G} fails re-verification for {certificate.spec}")
    return certificate


def _optimize(n: int, spec: ConstraintSpec, mode: str, floor: int,
              config: SearchConfig, all_witnesses: bool) -> Tuple[int, List[Tuple[int, ...]], int]:
    results = _run_tasks(n, spec, mode, floor, config, collect_ties=all_witnesses)
    nodes = sum(r.nodes for r in results)
    best = max((r.best for r in results), default=-1)
    if best < 0:
        return best, [], nodes
    leaves = [leaf for r in results if r.best == best for leaf in r.leaves]
    if not all_witnesses:
        leaves = [max(leaves)]
    return best, sorted(set(leaves)), nodes


def max_product(n: int, spec: ConstraintSpec, config: Optional[SearchConfig] = None,
                all_witnesses: bool = False) -> ExtremalCertificate:
    """ex_Pi(n,s,q) with witnesses.

    Without all_witnesses the witness is the lexicographically greatest
    optimal labeled graph, so the output is deterministic.
    """
    config = config or SearchConfig()
    _check_order(n, spec, config)
    best, leaves, nodes = _optimize(n, spec, PRODUCT, 1, config, all_witnesses)

    if best < 0:
        logger.info(f"No positive-product member for n={n}, {spec}: value is 0")
        if all_witnesses:
            members = list(enumerate_members(n, spec, config))
            witnesses, labeled = _classes(members), len(members)
        else:
            witnesses, labeled = [Multigraph.zero(n)], 1
        return _verify(ExtremalCertificate(PRODUCT, n, spec, 0, witnesses, labeled, nodes, all_witnesses))

    graphs = [Multigraph(n, leaf) for leaf in leaves]
    certificate = ExtremalCertificate(PRODUCT, n, spec, best, _classes(graphs), len(graphs), nodes, all_witnesses)
    logger.info(f"ex_Pi({n}, {spec.s}, {spec.q}) = {best} ({len(certificate.witnesses)} witness classes)")
    return _verify(certificate)


def max_sum(n: int, spec: ConstraintSpec, config: Optional[SearchConfig] = None,
            all_witnesses: bool = False) -> ExtremalCertificate:
    """ex_Sigma(n,s,q) with witnesses."""
    config = config or SearchConfig()
    _check_order(n, spec, config)
    best, leaves, nodes = _optimize(n, spec, SUM, 0, config, all_witnesses)
    graphs = [Multigraph(n, leaf) for leaf in leaves]
    certificate = ExtremalCertificate(SUM, n, spec, best, _classes(graphs), len(graphs), nodes, all_witnesses)
    logger.info(f"ex_Sigma({n}, {spec.s}, {spec.q}) = {best}")
    return _verify(certificate)


def count_members(n: int, spec: ConstraintSpec, config: Optional[SearchConfig] = None) -> int:
    """|F(n,s,q)| exactly, as a labeled count."""
    config = config or SearchConfig()
    if n < 1:
        raise SearchError(f"Need n >= 1, got {n}")
    if n > config.max_vertices:
        raise CapExceededError(f"n={n} exceeds the vertex cap {config.max_vertices}")
    if n < 2:
        return 1
    if n < spec.s:
        # no s-sets: every weight function is a member
        raise SearchError(f"Members are unbounded for n < s (n={n}, s={spec.s})")
    results = _run_tasks(n, spec, COUNT, 0, config)
    total = sum(r.count for r in results)
    logger.info(f"|F({n}, {spec.s}, {spec.q})| = {total}")
    return total


def enumerate_members(n: int, spec: ConstraintSpec, config: Optional[SearchConfig] = None,
                      mu_cap: Optional[int] = None) -> Iterator[Multigraph]:
    """All labeled members of F(n,s,q) in descending lexicographic weight order.

    With mu_cap only members of F_{<=mu_cap}(n,s,q) are produced.
    """
    config = config or SearchConfig()
    _check_order(n, spec, config)
    frame = _Frame(n, spec.s)
    worker = _Worker(frame, spec.q, COUNT, 0, Incumbent(), _Budget(config), False)
    total = len(frame.pairs)

    def walk(e: int) -> Iterator[Multigraph]:
        worker.tick()
        if e == total:
            yield Multigraph(n, tuple(worker.weights))
            return
        top = worker.cap(e) if mu_cap is None else min(worker.cap(e), mu_cap)
        for v in range(top, -1, -1):
            worker.assign(e, v)
            yield from walk(e + 1)
            worker.unassign(e, v)

    yield from walk(0)


@dataclass(frozen=True)
class NearExtremalClass:
    """An isomorphism class above the near-extremal threshold."""
    graph: Multigraph
    product: int
    distance: int


def stability_family(n: int, spec: ConstraintSpec) -> FamilyDescriptor:
    """U_a(n) for CaseI, T_{s-t,a}(n) for CaseII."""
    regime = classify(spec.s, spec.q)
    if regime.kind == Regime.CASE_I:
        return FamilyDescriptor('U', regime.a)
    if regime.kind == Regime.CASE_II:
        return FamilyDescriptor('T', regime.a, spec.s - regime.t)
    raise SearchError(f"No stability target family for {spec}: regime {regime}")


def _as_fraction(epsilon: Union[int, float, str, Fraction]) -> Fraction:
    value = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    if value < 0:
        raise SearchError(f"epsilon must be nonnegative, got {epsilon}")
    return value


def near_extremal_scan(n: int, spec: ConstraintSpec, epsilon, config: Optional[SearchConfig] = None) -> List[NearExtremalClass]:
    """Classes with P(G) >= ex_Pi(n,s,q)^(1-epsilon), with edit distance to the target family."""
    config = config or SearchConfig()
    family = stability_family(n, spec)
    eps = _as_fraction(epsilon)
    extremal = max_product(n, spec, config).value
    if eps > 1:
        eps = Fraction(1)
    threshold = (extremal, eps.numerator, eps.denominator)

    results = _run_tasks(n, spec, PRODUCT, 1, config, threshold=threshold)
    graphs = [Multigraph(n, leaf) for r in results for leaf in r.leaves]
    members = enumerate_family(n, family)
    scan = []
    for G in _classes(graphs):
        distance = min(edit_distance(G, M).count for M in members)
        scan.append(NearExtremalClass(G, product_total(G), distance))
    scan.sort(key=lambda c: (-c.product, c.distance, canonical_form(c.graph)))
    logger.info(f"Near-extremal scan n={n}, {spec}, eps={eps}: {len(scan)} classes")
    return scan


def count_bad_configs_bruteforce(s: int, q: int, config: Optional[SearchConfig] = None) -> int:
    """g(s,q) by direct enumeration of all weight functions."""
    config = config or SearchConfig()
    m = ConstraintSpec(s, q).pair_count
    space = (q + 1) ** m
    if space > config.count_space:
        raise CapExceededError(f"(q+1)^C(s,2) = {space} exceeds the enumeration cap {config.count_space}")
    return sum(1 for weights in product(range(q + 1), repeat=m) if sum(weights) > q)


# ---------------------------------------------------------------------------
# ex(n, {C3, C4})
# ---------------------------------------------------------------------------

def _far_sets(G: Multigraph) -> Iterator[Tuple[int, ...]]:
    """Vertex sets pairwise at distance >= 3 (no edge, no common neighbour)."""
    n = G.n
    adjacency = [{v for v in range(n) if v != u and G.weight(u, v)} for u in range(n)]
    close = [set(adjacency[u]) for u in range(n)]
    for u in range(n):
        for v in adjacency[u]:
            close[u] |= adjacency[v]
        close[u].discard(u)

    def extend(start: int, chosen: List[int]) -> Iterator[Tuple[int, ...]]:
        yield tuple(chosen)
        for v in range(start, n):
            if all(v not in close[c] for c in chosen):
                chosen.append(v)
                yield from extend(v + 1, chosen)
                chosen.pop()

    yield from extend(0, [])


@lru_cache(maxsize=None)
def _girth_levels(n: int) -> Tuple[Multigraph, ...]:
    """Canonical representatives of girth-5 graphs on n vertices, as 0/1 multigraphs."""
    if n == 1:
        return (Multigraph(1, ()),)
    seen: Dict[bytes, Multigraph] = {}
    for H in _girth_levels(n - 1):
        for neighbours in _far_sets(H):
            extended = Multigraph.from_function(
                n, lambda u, v: 1 if v == n - 1 and u in neighbours else (H.weight(u, v) if v < n - 1 else 0)
            )
            key = canonical_form(extended)
            if key not in seen:
                seen[key] = canonical_representative(extended)
    logger.debug(f"{len(seen)} girth-5 classes on {n} vertices")
    return tuple(seen[key] for key in sorted(seen))


def _to_simple_graph(G: Multigraph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(G.n))
    graph.add_edges_from(pair for pair, w in G.items() if w)
    return graph


def girth_classes(n: int, config: Optional[SearchConfig] = None) -> List[nx.Graph]:
    """All {C3,C4}-free graphs on n vertices up to isomorphism."""
    config = config or SearchConfig()
    if n < 1:
        raise SearchError(f"Need n >= 1, got {n}")
    if n > config.girth_max_vertices:
        raise CapExceededError(f"n={n} exceeds the girth search cap {config.girth_max_vertices}")
    return [_to_simple_graph(G) for G in _girth_levels(n)]


def ex_c3c4(n: int, config: Optional[SearchConfig] = None) -> Tuple[int, nx.Graph]:
    """Maximum edges of an n-vertex graph with no C3 and no C4, with a witness."""
    if n < 2:
        raise SearchError(f"ex(n, {{C3,C4}}) needs n >= 2, got {n}")
    classes = girth_classes(n, config)
    best = max(G.number_of_edges() for G in classes)
    witness = next(G for G in classes if G.number_of_edges() == best)
    logger.info(f"ex({n}, {{C3,C4}}) = {best}")
    return best, witness
