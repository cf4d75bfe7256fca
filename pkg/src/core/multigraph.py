"""
Multigraph Data Model

Provides the universal object of the laboratory:
- Dense upper-triangular multiplicity storage in lexicographic pair order
- Sums and products (total, restricted, star and cross) with exact integers
- Induced submultigraphs, the +1 shift and the submultigraph order
- Edit distance and delta-closeness
- Isomorphism via canonical forms with colour refinement and twin pruning
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, prod
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import networkx as nx

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Rational = Union[int, Fraction, str, float]


class MultigraphError(ValueError):
    """Raised for invalid multigraphs or invalid vertex subsets."""


def pair_index(n: int, u: int, v: int) -> int:
    """Position of the pair {u, v} in lexicographic pair order on [n]."""
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


@dataclass(frozen=True)
class Multigraph:
    """A labeled multigraph on vertices 0..n-1.

    `weights` holds the multiplicity of every pair in lexicographic order
    (01, 02, ..., 0(n-1), 12, ...). Instances are immutable and hashable;
    equality is labeled pairwise equality.
    """
    n: int
    weights: Tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise MultigraphError(f"Vertex count must be a positive integer, got {self.n!r}")
        weights = tuple(self.weights)
        if len(weights) != comb(self.n, 2):
            raise MultigraphError(
                f"Expected {comb(self.n, 2)} multiplicities for n={self.n}, got {len(weights)}"
            )
        for w in weights:
            if not isinstance(w, int) or isinstance(w, bool) or w < 0:
                raise MultigraphError(f"Multiplicities must be nonnegative integers, got {w!r}")
        object.__setattr__(self, 'weights', weights)

    @classmethod
    def uniform(cls, n: int, a: int) -> 'Multigraph':
        return cls(n, (a,) * comb(n, 2))

    @classmethod
    def zero(cls, n: int) -> 'Multigraph':
        return cls.uniform(n, 0)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int, int]], default: int = 0) -> 'Multigraph':
        """Build from (u, v, w) triples; unlisted pairs get `default`."""
        weights = [default] * comb(n, 2)
        seen = set()
        for u, v, w in edges:
            _check_vertex(n, u)
            _check_vertex(n, v)
            if u == v:
                raise MultigraphError(f"Loop at vertex {u} is not a pair")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise MultigraphError(f"Pair {key} listed twice")
            seen.add(key)
            weights[pair_index(n, u, v)] = w
        return cls(n, tuple(weights))

    @classmethod
    def from_function(cls, n: int, weight_of) -> 'Multigraph':
        return cls(n, tuple(weight_of(u, v) for u, v in combinations(range(n), 2)))

    def weight(self, u: int, v: int) -> int:
        if u == v:
            raise MultigraphError(f"No pair {{{u},{v}}}")
        return self.weights[pair_index(self.n, u, v)]

    def pairs(self) -> Iterator[Pair]:
        return combinations(range(self.n), 2)

    def items(self) -> Iterator[Tuple[Pair, int]]:
        return zip(self.pairs(), self.weights)

    def to_matrix(self) -> np.ndarray:
        """Symmetric weight matrix (object dtype, zero diagonal)."""
        matrix = np.zeros((self.n, self.n), dtype=object)
        for (u, v), w in self.items():
            matrix[u, v] = w
            matrix[v, u] = w
        return matrix

    def relabel(self, perm: Sequence[int]) -> 'Multigraph':
        """Return the multigraph where old vertex x is renamed perm[x]."""
        if sorted(perm) != list(range(self.n)):
            raise MultigraphError(f"Not a permutation of 0..{self.n - 1}: {perm!r}")
        weights = [0] * len(self.weights)
        for (u, v), w in self.items():
            weights[pair_index(self.n, perm[u], perm[v])] = w
        return Multigraph(self.n, tuple(weights))

    def __repr__(self) -> str:
        return f"Multigraph(n={self.n}, weights={self.weights})"


@dataclass(frozen=True)
class EditDistanceReport:
    """Pairs on which two labeled multigraphs differ."""
    differing_pairs: FrozenSet[Pair] = field(default_factory=frozenset)
    count: int = 0


def _check_vertex(n: int, x: int) -> None:
    if not isinstance(x, int) or not 0 <= x < n:
        raise MultigraphError(f"Vertex {x!r} outside 0..{n - 1}")


def _vertex_set(G: Multigraph, X: Iterable[int]) -> List[int]:
    vertices = sorted(set(X))
    for x in vertices:
        _check_vertex(G.n, x)
    return vertices


def _same_order(G: Multigraph, H: Multigraph) -> None:
    if G.n != H.n:
        raise MultigraphError(f"Vertex counts differ: {G.n} vs {H.n}")


def sum_total(G: Multigraph) -> int:
    return sum(G.weights)


def product_total(G: Multigraph) -> int:
    return prod(G.weights)


def restricted_sum(G: Multigraph, X: Iterable[int]) -> int:
    """S(X): sum of multiplicities inside X."""
    vertices = _vertex_set(G, X)
    return sum(G.weight(u, v) for u, v in combinations(vertices, 2))


def restricted_product(G: Multigraph, X: Iterable[int]) -> int:
    """P(X): product of multiplicities inside X (1 for |X| < 2)."""
    vertices = _vertex_set(G, X)
    return prod(G.weight(u, v) for u, v in combinations(vertices, 2))


def _star_members(G: Multigraph, z: int, Y: Iterable[int]) -> List[int]:
    _check_vertex(G.n, z)
    members = _vertex_set(G, Y)
    if z in members:
        raise MultigraphError(f"Star centre {z} lies in Y")
    return members


def star_sum(G: Multigraph, z: int, Y: Iterable[int]) -> int:
    """S_z(Y): sum of w(yz) over y in Y."""
    return sum(G.weight(y, z) for y in _star_members(G, z, Y))


def star_product(G: Multigraph, z: int, Y: Iterable[int]) -> int:
    """P_z(Y): product of w(yz) over y in Y."""
    return prod(G.weight(y, z) for y in _star_members(G, z, Y))


def cross_product(G: Multigraph, X: Iterable[int], Y: Iterable[int]) -> int:
    """P(X, Y) for disjoint X and Y."""
    xs, ys = _vertex_set(G, X), _vertex_set(G, Y)
    overlap = set(xs) & set(ys)
    if overlap:
        raise MultigraphError(f"Subsets overlap in {sorted(overlap)}")
    return prod(G.weight(x, y) for x in xs for y in ys)


def induced(G: Multigraph, X: Iterable[int]) -> Multigraph:
    """G[X] relabeled 0..|X|-1 in ascending vertex order."""
    vertices = _vertex_set(G, X)
    if not vertices:
        raise MultigraphError("Induced submultigraph needs a nonempty vertex set")
    return Multigraph(len(vertices), tuple(G.weight(u, v) for u, v in combinations(vertices, 2)))


def plus_one(G: Multigraph) -> Multigraph:
    return Multigraph(G.n, tuple(w + 1 for w in G.weights))


def is_submultigraph(G: Multigraph, H: Multigraph) -> bool:
    _same_order(G, H)
    return all(a <= b for a, b in zip(G.weights, H.weights))


def edit_distance(G: Multigraph, H: Multigraph) -> EditDistanceReport:
    _same_order(G, H)
    differing = frozenset(p for p, a, b in zip(G.pairs(), G.weights, H.weights) if a != b)
    return EditDistanceReport(differing_pairs=differing, count=len(differing))


def is_delta_close(G: Multigraph, H: Multigraph, delta: Rational) -> bool:
    """|Delta(G, H)| <= delta * n^2, compared as exact rationals."""
    delta = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
    if delta < 0:
        raise MultigraphError(f"delta must be nonnegative, got {delta}")
    return edit_distance(G, H).count <= delta * G.n * G.n


def max_multiplicity(G: Multigraph) -> int:
    if G.n < 2:
        raise MultigraphError("mu(G) is undefined without pairs (n < 2)")
    return max(G.weights)


def weighted_degree(G: Multigraph, v: int) -> int:
    _check_vertex(G.n, v)
    return sum(G.weight(v, x) for x in range(G.n) if x != v)


def multiplicity_profile(G: Multigraph, a: int) -> Tuple[int, int, int]:
    """(e_a, p_a, m_a): pairs at exactly a, above a, below a."""
    exact = sum(1 for w in G.weights if w == a)
    plus = sum(1 for w in G.weights if w > a)
    return exact, plus, len(G.weights) - exact - plus


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------

def _refined_colours(G: Multigraph, matrix: np.ndarray) -> List[int]:
    """Isomorphism-invariant vertex colours by iterated weighted refinement."""
    n = G.n
    raw = [tuple(sorted(matrix[v, x] for x in range(n) if x != v)) for v in range(n)]
    ranks = {value: i for i, value in enumerate(sorted(set(raw)))}
    colours = [ranks[r] for r in raw]
    while True:
        raw = [
            (colours[v], tuple(sorted((colours[x], matrix[v, x]) for x in range(n) if x != v)))
            for v in range(n)
        ]
        ranks = {value: i for i, value in enumerate(sorted(set(raw)))}
        refined = [ranks[r] for r in raw]
        if len(ranks) == len(set(colours)):
            return refined
        colours = refined


def _twin_classes(G: Multigraph, matrix: np.ndarray) -> List[int]:
    """Class id per vertex; u, v are twins iff w(u,x) = w(v,x) for all other x."""
    n = G.n
    owner = list(range(n))
    for u in range(n):
        if owner[u] != u:
            continue
        for v in range(u + 1, n):
            if owner[v] == v and all(matrix[u, x] == matrix[v, x] for x in range(n) if x not in (u, v)):
                owner[v] = u
    return owner


def canonical_labeling(G: Multigraph) -> Tuple[int, ...]:
    """Vertex order whose colex weight sequence is minimal.

    Positions are filled cell by cell in refined-colour order; among
    candidates only one vertex per twin class is tried, since permuting twins
    is an automorphism.
    """
    n = G.n
    if n == 1:
        return (0,)
    matrix = G.to_matrix()
    colours = _refined_colours(G, matrix)
    slots = sorted(colours)
    twins = _twin_classes(G, matrix)
    best: List[Optional[List[int]]] = [None]
    best_order: List[Tuple[int, ...]] = [tuple(range(n))]
    order: List[int] = []
    used = [False] * n

    def extend(sequence: List[int]) -> None:
        k = len(order)
        if k == n:
            if best[0] is None or sequence < best[0]:
                best[0] = list(sequence)
                best_order[0] = tuple(order)
            return
        tried = set()
        for v in range(n):
            if used[v] or colours[v] != slots[k] or twins[v] in tried:
                continue
            tried.add(twins[v])
            column = [matrix[order[i], v] for i in range(k)]
            candidate = sequence + column
            if best[0] is not None and candidate > best[0][:len(candidate)]:
                continue
            order.append(v)
            used[v] = True
            extend(candidate)
            used[v] = False
            order.pop()

    extend([])
    return best_order[0]


def canonical_form(G: Multigraph) -> bytes:
    """Byte string equal for two multigraphs iff they are isomorphic."""
    order = canonical_labeling(G)
    sequence = [G.weight(order[i], order[j]) for j in range(G.n) for i in range(j)]
    return f"{G.n}|{','.join(map(str, sequence))}".encode('ascii')


def canonical_representative(G: Multigraph) -> Multigraph:
    """The relabeling of G that places vertex order[k] at position k."""
    order = canonical_labeling(G)
    perm = [0] * G.n
    for position, vertex in enumerate(order):
        perm[vertex] = position
    return G.relabel(perm)


def is_isomorphic(G: Multigraph, H: Multigraph) -> bool:
    if G.n != H.n or sorted(G.weights) != sorted(H.weights):
        return False
    return canonical_form(G) == canonical_form(H)


def to_networkx(G: Multigraph) -> nx.Graph:
    """Complete weighted graph carrying every multiplicity as `weight`."""
    graph = nx.Graph()
    graph.add_nodes_from(range(G.n))
    graph.add_weighted_edges_from((u, v, w) for (u, v), w in G.items())
    return graph


def describe(G: Multigraph) -> Dict[str, object]:
    """Summary statistics shown by `check`: totals, mu and weighted degrees."""
    return {
        'n': G.n,
        'sum': sum_total(G),
        'product': product_total(G),
        'mu': max_multiplicity(G) if G.n >= 2 else 0,
        'degrees': [weighted_degree(G, v) for v in range(G.n)],
    }
