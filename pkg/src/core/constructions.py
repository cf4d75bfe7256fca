"""
Constructions Module

Builders for the extremal families:
- Constant multigraphs U_a(n)
- Star-block multigraphs U_{s,a}(n) (stars of multiplicity a+1 on a constant-a base)
- Multigraph Turan families T_{s,a}(n) and Turan edge counts t_s(n)
- Exhaustive labeled enumeration of a family, with an explicit size cap
- {C3,C4}-free graph helpers: pendant extension, freeness check and the
  weight-2 lift into F(n,4,9)
"""

from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from math import comb, factorial, prod
from typing import Dict, Iterator, List, Optional, Sequence, Tuple
import logging

import networkx as nx

from .multigraph import Multigraph
from .constraints import Regime, RegimeClassification

logger = logging.getLogger(__name__)

Block = Tuple[int, ...]

STAR_BLOCKS = 'star-blocks'
EQUIPARTITION = 'equipartition'
DEFAULT_MAX_MEMBERS = 200_000


class ConstructionError(ValueError):
    """Raised for invalid partitions, centers or family descriptors."""


class FamilyTooLargeError(ConstructionError):
    """Raised when a family has more labeled members than the enumeration cap."""


@dataclass(frozen=True)
class BlockPartition:
    """Ordered disjoint blocks covering 0..n-1."""
    blocks: Tuple[Block, ...]
    kind: str = EQUIPARTITION

    def __post_init__(self):
        object.__setattr__(self, 'blocks', tuple(tuple(sorted(b)) for b in self.blocks))
        if self.kind not in (STAR_BLOCKS, EQUIPARTITION):
            raise ConstructionError(f"Unknown partition kind: {self.kind}")

    @property
    def sizes(self) -> List[int]:
        return [len(b) for b in self.blocks]

    def block_of(self) -> Dict[int, int]:
        return {v: i for i, block in enumerate(self.blocks) for v in block}

    def validate(self, n: int, size: Optional[int] = None, parts: Optional[int] = None) -> None:
        """Check coverage plus the size rule of the partition kind."""
        vertices = [v for block in self.blocks for v in block]
        if sorted(vertices) != list(range(n)):
            raise ConstructionError(f"Blocks {self.blocks} do not partition 0..{n - 1}")
        if self.kind == EQUIPARTITION:
            if parts is not None and len(self.blocks) != parts:
                raise ConstructionError(f"Expected {parts} parts, got {len(self.blocks)}")
            if self.blocks and max(self.sizes) - min(self.sizes) > 1:
                raise ConstructionError(f"Not an equipartition: block sizes {self.sizes}")
        else:
            odd = [k for k in self.sizes if k != size]
            if len(odd) > 1 or any(k > size for k in odd):
                raise ConstructionError(
                    f"Star blocks must have size {size} except one smaller remainder, got {self.sizes}"
                )


@dataclass(frozen=True)
class FamilyDescriptor:
    """A family addressed as `U:a`, `Ustar:s,a` or `T:parts,a`."""
    kind: str
    a: int
    size: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == 'U':
            return f"U:{self.a}"
        return f"{self.kind}:{self.size},{self.a}"


def parse_family(descriptor: str) -> FamilyDescriptor:
    """Parse a family descriptor string."""
    try:
        kind, _, params = descriptor.partition(':')
        values = [int(x) for x in params.split(',')] if params else []
    except ValueError:
        raise ConstructionError(f"Malformed family descriptor: {descriptor!r}")
    if kind == 'U' and len(values) == 1 and values[0] >= 0:
        return FamilyDescriptor('U', values[0])
    if kind in ('Ustar', 'T') and len(values) == 2 and values[0] >= 1 and values[1] >= 0:
        return FamilyDescriptor(kind, values[1], values[0])
    raise ConstructionError(f"Malformed family descriptor: {descriptor!r} (use U:a, Ustar:s,a or T:parts,a)")


def build_uniform(n: int, a: int) -> Multigraph:
    if a < 0:
        raise ConstructionError(f"Multiplicity must be nonnegative, got {a}")
    return Multigraph.uniform(n, a)


def default_star_partition(n: int, s: int) -> BlockPartition:
    """Consecutive blocks of size s, remainder (if any) last."""
    blocks = [tuple(range(i, min(i + s, n))) for i in range(0, n, s)]
    return BlockPartition(tuple(blocks), STAR_BLOCKS)


def default_equipartition(n: int, parts: int) -> BlockPartition:
    """Larger blocks first, vertices assigned in ascending order."""
    if parts < 1:
        raise ConstructionError(f"Need at least one part, got {parts}")
    base, extra = divmod(n, parts)
    blocks, start = [], 0
    for i in range(parts):
        size = base + (1 if i < extra else 0)
        blocks.append(tuple(range(start, start + size)))
        start += size
    return BlockPartition(tuple(blocks), EQUIPARTITION)


def build_star_blocks(n: int, s: int, a: int,
                      partition: Optional[BlockPartition] = None,
                      centers: Optional[Sequence[Optional[int]]] = None) -> Multigraph:
    """Member of U_{s,a}(n): each block carries a star of multiplicity a+1."""
    if s < 1 or a < 1:
        raise ConstructionError(f"U_(s,a) needs s >= 1 and a >= 1, got s={s}, a={a}")
    partition = partition or default_star_partition(n, s)
    partition.validate(n, size=s)
    if centers is None:
        centers = [block[0] if block else None for block in partition.blocks]
    if len(centers) != len(partition.blocks):
        raise ConstructionError(f"Need one center per block, got {len(centers)} for {len(partition.blocks)}")

    star = set()
    for block, center in zip(partition.blocks, centers):
        if len(block) < 2:
            continue
        if center not in block:
            raise ConstructionError(f"Center {center} is not in block {block}")
        star.update((min(center, v), max(center, v)) for v in block if v != center)
    return Multigraph.from_function(n, lambda u, v: a + 1 if (u, v) in star else a)


def build_turan_multigraph(n: int, parts: int, a: int,
                           partition: Optional[BlockPartition] = None,
                           allow_a_one: bool = False) -> Multigraph:
    """Member of T_{parts,a}(n): multiplicity a-1 inside parts, a across."""
    if a < 1 or (a == 1 and not allow_a_one):
        raise ConstructionError(f"T_(parts,a) needs a >= 2, got a={a}")
    if a == 1:
        logger.warning("Building T with a=1: in-part multiplicity 0 makes the product vanish")
    partition = partition or default_equipartition(n, parts)
    partition.validate(n, parts=parts)
    owner = partition.block_of()
    return Multigraph.from_function(n, lambda u, v: a - 1 if owner[u] == owner[v] else a)


def turan_edge_count(parts: int, n: int) -> int:
    """t_parts(n): edges of the complete balanced parts-partite graph."""
    if parts < 1 or n < 0:
        raise ConstructionError(f"t_parts(n) needs parts >= 1 and n >= 0, got parts={parts}, n={n}")
    base, extra = divmod(n, parts)
    return comb(n, 2) - extra * comb(base + 1, 2) - (parts - extra) * comb(base, 2)


def build_family_member(n: int, family: FamilyDescriptor) -> Multigraph:
    """Default-labeled member of the family."""
    if family.kind == 'U':
        return build_uniform(n, family.a)
    if family.kind == 'Ustar':
        return build_star_blocks(n, family.size, family.a)
    return build_turan_multigraph(n, family.size, family.a)


def _set_partitions(vertices: Tuple[int, ...], sizes: List[int]) -> Iterator[List[Block]]:
    """Unordered set partitions of `vertices` with the given multiset of block sizes."""
    if not vertices:
        yield []
        return
    first, rest = vertices[0], vertices[1:]
    for size in sorted(set(sizes)):
        remaining = list(sizes)
        remaining.remove(size)
        for companions in combinations(rest, size - 1):
            block = (first,) + companions
            others = tuple(v for v in rest if v not in companions)
            for tail in _set_partitions(others, remaining):
                yield [block] + tail


def _labeled_partition_count(n: int, sizes: List[int]) -> int:
    return factorial(n) // (prod(factorial(k) for k in sizes) * prod(factorial(c) for c in Counter(sizes).values()))


def _family_sizes(n: int, family: FamilyDescriptor) -> List[int]:
    if family.kind == 'Ustar':
        full, rest = divmod(n, family.size)
        return [family.size] * full + ([rest] if rest else [])
    base, extra = divmod(n, family.size)
    return [k for k in [base + 1] * extra + [base] * (family.size - extra) if k > 0]


def family_size_estimate(n: int, family: FamilyDescriptor) -> int:
    """Upper bound on the labeled members (partitions times center choices)."""
    if family.kind == 'U':
        return 1
    sizes = _family_sizes(n, family)
    count = _labeled_partition_count(n, sizes)
    if family.kind == 'Ustar':
        count *= prod(sizes)
    return count


def enumerate_family(n: int, family: FamilyDescriptor, max_members: int = DEFAULT_MAX_MEMBERS) -> List[Multigraph]:
    """All labeled members of the family, deduplicated, sorted by weight sequence.

    Raises FamilyTooLargeError instead of truncating.
    """
    estimate = family_size_estimate(n, family)
    if estimate > max_members:
        raise FamilyTooLargeError(f"{family} on {n} vertices has up to {estimate} members (cap {max_members})")
    if family.kind == 'U':
        return [build_uniform(n, family.a)]

    members: Dict[Tuple[int, ...], Multigraph] = {}
    sizes = _family_sizes(n, family)
    for blocks in _set_partitions(tuple(range(n)), sizes):
        if family.kind == 'T':
            padded = blocks + [()] * (family.size - len(blocks))
            G = build_turan_multigraph(n, family.size, family.a, BlockPartition(tuple(padded), EQUIPARTITION))
            members.setdefault(G.weights, G)
            continue
        partition = BlockPartition(tuple(blocks), STAR_BLOCKS)
        for centers in product(*[block if block else (None,) for block in blocks]):
            G = build_star_blocks(n, family.size, family.a, partition, centers)
            members.setdefault(G.weights, G)
    logger.debug(f"Enumerated {len(members)} labeled members of {family} on {n} vertices")
    return [members[key] for key in sorted(members)]


def family_for_regime(regime: RegimeClassification) -> Optional[FamilyDescriptor]:
    """The family whose members are the extremal witnesses of a regime, if known."""
    if regime.kind == Regime.CASE_I:
        if regime.b == 0:
            return FamilyDescriptor('U', regime.a)
        if regime.b == regime.s - 2:
            return FamilyDescriptor('Ustar', regime.a, regime.s - 1)
    if regime.kind == Regime.CASE_II:
        return FamilyDescriptor('T', regime.a, regime.s - regime.t)
    return None


# ---------------------------------------------------------------------------
# {C3, C4}-free graphs
# ---------------------------------------------------------------------------

def is_c3c4_free(H: nx.Graph) -> bool:
    """No triangle and no two vertices with two common neighbours."""
    if sum(nx.triangles(H).values()) > 0:
        return False
    for u, v in combinations(H.nodes, 2):
        if len(set(H[u]) & set(H[v])) >= 2:
            return False
    return True


def _check_girth_graph(H: nx.Graph) -> None:
    if sorted(H.nodes) != list(range(H.number_of_nodes())):
        raise ConstructionError(f"Graph vertices must be 0..m-1, got {sorted(H.nodes)}")
    if not is_c3c4_free(H):
        raise ConstructionError("Graph contains a C3 or a C4")


def pendant_extend(H: nx.Graph, i: int) -> nx.Graph:
    """Attach i new leaves to vertex 0; preserves {C3,C4}-freeness."""
    if i < 1:
        raise ConstructionError(f"Need at least one new vertex, got {i}")
    if H.number_of_nodes() == 0:
        raise ConstructionError("Cannot extend the empty graph: no vertex 0")
    _check_girth_graph(H)
    extended = H.copy()
    start = H.number_of_nodes()
    extended.add_edges_from((0, v) for v in range(start, start + i))
    return extended


def lift_girth_graph(H: nx.Graph) -> Multigraph:
    """Weight 2 on the edges of a {C3,C4}-free graph, 1 elsewhere."""
    _check_girth_graph(H)
    m = H.number_of_nodes()
    if m < 1:
        raise ConstructionError("Cannot lift the empty graph")
    return Multigraph.from_function(m, lambda u, v: 2 if H.has_edge(u, v) else 1)
