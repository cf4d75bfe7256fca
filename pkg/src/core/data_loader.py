"""
Data Loader Module

Reads and writes everything the laboratory keeps on disk:
- Multigraph text format (JSON, or YAML with the same fields)
- Validation suite files (YAML)
- The golden store of frozen derived values
- Input validation with field-level diagnostics
"""

import json
import os
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple
import logging

import yaml
from dotenv import load_dotenv

from .multigraph import Multigraph, MultigraphError

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_GOLDEN_PATH = os.path.join(os.path.dirname(__file__), '..', '..', 'golden', 'derived_values.json')
DEFAULT_SUITE_PATH = os.path.join(os.path.dirname(__file__), '..', '..', 'suites', 'default.yaml')


class MultigraphFormatError(ValueError):
    """Raised for malformed input files; the message names the offending field."""


def _require_int(value: Any, path: str, minimum: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise MultigraphFormatError(f"{path}: expected an integer >= {minimum}, got {value!r}")
    return value


def parse_multigraph(record: Any, source: str = '<input>') -> Multigraph:
    """Build a Multigraph from a {"n", "default", "edges"} record."""
    if not isinstance(record, dict):
        raise MultigraphFormatError(f"{source}: expected an object with fields n, default, edges")
    unknown = sorted(set(record) - {'n', 'default', 'edges'})
    if unknown:
        raise MultigraphFormatError(f"{source}: unknown fields {unknown}")
    if 'n' not in record:
        raise MultigraphFormatError(f"{source}: missing field n")

    n = _require_int(record['n'], f"{source}: n", 1)
    default = _require_int(record.get('default', 0), f"{source}: default", 0)
    edges = record.get('edges', [])
    if not isinstance(edges, list):
        raise MultigraphFormatError(f"{source}: edges must be a list of [u, v, w] triples")

    triples = []
    for i, edge in enumerate(edges):
        path = f"{source}: edges[{i}]"
        if not isinstance(edge, (list, tuple)) or len(edge) != 3:
            raise MultigraphFormatError(f"{path}: expected [u, v, w], got {edge!r}")
        u = _require_int(edge[0], f"{path}[0]", 0)
        v = _require_int(edge[1], f"{path}[1]", 0)
        w = _require_int(edge[2], f"{path}[2]", 0)
        if not u < v < n:
            raise MultigraphFormatError(f"{path}: need 0 <= u < v < {n}, got u={u}, v={v}")
        triples.append((u, v, w))
    try:
        return Multigraph.from_edges(n, triples, default=default)
    except MultigraphError as e:
        raise MultigraphFormatError(f"{source}: {e}")


def multigraph_to_record(G: Multigraph) -> Dict[str, Any]:
    """Canonical emission: the most frequent multiplicity becomes `default`."""
    if G.weights:
        frequency = Counter(G.weights)
        top = max(frequency.values())
        default = min(w for w, c in frequency.items() if c == top)
    else:
        default = 0
    edges = [[u, v, w] for (u, v), w in G.items() if w != default]
    return {'n': G.n, 'default': default, 'edges': edges}


def _read_structured(path: str) -> Any:
    with open(path, 'r') as f:
        text = f.read()
    if path.endswith(('.yaml', '.yml')):
        try:
            return yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, 'problem_mark', None)
            where = f" line {mark.line + 1}" if mark else ''
            raise MultigraphFormatError(f"{path}:{where} invalid YAML: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MultigraphFormatError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")


def load_multigraph(path: str) -> Multigraph:
    """Load a multigraph file (JSON, or YAML by extension)."""
    G = parse_multigraph(_read_structured(path), source=path)
    logger.info(f"Loaded multigraph on {G.n} vertices from {path}")
    return G


def dump_multigraph(G: Multigraph, path: str) -> None:
    with open(path, 'w') as f:
        json.dump(multigraph_to_record(G), f)
        f.write('\n')
    logger.info(f"Wrote multigraph on {G.n} vertices to {path}")


@dataclass
class SuiteConfig:
    """A validation suite: (n, s, q) triples plus optional stability epsilons."""
    triples: Optional[List[Tuple[int, int, int]]] = None
    epsilons: Optional[List[Fraction]] = None
    threads: Optional[int] = None

    def __post_init__(self):
        if self.triples is None:
            self.triples = []
        if self.epsilons is None:
            self.epsilons = []
        self.triples = [tuple(t) for t in self.triples]
        self.epsilons = [Fraction(str(e)) for e in self.epsilons]


def parse_suite(record: Any, source: str = '<suite>') -> SuiteConfig:
    if record is None:
        return SuiteConfig()
    if not isinstance(record, dict):
        raise MultigraphFormatError(f"{source}: expected a mapping with a `triples` list")
    triples = record.get('triples', []) or []
    if not isinstance(triples, list):
        raise MultigraphFormatError(f"{source}: triples must be a list")
    parsed = []
    for i, triple in enumerate(triples):
        if not isinstance(triple, (list, tuple)) or len(triple) != 3:
            raise MultigraphFormatError(f"{source}: triples[{i}]: expected [n, s, q], got {triple!r}")
        n = _require_int(triple[0], f"{source}: triples[{i}][0]", 1)
        s = _require_int(triple[1], f"{source}: triples[{i}][1]", 2)
        q = _require_int(triple[2], f"{source}: triples[{i}][2]", 0)
        parsed.append((n, s, q))
    epsilons = record.get('epsilons', []) or []
    try:
        fractions = [Fraction(str(e)) for e in epsilons]
    except (ValueError, ZeroDivisionError):
        raise MultigraphFormatError(f"{source}: epsilons must be numbers, got {epsilons!r}")
    threads = record.get('threads')
    if threads is not None:
        threads = _require_int(threads, f"{source}: threads", 1)
    return SuiteConfig(triples=parsed, epsilons=fractions, threads=threads)


def load_suite(path: str = DEFAULT_SUITE_PATH) -> SuiteConfig:
    """Load a YAML validation suite."""
    suite = parse_suite(_read_structured(path), source=path)
    logger.info(f"Loaded suite with {len(suite.triples)} triples from {path}")
    return suite


class GoldenStore:
    """Frozen derived values, keyed by section and parameter string.

    Values are only rewritten through `freeze` followed by `save`, which the
    CLI does only under its regeneration flag.
    """

    def __init__(self, path: str = None):
        self.path = path or os.getenv('MGLAB_GOLDEN_PATH', DEFAULT_GOLDEN_PATH)
        self.values: Dict[str, Dict[str, int]] = {}
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            logger.warning(f"No golden store at {self.path}; starting empty")
            return
        try:
            with open(self.path, 'r') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise MultigraphFormatError(f"{self.path}: line {e.lineno} column {e.colno}: {e.msg}")
        self._validate(data)
        self.values = data

    def _validate(self, data: Any) -> None:
        if not isinstance(data, dict):
            raise MultigraphFormatError(f"{self.path}: expected an object of sections")
        for section, entries in data.items():
            if not isinstance(entries, dict):
                raise MultigraphFormatError(f"{self.path}: {section} must map keys to integers")
            for key, value in entries.items():
                _require_int(value, f"{self.path}: {section}.{key}", 0)

    @staticmethod
    def key(*params: int) -> str:
        return ','.join(str(p) for p in params)

    def get(self, section: str, *params: int) -> Optional[int]:
        return self.values.get(section, {}).get(self.key(*params))

    def freeze(self, section: str, value: int, *params: int) -> None:
        previous = self.get(section, *params)
        if previous is not None and previous != value:
            logger.warning(f"Golden {section}[{self.key(*params)}] changes from {previous} to {value}")
        self.values.setdefault(section, {})[self.key(*params)] = value

    def save(self) -> None:
        os.makedirs(os.path.dirname(os.path.abspath(self.path)), exist_ok=True)
        ordered = {
            section: dict(sorted(entries.items(), key=lambda kv: [int(x) for x in kv[0].split(',')]))
            for section, entries in sorted(self.values.items())
        }
        with open(self.path, 'w') as f:
            json.dump(ordered, f, indent=2)
            f.write('\n')
        logger.info(f"Saved golden store to {self.path}")
