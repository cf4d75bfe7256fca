"""Tests for the data loader module."""

import json
import os
import sys
from fractions import Fraction

import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.core.multigraph import Multigraph
from src.core.data_loader import (
    GoldenStore, MultigraphFormatError, SuiteConfig, dump_multigraph,
    load_multigraph, load_suite, multigraph_to_record, parse_multigraph,
    parse_suite,
)


class TestMultigraphFormat:
    """Parsing and canonical emission of the multigraph text format."""

    def test_parse(self):
        G = parse_multigraph({'n': 4, 'default': 2, 'edges': [[0, 1, 1], [2, 3, 1]]})
        assert G.weights == (1, 2, 2, 2, 2, 1)

    def test_default_is_optional(self):
        assert parse_multigraph({'n': 3, 'edges': [[0, 2, 5]]}).weights == (0, 5, 0)

    @pytest.mark.parametrize("record,fragment", [
        ([1, 2], "expected an object"),
        ({'default': 1}, "missing field n"),
        ({'n': 3, 'colour': 'red'}, "unknown fields"),
        ({'n': 0}, "n: expected an integer >= 1"),
        ({'n': 3, 'default': -1}, "default"),
        ({'n': 3, 'edges': {}}, "edges must be a list"),
        ({'n': 3, 'edges': [[0, 1]]}, "edges[0]"),
        ({'n': 3, 'edges': [[0, 1, 1], [2, 1, 1]]}, "edges[1]"),
        ({'n': 3, 'edges': [[0, 3, 1]]}, "edges[0]"),
        ({'n': 3, 'edges': [[0, 1, True]]}, "edges[0][2]"),
        ({'n': 3, 'edges': [[0, 1, 1], [0, 1, 2]]}, "listed twice"),
    ])
    def test_parse_errors_name_the_field(self, record, fragment):
        with pytest.raises(MultigraphFormatError) as excinfo:
            parse_multigraph(record, source='g.json')
        assert fragment in str(excinfo.value)

    def test_emission_uses_most_frequent_default(self):
        G = Multigraph.from_edges(4, [(0, 1, 1), (2, 3, 1)], default=2)
        assert multigraph_to_record(G) == {'n': 4, 'default': 2, 'edges': [[0, 1, 1], [2, 3, 1]]}

    def test_emission_tie_picks_smallest(self):
        G = Multigraph(3, (3, 1, 1))
        G2 = Multigraph(2, (7,))
        assert multigraph_to_record(Multigraph(4, (3, 3, 3, 1, 1, 1)))['default'] == 1
        assert multigraph_to_record(G)['default'] == 1
        assert multigraph_to_record(G2) == {'n': 2, 'default': 7, 'edges': []}
        assert multigraph_to_record(Multigraph(1, ())) == {'n': 1, 'default': 0, 'edges': []}

    def test_file_round_trip(self, tmp_path):
        G = Multigraph.from_edges(5, [(0, 4, 3), (1, 2, 0)], default=1)
        path = str(tmp_path / 'g.json')
        dump_multigraph(G, path)
        assert load_multigraph(path) == G

    def test_yaml_input(self, tmp_path):
        path = tmp_path / 'g.yaml'
        path.write_text("n: 3\ndefault: 1\nedges:\n  - [0, 1, 2]\n")
        assert load_multigraph(str(path)).weights == (2, 1, 1)

    def test_json_error_has_line_number(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"n": 3,\n "edges": [\n}')
        with pytest.raises(MultigraphFormatError) as excinfo:
            load_multigraph(str(path))
        assert "line 3" in str(excinfo.value)


class TestSuites:
    """Validation suite files."""

    def test_parse_suite(self):
        suite = parse_suite({'triples': [[4, 3, 6], [4, 3, 5]], 'epsilons': [0, 0.3], 'threads': 2})
        assert suite.triples == [(4, 3, 6), (4, 3, 5)]
        assert suite.epsilons == [Fraction(0), Fraction(3, 10)]
        assert suite.threads == 2

    def test_empty_suite(self):
        assert parse_suite(None).triples == []
        assert SuiteConfig().epsilons == []

    def test_bad_triple(self):
        with pytest.raises(MultigraphFormatError) as excinfo:
            parse_suite({'triples': [[4, 3]]}, source='s.yaml')
        assert "triples[0]" in str(excinfo.value)

    def test_bad_s(self):
        with pytest.raises(MultigraphFormatError):
            parse_suite({'triples': [[4, 1, 3]]})

    def test_default_suite_ships_acceptance_grid(self):
        suite = load_suite()
        assert (4, 3, 7) in suite.triples
        assert (5, 4, 10) in suite.triples
        assert suite.epsilons == [Fraction(0)]


class TestGoldenStore:
    """Frozen derived values."""

    def test_missing_file_starts_empty(self, tmp_path):
        store = GoldenStore(str(tmp_path / 'golden.json'))
        assert store.get('ex_c3c4', 5) is None

    def test_freeze_and_save(self, tmp_path):
        path = str(tmp_path / 'golden.json')
        store = GoldenStore(path)
        store.freeze('count_members', 20, 3, 3, 3)
        store.freeze('ex_c3c4', 10, 8)
        store.freeze('ex_c3c4', 5, 5)
        store.save()

        reloaded = GoldenStore(path)
        assert reloaded.get('count_members', 3, 3, 3) == 20
        with open(path) as f:
            data = json.load(f)
        assert list(data) == ['count_members', 'ex_c3c4']
        assert list(data['ex_c3c4']) == ['5', '8']

    def test_rejects_non_integer_values(self, tmp_path):
        path = tmp_path / 'golden.json'
        path.write_text('{"ex_c3c4": {"5": "five"}}')
        with pytest.raises(MultigraphFormatError):
            GoldenStore(str(path))

    def test_shipped_values(self):
        store = GoldenStore()
        assert store.get('ex_c3c4', 5) == 5
        assert store.get('count_members', 3, 3, 3) == 20


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
