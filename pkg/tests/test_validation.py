"""Tests for the validation harness."""

import json
import sys
import os
from fractions import Fraction

import pytest

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from src.core.data_loader import GoldenStore, SuiteConfig
from src.core.search import SearchConfig
from src.core.validation import (
    CONTAINS, EQUAL, GOLDEN_TARGETS, NOT_APPLICABLE, SUMMARY_COLUMNS, ValidationHarness,
    any_disagreement, summarize,
)


@pytest.fixture
def harness():
    return ValidationHarness(SearchConfig(threads=1))


class TestValidateCase:
    """Formula-vs-oracle reports for single triples."""

    def test_uniform_case(self, harness):
        report = harness.validate_case(4, 3, 6)
        assert report.agreement
        assert report.oracle_value == 64
        assert report.witness_family_check == EQUAL
        assert report.regime == "CaseI{a=2, b=0}"
        assert report.sum_oracle == 12

    def test_turan_case(self, harness):
        report = harness.validate_case(4, 3, 5)
        assert report.agreement
        assert report.oracle_value == 16
        assert report.witness_family_check == EQUAL
        assert report.count is not None
        assert dict(report.bounds_checked)['count-vs-product']

    def test_reduction_case(self, harness):
        report = harness.validate_case(4, 4, 10)
        assert report.agreement
        assert report.witness_family_check == CONTAINS
        assert dict(report.bounds_checked)['reduction-equality']
        assert report.oracle_value == harness.validate_case(4, 3, 5).oracle_value

    @pytest.mark.parametrize("n", [4, 5])
    def test_special_case(self, harness, n):
        report = harness.validate_case(n, 4, 9)
        assert report.agreement
        assert report.witness_family_check == NOT_APPLICABLE
        checks = dict(report.bounds_checked)
        for name in ('girth-identity', 'mu-at-most-2', 'reduced-class', 'bounded-class', 'heavy-triple'):
            assert checks[name], name

    def test_special_case_uses_girth_oracle(self, harness):
        report = harness.validate_case(5, 4, 9)
        assert report.oracle_value == 2 ** 5
        assert report.formula.value == 2 ** 5

    def test_bounded_class_checks_respect_state_space(self):
        harness = ValidationHarness(SearchConfig(threads=1, count_space=1000))
        checks = dict(harness.validate_case(5, 4, 9).bounds_checked)
        assert checks['girth-identity']
        assert 'bounded-class' not in checks
        assert 'heavy-triple' not in checks

    def test_uncovered_case_agrees_vacuously(self, harness):
        report = harness.validate_case(4, 4, 15)
        assert report.formula is None
        assert report.agreement

    def test_record_hides_timings_by_default(self, harness):
        report = harness.validate_case(4, 3, 6)
        assert 'time_ms' not in report.to_dict()
        assert 'time_ms' in report.to_dict(include_timings=True)


class TestSuite:
    """Suites, summaries and stability tables."""

    def test_empty_suite(self, harness):
        reports, summary = harness.validate_suite(SuiteConfig())
        assert reports == []
        assert list(summary.columns) == SUMMARY_COLUMNS
        assert summary.empty

    def test_single_triple_summary(self, harness):
        reports, summary = harness.validate_suite(SuiteConfig(triples=[(4, 3, 7)]))
        assert len(reports) == 1
        assert not any_disagreement(reports)
        row = summary.iloc[0]
        assert row['formula'] == '144'
        assert row['oracle'] == 144
        assert row['time_ms'] == ''

    def test_summary_with_timings(self, harness):
        reports, _ = harness.validate_suite(SuiteConfig(triples=[(4, 3, 6)]))
        summary = summarize(reports, include_timings=True)
        assert summary.iloc[0]['time_ms'] >= 0

    def test_records_identical_across_thread_counts(self):
        suite = SuiteConfig(triples=[(4, 3, 5), (4, 4, 10), (5, 4, 9), (5, 3, 6)])
        outputs = set()
        for threads in (1, 2, 8):
            reports, summary = ValidationHarness(SearchConfig(threads=threads)).validate_suite(suite)
            records = '\n'.join(json.dumps(r.to_dict(), sort_keys=True) for r in reports)
            outputs.add(records + summary.to_csv(index=False))
        assert len(outputs) == 1

    def test_stability_rows(self, harness):
        rows = harness.stability_report(4, 3, 6, [0, Fraction(1, 2)])
        assert rows[0].classes == 1
        assert rows[0].max_distance == 0
        assert rows[1].classes > 1
        assert rows[1].to_dict()['epsilon'] == '1/2'

    def test_turan_stability(self, harness):
        rows = harness.stability_report(4, 3, 5, [0])
        assert rows[0].max_distance == 0


class TestGolden:
    """Golden-value checks and regeneration."""

    def test_shipped_values_match(self, harness):
        rows = harness.golden_checks(GoldenStore())
        assert all(matches for *_, matches in rows)
        assert ('ex_c3c4[7]', 8, 8, True) in rows

    def test_every_target_is_frozen(self):
        store = GoldenStore()
        for section, targets in GOLDEN_TARGETS.items():
            for params in targets:
                assert store.get(section, *params) is not None, (section, params)

    def test_regeneration_fills_missing(self, harness, tmp_path):
        path = str(tmp_path / 'golden.json')
        rows = harness.golden_checks(GoldenStore(path), regenerate=True)
        assert all(frozen == computed for _, frozen, computed, _ in rows)
        assert GoldenStore(path).get('count_members', 3, 3, 3) == 20

    def test_mismatch_is_reported(self, harness, tmp_path):
        path = str(tmp_path / 'golden.json')
        store = GoldenStore(path)
        store.freeze('ex_c3c4', 4, 5)
        rows = harness.golden_checks(store)
        assert ('ex_c3c4[5]', 4, 5, False) in rows


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
