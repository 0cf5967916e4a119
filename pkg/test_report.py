"""
=============================================================================
test_report.py - Тесты оркестрации прогона и JSON-отчета
=============================================================================

Запуск:
    pytest test_report.py

Автор: Команда Atomichack 3.0
=============================================================================
"""

import json

import pandas as pd
import pytest
from pydantic import ValidationError

import config
from conftest import make_config
from processing import emit_sequence, run_full_analysis, write_report
from processing.models import Gender, MatingPolicyKind, Report
from processing.pedigree import parse_term
from processing.report_generator import generation_table


@pytest.fixture(scope="module")
def four_adams():
    return run_full_analysis(make_config(4, 5))


# =============================================================================
# СОДЕРЖИМОЕ ОТЧЕТА
# =============================================================================

def test_report_counts_and_status(four_adams):
    report, _ = four_adams
    assert report.new_counts == [4, 6, 3, 3, 6, 16]
    assert report.generations_computed == 5
    status = report.verification_status
    assert status.state == "verified"
    assert status.agreeing_instances == 2
    assert status.published_terms_matched == 6
    assert status.unverified_from_generation is None


def test_report_miracles(four_adams):
    report, _ = four_adams
    assert len(report.miracles) == 4
    for entry in report.miracles:
        assert entry.gender is Gender.POINT
        assert not entry.trivial
        assert entry.child_generation == 5
        assert entry.witness_instances == 2 + config.DEFAULT_VERIFY_TRIALS
        assert len(entry.certificate.expressions) == 3
        assert entry.certificate.rendered_text == " = ".join(entry.certificate.expressions)
        for text in entry.certificate.expressions + entry.member_pedigrees:
            parse_term(text)


def test_coincidence_summary(four_adams):
    report, _ = four_adams
    summary = report.coincidence_summary
    assert summary['nontrivial_classes'] == 4
    assert summary['refuted_classes'] == 0
    assert summary['cogeny_classes'] == summary['trivial_classes'] + summary['nontrivial_classes']
    assert summary['trivial_classes'] == report.trivial_class_count
    assert summary['events'] == summary['trivial_events'] + summary['nontrivial_events']


def test_generation_rows_and_timings(four_adams):
    report, _ = four_adams
    rows = report.generation_table
    assert [r.new for r in rows] == report.new_counts
    assert [r.cumulative for r in rows] == report.cumulative_by_gender
    assert rows[2].candidate_pairs == 15 and rows[2].rediscoveries == 12
    assert {'schedule', 'cogeny', 'verification', 'total', 'generation_5'} <= set(report.timings)


def test_generation_table_frame(four_adams):
    report, schedule = four_adams
    table = generation_table(schedule)
    assert isinstance(table, pd.DataFrame)
    assert table['new'].tolist() == report.new_counts
    assert table['cumulative'].tolist() == report.cumulative_by_gender
    assert table['gender'].tolist()[:2] == ['point', 'line']


def test_report_survives_json(four_adams):
    report, _ = four_adams
    again = Report.model_validate_json(report.model_dump_json())
    assert again.new_counts == report.new_counts
    assert again.run_metadata.config_digest == make_config(4, 5).digest()


def test_same_config_gives_identical_report_bytes(four_adams):
    report, _ = four_adams
    again, _ = run_full_analysis(make_config(4, 5))
    assert again.model_dump_json(exclude={"timings"}) == report.model_dump_json(exclude={"timings"})
    assert set(again.timings) == set(report.timings)


def test_inconsistent_cumulative_rejected(four_adams):
    report, _ = four_adams
    data = report.model_dump(mode="json")
    data['cumulative_by_gender'][-1] += 1
    with pytest.raises(ValidationError):
        Report.model_validate(data)


# =============================================================================
# ПОСЛЕДОВАТЕЛЬНОСТИ
# =============================================================================

def test_emit_sequence(four_adams):
    report, _ = four_adams
    assert emit_sequence(report) == "4, 6, 3, 3, 6, 16"
    assert emit_sequence(report, "cumulative") == "4, 6, 7, 9, 13, 25"
    with pytest.raises(ValueError):
        emit_sequence(report, "odd")


def test_same_generation_cumulative_sequence():
    report, _ = run_full_analysis(make_config(5, 4, policy=MatingPolicyKind.SAME_GENERATION, verify_trials=0))
    assert emit_sequence(report, "cumulative") == "5, 10, 20, 85, 2100"
    assert emit_sequence(report, "new") == "5, 10, 15, 75, 2080"


def test_seed_only_sequence():
    report, _ = run_full_analysis(make_config(4, 0))
    assert emit_sequence(report) == "4"
    assert report.miracles == []


def test_terms_beyond_known_are_flagged():
    report, _ = run_full_analysis(make_config(3, 5, verify_runs=1))
    status = report.verification_status
    assert status.state == "single-instance"
    assert status.published_terms_matched == 3
    assert status.unverified_from_generation == 3


def test_published_mismatch(monkeypatch):
    monkeypatch.setitem(config.KNOWN_SEQUENCES, (4, "all-pairs", "generic"), [4, 6, 4])
    report, _ = run_full_analysis(make_config(4, 2, verify_trials=0))
    assert report.verification_status.state == "published-mismatch"
    assert report.verification_status.published_terms_matched == 2


# =============================================================================
# ЗАПИСЬ
# =============================================================================

def test_write_report_with_table(tmp_path, four_adams):
    report, schedule = four_adams
    path = write_report(report, tmp_path / "out" / "report.json", generation_table(schedule))
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data['new_counts'] == [4, 6, 3, 3, 6, 16]
    assert data['schema_version'] == config.REPORT_SCHEMA_VERSION
    csv = pd.read_csv(path.with_suffix('.csv'))
    assert csv['new'].tolist() == [4, 6, 3, 3, 6, 16]


def test_progress_reaches_completion():
    stages = []
    run_full_analysis(make_config(4, 3, verify_trials=1),
                      progress_callback=lambda stage, percent, message: stages.append(percent))
    assert stages[-1] == 100
