"""Tests for check records, reports and batched execution"""

import threading

import pytest

from verification_report import (
    FAIL, MEASURED, PASS, PASS_MOD_CONSTRAINT, CheckRecord, VerificationReport, passed, run_checks,
)


def sample_report():
    report = VerificationReport('demo')
    report.extend([
        CheckRecord('demo/a', 'a = a', PASS, ms=1.5),
        CheckRecord('demo/b', 'b = b mod shell', PASS_MOD_CONSTRAINT),
        CheckRecord('demo/c', 'c measured', MEASURED, measured='factor=3'),
    ])
    return report


def test_passed_statuses():
    assert passed(True) == PASS
    assert passed(True, True) == PASS_MOD_CONSTRAINT
    assert passed(False, True) == FAIL


def test_unknown_status_rejected():
    with pytest.raises(ValueError):
        CheckRecord('x', 'ref', 'maybe')


def test_json_round_trip_is_byte_identical():
    text = sample_report().to_json()
    assert VerificationReport.from_json(text).to_json() == text
    assert '"residual"' not in text
    assert text.endswith('}\n')


def test_model_and_mode_survive_json_and_merge():
    report = VerificationReport('mass-shell', [
        CheckRecord('schouten', 'ref', PASS, model='mass-shell', mode='standard'),
        CheckRecord('schouten-alt', 'ref', FAIL, model='mass-shell', mode='paper'),
    ])
    restored = VerificationReport.from_json(report.to_json())
    assert [(r.model, r.mode) for r in restored.checks] == [('mass-shell', 'standard'), ('mass-shell', 'paper')]
    combined = VerificationReport('all')
    combined.merge(restored)
    assert combined.checks[1].mode == 'paper'
    assert '"model"' not in sample_report().to_json()


def test_save_writes_json(tmp_path):
    path = tmp_path / 'report.json'
    report = sample_report()
    report.save(str(path))
    assert path.read_text() == report.to_json()


def test_exit_code_and_counts():
    report = sample_report()
    assert report.exit_code == 0
    report.add(CheckRecord('demo/d', 'broken', FAIL, residual='x0'))
    assert report.exit_code == 1
    assert [r.id for r in report.failures] == ['demo/d']
    assert report.counts() == {PASS: 1, PASS_MOD_CONSTRAINT: 1, FAIL: 1, MEASURED: 1}


def test_duplicate_ids_rejected():
    report = sample_report()
    with pytest.raises(ValueError):
        report.add(CheckRecord('demo/a', 'again', PASS))


def test_merge_prefixes_once():
    combined = VerificationReport('all')
    combined.merge(sample_report())
    other = VerificationReport('extra', [CheckRecord('loose', 'ref', PASS)])
    combined.merge(other)
    assert [r.id for r in combined.checks] == ['demo/a', 'demo/b', 'demo/c', 'extra/loose']


def test_run_checks_flattens_batteries_in_order():
    checks = [
        lambda: CheckRecord('one', 'ref', PASS),
        lambda: [CheckRecord('two', 'ref', PASS), CheckRecord('three', 'ref', MEASURED)],
        lambda: CheckRecord('four', 'ref', FAIL),
    ]
    serial = run_checks(checks)
    threaded = run_checks(checks, workers=3)
    assert [r.id for r in serial] == ['one', 'two', 'three', 'four']
    assert [r.id for r in threaded] == [r.id for r in serial]
    assert all(r.ms >= 0 for r in threaded)


def test_run_checks_uses_threads():
    seen = set()

    def check(name):
        def run():
            seen.add(threading.get_ident())
            return CheckRecord(name, 'ref', PASS)
        return run

    records = run_checks([check(f"c{i}") for i in range(4)], workers=2)
    assert len(records) == 4
    assert threading.get_ident() not in seen
