"""Tests for terminal rendering"""

from table_renderer import Colors, TableRenderer, use_color
from verification_report import FAIL, PASS, CheckRecord, VerificationReport


def test_bracket_table_alignment():
    lines = TableRenderer.bracket_table([('x0', 'x1', 'a'), ('p10', 'x1', '0')], title='demo')
    assert lines[0] == 'demo'
    assert lines[2] == '[x0, x1]  = a'
    assert lines[3] == '[p10, x1] = 0'
    assert TableRenderer.bracket_table([]) == ["No brackets to display"]


def test_colorize_only_when_enabled():
    assert TableRenderer.colorize('ok', Colors.PASS, False) == 'ok'
    assert TableRenderer.colorize('ok', Colors.PASS, True) == f"{Colors.PASS}ok{Colors.RESET}"


def test_report_summary():
    report = VerificationReport('demo', [
        CheckRecord('demo/good', 'ref', PASS, ms=2.0),
        CheckRecord('demo/bad', 'ref', FAIL, residual='x0'),
    ])
    lines = TableRenderer.report_summary(report)
    assert lines[0] == 'Suite: demo'
    assert lines[1].startswith('demo/good  pass')
    assert lines[2].endswith('ms  x0')
    assert lines[-1] == 'pass: 1, pass-mod-constraint: 0, measured: 0, fail: 1'

    failures = TableRenderer.report_summary(report, only_failures=True)
    assert not any('demo/good' in line for line in failures)


def test_grid_and_key_value():
    grid = TableRenderer.bracket_grid(['P0', 'P1'], lambda a, b: '0')
    assert len(grid) == 4
    assert grid[2].startswith('P0')
    assert TableRenderer.key_value([('a', '1'), ('long', '2')]) == ['a    : 1', 'long : 2']
    assert TableRenderer.key_value([]) == []


def test_use_color_needs_a_tty(tmp_path):
    with open(tmp_path / 'out.txt', 'w') as f:
        assert not use_color(f)
