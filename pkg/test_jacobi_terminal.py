"""End-to-end tests for the command-line interface"""

import json
from fractions import Fraction

import pytest

from engine_errors import UsageError
from jacobi_terminal import EXIT_FAILED, EXIT_OK, EXIT_USAGE, main, parse_specialization

BOX = "d2(x0) - d2(x1) - d2(x2) - d2(x3)"
PLANE_WAVE = "k0*x0 - k1*x1 - k2*x2 - k3*x3"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_specialization():
    assert parse_specialization(None) is None
    assert parse_specialization("m=3/2") == Fraction(3, 2)
    for bad in ("q=1", "m=", "m=abc", "m=0", "m=-1"):
        with pytest.raises(UsageError):
            parse_specialization(bad)


def test_bracket_on_mass_shell(capsys):
    code, out, _ = run(capsys, 'bracket', 'mass-shell', 'x0', 'x1')
    assert code == EXIT_OK
    assert out.strip() == "(x0*p1 - x1*p0)/m^2"

    code, out, _ = run(capsys, 'bracket', 'mass-shell', 'p0', 'p3')
    assert out.strip() == "0"


def test_bracket_with_specialized_mass(capsys):
    code, out, _ = run(capsys, 'bracket', 'mass-shell', 'x0', 'x1', '--specialize', 'm=1')
    assert code == EXIT_OK
    assert out.strip() == "x0*p1 - x1*p0"


def test_parse_errors_exit_two(capsys):
    code, _, err = run(capsys, 'bracket', 'mass-shell', 'x0 +', 'x1')
    assert code == EXIT_USAGE
    assert err.startswith("parse error")

    code, _, err = run(capsys, 'bracket', 'lagrangian', 'x0', 'x1', '--specialize', 'm=2')
    assert code == EXIT_USAGE
    assert err.startswith("usage error")


def test_unknown_model_is_rejected_by_argparse():
    with pytest.raises(SystemExit) as excinfo:
        main(['bracket', 'nowhere', 'x0', 'x1'])
    assert excinfo.value.code == 2


def test_symbol_command(capsys):
    code, out, _ = run(capsys, 'symbol', BOX, PLANE_WAVE)
    assert code == EXIT_OK
    assert out.strip() == "k0^2 - k1^2 - k2^2 - k3^2"

    code, out, _ = run(capsys, 'symbol', BOX, PLANE_WAVE, '--raw')
    assert out.strip() == "2*k0^2 - 2*k1^2 - 2*k2^2 - 2*k3^2"


def test_peierls_command(capsys):
    code, out, _ = run(capsys, 'peierls', 'x0 @ s=0', 'x1 @ s=0')
    assert code == EXIT_OK
    assert out.strip() == "x0*k1 - x1*k0"

    code, out, _ = run(capsys, 'peierls', 'x1 @ s=1', 'x1 @ s=2', '--geodesic', 'x0=[0,0,0,0],k=[5/4,3/4,0,0]')
    assert out.strip() == "1"

    code, _, err = run(capsys, 'peierls', 'x0 @ s=0', 'x1 @ s=0', '--geodesic', 'x0=[0,0,0,0],k=[1,1,0,0]')
    assert code == EXIT_USAGE
    assert "k.k" in err


def test_verify_operator_suite_writes_json(capsys, tmp_path):
    path = tmp_path / 'operator.json'
    code, out, _ = run(capsys, 'verify', 'operator', '--json', str(path), '--workers', '2')
    assert code == EXIT_OK
    assert out.startswith("Suite: operator")
    data = json.loads(path.read_text())
    assert data['suite'] == 'operator'
    assert {c['status'] for c in data['checks']} <= {'pass', 'pass-mod-constraint', 'measured'}


def test_verify_catches_corrupted_reeb(capsys):
    code, out, _ = run(capsys, 'verify', 'peierls', '--corrupt', 'gamma', '--failures-only')
    assert code == EXIT_FAILED
    assert 'peierls/mass-shell-consistency' in out


def test_verify_mass_shell_catches_corrupted_bivector(capsys):
    code, out, _ = run(capsys, 'verify', 'mass-shell', '--corrupt', 'lambda', '--failures-only')
    assert code == EXIT_FAILED
    assert 'fail' in out


def test_table_golden_round(capsys, tmp_path):
    golden = str(tmp_path / 'golden')
    code, out, _ = run(capsys, 'table', 'two-point', '--golden', golden)
    assert code == EXIT_OK
    assert "[(x-y)0, (x+y)0]" in out
    assert ": written" in out

    code, out, _ = run(capsys, 'table', 'two-point', '--golden', golden)
    assert code == EXIT_OK
    assert ": match" in out

    code, out, _ = run(capsys, 'table', 'two-point', '--golden', golden, '--corrupt', 'gamma')
    assert code == EXIT_FAILED
    assert ": mismatch" in out


def test_peierls_separated_example_collapses(capsys):
    code, out, _ = run(capsys, 'peierls', 'x0 @ s=1', 'x1 @ s=2')
    assert code == EXIT_OK
    assert out.strip() == "x0*k1 - x1*k0"

    code, out, _ = run(capsys, 'peierls', 'x2 @ s=1', 'x2 @ s=1')
    assert out.strip() == "0"


def test_bracket_json_record(capsys, tmp_path):
    path = tmp_path / 'bracket.json'
    code, _, _ = run(capsys, 'bracket', 'mass-shell', 'x0', 'x1', '--json', str(path))
    assert code == EXIT_OK
    data = json.loads(path.read_text())
    assert data['suite'] == 'bracket'
    assert data['checks'][0]['measured'] == "(x0*p1 - x1*p0)/m^2"
    assert data['checks'][0]['status'] == 'measured'
    assert (data['checks'][0]['model'], data['checks'][0]['mode']) == ('mass-shell', 'standard')
