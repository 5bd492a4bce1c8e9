#!/usr/bin/env python3
"""
JACOBI TERMINAL
===============
Exact brackets. Verified tables. Honest exit codes.

    jacobi_terminal.py verify mass-shell --json out.json
    jacobi_terminal.py bracket mass-shell x0 x1
    jacobi_terminal.py table two-point
    jacobi_terminal.py symbol "d2(x0) - d2(x1) - d2(x2) - d2(x3)" "k0*x0 - k1*x1 - k2*x2 - k3*x3"
    jacobi_terminal.py peierls "x0 @ s=1" "x1 @ s=2" --geodesic symbolic
"""

import argparse
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from colorama import init

from engine_errors import JacobiEngineError, ParseError, UsageError
from contact_jacobi import jacobi_bracket
from expression_parser import parse_expression
from geodesic_peierls import parse_functional, parse_geodesic, peierls_bracket
from golden_store import GoldenStore
from minkowski_models import MODEL_NAMES, structure_constants_check
from operator_symbols import iterated_symbol, operator_chart, parse_operator, raw_iterated_commutator
from settings import EngineSettings
from table_renderer import Colors, TableRenderer, use_color
from verification_report import MEASURED, CheckRecord, VerificationReport
from verification_suites import SUITES, SuiteOptions, load_model, run_suite, working_pair

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def parse_specialization(text: Optional[str]) -> Optional[Fraction]:
    """'m=q' with q an exact rational"""
    if text is None:
        return None
    name, _, value = text.partition('=')
    if name.strip() != 'm' or not value.strip():
        raise UsageError(f"cannot specialize '{text}'; use m=<rational>")
    try:
        mass = Fraction(value.strip())
    except ValueError as e:
        raise UsageError(f"'{value.strip()}' is not an exact rational") from e
    if mass <= 0:
        raise UsageError("the mass must be positive")
    return mass


class JacobiTerminal:
    def __init__(self, settings: EngineSettings, args: argparse.Namespace):
        self.settings = settings
        self.args = args
        self.color = use_color(sys.stdout)
        self.options = SuiteOptions(
            mode=getattr(args, 'mode', None) or settings.mode,
            mass=parse_specialization(getattr(args, 'specialize', None)),
            corrupt=getattr(args, 'corrupt', None),
            workers=settings.workers if getattr(args, 'workers', None) is None else args.workers,
            seed=settings.seed,
        )

    def emit(self, lines: List[str]):
        for line in lines:
            print(line)

    def save_values(self, records: List[CheckRecord]):
        """Measured values as a one-command report, when --json was given"""
        if not self.args.json:
            return
        report = VerificationReport(self.args.command)
        report.extend(records)
        report.save(self.args.json)

    def cmd_verify(self) -> int:
        report = run_suite(self.args.suite, self.options)
        self.emit(TableRenderer.report_summary(report, self.color, self.args.failures_only))
        if self.args.json:
            report.save(self.args.json)
        return report.exit_code

    def cmd_bracket(self) -> int:
        model = load_model(self.args.model, self.options.mass)
        pair = working_pair(model, self.options)
        f = parse_expression(self.args.f, model.context)
        g = parse_expression(self.args.g, model.context)
        value = jacobi_bracket(pair, f, g)
        print(value)
        self.save_values([CheckRecord(f"bracket/{self.args.model}", f"[{self.args.f}, {self.args.g}]",
                                      MEASURED, measured=str(value), model=self.args.model,
                                      mode=self.options.mode)])
        return EXIT_OK

    def cmd_table(self) -> int:
        model = load_model(self.args.model, self.options.mass)
        pair = working_pair(model, self.options)
        rows = model.table(pair).rows()
        constants = structure_constants_check(self.args.model, model.generators(), pair)
        measured = next(r.measured for r in constants if r.id.endswith('/constants'))

        title = f"{self.args.model} (m = {self.options.mass if self.options.mass is not None else 'm'})"
        self.emit(TableRenderer.bracket_table(rows, title, self.color))
        self.save_values([CheckRecord(f"table/{left}/{right}", f"[{left}, {right}]", MEASURED, measured=value,
                                      model=self.args.model, mode=self.options.mode)
                          for left, right, value in rows])
        print()
        self.emit(TableRenderer.key_value(
            [(part.split(' = ')[0], part.split(' = ', 1)[1]) for part in measured.split('; ') if ' = ' in part],
            'Generator structure constants', self.color))

        if self.args.generators:
            generators = dict(model.generators())
            print()
            self.emit(TableRenderer.bracket_grid(
                list(generators), lambda a, b: str(jacobi_bracket(pair, generators[a], generators[b])),
                self.color))

        if self.args.golden is not None:
            store = GoldenStore(self.args.golden or self.settings.golden_dir)
            key = f"{self.args.model}-m={self.options.mass or 'symbolic'}-{self.options.mode}"
            data = {'rows': [list(r) for r in rows], 'constants': measured}
            if self.args.regenerate:
                store.set(key, data)
            status, diffs = store.compare(key, data)
            color = Colors.FAIL if status == 'mismatch' else Colors.PASS
            print(TableRenderer.colorize(f"golden {key}: {status}", color, self.color))
            self.emit(diffs)
            if status == 'mismatch':
                return EXIT_FAILED
        return EXIT_OK

    def cmd_symbol(self) -> int:
        chart = operator_chart()
        operator = parse_operator(self.args.operator, chart)
        generating = parse_expression(self.args.generating, chart.context)
        if self.args.raw:
            value = raw_iterated_commutator(operator, generating)
        else:
            value = iterated_symbol(operator, generating)
        print(value)
        self.save_values([CheckRecord('symbol', f"{operator} against {generating}", MEASURED, measured=str(value))])
        return EXIT_OK

    def cmd_peierls(self) -> int:
        geodesic = parse_geodesic(self.args.geodesic)
        first = parse_functional(self.args.a, geodesic.context)
        second = parse_functional(self.args.b, geodesic.context)
        value = peierls_bracket(geodesic, first, second)
        print(value)
        self.save_values([CheckRecord('peierls', f"[{first}, {second}]", MEASURED, measured=str(value))])
        return EXIT_OK

    def run(self) -> int:
        handler = getattr(self, f"cmd_{self.args.command}")
        return handler()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', metavar='PATH', help='write the JSON report here')
    common.add_argument('--specialize', metavar='m=q', help='fix the mass to an exact rational')
    common.add_argument('--mode', choices=('standard', 'paper'), help='volume-bracket coefficient')
    common.add_argument('--corrupt', choices=('lambda', 'gamma'), help='flip one tensor component')
    common.add_argument('--workers', type=int, help='threads for verification batteries')

    parser = argparse.ArgumentParser(prog='jacobi_terminal',
                                     description='Exact Jacobi brackets on Minkowski models')
    commands = parser.add_subparsers(dest='command', required=True)

    verify = commands.add_parser('verify', parents=[common], help='run a verification suite')
    verify.add_argument('suite', choices=SUITES)
    verify.add_argument('--failures-only', action='store_true', help='print failing checks only')

    bracket = commands.add_parser('bracket', parents=[common], help='evaluate [f, g] on a model')
    bracket.add_argument('model', choices=MODEL_NAMES)
    bracket.add_argument('f')
    bracket.add_argument('g')

    table = commands.add_parser('table', parents=[common], help='print the coordinate bracket table')
    table.add_argument('model', choices=MODEL_NAMES)
    table.add_argument('--golden', nargs='?', const='', metavar='DIR',
                       help='write or compare golden tables (default dir from JACOBI_GOLDEN_DIR)')
    table.add_argument('--regenerate', action='store_true', help='overwrite the golden table first')
    table.add_argument('--generators', action='store_true', help='also print the generator bracket grid')

    symbol = commands.add_parser('symbol', parents=[common], help='iterated commutator symbol')
    symbol.add_argument('operator', help='e.g. "d2(x0) - d2(x1) - d2(x2) - d2(x3)"')
    symbol.add_argument('generating', help='generating function S')
    symbol.add_argument('--raw', action='store_true', help='skip the k! normalization')

    peierls = commands.add_parser('peierls', parents=[common], help='Peierls bracket of two functionals')
    peierls.add_argument('a', help='e.g. "x0 @ s=1"')
    peierls.add_argument('b', help='e.g. "x1 @ s=2"')
    peierls.add_argument('--geodesic', default='symbolic', help='symbolic or x0=[...],k=[...]')
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    init()
    settings = EngineSettings.from_env()
    logging.basicConfig(level=getattr(logging, settings.log_level, logging.WARNING),
                        format='%(levelname)s %(name)s: %(message)s')
    args = build_parser().parse_args(argv)

    try:
        return JacobiTerminal(settings, args).run()
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except JacobiEngineError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
