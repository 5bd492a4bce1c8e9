"""
Table Renderer
==============
ASCII bracket tables and verification summaries for the terminal.
"""

import sys
from typing import List, Optional, Sequence, Tuple

from colorama import Fore, Style

from verification_report import FAIL, MEASURED, PASS, PASS_MOD_CONSTRAINT, VerificationReport


class Colors:
    HEADER = Fore.CYAN
    PASS = Fore.GREEN
    FAIL = Fore.RED
    MEASURED = Fore.YELLOW
    INFO = Fore.CYAN
    RESET = Style.RESET_ALL
    BRIGHT = Style.BRIGHT


STATUS_COLORS = {
    PASS: Colors.PASS,
    PASS_MOD_CONSTRAINT: Colors.PASS,
    FAIL: Colors.FAIL,
    MEASURED: Colors.MEASURED,
}


def use_color(stream=None) -> bool:
    stream = stream or sys.stdout
    return hasattr(stream, 'isatty') and stream.isatty()


class TableRenderer:
    """Static renderers returning lists of lines"""

    @staticmethod
    def colorize(text: str, color: str, enabled: bool) -> str:
        if not enabled or not color:
            return text
        return f"{color}{text}{Colors.RESET}"

    @staticmethod
    def bracket_table(rows: Sequence[Tuple[str, str, str]], title: str = "",
                      color: bool = False) -> List[str]:
        """Render bracket rows as an aligned table

        Args:
            rows: (left, right, value) triples
            title: Optional heading line
            color: Whether to emit ANSI colors

        Returns:
            List of strings representing the table
        """
        if not rows:
            return ["No brackets to display"]

        pairs = [f"[{left}, {right}]" for left, right, _ in rows]
        pair_width = max(len(p) for p in pairs)
        value_width = max(len(v) for _, _, v in rows)

        lines = []
        if title:
            lines.append(TableRenderer.colorize(title, Colors.HEADER + Colors.BRIGHT, color))
            lines.append("=" * (pair_width + value_width + 3))
        for pair, (_, _, value) in zip(pairs, rows):
            shown = TableRenderer.colorize(value, Colors.INFO if value == "0" else "", color)
            lines.append(f"{pair:<{pair_width}} = {shown}")
        return lines

    @staticmethod
    def bracket_grid(labels: Sequence[str], lookup, color: bool = False) -> List[str]:
        """Render a square grid of brackets, row label on the left

        Args:
            labels: Generator labels for rows and columns
            lookup: Callable (left, right) -> printed value

        Returns:
            List of strings representing the grid
        """
        cells = [[lookup(a, b) for b in labels] for a in labels]
        width = max([len(c) for row in cells for c in row] + [len(l) for l in labels]) + 1
        header = " " * width + "│" + "".join(f"{l:>{width}}" for l in labels)
        lines = [TableRenderer.colorize(header, Colors.HEADER, color),
                 "─" * width + "┼" + "─" * (width * len(labels))]
        for label, row in zip(labels, cells):
            lines.append(f"{label:<{width}}│" + "".join(f"{c:>{width}}" for c in row))
        return lines

    @staticmethod
    def report_summary(report: VerificationReport, color: bool = False,
                       only_failures: bool = False) -> List[str]:
        """One line per check plus a counts footer

        Args:
            report: Verification report to summarize
            color: Whether to emit ANSI colors
            only_failures: Skip every non-failing line

        Returns:
            List of strings
        """
        lines = [TableRenderer.colorize(f"Suite: {report.suite}", Colors.HEADER + Colors.BRIGHT, color)]
        if not report.checks:
            lines.append("No checks run")
            return lines
        id_width = max(len(c.id) for c in report.checks)
        for check in report.checks:
            if only_failures and not check.failed:
                continue
            status = TableRenderer.colorize(f"{check.status:<20}", STATUS_COLORS.get(check.status, ""), color)
            detail = check.measured or check.residual or ""
            lines.append(f"{check.id:<{id_width}}  {status} {check.ms:8.1f} ms  {detail}".rstrip())
        counts = report.counts()
        footer = ", ".join(f"{status}: {counts.get(status, 0)}" for status in
                           (PASS, PASS_MOD_CONSTRAINT, MEASURED, FAIL))
        lines.append("-" * len(footer))
        lines.append(footer)
        return lines

    @staticmethod
    def key_value(pairs: Sequence[Tuple[str, str]], title: Optional[str] = None,
                  color: bool = False) -> List[str]:
        """Aligned 'name : value' block"""
        if not pairs:
            return []
        width = max(len(k) for k, _ in pairs)
        lines = [TableRenderer.colorize(title, Colors.HEADER, color)] if title else []
        lines.extend(f"{k:<{width}} : {v}" for k, v in pairs)
        return lines
