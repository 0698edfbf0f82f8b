#!/usr/bin/env python3
"""Audit run-report JSON files for failed gating checks."""

import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from rich import box
from rich.console import Console
from rich.table import Table

from core.report import REPORT_SCHEMA, Check, RunReport


@dataclass
class Failure:
    path: Path
    command: str
    check: Check


@dataclass
class Audit:
    reports: int = 0
    failures: list[Failure] = field(default_factory=list)
    unreadable: list[Path] = field(default_factory=list)


def _load(path: Path) -> RunReport | None:
    """The run report stored in ``path``, or None for JSON files of another kind."""
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict) or data.get("schema") != REPORT_SCHEMA:
        return None
    return RunReport.from_dict(data)


def scan_reports(root: Path) -> Audit:
    audit = Audit()
    for path in sorted(root.rglob("*.json")):
        try:
            report = _load(path)
        except (OSError, ValueError):
            audit.unreadable.append(path)
            continue
        if report is None:
            continue
        audit.reports += 1
        audit.failures += [Failure(path, report.command, c) for c in report.failed]
    return audit


def display_audit(audit: Audit, root: Path, console: Console | None = None) -> None:
    if console is None:
        console = Console()

    for path in audit.unreadable:
        console.print(f"[yellow]SKIP[/yellow] {path.relative_to(root)}: not readable as JSON")

    if not audit.reports:
        console.print("[yellow]No run reports found.[/yellow]")
        return

    if not audit.failures:
        console.print(f"[green]{audit.reports} reports, all gating checks passed.[/green]")
        return

    table = Table(box=box.SIMPLE_HEAVY, show_header=True, header_style="bold cyan")
    table.add_column("Report", style="dim")
    table.add_column("Command")
    table.add_column("Check", style="red")
    table.add_column("Measured", justify="right")
    table.add_column("Tolerance", justify="right")

    for failure in audit.failures:
        table.add_row(
            str(failure.path.relative_to(root)),
            failure.command,
            failure.check.name,
            f"{failure.check.measured:.6g}",
            f"{failure.check.tolerance:.3g}",
        )

    console.print(table)
    console.print(f"[bold]{len(audit.failures)} failed checks[/bold] in {audit.reports} reports")


def main() -> int:
    cwd = Path.cwd()
    audit = scan_reports(cwd)
    display_audit(audit, cwd)
    return 1 if audit.failures else 0


if __name__ == "__main__":
    sys.exit(main())
