from colorama import Fore, Style, init
from tabulate import tabulate

from core.report import Check

init(autoreset=True)

COLORS = {
    "G":  Fore.GREEN,
    "R":  Fore.RED,
    "Y":  Fore.YELLOW,
    "B":  Fore.BLUE,
    "M":  Fore.MAGENTA,
    "C":  Fore.CYAN,
    "RE": Style.RESET_ALL,
}


def print_table(rows: list[list[str]]) -> None:
    print(tabulate(rows, headers="firstrow", tablefmt="simple_outline"))


def _status(check: Check) -> str:
    C = COLORS
    if not check.gating:
        return f"{C['Y']}{'info' if check.passed else 'info (false)'}{C['RE']}"
    return f"{C['G']}pass{C['RE']}" if check.passed else f"{C['R']}FAIL{C['RE']}"


def print_checks(checks: list[Check]) -> None:
    if not checks:
        return
    rows = [["Check", "Status", "Measured", "Tolerance"]]
    for check in checks:
        rows.append([check.name, _status(check), f"{check.measured:.6g}", f"{check.tolerance:.3g}"])
    print_table(rows)
