#!/usr/bin/env python3

import logging
import math
import os
import sys
import time
from argparse import ArgumentParser, Namespace, RawTextHelpFormatter
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from core import config, display
from core.expand import BASES, ORDERINGS, ORTHONORMAL, RIDGE_BASES, Expansion, convergence_experiment, expand, reconstruct
from core.filesystem import read_json, write_csv, write_json, write_text
from core.functions import BUILTINS, builtin
from core.gram import RIESZ_SLACK, gram, riesz_bounds, sawtooth_gram, spectra_coincide
from core.indices import canonicalize, ridge_indices
from core.pwl import SQRT2, eval_dilated, eval_ridge, eval_tensor, eval_trig, hat_interpolates_sine
from core.relu import compile_ridge, compile_tensor, compile_univariate, export_json, import_json, linear_regions, net_eval
from core.report import RunReport
from core.transfer import (
    DEFAULT_TERMS,
    PI2,
    PREVIOUS_LOWER_RIESZ,
    TAU1,
    TRANSFER_KINDS,
    OperatorSpec,
    abs_tau_sum,
    apply_T,
    dirichlet_inverse_array,
    operator_norm_bound,
    schauder_criterion,
    tau_array,
)
from core.utils import odd_tail_sum, set_threads
from systems.base import BasisSystem
from systems.hat import HatSystem, TensorHatSystem
from systems.r1 import R1System
from systems.rn import RnSystem

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

SYSTEMS: dict[str, BasisSystem] = {
    "r1":         R1System(),
    "rn":         RnSystem(),
    "hat":        HatSystem(),
    "tensor-hat": TensorHatSystem(),
}

# exact G^S = D G^C D comparisons get slow beyond this size
IDENTITY_MAX_N = 128
TENSOR_DEFAULT_M = 64
EXACT_TOL = 1e-12
ROUND_TRIP_TOL = 1e-9
TAIL_MATCH_TOL = 1e-6


def _int_list(text: str) -> list[int]:
    try:
        return [int(e) for e in str(text).split(",") if e.strip()]
    except ValueError as e:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from e


def _shapes(text: str | None) -> list[tuple[int, ...]]:
    if not text:
        return []
    return [tuple(_int_list(part)) for part in text.split(";")]


def _sample_points(args: Namespace, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(args.seed))
    return rng.random((args.samples, n))


def _out(args: Namespace, default: str) -> str:
    return args.out or default


# -- system flags -------------------------------------------------------------


def _system_args(parser: ArgumentParser) -> None:
    parser.add_argument("--system", choices=sorted(SYSTEMS), default="r1",
                        help="Function system whose Gram matrix is built (default: r1)")
    parser.add_argument("--N", type=int, default=8,
                        help="Number of dilations per family, or side of the tensor index cube (default: 8)")
    parser.add_argument("--n", type=int, default=2,
                        help="Dimension of the rn and tensor-hat systems (default: 2)")
    for system in SYSTEMS.values():
        system.add_args(parser)


# -- commands -----------------------------------------------------------------


def _eval_args(parser: ArgumentParser) -> None:
    parser.add_argument("--function", required=True,
                        help=f"Function to sample: {', '.join(BUILTINS)}")
    parser.add_argument("--n", type=int, default=1, help="Dimension of constant inputs (default: 1)")
    parser.add_argument("--grid", type=int, default=1001, help="Grid points on [0, 1] for univariate inputs")
    parser.add_argument("--samples", type=int, default=4096, help="Random points for multivariate inputs")


def _eval(args: Namespace, report: RunReport) -> None:
    f = builtin(args.function, args.n)
    if f.n == 1:
        x = np.linspace(0.0, 1.0, args.grid)
        rows = zip(x, f(x))
        header = ["t", "value"]
    else:
        x = _sample_points(args, f.n)
        rows = ((*p, v) for p, v in zip(x, f(x)))
        header = [f"x{i + 1}" for i in range(f.n)] + ["value"]
    report.outputs.append(write_csv(_out(args, "eval.csv"), header, rows))

    name, _, arg = args.function.partition(":")
    if name == "hat" and arg.isdigit():
        interp = hat_interpolates_sine(int(arg))
        report.add_check(f"hat_{arg}_interpolates_sine", interp.holds, 0.0 if interp.holds else 1.0, 0.0)


def _gram_args(parser: ArgumentParser) -> None:
    _system_args(parser)
    parser.add_argument("--exact", action="store_true", help="Rational entries (Fractions) instead of binary64")


def _gram(args: Namespace, report: RunReport) -> None:
    matrix = gram(SYSTEMS[args.system], args, exact=args.exact)
    path = _out(args, "gram.json")
    report.outputs.append(matrix.to_csv(path) if path.endswith(".csv") else write_json(path, matrix.to_dict()))
    diagonal = np.abs(np.diag(matrix.to_float()) - 1.0)
    report.add_check("unit_diagonal", bool(np.max(diagonal) <= EXACT_TOL), float(np.max(diagonal)), EXACT_TOL)


def _spectra_args(parser: ArgumentParser) -> None:
    parser.add_argument("--N", type=int, default=64, help="Number of dilations (default: 64)")
    parser.add_argument("--compare", action="store_true", help="Check that the C and S spectra coincide")
    parser.add_argument("--tol", type=float, default=1e-10, help="Largest eigenvalue gap accepted (default: 1e-10)")


def _spectra(args: Namespace, report: RunReport) -> None:
    ev_c = sawtooth_gram("C", args.N, exact=False).eigenvalues()
    ev_s = sawtooth_gram("S", args.N, exact=False).eigenvalues()
    rows = ((i + 1, c, s) for i, (c, s) in enumerate(zip(ev_c, ev_s)))
    report.outputs.append(write_csv(_out(args, "spectra.csv"), ["index", "eig_C", "eig_S"], rows))
    if not args.compare:
        return
    check_identity = args.N <= IDENTITY_MAX_N
    result = spectra_coincide(args.N, args.tol, check_identity=check_identity)
    report.add_check("spectra_gap", result.max_gap <= args.tol, result.max_gap, args.tol)
    if check_identity:
        report.add_check("GS_equals_DGCD", result.identity_holds, 0.0 if result.identity_holds else 1.0, 0.0)
    else:
        logging.info("N=%d > %d: rational identity check skipped", args.N, IDENTITY_MAX_N)


def _riesz(args: Namespace, report: RunReport) -> None:
    bounds = riesz_bounds(SYSTEMS[args.system], args)
    A, B = bounds.A, bounds.B
    if args.system == "tensor-hat":
        # tensor products of Riesz bases multiply the constants
        A, B = A ** args.n, B ** args.n
    rows = [
        ("lambda_min", bounds.lambda_min),
        ("lambda_max", bounds.lambda_max),
        ("A", A),
        ("B", B),
        ("previous_A", PREVIOUS_LOWER_RIESZ),
    ]
    report.outputs.append(write_csv(_out(args, "riesz.csv"), ["quantity", "value"], rows))
    margin = min(bounds.lambda_min - A, B - bounds.lambda_max)
    report.add_check("riesz_interval", margin >= -RIESZ_SLACK, margin, RIESZ_SLACK)


def _tau_args(parser: ArgumentParser) -> None:
    parser.add_argument("--N", type=int, default=32, help="Coefficients to list (default: 32)")
    parser.add_argument("--terms", type=int, default=10 ** 6, help="Terms of the absolute sums (default: 10^6)")


def _tau(args: Namespace, report: RunReport) -> None:
    values = tau_array(args.N)
    inverse = dirichlet_inverse_array(values, args.N)
    rows = ((k, values[k], inverse[k]) for k in range(1, args.N + 1))
    report.outputs.append(write_csv(_out(args, "tau.csv"), ["k", "tau", "tau_inverse"], rows))

    expected = 4.0 * math.sqrt(2.0) / PI2
    report.add_check("tau_1", abs(values[1] - expected) <= 1e-15, abs(values[1] - expected), 1e-15)

    # truncated sums fall short of the limit by at most the odd tail
    tail = TAU1 * odd_tail_sum(2 * args.terms - 1) + 1e-9
    full = abs_tau_sum(args.terms)
    gap = 1.0 / math.sqrt(2.0) - full
    report.add_check("abs_tau_sum", -1e-9 <= gap <= tail, gap, tail)

    rest = abs_tau_sum(args.terms - 1, start=2)
    gap = TAU1 * (PI2 / 8.0 - 1.0) - rest
    report.add_check("abs_tau_rest", -1e-9 <= gap <= tail, gap, tail)
    report.add_check("rest_below_tau_1", rest < TAU1, rest / TAU1, 1.0)


def _transfer_args(parser: ArgumentParser) -> None:
    parser.add_argument("--kind", choices=TRANSFER_KINDS, default="T_hat_1d", help="Transfer operator (default: T_hat_1d)")
    parser.add_argument("--M", type=int, default=None,
                        help=f"Odd multipliers per axis (default: {DEFAULT_TERMS}, {TENSOR_DEFAULT_M} for T_tensor)")
    parser.add_argument("--n", type=int, default=1, help="Dimension (default: 1)")
    parser.add_argument("--bound", type=int, default=4, help="Largest j, m_i or ||k||_inf tested (default: 4)")
    parser.add_argument("--grid", type=int, default=2001, help="Grid points for T_hat_1d")
    parser.add_argument("--samples", type=int, default=256, help="Random points for T_tensor and T_ridge")


def _transfer_cases(kind: str, n: int, bound: int):
    """(label, f, target, sup of f) for every basis element checked."""
    if kind == "T_hat_1d":
        for j in range(1, bound + 1):
            yield f"hat_{j}", (lambda y, j=j: SQRT2 * np.sin(j * np.pi * y)), (lambda x, j=j: eval_dilated("hat", j, x)), SQRT2
    elif kind == "T_tensor":
        for m in np.ndindex(*(bound,) * n):
            m = tuple(int(e) + 1 for e in m)
            yield (
                f"hat_({','.join(map(str, m))})",
                lambda y, m=m: eval_trig("e_m_tensor", m, y),
                lambda x, m=m: eval_tensor("hat", m, x),
                2.0 ** (n / 2),
            )
    else:
        for k in ridge_indices(n, bound):
            vec = np.array(k.entries, dtype=float)
            yield f"C_({k})", (lambda y, v=vec: np.cos(2.0 * np.pi * (y @ v))), (lambda x, k=k: eval_ridge("C", k, x)), 1.0
            yield f"S_({k})", (lambda y, v=vec: np.sin(2.0 * np.pi * (y @ v))), (lambda x, k=k: eval_ridge("S", k, x)), 1.0


def _transfer_verify(args: Namespace, report: RunReport) -> None:
    M = args.M if args.M is not None else (TENSOR_DEFAULT_M if args.kind == "T_tensor" else DEFAULT_TERMS)
    spec = OperatorSpec(args.kind, M, args.n)
    x = np.linspace(0.0, 1.0, args.grid) if args.kind == "T_hat_1d" else _sample_points(args, args.n)

    rows, worst, bound = [], 0.0, 0.0
    for label, f, target, sup in _transfer_cases(args.kind, args.n, args.bound):
        result = apply_T(spec, f, x, sup_norm=sup)
        gap = float(np.max(np.abs(result.value - target(x))))
        rows.append((label, gap, result.error_bound))
        worst = max(worst, gap - result.error_bound)
        bound = max(bound, result.error_bound)
    report.outputs.append(write_csv(_out(args, "transfer.csv"), ["element", "max_gap", "error_bound"], rows))
    report.add_check("transfer_fidelity", worst <= EXACT_TOL, max(r[1] for r in rows), bound + EXACT_TOL)

    norm = operator_norm_bound(spec)
    report.add_check("neumann_contraction", norm.contraction < 1.0, norm.contraction, 1.0, gating=False)


def _expand_args(parser: ArgumentParser) -> None:
    parser.add_argument("--function", required=True, help=f"Input function: {', '.join(BUILTINS)}")
    parser.add_argument("--basis", choices=BASES, default="hat", help="Target system (default: hat)")
    parser.add_argument("--N", type=int, default=64, help="Cutoff: N, side N or ||k||_inf <= N (default: 64)")
    parser.add_argument("--n", type=int, default=1, help="Dimension of constant inputs (default: 1)")


def _unit_target(spec: str, basis: str) -> tuple[str, object, float] | None:
    """(slot, index, coefficient) when the input is itself one element of the basis."""
    name, _, arg = spec.partition(":")
    if "+" in spec or not arg or name == "csv":
        return None
    try:
        index = tuple(_int_list(arg))
    except ValueError:
        return None
    pairs = {("hat", "hat"), ("sine", "sine"), ("tensor_hat", "tensor-hat"), ("tensor_sine", "tensor-sine")}
    if (basis, name) in pairs:
        return "", index[0] if basis in ("hat", "sine") else index, 1.0
    ridge_names = {"CS_ridge": ("C", "S"), "trig_ridge": ("cos", "sin")}
    if basis in ridge_names and name in ridge_names[basis]:
        canonical, sign = canonicalize(index)
        cosine = name == ridge_names[basis][0]
        return ("cos", canonical.entries, 1.0) if cosine else ("sin", canonical.entries, float(sign))
    return None


def _expand(args: Namespace, report: RunReport) -> None:
    f = builtin(args.function, args.n)
    expansion = expand(f, args.basis, args.N)
    report.outputs.append(write_json(_out(args, "expansion.json"), expansion.to_dict()))

    target = _unit_target(args.function, args.basis)
    if target is None:
        return
    slot, index, value = target
    errors = [abs(expansion.constant)]
    for term_slot, term_index, coeff in expansion.terms():
        hit = term_slot == slot and term_index == index
        errors.append(abs(coeff - value) if hit else abs(coeff))
    if not any(s == slot and k == index for s, k, _ in expansion.terms()):
        errors.append(abs(value))
    report.add_check("unit_coefficients", max(errors) <= ROUND_TRIP_TOL, max(errors), ROUND_TRIP_TOL)


def _reconstruct_args(parser: ArgumentParser) -> None:
    parser.add_argument("--expansion", required=True, help="Expansion JSON written by the expand command")
    parser.add_argument("--grid", type=int, default=1001, help="Grid points for univariate expansions")
    parser.add_argument("--samples", type=int, default=4096, help="Random points for multivariate expansions")
    parser.add_argument("--function", default=None, help="Reference function to compare against (optional)")


def _reconstruct(args: Namespace, report: RunReport) -> None:
    expansion = Expansion.from_dict(read_json(args.expansion))
    if expansion.n == 1 and expansion.basis not in RIDGE_BASES:
        x = np.linspace(0.0, 1.0, args.grid)
        coords = x[:, None]
    else:
        x = coords = _sample_points(args, expansion.n)
    values = reconstruct(expansion, x)
    header = [f"x{i + 1}" for i in range(coords.shape[1])] + ["value"]
    report.outputs.append(write_csv(_out(args, "reconstruct.csv"), header, ((*p, v) for p, v in zip(coords, values))))
    if args.function:
        f = builtin(args.function, expansion.n)
        gap = float(np.max(np.abs(f(x if f.n == 1 else coords) - values)))
        report.add_check("max_abs_error", True, gap, math.inf, gating=False)


def _convergence_args(parser: ArgumentParser) -> None:
    parser.add_argument("--function", required=True, help=f"Input function: {', '.join(BUILTINS)}")
    parser.add_argument("--basis", choices=BASES, default="hat", help="System of the partial sums (default: hat)")
    parser.add_argument("--q", type=float, default=2.0, help="Exponent of the L_q norm, 1 < q < inf (default: 2)")
    parser.add_argument("--schedule", default="4,16,64,256", help="Increasing cutoffs (default: 4,16,64,256)")
    parser.add_argument("--ordering", choices=ORDERINGS, default="pringsheim", help="Multivariate partial sums")
    parser.add_argument("--shapes", default="", help="Extra Pringsheim rectangles, e.g. '8,16;16,8'")
    parser.add_argument("--n", type=int, default=1, help="Dimension of constant inputs (default: 1)")


def _convergence(args: Namespace, report: RunReport) -> None:
    f = builtin(args.function, args.n)
    table = convergence_experiment(f, args.basis, args.q, _int_list(args.schedule), args.ordering, _shapes(args.shapes))
    report.outputs.append(table.to_csv(_out(args, "convergence.csv")))

    squares = [r for r in table.rows if r.square]
    report.add_check("strictly_decreasing", table.strictly_decreasing, squares[-1].error, squares[0].error)
    if args.q == 2.0 and args.basis in ORTHONORMAL and all(math.isfinite(r.tail_l2) for r in squares):
        gap = max(abs(r.error - r.tail_l2) for r in squares)
        report.add_check("error_matches_tail", gap <= TAIL_MATCH_TOL, gap, TAIL_MATCH_TOL)
    report.add_check("rate", True, table.rate, math.nan, gating=False)


def _criterion_args(parser: ArgumentParser) -> None:
    parser.add_argument("--n", type=int, default=1, help="Dimension (default: 1)")


def _criterion(args: Namespace, report: RunReport) -> None:
    result = schauder_criterion(args.n)
    rows = [(result.n, result.lhs, result.rhs, result.ratio, result.holds)]
    report.outputs.append(write_csv(_out(args, "criterion.csv"), ["n", "lhs", "rhs", "ratio", "holds"], rows))
    report.add_check("criterion_holds", result.holds, result.ratio, 1.0, gating=False)


def _relu_args(parser: ArgumentParser) -> None:
    parser.add_argument("--family", choices=("C", "S", "hat"), default="C", help="Profile of the compiled function")
    parser.add_argument("--index", default="1", help="Dilation k, or a frequency vector 'k1,k2,...'")
    parser.add_argument("--tensor", action="store_true", help="Compile the tensor hat of the index instead")
    parser.add_argument("--samples", type=int, default=100_000, help="Random points of the exactness check")


def _relu_export(args: Namespace, report: RunReport) -> None:
    index = _int_list(args.index)
    if args.tensor:
        net = compile_tensor(index)
    elif len(index) == 1:
        net = compile_univariate(args.family, index[0])
    else:
        net = compile_ridge(args.family, index)
    text = export_json(net)
    report.outputs.append(write_text(_out(args, "relu.json"), text + "\n"))

    x = _sample_points(args, net.input_dim)
    if net.input_dim == 1:
        direct = eval_dilated(args.family if not args.tensor else "hat", index[0], x[:, 0])
    else:
        direct = eval_ridge(args.family, index, x)
    gap = float(np.max(np.abs(net_eval(net, x) - direct)))
    report.add_check("relu_exact", gap <= EXACT_TOL, gap, EXACT_TOL)

    back = import_json(text)
    same = all(np.array_equal(a, b) for a, b in ((net.weights, back.weights), (net.biases, back.biases), (net.c, back.c)))
    same = same and net.c0 == back.c0
    report.add_check("json_round_trip", same, 0.0 if same else 1.0, 0.0)

    if net.input_dim == 1:
        family = "hat" if args.tensor else args.family
        k = index[0]
        expected = {"C": 2 * k, "S": 2 * k + 1, "hat": k + 1}[family]
        regions = linear_regions(net)
        report.add_check("linear_regions", regions == expected, regions, expected)


def _plotdata_args(parser: ArgumentParser) -> None:
    parser.add_argument("--grid", type=int, default=401, help="Grid points on [0, 1] (default: 401)")


def _plotdata(args: Namespace, report: RunReport) -> None:
    t = np.linspace(0.0, 1.0, args.grid)
    columns = [eval_dilated(family, k, t) for family, k in (("C", 1), ("S", 1), ("C", 2), ("S", 2))]
    rows = zip(t, *columns)
    report.outputs.append(write_csv(_out(args, "plotdata.csv"), ["t", "C", "S", "C_2", "S_2"], rows))


@dataclass(frozen=True)
class Command:
    help: str
    add_args: Callable[[ArgumentParser], None]
    handler: Callable[[Namespace, RunReport], None]


COMMANDS: dict[str, Command] = {
    "eval":            Command("Sample a basis element or input function", _eval_args, _eval),
    "gram":            Command("Normalised Gram matrix of a function system", _gram_args, _gram),
    "spectra":         Command("Eigenvalues of the C and S Gram matrices", _spectra_args, _spectra),
    "riesz":           Command("Extreme Gram eigenvalues against the Riesz constants", _gram_args, _riesz),
    "tau":             Command("Hat coefficients tau_k, their Dirichlet inverse and sums", _tau_args, _tau),
    "transfer-verify": Command("Apply a truncated transfer operator to trigonometric elements", _transfer_args, _transfer_verify),
    "expand":          Command("Coefficients of a function in a basis", _expand_args, _expand),
    "reconstruct":     Command("Evaluate a saved expansion", _reconstruct_args, _reconstruct),
    "convergence":     Command("L_q errors of partial sums along a schedule", _convergence_args, _convergence),
    "criterion":       Command("Dimension criterion for the tensor hat system", _criterion_args, _criterion),
    "relu-export":     Command("Exact one-hidden-layer ReLU net for a basis element", _relu_args, _relu_export),
    "plotdata":        Command("Samples of C, S, C_2 and S_2 for plotting", _plotdata_args, _plotdata),
}


def _common_args(parser: ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="Seed of every random stream (default: 0)")
    parser.add_argument("--out", type=str, default=None, help="Output file (default: <command>.csv or .json)")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads (default: 1)")
    parser.add_argument("--json-report", dest="json_report", nargs="?", const="-", default=None,
                        help="Write the run report as JSON to this path, or to stdout without a path")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")


def _add_flags(command: Command, parser: ArgumentParser) -> None:
    _common_args(parser)
    command.add_args(parser)


COMMAND_FLAGS = {name: partial(_add_flags, command) for name, command in COMMANDS.items()}


def _build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        description=(
            "Piecewise-linear sawtooth and hat bases: Gram spectra, transfer operators,\n"
            "expansions and exact ReLU nets.\n"
            "\n"
            "Usage modes:\n"
            "\n"
            "  1) Direct subcommand:\n"
            "       python pwl_bases.py gram --system r1 --N 8 --exact --out g.json\n"
            "       python pwl_bases.py spectra --N 64 --compare\n"
            "       python pwl_bases.py criterion --n 4\n"
            "\n"
            "  2) YAML run file:\n"
            "       python pwl_bases.py configs/gram_r1.yaml\n"
            "\n"
            "  3) Folder of YAML run files (all of them, in sorted order):\n"
            "       python pwl_bases.py configs/\n"
            "\n"
            "A run file holds a 'command' key plus the flags of that command:\n"
            "  command: riesz\n"
            "  system: rn\n"
            "  n: 2\n"
            "  bound: 4\n"
        ),
        formatter_class=RawTextHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for name, command in COMMANDS.items():
        sub = subparsers.add_parser(name, help=command.help)
        _add_flags(command, sub)
    return parser


def _parameter_rows(args: Namespace) -> list[list[str]]:
    C = display.COLORS
    rows = [["Flag", "Parameter", "Value"]]
    if "system" in vars(args):
        rows += SYSTEMS[args.system].table_rows(args)
    shown = {row[0] for row in rows}
    for key, value in sorted(vars(args).items()):
        flag = "--" + key.replace("_", "-")
        if value is None or flag in shown or key in ("command", "verbose"):
            continue
        rows.append([flag, f"{C['M']}{key}{C['RE']}", f"{C['M']}{value}{C['RE']}"])
    return rows


def execute(args: Namespace) -> RunReport:
    """Run one parsed command and return its report."""
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else logging.INFO)
    set_threads(args.threads)
    quiet = args.json_report == "-"
    if not quiet:
        display.print_table(_parameter_rows(args))

    parameters = {k: v for k, v in vars(args).items() if k not in ("command", "json_report", "verbose")}
    report = RunReport(args.command, parameters, seed=args.seed)
    start = time.perf_counter()
    COMMANDS[args.command].handler(args, report)
    report.wall_time = time.perf_counter() - start

    if quiet:
        print(report.to_json())
    else:
        display.print_checks(report.checks)
        if args.json_report:
            report.write(args.json_report)
    for check in report.failed:
        logging.error("Check %s failed: measured %g, tolerance %g", check.name, check.measured, check.tolerance)
    return report


def run(argv: list[str]) -> RunReport:
    return execute(_build_parser().parse_args(argv))


def _run_checked(args: Namespace) -> int:
    try:
        return execute(args).exit_code
    except (ValueError, RuntimeError) as e:
        logging.error(str(e))
        return 1


def run_folder(folder: str) -> int:
    yaml_paths = [
        os.path.join(folder, f) for f in sorted(os.listdir(folder)) if f.endswith((".yaml", ".yml"))
    ]
    if not yaml_paths:
        logging.warning("No YAML files found in %r", folder)
        return 0

    C = display.COLORS
    rows = [["File", "Command", "Status"]]
    failures = 0
    for path in yaml_paths:
        try:
            args = config.load_yaml_config(path, COMMAND_FLAGS)
        except (FileNotFoundError, ValueError) as e:
            logging.error("Invalid file %r: %s", path, e)
            rows.append([os.path.basename(path), "-", f"{C['R']}invalid{C['RE']}"])
            failures += 1
            continue
        logging.info("Running: %s", os.path.basename(path))
        code = _run_checked(args)
        status = f"{C['G']}ok{C['RE']}" if code == 0 else f"{C['R']}failed{C['RE']}"
        rows.append([os.path.basename(path), f"{C['M']}{args.command}{C['RE']}", status])
        failures += code != 0
    display.print_table(rows)
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv:
        first_arg = argv[0]
        if first_arg.endswith((".yaml", ".yml")) and not os.path.isdir(first_arg):
            try:
                args = config.load_yaml_config(first_arg, COMMAND_FLAGS)
            except (FileNotFoundError, ValueError) as e:
                logging.error(str(e))
                return 1
            return _run_checked(args)
        if os.path.isdir(first_arg):
            return run_folder(first_arg)
    return _run_checked(_build_parser().parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
