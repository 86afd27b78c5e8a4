"""Command-line front end.

Exit codes: 0 solved or passed, 2 certified negative or failed check,
3 inconclusive (truncated adjoint orbit), 1 usage, input or I/O error.
"""

import argparse
import csv
import enum
import io
import json
import logging
import pathlib
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, FilePath, PositiveInt, ValidationError, root_validator

from coblab.analysis import dilation, dyadic, oracle, solver, wold
from coblab.common import get_cutoff
from coblab.constructs.common import DEFAULT_TOLERANCES, Tolerances
from coblab.constructs.files import dump_json, load_operator, load_vector
from coblab.constructs.operators import OperatorSpec
from coblab.constructs.results import FourierSeries, OrbitEnd, Verdict
from coblab.constructs.vectors import CoeffVector
from coblab.core import norm
from coblab.errors import (
    CoblabError,
    InexactSplitError,
    InsufficientDataError,
)
from coblab.sandbox.generator import SampleGenerator

logger = logging.getLogger("coblab")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAIL = 2
EXIT_INCONCLUSIVE = 3

VERDICT_EXIT = {
    Verdict.SOLVED: EXIT_OK,
    Verdict.NOT_COBOUNDARY: EXIT_FAIL,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


class Command(str, enum.Enum):
    SOLVE_ISOMETRY = "solve-isometry"
    SOLVE_CONTRACTION = "solve-contraction"
    SOLVE_DYADIC = "solve-dyadic"
    CHECK = "check"
    GROWTH = "growth"
    WOLD = "wold"
    DILATE_TEST = "dilate-test"
    ORACLE = "oracle"


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"


DEFAULT_HORIZONS = {
    Command.CHECK: 1024,
    Command.GROWTH: 1024,
    Command.DILATE_TEST: 200,
}

_NEEDS_OPERATOR = {
    Command.SOLVE_ISOMETRY,
    Command.SOLVE_CONTRACTION,
    Command.CHECK,
    Command.GROWTH,
    Command.WOLD,
    Command.ORACLE,
}


class RunConfig(BaseModel):
    """Validated arguments of one run; input files must exist."""

    command: Command
    operator_file: Optional[FilePath] = None
    vector_file: Optional[FilePath] = None
    tolerances: Tolerances = DEFAULT_TOLERANCES
    cutoff: Optional[PositiveInt] = None
    output: Optional[pathlib.Path] = None
    format: OutputFormat = OutputFormat.JSON
    solution_out: Optional[pathlib.Path] = None
    solution_file: Optional[FilePath] = None
    horizon: Optional[PositiveInt] = None
    depth: Optional[PositiveInt] = None
    base: int = 2
    epsilon: float = 1.0
    report: bool = False
    samples: Optional[PositiveInt] = None
    samples_out: Optional[pathlib.Path] = None
    trials: PositiveInt = 50
    seed: int = 0

    @root_validator(skip_on_failure=True)
    def check_inputs(cls, values):
        command = values["command"]
        if command in _NEEDS_OPERATOR and values.get("operator_file") is None:
            raise ValueError(f"{command.value} needs --op")
        if command is not Command.DILATE_TEST and values.get("vector_file") is None:
            raise ValueError(f"{command.value} needs --vec")
        if values["epsilon"] <= 0:
            raise ValueError("--epsilon must be positive")
        if values["base"] < 2:
            raise ValueError("--base must be at least 2")
        if command is Command.SOLVE_DYADIC:
            if values["format"] is OutputFormat.CSV:
                raise ValueError(
                    "solve-dyadic reports JSON; write sampled g with --samples-csv"
                )
            if values.get("samples") and values.get("samples_out") is None:
                raise ValueError("--samples needs --samples-csv")
        return values

    @property
    def effective_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        return DEFAULT_HORIZONS.get(self.command, solver.DEFAULT_HORIZON)


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _inputs(config: RunConfig) -> Tuple[OperatorSpec, CoeffVector]:
    op = load_operator(config.operator_file)
    return op, load_vector(config.vector_file, op)


def _solve(config: RunConfig) -> Tuple[int, str]:
    op, x = _inputs(config)
    solve = (
        solver.solve_isometry
        if config.command is Command.SOLVE_ISOMETRY
        else dilation.solve_contraction
    )
    result = solve(
        op, x, config.tolerances, config.cutoff, config.effective_horizon
    )
    if config.solution_out is not None and result.solution is not None:
        config.solution_out.write_text(dump_json(result.solution), encoding="utf-8")
    return VERDICT_EXIT[result.verdict], dump_json(result)


def _solve_dyadic(config: RunConfig) -> Tuple[int, str]:
    f = FourierSeries(coeffs=load_vector(config.vector_file), base=config.base)
    verdict = dyadic.chain_solve(f, config.tolerances)
    status = EXIT_OK if verdict.solvable else EXIT_FAIL

    if config.samples_out is not None:
        rows: List[Tuple[float, float, float]] = []
        if verdict.g is not None and not verdict.g.coeffs.is_empty:
            top = max(abs(mode) for mode in verdict.g.coeffs.entries)
            m = config.samples or 2 * top + 1
            values = dyadic.synthesize_samples(verdict.g.coeffs, m)
            rows = [(j / m, v.real, v.imag) for j, v in enumerate(values)]
        text = _csv(("t", "re", "im"), rows)
        config.samples_out.write_text(text, encoding="utf-8")

    payload: Dict[str, Any] = {"verdict": verdict}
    if config.report:
        payload["report"] = dyadic.dyadic_report(
            f, config.epsilon, config.tolerances, config.cutoff
        )
        value, bound = dyadic.summability_bound(f, config.epsilon, config.cutoff)
        payload["summability_bound"] = {"value": value, "bound": bound}
    return status, dump_json(payload)


def _check(config: RunConfig) -> Tuple[int, str]:
    op, x = _inputs(config)
    horizon = config.effective_horizon
    report = solver.condition_report(
        op, x, config.tolerances, config.cutoff, horizon
    )
    if not op.classify().isometric:
        conditions = dilation.contraction_conditions(
            op, x, horizon, config.tolerances, config.cutoff
        )
        report = report.copy(
            update=dict(
                sqrt_ratio_last=conditions.sqrt_ratios[-1],
                osqrt_holds=conditions.osqrt_holds,
                defect_slope=conditions.defect_slope,
                defect_o_n=conditions.defect_o_n,
                kronecker_sum=conditions.kronecker_partial_sums[-1],
                kronecker_converges=conditions.kronecker_converges,
            )
        )

    failed = [
        report.ergodic_limit is not None
        and report.ergodic_limit > config.tolerances.residual_tol,
        not report.browder_bounded,
        report.osqrt_holds is False,
        report.defect_o_n is False,
        report.kronecker_converges is False,
    ]
    payload: Dict[str, Any] = {"report": report}
    if config.solution_file is not None:
        y = load_vector(config.solution_file, op)
        residual = solver.verify_coboundary(op, x, y, config.tolerances)
        payload["solution_residual"] = residual
        failed.append(residual > config.tolerances.residual_tol)

    if report.orbit_end is OrbitEnd.TRUNCATED:
        status = EXIT_INCONCLUSIVE
    else:
        status = EXIT_FAIL if any(failed) else EXIT_OK
    return status, dump_json(payload)


def _growth(config: RunConfig) -> Tuple[int, str]:
    op, x = _inputs(config)
    horizon = config.effective_horizon
    profile = solver.growth_profile(op, x, range(1, horizon + 1))
    if config.format is OutputFormat.CSV:
        return EXIT_OK, _csv(("n", "value"), profile)
    bound = solver.browder_bound(op, x, horizon, config.tolerances)
    return EXIT_OK, dump_json(
        {"profile": profile, "browder": bound, "heuristic": True}
    )


def _wold(config: RunConfig) -> Tuple[int, str]:
    op, x = _inputs(config)
    split = wold.wold_split(op, x, config.tolerances, config.cutoff)
    status = EXIT_OK if split.exact else EXIT_INCONCLUSIVE
    if config.format is OutputFormat.CSV:
        rows = [
            (j, norm(component)) for j, component in enumerate(split.components)
        ]
        return status, _csv(("j", "norm"), rows)
    try:
        decay = wold.component_decay(op, x, config.tolerances, config.cutoff)
    except (InexactSplitError, InsufficientDataError) as e:
        logger.info("no decay fit: %s", e)
        decay = None
    return status, dump_json({"split": split, "decay": decay})


def _dilate_test(config: RunConfig) -> Tuple[int, str]:
    generator = SampleGenerator(config.seed)
    operators = [
        generator.contraction(int(generator.rng.integers(1, 9)))
        for _ in range(config.trials)
    ]
    samples = [generator.vector_for(op) for op in operators]
    check = dilation.check_dilation(
        samples,
        operators,
        config.effective_horizon,
        config.tolerances,
        config.cutoff,
    )
    return (EXIT_OK if check.passed else EXIT_FAIL), dump_json(check)


def _oracle(config: RunConfig) -> Tuple[int, str]:
    op, x = _inputs(config)
    comparison = oracle.compare(
        op, x, config.tolerances, config.cutoff, config.depth
    )
    return (EXIT_OK if comparison.agree else EXIT_FAIL), dump_json(comparison)


_HANDLERS = {
    Command.SOLVE_ISOMETRY: _solve,
    Command.SOLVE_CONTRACTION: _solve,
    Command.SOLVE_DYADIC: _solve_dyadic,
    Command.CHECK: _check,
    Command.GROWTH: _growth,
    Command.WOLD: _wold,
    Command.DILATE_TEST: _dilate_test,
    Command.ORACLE: _oracle,
}


def run(config: RunConfig) -> Tuple[int, str]:
    """Execute one command and return its exit status and report text."""
    if config.cutoff is None:
        get_cutoff()
    return _HANDLERS[config.command](config)


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--op", type=pathlib.Path, help="Operator description file.")
    common.add_argument("--vec", type=pathlib.Path, help="Coefficient vector file.")
    common.add_argument("--tol", type=float, help="Residual tolerance.")
    common.add_argument("--cutoff", type=int, help="Adjoint-orbit cutoff.")
    common.add_argument(
        "--out", type=pathlib.Path, help="Report file (default stdout)."
    )
    common.add_argument(
        "--format", choices=[f.value for f in OutputFormat], default="json"
    )
    common.add_argument("--verbose", action="store_true", help="Log at DEBUG level.")
    common.add_argument("--horizon", type=int, help="Profile and Browder horizon.")

    parser = _ArgumentParser(
        prog="coblab",
        description="Coboundary solver for isometries, contractions and "
        "dilation functional equations.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    for command in (Command.SOLVE_ISOMETRY, Command.SOLVE_CONTRACTION):
        sub = commands.add_parser(command.value, parents=[common])
        sub.add_argument("--solution", type=pathlib.Path, help="Write y here.")

    sub = commands.add_parser(Command.SOLVE_DYADIC.value, parents=[common])
    sub.add_argument("--base", type=int, default=2)
    sub.add_argument("--epsilon", type=float, default=1.0)
    sub.add_argument("--report", action="store_true")
    sub.add_argument("--samples", type=int, help="Sample count of the g CSV.")
    sub.add_argument(
        "--samples-csv", type=pathlib.Path, help="Write sampled g here as CSV."
    )

    sub = commands.add_parser(Command.CHECK.value, parents=[common])
    sub.add_argument("--sol", type=pathlib.Path, help="Solution file to verify.")

    commands.add_parser(Command.GROWTH.value, parents=[common])
    commands.add_parser(Command.WOLD.value, parents=[common])

    sub = commands.add_parser(Command.DILATE_TEST.value, parents=[common])
    sub.add_argument("--trials", type=int, default=50)
    sub.add_argument("--seed", type=int, default=0)

    sub = commands.add_parser(Command.ORACLE.value, parents=[common])
    sub.add_argument("--depth", type=int, help="Window closure depth.")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    tolerances = DEFAULT_TOLERANCES
    if args.tol is not None:
        overrides = dict(DEFAULT_TOLERANCES.dict(), residual_tol=args.tol)
        tolerances = Tolerances(**overrides)
    options = dict(
        command=args.command,
        operator_file=args.op,
        vector_file=args.vec,
        tolerances=tolerances,
        cutoff=args.cutoff,
        output=args.out,
        format=args.format,
        horizon=args.horizon,
    )
    for flag, field in (
        ("solution", "solution_out"),
        ("sol", "solution_file"),
        ("depth", "depth"),
        ("base", "base"),
        ("epsilon", "epsilon"),
        ("report", "report"),
        ("samples", "samples"),
        ("samples_csv", "samples_out"),
        ("trials", "trials"),
        ("seed", "seed"),
    ):
        if getattr(args, flag, None) is not None:
            options[field] = getattr(args, flag)
    return RunConfig(**options)


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in e['loc'])}: {e['msg']}"
        for e in error.errors()
    )


def main(argv: Sequence[str] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        status, text = run(config)
    except json.JSONDecodeError as e:
        print(
            f"coblab: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}",
            file=sys.stderr,
        )
        return EXIT_ERROR
    except ValidationError as e:
        print(f"coblab: invalid input: {_validation_message(e)}", file=sys.stderr)
        return EXIT_ERROR
    except (CoblabError, OSError, ValueError) as e:
        print(str(e) if isinstance(e, CoblabError) else f"coblab: {e}", file=sys.stderr)
        return EXIT_ERROR

    if config.output is not None:
        config.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
