from __future__ import annotations

import argparse
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

from ..algebra import parse_rational
from ..enums import OrbitMode, OutputFormat, SchemeVariant
from ..errors import UsageError

__all__ = ("RunConfig", "build_parser", "parse_args", "COMMANDS")

Number = Union[Fraction, float]

COMMANDS = ("integrate", "find-steps", "equiperiodic", "transition-table", "verify-period", "print-map")


def _number(text: str, *, exact: bool, what: str) -> Number:
    try:
        return parse_rational(text)
    except UsageError:
        if exact:
            raise UsageError(f"{what} must be an exact rational such as 1/100, got {text!r}") from None

    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what} must be a number, got {text!r}") from None


def _vector(text: str, *, exact: bool, what: str) -> Tuple[Number, ...]:
    parts = [part.strip() for part in text.split(",")]
    if not all(parts):
        raise UsageError(f"{what} must be a comma-separated list, got {text!r}")

    return tuple(_number(part, exact=exact, what=what) for part in parts)


def _params(items: Iterable[str]) -> Tuple[Tuple[str, Fraction], ...]:
    params: Dict[str, Fraction] = {}
    for item in items:
        name, separator, value = item.partition("=")
        if not separator or not name.strip():
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")

        params[name.strip()] = parse_rational(value.strip())

    return tuple(params.items())


def _orders(text: str) -> Tuple[int, ...]:
    first, separator, last = text.partition("..")

    try:
        if separator:
            orders = tuple(range(int(first), int(last) + 1))
        else:
            orders = (int(text),)
    except ValueError:
        raise UsageError(f"--n expects N or N..M, got {text!r}") from None

    if not orders or min(orders) < 1:
        raise UsageError(f"--n must name positive orders, got {text!r}")

    return orders


@dataclass(frozen=True)
class RunConfig:
    """
    Everything a command needs, parsed and validated before any computation starts.

    Attributes:
        command (str): The subcommand.
        system (Optional[str]): A builtin system name.
        model_file (Optional[pathlib.Path]): A model source file, instead of `system`.
        params (Tuple[Tuple[str, Fraction], ...]): Parameter overrides of a builtin.
        x0 (Optional[Tuple[Union[Fraction, float], ...]]): The initial state.
        dt (Optional[Union[Fraction, float]]): The step.
        steps (Optional[int]): The number of steps to integrate.
        orders (Tuple[int, ...]): The values of n.
        search_range (Tuple[Fraction, Fraction]): The step range searched for periodic steps.
        eps (Fraction): The root refinement width.
        tol (float): The float verification tolerance.
        format (Optional[cremona.enums.OutputFormat]): The output format; each command has a default.
        out (Optional[pathlib.Path]): The output file, standard output if missing.
        mode (cremona.enums.OrbitMode): Float or exact orbits.
        scheme (cremona.enums.SchemeVariant): The polarization rule.

    """

    command: str
    system: Optional[str] = None
    model_file: Optional[Path] = None
    params: Tuple[Tuple[str, Fraction], ...] = ()
    x0: Optional[Tuple[Number, ...]] = None
    dt: Optional[Number] = None
    steps: Optional[int] = None
    orders: Tuple[int, ...] = ()
    search_range: Tuple[Fraction, Fraction] = (Fraction(0), Fraction(20))
    eps: Fraction = Fraction(1, 10_000)
    tol: float = 1e-6
    format: Optional[OutputFormat] = None
    out: Optional[Path] = None
    mode: OrbitMode = OrbitMode.float
    scheme: SchemeVariant = SchemeVariant.polarized
    skip_on_pole: bool = False
    bit_budget: int = 10**6
    threads: int = 1
    verbose: int = 0
    exact_check: bool = False
    grid: int = 400
    reduced: bool = False
    inverse: bool = False
    with_limit: bool = False
    degrees_only: bool = False
    sample: bool = False
    fix_dt: Optional[Fraction] = None
    box: Optional[Tuple[float, float, float, float]] = None

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> RunConfig:
        """
        Converts parsed flags, checking the values that do not depend on the command.

        Raises:
            [cremona.errors.UsageError][] on a malformed value.

        """
        if namespace.params and namespace.model_file is not None:
            raise UsageError("--param only applies to --system; a model file declares its own parameters")

        mode = OrbitMode(namespace.mode)
        exact = mode is OrbitMode.exact
        exact_x0 = exact or namespace.command != "integrate"

        box = None
        if namespace.box is not None:
            values = _vector(namespace.box, exact=False, what="--box")
            if len(values) != 4:
                raise UsageError("--box expects xmin,xmax,ymin,ymax")

            box = tuple(float(value) for value in values)

        bounds = _vector(namespace.range, exact=True, what="--range")
        if len(bounds) != 2:
            raise UsageError("--range expects LO,HI")

        lo, hi = bounds
        if namespace.threads < 1:
            raise UsageError("--threads must be at least one")

        return cls(
            command=namespace.command,
            system=namespace.system,
            model_file=Path(namespace.model_file) if namespace.model_file else None,
            params=_params(namespace.params or ()),
            x0=_vector(namespace.x0, exact=exact_x0, what="--x0") if namespace.x0 else None,
            dt=_number(namespace.dt, exact=exact, what="--dt") if namespace.dt else None,
            steps=namespace.steps,
            orders=_orders(namespace.n) if namespace.n else (),
            search_range=(Fraction(lo), Fraction(hi)),
            eps=parse_rational(namespace.eps),
            tol=namespace.tol,
            format=OutputFormat(namespace.format) if namespace.format else None,
            out=Path(namespace.out) if namespace.out else None,
            mode=mode,
            scheme=SchemeVariant(namespace.scheme),
            skip_on_pole=namespace.skip_on_pole,
            bit_budget=namespace.bit_budget,
            threads=namespace.threads,
            verbose=namespace.verbose,
            exact_check=namespace.exact_check,
            grid=namespace.grid,
            reduced=namespace.reduced,
            inverse=namespace.inverse,
            with_limit=namespace.with_limit,
            degrees_only=namespace.degrees_only,
            sample=namespace.sample,
            fix_dt=parse_rational(namespace.fix_dt) if namespace.fix_dt else None,
            box=box,  # type: ignore
        )

    @property
    def param_dict(self) -> Dict[str, Fraction]:
        return dict(self.params)


def _common(parser: argparse.ArgumentParser) -> None:
    source = parser.add_argument_group("system")
    source.add_argument("--system", help="builtin system: riccati, wp, jacobi or linear")
    source.add_argument("--model-file", help="a model source file")
    source.add_argument("--param", dest="params", action="append", metavar="NAME=VALUE", help="rational parameter")

    parser.add_argument("--x0", help="initial state, e.g. 1,2 or 0,1,1")
    parser.add_argument("--out", help="output file (default: standard output)")
    parser.add_argument("--format", choices=[member.value for member in OutputFormat])
    parser.add_argument("--threads", type=int, default=1, help="worker threads for independent jobs")
    parser.add_argument("--scheme", choices=[member.value for member in SchemeVariant], default="polarized")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for details")

    parser.add_argument("--dt", help="the step; exact mode needs p/q")
    parser.add_argument("--steps", type=int)
    parser.add_argument("--mode", choices=[member.value for member in OrbitMode], default="float")
    parser.add_argument("--skip-on-pole", action="store_true")
    parser.add_argument("--bit-budget", type=int, default=10**6)

    parser.add_argument("--n", help="order N or range N..M")
    parser.add_argument("--range", default="0,20", help="step search range LO,HI")
    parser.add_argument("--eps", default="1/10000", help="root refinement width")
    parser.add_argument("--tol", type=float, default=1e-6, help="float verification tolerance")
    parser.add_argument("--exact-check", action="store_true", help="verify roots in the quotient ring as well")
    parser.add_argument("--with-limit", action="store_true", help="append the 4K(k) limit row")

    parser.add_argument("--grid", type=int, default=400)
    parser.add_argument("--reduced", action="store_true", help="also print the divisor-reduced polynomial")
    parser.add_argument("--degrees-only", action="store_true")
    parser.add_argument("--sample", action="store_true", help="sample the curve at --fix-dt inside --box")
    parser.add_argument("--fix-dt", help="substitute this step before composing")
    parser.add_argument("--box", help="xmin,xmax,ymin,ymax")

    parser.add_argument("--inverse", action="store_true", help="print C(-dt) instead")


def build_parser(helps: Optional[Dict[str, str]] = None) -> argparse.ArgumentParser:
    """
    The argument parser: one subparser per command, all sharing the same flags.
    """
    parser = argparse.ArgumentParser(
        prog="cremona",
        description="Reversible difference schemes of quadratic ODEs: orbits, periodic steps, equiperiodic sets.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    for name in COMMANDS:
        _common(subparsers.add_parser(name, help=(helps or {}).get(name)))

    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    return RunConfig.from_namespace(build_parser().parse_args(argv))

