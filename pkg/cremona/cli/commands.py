from __future__ import annotations

import csv
import io
import logging
from typing import List, Sequence

from ..dynamics import integrate as integrate_orbit
from ..elliptic import jacobi_period
from ..enums import EventKind, OrbitMode, OutputFormat
from ..equiperiodic import degree_table, equiperiodic_polynomial, sample_curve
from ..errors import ComputationError, ExceptionalLocusError, ResourceError, UsageError
from ..periodicity import (
    find_period_steps,
    findings_table,
    period_transition_table,
    transition_rows,
    verify_period,
)
from ..scheme import build_map, format_map, invert_map, polarize
from ..utils import dump_payload, update_payload
from .app import app
from .command import check
from .context import Context

__all__ = ()

logger = logging.getLogger(__name__)


def _csv(rows: Sequence[Sequence[str]]) -> str:
    stream = io.StringIO()
    csv.writer(stream, lineterminator="\n").writerows(rows)
    return stream.getvalue()


def _format(ctx: Context, default: OutputFormat, *allowed: OutputFormat) -> OutputFormat:
    chosen = ctx.config.format or default
    if chosen not in (default, *allowed):
        names = ", ".join(member.value for member in (default, *allowed))
        raise UsageError(f"{ctx.config.command} writes {names}, not {chosen.value}")

    return chosen


def _single_order(ctx: Context) -> bool:
    return len(ctx.config.orders) == 1


@app.check("give exactly one of --system and --model-file")
def _has_system(ctx: Context) -> bool:
    return (ctx.config.system is None) != (ctx.config.model_file is None)


@app.command()
@check(lambda ctx: ctx.config.x0 is not None, "--x0 is required")
@check(lambda ctx: ctx.config.dt is not None, "--dt is required")
@check(lambda ctx: ctx.config.steps is not None and ctx.config.steps >= 0, "--steps must be a non-negative integer")
@check(lambda ctx: not ctx.config.orders, "--n does not apply")
async def integrate(ctx: Context) -> None:
    """Iterates the step map and writes the orbit as CSV."""
    config = ctx.config
    _format(ctx, OutputFormat.csv)
    system = ctx.system

    try:
        orbit = await ctx.run(
            integrate_orbit,
            system,
            ctx.x0,
            config.dt,
            config.steps,
            config.mode,
            variant=config.scheme,
            skip_on_pole=config.skip_on_pole,
            bit_budget=config.bit_budget,
        )
    except ResourceError as error:
        if error.partial is not None:
            stream = io.StringIO()
            error.partial.to_csv(stream)
            ctx.emit(stream.getvalue())

        raise

    stream = io.StringIO()
    orbit.to_csv(stream)
    ctx.emit(stream.getvalue())

    for event in orbit.events:
        logger.warning(f"step {event.step}: {event.message}")

    if not orbit.completed:
        event = orbit.events[-1]
        if event.kind is EventKind.exceptional_locus:
            raise ExceptionalLocusError(f"orbit truncated after {len(orbit) - 1} steps: {event.message}")

        raise ComputationError(f"orbit halted after {len(orbit) - 1} steps: {event.message}")


@app.command("find-steps")
@check(lambda ctx: ctx.config.x0 is not None, "--x0 is required")
@check(lambda ctx: bool(ctx.config.orders), "--n is required")
@check(lambda ctx: ctx.config.mode is OrbitMode.float, "--mode does not apply")
async def find_steps(ctx: Context) -> None:
    """Finds the steps for which the orbit of x0 is periodic with period n."""
    config = ctx.config
    chosen = _format(ctx, OutputFormat.json, OutputFormat.csv)
    system, x0 = ctx.system, ctx.x0
    cremona_map = build_map(polarize(system, config.scheme))

    findings = await ctx.runner.map(
        lambda n: find_period_steps(
            system,
            x0,
            n,
            search_range=config.search_range,
            eps=config.eps,
            tol=config.tol,
            exact_check=config.exact_check,
            cremona_map=cremona_map,
        ),
        config.orders,
    )

    if chosen is OutputFormat.csv:
        ctx.emit(_csv(findings_table(findings)))
    elif _single_order(ctx):
        ctx.emit(dump_payload(findings[0].to_dict()))
    else:
        ctx.emit(dump_payload({"findings": [finding.to_dict() for finding in findings]}))


@app.command("verify-period")
@check(lambda ctx: ctx.config.x0 is not None, "--x0 is required")
@check(lambda ctx: ctx.config.dt is not None, "--dt is required")
@check(_single_order, "--n must be a single order")
async def verify_period_command(ctx: Context) -> None:
    """Checks that a step closes the orbit of x0 after n steps."""
    config = ctx.config
    _format(ctx, OutputFormat.json)
    system, x0 = ctx.system, ctx.x0
    n = config.orders[0]
    cremona_map = build_map(polarize(system, config.scheme))

    # the exact check needs the isolating interval of the certified root nearest to --dt
    root = config.dt
    if config.exact_check:
        finding = await ctx.run(
            find_period_steps, system, x0, n, search_range=config.search_range, verify=False, cremona_map=cremona_map
        )
        nearest = min(finding.roots, key=lambda r: abs(float(r.value) - float(config.dt)), default=None)
        if nearest is None or abs(float(nearest.value) - float(config.dt)) > 1e-3:
            raise UsageError(f"no certified period-{n} step near {config.dt}; the exact check needs one")

        root = nearest

    report = await ctx.run(
        verify_period, system, x0, root, n, tol=config.tol, exact=config.exact_check, cremona_map=cremona_map
    )

    payload = {"n": n, "dt": report.value, "residual": report.residual, "float_ok": report.float_ok}
    update_payload(payload, exact_ok=report.exact_ok, factor=report.factor.format() if report.factor else None)
    payload["verified"] = report.verified
    ctx.emit(dump_payload(payload))

    if not report.verified:
        raise ComputationError(f"dt={report.value} does not close the orbit after {n} steps")


@app.command("transition-table")
@check(lambda ctx: ctx.config.x0 is not None, "--x0 is required")
@check(lambda ctx: bool(ctx.config.orders), "--n is required")
@check(
    lambda ctx: not ctx.config.with_limit or ctx.config.system == "jacobi",
    "--with-limit needs --system jacobi (the limit is 4K(k))",
)
async def transition_table(ctx: Context) -> None:
    """Writes n times the smallest periodic step for each n as CSV."""
    config = ctx.config
    _format(ctx, OutputFormat.csv)
    system, x0 = ctx.system, ctx.x0
    cremona_map = build_map(polarize(system, config.scheme))

    batches = await ctx.runner.map(
        lambda n: period_transition_table(
            system, x0, [n], search_range=config.search_range, eps=config.eps, tol=config.tol, cremona_map=cremona_map
        ),
        config.orders,
    )
    rows = [row for batch in batches for row in batch]

    limit = jacobi_period(system.param_dict["k"]) if config.with_limit else None
    ctx.emit(_csv(transition_rows(rows, limit)))


@app.command()
@check(lambda ctx: ctx.config.x0 is None, "--x0 does not apply; the initial state is symbolic")
@check(lambda ctx: bool(ctx.config.orders), "--n is required")
@check(lambda ctx: not (ctx.config.sample and ctx.config.degrees_only), "--sample and --degrees-only exclude each other")
@check(
    lambda ctx: not ctx.config.sample or (ctx.config.fix_dt is not None and ctx.config.box is not None),
    "--sample needs --fix-dt and --box",
)
@check(lambda ctx: not ctx.config.sample or len(ctx.config.orders) == 1, "--sample needs a single order")
async def equiperiodic(ctx: Context) -> None:
    """Computes the equiperiodic polynomial F_n, its degree table or samples of its curve."""
    config = ctx.config
    system = ctx.system
    cremona_map = build_map(polarize(system, config.scheme))

    if config.degrees_only:
        _format(ctx, OutputFormat.csv)
        batches = await ctx.runner.map(
            lambda n: degree_table(system, [n], fix_dt=config.fix_dt, cremona_map=cremona_map), config.orders
        )
        ctx.emit(_csv([["n", "degree"], *([str(n), str(degree)] for batch in batches for n, degree in batch)]))
        return

    if config.sample:
        _format(ctx, OutputFormat.csv)
        found = await ctx.run(
            equiperiodic_polynomial, system, config.orders[0], reduced=False, fix_dt=config.fix_dt, cremona_map=cremona_map
        )
        logger.info(f"F{found.n} = {found.polynomial.format()}")

        sample = await ctx.run(sample_curve, found, config.fix_dt, config.box, config.grid)
        stream = io.StringIO()
        sample.to_csv(stream)
        ctx.emit(stream.getvalue())
        return

    _format(ctx, OutputFormat.poly_text)
    sets = await ctx.runner.map(
        lambda n: equiperiodic_polynomial(
            system, n, reduced=config.reduced, fix_dt=config.fix_dt, cremona_map=cremona_map
        ),
        config.orders,
    )

    lines: List[str] = []
    for found in sets:
        state = ", ".join(system.state)
        lines.append(f"# F{found.n}: degree {found.state_degree} in ({state}), degree {found.step_degree} in dt")
        lines.append(f"F{found.n} = {found.polynomial.format()}")

        if found.reduced is not None:
            lines.append(f"F{found.n}_reduced = {found.reduced.format()}")
            lines.extend(f"# F{d} divides F{found.n}: {'yes' if flag else 'no'}" for d, flag in found.contains)

    ctx.emit("\n".join(lines) + "\n")


@app.command("print-map")
@check(lambda ctx: ctx.config.x0 is None and not ctx.config.orders, "--x0 and --n do not apply")
async def print_map(ctx: Context) -> None:
    """Prints the step map, or its inverse with --inverse."""
    _format(ctx, OutputFormat.poly_text)

    cremona_map = await ctx.run(build_map, polarize(ctx.system, ctx.config.scheme))
    if ctx.config.inverse:
        cremona_map = invert_map(cremona_map)

    ctx.emit(format_map(cremona_map))

