"""
Common helper functions used by the command line front end
"""
import logging
import math

import click
from flask import current_app

from errors import InvalidArgument

logger = logging.getLogger(__name__)

# Fraction of the step within which the stop value still counts as reached
GRID_TOLERANCE = 1e-9
# Opening angle of the rhombus glued onto the star hexagon for the 4-rhombus domain
EXTRA_ANGLE = 1.3


def parse_grid(text):
    """
    Parse a grid specification into a list of floats.

    Accepts a single value ("0.7"), a comma list ("0.5,1.0,2.2") or a range
    "start:stop:step". Ranges include start and include stop when it is hit
    within floating tolerance; nothing beyond stop is produced.
    """
    if text is None or not str(text).strip():
        raise InvalidArgument("empty grid specification")
    text = str(text).strip()
    if ':' not in text:
        return [_parse_float(part) for part in text.split(',') if part.strip()]

    parts = text.split(':')
    if len(parts) != 3:
        raise InvalidArgument(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (_parse_float(p) for p in parts)
    if step <= 0 or not math.isfinite(step):
        raise InvalidArgument(f"grid step must be positive, got {step}")
    if stop < start:
        raise InvalidArgument(f"grid stop {stop} is below start {start}")

    count = int(math.floor((stop - start) / step + GRID_TOLERANCE)) + 1
    # round away representation noise so 0.1:0.3:0.1 gives 0.3, not 0.30000000000000004
    return [round(start + k * step, 12) for k in range(count)]


def parse_int_list(text):
    """Parse "0,1" or "-1:1" (inclusive integer range) into a list of ints"""
    if text is None or not str(text).strip():
        raise InvalidArgument("empty integer list")
    text = str(text).strip()
    try:
        if ':' in text:
            lo, hi = (int(p) for p in text.split(':'))
            if hi < lo:
                raise InvalidArgument(f"integer range {text!r} is empty")
            return list(range(lo, hi + 1))
        return [int(p) for p in text.split(',') if p.strip()]
    except ValueError:
        raise InvalidArgument(f"not an integer list: {text!r}")


def parse_perturbations(items):
    """
    Parse repeated ``key:factor`` options into a dict.

    Weight labels (a, b, t, u1, u2, v) take multiplicative factors; the key
    ``sigma`` takes an additive shift of the conformal spin.
    """
    result = {}
    for item in items or ():
        if ':' not in item:
            raise InvalidArgument(f"perturbation must be key:factor, got {item!r}")
        key, value = item.split(':', 1)
        key = key.strip()
        if not key:
            raise InvalidArgument(f"perturbation key missing in {item!r}")
        result[key] = _parse_float(value)
    return result


def _parse_float(text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InvalidArgument(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise InvalidArgument(f"not a finite number: {text!r}")
    return value


# ============= CLICK GLUE =============

OUTPUT_FORMATS = ('table', 'json', 'csv')
PRECISION_MODES = ('double', 'high')


def as_callback(parser):
    """Wrap a parser as a click option callback; parse errors become usage errors (exit 2)"""
    def callback(ctx, param, value):
        if value is None or value == ():
            return None if value is None else {}
        try:
            return parser(value)
        except InvalidArgument as e:
            raise click.BadParameter(str(e))
    return callback


def report_options(default_out='table', precision=True):
    """--out / --output shared by every command, plus --precision where closed forms are evaluated"""
    def decorator(f):
        if precision:
            f = click.option('--precision', type=click.Choice(PRECISION_MODES), default=None,
                             help='Arithmetic for closed-form residuals [default: LOOPLAB_PRECISION]')(f)
        f = click.option('--output', type=click.Path(dir_okay=False), default=None,
                         help='Write the report to FILE instead of stdout')(f)
        f = click.option('--out', 'fmt', type=click.Choice(OUTPUT_FORMATS), default=default_out,
                         show_default=True, help='Report format')(f)
        return f
    return decorator


def setting(value, key):
    """CLI value if given, else the application config entry"""
    return current_app.config[key] if value is None else value


def emit_report(report, fmt, output=None, summary=None, wall_time=None):
    """Render a report to stdout or a file; exit 1 when any check failed"""
    from importexport import ReportExporter

    text = ReportExporter.render(report, fmt, summary=summary, wall_time=wall_time)
    if output:
        with open(output, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Report written to {output}")
    else:
        click.echo(text, nl=False)

    if wall_time is not None:
        logger.info(f"{len(report)} checks in {wall_time:.2f} s")
    if not report.passed:
        keys = ', '.join(e.key for e in report.failures)
        logger.error(f"Failed checks: {keys}")
        click.get_current_context().exit(1)
