"""
Appendix command: elimination-chain statistics and the dilute difference fit
"""
import logging
import math
import time

import click
from flask import Blueprint

from appendix import (
    FIT_TOLERANCE, MIN_FIT_SAMPLES, appendix_system, dilute_hexagon_differences, fit_differences,
    identify_relations, run_draws,
)
from errors import InvalidArgument, LoopLabError
from helpers import emit_report, report_options, setting
from utils import max_abs
from weights import DiluteParams

logger = logging.getLogger(__name__)

appendix_bp = Blueprint('appendix', __name__, cli_group=None)

# Share of non-degenerate draws allowed to miss the trivial null space
NULLSPACE_SLACK = 0.01

FIT_DEFAULTS = (2.0, 2.2, 0.55)


def run_appendix(draws, seed, alpha=None, beta=None, eta=None, workers=1):
    """Seeded random draws; the null-space count enters the report as a check"""
    report, summary = run_draws(draws, seed, alpha, beta, eta, workers)
    regular = draws - len(summary['degenerate'])
    missing = regular - summary['trivial_nullspace']
    report.record('appendix.nullspace.missing', missing, math.floor(NULLSPACE_SLACK * regular),
                  draws=draws, seed=seed)
    return report, summary


def run_fit(report, alpha, beta, eta, samples, seed, tol):
    """Fit the 21 differences on YB values and match the six relations"""
    params = DiluteParams(eta)
    inputs = dict(alpha=alpha, beta=beta, eta=eta)
    on_family = dilute_hexagon_differences(alpha, beta, params)
    report.record('appendix.hexagon.on_family', max_abs(on_family), tol, **inputs)

    fit = fit_differences(alpha, beta, params, samples, seed)
    report.record('appendix.fit', fit.residual, FIT_TOLERANCE, samples=fit.samples, **inputs)
    system = appendix_system(alpha, beta, params.fugacity, params.sigma)
    return identify_relations(fit, system)


@appendix_bp.cli.command('appendix')
@click.option('--draws', type=int, default=100, show_default=True, help='Random parameter draws')
@click.option('--seed', type=int, default=None, help='Random seed [default: LOOPLAB_SEED]')
@click.option('--alpha', type=float, default=None, help='Fix alpha instead of sampling it')
@click.option('--beta', type=float, default=None, help='Fix beta instead of sampling it')
@click.option('--eta', type=float, default=None, help='Fix eta instead of sampling it')
@click.option('--workers', type=click.IntRange(min=1), default=None,
              help='Worker processes [default: LOOPLAB_WORKERS]')
@click.option('--fit', is_flag=True, help='Also fit the 21 dilute hexagon differences on YB values')
@click.option('--samples', type=int, default=MIN_FIT_SAMPLES, show_default=True,
              help='Random weight samples for --fit')
@click.option('--tol', type=float, default=None, help='Residual threshold [default: LOOPLAB_TOLERANCE]')
@report_options(default_out='json', precision=False)
def appendix(draws, seed, alpha, beta, eta, workers, fit, samples, tol, fmt, output):
    """Check that the dilute relations force every YB_i to vanish"""
    if draws < 1:
        raise click.BadParameter(f"draws must be at least 1, got {draws}", param_hint="'--draws'")
    if eta is not None and not 0 < eta < math.pi / 4:
        raise click.BadParameter(f"eta must lie in (0, pi/4), got {eta}", param_hint="'--eta'")
    seed = setting(seed, 'LOOPLAB_SEED')
    started = time.perf_counter()

    try:
        report, summary = run_appendix(draws, seed, alpha, beta, eta,
                                       setting(workers, 'LOOPLAB_WORKERS'))
        if fit:
            point = tuple(d if v is None else v for v, d in zip((alpha, beta, eta), FIT_DEFAULTS))
            summary['identification'] = run_fit(report, *point, samples, seed,
                                                setting(tol, 'LOOPLAB_TOLERANCE'))
    except InvalidArgument as e:
        raise click.UsageError(str(e))
    except LoopLabError as e:
        logger.error(f"Appendix run failed: {str(e)}")
        click.get_current_context().exit(1)

    logger.info(f"Appendix: {summary['trivial_nullspace']}/{draws} trivial null spaces")
    emit_report(report, fmt, output, summary=summary, wall_time=time.perf_counter() - started)
