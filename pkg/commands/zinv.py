"""
Z-invariance command: star-triangle comparisons on builtin or user domains
"""
import logging
import time

import click
from flask import Blueprint

from enumeration import DENSE, MODELS, enumerate_configs, enumerate_external_diagrams
from errors import InvalidArgument, LoopLabError
from geometry import attach_rhombus
from helpers import EXTRA_ANGLE, emit_report, report_options, setting
from importexport import DomainImporter, ReportExporter
from observable import contour_sum, hexagon_domains
from report import ResidualReport
from weights import DenseParams, DiluteParams
from zinvariance import (
    boundary_observable_residual, diagram_rows, factorized_contour_sum, reshuffled_domains,
    winding_spread, z_invariance_residual,
)

logger = logging.getLogger(__name__)

zinv_bp = Blueprint('zinv', __name__, cli_group=None)


def builtin_pairs(model, alpha, beta):
    """Star/triangle hexagon, plus a dense 4-rhombus domain moved at its inner vertex"""
    star, triangle = hexagon_domains(alpha, beta)
    pairs = [('hexagon', star, triangle)]
    if model == DENSE:
        extended = attach_rhombus(star, 0, EXTRA_ANGLE)
        for site, moved in reshuffled_domains(extended):
            pairs.append((f"extended{list(site.rhombi)}", extended, moved))
    return pairs


def domain_pairs(domain):
    """Every single star-triangle move of a loaded domain"""
    pairs = [(f"{domain.name or 'domain'}{list(site.rhombi)}", domain, moved)
             for site, moved in reshuffled_domains(domain)]
    if not pairs:
        raise InvalidArgument(f"domain {domain.name!r} has no inner vertex of degree three")
    return pairs


def run_zinv(params, pairs, tol, max_configs=None):
    """
    Per-diagram partitions, boundary observable, factorized contour sums and
    winding spread for each (name, first, second) pair.
    """
    report = ResidualReport()
    model = params.model
    for name, first, second in pairs:
        for domain in (first, second):
            enumerate_configs(domain, model, max_configs)
        inputs = dict(domain=name, model=model, n=params.fugacity)
        report.record('zinv.partition', z_invariance_residual(first, second, params), tol, **inputs)
        report.record('zinv.boundary', boundary_observable_residual(first, second, params), tol, **inputs)
        for external in enumerate_external_diagrams(first.boundary_count, 0, model):
            where = dict(inputs, external=external.encode())
            direct = contour_sum(first, params, external)
            report.record('zinv.factorized', factorized_contour_sum(first, params, external) - direct,
                          tol, **where)
            report.record('zinv.winding', winding_spread(first, model, external), tol, **where)
        logger.info(f"Z-invariance on {name}: partition residual {report['zinv.partition'].abs:.2e}")
    return report


@zinv_bp.cli.command('zinv')
@click.option('--model', type=click.Choice(MODELS), default=DENSE, show_default=True)
@click.option('--lambda', 'lam', type=float, default=0.9, show_default=True, help='Dense lambda')
@click.option('--ell', type=int, default=0, show_default=True, help='Dense branch integer')
@click.option('--eta', type=float, default=0.55, show_default=True, help='Dilute eta')
@click.option('--alpha', type=float, default=2.0, show_default=True, help='Builtin hexagon alpha')
@click.option('--beta', type=float, default=2.2, show_default=True, help='Builtin hexagon beta')
@click.option('--domain', 'domain_file', type=click.Path(exists=True, dir_okay=False), default=None,
              help='JSON domain; every inner vertex of degree three is reshuffled')
@click.option('--save-domain', type=click.Path(dir_okay=False), default=None,
              help='Write the first domain compared to FILE as JSON')
@click.option('--diagrams', type=click.Path(dir_okay=False), default=None,
              help='Write per-diagram partitions of the first pair to FILE as CSV')
@click.option('--tol', type=float, default=None, help='Residual threshold [default: LOOPLAB_TOLERANCE]')
@click.option('--max-configs', type=click.IntRange(min=1), default=None,
              help='Enumeration cap [default: LOOPLAB_MAX_CONFIGS]')
@report_options(precision=False)
def zinv(model, lam, ell, eta, alpha, beta, domain_file, save_domain, diagrams, tol, max_configs,
         fmt, output):
    """Compare per-diagram partitions and psi across star-triangle moves"""
    started = time.perf_counter()
    try:
        params = DenseParams(lam, ell) if model == DENSE else DiluteParams(eta)
    except InvalidArgument as e:
        raise click.BadParameter(str(e), param_hint="'--lambda' / '--ell' / '--eta'")

    try:
        if domain_file:
            pairs = domain_pairs(DomainImporter().load(domain_file))
        else:
            pairs = builtin_pairs(model, alpha, beta)
    except InvalidArgument as e:
        raise click.UsageError(str(e))
    except LoopLabError as e:
        logger.error(f"Domain setup failed: {str(e)}")
        click.get_current_context().exit(1)

    try:
        report = run_zinv(params, pairs, setting(tol, 'LOOPLAB_TOLERANCE'),
                          setting(max_configs, 'LOOPLAB_MAX_CONFIGS'))
        _, first, second = pairs[0]
        if diagrams:
            with open(diagrams, 'w', encoding='utf-8') as handle:
                handle.write(ReportExporter.diagram_csv(diagram_rows(first, second, params)))
            logger.info(f"Per-diagram partitions written to {diagrams}")
        if save_domain:
            DomainImporter.save(first, save_domain)
    except LoopLabError as e:
        logger.error(f"Z-invariance check failed: {str(e)}")
        click.get_current_context().exit(1)

    emit_report(report, fmt, output, wall_time=time.perf_counter() - started)
