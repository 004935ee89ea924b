"""
Verify commands: residual sweeps for the dense and dilute models
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import logging
import math
import time

import click
from flask import Blueprint, current_app
import numpy as np

from appendix import ROLES, dilute_hexagon_differences
from enumeration import (
    DENSE, DILUTE, WeightTable, config_catalog, enumerate_configs, format_config_line,
    plaquette_product,
)
from errors import LoopLabError, SingularInput
from geometry import attach_rhombus
from helpers import (
    EXTRA_ANGLE, as_callback, emit_report, parse_grid, parse_int_list, parse_perturbations,
    report_options, setting,
)
from numerics import get_backend
from observable import (
    SINGLE_DENSE_DIAGRAMS, SINGLE_DILUTE_DIAGRAMS, contour_sums, dense_star_triangle_differences,
    dense_star_triangle_prefactors, ghost_pair_residual, hexagon_domains, hexagon_yb,
    hexagon_yb_direct, hexagon_yb_direct_closed_form, single_rhombus_contour_sums,
    two_rhombus_closed_form, two_rhombus_enumerated,
)
from report import ResidualReport
from weights import (
    DenseParams, DiluteParams, apply_perturbation, criticality_residual, dense_determinant,
    dense_determinant_factorized, dense_inversion_residual, dense_single_rhombus_residuals,
    dense_weights, dense_yb_residual, dilute_holomorphicity_system,
    dilute_single_rhombus_residuals, dilute_weights, dilute_yb, dilute_yb_permutations,
    model_weights, numerical_rank, perturbed_params, spin_consistency,
)
from zinvariance import boundary_observable_residual, reshuffled_domains, z_invariance_residual

logger = logging.getLogger(__name__)

verify_bp = Blueprint('verify', __name__, cli_group='verify')

DILUTE_RANK = 5
NULL_VECTOR_TOLERANCE = 1e-8

GRID_HELP = "start:stop:step (start and stop included), a comma list or a single value"


@dataclass(frozen=True)
class SweepOptions:
    """Everything a worker needs for one grid point; picklable"""
    alphas: tuple
    betas: tuple
    hex_angles: tuple
    tol: float
    perturb: tuple = ()
    precision: str = 'double'
    digits: int = 50
    max_configs: int = None

    @property
    def perturbation(self):
        return dict(self.perturb)

    def yb_pairs(self, alpha):
        """(beta, gamma) with gamma = 2 pi - alpha - beta inside (0, pi)"""
        for beta in self.betas:
            gamma = 2 * math.pi - alpha - beta
            if 0 < gamma < math.pi:
                yield beta, gamma


def _records(angles, params, perturb):
    """Perturbed weight records by role, or None to use the family weights"""
    if not perturb:
        return None
    return {role: apply_perturbation(model_weights(angle, params), perturb)
            for role, angle in zip(ROLES, angles)}


# ============= DENSE =============

def dense_point(lam, ell, options):
    """All dense checks at one (lambda, ell) grid point"""
    report = ResidualReport(options.precision)
    backend = get_backend(options.precision, options.digits)
    perturb = options.perturbation
    params = DenseParams(lam, ell)
    effective = perturbed_params(params, perturb)
    tol = options.tol
    point = dict(lam=lam, ell=ell)

    report.record('spin.dense', spin_consistency(effective, backend), tol, **point)

    for alpha in options.alphas:
        inputs = dict(point, alpha=alpha)
        weights = apply_perturbation(dense_weights(alpha, effective), perturb) if perturb else None
        closed = dense_single_rhombus_residuals(alpha, effective, weights, backend)
        enumerated = single_rhombus_contour_sums(alpha, params, perturb)
        for diagram, c, e in zip(SINGLE_DENSE_DIAGRAMS, closed, enumerated):
            report.record('holo.single.dense', c, tol, diagram=diagram, **inputs)
            report.record('holo.single.dense.enumerated', e, tol, diagram=diagram, **inputs)
            report.record('holo.single.dense.pattern', e - c, tol, diagram=diagram, **inputs)

        determinant = dense_determinant(alpha, effective)
        report.record('determinant.dense', determinant, tol, **inputs)
        report.record('determinant.dense.factorized',
                      determinant - dense_determinant_factorized(alpha, effective), tol, **inputs)

        pair = (alpha, -alpha, math.pi - alpha)
        records = _records(pair, effective, perturb)
        ghost = (records['alpha'], records['beta']) if records else None
        report.record('inversion.dense',
                      dense_inversion_residual(alpha, effective, ghost, backend), tol, **inputs)
        report.record('holo.pair.ghost', ghost_pair_residual(alpha, effective), tol, **inputs)
        try:
            opposite = (records['alpha'], records['gamma']) if records else None
            report.record('criticality.dense',
                          criticality_residual(alpha, effective, opposite, backend), tol, **inputs)
        except SingularInput as e:
            logger.warning(f"Skipping criticality at {inputs}: {str(e)}")

        for beta, gamma in options.yb_pairs(alpha):
            records = _records((alpha, beta, gamma), effective, perturb)
            triple = [records[r] for r in ROLES] if records else None
            report.record('yb.dense', dense_yb_residual(alpha, beta, gamma, effective, triple, backend),
                          tol, beta=beta, **inputs)
            report.record('holo.pair.quadratic',
                          two_rhombus_closed_form(alpha, beta, effective, records), tol,
                          beta=beta, **inputs)

    _dense_hexagon_checks(report, params, effective, options, point)
    logger.debug(f"Dense point lam={lam}, ell={ell}: {report.checks_run} evaluations")
    return report


def _dense_hexagon_checks(report, params, effective, options, point):
    perturb = options.perturbation
    tol = options.tol
    alpha, beta = options.hex_angles
    gamma = 2 * math.pi - alpha - beta
    inputs = dict(point, alpha=alpha, beta=beta)
    records = _records((alpha, beta, gamma), effective, perturb)

    closed = two_rhombus_closed_form(alpha, beta, effective, records)
    enumerated = two_rhombus_enumerated(alpha, beta, effective, records)
    report.record('holo.pair.enumerated', enumerated - closed, tol, **inputs)
    report.record('holo.pair.value', enumerated, tol, **inputs)

    direct = hexagon_yb_direct(alpha, beta, effective, records)
    report.record('holo.hexagon.direct',
                  direct - hexagon_yb_direct_closed_form(alpha, beta, effective, records), tol, **inputs)
    report.record('holo.hexagon.value', direct, tol, **inputs)

    yb = hexagon_yb(alpha, beta, effective, records)
    differences = dense_star_triangle_differences(alpha, beta, effective, records)
    prefactors = dense_star_triangle_prefactors(alpha, beta, effective)
    for name, difference, prefactor in zip(('I', 'II', 'III', 'IV', 'V'), differences, prefactors):
        report.record('holo.stardiff', difference, tol, diagram=name, **inputs)
        report.record('holo.stardiff.prefactor', difference - prefactor * yb, tol, diagram=name, **inputs)

    star, triangle = hexagon_domains(alpha, beta)
    table = WeightTable.from_params(star, params, perturb)
    for entry in range(star.boundary_count):
        for item in contour_sums(star, table, entry, normalized=True):
            report.record('holo.contour.dense', item.value, tol,
                          external=item.external.encode(), **inputs)

    report.record('zinv.dense.hexagon', z_invariance_residual(star, triangle, effective), tol, **inputs)
    report.record('zinv.dense.boundary',
                  boundary_observable_residual(star, triangle, effective), tol, **inputs)

    extended = attach_rhombus(star, 0, EXTRA_ANGLE)
    for site, moved in reshuffled_domains(extended):
        where = dict(inputs, rhombi=list(site.rhombi))
        report.record('zinv.dense.extended', z_invariance_residual(extended, moved, effective), tol, **where)
        report.record('zinv.dense.extended.boundary',
                      boundary_observable_residual(extended, moved, effective, entries=[0]), tol, **where)


# ============= DILUTE =============

def null_vector_residual(alpha, params, weights):
    """Distance between the null vector of the 8 x 6 system and the normalized weights"""
    _, _, vt = np.linalg.svd(dilute_holomorphicity_system(alpha, params))
    null = vt[-1]
    vector = np.array([weights.t, weights.u1, weights.u2, weights.v, weights.a, weights.b], dtype=float)
    vector /= np.linalg.norm(vector)
    return float(min(np.linalg.norm(null - vector), np.linalg.norm(null + vector)))


def _dilute_yb_values(alpha, beta, gamma, params, records, backend):
    if records is None:
        return dilute_yb_permutations(alpha, beta, gamma, params, backend)
    triple = [records[r] for r in ROLES]
    n = params.fugacity
    values = {}
    for perm in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        for index in range(1, 7):
            values[(index, perm)] = dilute_yb(index, *(triple[k] for k in perm), n)
    return values


def dilute_point(eta, options):
    """All dilute checks at one eta grid point"""
    report = ResidualReport(options.precision)
    backend = get_backend(options.precision, options.digits)
    perturb = options.perturbation
    params = DiluteParams(eta)
    effective = perturbed_params(params, perturb)
    tol = options.tol
    point = dict(eta=eta)

    report.record('spin.dilute', spin_consistency(effective, backend), tol, **point)

    for alpha in options.alphas:
        inputs = dict(point, alpha=alpha)
        weights = apply_perturbation(dilute_weights(alpha, effective), perturb)
        closed = dilute_single_rhombus_residuals(alpha, effective, weights if perturb else None, backend)
        for k, value in enumerate(closed):
            report.record('holo.single.dilute', value, tol, relation=k, **inputs)
        enumerated = single_rhombus_contour_sums(alpha, params, perturb)
        for diagram, value in zip(SINGLE_DILUTE_DIAGRAMS, enumerated):
            report.record('holo.single.dilute.enumerated', value, tol, diagram=diagram, **inputs)

        rank = numerical_rank(dilute_holomorphicity_system(alpha, effective))
        report.record('rank.dilute', rank - DILUTE_RANK, 0.0, rank=rank, **inputs)
        report.record('nullvector.dilute', null_vector_residual(alpha, effective, weights),
                      max(tol, NULL_VECTOR_TOLERANCE), **inputs)

        for beta, gamma in options.yb_pairs(alpha):
            records = _records((alpha, beta, gamma), effective, perturb)
            values = _dilute_yb_values(alpha, beta, gamma, effective, records, backend)
            (index, perm), worst = max(values.items(), key=lambda kv: abs(kv[1]))
            report.record('yb.dilute', worst, tol, beta=beta, index=index, perm=list(perm), **inputs)

    _dilute_hexagon_checks(report, params, effective, options, point)
    logger.debug(f"Dilute point eta={eta}: {report.checks_run} evaluations")
    return report


def _dilute_hexagon_checks(report, params, effective, options, point):
    perturb = options.perturbation
    tol = options.tol
    alpha, beta = options.hex_angles
    gamma = 2 * math.pi - alpha - beta
    inputs = dict(point, alpha=alpha, beta=beta)
    records = _records((alpha, beta, gamma), effective, perturb)

    star, triangle = hexagon_domains(alpha, beta)
    differences = dilute_hexagon_differences(alpha, beta, effective, records)
    for k, value in enumerate(differences):
        report.record('holo.hexagon.dilute', value, tol, grouping=k, **inputs)

    table = WeightTable.from_params(star, params, perturb)
    for item in contour_sums(star, table, 0, normalized=True):
        report.record('holo.contour.dilute', item.value, tol, external=item.external.encode(), **inputs)

    report.record('zinv.dilute.hexagon', z_invariance_residual(star, triangle, effective), tol, **inputs)
    report.record('zinv.dilute.boundary',
                  boundary_observable_residual(star, triangle, effective, entries=[0]), tol, **inputs)


# ============= SWEEP DRIVER =============

def _run_point(job):
    model, point, options = job
    if model == DENSE:
        return dense_point(*point, options)
    return dilute_point(*point, options)


def _check_cap(model, options):
    """Fail early when the largest domain of the sweep exceeds the enumeration cap"""
    star, _ = hexagon_domains(*options.hex_angles)
    enumerate_configs(attach_rhombus(star, 0, EXTRA_ANGLE) if model == DENSE else star,
                      model, options.max_configs)


def run_verify(model, points, options, workers=1, seed=None):
    """
    Run every check of ``model`` over the grid points and merge the worst
    cases in grid order.
    """
    _check_cap(model, options)
    jobs = [(model, point, options) for point in points]
    logger.info(f"Verifying {model} model on {len(jobs)} grid point(s) x {len(options.alphas)} angle(s)")
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(job) for job in jobs]

    report = ResidualReport(options.precision, seed=seed)
    for result in results:
        report.merge(result)
    return report


def dump_configurations(path, model, params, hex_angles):
    """Write every configuration of the star hexagon with its plaquette product"""
    star, _ = hexagon_domains(*hex_angles)
    table = WeightTable.from_params(star, params)
    lines = []
    for entry in config_catalog(star, model):
        line = format_config_line(entry, plaquette_product(entry.config, table))
        logger.debug(line)
        lines.append(line)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write('\n'.join(lines) + '\n')
    logger.info(f"Dumped {len(lines)} {model} configurations to {path}")


# ============= COMMANDS =============

def _sweep_options(f):
    f = click.option('--dump-configs', type=click.Path(dir_okay=False), default=None,
                     help='Write the star-hexagon configurations and weights to FILE')(f)
    f = click.option('--workers', type=click.IntRange(min=1), default=None,
                     help='Worker processes for the grid [default: LOOPLAB_WORKERS]')(f)
    f = click.option('--max-configs', type=click.IntRange(min=1), default=None,
                     help='Enumeration cap [default: LOOPLAB_MAX_CONFIGS]')(f)
    f = click.option('--seed', type=int, default=None, help='Recorded in the report metadata')(f)
    f = click.option('--perturb', multiple=True, callback=as_callback(parse_perturbations),
                     help='key:factor scaling of a weight label, or sigma:shift (repeatable)')(f)
    f = click.option('--tol', type=float, default=None,
                     help='Residual threshold [default: LOOPLAB_TOLERANCE]')(f)
    f = click.option('--hex-angles', type=(float, float), default=(2.0, 2.2), show_default=True,
                     help='(alpha, beta) of the pair, hexagon and Z-invariance checks')(f)
    f = click.option('--beta', default=None, callback=as_callback(parse_grid),
                     help=f'Second angle grid for Yang-Baxter and pair checks: {GRID_HELP} '
                          '[default: the alpha grid]')(f)
    f = click.option('--alpha', default='0.1:3.0:0.1', show_default=True,
                     callback=as_callback(parse_grid), help=f'Rhombus angle grid: {GRID_HELP}')(f)
    return f


def _options(model, alpha, beta, hex_angles, tol, perturb, precision, max_configs):
    allowed = set(DenseParams.labels if model == DENSE else DiluteParams.labels) | {'sigma'}
    unknown = set(perturb) - allowed
    if unknown:
        raise click.BadParameter(f"unknown key(s) {', '.join(sorted(unknown))}; "
                                 f"use {', '.join(sorted(allowed))}", param_hint="'--perturb'")
    hex_alpha, hex_beta = hex_angles
    hex_gamma = 2 * math.pi - hex_alpha - hex_beta
    if not all(0 < x < math.pi for x in (hex_alpha, hex_beta, hex_gamma)):
        raise click.BadParameter(f"need alpha, beta and 2 pi - alpha - beta in (0, pi), "
                                 f"got {hex_angles}", param_hint="'--hex-angles'")
    return SweepOptions(
        alphas=tuple(alpha),
        betas=tuple(beta if beta is not None else alpha),
        hex_angles=(hex_alpha, hex_beta),
        tol=setting(tol, 'LOOPLAB_TOLERANCE'),
        perturb=tuple(sorted(perturb.items())),
        precision=setting(precision, 'LOOPLAB_PRECISION'),
        digits=current_app.config['LOOPLAB_HIGH_DIGITS'],
        max_configs=setting(max_configs, 'LOOPLAB_MAX_CONFIGS'),
    )


def _execute(model, points, options, workers, seed, fmt, output, dump_params, dump_configs):
    started = time.perf_counter()
    try:
        if dump_configs:
            dump_configurations(dump_configs, model, dump_params, options.hex_angles)
        report = run_verify(model, points, options, setting(workers, 'LOOPLAB_WORKERS'), seed)
    except LoopLabError as e:
        logger.error(f"Verification of the {model} model failed: {str(e)}")
        click.get_current_context().exit(1)
    emit_report(report, fmt, output, wall_time=time.perf_counter() - started)


@verify_bp.cli.command('dense')
@click.option('--lambda', 'lam', default='0.1:1.5:0.1', show_default=True,
              callback=as_callback(parse_grid), help=f'lambda grid in [0, pi/2]: {GRID_HELP}')
@click.option('--ell', default='0,1', show_default=True, callback=as_callback(parse_int_list),
              help='Branch integers, e.g. 0,1 or -1:1')
@_sweep_options
@report_options()
def verify_dense(lam, ell, alpha, beta, hex_angles, tol, perturb, seed, max_configs, workers,
                 dump_configs, fmt, output, precision):
    """Dense model: holomorphicity, spin, determinant, Yang-Baxter, inversion, hexagon, Z-invariance"""
    bad = [x for x in lam if not 0 <= x <= math.pi / 2]
    if bad:
        raise click.BadParameter(f"lambda values outside [0, pi/2]: {bad}", param_hint="'--lambda'")
    options = _options(DENSE, alpha, beta, hex_angles, tol, perturb, precision, max_configs)
    points = [(x, e) for x in lam for e in ell]
    _execute(DENSE, points, options, workers, seed, fmt, output,
             DenseParams(lam[0], ell[0]), dump_configs)


@verify_bp.cli.command('dilute')
@click.option('--eta', default='0.05:0.75:0.05', show_default=True,
              callback=as_callback(parse_grid), help=f'eta grid in [0, pi/4]: {GRID_HELP}')
@_sweep_options
@report_options()
def verify_dilute(eta, alpha, beta, hex_angles, tol, perturb, seed, max_configs, workers,
                  dump_configs, fmt, output, precision):
    """Dilute model: holomorphicity, rank, spin, Yang-Baxter, hexagon differences, Z-invariance"""
    bad = [x for x in eta if not 0 <= x <= math.pi / 4]
    if bad:
        raise click.BadParameter(f"eta values outside [0, pi/4]: {bad}", param_hint="'--eta'")
    options = _options(DILUTE, alpha, beta, hex_angles, tol, perturb, precision, max_configs)
    points = [(x,) for x in eta]
    _execute(DILUTE, points, options, workers, seed, fmt, output, DiluteParams(eta[0]), dump_configs)
