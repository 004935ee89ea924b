"""
Parafermionic observable and discrete contour sums.

psi(z) sums exp(-i sigma W) times the configuration weight over the
configurations whose exploration path reaches z (dense: passes through z,
dilute: ends at z). The contour sum is sum psi(z) delta_z over the
boundary; it vanishes for every external diagram on the integrable
families, and the identities below are its closed forms.
"""
from dataclasses import dataclass
import cmath
import logging
import math

from combinatorics import ChordDiagram, glue
from enumeration import (
    DENSE, DILUTE, ExternalDiagram, WeightTable, as_weight_table, config_catalog,
    enumerate_external_diagrams, exterior_turn, external_consistent, interior_turn,
    plaquette_product, shared_midpoint, trace_path,
)
from errors import IdentityMismatch, InvalidArgument
from geometry import STAR, TRIANGLE, make_domain_hexagon, make_domain_pair, make_domain_single
from utils import ComplexAccumulator, complex_fsum, relative_gap
from weights import check_angle_sum, dense_weights, dense_yb, dense_inversion_residual, phi

logger = logging.getLogger(__name__)

# Chord diagrams on the six hexagon points with the entry at 0 (the B point is 0's partner)
HEXAGON_DIAGRAMS = {
    'I': '(0-1)(2-3)(4-5)',
    'II': '(0-5)(1-4)(2-3)',
    'III': '(0-1)(2-5)(3-4)',
    'IV': '(0-5)(1-2)(3-4)',
    'V': '(0-3)(1-2)(4-5)',
}
# The two single-rhombus groupings, entry at side 0
SINGLE_DENSE_DIAGRAMS = ('(0-1)(2-3)', '(0-3)(1-2)')
SINGLE_DILUTE_DIAGRAMS = ('u:0,1,2,3', '(1-2);u:0,3', '(1-3);u:0,2', '(2-3);u:0,1')

IDENTITY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class ContourSum:
    external: ExternalDiagram
    value: complex


def named_external(name_or_code, entry=0, model=DENSE):
    """External diagram from a hexagon name (I..V) or an encoded chord diagram"""
    code = HEXAGON_DIAGRAMS.get(name_or_code, name_or_code)
    return ExternalDiagram(entry, ChordDiagram.decode(code), model)


def _path_contributions(domain, table, external, close_path):
    """Yield (visit, weighted phase) for every configuration compatible with the grouping"""
    sigma = table.sigma
    factor = table.fugacity if close_path else 1.0
    for entry in config_catalog(domain, table.model):
        trace = trace_path(domain, entry.config, external)
        if not external_consistent(domain, entry.config, external, trace):
            continue
        loops = glue(entry.internal, external.outer).closed_loops + entry.interior_loops
        weight = plaquette_product(entry.config, table) * table.fugacity ** loops * factor
        if table.model == DENSE:
            for visit in trace.visits:
                yield visit, weight * cmath.exp(-1j * sigma * visit.winding)
        else:
            visit = trace.terminal_visit
            yield visit, weight * cmath.exp(-1j * sigma * visit.winding)


def psi(domain, weights, external, close_path=False):
    """
    psi at every midpoint reached by the exploration path.

    Keys are midpoints (boundary midpoints exactly as in ``domain.boundary``);
    interior values are included for inspection but take no part in
    boundary contour sums.
    """
    table = as_weight_table(domain, weights)
    sums = {}
    for visit, value in _path_contributions(domain, table, external, close_path):
        sums.setdefault(visit.midpoint, ComplexAccumulator()).add(value)
    return {z: acc.value for z, acc in sums.items()}


def boundary_psi(domain, weights, external, close_path=False):
    """psi on the boundary as a list indexed by boundary position"""
    values = psi(domain, weights, external, close_path)
    return [values.get(s.midpoint, 0j) for s in domain.boundary]


def contour_sum(domain, weights, external, close_path=False, normalized=False):
    """sum over boundary sides of psi(z) delta_z; ``normalized`` divides by delta_z of the entry"""
    values = boundary_psi(domain, weights, external, close_path)
    total = complex_fsum(v * s.delta_z for v, s in zip(values, domain.boundary))
    if normalized:
        total /= domain.boundary[external.entry].delta_z
    return total


def contour_sums(domain, weights, entry=0, close_path=False, normalized=False):
    """Contour sums for every admissible external diagram with the given entry"""
    table = as_weight_table(domain, weights)
    return [ContourSum(ext, contour_sum(domain, table, ext, close_path, normalized))
            for ext in enumerate_external_diagrams(domain.boundary_count, entry, table.model)]


def decomposition_check(domain, weights, external):
    """|boundary contour sum - sum of the per-rhombus contour sums|"""
    table = as_weight_table(domain, weights)
    values = psi(domain, table, external)
    boundary_total = complex_fsum(values.get(s.midpoint, 0j) * s.delta_z for s in domain.boundary)

    pieces = []
    for r in domain.rhombi:
        for k in range(4):
            index = domain.boundary_index(r.id, k)
            z = domain.boundary[index].midpoint if index is not None else shared_midpoint(domain, r.id, k)
            pieces.append(values.get(z, 0j) * r.delta(k))
    return abs(boundary_total - complex_fsum(pieces))


# ============= FACTORIZED TRANSFER =============

def transfer(domain, internal, external, spin_complement, fugacity, close_path=False):
    """
    Weight-independent factor F(internal, external) of the contour sum,
    normalized by delta_z of the entry.

    Windings come from the boundary turning angles alone: crossing the
    domain from p to q turns by -pi + E(p -> q). Each crossing contributes
    +phi(W) inward and -phi(W) outward (dense: every crossing, dilute: the
    end of the path only), times n per closed loop.
    """
    dense = external.model == DENSE
    ph = lambda w: cmath.exp(1j * spin_complement * w)
    winding = 0.0
    current = external.entry
    path = {current}
    terms = [1.0 + 0j] if dense else []
    while True:
        q = internal.partner.get(current)
        if q is None:
            if dense:
                raise InvalidArgument("dense internal diagrams are perfect")
            terms = [ph(winding)]
            break
        winding += interior_turn(domain, current, q)
        path.add(q)
        if dense:
            terms.append(-ph(winding))
            if q == external.b_point:
                break
        p = external.matching.partner.get(q)
        if p is None:
            terms = [-ph(winding)]
            break
        winding += exterior_turn(domain, q, p, external.obstacles)
        path.add(p)
        current = p
        if dense:
            terms.append(ph(winding))

    if not dense:
        for point in range(domain.boundary_count):
            if point not in path and internal.is_matched(point) != external.is_used(point):
                return 0j
    loops = glue(internal, external.outer).closed_loops + (1 if close_path else 0)
    return complex_fsum(terms) * fugacity ** loops


# ============= SINGLE RHOMBUS =============

def single_rhombus_contour_sums(alpha, params, perturb=None):
    """Normalized enumerated contour sums for the single-rhombus groupings, entry at side 0"""
    domain = make_domain_single(alpha)
    table = WeightTable.from_params(domain, params, perturb)
    codes = SINGLE_DENSE_DIAGRAMS if params.model == DENSE else SINGLE_DILUTE_DIAGRAMS
    return [contour_sum(domain, table, ExternalDiagram(0, ChordDiagram.decode(code), params.model),
                        normalized=True)
            for code in codes]


# ============= TWO RHOMBI =============

def _dense_records(alpha, beta, params, weights):
    if weights is None:
        return dense_weights(alpha, params), dense_weights(beta, params)
    return weights['alpha'], weights['beta']


def two_rhombus_closed_form(alpha, beta, params, weights=None):
    """The quadratic identity obtained from the pair with external diagram V"""
    wa, wb = _dense_records(alpha, beta, params, weights)
    n, sigma, pi = params.fugacity, params.sigma, math.pi
    ph = lambda theta: phi(theta, sigma)
    return ((ph(pi - beta) - ph(alpha - pi)) * n * n * wa.a * wb.a
            + (ph(-beta) - ph(alpha)) * n * n * wa.b * wb.b
            + (ph(pi - beta) + ph(-beta) - ph(alpha) - ph(alpha - pi))
            * (n * wa.a * wb.b + n * wa.b * wb.a))


def two_rhombus_enumerated(alpha, beta, params, weights=None):
    """Enumerated pair contour sum for diagram V, path closed outside, normalized"""
    domain = make_domain_pair(alpha, beta)
    table = _role_table(domain, params, weights)
    return contour_sum(domain, table, named_external('V'), close_path=True, normalized=True)


def two_rhombus_residual(alpha, beta, params, weights=None, check_enumeration=True):
    """
    Closed-form quadratic residual. For convex angles the enumerated
    contour sum is compared as well and a disagreement raises
    IdentityMismatch.
    """
    closed = two_rhombus_closed_form(alpha, beta, params, weights)
    if check_enumeration and 0 < alpha < math.pi and 0 < beta < math.pi:
        enumerated = two_rhombus_enumerated(alpha, beta, params, weights)
        if relative_gap(closed, enumerated) > IDENTITY_TOLERANCE:
            raise IdentityMismatch(
                f"pair ({alpha}, {beta}): closed form {closed} vs enumeration {enumerated}"
            )
    return closed


def ghost_pair_residual(alpha, params):
    """
    Closed form at beta = -alpha minus (phi(pi+alpha) - phi(alpha-pi)) n times
    the inversion residual; zero for any weights.
    """
    weights = {'alpha': dense_weights(alpha, params), 'beta': dense_weights(-alpha, params)}
    closed = two_rhombus_closed_form(alpha, -alpha, params, weights)
    sigma, n, pi = params.sigma, params.fugacity, math.pi
    expected = (phi(pi + alpha, sigma) - phi(alpha - pi, sigma)) * n \
        * dense_inversion_residual(alpha, params)
    return closed - expected


# ============= HEXAGON =============

def _role_table(domain, params, weights):
    if weights is None:
        return WeightTable.from_params(domain, params)
    return WeightTable.from_roles(domain, weights, params.fugacity,
                                  float(params.spin_complement()), params.model)


def _gamma(alpha, beta):
    gamma = 2 * math.pi - alpha - beta
    check_angle_sum(alpha, beta, gamma)
    if not (0 < alpha < math.pi and 0 < beta < math.pi and 0 < gamma < math.pi):
        raise InvalidArgument(f"inadmissible hexagon angles ({alpha}, {beta}, {gamma})")
    return gamma


def hexagon_domains(alpha, beta):
    gamma = _gamma(alpha, beta)
    return (make_domain_hexagon(alpha, beta, gamma, STAR),
            make_domain_hexagon(alpha, beta, gamma, TRIANGLE))


def hexagon_yb(alpha, beta, params, weights=None):
    gamma = _gamma(alpha, beta)
    if weights is None:
        records = [dense_weights(a, params) for a in (alpha, beta, gamma)]
    else:
        records = [weights[role] for role in ('alpha', 'beta', 'gamma')]
    return dense_yb(*records, params.fugacity)


def hexagon_yb_direct_closed_form(alpha, beta, params, weights=None):
    """(phi(-beta) - phi(alpha)) n^2 YB(alpha, beta, gamma)"""
    sigma, n = params.sigma, params.fugacity
    return (phi(-beta, sigma) - phi(alpha, sigma)) * n * n * hexagon_yb(alpha, beta, params, weights)


def hexagon_yb_direct(alpha, beta, params, weights=None):
    """Enumerated star-hexagon contour sum for diagram V (closed path, normalized)"""
    star, _ = hexagon_domains(alpha, beta)
    table = _role_table(star, params, weights)
    return contour_sum(star, table, named_external('V'), close_path=True, normalized=True)


def dense_star_triangle_prefactors(alpha, beta, params):
    """Coefficients of YB in the five star - triangle differences, diagrams I..V"""
    sigma, n, pi = params.sigma, params.fugacity, math.pi
    ph = lambda theta: phi(theta, sigma)
    return [
        n * ph(alpha - 2 * pi) - n * ph(alpha) + n ** 3 * ph(-beta) - n ** 3,
        n * n * (ph(-beta) - ph(2 * pi - beta)),
        n * n * (ph(alpha - 2 * pi) - ph(alpha)),
        n ** 3 - n * ph(2 * pi - beta) + n * ph(-beta) - n ** 3 * ph(alpha),
        2 * n * n * (ph(-beta) - ph(alpha)),
    ]


def dense_star_triangle_differences(alpha, beta, params, weights=None):
    """Enumerated (star - triangle) contour sums for the five diagrams I..V"""
    star, triangle = hexagon_domains(alpha, beta)
    star_table = _role_table(star, params, weights)
    triangle_table = _role_table(triangle, params, weights)
    differences = []
    for name in ('I', 'II', 'III', 'IV', 'V'):
        external = named_external(name)
        differences.append(
            contour_sum(star, star_table, external, close_path=True, normalized=True)
            - contour_sum(triangle, triangle_table, external, close_path=True, normalized=True)
        )
    return differences
