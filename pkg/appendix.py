"""
Dilute hexagon relations and the elimination argument that forces every
YB_i to vanish.

The star - triangle differences of the 21 dilute hexagon groupings are
linear in the values YB_i at permuted arguments. Six of those relations,
together with their copies under permutations of (alpha, beta, gamma),
already have only the trivial solution; ``elimination_chain`` reproduces
the substitutions step by step and closes with a null-space test.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
import itertools
import logging
import math

import numpy as np

from enumeration import DILUTE, WeightTable, enumerate_external_diagrams
from errors import DegenerateParameters, InvalidArgument
from observable import contour_sum, hexagon_domains, transfer
from report import ResidualReport
from weights import DiluteParams, DiluteWeights, RANK_TOLERANCE, dilute_weights, dilute_yb, phi
from zinvariance import partition_by_diagram

logger = logging.getLogger(__name__)

PERMUTATIONS = tuple(itertools.permutations(range(3)))
IDENTITY = (0, 1, 2)
ROLES = ('alpha', 'beta', 'gamma')

DEGENERACY_TOLERANCE = 1e-10
CHAIN_TOLERANCE = 1e-9
ROW_TOLERANCE = 1e-12
FIT_TOLERANCE = 1e-9
MIN_FIT_SAMPLES = 60
# Closest a fixed or derived opening angle may come to 0 or pi
FIXED_ANGLE_MARGIN = 1e-6

# index -> (swapped argument positions, sign picked up by the swap)
_SWAP_SYMMETRIES = {1: ((0, 1), 1), 2: ((0, 2), -1), 3: ((1, 2), 1), 5: ((0, 2), 1)}


def canonicalize(index, perm):
    """((index, canonical permutation), sign) under the symmetries of YB_index"""
    perm = tuple(perm)
    if index == 6:
        return (6, IDENTITY), 1
    if index not in _SWAP_SYMMETRIES:
        return (index, perm), 1
    (i, j), sign = _SWAP_SYMMETRIES[index]
    swapped = list(perm)
    swapped[i], swapped[j] = swapped[j], swapped[i]
    swapped = tuple(swapped)
    if swapped < perm:
        return (index, swapped), sign
    return (index, perm), 1


YB_UNKNOWNS = tuple(sorted({canonicalize(i, p)[0] for i in range(1, 7) for p in PERMUTATIONS}))
UNKNOWN_INDEX = {key: k for k, key in enumerate(YB_UNKNOWNS)}

# Unknowns met along the elimination, by letter
CHAIN_UNKNOWNS = {
    'A': (4, (0, 2, 1)),
    'B': (4, (1, 2, 0)),
    'C': (2, (0, 1, 2)),
    'D': (1, (0, 2, 1)),
    'E': (3, (2, 0, 1)),
    'F': (5, (0, 2, 1)),
    'G': (1, (1, 2, 0)),
    'H': (2, (1, 0, 2)),
}

# (lhs, rhs, sign): YB at lhs equals sign * YB at rhs for any weights
SYMMETRY_SUBSTITUTIONS = (
    ((2, (2, 1, 0)), (2, (0, 1, 2)), -1),
    ((2, (2, 0, 1)), (2, (1, 0, 2)), -1),
    ((5, (1, 2, 0)), (5, (0, 2, 1)), 1),
    ((3, (2, 1, 0)), (3, (2, 0, 1)), 1),
)


def label(key):
    index, perm = key
    return f"YB{index}({','.join(('a', 'b', 'g')[k] for k in perm)})"


def yb_vector(records, n):
    """YB values at the canonical unknowns; ``records`` are the weights by role"""
    return np.array([dilute_yb(index, *(records[k] for k in perm), n) for index, perm in YB_UNKNOWNS],
                    dtype=float)


def symmetry_residuals(records, n):
    """|lhs - sign * rhs| for each symmetry substitution"""
    value = lambda key: dilute_yb(key[0], *(records[k] for k in key[1]), n)
    return [abs(value(lhs) - sign * value(rhs)) for lhs, rhs, sign in SYMMETRY_SUBSTITUTIONS]


# ============= THE SIX RELATIONS =============

def _relation_terms(x, y, n, ph):
    """
    The six relations at angles x (role 0) and y (role 1) as lists of
    (coefficient, index, argument roles).
    """
    pi = math.pi
    return {
        'r1': [
            (ph(x), 4, (0, 2, 1)), (-n * ph(x), 4, (1, 2, 0)), (n, 2, (0, 1, 2)),
            (-ph(pi), 1, (0, 2, 1)), (ph(x + pi), 3, (2, 0, 1)), (-ph(x - 3 * pi), 5, (0, 2, 1)),
        ],
        'r2': [
            (ph(x - pi), 4, (1, 2, 0)), (-n * ph(x - pi), 4, (0, 2, 1)),
            (ph(x), 5, (0, 2, 1)), (-n * ph(x), 3, (2, 0, 1)),
            (n, 1, (0, 2, 1)), (ph(-pi), 2, (2, 1, 0)),
        ],
        'r3': [
            (ph(-y), 1, (0, 2, 1)), (-ph(x), 1, (1, 2, 0)),
            (ph(pi - y), 2, (0, 1, 2)), (ph(x - pi), 2, (2, 0, 1)),
        ],
        'r4': [
            (n * ph(pi - y), 4, (1, 2, 0)), (-ph(pi - y), 4, (0, 2, 1)),
            (n * ph(-y), 3, (2, 0, 1)), (-ph(-y), 5, (0, 2, 1)),
            (-n, 1, (1, 2, 0)), (ph(pi), 2, (1, 0, 2)),
        ],
        'r5': [
            (n * ph(-y), 4, (0, 2, 1)), (-ph(-y), 4, (1, 2, 0)), (n, 2, (2, 0, 1)),
            (ph(-pi), 1, (1, 2, 0)), (-ph(-y - pi), 3, (2, 0, 1)), (ph(3 * pi - y), 5, (0, 2, 1)),
        ],
        'r6': [
            (ph(x) * (1 - n * n), 6, (0, 1, 2)), (n * n, 3, (0, 1, 2)), (-n, 5, (1, 0, 2)),
            (n * ph(2 * pi - y), 5, (0, 2, 1)), (-ph(2 * pi - y), 3, (2, 0, 1)),
            (n * ph(-y - pi), 4, (0, 2, 1)), (-ph(-y - pi), 4, (1, 2, 0)),
            (n * ph(-pi), 4, (1, 0, 2)), (-ph(-pi), 4, (2, 0, 1)),
        ],
    }


RELATIONS = ('r1', 'r2', 'r3', 'r4', 'r5', 'r6')


@dataclass
class LinearSystem:
    """Complex rows over the canonical YB unknowns, one per (relation, permutation)"""
    matrix: np.ndarray
    labels: tuple
    alpha: float
    beta: float
    n: float
    sigma: float

    def row(self, relation, perm=IDENTITY):
        return self.matrix[self.labels.index((relation, tuple(perm)))]

    def residuals(self, vector):
        return self.matrix @ np.asarray(vector, dtype=complex)

    def real_stacked(self):
        """Real and imaginary parts stacked; the unknowns are real"""
        return np.vstack([self.matrix.real, self.matrix.imag])

    def singular_values(self):
        return np.linalg.svd(self.real_stacked(), compute_uv=False)

    def singular_ratio(self):
        """sigma_min / sigma_max of the real-stacked system"""
        values = self.singular_values()
        if values.size == 0 or values[0] == 0:
            return 0.0
        return float(values[-1] / values[0])

    def has_trivial_nullspace(self, rel_tol=RANK_TOLERANCE):
        values = self.singular_values()
        return values.size == len(YB_UNKNOWNS) and self.singular_ratio() > rel_tol


def appendix_system(alpha, beta, n, sigma, permuted=True):
    """
    The six relations as rows over ``YB_UNKNOWNS`` after the symmetry
    substitutions; with ``permuted`` every permutation of the three
    angles contributes a copy.
    """
    angles = (alpha, beta, 2 * math.pi - alpha - beta)
    ph = lambda theta: phi(theta, sigma)
    rows, labels = [], []
    for perm in (PERMUTATIONS if permuted else (IDENTITY,)):
        terms = _relation_terms(angles[perm[0]], angles[perm[1]], n, ph)
        for name in RELATIONS:
            row = np.zeros(len(YB_UNKNOWNS), dtype=complex)
            for coefficient, index, roles in terms[name]:
                key, sign = canonicalize(index, tuple(perm[r] for r in roles))
                row[UNKNOWN_INDEX[key]] += sign * coefficient
            rows.append(row)
            labels.append((name, perm))
    return LinearSystem(np.array(rows), tuple(labels), alpha, beta, n, sigma)


# ============= ELIMINATION =============

def _vector(**coefficients):
    vector = np.zeros(len(YB_UNKNOWNS), dtype=complex)
    for letter, value in coefficients.items():
        vector[UNKNOWN_INDEX[CHAIN_UNKNOWNS[letter]]] = value
    return vector


def _at(vector, letter):
    return vector[UNKNOWN_INDEX[CHAIN_UNKNOWNS[letter]]]


def _solve_for(row, letter, factor_name):
    """Expression e with unknown = e . x, read off the relation ``row``"""
    k = UNKNOWN_INDEX[CHAIN_UNKNOWNS[letter]]
    pivot = row[k]
    if abs(pivot) < DEGENERACY_TOLERANCE:
        raise DegenerateParameters(factor_name, pivot)
    expression = -row / pivot
    expression[k] = 0
    return expression


def _substitute(row, letter, expression):
    k = UNKNOWN_INDEX[CHAIN_UNKNOWNS[letter]]
    result = row.copy()
    coefficient = result[k]
    result[k] = 0
    return result + coefficient * expression


def _gap(first, second):
    return float(np.max(np.abs(first - second)) / max(1.0, float(np.max(np.abs(second)))))


def chain_prefactor(n, sigma):
    """n phi(-2pi) - n phi(2pi) + phi(-4pi) + phi(-2pi) - phi(2pi) - phi(4pi)"""
    ph = lambda theta: phi(theta, sigma)
    pi = math.pi
    return n * ph(-2 * pi) - n * ph(2 * pi) + ph(-4 * pi) + ph(-2 * pi) - ph(2 * pi) - ph(4 * pi)


def elimination_chain(alpha, beta, n, sigma, report=None, check_nullspace=True):
    """
    Replay the elimination numerically at one parameter point.

    1. Solve the first relation for YB1(a,g,b).
    2. Substitute into the second and solve for YB4(b,g,a) (needs n^2 != 1).
    3. Substitute both into the third, fourth and fifth relations.
    4. Two combinations of those cancel YB3(g,a,b), YB2(a,b,g) and
       YB1(b,g,a), leaving YB4(a,g,b) and YB2(b,a,g) only through
       X = phi(-b) YB4(a,g,b) - YB2(b,a,g), plus YB5(a,g,b).
    5. The 2x2 determinant in (X, YB5) is -n phi(-b) times the chain
       prefactor, which must not vanish.
    6. Back-substitution is replaced by the null-space test of all six
       relations under all permutations.

    Raises DegenerateParameters on n^2 = 1 or a vanishing prefactor.
    """
    report = report or ResidualReport()
    inputs = dict(alpha=alpha, beta=beta, n=n, sigma=sigma)
    if abs(n * n - 1) < DEGENERACY_TOLERANCE:
        raise DegenerateParameters('n^2-1', n * n - 1)
    prefactor = chain_prefactor(n, sigma)
    if abs(prefactor) < DEGENERACY_TOLERANCE:
        raise DegenerateParameters('prefactor', prefactor)

    ph = lambda theta: phi(theta, sigma)
    pi = math.pi
    p, a, q = ph(pi), ph(alpha), ph(-beta)
    system = appendix_system(alpha, beta, n, sigma)
    r1, r2, r3, r4, r5 = (system.row(name) for name in RELATIONS[:5])

    yb1 = _solve_for(r1, 'D', 'phi(pi)')
    printed_yb1 = _vector(A=ph(alpha - pi), B=-n * ph(alpha - pi), C=n * ph(-pi),
                          E=ph(alpha), F=-ph(alpha - 4 * pi))
    report.record('appendix.chain.yb1', _gap(yb1, printed_yb1), CHAIN_TOLERANCE, **inputs)

    yb4 = _solve_for(_substitute(r2, 'D', yb1), 'B', 'n^2-1')
    printed_yb4 = _vector(C=ph(-alpha), F=(ph(pi) - n * ph(-3 * pi)) / (n * n - 1))
    report.record('appendix.chain.yb4', _gap(yb4, printed_yb4), CHAIN_TOLERANCE, **inputs)

    yb1 = _substitute(yb1, 'B', yb4)
    s1, s4, s12 = (_substitute(_substitute(r, 'D', yb1), 'B', yb4) for r in (r3, r4, r5))

    c1 = (n * s1 - a * s4) / a
    c2 = s4 / p + n * s12
    scale = max(1.0, float(np.max(np.abs(c1))), float(np.max(np.abs(c2))))
    cancelled = max(abs(_at(c, letter)) for c in (c1, c2) for letter in 'ECG') / scale
    report.record('appendix.chain.elimination', cancelled, CHAIN_TOLERANCE, **inputs)

    x1, x2 = -_at(c1, 'H'), -_at(c2, 'H')
    y1, y2 = _at(c1, 'F'), _at(c2, 'F')
    pairing = max(abs(_at(c1, 'A') - q * x1), abs(_at(c2, 'A') - q * x2)) / scale
    report.record('appendix.chain.pairing', pairing, CHAIN_TOLERANCE, **inputs)

    determinant = x1 * y2 - x2 * y1
    expected = -n * q * prefactor
    report.record('appendix.chain.determinant',
                  abs(determinant - expected) / max(1.0, abs(expected)), CHAIN_TOLERANCE, **inputs)

    ratio = system.singular_ratio()
    if check_nullspace:
        # recorded as sigma_max / sigma_min so that smaller is better
        report.record('appendix.chain.conditioning', 1.0 / ratio if ratio > 0 else math.inf,
                      1.0 / RANK_TOLERANCE, **inputs)
    report.note('appendix.prefactor', complex(prefactor))
    report.note('appendix.singular_ratio', ratio)
    logger.debug(f"Chain at ({alpha:.4f}, {beta:.4f}, n={n:.4f}): "
                 f"det={determinant:.3e}, sigma ratio={ratio:.3e}")
    return report


# ============= HEXAGON DIFFERENCES =============

def _hexagon_externals():
    return enumerate_external_diagrams(6, 0, DILUTE)


def dilute_hexagon_differences(alpha, beta, params, weights=None):
    """
    Enumerated star - triangle contour sums (normalized by delta_z at the
    entry) for the 21 dilute groupings with the entry at boundary point 0.
    ``weights`` may map roles to weight records.
    """
    if params.model != DILUTE:
        raise InvalidArgument("dilute hexagon differences need dilute parameters")
    star, triangle = hexagon_domains(alpha, beta)
    tables = []
    for domain in (star, triangle):
        if weights is None:
            tables.append(WeightTable.from_params(domain, params))
        else:
            tables.append(WeightTable.from_roles(domain, weights, params.fugacity,
                                                 float(params.spin_complement()), DILUTE))
    return [contour_sum(star, tables[0], ext, normalized=True)
            - contour_sum(triangle, tables[1], ext, normalized=True)
            for ext in _hexagon_externals()]


class HexagonTransfer:
    """
    Weight-independent part of the 21 dilute differences: for each
    arrangement, the transfer factor of every internal diagram against
    every grouping. Differences for new weights then cost two partitions.
    """

    def __init__(self, alpha, beta, params):
        self.params = params
        self.externals = _hexagon_externals()
        self.domains = hexagon_domains(alpha, beta)
        spin, n = float(params.spin_complement()), params.fugacity
        self._transfers = []
        for domain in self.domains:
            diagrams = partition_by_diagram(domain, WeightTable.from_params(domain, params)).values
            self._transfers.append({
                d: np.array([transfer(domain, d, ext, spin, n) for ext in self.externals])
                for d in diagrams
            })

    def differences(self, by_role):
        totals = []
        for domain, transfers in zip(self.domains, self._transfers):
            table = WeightTable.from_roles(domain, by_role, self.params.fugacity,
                                           float(self.params.spin_complement()), DILUTE)
            partition = partition_by_diagram(domain, table)
            total = np.zeros(len(self.externals), dtype=complex)
            for diagram, value in partition.values.items():
                total += value * transfers[diagram]
            totals.append(total)
        return totals[0] - totals[1]


@dataclass
class DifferenceFit:
    externals: tuple
    coefficients: np.ndarray
    residual: float
    samples: int

    def coefficients_for(self, index):
        return self.coefficients[:, index]


def random_weights(rng, angle, n):
    """A positive dilute weight record with independent uniform entries"""
    values = rng.uniform(0.2, 1.2, size=6)
    return DiluteWeights(angle, *values, n)


def fit_differences(alpha, beta, params, samples=MIN_FIT_SAMPLES, seed=0):
    """
    Least-squares fit of the 21 differences onto the 19 YB values over
    random positive weights; the residual is relative to the largest
    difference seen.
    """
    if samples < MIN_FIT_SAMPLES:
        raise InvalidArgument(f"at least {MIN_FIT_SAMPLES} samples are needed, got {samples}")
    rng = np.random.default_rng(seed)
    transfer_table = HexagonTransfer(alpha, beta, params)
    angles = (alpha, beta, 2 * math.pi - alpha - beta)
    n = params.fugacity
    design, targets = [], []
    for _ in range(samples):
        records = [random_weights(rng, angle, n) for angle in angles]
        design.append(yb_vector(records, n))
        targets.append(transfer_table.differences(dict(zip(ROLES, records))))
    design = np.array(design, dtype=complex)
    targets = np.array(targets)
    coefficients, *_ = np.linalg.lstsq(design, targets, rcond=None)
    residual = float(np.max(np.abs(design @ coefficients - targets))
                     / max(1.0, float(np.max(np.abs(targets)))))
    logger.info(f"Fitted {targets.shape[1]} differences on {samples} samples, residual {residual:.2e}")
    return DifferenceFit(tuple(transfer_table.externals), coefficients, residual, samples)


def identify_relations(fit, system):
    """
    Best matching grouping for each of the six relations by cosine
    similarity of coefficient vectors, the conjugate vector included.
    """
    matches = []
    for name in RELATIONS:
        row = system.row(name)
        best = None
        for k, external in enumerate(fit.externals):
            column = fit.coefficients_for(k)
            norm = np.linalg.norm(row) * np.linalg.norm(column)
            if norm == 0:
                continue
            for conjugate in (False, True):
                other = np.conj(column) if conjugate else column
                similarity = float(abs(np.vdot(row, other)) / norm)
                if best is None or similarity > best['similarity'] + 1e-12:
                    best = {'relation': name, 'diagram': external.matching.encode(),
                            'similarity': similarity, 'conjugate': conjugate}
        matches.append(best)
    return matches


# ============= RANDOM DRAWS =============

def sample_parameters(rng, margin=0.2):
    """Admissible (alpha, beta, eta) with gamma = 2 pi - alpha - beta inside (margin, pi - margin)"""
    while True:
        alpha, beta = rng.uniform(margin, math.pi - margin, size=2)
        gamma = 2 * math.pi - alpha - beta
        if margin < gamma < math.pi - margin:
            break
    eta = rng.uniform(0.05, math.pi / 4 - 0.05)
    return float(alpha), float(beta), float(eta)


def draw_point(rng, alpha=None, beta=None, eta=None, attempts=1000):
    """
    One (alpha, beta, eta) draw. Fixed values override sampled ones; the
    derived gamma must stay inside (0, pi) away from the singular angles.
    """
    for name, value in (('alpha', alpha), ('beta', beta)):
        if value is not None and not FIXED_ANGLE_MARGIN < value < math.pi - FIXED_ANGLE_MARGIN:
            raise InvalidArgument(f"{name} must lie in (0, pi), got {value}")
    for _ in range(attempts):
        a, b, e = sample_parameters(rng)
        a = a if alpha is None else alpha
        b = b if beta is None else beta
        gamma = 2 * math.pi - a - b
        if FIXED_ANGLE_MARGIN < gamma < math.pi - FIXED_ANGLE_MARGIN:
            return a, b, e if eta is None else eta
        if alpha is not None and beta is not None:
            break
    raise InvalidArgument(
        f"gamma = 2 pi - alpha - beta must lie in (0, pi); no admissible draw with "
        f"alpha={alpha}, beta={beta}"
    )


def _run_draw(args):
    index, alpha, beta, eta = args
    params = DiluteParams(eta)
    n, sigma = params.fugacity, params.sigma
    report = ResidualReport()
    inputs = dict(draw=index, alpha=alpha, beta=beta, eta=eta)
    gamma = 2 * math.pi - alpha - beta
    system = appendix_system(alpha, beta, n, sigma)
    records = [dilute_weights(angle, params) for angle in (alpha, beta, gamma)]
    row_residual = float(np.max(np.abs(system.residuals(yb_vector(records, n)))))
    report.record('appendix.rows.standard', row_residual, ROW_TOLERANCE, **inputs)
    try:
        elimination_chain(alpha, beta, n, sigma, report, check_nullspace=False)
    except DegenerateParameters as e:
        logger.warning(f"Draw {index}: {str(e)}")
        return index, report, {'draw': index, 'alpha': alpha, 'beta': beta, 'eta': eta,
                               'factor': e.factor, 'value': abs(e.value)}, row_residual, False
    return index, report, None, row_residual, system.has_trivial_nullspace()


def run_draws(draws, seed, alpha=None, beta=None, eta=None, workers=1):
    """
    Elimination-chain statistics over seeded random parameter draws.
    Fixed alpha, beta or eta override the sampled values.

    Returns (report, summary) with summary keys draws, trivial_nullspace,
    degenerate and max_row_residual.
    """
    if draws < 1:
        raise InvalidArgument(f"draws must be at least 1, got {draws}")
    rng = np.random.default_rng(seed)
    jobs = []
    for index in range(draws):
        jobs.append((index, *draw_point(rng, alpha, beta, eta)))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_draw, jobs))
    else:
        results = [_run_draw(job) for job in jobs]

    report = ResidualReport(seed=seed)
    trivial, degenerate, row_residual = 0, [], 0.0
    for index, draw_report, degeneracy, residual, trivial_nullspace in sorted(results, key=lambda r: r[0]):
        row_residual = max(row_residual, residual)
        report.merge(draw_report)
        if degeneracy is not None:
            degenerate.append(degeneracy)
            continue
        trivial += int(trivial_nullspace)
    summary = {
        'draws': draws,
        'trivial_nullspace': trivial,
        'degenerate': degenerate,
        'max_row_residual': row_residual,
    }
    logger.info(f"Appendix: {trivial}/{draws} draws with trivial null space, "
                f"{len(degenerate)} degenerate")
    return report, summary
