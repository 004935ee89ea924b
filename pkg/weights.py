"""
Model parameters, integrable weight families and closed-form residuals.

Dense (Temperley-Lieb / Potts) plaquettes carry two weights ``a`` and ``b``;
dilute O(n) plaquettes carry ``t, u1, u2, v, a, b``. Every residual here is
a closed-form expression that vanishes on the integrable families; the
enumerated counterparts live in ``observable`` and ``appendix``.
"""
from dataclasses import dataclass, fields, replace
import itertools
import logging
import math

import numpy as np

from errors import InvalidArgument, SingularInput
from numerics import DOUBLE

logger = logging.getLogger(__name__)

ANGLE_SUM_TOLERANCE = 1e-9
RANK_TOLERANCE = 1e-8

DENSE_LABELS = ('a', 'b')
DILUTE_LABELS = ('t', 'u1', 'u2', 'v', 'a', 'b')


# ============= PARAMETERS =============

@dataclass(frozen=True)
class DenseParams:
    """Dense loop model: n = 2 cos(lam), 1 - sigma = 2 lam / pi - 2 ell"""
    lam: float
    ell: int = 0
    sigma_shift: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.lam <= math.pi / 2 + 1e-12:
            raise InvalidArgument(f"lambda must lie in [0, pi/2], got {self.lam}")
        if int(self.ell) != self.ell:
            raise InvalidArgument(f"ell must be an integer, got {self.ell}")

    model = 'dense'
    labels = DENSE_LABELS

    def kappa(self, backend=DOUBLE):
        return backend.real(self.lam) / backend.pi - self.ell

    def fugacity_value(self, backend=DOUBLE):
        return 2 * backend.cos(backend.real(self.lam))

    def spin_complement(self, backend=DOUBLE):
        """1 - sigma"""
        return 2 * self.kappa(backend) - backend.real(self.sigma_shift)

    @property
    def fugacity(self):
        return float(self.fugacity_value())

    @property
    def sigma(self):
        return 1.0 - float(self.spin_complement())

    def shifted(self, delta):
        """Same weights, conformal spin moved by ``delta``"""
        return replace(self, sigma_shift=self.sigma_shift + delta)


@dataclass(frozen=True)
class DiluteParams:
    """Dilute O(n) model: n = -2 cos(4 eta), 1 - sigma = 3 eta / pi + ell / 2"""
    eta: float
    ell: int = 0
    sigma_shift: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.eta <= math.pi / 4 + 1e-12:
            raise InvalidArgument(f"eta must lie in [0, pi/4], got {self.eta}")
        if self.ell != 0:
            raise InvalidArgument(
                f"dilute weights are only available for ell = 0, got ell = {self.ell}"
            )

    model = 'dilute'
    labels = DILUTE_LABELS

    def fugacity_value(self, backend=DOUBLE):
        return -2 * backend.cos(4 * backend.real(self.eta))

    def spin_complement(self, backend=DOUBLE):
        eta = backend.real(self.eta)
        return 3 * eta / backend.pi + backend.real(self.ell) / 2 - backend.real(self.sigma_shift)

    @property
    def fugacity(self):
        return float(self.fugacity_value())

    @property
    def sigma(self):
        return 1.0 - float(self.spin_complement())

    def shifted(self, delta):
        return replace(self, sigma_shift=self.sigma_shift + delta)


# ============= WEIGHTS =============

class _Weights:
    """Shared behaviour of the plaquette weight records"""

    def scaled(self, **factors):
        """Copy with the named weights multiplied by the given factors"""
        unknown = set(factors) - set(self.labels)
        if unknown:
            raise InvalidArgument(f"unknown weight label(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: getattr(self, k) * f for k, f in factors.items()})

    def weight(self, label):
        return getattr(self, label)

    def as_dict(self):
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


@dataclass(frozen=True)
class DenseWeights(_Weights):
    alpha: float
    a: float
    b: float
    n: float

    labels = DENSE_LABELS


@dataclass(frozen=True)
class DiluteWeights(_Weights):
    alpha: float
    t: float
    u1: float
    u2: float
    v: float
    a: float
    b: float
    n: float

    labels = DILUTE_LABELS


def _out(backend, value):
    return backend.to_float(value) if backend is DOUBLE else value


def dense_weights(alpha, params, backend=DOUBLE):
    """
    a = (-1)^ell sin(kappa alpha), b = sin(kappa (pi - alpha)), kappa = lam/pi - ell.

    ell = 0 is the standard solution a = sin(u), b = sin(lam - u), u = lam alpha / pi.
    Any real alpha is accepted (negative angles are used for ghost rhombi).
    In high precision the values are mpmath numbers, valid inside the
    backend context of the caller.
    """
    with backend.context():
        x = backend.real(alpha)
        kappa = params.kappa(backend)
        sign = -1 if params.ell % 2 else 1
        a = sign * backend.sin(kappa * x)
        b = backend.sin(kappa * (backend.pi - x))
        n = params.fugacity_value(backend)
        return DenseWeights(alpha, _out(backend, a), _out(backend, b), _out(backend, n))


def dilute_weights(alpha, params, backend=DOUBLE):
    """Standard dilute solution with u = 3 eta alpha / pi"""
    with backend.context():
        x = backend.real(alpha)
        eta = backend.real(params.eta)
        u = 3 * eta * x / backend.pi
        u_bar = 3 * eta * (backend.pi - x) / backend.pi
        sin_u, sin_ubar = backend.sin(u), backend.sin(u_bar)
        sin2, sin3 = backend.sin(2 * eta), backend.sin(3 * eta)
        values = dict(
            t=sin_u * sin_ubar + sin2 * sin3,
            u1=sin_u * sin2,
            u2=sin_ubar * sin2,
            v=sin_u * sin_ubar,
            a=sin_u * backend.sin(u - eta),
            b=sin_ubar * backend.sin(u_bar - eta),
            n=params.fugacity_value(backend),
        )
        return DiluteWeights(alpha, **{k: _out(backend, v) for k, v in values.items()})


def model_weights(alpha, params, backend=DOUBLE):
    if params.model == 'dense':
        return dense_weights(alpha, params, backend)
    return dilute_weights(alpha, params, backend)


def apply_perturbation(weights, perturb):
    """Scale weight labels named in ``perturb``; the ``sigma`` key is ignored here"""
    factors = {k: v for k, v in (perturb or {}).items() if k != 'sigma'}
    return weights.scaled(**factors) if factors else weights


def perturbed_params(params, perturb):
    """Apply the additive ``sigma`` shift of a perturbation dict"""
    delta = (perturb or {}).get('sigma', 0.0)
    return params.shifted(delta) if delta else params


def phi(theta, sigma, backend=DOUBLE):
    """exp(i (1 - sigma) theta)"""
    with backend.context():
        return backend.to_complex(backend.expi((1 - backend.real(sigma)) * backend.real(theta)))


def _phase(params, backend):
    """phi as a closure over the model spin, evaluated inside the backend context"""
    spin = params.spin_complement(backend)
    return lambda theta: backend.expi(spin * theta)


def check_angle_sum(alpha, beta, gamma):
    total = alpha + beta + gamma
    if abs(total - 2 * math.pi) > ANGLE_SUM_TOLERANCE:
        raise InvalidArgument(
            f"angles must satisfy alpha + beta + gamma = 2 pi, got sum {total!r}"
        )


# ============= DENSE RESIDUALS =============

def dense_single_rhombus_residuals(alpha, params, weights=None, backend=DOUBLE):
    """Left-hand sides of the two single-rhombus holomorphicity relations"""
    with backend.context():
        w = weights or dense_weights(alpha, params, backend)
        ph = _phase(params, backend)
        pi = backend.pi
        x = backend.real(alpha)
        first = (w.n * (1 - ph(x - pi)) * w.a
                 + (1 - ph(x - pi) + ph(-pi) - ph(x)) * w.b)
        second = ((1 - ph(x - pi) + ph(pi) - ph(x)) * w.a
                  + w.n * (1 - ph(x)) * w.b)
        return backend.to_complex(first), backend.to_complex(second)


def dense_holomorphicity_matrix(alpha, params):
    """2x2 coefficient matrix of the single-rhombus system in (a, b)"""
    n = params.fugacity
    ph = lambda theta: phi(theta, params.sigma)
    pi = math.pi
    return np.array([
        [n * (1 - ph(alpha - pi)), 1 - ph(alpha - pi) + ph(-pi) - ph(alpha)],
        [1 - ph(alpha - pi) + ph(pi) - ph(alpha), n * (1 - ph(alpha))],
    ], dtype=complex)


def dense_determinant(alpha, params):
    return complex(np.linalg.det(dense_holomorphicity_matrix(alpha, params)))


def dense_determinant_factorized(alpha, params):
    """(1 - phi(a))(1 - phi(a - pi))(n^2 - 2 - phi(pi) - phi(-pi))"""
    sigma, n, pi = params.sigma, params.fugacity, math.pi
    ph = lambda theta: phi(theta, sigma)
    return (1 - ph(alpha)) * (1 - ph(alpha - pi)) * (n * n - 2 - ph(pi) - ph(-pi))


def dense_yb(x, y, z, n):
    """YB(x, y, z) for three weight records x, y, z"""
    return (x.b * y.b * z.a + x.b * y.a * z.b + x.a * y.b * z.b
            + n * x.b * y.b * z.b - x.a * y.a * z.a)


def dense_yb_residual(alpha, beta, gamma, params, weights=None, backend=DOUBLE):
    check_angle_sum(alpha, beta, gamma)
    with backend.context():
        if weights is None:
            weights = [dense_weights(angle, params, backend) for angle in (alpha, beta, gamma)]
        x, y, z = weights
        return backend.to_float(dense_yb(x, y, z, x.n))


def dense_inversion_residual(alpha, params, weights=None, backend=DOUBLE):
    """a_alpha b_-alpha + b_alpha a_-alpha + n a_alpha a_-alpha"""
    with backend.context():
        if weights is None:
            weights = (dense_weights(alpha, params, backend), dense_weights(-alpha, params, backend))
        w, g = weights
        return backend.to_float(w.a * g.b + w.b * g.a + w.n * w.a * g.a)


def criticality_residual(alpha, params, weights=None, backend=DOUBLE):
    """(a_{pi-alpha} / b_{pi-alpha}) (a_alpha / b_alpha) - 1"""
    with backend.context():
        if weights is None:
            weights = (dense_weights(alpha, params, backend),
                       dense_weights(backend.pi - backend.real(alpha), params, backend))
        w, s = weights
        denominator = s.b * w.b
        if abs(denominator) < 1e-300:
            raise SingularInput(f"b(pi - alpha) b(alpha) vanishes at alpha = {alpha}")
        return backend.to_float(s.a * w.a / denominator - 1)


def spin_consistency(params, backend=DOUBLE):
    """
    Dense: |n^2 - 2 - 2 cos((1 - sigma) pi)|.
    Dilute: |3n - n^3 - 2 cos(4 (1 - sigma) pi)|.
    """
    with backend.context():
        n = params.fugacity_value(backend)
        spin = params.spin_complement(backend)
        if params.model == 'dense':
            value = n * n - 2 - 2 * backend.cos(spin * backend.pi)
        else:
            value = 3 * n - n ** 3 - 2 * backend.cos(4 * spin * backend.pi)
        return abs(backend.to_float(value))


# ============= DILUTE RESIDUALS =============

def _dilute_rows(alpha, params, backend):
    """Coefficient rows over (t, u1, u2, v, a, b) of the four dilute relations"""
    ph = _phase(params, backend)
    pi = backend.pi
    x = backend.real(alpha)
    n = params.fugacity_value(backend)
    return [
        [1, -ph(x - pi), -ph(x), -1, 0, 0],
        [0, ph(pi), n, ph(x - 2 * pi), -ph(x), -n * ph(x)],
        [0, ph(x + pi), ph(x - 2 * pi), n, -ph(2 * pi), -ph(-2 * pi)],
        [0, n, ph(-pi), ph(x + pi), -n * ph(x - pi), -ph(x - pi)],
    ]


def dilute_single_rhombus_residuals(alpha, params, weights=None, backend=DOUBLE):
    """The four dilute relations followed by their complex conjugates"""
    with backend.context():
        w = weights or dilute_weights(alpha, params, backend)
        vector = [w.t, w.u1, w.u2, w.v, w.a, w.b]
        rows = _dilute_rows(alpha, params, backend)
        direct = [sum(c * v for c, v in zip(row, vector)) for row in rows]
        conjugate = [sum(backend.conj(c) * v for c, v in zip(row, vector)) for row in rows]
        return [backend.to_complex(r) for r in direct + conjugate]


def dilute_holomorphicity_system(alpha, params):
    """The 8 x 6 real system: real and imaginary parts of the 4 complex rows"""
    rows = np.array(
        [[complex(c) for c in row] for row in _dilute_rows(alpha, params, DOUBLE)],
        dtype=complex,
    )
    return np.vstack([rows.real, rows.imag])


def numerical_rank(matrix, rel_tol=RANK_TOLERANCE):
    """Rank with singular values below rel_tol * largest treated as zero"""
    singular = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.sum(singular > rel_tol * singular[0]))


def dilute_yb(index, x, y, z, n):
    """YB_index(x, y, z) for index 1..6 and weight records x, y, z"""
    if index == 1:
        return (x.u2 * y.u2 * z.a + n * x.u2 * y.u2 * z.b + x.t * y.t * z.u2
                - x.u1 * y.u1 * z.t - x.v * y.v * z.u2)
    if index == 2:
        return x.t * y.u1 * z.v + x.u2 * y.v * z.u1 - z.t * y.u1 * x.v - x.u1 * y.v * z.u2
    if index == 3:
        return (x.u2 * y.b * z.a + x.u2 * y.a * z.b + n * x.u2 * y.b * z.b
                + x.t * y.u2 * z.u2 - x.a * y.u1 * z.u1)
    if index == 4:
        return x.v * y.u1 * z.b + x.u1 * y.v * z.u2 - x.a * y.u1 * z.v
    if index == 5:
        return x.u1 * y.b * z.u1 + x.v * y.u2 * z.v - x.a * y.u2 * z.a
    if index == 6:
        return (x.b * y.b * z.a + x.b * y.a * z.b + x.a * y.b * z.b
                + n * x.b * y.b * z.b + x.u2 * y.u2 * z.u2 - x.a * y.a * z.a)
    raise InvalidArgument(f"YB index must be 1..6, got {index}")


def dilute_yb_residuals(alpha, beta, gamma, params, weights=None, backend=DOUBLE):
    """YB_1 .. YB_6 at (alpha, beta, gamma)"""
    check_angle_sum(alpha, beta, gamma)
    with backend.context():
        if weights is None:
            weights = [dilute_weights(angle, params, backend) for angle in (alpha, beta, gamma)]
        x, y, z = weights
        return [backend.to_float(dilute_yb(i, x, y, z, x.n)) for i in range(1, 7)]


def dilute_yb_permutations(alpha, beta, gamma, params, backend=DOUBLE):
    """{(index, permutation): YB_index at the permuted angles} over all 36 pairs"""
    check_angle_sum(alpha, beta, gamma)
    angles = (alpha, beta, gamma)
    result = {}
    with backend.context():
        records = [dilute_weights(angle, params, backend) for angle in angles]
        for perm in itertools.permutations(range(3)):
            x, y, z = (records[k] for k in perm)
            for index in range(1, 7):
                result[(index, perm)] = backend.to_float(dilute_yb(index, x, y, z, x.n))
    return result
