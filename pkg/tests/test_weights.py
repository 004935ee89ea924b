import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import InvalidArgument
from numerics import HighPrecision
from strategies import angle_triples, angles, dilute_records, etas, lambdas
from weights import (
    DenseParams, DiluteParams, apply_perturbation, check_angle_sum, criticality_residual,
    dense_determinant, dense_determinant_factorized, dense_inversion_residual,
    dense_single_rhombus_residuals, dense_weights, dense_yb_residual,
    dilute_holomorphicity_system, dilute_single_rhombus_residuals, dilute_weights,
    dilute_yb, dilute_yb_permutations, dilute_yb_residuals, numerical_rank, phi, spin_consistency,
)

ALPHAS = [0.1 * k for k in range(1, 31)]


def test_parameter_ranges():
    with pytest.raises(InvalidArgument):
        DenseParams(2.0)
    with pytest.raises(InvalidArgument):
        DenseParams(0.5, ell=0.5)
    with pytest.raises(InvalidArgument):
        DiluteParams(0.9)
    with pytest.raises(InvalidArgument):
        DiluteParams(0.3, ell=1)


def test_dense_fugacity_and_spin():
    params = DenseParams(math.pi / 3)
    assert params.fugacity == pytest.approx(1.0)
    assert params.sigma == pytest.approx(1 - 2 / 3)


def test_phi_basics():
    assert phi(0.0, 0.3) == pytest.approx(1.0)
    assert phi(2.0, 1.0) == pytest.approx(1.0)
    assert abs(phi(1.3, 0.2)) == pytest.approx(1.0)


@pytest.mark.parametrize('ell', [0, 1])
@pytest.mark.parametrize('lam', [0.1, 0.5, 0.9, 1.3, 1.5])
def test_dense_single_rhombus_relations_vanish(lam, ell):
    params = DenseParams(lam, ell)
    worst = max(abs(r) for alpha in ALPHAS for r in dense_single_rhombus_residuals(alpha, params))
    assert worst < 1e-12


def test_dense_single_rhombus_negative_control():
    params = DenseParams(0.9)
    weights = apply_perturbation(dense_weights(1.2, params), {'a': 1.01})
    residuals = dense_single_rhombus_residuals(1.2, params, weights)
    assert max(abs(r) for r in residuals) > 1e-4


def test_high_precision_residuals():
    backend = HighPrecision(50)
    residuals = dense_single_rhombus_residuals(1.1, DenseParams(0.8), backend=backend)
    assert max(abs(r) for r in residuals) < 1e-30


@given(lambdas, st.sampled_from([0, 1]))
def test_dense_spin_identity(lam, ell):
    assert spin_consistency(DenseParams(lam, ell)) < 1e-12


@given(etas)
def test_dilute_spin_identity(eta):
    assert spin_consistency(DiluteParams(eta)) < 1e-13


@given(angles, lambdas)
def test_determinant_vanishes_on_family(alpha, lam):
    assert abs(dense_determinant(alpha, DenseParams(lam))) < 1e-12


def test_determinant_with_shifted_spin():
    assert abs(dense_determinant(1.0, DenseParams(0.9, sigma_shift=0.1))) > 1e-3


@given(angles, lambdas, st.floats(min_value=-0.5, max_value=0.5))
def test_determinant_factorization(alpha, lam, shift):
    params = DenseParams(lam, sigma_shift=shift)
    assert abs(dense_determinant(alpha, params) - dense_determinant_factorized(alpha, params)) < 1e-12


@given(angle_triples(), lambdas, st.sampled_from([0, 1]))
@settings(max_examples=200)
def test_dense_yang_baxter(triple, lam, ell):
    assert abs(dense_yb_residual(*triple, DenseParams(lam, ell))) < 1e-12


@given(angles, lambdas, st.sampled_from([0, 1]))
def test_dense_inversion(alpha, lam, ell):
    assert abs(dense_inversion_residual(alpha, DenseParams(lam, ell))) < 1e-12


@pytest.mark.parametrize('alpha', [0.3, 1.0, 2.4])
def test_criticality(alpha):
    assert abs(criticality_residual(alpha, DenseParams(0.7))) < 1e-12


def test_angle_sum_checked():
    with pytest.raises(InvalidArgument):
        check_angle_sum(1.0, 1.0, 1.0)


def test_unknown_perturbation_label():
    with pytest.raises(InvalidArgument):
        apply_perturbation(dense_weights(1.0, DenseParams(0.5)), {'t': 1.1})


@pytest.mark.parametrize('eta', [0.05, 0.3, 0.55, 0.75])
def test_dilute_single_rhombus_relations_vanish(eta):
    params = DiluteParams(eta)
    worst = max(abs(r) for alpha in ALPHAS for r in dilute_single_rhombus_residuals(alpha, params))
    assert worst < 1e-12


@pytest.mark.parametrize('eta', [0.2, 0.4, 0.6])
@pytest.mark.parametrize('alpha', [0.5, 1.5, 2.5])
def test_dilute_system_rank_and_null_vector(eta, alpha):
    params = DiluteParams(eta)
    system = dilute_holomorphicity_system(alpha, params)
    assert system.shape == (8, 6)
    assert numerical_rank(system) == 5

    w = dilute_weights(alpha, params)
    vector = np.array([w.t, w.u1, w.u2, w.v, w.a, w.b])
    assert np.max(np.abs(system @ vector)) < 1e-12


@given(angle_triples(), etas)
@settings(max_examples=100)
def test_dilute_yang_baxter_all_permutations(triple, eta):
    values = dilute_yb_permutations(*triple, DiluteParams(eta))
    assert len(values) == 36
    assert max(abs(v) for v in values.values()) < 1e-12


@pytest.mark.parametrize('angles, eta', [
    ((2 * math.pi / 3,) * 3, 0.55),
    ((1.9, 2.3, 2 * math.pi - 4.2), 0.3),
])
def test_dilute_yb_residuals(angles, eta):
    values = dilute_yb_residuals(*angles, DiluteParams(eta))
    assert len(values) == 6
    assert max(abs(v) for v in values) < 1e-12


def test_dilute_yb_needs_closed_angles():
    with pytest.raises(InvalidArgument):
        dilute_yb_residuals(1.0, 1.0, 1.0, DiluteParams(0.3))


@given(st.data())
@settings(max_examples=50)
def test_yb2_antisymmetry(data):
    n = 0.7
    x = data.draw(dilute_records(1.2, n))
    z = data.draw(dilute_records(2 * math.pi - 2.4, n))
    assert dilute_yb(2, x, x, z, n) == pytest.approx(-dilute_yb(2, z, x, x, n), abs=1e-12)


def test_criticality_examples():
    assert abs(criticality_residual(0.4, DenseParams(1.0))) < 1e-12
    assert abs(criticality_residual(0.4, DenseParams(1.0, ell=2))) < 1e-12
    assert criticality_residual(math.pi / 2, DenseParams(1.0)) == pytest.approx(0.0, abs=1e-13)
