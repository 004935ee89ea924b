import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enumeration import DENSE, DILUTE, WeightTable
from errors import InvalidArgument
from geometry import make_domain_pair
from observable import (
    HEXAGON_DIAGRAMS, contour_sum, contour_sums, decomposition_check, dense_star_triangle_differences,
    dense_star_triangle_prefactors, ghost_pair_residual, hexagon_domains, hexagon_yb,
    hexagon_yb_direct, hexagon_yb_direct_closed_form, named_external, psi,
    single_rhombus_contour_sums, two_rhombus_closed_form, two_rhombus_enumerated,
    two_rhombus_residual,
)
from strategies import angle_triples, angles, dense_records, lambdas
from weights import DenseParams, DiluteParams, dense_weights

TOL = 1e-10


def random_roles(data, triple, n):
    return {role: data.draw(dense_records(angle, n)) for role, angle in zip(('alpha', 'beta', 'gamma'), triple)}


@pytest.mark.parametrize('ell', [0, 1])
@given(alpha=angles, lam=lambdas)
def test_dense_single_rhombus_sums_vanish(ell, alpha, lam):
    sums = single_rhombus_contour_sums(alpha, DenseParams(lam, ell))
    assert len(sums) == 2
    assert max(abs(s) for s in sums) < TOL


@pytest.mark.parametrize('eta', [0.1, 0.4, 0.7])
@pytest.mark.parametrize('alpha', [0.4, 1.6, 2.8])
def test_dilute_single_rhombus_sums_vanish(eta, alpha):
    sums = single_rhombus_contour_sums(alpha, DiluteParams(eta))
    assert len(sums) == 4
    assert max(abs(s) for s in sums) < TOL


def test_perturbed_single_rhombus_sum_is_visible():
    sums = single_rhombus_contour_sums(1.2, DenseParams(0.9), perturb={'b': 1.05})
    assert max(abs(s) for s in sums) > 1e-4


@given(angle_triples(), lambdas, st.data())
@settings(max_examples=30, deadline=None)
def test_pair_closed_form_matches_enumeration(triple, lam, data):
    params = DenseParams(lam)
    weights = random_roles(data, triple, params.fugacity)
    alpha, beta, _ = triple
    closed = two_rhombus_closed_form(alpha, beta, params, weights)
    assert two_rhombus_enumerated(alpha, beta, params, weights) == pytest.approx(closed, abs=1e-11)
    assert two_rhombus_residual(alpha, beta, params, weights) == closed


@given(angle_triples(), lambdas)
@settings(max_examples=30, deadline=None)
def test_pair_identity_on_family(triple, lam):
    assert abs(two_rhombus_residual(triple[0], triple[1], DenseParams(lam))) < TOL


@given(angles, lambdas)
def test_ghost_pair(alpha, lam):
    assert abs(ghost_pair_residual(alpha, DenseParams(lam))) < 1e-12


@given(angle_triples(), lambdas, st.data())
@settings(max_examples=25, deadline=None)
def test_hexagon_direct_sum_matches_closed_form(triple, lam, data):
    params = DenseParams(lam)
    weights = random_roles(data, triple, params.fugacity)
    alpha, beta, _ = triple
    direct = hexagon_yb_direct(alpha, beta, params, weights)
    assert direct == pytest.approx(hexagon_yb_direct_closed_form(alpha, beta, params, weights), abs=1e-10)


@given(angle_triples(), lambdas, st.data())
@settings(max_examples=25, deadline=None)
def test_star_triangle_differences_are_multiples_of_yb(triple, lam, data):
    params = DenseParams(lam)
    weights = random_roles(data, triple, params.fugacity)
    alpha, beta, _ = triple
    yb = hexagon_yb(alpha, beta, params, weights)
    differences = dense_star_triangle_differences(alpha, beta, params, weights)
    prefactors = dense_star_triangle_prefactors(alpha, beta, params)
    for difference, prefactor in zip(differences, prefactors):
        assert difference == pytest.approx(prefactor * yb, abs=1e-10)


def test_star_triangle_differences_vanish_on_family():
    differences = dense_star_triangle_differences(2.0, 2.2, DenseParams(0.9))
    assert max(abs(d) for d in differences) < TOL


@pytest.mark.parametrize('lam', [0.3, 0.9, 1.4])
def test_every_hexagon_contour_sum_vanishes(lam):
    star, triangle = hexagon_domains(2.0, 2.2)
    params = DenseParams(lam)
    for domain in (star, triangle):
        sums = contour_sums(domain, params, entry=0, normalized=True)
        assert len(sums) == 5
        assert max(abs(s.value) for s in sums) < TOL


def test_boundary_decomposition():
    star, _ = hexagon_domains(2.0, 2.2)
    table = WeightTable.from_params(star, DenseParams(0.7), {'a': 1.3})
    for name in HEXAGON_DIAGRAMS:
        assert decomposition_check(star, table, named_external(name)) < 1e-12


def test_mirror_conjugates_pair_sums():
    params = DenseParams(0.8)
    pair = make_domain_pair(1.2, 2.5)
    mirrored = pair.mirror()
    table = WeightTable.from_params(pair, params, {'a': 1.2})
    mirrored_table = WeightTable.from_params(mirrored, params, {'a': 1.2})
    for item in contour_sums(pair, table, normalized=True):
        image = item.external.relabel(lambda p: (-p) % 6)
        value = contour_sum(mirrored, mirrored_table, image, normalized=True)
        assert value == pytest.approx(item.value.conjugate(), abs=1e-12)


def test_psi_at_the_entry():
    star, _ = hexagon_domains(2.0, 2.2)
    params = DenseParams(0.9)
    values = psi(star, params, named_external('I'))
    assert star.anchor in values


def test_named_externals():
    assert named_external('V').encode() == '0|(0-3)(1-2)(4-5)'
    assert named_external('(0-1)(2-3)').point_count == 4
    assert named_external('u:0,1,2,3', model=DILUTE).model == DILUTE
    assert named_external('I').model == DENSE


def test_inadmissible_hexagon():
    with pytest.raises(InvalidArgument):
        hexagon_domains(0.5, 0.5)


def test_role_records_are_used():
    params = DenseParams(0.9)
    on_family = {role: dense_weights(a, params)
                 for role, a in zip(('alpha', 'beta', 'gamma'), (2.0, 2.2, 2 * math.pi - 4.2))}
    assert hexagon_yb(2.0, 2.2, params, on_family) == pytest.approx(hexagon_yb(2.0, 2.2, params), abs=1e-14)
