import cmath
import math

import pytest
from hypothesis import given, settings

from errors import EmbeddingInvalid, InvalidArgument
from geometry import (
    STAR, TRIANGLE, RhombicDomain, Rhombus, attach_rhombus, find_hexagons, hub_vectors,
    make_domain_hexagon, make_domain_pair, make_domain_single, make_rhombus,
    star_triangle_move, trace_train_tracks,
)
from strategies import angle_triples, angles
from utils import snap


@given(angles)
def test_rhombus_opening_angle(alpha):
    rhombus = make_rhombus(0, 0j, 1 + 0j, cmath.exp(1j * alpha))
    assert rhombus.opening_angle == pytest.approx(alpha)
    assert rhombus.corner_angle(1) == pytest.approx(math.pi - alpha)
    assert rhombus.area == pytest.approx(math.sin(alpha))


def test_rhombus_needs_unit_sides():
    with pytest.raises(EmbeddingInvalid):
        Rhombus(0, (0, 2, 2 + 1j, 1j))


def test_rhombus_needs_anticlockwise_vertices():
    with pytest.raises(EmbeddingInvalid):
        Rhombus(0, (0, 1j, 1 + 1j, 1))


def test_single_domain_boundary():
    domain = make_domain_single(1.0)
    assert domain.boundary_count == 4
    assert domain.anchor == pytest.approx(0.5)
    assert [s.side for s in domain.boundary] == [0, 1, 2, 3]


def test_pair_and_hexagon_boundaries():
    assert make_domain_pair(2.0, 2.2).boundary_count == 6
    gamma = 2 * math.pi - 4.2
    assert make_domain_hexagon(2.0, 2.2, gamma, STAR).boundary_count == 6
    assert make_domain_hexagon(2.0, 2.2, gamma, TRIANGLE).boundary_count == 6


@given(angle_triples())
@settings(max_examples=50)
def test_star_and_triangle_share_boundary(triple):
    star = make_domain_hexagon(*triple, STAR)
    triangle = make_domain_hexagon(*triple, TRIANGLE)
    assert star.same_boundary(triangle)
    assert sum(star.exterior_turns) == pytest.approx(2 * math.pi)


@given(angle_triples())
@settings(max_examples=50)
def test_star_triangle_move_is_an_involution(triple):
    star = make_domain_hexagon(*triple, STAR)
    triangle = make_domain_hexagon(*triple, TRIANGLE)
    moved = star_triangle_move(star, (0, 1, 2))
    assert moved == triangle
    assert star_triangle_move(moved, (0, 1, 2)) == star


def test_hexagon_discovery():
    gamma = 2 * math.pi - 4.2
    star = make_domain_hexagon(2.0, 2.2, gamma, STAR)
    sites = find_hexagons(star)
    assert len(sites) == 1
    assert sites[0].rhombi == (0, 1, 2)
    assert abs(sites[0].hub) < 1e-12
    assert find_hexagons(make_domain_pair(2.0, 2.2)) == []


def test_move_needs_a_hexagon():
    with pytest.raises(InvalidArgument):
        star_triangle_move(make_domain_pair(2.0, 2.2), (0, 1))


def test_hub_vectors():
    d1, d2, d3 = hub_vectors(1.0, 2.0)
    assert d1 == 1
    assert d2 == pytest.approx(cmath.exp(-1j))
    assert d3 == pytest.approx(cmath.exp(-3j))


def test_hexagon_angles_must_close():
    with pytest.raises(InvalidArgument):
        make_domain_hexagon(1.0, 1.0, 1.0)


def test_attached_rhombus_keeps_the_hexagon():
    star = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2)
    extended = attach_rhombus(star, 0, 1.3)
    assert len(extended.rhombi) == 4
    assert extended.boundary_count == 8
    assert [s.rhombi for s in find_hexagons(extended)] == [(0, 1, 2)]
    moved = star_triangle_move(extended, (0, 1, 2))
    assert moved.same_boundary(extended)


def test_train_tracks_of_a_hexagon():
    star = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2)
    tracks = trace_train_tracks(star)
    assert len(tracks) == 3
    assert sum(len(t.member_sides) for t in tracks) == 12


def test_overlapping_rhombi_rejected():
    r = make_rhombus(0, 0j, 1 + 0j, 1j)
    with pytest.raises(EmbeddingInvalid):
        RhombicDomain([r, Rhombus(1, r.vertices)])


def test_disconnected_domain_rejected():
    first = make_rhombus(0, 0j, 1 + 0j, 1j)
    second = make_rhombus(1, 5 + 0j, 1 + 0j, 1j)
    with pytest.raises(EmbeddingInvalid):
        RhombicDomain([first, second])


def test_anchor_must_be_on_the_boundary():
    with pytest.raises(InvalidArgument):
        RhombicDomain([make_rhombus(0, 0j, 1 + 0j, 1j)], anchor=10 + 0j)


def test_mirror_keeps_angles():
    pair = make_domain_pair(1.2, 2.5)
    mirrored = pair.mirror()
    assert mirrored.boundary_count == pair.boundary_count
    assert sorted(r.opening_angle for r in mirrored.rhombi) == \
        pytest.approx(sorted(r.opening_angle for r in pair.rhombi))
    assert mirrored.anchor == pytest.approx(pair.anchor.conjugate())


def test_attaching_onto_the_anchor_side_moves_the_anchor():
    star = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2)
    extended = attach_rhombus(star, 0, 1.3)
    added = extended.rhombus(max(r.id for r in extended.rhombi))
    assert extended.anchor == pytest.approx(added.midpoint(2))
    assert snap(star.anchor) not in {snap(s.midpoint) for s in extended.boundary}

    moved = star_triangle_move(extended, (0, 1, 2))
    assert moved.anchor == pytest.approx(extended.anchor)


def test_attaching_elsewhere_keeps_the_anchor():
    star = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2)
    extended = attach_rhombus(star, 2, 1.3)
    assert extended.anchor == pytest.approx(star.anchor)
