"""
Rhombic embeddings of simply connected Baxter-lattice patches.

A rhombus stores its four vertices anticlockwise with the tagged corner
first: v1 = v0 + u, v3 = v0 + w, v2 = v0 + u + w, and the opening angle is
arg(w / u) in (0, pi). Side k joins v_k to v_{k+1}. A domain glues rhombi
along coincident sides and orders its unshared sides anticlockwise,
starting from an anchor side that survives local moves.
"""
from dataclasses import dataclass
from functools import cached_property
import cmath
import logging
import math

import networkx as nx

from errors import EmbeddingInvalid, InvalidArgument
from utils import principal_arg, snap
from weights import check_angle_sum

logger = logging.getLogger(__name__)

GEOMETRY_TOLERANCE = 1e-9

STAR = 'star'
TRIANGLE = 'triangle'
ARRANGEMENTS = (STAR, TRIANGLE)


@dataclass(frozen=True)
class Rhombus:
    id: int
    vertices: tuple
    role: str = ''

    def __post_init__(self):
        vertices = tuple(complex(v) for v in self.vertices)
        if len(vertices) != 4:
            raise EmbeddingInvalid(f"rhombus {self.id} needs 4 vertices, got {len(vertices)}")
        object.__setattr__(self, 'vertices', vertices)
        for k in range(4):
            if abs(abs(self.delta(k)) - 1.0) > GEOMETRY_TOLERANCE:
                raise EmbeddingInvalid(f"rhombus {self.id}: side {k} is not of unit length")
        if abs(self.delta(0) + self.delta(2)) > GEOMETRY_TOLERANCE or \
                abs(self.delta(1) + self.delta(3)) > GEOMETRY_TOLERANCE:
            raise EmbeddingInvalid(f"rhombus {self.id}: opposite sides are not parallel")
        angle = self.opening_angle
        if not GEOMETRY_TOLERANCE < angle < math.pi - GEOMETRY_TOLERANCE:
            raise EmbeddingInvalid(
                f"rhombus {self.id}: vertices are not anticlockwise around a convex rhombus"
            )

    @cached_property
    def opening_angle(self):
        """Interior angle at the tagged corner"""
        v0, v1, _, v3 = self.vertices
        return principal_arg((v3 - v0) / (v1 - v0))

    def delta(self, k):
        return self.vertices[(k + 1) % 4] - self.vertices[k % 4]

    def midpoint(self, k):
        return (self.vertices[k % 4] + self.vertices[(k + 1) % 4]) / 2

    def corner_angle(self, k):
        """Interior angle at vertex k (tagged corner and its opposite carry the opening angle)"""
        return self.opening_angle if k % 2 == 0 else math.pi - self.opening_angle

    @property
    def area(self):
        return math.sin(self.opening_angle)

    def mapped(self, transform, rhombus_id=None):
        """Rhombus with every vertex sent through ``transform`` (must preserve orientation)"""
        return Rhombus(self.id if rhombus_id is None else rhombus_id,
                       tuple(transform(v) for v in self.vertices), self.role)


def make_rhombus(rhombus_id, tag, u, w, role=''):
    """Rhombus tagged at ``tag`` with unit edge vectors u, w and opening angle arg(w/u)"""
    return Rhombus(rhombus_id, (tag, tag + u, tag + u + w, tag + w), role)


@dataclass(frozen=True)
class BoundarySide:
    index: int
    rhombus: int
    side: int
    midpoint: complex
    delta_z: complex
    start: complex
    end: complex


@dataclass(frozen=True)
class Transversal:
    direction: complex
    member_sides: tuple


class RhombicDomain:
    """
    A simply connected union of unit rhombi.

    Built once and treated as immutable. ``adjacency`` maps (rhombus, side)
    to the neighbouring (rhombus, side); ``boundary`` lists the unshared
    sides anticlockwise with their midpoints and delta_z = end - start.
    """

    def __init__(self, rhombi, anchor=None, name=''):
        self.rhombi = tuple(rhombi)
        self.name = name
        if not self.rhombi:
            raise EmbeddingInvalid("a domain needs at least one rhombus")
        self._by_id = {r.id: r for r in self.rhombi}
        if len(self._by_id) != len(self.rhombi):
            raise EmbeddingInvalid("rhombus ids must be unique")

        self.adjacency = self._match_sides()
        self._check_connected()
        self.boundary = self._order_boundary(anchor)
        self._check_topology()
        self._boundary_lookup = {(s.rhombus, s.side): s.index for s in self.boundary}
        self._midpoint_lookup = {snap(s.midpoint): s.index for s in self.boundary}
        logger.debug(f"Domain {name or '?'}: {len(self.rhombi)} rhombi, "
                     f"{len(self.boundary)} boundary sides")

    # ---- construction checks ----

    def _match_sides(self):
        by_midpoint = {}
        for r in self.rhombi:
            for k in range(4):
                by_midpoint.setdefault(snap(r.midpoint(k)), []).append((r.id, k))
        adjacency = {}
        for key, owners in by_midpoint.items():
            if len(owners) > 2:
                raise EmbeddingInvalid(f"{len(owners)} rhombi share the side at {owners}")
            if len(owners) == 2:
                (r1, s1), (r2, s2) = owners
                a, b = self._by_id[r1], self._by_id[r2]
                if abs(a.vertices[s1] - b.vertices[(s2 + 1) % 4]) > GEOMETRY_TOLERANCE or \
                        abs(a.vertices[(s1 + 1) % 4] - b.vertices[s2]) > GEOMETRY_TOLERANCE:
                    raise EmbeddingInvalid(
                        f"rhombi {r1} and {r2} overlap along a side without sharing it"
                    )
                adjacency[(r1, s1)] = (r2, s2)
                adjacency[(r2, s2)] = (r1, s1)
        return adjacency

    def _check_connected(self):
        graph = nx.Graph()
        graph.add_nodes_from(self._by_id)
        graph.add_edges_from((a[0], b[0]) for a, b in self.adjacency.items())
        if not nx.is_connected(graph):
            raise EmbeddingInvalid("domain is not edge-connected")

    def _order_boundary(self, anchor):
        outgoing = {}
        first = None
        for r in self.rhombi:
            for k in range(4):
                if (r.id, k) in self.adjacency:
                    continue
                key = snap(r.vertices[k])
                if key in outgoing:
                    raise EmbeddingInvalid("boundary touches itself at a vertex")
                outgoing[key] = (r.id, k)
                if first is None:
                    first = (r.id, k)

        if anchor is not None:
            matches = [rk for rk in outgoing.values()
                       if snap(self._by_id[rk[0]].midpoint(rk[1])) == snap(anchor)]
            if not matches:
                raise InvalidArgument(f"anchor {anchor} is not a boundary midpoint")
            first = matches[0]

        ordered = []
        current = first
        while True:
            r = self._by_id[current[0]]
            k = current[1]
            ordered.append(BoundarySide(len(ordered), r.id, k, r.midpoint(k), r.delta(k),
                                        r.vertices[k], r.vertices[(k + 1) % 4]))
            current = outgoing.get(snap(r.vertices[(k + 1) % 4]))
            if current is None:
                raise EmbeddingInvalid("boundary is not a closed curve")
            if current == first:
                break
            if len(ordered) > len(outgoing):
                raise EmbeddingInvalid("boundary does not close up")
        if len(ordered) != len(outgoing):
            raise EmbeddingInvalid("boundary has more than one component (domain has holes)")
        return tuple(ordered)

    def _check_topology(self):
        vertices = {snap(v) for r in self.rhombi for v in r.vertices}
        sides = len(self.boundary) + len(self.adjacency) // 2
        if len(vertices) - sides + len(self.rhombi) != 1:
            raise EmbeddingInvalid("domain is not simply connected (Euler characteristic)")
        closure = sum(s.delta_z for s in self.boundary)
        if abs(closure) > GEOMETRY_TOLERANCE:
            raise EmbeddingInvalid(f"boundary does not close: sum of delta_z = {closure}")
        polygon = [s.start for s in self.boundary]
        area = 0.5 * sum((p.conjugate() * q).imag for p, q in zip(polygon, polygon[1:] + polygon[:1]))
        if abs(area - sum(r.area for r in self.rhombi)) > 1e-7:
            raise EmbeddingInvalid("rhombi overlap: tiled area differs from the boundary area")

    # ---- queries ----

    def rhombus(self, rhombus_id):
        return self._by_id[rhombus_id]

    @property
    def boundary_count(self):
        return len(self.boundary)

    @property
    def anchor(self):
        return self.boundary[0].midpoint

    def neighbor(self, rhombus_id, side):
        return self.adjacency.get((rhombus_id, side))

    def boundary_index(self, rhombus_id, side):
        return self._boundary_lookup.get((rhombus_id, side))

    def boundary_index_at(self, midpoint):
        return self._midpoint_lookup.get(snap(midpoint))

    @cached_property
    def exterior_turns(self):
        """Turn of the anticlockwise boundary at the vertex after each side"""
        m = len(self.boundary)
        return tuple(principal_arg(self.boundary[(k + 1) % m].delta_z / self.boundary[k].delta_z)
                     for k in range(m))

    def arc_turn(self, p, q):
        """Total exterior turn at the vertices met going anticlockwise from side p to side q"""
        m = len(self.boundary)
        total = 0.0
        k = p % m
        while k != q % m:
            total += self.exterior_turns[k]
            k = (k + 1) % m
        return total

    def boundary_polygon(self):
        return [s.start for s in self.boundary]

    def same_boundary(self, other, tol=GEOMETRY_TOLERANCE):
        if self.boundary_count != other.boundary_count:
            return False
        return all(abs(a.midpoint - b.midpoint) <= tol and abs(a.delta_z - b.delta_z) <= tol
                   for a, b in zip(self.boundary, other.boundary))

    @cached_property
    def signature(self):
        return tuple(sorted((r.id, r.role, tuple(snap(v) for v in r.vertices)) for r in self.rhombi)) \
            + (snap(self.anchor),)

    def __eq__(self, other):
        return isinstance(other, RhombicDomain) and self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)

    def __repr__(self):
        return f"<RhombicDomain {self.name or ''} rhombi={len(self.rhombi)} boundary={self.boundary_count}>"

    def replaced(self, rhombi, name=None, anchor=None):
        """A domain with the given rhombi, keeping the anchor unless a new one is given"""
        return RhombicDomain(rhombi, anchor=self.anchor if anchor is None else anchor,
                             name=self.name if name is None else name)

    def mirror(self):
        """Reflection z -> conj(z); tags stay first and opening angles are kept"""
        rhombi = [Rhombus(r.id, tuple(v.conjugate() for v in (r.vertices[0], r.vertices[3],
                                                                 r.vertices[2], r.vertices[1])),
                          r.role)
                  for r in self.rhombi]
        return RhombicDomain(rhombi, anchor=self.anchor.conjugate(), name=f"{self.name}-mirror")

    def to_dict(self):
        pairs = sorted({tuple(sorted((a, b))) for a, b in self.adjacency.items()})
        return {
            'name': self.name,
            'anchor': [self.anchor.real, self.anchor.imag],
            'rhombi': [{
                'id': r.id,
                'angle': r.opening_angle,
                'role': r.role,
                'tag': 0,
                'vertices': [[v.real, v.imag] for v in r.vertices],
            } for r in self.rhombi],
            'adjacency': [[list(a), list(b)] for a, b in pairs],
        }


# ============= BUILDERS =============

def _check_open_angle(name, value):
    if not 0.0 < value < math.pi:
        raise InvalidArgument(f"{name} must lie in (0, pi), got {value}")


def hub_vectors(alpha, beta):
    """Edge vectors at the hexagon hub, going clockwise: 1, e^{-i alpha}, e^{-i(alpha+beta)}"""
    return 1 + 0j, cmath.exp(-1j * alpha), cmath.exp(-1j * (alpha + beta))


def make_domain_single(alpha):
    """One rhombus tagged at the origin: vertices 0, 1, 1 + e^{i alpha}, e^{i alpha}"""
    _check_open_angle('alpha', alpha)
    rhombus = make_rhombus(0, 0j, 1 + 0j, cmath.exp(1j * alpha), role='alpha')
    return RhombicDomain([rhombus], anchor=rhombus.midpoint(0), name='single')


def _star_rhombi(alpha, beta, with_gamma=True):
    d1, d2, d3 = hub_vectors(alpha, beta)
    rhombi = [
        make_rhombus(0, 0j, d2, d1, role='alpha'),
        make_rhombus(1, 0j, d3, d2, role='beta'),
    ]
    if with_gamma:
        rhombi.append(make_rhombus(2, 0j, d1, d3, role='gamma'))
    return rhombi


def _hexagon_anchor(alpha, beta):
    d1, d2, _ = hub_vectors(alpha, beta)
    return d1 + d2 / 2


def make_domain_pair(alpha, beta):
    """Two rhombi sharing the side [0, e^{-i alpha}], tags at the shared corner"""
    _check_open_angle('alpha', alpha)
    _check_open_angle('beta', beta)
    return RhombicDomain(_star_rhombi(alpha, beta, with_gamma=False),
                         anchor=_hexagon_anchor(alpha, beta), name='pair')


def make_domain_hexagon(alpha, beta, gamma, arrangement=STAR):
    """
    Hexagon tiled by rhombi of opening angles alpha, beta, gamma.

    ``star`` places the three tags at the common inner vertex; ``triangle``
    is its reshuffle, obtained by the point reflection through the hexagon
    centre, with tags at the new inner vertex.
    """
    check_angle_sum(alpha, beta, gamma)
    for name, value in (('alpha', alpha), ('beta', beta), ('gamma', gamma)):
        _check_open_angle(name, value)
    if arrangement not in ARRANGEMENTS:
        raise InvalidArgument(f"arrangement must be one of {ARRANGEMENTS}, got {arrangement!r}")
    rhombi = _star_rhombi(alpha, beta)
    if arrangement == TRIANGLE:
        centre = sum(hub_vectors(alpha, beta))
        rhombi = [r.mapped(lambda v: centre - v) for r in rhombi]
    return RhombicDomain(rhombi, anchor=_hexagon_anchor(alpha, beta), name=f"hexagon-{arrangement}")


def attach_rhombus(domain, boundary_index, angle, role='extra', rhombus_id=None):
    """Glue a new rhombus of the given opening angle onto a boundary side"""
    _check_open_angle('angle', angle)
    side = domain.boundary[boundary_index % domain.boundary_count]
    u = side.start - side.end
    new_id = max(r.id for r in domain.rhombi) + 1 if rhombus_id is None else rhombus_id
    rhombus = make_rhombus(new_id, side.end, u, u * cmath.exp(1j * angle), role=role)
    anchor = None
    if snap(side.midpoint) == snap(domain.anchor):
        # the glued side becomes interior; the entry moves to the opposite side of the new rhombus
        anchor = rhombus.midpoint(2)
    return domain.replaced(list(domain.rhombi) + [rhombus], anchor=anchor)


# ============= LOCAL MOVES =============

@dataclass(frozen=True)
class HexagonSite:
    hub: complex
    rhombi: tuple
    centre_offset: complex


def find_hexagons(domain):
    """Inner vertices of degree three, i.e. every place a star-triangle move applies"""
    boundary_vertices = {snap(s.start) for s in domain.boundary}
    incident = {}
    for r in domain.rhombi:
        for k, v in enumerate(r.vertices):
            incident.setdefault(snap(v), []).append((r, k))

    sites = []
    for key, owners in incident.items():
        if key in boundary_vertices or len(owners) != 3:
            continue
        hub = owners[0][0].vertices[owners[0][1]]
        directions = {}
        for r, k in owners:
            for v in (r.vertices[(k + 1) % 4], r.vertices[(k - 1) % 4]):
                directions[snap(v - hub)] = v - hub
        if len(directions) != 3:
            continue
        sites.append(HexagonSite(hub, tuple(sorted(r.id for r, _ in owners)),
                                 sum(directions.values())))
    sites.sort(key=lambda s: s.rhombi)
    return sites


def star_triangle_move(domain, hexagon_location):
    """
    Retile the hexagon at ``hexagon_location`` (its three rhombus ids, or a
    HexagonSite) in the other arrangement. The move is the point reflection
    of the three rhombi through the hexagon centre, so it is an involution
    and leaves the domain boundary untouched.
    """
    wanted = tuple(sorted(getattr(hexagon_location, 'rhombi', hexagon_location)))
    site = next((s for s in find_hexagons(domain) if s.rhombi == wanted), None)
    if site is None:
        raise InvalidArgument(f"rhombi {wanted} do not form a reshuffleable hexagon")
    fixed_point = 2 * site.hub + site.centre_offset
    moved = [r.mapped(lambda v: fixed_point - v) if r.id in wanted else r for r in domain.rhombi]
    result = domain.replaced(moved)
    logger.debug(f"Star-triangle move on rhombi {wanted} at hub {site.hub:.6f}")
    return result


# ============= TRAIN TRACKS =============

def trace_train_tracks(domain):
    """
    Partition (rhombus, side class) pairs into train tracks.

    Side class 0 holds sides 0 and 2, class 1 sides 1 and 3. A track may not
    cross itself (both classes of one rhombus) and two tracks may cross at
    most once.
    """
    graph = nx.Graph()
    for r in domain.rhombi:
        graph.add_node((r.id, 0))
        graph.add_node((r.id, 1))
    for (r1, s1), (r2, s2) in domain.adjacency.items():
        graph.add_edge((r1, s1 % 2), (r2, s2 % 2))

    components = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    track_of = {}
    tracks = []
    for index, members in enumerate(components):
        rhombus_ids = [rid for rid, _ in members]
        if len(set(rhombus_ids)) != len(rhombus_ids):
            raise EmbeddingInvalid(f"train track {index} crosses itself")
        rid, cls = members[0]
        direction = domain.rhombus(rid).delta(cls)
        if not -math.pi / 2 < principal_arg(direction) <= math.pi / 2:
            direction = -direction
        sides = []
        for rid, cls in members:
            track_of[(rid, cls)] = index
            r = domain.rhombus(rid)
            for k in (cls, cls + 2):
                if abs((r.delta(k) * direction.conjugate()).imag) > GEOMETRY_TOLERANCE:
                    raise EmbeddingInvalid(f"train track {index}: sides are not parallel")
                sides.append((rid, k))
        tracks.append(Transversal(direction, tuple(sides)))

    crossings = {}
    for r in domain.rhombi:
        pair = tuple(sorted((track_of[(r.id, 0)], track_of[(r.id, 1)])))
        crossings[pair] = crossings.get(pair, 0) + 1
        if crossings[pair] > 1:
            raise EmbeddingInvalid(f"train tracks {pair} cross more than once")
    return tracks
