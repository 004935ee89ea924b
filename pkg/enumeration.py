"""
Exact enumeration of loop configurations on a rhombic domain.

A configuration assigns a local state to every rhombus. Local states are
sets of arcs between side indices of the rhombus; the dense model has the
two Temperley-Lieb states, the dilute model the nine O(n) states. The
exploration path is traced through the arcs and, outside the domain,
through the chords of an external diagram, accumulating its winding angle.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
import itertools
import logging
import math

import networkx as nx

from combinatorics import ChordDiagram, enumerate_diagrams, glue
from errors import InvalidArgument, MalformedConfiguration, ResourceLimit
from utils import principal_arg, snap
from weights import apply_perturbation, model_weights, perturbed_params

logger = logging.getLogger(__name__)

DEFAULT_MAX_CONFIGS = 10 ** 8

DENSE = 'dense'
DILUTE = 'dilute'
MODELS = (DENSE, DILUTE)

# (weight label, arcs between side indices); 'a' arcs turn around the untagged
# corners v1 and v3, 'b' arcs around the tagged corner v0 and its opposite v2
DENSE_STATES = (
    ('a', ((0, 1), (2, 3))),
    ('b', ((3, 0), (1, 2))),
)
DILUTE_STATES = (
    ('t', ()),
    ('u1', ((0, 1),)),
    ('u1', ((2, 3),)),
    ('u2', ((3, 0),)),
    ('u2', ((1, 2),)),
    ('v', ((0, 2),)),
    ('v', ((1, 3),)),
    ('a', ((0, 1), (2, 3))),
    ('b', ((3, 0), (1, 2))),
)
STATE_TABLES = {DENSE: DENSE_STATES, DILUTE: DILUTE_STATES}


def _check_model(model):
    if model not in MODELS:
        raise InvalidArgument(f"model must be one of {MODELS}, got {model!r}")


# ============= STATES AND CONFIGURATIONS =============

@dataclass(frozen=True)
class PlaquetteState:
    rhombus: int
    index: int
    model: str = DENSE

    @property
    def weight_label(self):
        return STATE_TABLES[self.model][self.index][0]

    @property
    def arcs(self):
        return STATE_TABLES[self.model][self.index][1]

    @property
    def local_diagram(self):
        return ChordDiagram.from_chords(4, self.arcs)

    def exit_side(self, side):
        """Side joined to ``side`` by an arc, or None when the side is unused"""
        for i, j in self.arcs:
            if i == side:
                return j
            if j == side:
                return i
        return None


@dataclass(frozen=True)
class Configuration:
    model: str
    states: tuple

    @cached_property
    def _by_rhombus(self):
        return {s.rhombus: s for s in self.states}

    def state(self, rhombus_id):
        return self._by_rhombus[rhombus_id]

    @property
    def labels(self):
        return tuple(s.weight_label for s in self.states)

    def uses(self, rhombus_id, side):
        return self.state(rhombus_id).exit_side(side) is not None


@dataclass(frozen=True)
class ExternalDiagram:
    """
    Frozen exterior of the domain for one grouping of the contour sum.

    Dense: ``matching`` is a perfect diagram on all boundary points and the
    partner of ``entry`` is the point linked to B. Dilute: ``entry`` is left
    unmatched in ``matching`` (it is linked to A) and the other points may be
    matched or not.
    """
    entry: int
    matching: ChordDiagram
    model: str = DENSE

    def __post_init__(self):
        _check_model(self.model)
        if not 0 <= self.entry < self.matching.point_count:
            raise InvalidArgument(f"entry {self.entry} outside 0..{self.matching.point_count - 1}")
        if self.model == DENSE:
            if not self.matching.is_perfect:
                raise InvalidArgument("dense external diagrams are perfect matchings")
        elif self.matching.is_matched(self.entry):
            raise InvalidArgument("dilute external diagrams leave the entry unmatched")

    @property
    def point_count(self):
        return self.matching.point_count

    @property
    def b_point(self):
        return self.matching.partner.get(self.entry) if self.model == DENSE else None

    @cached_property
    def outer(self):
        """Exterior chords other than the A/B attachment"""
        if self.model == DENSE:
            return self.matching.without([self.entry])
        return self.matching

    @property
    def obstacles(self):
        if self.model == DENSE:
            return frozenset((self.entry, self.b_point))
        return frozenset((self.entry,))

    def is_used(self, point):
        return point == self.entry or self.matching.is_matched(point)

    def relabel(self, mapping):
        image = mapping if callable(mapping) else mapping.__getitem__
        return ExternalDiagram(image(self.entry), self.matching.relabel(image), self.model)

    def encode(self):
        return f"{self.entry}|{self.matching.encode()}"

    @classmethod
    def decode(cls, text, model=DENSE):
        entry, _, matching = text.partition('|')
        return cls(int(entry), ChordDiagram.decode(matching), model)


def enumerate_external_diagrams(point_count, entry, model):
    """Admissible external diagrams with the given entry, in canonical diagram order"""
    _check_model(model)
    if model == DENSE:
        return [ExternalDiagram(entry, d, DENSE) for d in enumerate_diagrams(point_count, True)]
    return [ExternalDiagram(entry, d, DILUTE)
            for d in enumerate_diagrams(point_count, False) if not d.is_matched(entry)]


def enumerate_configs(domain, model, max_configs=None, raw=False):
    """
    Iterate every state assignment, lexicographic in (rhombus id, state index).

    Dilute assignments with a curve ending on a shared side are skipped
    unless ``raw`` is set. The total count is checked against the cap
    before anything is produced.
    """
    _check_model(model)
    cap = DEFAULT_MAX_CONFIGS if max_configs is None else max_configs
    table = STATE_TABLES[model]
    ids = sorted(r.id for r in domain.rhombi)
    total = len(table) ** len(ids)
    if total > cap:
        raise ResourceLimit(total, cap)
    return _generate_configs(domain, model, ids, len(table), raw)


def _generate_configs(domain, model, ids, state_count, raw):
    for indices in itertools.product(range(state_count), repeat=len(ids)):
        config = Configuration(model, tuple(PlaquetteState(rid, k, model) for rid, k in zip(ids, indices)))
        if raw or model == DENSE or bulk_consistent(domain, config):
            yield config


def bulk_consistent(domain, config):
    """Every shared side is used by both rhombi or by neither"""
    for (r1, s1), (r2, s2) in domain.adjacency.items():
        if r1 < r2 and config.uses(r1, s1) != config.uses(r2, s2):
            return False
    return True


# ============= WINDING =============

def turning_angle(rhombus, side_in, side_out):
    """
    Signed turn of a curve crossing ``side_in`` inward and ``side_out``
    outward, the direction at each side being its normal. The magnitude is
    the interior angle of the corner the arc turns around; opposite sides
    give 0.
    """
    if side_in % 4 == side_out % 4:
        raise InvalidArgument("a curve cannot enter and leave through the same side")
    return principal_arg(-rhombus.delta(side_out) / rhombus.delta(side_in))


def exterior_turn(domain, exit_index, reentry_index, obstacles):
    """
    Turn of an exterior chord leaving at ``exit_index`` and re-entering at
    ``reentry_index``. The chord hugs whichever boundary arc holds none of
    the obstacles (the points attached to A and B).
    """
    m = domain.boundary_count
    k = (exit_index + 1) % m
    clear = True
    while k != reentry_index % m:
        if k in obstacles:
            clear = False
            break
        k = (k + 1) % m
    if clear:
        return math.pi + domain.arc_turn(exit_index, reentry_index)
    return -math.pi - domain.arc_turn(reentry_index, exit_index)


def interior_turn(domain, entry_index, exit_index):
    """Winding gained crossing the domain from one boundary side to another"""
    return -math.pi + domain.arc_turn(entry_index, exit_index)


# ============= PATH TRACING =============

@dataclass(frozen=True)
class Visit:
    midpoint: complex
    winding: float
    boundary_index: int = None
    outward: bool = False


@dataclass(frozen=True)
class PathTrace:
    visits: tuple
    terminal: int

    @cached_property
    def boundary_points(self):
        return frozenset(v.boundary_index for v in self.visits if v.boundary_index is not None)

    def winding_at(self, boundary_index):
        for v in self.visits:
            if v.boundary_index == boundary_index:
                return v.winding
        raise KeyError(boundary_index)

    @property
    def terminal_visit(self):
        return self.visits[-1]


def shared_midpoint(domain, rhombus_id, side):
    """Midpoint of a shared side, computed from the lower (rhombus, side) key"""
    other = domain.neighbor(rhombus_id, side)
    rid, k = min((rhombus_id, side), other) if other else (rhombus_id, side)
    return domain.rhombus(rid).midpoint(k)


def trace_path(domain, config, external):
    """
    Follow the exploration path from the entry point with winding 0.

    Dense paths end when they leave through the point linked to B. Dilute
    paths end where the next step is missing: an entered side unused by
    the plaquette, or an exit point with no exterior chord.
    """
    dense = config.model == DENSE
    start = domain.boundary[external.entry]
    visits = [Visit(start.midpoint, 0.0, start.index, False)]
    seen = {('boundary', start.index, False)}
    winding = 0.0
    current = (start.rhombus, start.side)

    def record(visit, key):
        if key in seen:
            raise MalformedConfiguration(f"path revisits {key} in {config.labels}")
        seen.add(key)
        visits.append(visit)

    while True:
        rid, side = current
        out = config.state(rid).exit_side(side)
        if out is None:
            if dense:
                raise MalformedConfiguration("dense plaquettes use every side")
            if visits[-1].boundary_index is None:
                raise MalformedConfiguration("path ends on a shared side")
            return PathTrace(tuple(visits), visits[-1].boundary_index)

        winding += turning_angle(domain.rhombus(rid), side, out)
        neighbor = domain.neighbor(rid, out)
        if neighbor is not None:
            record(Visit(shared_midpoint(domain, rid, out), winding),
                   ('shared', snap(shared_midpoint(domain, rid, out))))
            current = neighbor
            continue

        q = domain.boundary_index(rid, out)
        record(Visit(domain.boundary[q].midpoint, winding, q, True), ('boundary', q, True))
        if dense and q == external.b_point:
            return PathTrace(tuple(visits), q)
        p = external.matching.partner.get(q)
        if p is None:
            if dense:
                raise MalformedConfiguration(f"boundary point {q} has no exterior partner")
            return PathTrace(tuple(visits), q)

        winding += exterior_turn(domain, q, p, external.obstacles)
        side_p = domain.boundary[p]
        record(Visit(side_p.midpoint, winding, p, False), ('boundary', p, False))
        current = (side_p.rhombus, side_p.side)


def internally_used(domain, config):
    """Boundary indices whose side is used by the configuration"""
    return frozenset(s.index for s in domain.boundary if config.uses(s.rhombus, s.side))


def external_consistent(domain, config, external, trace):
    """
    Dilute grouping condition: off the path, a boundary point is used
    inside exactly when it is used outside. Dense configurations always
    qualify.
    """
    if config.model == DENSE:
        return True
    used = internally_used(domain, config)
    return all((s.index in used) == external.is_used(s.index)
               for s in domain.boundary if s.index not in trace.boundary_points)


# ============= CONNECTIVITY AND WEIGHTS =============

def internal_chord_diagram(domain, config):
    """
    Connectivity of boundary midpoints through interior arcs only.

    Returns (diagram, interior_loops) where interior_loops counts loops
    closed entirely inside the domain.
    """
    graph = nx.MultiGraph()
    boundary_keys = {}
    for s in domain.boundary:
        key = ('b', s.index)
        boundary_keys[(s.rhombus, s.side)] = key
        graph.add_node(key)

    def node(rid, side):
        if (rid, side) in boundary_keys:
            return boundary_keys[(rid, side)]
        return ('s',) + min((rid, side), domain.neighbor(rid, side))

    for state in config.states:
        for i, j in state.arcs:
            graph.add_edge(node(state.rhombus, i), node(state.rhombus, j))

    chords = []
    loops = 0
    for component in nx.connected_components(graph):
        ends = sorted(k[1] for k in component if k[0] == 'b')
        if not ends:
            if all(graph.degree(k) == 2 for k in component):
                loops += 1
                continue
            raise MalformedConfiguration("curve ends in the bulk")
        if len(ends) == 1:
            if len(component) == 1:
                continue
            raise MalformedConfiguration("curve ends in the bulk")
        if len(ends) != 2:
            raise MalformedConfiguration(f"curve joins boundary points {ends}")
        chords.append(tuple(ends))
    return ChordDiagram.from_chords(domain.boundary_count, chords), loops


@dataclass(frozen=True)
class WeightTable:
    """Per-rhombus weight records plus the fugacity and spin used for a domain"""
    model: str
    fugacity: float
    spin_complement: float
    plaquettes: tuple

    @cached_property
    def _records(self):
        return dict(self.plaquettes)

    def record(self, rhombus_id):
        return self._records[rhombus_id]

    def weight(self, rhombus_id, label):
        return getattr(self._records[rhombus_id], label)

    @property
    def sigma(self):
        return 1.0 - self.spin_complement

    @classmethod
    def from_params(cls, domain, params, perturb=None):
        effective = perturbed_params(params, perturb)
        records = tuple(
            (r.id, apply_perturbation(model_weights(r.opening_angle, effective), perturb))
            for r in sorted(domain.rhombi, key=lambda r: r.id)
        )
        return cls(params.model, effective.fugacity, float(effective.spin_complement()), records)

    @classmethod
    def from_roles(cls, domain, by_role, fugacity, spin_complement, model=DENSE):
        """Weights chosen per rhombus role, e.g. random records for identity checks"""
        missing = {r.role for r in domain.rhombi} - set(by_role)
        if missing:
            raise InvalidArgument(f"no weights given for role(s) {sorted(missing)}")
        records = tuple((r.id, by_role[r.role]) for r in sorted(domain.rhombi, key=lambda r: r.id))
        return cls(model, fugacity, spin_complement, records)


def as_weight_table(domain, weights, perturb=None):
    """Accept a WeightTable or model parameters"""
    if isinstance(weights, WeightTable):
        return weights
    return WeightTable.from_params(domain, weights, perturb)


def plaquette_product(config, table):
    product = 1.0
    for state in config.states:
        product *= table.weight(state.rhombus, state.weight_label)
    return product


def config_weight(domain, config, external, weights):
    """Plaquette weights times n per closed loop (exterior gluing plus interior loops)"""
    table = as_weight_table(domain, weights)
    internal, interior_loops = internal_chord_diagram(domain, config)
    loops = glue(internal, external.outer).closed_loops + interior_loops
    return plaquette_product(config, table) * table.fugacity ** loops


# ============= CATALOG =============

@dataclass(frozen=True)
class CatalogEntry:
    config: Configuration
    internal: ChordDiagram
    interior_loops: int


@lru_cache(maxsize=64)
def config_catalog(domain, model, max_configs=None):
    """Consistent configurations of a domain with their internal connectivity"""
    entries = []
    for config in enumerate_configs(domain, model, max_configs):
        internal, loops = internal_chord_diagram(domain, config)
        entries.append(CatalogEntry(config, internal, loops))
    logger.debug(f"Catalog {domain.name} ({model}): {len(entries)} configurations")
    return tuple(entries)


def format_config_line(entry, weight):
    """One line of the configuration dump: state labels, weight, internal diagram"""
    labels = ','.join(entry.config.labels)
    return f"{labels}\t{weight:.17g}\t{entry.internal.encode() or '()'}\tloops={entry.interior_loops}"
