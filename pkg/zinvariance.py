"""
Per-chord-diagram partition functions and Z-invariance checks.

Grouping configurations by their internal chord diagram splits a domain's
partition function into pieces that depend only on how the boundary
points are connected. Two domains with the same boundary that differ by
star-triangle moves have identical pieces on the integrable families, and
so the boundary values of the observable agree as well.
"""
from dataclasses import dataclass, field
import logging
import math

from combinatorics import glue
from enumeration import (
    as_weight_table, config_catalog, enumerate_external_diagrams, plaquette_product,
    trace_path,
)
from errors import InvalidArgument
from geometry import find_hexagons, star_triangle_move
from observable import boundary_psi, psi, transfer
from utils import complex_fsum, max_abs

logger = logging.getLogger(__name__)


@dataclass
class DiagramPartition:
    """ChordDiagram -> sum of plaquette products times n per interior loop"""
    model: str
    fugacity: float
    values: dict = field(default_factory=dict)

    def __getitem__(self, diagram):
        return self.values.get(diagram, 0.0)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def merge(self, other):
        """Add another partial map (e.g. from a disjoint chunk of configurations)"""
        for diagram, value in other.values.items():
            self.values[diagram] = self.values.get(diagram, 0.0) + value
        return self

    def total(self):
        return math.fsum(self.values.values())

    def contracted(self, outer):
        """Partition function with the boundary closed by the chords of ``outer``"""
        return math.fsum(value * self.fugacity ** glue(diagram, outer).closed_loops
                         for diagram, value in self.values.items())

    def encoded(self):
        return {d.encode(): v for d, v in sorted(self.values.items(), key=lambda kv: kv[0].encode())}


def partition_by_diagram(domain, weights, max_configs=None):
    table = as_weight_table(domain, weights)
    terms = {}
    for entry in config_catalog(domain, table.model, max_configs):
        value = plaquette_product(entry.config, table) * table.fugacity ** entry.interior_loops
        terms.setdefault(entry.internal, []).append(value)
    partition = DiagramPartition(table.model, table.fugacity,
                                 {d: math.fsum(v) for d, v in terms.items()})
    logger.debug(f"Partition of {domain.name}: {len(partition)} diagrams")
    return partition


def _check_same_boundary(domain1, domain2):
    if not domain1.same_boundary(domain2):
        raise InvalidArgument(
            f"domains {domain1.name!r} and {domain2.name!r} do not share their boundary"
        )


def z_invariance_residual(domain1, domain2, weights):
    """max over diagrams of |P1(d) - P2(d)|, absent diagrams counting as zero"""
    _check_same_boundary(domain1, domain2)
    first = partition_by_diagram(domain1, weights)
    second = partition_by_diagram(domain2, weights)
    keys = set(first) | set(second)
    return max_abs((first[d] - second[d] for d in keys), default=0.0)


@dataclass(frozen=True)
class DiagramRow:
    diagram: str
    first: float
    second: float

    @property
    def difference(self):
        return abs(self.first - self.second)


def diagram_rows(domain1, domain2, weights):
    """One row per occurring diagram, in encoding order"""
    _check_same_boundary(domain1, domain2)
    first = partition_by_diagram(domain1, weights)
    second = partition_by_diagram(domain2, weights)
    keys = sorted(set(first) | set(second), key=lambda d: d.encode())
    return [DiagramRow(d.encode() or '()', first[d], second[d]) for d in keys]


def boundary_observable(domain, weights, z, external, close_path=False):
    """
    psi at the boundary midpoint ``z`` (a midpoint or a boundary index) for
    paths entering at ``external.entry``.
    """
    index = z if isinstance(z, int) else domain.boundary_index_at(z)
    if index is None or not 0 <= index < domain.boundary_count:
        raise InvalidArgument(f"{z} is not a boundary midpoint of {domain.name!r}")
    values = psi(domain, weights, external, close_path)
    return values.get(domain.boundary[index].midpoint, 0j)


def boundary_observable_residual(domain1, domain2, weights, entries=None):
    """
    max |psi_1(z) - psi_2(z)| over boundary midpoints z, entries and every
    admissible external diagram.
    """
    _check_same_boundary(domain1, domain2)
    table1 = as_weight_table(domain1, weights)
    table2 = as_weight_table(domain2, weights)
    m = domain1.boundary_count
    worst = 0.0
    for entry in (range(m) if entries is None else entries):
        for external in enumerate_external_diagrams(m, entry, table1.model):
            first = boundary_psi(domain1, table1, external)
            second = boundary_psi(domain2, table2, external)
            worst = max(worst, max_abs(a - b for a, b in zip(first, second)))
    return worst


def factorized_contour_sum(domain, weights, external, close_path=False, normalized=False):
    """Contour sum assembled as delta_z(entry) * sum_d P(d) F(d, external)"""
    table = as_weight_table(domain, weights)
    partition = partition_by_diagram(domain, table)
    total = complex_fsum(
        value * transfer(domain, diagram, external, table.spin_complement, table.fugacity, close_path)
        for diagram, value in partition.values.items()
    )
    if not normalized:
        total *= domain.boundary[external.entry].delta_z
    return total


def winding_spread(domain, model, external):
    """
    Largest spread of the winding at a boundary point among configurations
    sharing an internal chord diagram. Zero when windings depend on the
    diagram only.
    """
    seen = {}
    spread = 0.0
    for entry in config_catalog(domain, model):
        trace = trace_path(domain, entry.config, external)
        for visit in trace.visits:
            if visit.boundary_index is None:
                continue
            key = (entry.internal, visit.boundary_index, visit.outward)
            reference = seen.setdefault(key, visit.winding)
            spread = max(spread, abs(visit.winding - reference))
    return spread


def reshuffled_domains(domain):
    """Every domain one star-triangle move away, paired with the site moved"""
    results = []
    for site in find_hexagons(domain):
        results.append((site, star_triangle_move(domain, site)))
    logger.debug(f"{domain.name}: {len(results)} reshuffleable hexagon(s)")
    return results
