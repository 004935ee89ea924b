"""
Chord diagrams: non-crossing perfect and partial matchings of points
placed in cyclic anticlockwise order on a circle.
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache
import logging
import re

import networkx as nx

from errors import InvalidArgument

logger = logging.getLogger(__name__)

_CHORD_RE = re.compile(r'\((\d+)-(\d+)\)')


def _crosses(first, second):
    a, b = first
    c, d = second
    return a < c < b < d or c < a < d < b


@dataclass(frozen=True)
class ChordDiagram:
    """
    A non-crossing (possibly partial) matching of points 0..point_count-1.

    Chords are stored as sorted (min, max) pairs; unmatched points as a
    sorted tuple. Instances are hashable and compare by value, so they can
    key partition maps directly.
    """
    point_count: int
    chords: tuple = ()
    unmatched: tuple = ()

    def __post_init__(self):
        if self.point_count < 0:
            raise InvalidArgument(f"point count must be non-negative, got {self.point_count}")
        chords = tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in self.chords))
        unmatched = tuple(sorted(int(p) for p in self.unmatched))
        object.__setattr__(self, 'chords', chords)
        object.__setattr__(self, 'unmatched', unmatched)

        seen = [p for chord in chords for p in chord] + list(unmatched)
        if sorted(seen) != list(range(self.point_count)):
            raise InvalidArgument(
                f"chords and unmatched points must partition 0..{self.point_count - 1}: {self.encode()}"
            )
        for i, first in enumerate(chords):
            if first[0] == first[1]:
                raise InvalidArgument(f"chord joins a point to itself: {first}")
            for second in chords[i + 1:]:
                if _crosses(first, second):
                    raise InvalidArgument(f"chords {first} and {second} cross")

    @classmethod
    def from_chords(cls, point_count, chords):
        """Build a diagram, treating every point outside the chords as unmatched"""
        used = {p for chord in chords for p in chord}
        return cls(point_count, tuple(chords), tuple(p for p in range(point_count) if p not in used))

    @cached_property
    def partner(self):
        """Map point -> matched point (unmatched points are absent)"""
        result = {}
        for a, b in self.chords:
            result[a] = b
            result[b] = a
        return result

    @property
    def is_perfect(self):
        return not self.unmatched

    def is_matched(self, point):
        return point in self.partner

    def without(self, points):
        """Drop every chord touching one of ``points``; their ends become unmatched"""
        points = set(points)
        kept = tuple(c for c in self.chords if c[0] not in points and c[1] not in points)
        return ChordDiagram.from_chords(self.point_count, kept)

    def relabel(self, mapping):
        """Image of the diagram under a point relabelling (a dict or callable)"""
        image = mapping if callable(mapping) else mapping.__getitem__
        return ChordDiagram(
            self.point_count,
            tuple((image(a), image(b)) for a, b in self.chords),
            tuple(image(p) for p in self.unmatched),
        )

    def encode(self):
        text = ''.join(f"({a}-{b})" for a, b in self.chords)
        if self.unmatched:
            tail = 'u:' + ','.join(str(p) for p in self.unmatched)
            text = f"{text};{tail}" if text else tail
        return text

    @classmethod
    def decode(cls, text):
        """Inverse of :meth:`encode`, e.g. ``"(0-1)(2-5);u:3,4"``"""
        text = (text or '').strip()
        chord_part, _, unmatched_part = text.partition('u:')
        chord_part = chord_part.rstrip(';')
        chords = [(int(a), int(b)) for a, b in _CHORD_RE.findall(chord_part)]
        if _CHORD_RE.sub('', chord_part).strip():
            raise InvalidArgument(f"malformed chord diagram encoding: {text!r}")
        try:
            unmatched = [int(p) for p in unmatched_part.split(',') if p.strip()]
        except ValueError:
            raise InvalidArgument(f"malformed unmatched list in {text!r}")
        point_count = 2 * len(chords) + len(unmatched)
        return cls(point_count, tuple(chords), tuple(unmatched))

    def __str__(self):
        return self.encode() or '()'


@lru_cache(maxsize=None)
def _matchings(lo, hi, perfect):
    """All non-crossing matchings of the interval lo..hi-1 as chord tuples"""
    if hi <= lo:
        return ((),)
    results = []
    if not perfect:
        results.extend(_matchings(lo + 1, hi, perfect))
    for k in range(lo + 1, hi):
        if perfect and (k - lo - 1) % 2:
            continue
        for inside in _matchings(lo + 1, k, perfect):
            for outside in _matchings(k + 1, hi, perfect):
                results.append(((lo, k),) + inside + outside)
    return tuple(results)


def enumerate_diagrams(m, perfect):
    """
    All non-crossing perfect (or partial) matchings of m points.

    Canonical order: the first point stays unmatched first (partial only),
    then pairs with k for increasing k; sub-intervals recurse the same way.
    """
    if m < 0:
        raise InvalidArgument(f"point count must be non-negative, got {m}")
    if perfect and m % 2:
        raise InvalidArgument(f"no perfect matching of an odd number ({m}) of points")
    return [ChordDiagram.from_chords(m, chords) for chords in _matchings(0, m, bool(perfect))]


@lru_cache(maxsize=None)
def catalan(j):
    if j < 0:
        raise InvalidArgument(f"Catalan index must be non-negative, got {j}")
    if j == 0:
        return 1
    return sum(catalan(k) * catalan(j - 1 - k) for k in range(j))


@lru_cache(maxsize=None)
def motzkin(m):
    """M(m) = M(m-1) + sum_{k=0}^{m-2} M(k) M(m-2-k)"""
    if m < 0:
        raise InvalidArgument(f"Motzkin index must be non-negative, got {m}")
    if m < 2:
        return 1
    return motzkin(m - 1) + sum(motzkin(k) * motzkin(m - 2 - k) for k in range(m - 1))


@dataclass(frozen=True)
class GlueResult:
    closed_loops: int
    chains: tuple


@lru_cache(maxsize=4096)
def glue(inner, outer):
    """
    Glue two diagrams on the same points along their shared endpoints.

    Chords of both diagrams become edges; cycles are closed loops, the
    remaining components with edges are open chains ending at points
    unmatched on one side. Chains run from their smaller endpoint and are
    sorted; isolated points are not reported.
    """
    if inner.point_count != outer.point_count:
        raise InvalidArgument(
            f"cannot glue diagrams on {inner.point_count} and {outer.point_count} points"
        )
    graph = nx.MultiGraph()
    graph.add_nodes_from(range(inner.point_count))
    graph.add_edges_from(inner.chords, side='inner')
    graph.add_edges_from(outer.chords, side='outer')

    loops = 0
    chains = []
    for component in nx.connected_components(graph):
        if len(component) == 1:
            continue
        degrees = [graph.degree(p) for p in component]
        if all(d == 2 for d in degrees):
            loops += 1
            continue
        start = min(p for p in component if graph.degree(p) == 1)
        chains.append(_walk_chain(graph, start))
    chains.sort()
    return GlueResult(loops, tuple(chains))


def _walk_chain(graph, start):
    path = [start]
    previous, current = None, start
    while True:
        following = [p for p in graph.neighbors(current) if p != previous]
        if not following:
            return tuple(path)
        previous, current = current, following[0]
        path.append(current)
