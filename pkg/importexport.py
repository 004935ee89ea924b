"""
Import/Export module for verification artifacts
Exports residual reports (JSON, CSV, plain table) and per-diagram partition
rows; imports and saves rhombic domains as JSON.
"""

import csv
import io
import json
import logging

from errors import EmbeddingInvalid, InvalidArgument, LoopLabError
from geometry import GEOMETRY_TOLERANCE, RhombicDomain, Rhombus

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ('key', 'abs', 'threshold', 'pass', 'value_re', 'value_im', 'inputs')
DIAGRAM_COLUMNS = ('diagram', 'P_star', 'P_triangle', 'abs_diff')


class ReportExporter:
    """Handles exporting residual reports"""

    @staticmethod
    def to_json(report, summary=None):
        """Deterministic JSON: sorted keys, no timing information"""
        payload = report.to_dict()
        if summary is not None:
            payload['summary'] = summary
        return json.dumps(payload, indent=2, sort_keys=True)

    @staticmethod
    def to_csv(report):
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(REPORT_COLUMNS)
        for entry in report.entries:
            row = entry.to_dict()
            writer.writerow([
                row['key'], repr(row['abs']), repr(row['threshold']), row['pass'],
                repr(row['value_re']), repr(row['value_im']),
                json.dumps(row['inputs'], sort_keys=True),
            ])
        return out.getvalue()

    @staticmethod
    def to_table(report, wall_time=None):
        width = max([len(e.key) for e in report.entries] + [len('check')])
        lines = [f"{'check':<{width}}  {'worst |residual|':>18}  {'threshold':>10}  status"]
        for entry in report.entries:
            status = 'PASS' if entry.passed else 'FAIL'
            lines.append(f"{entry.key:<{width}}  {entry.abs:>18.3e}  {entry.threshold:>10.1e}  {status}")
        for key in sorted(report.notes):
            lines.append(f"  {key} = {report.notes[key]}")
        verdict = 'all checks passed' if report.passed else f"{len(report.failures)} check(s) failed"
        footer = f"{len(report)} checks, {report.checks_run} evaluations: {verdict}"
        if wall_time is not None:
            footer += f" ({wall_time:.2f} s)"
        lines.append(footer)
        return '\n'.join(lines) + '\n'

    @staticmethod
    def diagram_csv(rows):
        """Per-diagram partitions of two arrangements"""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(DIAGRAM_COLUMNS)
        for row in rows:
            writer.writerow([row.diagram, repr(row.first), repr(row.second), repr(row.difference)])
        return out.getvalue()

    @staticmethod
    def render(report, fmt, summary=None, wall_time=None):
        if fmt == 'json':
            return ReportExporter.to_json(report, summary) + '\n'
        if fmt == 'csv':
            return ReportExporter.to_csv(report)
        if fmt == 'table':
            text = ReportExporter.to_table(report, wall_time)
            if summary is not None:
                text += json.dumps(summary, indent=2, sort_keys=True) + '\n'
            return text
        raise InvalidArgument(f"unknown output format: {fmt!r}")


class DomainImporter:
    """
    Handles importing domains from JSON.

    Rhombi are given by four vertices plus the index of the tagged vertex;
    vertices are rotated so the tag comes first and the whole domain is
    revalidated. Optional ``angle`` and ``adjacency`` entries are checked
    against the geometry.
    """

    def __init__(self):
        self.results = {'loaded': 0, 'errors': []}

    def load(self, path):
        try:
            with open(path, encoding='utf-8') as handle:
                data = json.load(handle)
        except (OSError, json.JSONDecodeError) as e:
            logger.error(f"Domain import from {path} failed: {str(e)}")
            self.results['errors'].append(str(e))
            raise InvalidArgument(f"cannot read domain file {path}: {str(e)}")
        try:
            domain = self.from_dict(data)
        except LoopLabError as e:
            logger.error(f"Domain import from {path} failed: {str(e)}")
            self.results['errors'].append(str(e))
            raise
        self.results['loaded'] += 1
        logger.info(f"Loaded domain {domain.name!r} with {len(domain.rhombi)} rhombi from {path}")
        return domain

    def from_dict(self, data):
        if not isinstance(data, dict) or not isinstance(data.get('rhombi'), list):
            raise InvalidArgument("domain JSON needs a 'rhombi' list")
        rhombi = [self._rhombus(rd, k) for k, rd in enumerate(data['rhombi'])]
        anchor = data.get('anchor')
        if anchor is not None:
            anchor = complex(*anchor)
        domain = RhombicDomain(rhombi, anchor=anchor, name=data.get('name', ''))
        if 'adjacency' in data:
            declared = {tuple(sorted((tuple(a), tuple(b)))) for a, b in data['adjacency']}
            actual = {tuple(sorted((a, b))) for a, b in domain.adjacency.items()}
            if declared != actual:
                raise EmbeddingInvalid("declared adjacency does not match the geometry")
        return domain

    @staticmethod
    def _rhombus(rd, position):
        try:
            vertices = [complex(x, y) for x, y in rd['vertices']]
            tag = int(rd.get('tag', 0))
            rhombus_id = int(rd.get('id', position))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument(f"rhombus #{position}: malformed entry ({str(e)})")
        if not 0 <= tag < len(vertices):
            raise InvalidArgument(f"rhombus {rhombus_id}: tag {tag} is not a vertex index")
        rhombus = Rhombus(rhombus_id, tuple(vertices[tag:] + vertices[:tag]), rd.get('role', ''))
        angle = rd.get('angle')
        if angle is not None and abs(rhombus.opening_angle - float(angle)) > GEOMETRY_TOLERANCE:
            raise EmbeddingInvalid(
                f"rhombus {rhombus_id}: declared angle {angle} but the vertices give "
                f"{rhombus.opening_angle}"
            )
        return rhombus

    @staticmethod
    def save(domain, path):
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(domain.to_dict(), handle, indent=2, sort_keys=True)
            handle.write('\n')
        logger.info(f"Saved domain {domain.name!r} to {path}")
