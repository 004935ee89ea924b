import csv
import io
import json
import math

import pytest

from errors import EmbeddingInvalid, InvalidArgument
from geometry import make_domain_hexagon, make_domain_single
from importexport import DIAGRAM_COLUMNS, REPORT_COLUMNS, DomainImporter, ReportExporter
from observable import hexagon_domains
from report import ResidualReport
from weights import DenseParams
from zinvariance import diagram_rows


@pytest.fixture
def report():
    report = ResidualReport(seed=7)
    report.record('holo.single', 1e-14, 1e-10, alpha=0.5)
    report.record('holo.single', 3e-13 + 1e-13j, 1e-10, alpha=1.5)
    report.record('holo.single', 2e-15, 1e-10, alpha=2.5)
    report.record('yb.dense', 1e-3, 1e-10, alpha=1.0, beta=2.0)
    report.note('appendix.prefactor', 0.5 + 0.25j)
    return report


def test_worst_entry_per_key(report):
    entry = report['holo.single']
    assert entry.inputs == {'alpha': 1.5}
    assert entry.abs == pytest.approx(abs(3e-13 + 1e-13j))
    assert report.checks_run == 4
    assert len(report) == 2


def test_failures(report):
    assert not report.passed
    assert [e.key for e in report.failures] == ['yb.dense']


def test_nan_never_passes():
    report = ResidualReport()
    report.record('check', 1e-20, 1e-10)
    report.record('check', float('nan'), 1e-10)
    report.record('check', 1.0, 1e-10)
    assert math.isnan(report['check'].abs)
    assert not report.passed


def test_merge_keeps_worst(report):
    other = ResidualReport()
    other.record('holo.single', 5e-11, 1e-10, alpha=3.0)
    other.record('rank.dilute', 0, 0)
    report.merge(other)
    assert report['holo.single'].inputs == {'alpha': 3.0}
    assert 'rank.dilute' in report
    assert report.checks_run == 6


def test_json_is_deterministic(report):
    text = ReportExporter.to_json(report, summary={'draws': 3})
    assert text == ReportExporter.to_json(report, summary={'draws': 3})
    payload = json.loads(text)
    assert payload['metadata'] == {'precision': 'double', 'seed': 7, 'version': report.version}
    assert payload['passed'] is False
    assert payload['summary'] == {'draws': 3}
    assert payload['notes']['appendix.prefactor'] == [0.5, 0.25]
    assert [e['key'] for e in payload['entries']] == ['holo.single', 'yb.dense']


def test_csv_export(report):
    rows = list(csv.reader(io.StringIO(ReportExporter.to_csv(report))))
    assert tuple(rows[0]) == REPORT_COLUMNS
    assert rows[2][0] == 'yb.dense'
    assert rows[2][3] == 'False'
    assert json.loads(rows[2][6]) == {'alpha': 1.0, 'beta': 2.0}


def test_table_export(report):
    text = ReportExporter.render(report, 'table', wall_time=0.25)
    assert 'FAIL' in text
    assert '1 check(s) failed' in text
    assert '(0.25 s)' in text


def test_unknown_format(report):
    with pytest.raises(InvalidArgument):
        ReportExporter.render(report, 'xml')


def test_diagram_csv():
    rows = diagram_rows(*hexagon_domains(2.0, 2.2), DenseParams(0.9))
    lines = list(csv.reader(io.StringIO(ReportExporter.diagram_csv(rows))))
    assert tuple(lines[0]) == DIAGRAM_COLUMNS
    assert len(lines) == len(rows) + 1


def test_domain_round_trip(tmp_path):
    star = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2)
    path = tmp_path / 'star.json'
    DomainImporter.save(star, path)
    importer = DomainImporter()
    loaded = importer.load(path)
    assert loaded == star
    assert loaded.name == star.name
    assert importer.results['loaded'] == 1


def test_tag_rotation():
    rhombus = make_domain_single(1.0).rhombus(0)
    vertices = rhombus.vertices[1:] + rhombus.vertices[:1]
    data = {'rhombi': [{'id': 0, 'tag': 3, 'role': 'alpha',
                        'vertices': [[v.real, v.imag] for v in vertices]}]}
    loaded = DomainImporter().from_dict(data)
    assert loaded.rhombus(0).vertices == pytest.approx(rhombus.vertices)


def test_declared_angle_must_match():
    rhombus = make_domain_single(1.0).rhombus(0)
    data = {'rhombi': [{'angle': 1.2, 'vertices': [[v.real, v.imag] for v in rhombus.vertices]}]}
    with pytest.raises(EmbeddingInvalid):
        DomainImporter().from_dict(data)


def test_declared_adjacency_must_match():
    data = make_domain_hexagon(2.0, 2.2, 2 * math.pi - 4.2).to_dict()
    data['adjacency'] = data['adjacency'][:1]
    with pytest.raises(EmbeddingInvalid):
        DomainImporter().from_dict(data)


@pytest.mark.parametrize('data', [{}, {'rhombi': 'none'}, {'rhombi': [{'tag': 0}]},
                                  {'rhombi': [{'tag': 7, 'vertices': [[0, 0], [1, 0], [1, 1], [0, 1]]}]}])
def test_malformed_domains(data):
    with pytest.raises(InvalidArgument):
        DomainImporter().from_dict(data)


def test_unreadable_domain_file(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{not json', encoding='utf-8')
    importer = DomainImporter()
    with pytest.raises(InvalidArgument):
        importer.load(path)
    assert importer.results['errors']
