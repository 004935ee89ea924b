import json

import pytest

from commands.zinv import builtin_pairs, run_zinv
from geometry import make_domain_pair
from helpers import EXTRA_ANGLE
from importexport import DomainImporter
from weights import DenseParams

DENSE_ARGS = ['verify', 'dense', '--lambda', '0.9', '--ell', '0', '--alpha', '1.0,2.0']
DILUTE_ARGS = ['verify', 'dilute', '--eta', '0.55', '--alpha', '2.0']


def report_of(result):
    return json.loads(result.stdout)


def test_commands_are_registered(app):
    assert {'verify', 'zinv', 'appendix'} <= set(app.cli.commands)


def test_verify_dense_passes(runner):
    result = runner.invoke(args=DENSE_ARGS + ['--out', 'json'])
    assert result.exit_code == 0, result.output
    report = report_of(result)
    assert report['passed'] is True
    keys = {e['key'] for e in report['entries']}
    assert {'holo.single.dense', 'yb.dense', 'holo.stardiff.prefactor', 'zinv.dense.hexagon'} <= keys


def test_verify_dense_checks_the_extended_domain(runner):
    result = runner.invoke(args=DENSE_ARGS + ['--out', 'json'])
    assert result.exit_code == 0, result.output
    entries = {e['key']: e for e in report_of(result)['entries']}
    for key in ('zinv.dense.extended', 'zinv.dense.extended.boundary'):
        assert entries[key]['pass'] is True
        assert entries[key]['inputs']['rhombi'] == [0, 1, 2]


def test_verify_dense_table_output(runner):
    result = runner.invoke(args=DENSE_ARGS)
    assert result.exit_code == 0
    assert 'all checks passed' in result.stdout


def test_perturbed_weights_fail(runner):
    result = runner.invoke(args=DENSE_ARGS + ['--perturb', 'a:1.01', '--out', 'json'])
    assert result.exit_code == 1
    failed = {e['key'] for e in report_of(result)['entries'] if not e['pass']}
    assert 'holo.single.dense' in failed


def test_shifted_spin_fails(runner):
    result = runner.invoke(args=DENSE_ARGS + ['--perturb', 'sigma:0.1', '--out', 'json'])
    assert result.exit_code == 1
    failed = {e['key'] for e in report_of(result)['entries'] if not e['pass']}
    assert 'determinant.dense' in failed


@pytest.mark.parametrize('extra', [
    ['--alpha', '0.1:0.3'],
    ['--perturb', 't:1.1'],
    ['--perturb', 'a'],
    ['--lambda', '2.0'],
    ['--hex-angles', '0.5', '0.5'],
])
def test_bad_arguments_are_usage_errors(runner, extra):
    result = runner.invoke(args=DENSE_ARGS + extra)
    assert result.exit_code == 2


def test_verify_dilute_passes(runner):
    result = runner.invoke(args=DILUTE_ARGS + ['--out', 'json'])
    assert result.exit_code == 0, result.output
    keys = {e['key'] for e in report_of(result)['entries']}
    assert {'rank.dilute', 'yb.dilute', 'holo.hexagon.dilute', 'zinv.dilute.hexagon'} <= keys


def test_json_reports_are_reproducible(runner):
    args = DENSE_ARGS + ['--out', 'json', '--seed', '5']
    first = runner.invoke(args=args)
    second = runner.invoke(args=args)
    assert first.stdout == second.stdout
    assert report_of(first)['metadata']['seed'] == 5


def test_report_written_to_file(runner, tmp_path):
    path = tmp_path / 'report.csv'
    result = runner.invoke(args=DENSE_ARGS + ['--out', 'csv', '--output', str(path)])
    assert result.exit_code == 0
    assert result.stdout == ''
    assert path.read_text(encoding='utf-8').startswith('key,abs,threshold,pass')


def test_configuration_dump(runner, tmp_path):
    path = tmp_path / 'configs.txt'
    result = runner.invoke(args=DENSE_ARGS + ['--dump-configs', str(path)])
    assert result.exit_code == 0
    assert len(path.read_text(encoding='utf-8').splitlines()) == 8


def test_enumeration_cap_exits_with_failure(runner):
    result = runner.invoke(args=DILUTE_ARGS + ['--max-configs', '100'])
    assert result.exit_code == 1


@pytest.mark.parametrize('args', [['--model', 'dense'], ['--model', 'dilute']])
def test_zinv_builtin_domains(runner, args):
    result = runner.invoke(args=['zinv'] + args + ['--out', 'json'])
    assert result.exit_code == 0, result.output
    keys = {e['key'] for e in report_of(result)['entries']}
    assert keys == {'zinv.partition', 'zinv.boundary', 'zinv.factorized', 'zinv.winding'}


def test_zinv_on_a_saved_domain(runner, tmp_path):
    domain_file = tmp_path / 'star.json'
    diagrams = tmp_path / 'diagrams.csv'
    result = runner.invoke(args=['zinv', '--save-domain', str(domain_file), '--diagrams', str(diagrams)])
    assert result.exit_code == 0
    assert diagrams.read_text(encoding='utf-8').startswith('diagram,P_star,P_triangle,abs_diff')

    result = runner.invoke(args=['zinv', '--domain', str(domain_file), '--out', 'json'])
    assert result.exit_code == 0, result.output
    assert report_of(result)['passed'] is True


def test_zinv_needs_a_hexagon(runner, tmp_path):
    domain_file = tmp_path / 'pair.json'
    DomainImporter.save(make_domain_pair(2.0, 2.2), domain_file)
    result = runner.invoke(args=['zinv', '--domain', str(domain_file)])
    assert result.exit_code == 2


def test_zinv_rejects_bad_parameters(runner):
    assert runner.invoke(args=['zinv', '--lambda', '3.0']).exit_code == 2


def test_appendix_draws(runner):
    result = runner.invoke(args=['appendix', '--draws', '3', '--seed', '4'])
    assert result.exit_code == 0, result.output
    payload = report_of(result)
    assert payload['summary']['draws'] == 3
    assert payload['metadata']['seed'] == 4
    assert 'appendix.nullspace.missing' in {e['key'] for e in payload['entries']}


def test_appendix_single_point(runner):
    result = runner.invoke(args=['appendix', '--draws', '1', '--alpha', '2.0', '--beta', '2.1',
                                 '--eta', '0.5'])
    assert result.exit_code == 0, result.output
    assert report_of(result)['summary']['trivial_nullspace'] == 1


@pytest.mark.parametrize('args', [['--draws', '0'], ['--eta', '0.9']])
def test_appendix_usage_errors(runner, args):
    assert runner.invoke(args=['appendix'] + args).exit_code == 2


def test_zinv_dense_includes_the_extended_domain():
    pairs = builtin_pairs('dense', 2.0, 2.2)
    assert [name for name, _, _ in pairs] == ['hexagon', 'extended[0, 1, 2]']
    assert len(pairs[1][1].rhombi) == 4
    assert pairs[1][1].rhombus(3).opening_angle == pytest.approx(EXTRA_ANGLE)

    report = run_zinv(DenseParams(0.9), pairs[1:], 1e-10)
    assert report.passed
    assert report['zinv.partition'].inputs['domain'] == 'extended[0, 1, 2]'


@pytest.mark.parametrize('args', [['zinv', '--precision', 'high'],
                                  ['appendix', '--draws', '1', '--precision', 'high']])
def test_precision_is_a_verify_option_only(runner, args):
    assert runner.invoke(args=args).exit_code == 2


def test_appendix_rejects_inadmissible_fixed_angles(runner):
    result = runner.invoke(args=['appendix', '--draws', '1', '--alpha', '1.0', '--beta', '1.0'])
    assert result.exit_code == 2
