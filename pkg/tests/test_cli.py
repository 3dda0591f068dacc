from json import dumps, loads

import numpy as np
import pytest

from conftest import Harness
from data_controller.datasets import Dataset
from data_controller.reports import read_report


def same_files(a, b) -> bool:
    files_a = sorted(p.relative_to(a) for p in a.rglob('*') if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob('*') if p.is_file())
    return files_a == files_b and all(
        a.joinpath(f).read_bytes() == b.joinpath(f).read_bytes()
        for f in files_a)


@pytest.fixture(scope='module')
def solved(tmp_path_factory):
    """
    Twenty n = 10 instances with Held-Karp references.
    """
    path = tmp_path_factory.mktemp('data').joinpath('tsp10')
    run = Harness()
    assert run('gen', '--n', 10, '--count', 20, '--seed', 1,
               '--out', path) == 0
    assert run('solve', '--dataset', path) == 0
    return path


def test_gen_is_byte_identical(cli, tmp_path):
    for name in ('a', 'b'):
        assert cli('gen', '--n', 12, '--count', 5, '--seed', 7,
                   '--out', tmp_path.joinpath(name)) == 0
    assert same_files(tmp_path.joinpath('a'), tmp_path.joinpath('b'))
    manifest = loads(tmp_path.joinpath('a', 'manifest.json').read_text())
    assert manifest['id'] == 'tsp12-c5-s7'
    assert manifest['count'] == len(manifest['instances']) == 5


def test_gen_refuses_non_empty_directory(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 5, '--count', 2, '--out', out) == 0
    assert cli('gen', '--n', 5, '--count', 2, '--out', out) == 2
    assert cli('gen', '--n', 6, '--count', 3, '--out', out,
               '--overwrite') == 0
    assert Dataset.load(out).n == 6


def test_minimal_dataset(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 3, '--count', 1, '--seed', 0, '--out', out) == 0
    dataset = Dataset.load(out)
    assert [inst.n for inst in dataset.instances()] == [3]
    assert cli('solve', '--dataset', out) == 0
    assert len(dataset.references()) == 1


def test_deleted_instance_fails_fast(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 5, '--count', 3, '--out', out) == 0
    next(out.joinpath('instances').glob('*.json')).unlink()
    assert cli('solve', '--dataset', out) == 1
    assert 'Dataset error' in cli.messages[-1]


def test_solve_held_karp_provenance(solved):
    references = Dataset.load(solved).references()
    assert len(references) == 20
    assert {r.provenance for r in references.values()} == \
        {'exact-in-process'}
    assert all(r.validated for r in references.values())


def test_brute_force_bound(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 12, '--count', 2, '--out', out) == 0
    assert cli('solve', '--dataset', out, '--method', 'brute') == 1
    assert 'n <= 10' in cli.messages[-1]


def test_import_round_trip(cli, solved, tmp_path):
    exported = tmp_path.joinpath('refs.jsonl')
    exported.write_bytes(Dataset.load(solved).references_path.read_bytes())
    copy = tmp_path.joinpath('copy')
    assert cli('gen', '--n', 10, '--count', 20, '--seed', 1,
               '--out', copy) == 0
    assert cli('solve', '--dataset', copy, '--method', 'import',
               '--import-file', exported) == 0
    assert copy.joinpath('references.jsonl').read_bytes() == \
        exported.read_bytes()


def test_import_needs_a_file(cli, solved):
    assert cli('solve', '--dataset', solved, '--method', 'import') == 2


def test_eval_against_best_known_references(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 24, '--count', 3, '--seed', 5, '--out', out) == 0
    assert cli('solve', '--dataset', out, '--method', 'lk',
               '--starts', 2) == 0
    references = Dataset.load(out).references()
    assert {r.provenance for r in references.values()} == {'best-known'}
    report = tmp_path.joinpath('r')
    for search in ('none', '3opt', 'lk'):
        assert cli('eval', '--dataset', out, '--local-search', search,
                   '--out', report) == 0
    assert len(read_report(report).rows) == 3


def test_eval_without_references(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 6, '--count', 2, '--out', out) == 0
    assert cli('eval', '--dataset', out,
               '--out', tmp_path.joinpath('r')) == 1
    assert 'Missing reference' in cli.messages[-1]


def test_eval_local_search_reduces_gap(cli, solved, tmp_path):
    out = tmp_path.joinpath('report')
    assert cli('eval', '--dataset', solved, '--out', out) == 0
    assert cli('eval', '--dataset', solved, '--local-search', '2-opt',
               '--out', out) == 0
    rows = {row.key: row for row in read_report(out).rows}
    plain = rows['baseline', 'nn', 'none']
    searched = rows['baseline', 'nn', '2opt']
    assert plain.delta == 0.0
    assert searched.base_gap == plain.gap
    assert searched.delta < 0
    assert searched.delta == pytest.approx(searched.gap - plain.gap,
                                           abs=1e-12)
    assert out.joinpath('costs', 'baseline-nn-2opt.jsonl').is_file()
    gaps = loads(out.joinpath('gaps', 'baseline-nn-2opt.json').read_text())
    assert gaps['dataset'] == 'tsp10-c20-s1'
    assert gaps['gap'] == pytest.approx(searched.gap, rel=1e-12)
    assert len(gaps['instances']) == 20
    assert out.joinpath('timing.csv').is_file()
    assert 'report.md' in {p.name for p in out.iterdir()}


def test_eval_replaces_a_repeated_row(cli, solved, tmp_path):
    out = tmp_path.joinpath('report')
    for _ in range(2):
        assert cli('eval', '--dataset', solved, '--out', out) == 0
    assert len(read_report(out).rows) == 1


def test_optimal_submission_has_zero_gap(cli, solved, tmp_path):
    dataset = Dataset.load(solved)
    refs = dataset.references()
    model = tmp_path.joinpath('optimal.json')
    model.write_text(dumps({
        'model': 'optimal',
        'instances': {i: {'tour': list(refs[i].order)}
                      for i in dataset.instance_ids}}))
    out = tmp_path.joinpath('report')
    for search in ('none', '2opt'):
        assert cli('eval', '--dataset', solved, '--model-file', model,
                   '--local-search', search, '--out', out) == 0
    for row in read_report(out).rows:
        assert row.construction == 'tour'
        assert row.gap == pytest.approx(0.0, abs=1e-12)


def test_beam_of_one_row_equals_greedy_row(cli, solved, tmp_path):
    dataset = Dataset.load(solved)
    rng = np.random.default_rng(0)
    model = tmp_path.joinpath('model.json')
    model.write_text(dumps({
        'model': 'random',
        'construction': 'greedy',
        'instances': {i: {'heatmap': (rng.random((10, 10)) + 0.01).tolist()}
                      for i in dataset.instance_ids}}))
    out = tmp_path.joinpath('report')
    assert cli('eval', '--dataset', solved, '--model-file', model,
               '--out', out) == 0
    assert cli('eval', '--dataset', solved, '--model-file', model,
               '--construction', 'bs', '--width', 1, '--out', out) == 0
    rows = {row.construction: row for row in read_report(out).rows}
    assert rows['beam'].gap == rows['greedy'].gap


def test_incomplete_submission(cli, solved, tmp_path):
    first = Dataset.load(solved).instance_ids[0]
    model = tmp_path.joinpath('model.json')
    model.write_text(dumps({'instances': {first: {'tour': list(range(10))}}}))
    assert cli('eval', '--dataset', solved, '--model-file', model,
               '--out', tmp_path.joinpath('r')) == 1
    assert 'exactly once' in cli.messages[-1]


def test_heatmap_construction_needs_submission(cli, solved, tmp_path):
    assert cli('eval', '--dataset', solved, '--construction', 'greedy',
               '--out', tmp_path.joinpath('r')) == 1


def test_unknown_construction_is_a_usage_error(cli, solved, tmp_path):
    with pytest.raises(SystemExit) as info:
        cli('eval', '--dataset', solved, '--construction', 'annealing',
            '--out', tmp_path.joinpath('r'))
    assert info.value.code == 2


def test_report_merging(cli, solved, tmp_path):
    nn, searched = tmp_path.joinpath('nn'), tmp_path.joinpath('2opt')
    assert cli('eval', '--dataset', solved, '--out', nn) == 0
    assert cli('eval', '--dataset', solved, '--local-search', '2opt',
               '--out', searched) == 0

    single = tmp_path.joinpath('single')
    assert cli('report', nn, '--out', single) == 0
    for name in ('report.csv', 'timing.csv', 'report.md'):
        assert single.joinpath(name).read_bytes() == \
            nn.joinpath(name).read_bytes()

    merged = tmp_path.joinpath('merged')
    assert cli('report', nn, searched.joinpath('report.csv'),
               '--out', merged) == 0
    assert [r.local_search for r in read_report(merged).rows] == \
        ['none', '2opt']

    assert cli('report', nn, nn) == 1
    assert cli('report') == 2
    assert cli('report', nn) == 0
    assert cli.messages[-1].startswith('Dataset: tsp10-c20-s1')


def test_report_rejects_mixed_datasets(cli, solved, tmp_path):
    other = tmp_path.joinpath('other')
    assert cli('gen', '--n', 5, '--count', 2, '--out', other) == 0
    assert cli('solve', '--dataset', other) == 0
    a, b = tmp_path.joinpath('a'), tmp_path.joinpath('b')
    assert cli('eval', '--dataset', solved, '--out', a) == 0
    assert cli('eval', '--dataset', other, '--out', b) == 0
    assert cli('report', a, b) == 1
    assert cli('eval', '--dataset', other, '--out', a) == 1


def test_rod_of_nearest_neighbour(cli, solved, tmp_path):
    out = tmp_path.joinpath('rod')
    assert cli('rod', '--dataset', solved, '--costs-or-model', 'nn',
               '--k', 0.05, '--out', out) == 0
    report = loads(out.joinpath('rod.json').read_text())
    assert 0.0 <= report['rod'] <= 1.0
    assert report['curve'][-1]['alpha'] == report['rod']
    lines = out.joinpath('rod_curve.csv').read_text().splitlines()
    assert lines[0] == 'alpha,gap'
    assert len(lines) == len(report['curve']) + 1


def test_rod_from_eval_costs_matches_nn(cli, solved, tmp_path):
    evaluated = tmp_path.joinpath('report')
    assert cli('eval', '--dataset', solved, '--out', evaluated) == 0
    from_costs, from_nn = tmp_path.joinpath('a'), tmp_path.joinpath('b')
    assert cli('rod', '--dataset', solved, '--costs-or-model',
               evaluated.joinpath('costs', 'baseline-nn-none.jsonl'),
               '--k', 0.1, '--out', from_costs) == 0
    assert cli('rod', '--dataset', solved, '--costs-or-model', 'nn',
               '--k', 0.1, '--out', from_nn) == 0
    assert same_files(from_costs, from_nn)


def test_eval_with_rod_fills_the_column(cli, solved, tmp_path):
    out = tmp_path.joinpath('report')
    assert cli('eval', '--dataset', solved, '--rod', '--k', 0.1,
               '--bisect', '--coarse-k', 0.5, '--out', out) == 0
    row = read_report(out).rows[0]
    rod = loads(out.joinpath('rod', 'baseline-nn-none', 'rod.json')
                .read_text())
    assert row.rod == rod['rod']


def test_rod_beyond_held_karp_bound(cli, tmp_path):
    out = tmp_path.joinpath('d')
    assert cli('gen', '--n', 21, '--count', 1, '--out', out) == 0
    assert cli('solve', '--dataset', out, '--method', 'lk',
               '--starts', 1) == 0
    assert cli('rod', '--dataset', out, '--costs-or-model', 'nn',
               '--out', tmp_path.joinpath('rod')) == 1
    assert 'n <= 20' in cli.messages[-1]


def test_help_and_info(cli):
    assert cli('help') == 0
    general = cli.messages[-1]
    assert general.startswith('ROD-Harness Help')
    assert 'Datasets Commands: gen, solve' in general
    assert cli('help', 'eval') == 0
    assert 'rod-harness eval --dataset' in cli.messages[-1]
    assert cli('help', 'nothing') == 0
    assert cli.messages[-1] == general
    assert cli('info') == 0
    assert 'ratio of optimal decisions' in cli.messages[-1]


@pytest.mark.slow
def test_pipeline_is_reproducible(tmp_path):
    def pipeline(root):
        run = Harness()
        data, out = root.joinpath('data'), root.joinpath('out')
        assert run('gen', '--n', 12, '--count', 100, '--seed', 7,
                   '--out', data) == 0
        assert run('solve', '--dataset', data) == 0
        for search in ('none', '2opt', '3opt', 'lk'):
            assert run('eval', '--dataset', data, '--local-search', search,
                       '--out', out) == 0
        assert run('rod', '--dataset', data, '--costs-or-model', 'nn',
                   '--k', 0.01, '--bisect', '--out', root.joinpath('rod')) == 0
        return root

    first = pipeline(tmp_path.joinpath('first'))
    second = pipeline(tmp_path.joinpath('second'))
    for name in ('data', 'rod'):
        assert same_files(first.joinpath(name), second.joinpath(name))
    assert first.joinpath('out', 'report.csv').read_bytes() == \
        second.joinpath('out', 'report.csv').read_bytes()
    assert same_files(first.joinpath('out', 'costs'),
                      second.joinpath('out', 'costs'))
    nn = loads(first.joinpath('rod', 'rod.json').read_text())
    assert 0.5 < nn['rod'] < 1.0
