import logging
from json import dumps, loads

import pytest

from core.checks import ClaimsBeatOptimum, DatasetError, InvalidTour, \
    ReportError, SubmissionError, UsageError
from core.evaluation import EvaluationHandler, ExperimentRow, \
    SearchSettings, evaluate_instance
from core.exact import ReferenceSolution, held_karp
from data_controller.datasets import MANIFEST, Dataset, instance_seeds
from data_controller.reports import ExperimentReport, merge_reports, \
    render_markdown
from data_controller.submissions import ModelSubmission, load_costs, \
    write_costs


@pytest.fixture
def dataset(tmp_path):
    data = Dataset.create(tmp_path.joinpath('d'), 6, 3, 4)
    data.save_references([held_karp(i)[0] for i in data.instances()])
    return data


def write_submission(path, instances: dict, **extra):
    path.write_text(dumps(dict(extra, instances=instances)))
    return path


def test_instance_seeds_are_stable():
    assert instance_seeds(4, 3) == instance_seeds(4, 3)
    assert instance_seeds(4, 3)[:2] == instance_seeds(4, 2)
    assert len(set(instance_seeds(4, 50))) == 50


def test_dataset_ids(dataset):
    assert dataset.dataset_id == 'tsp6-c3-s4'
    assert dataset.instance_ids == ['0000', '0001', '0002']
    assert set(dataset.references()) == set(dataset.instance_ids)


def test_tampered_instance_is_rejected(dataset):
    file = dataset.path.joinpath('instances', '0001.json')
    obj = loads(file.read_text())
    obj['coords'][0][0] = 0.5
    file.write_text(dumps(obj) + '\n')
    with pytest.raises(DatasetError) as info:
        Dataset.load(dataset.path)
    assert '0001' in str(info.value)


def test_bad_manifests(tmp_path):
    with pytest.raises(DatasetError):
        Dataset.load(tmp_path)
    tmp_path.joinpath(MANIFEST).write_text('{not json')
    with pytest.raises(DatasetError):
        Dataset.load(tmp_path)
    tmp_path.joinpath(MANIFEST).write_text(dumps({'id': 'x', 'n': 3}))
    with pytest.raises(DatasetError) as info:
        Dataset.load(tmp_path)
    assert 'count' in str(info.value)


def test_create_rejects_empty_dataset(tmp_path):
    with pytest.raises(UsageError):
        Dataset.create(tmp_path.joinpath('d'), 5, 0, 0)


def test_tour_submission(dataset, tmp_path):
    path = write_submission(
        tmp_path.joinpath('m.json'),
        {i: {'tour': [0, 1, 2, 3, 4, 5]} for i in dataset.instance_ids},
        model='m')
    submission = ModelSubmission.load(path, dataset)
    assert submission.has_tours
    assert submission.construction == 'tour'
    assert submission.sources['0000'] == (0, 1, 2, 3, 4, 5)


def test_heatmap_file_submission(dataset, tmp_path):
    tmp_path.joinpath('maps').mkdir()
    tmp_path.joinpath('maps', 'h.csv').write_text(
        '\n'.join(','.join('1' for _ in range(6)) for _ in range(6)) + '\n')
    path = write_submission(
        tmp_path.joinpath('m.json'),
        {i: {'heatmap_file': 'maps/h.csv'} for i in dataset.instance_ids},
        params={'width': 4})
    submission = ModelSubmission.load(path, dataset)
    assert submission.model == 'm'
    assert submission.construction == 'greedy'
    assert submission.params == {'width': 4}
    assert submission.sources['0002'].n == 6


def test_mixed_submission(dataset, tmp_path):
    ids = dataset.instance_ids
    entries = {i: {'tour': list(range(6))} for i in ids}
    entries[ids[1]] = {'heatmap': [[1] * 6] * 6}
    with pytest.raises(SubmissionError) as info:
        ModelSubmission.load(write_submission(tmp_path.joinpath('m.json'),
                                              entries), dataset)
    assert 'mixes' in str(info.value)


def test_duplicate_instance_in_submission(dataset, tmp_path):
    ids = dataset.instance_ids
    body = ', '.join(f'"{i}": {{"tour": [0, 1, 2, 3, 4, 5]}}'
                     for i in ids + ids[:1])
    path = tmp_path.joinpath('m.json')
    path.write_text(f'{{"instances": {{{body}}}}}')
    with pytest.raises(SubmissionError) as info:
        ModelSubmission.load(path, dataset)
    assert 'more than once' in str(info.value)


def test_wrong_heatmap_size(dataset, tmp_path):
    path = write_submission(
        tmp_path.joinpath('m.json'),
        {i: {'heatmap': [[1] * 5] * 5} for i in dataset.instance_ids})
    with pytest.raises(SubmissionError):
        ModelSubmission.load(path, dataset)


def test_invalid_submitted_tour_names_instance(dataset):
    inst = dataset.instances()[1]
    with pytest.raises(InvalidTour) as info:
        evaluate_instance((inst, (0, 1, 2, 3, 4, 4), SearchSettings()))
    assert info.value.instance_id == inst.instance_id
    assert info.value.procedure == 'tour'


def test_costs_file(dataset, tmp_path):
    handler = EvaluationHandler(dataset.instances(), dataset.references(),
                                SearchSettings(local_search='2opt'))
    outcomes = handler.run()
    path = tmp_path.joinpath('costs', 'c.jsonl')
    write_costs(path, outcomes)
    assert load_costs(path, dataset) == handler.final_costs()
    path.write_text(path.read_text().splitlines()[0] + '\n')
    with pytest.raises(SubmissionError):
        load_costs(path, dataset)


def _row(model, search, gap=0.1):
    return ExperimentRow(model, 'nn', search, gap, gap, gap, 0.0, 0.5, None)


def test_merge_reports():
    a = ExperimentReport('d', (_row('a', 'none'),))
    b = ExperimentReport('d', (_row('a', '2opt'),))
    assert [r.key for r in merge_reports([a, b]).rows] == [
        ('a', 'nn', 'none'), ('a', 'nn', '2opt')]
    with pytest.raises(ReportError):
        merge_reports([a, a])
    with pytest.raises(ReportError):
        merge_reports([a, ExperimentReport('e', ())])
    with pytest.raises(UsageError):
        merge_reports([])


def test_markdown_table():
    text = render_markdown(ExperimentReport('d', (_row('a', 'none', 0.1234),
                                                  _row('bb', 'lk', 0.01))))
    lines = text.splitlines()
    assert lines[0] == 'Dataset: d'
    table = [line for line in lines if line.startswith('|')]
    assert len(table) == 4
    assert len({len(line) for line in table}) == 1
    assert '12.34' in table[2]
    assert 'machine-relative' in text


@pytest.mark.parametrize('source', ['multi-start-lk', 'held-karp'])
def test_tours_beating_their_reference(dataset, source, caplog):
    handler = EvaluationHandler(dataset.instances(), {},
                                SearchSettings(local_search='2opt'))
    outcomes = handler.run()
    handler.references = {
        o.instance_id: ReferenceSolution(o.instance_id,
                                         o.improved.cost + 0.01, None,
                                         source, False)
        for o in outcomes}
    if source == 'held-karp':
        with pytest.raises(ClaimsBeatOptimum):
            handler.row('m')
        return
    with caplog.at_level(logging.WARNING, logger='core.evaluation'):
        row = handler.row('m', dataset_id=dataset.dataset_id)
    assert row.gap < 0
    assert handler.gap_report.dataset_id == dataset.dataset_id
    assert 'beats the best-known reference' in caplog.text


def test_cost_file_orders_are_checked(dataset, tmp_path):
    handler = EvaluationHandler(dataset.instances(), dataset.references(),
                                SearchSettings())
    path = tmp_path.joinpath('c.jsonl')
    write_costs(path, handler.run())
    records = [loads(line) for line in path.read_text().splitlines()]
    assert all(r['order'][0] == 0 and r['order'][1] < r['order'][-1]
               for r in records)
    records[2]['cost'] += 0.5
    path.write_text(''.join(dumps(r) + '\n' for r in records))
    with pytest.raises(InvalidTour) as info:
        load_costs(path, dataset)
    assert info.value.instance_id == '0002'
