"""
Model outputs brought in as files: tours or heatmaps per instance, and the
per-instance cost files written by `eval`.
"""
from json import dumps, loads
from pathlib import Path
from typing import Dict, List, Sequence

from core.checks import InvalidTour, SubmissionError
from core.evaluation import SUBMITTED, InstanceOutcome
from core.heatmap import Heatmap, load_heatmap
from core.rod import GapReport
from core.tsp import Tour
from data_controller.datasets import Dataset

KINDS = ('tour', 'heatmap', 'heatmap_file')


def _no_duplicates(pairs):
    seen = {}
    for key, val in pairs:
        if key in seen:
            raise SubmissionError(f'instance {key} appears more than once')
        seen[key] = val
    return seen


class ModelSubmission:
    """
    Either a tour or a heatmap for every instance of a dataset, plus the
    construction procedure the model declares and its parameters.
    """
    __slots__ = ('model', 'construction', 'params', 'kind', 'sources')

    def __init__(self, model: str, construction: str, params: dict,
                 kind: str, sources: dict):
        self.model = model
        self.construction = construction
        self.params = params
        self.kind = kind
        self.sources = sources

    @property
    def has_tours(self) -> bool:
        return self.kind == 'tour'

    @classmethod
    def load(cls, path: Path, dataset: Dataset):
        """
        Read a submission file:
        {"model": str, "construction": str, "params": {...},
         "instances": {id: {"tour": [...]} | {"heatmap": [[...]]}
                       | {"heatmap_file": "relative/path.csv"}}}

        :raises SubmissionError: if the file does not cover every instance
            of the dataset exactly once, or mixes tours and heatmaps.
        """
        try:
            obj = loads(path.read_text(encoding='utf-8'),
                        object_pairs_hook=_no_duplicates)
        except ValueError as e:
            raise SubmissionError(f'{path.name}: {e}')
        entries = obj.get('instances')
        if not isinstance(entries, dict):
            raise SubmissionError(f'{path.name}: missing "instances"')
        expected = dataset.instance_ids
        missing = [i for i in expected if i not in entries]
        extra = sorted(set(entries) - set(expected))
        if missing or extra:
            raise SubmissionError(
                f'{path.name} must cover the dataset exactly once; missing '
                f'{missing[:10]}, unknown {extra[:10]}')

        kinds = set()
        sources = {}
        for instance_id in expected:
            entry = entries[instance_id]
            kind = next((k for k in KINDS if k in entry), None)
            if kind is None:
                raise SubmissionError(f'instance {instance_id} has neither a '
                                      f'tour nor a heatmap')
            if kind == 'tour':
                kinds.add('tour')
                sources[instance_id] = tuple(int(v) for v in entry['tour'])
                continue
            kinds.add('heatmap')
            if kind == 'heatmap':
                heatmap = Heatmap(entry['heatmap'])
            else:
                heatmap = load_heatmap(path.parent.joinpath(entry[kind]))
            if heatmap.n != dataset.n:
                raise SubmissionError(f'heatmap of {instance_id} is '
                                      f'{heatmap.n} x {heatmap.n}, dataset '
                                      f'has n = {dataset.n}')
            sources[instance_id] = heatmap
        if len(kinds) > 1:
            raise SubmissionError(f'{path.name} mixes tours and heatmaps')
        kind = kinds.pop()
        default = SUBMITTED if kind == 'tour' else 'greedy'
        return cls(str(obj.get('model', path.stem)),
                   str(obj.get('construction', default)),
                   dict(obj.get('params', {})), kind, sources)


def write_costs(path: Path, outcomes: Sequence[InstanceOutcome]):
    """
    Write the final tour of every instance as JSON lines
    {"id", "cost", "order"}, the order in canonical form.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [dumps({'id': o.instance_id, 'cost': o.improved.cost,
                    'order': list(o.improved.canonical())})
             for o in outcomes]
    path.write_text(''.join(line + '\n' for line in lines), encoding='utf-8')


def write_gaps(path: Path, report: GapReport):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(report.to_json(), indent=2) + '\n',
                    encoding='utf-8')


def load_costs(path: Path, dataset: Dataset) -> List[float]:
    """
    Read a cost file written by `eval`. Every order is checked against its
    instance and must reproduce the recorded cost.

    :return: the costs in manifest order.
    :raises SubmissionError: if the file does not cover the dataset.
    :raises InvalidTour: if an order is invalid or disagrees with its cost.
    """
    tours: Dict[str, Tour] = {}
    for line in path.read_text(encoding='utf-8').splitlines():
        if not line.strip():
            continue
        obj = loads(line)
        if obj['id'] in tours:
            raise SubmissionError(f'instance {obj["id"]} appears more than '
                                  f'once in {path.name}')
        tours[obj['id']] = Tour(tuple(obj['order']), float(obj['cost']))
    missing = [i for i in dataset.instance_ids if i not in tours]
    if missing or len(tours) != len(dataset.instance_ids):
        raise SubmissionError(f'{path.name} does not cover the dataset; '
                              f'missing {missing[:10]}')
    for instance in dataset.instances():
        tour = tours[instance.instance_id]
        try:
            tour.validate(instance)
        except InvalidTour as e:
            raise InvalidTour(e.reason, e.index, instance.instance_id,
                              path.name)
    return [tours[i].cost for i in dataset.instance_ids]
