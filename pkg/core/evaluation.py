"""
Runs a construction and an optional local search over a dataset and turns
the resulting tours into experiment rows.
"""
import logging
from collections import namedtuple
from time import perf_counter
from typing import Callable, Mapping, Sequence

from core.checks import InvalidTour, SubmissionError
from core.construction import construct
from core.exact import BEST_KNOWN
from core.heatmap import Heatmap
from core.local_search import LK_DEPTH, LK_NEIGHBORS, improve
from core.rod import aggregate_gap
from core.tsp import Tour, TspInstance

CONSTRUCTIONS = ('nn', 'greedy', 'sample', 'beam', 'beam-st')
LOCAL_SEARCHES = ('none', '2opt', '3opt', 'lk')
# Tag of tours handed in directly by a model.
SUBMITTED = 'tour'

logger = logging.getLogger(__name__)


class SearchSettings(namedtuple('SearchSettings', (
        'construction', 'local_search', 'iterations', 'width', 'lk_depth',
        'lk_neighbors', 'seed'))):
    __slots__ = ()

    def __new__(cls, construction: str = 'nn', local_search: str = 'none',
                iterations: int = 16, width: int = 16,
                lk_depth: int = LK_DEPTH, lk_neighbors: int = LK_NEIGHBORS,
                seed: int = 0):
        return super().__new__(cls, construction, local_search, iterations,
                               width, lk_depth, lk_neighbors, seed)


class InstanceOutcome(namedtuple('InstanceOutcome', (
        'instance_id', 'constructed', 'improved', 'construction_time',
        'search_time', 'moves'))):
    """
    Tours before and after local search on one instance. Times are in
    seconds and cover the procedures only.
    """
    __slots__ = ()

    @property
    def wall_time(self) -> float:
        return self.construction_time + self.search_time


class ExperimentRow(namedtuple('ExperimentRow', (
        'model', 'construction', 'local_search', 'gap', 'classical_gap',
        'base_gap', 'delta', 'mean_time', 'rod'))):
    """
    One line of an experiment table. `base_gap` is the gap of the same
    construction without local search, and `delta` = gap - base_gap.
    """
    __slots__ = ()

    @property
    def key(self) -> tuple:
        return self.model, self.construction, self.local_search

    @property
    def name(self) -> str:
        return '-'.join(self.key)


def _checked(instance: TspInstance, order, procedure: str) -> Tour:
    try:
        tour = Tour.of(instance, order)
    except InvalidTour as e:
        raise InvalidTour(e.reason, e.index, instance.instance_id, procedure)
    return tour


def evaluate_instance(job) -> InstanceOutcome:
    """
    Construction then local search on a single instance.

    :param job: (instance, source, settings), where source is None for the
        nearest neighbour baseline, a submitted vertex order, or a Heatmap.
    :raises InvalidTour: naming the instance and the procedure that produced
        the invalid tour.
    """
    instance, source, settings = job
    t0 = perf_counter()
    if source is None or isinstance(source, Heatmap):
        result = construct(instance, settings.construction, source,
                           settings.iterations, settings.width, settings.seed)
        constructed = _checked(instance, result.tour.order, result.procedure)
    else:
        constructed = _checked(instance, source, SUBMITTED)
    construction_time = perf_counter() - t0

    search = improve(instance, constructed, settings.local_search,
                     settings.lk_depth, settings.lk_neighbors, settings.seed)
    improved = _checked(instance, search.tour.order, search.procedure)
    if improved.cost > constructed.cost:
        raise InvalidTour(f'cost rose from {constructed.cost!r} to '
                          f'{improved.cost!r}', None, instance.instance_id,
                          search.procedure)
    return InstanceOutcome(instance.instance_id, constructed, improved,
                           construction_time, search.wall_time, search.moves)


class EvaluationHandler:
    """
    Evaluates one model configuration over a dataset.
    """
    __slots__ = ('instances', 'references', 'settings', 'mapper', 'outcomes',
                 'gap_report')

    def __init__(self, instances: Sequence[TspInstance], references: Mapping,
                 settings: SearchSettings, mapper: Callable = map):
        """
        :param instances: the dataset instances, in manifest order.
        :param references: ReferenceSolution by instance id.
        :param settings: construction and local search settings.
        :param mapper: order-preserving map for the per-instance work.
        """
        self.instances = list(instances)
        self.references = references
        self.settings = settings
        self.mapper = mapper
        self.outcomes = []
        self.gap_report = None

    def run(self, sources: Mapping = None) -> list:
        """
        :param sources: submitted tour or heatmap by instance id; None runs
            the nearest neighbour baseline.
        :return: one InstanceOutcome per instance, in dataset order.
        """
        if sources is None and self.settings.construction != 'nn':
            raise SubmissionError(f'construction '
                                  f'{self.settings.construction} needs a '
                                  f'model submission')
        sources = sources or {}
        jobs = [(inst, sources.get(inst.instance_id), self.settings)
                for inst in self.instances]
        self.outcomes = list(self.mapper(evaluate_instance, jobs))
        return self.outcomes

    def row(self, model: str, construction: str = None,
            gap_mode: str = 'ratio-of-sums',
            dataset_id: str = '') -> ExperimentRow:
        """
        Summarise the last run. Against proven optima a tour cheaper than
        its reference is an error; best-known references only log it.
        The final GapReport is kept in `gap_report`.
        """
        references = [self.references[o.instance_id] for o in self.outcomes]
        refs = [r.cost for r in references]
        strict = all(r.provenance != BEST_KNOWN for r in references)
        if not strict:
            for o, r in zip(self.outcomes, references):
                if o.improved.cost < r.cost:
                    logger.log(logging.WARNING,
                               f'{o.instance_id}: tour cost '
                               f'{o.improved.cost!r} beats the best-known '
                               f'reference {r.cost!r}')
        base = aggregate_gap([o.constructed.cost for o in self.outcomes],
                             refs, dataset_id, gap_mode, strict)
        final = aggregate_gap([o.improved.cost for o in self.outcomes],
                              refs, dataset_id, gap_mode, strict)
        self.gap_report = final
        mean_time = sum(o.wall_time for o in self.outcomes) / len(refs)
        return ExperimentRow(model, construction or self.settings.construction,
                             self.settings.local_search, final.gap,
                             final.classical_gap, base.gap,
                             final.gap - base.gap, mean_time, None)

    def final_costs(self) -> list:
        return [o.improved.cost for o in self.outcomes]
