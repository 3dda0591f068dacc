"""
Optimality gaps and the ratio of optimal decisions (ROD): the smallest
oracle accuracy whose average gap is no worse than the evaluated model's.
"""
import csv
import logging
from collections import namedtuple
from io import StringIO
from math import ceil
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from core.checks import ClaimsBeatOptimum, MissingReferences, UsageError, \
    ValidationError
from core.cop import Rollout
from core.exact import BEST_KNOWN
from core.oracle import OracleConfig, OracleOutcome, run_oracle

GAP_MODES = ('ratio-of-sums', 'mean-of-ratios')
BEAT_TOLERANCE = 1e-9
# Absolute slack on the stopping test, so the alpha = 1 point always stops.
GAP_SLACK = 1e-12

logger = logging.getLogger(__name__)


class GapReport(namedtuple('GapReport', (
        'dataset_id', 'model_costs', 'reference_costs', 'gap',
        'classical_gap', 'mode'))):
    """
    `gap` is 1 - c*/c and `classical_gap` is (c - c*)/c*, either on dataset
    sums (ratio-of-sums) or averaged per instance (mean-of-ratios).
    """
    __slots__ = ()

    def to_json(self) -> dict:
        return {
            'dataset': self.dataset_id,
            'mode': self.mode,
            'gap': self.gap,
            'classical_gap': self.classical_gap,
            'instances': [{'model_cost': m, 'reference_cost': r}
                          for m, r in zip(self.model_costs,
                                          self.reference_costs)],
        }


class RodReport(namedtuple('RodReport', (
        'alpha', 'k', 'curve', 'model_gap', 'seed', 'gap_mode',
        'dataset_id'))):
    """
    The returned accuracy, the (alpha, oracle gap) points evaluated in
    increasing alpha, and the model's gap they were compared with.
    """
    __slots__ = ()

    def to_json(self) -> dict:
        return {
            'dataset': self.dataset_id,
            'rod': self.alpha,
            'k': self.k,
            'seed': self.seed,
            'gap_mode': self.gap_mode,
            'model_gap': self.model_gap,
            'curve': [{'alpha': a, 'gap': g} for a, g in self.curve],
        }

    def curve_csv(self) -> str:
        """
        :return: the curve as CSV text with columns alpha, gap.
        """
        buffer = StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(('alpha', 'gap'))
        writer.writerows((repr(a), repr(g)) for a, g in self.curve)
        return buffer.getvalue()


def aggregate_gap(model_costs: Sequence[float],
                  reference_costs: Sequence[float], dataset_id: str = '',
                  mode: str = 'ratio-of-sums',
                  strict: bool = True) -> GapReport:
    """
    Gap of a set of solutions against their references. With the default
    mode the costs are summed over the dataset before the ratio is taken.

    :param strict: reject a model cost below its reference cost by more
        than 1e-9 relative.
    :raises ClaimsBeatOptimum: in strict mode, on a cost below optimum.
    """
    if len(model_costs) != len(reference_costs):
        raise ValidationError(f'{len(model_costs)} model costs for '
                              f'{len(reference_costs)} references')
    if not model_costs:
        raise ValidationError('cannot compute a gap over no instances')
    if mode not in GAP_MODES:
        raise UsageError(f'unknown gap mode {mode}')
    for i, (c, ref) in enumerate(zip(model_costs, reference_costs)):
        if not ref > 0:
            raise ValidationError(f'reference cost at position {i} is not '
                                  f'positive: {ref!r}')
        if strict and c < ref - BEAT_TOLERANCE * ref:
            raise ClaimsBeatOptimum(i, c, ref)
    if mode == 'ratio-of-sums':
        total, total_ref = sum(model_costs), sum(reference_costs)
        gap = 1.0 - total_ref / total
        classical = (total - total_ref) / total_ref
    else:
        k = len(model_costs)
        gap = sum(1.0 - r / c for c, r in zip(model_costs,
                                              reference_costs)) / k
        classical = sum((c - r) / r for c, r in zip(model_costs,
                                                    reference_costs)) / k
    return GapReport(dataset_id, tuple(model_costs), tuple(reference_costs),
                     gap, classical, mode)


# Processes of the running scan, installed once per worker.
_processes = ()


def install_processes(processes: Sequence):
    """
    Make the decision processes of a dataset available to `_oracle_outcome`.
    Used as the initializer of worker pools.
    """
    global _processes
    _processes = tuple(processes)


def _oracle_outcome(job) -> OracleOutcome:
    index, config = job
    return run_oracle(_processes[index], config)


def alpha_seed(seed: int, alpha_index: int) -> int:
    """
    Seed of the grid point `alpha_index`, derived from the base seed.
    """
    sequence = np.random.SeedSequence([seed, alpha_index])
    return int(sequence.generate_state(1)[0])


def compute_rod(processes: Sequence, references: Mapping,
                model_costs: Sequence[float], config: OracleConfig,
                k: float = 0.001, mapper: Callable = map,
                bisect: bool = False, coarse_k: float = 0.05,
                gap_mode: str = 'ratio-of-sums',
                dataset_id: str = '') -> RodReport:
    """
    Scan alpha = 0, k, 2k, ... and stop at the first point where the
    oracle's gap over the whole dataset is no larger than the model's.

    :param processes: one decision process per instance, in dataset order.
    :param references: ReferenceSolution by instance id.
    :param model_costs: the model's cost per instance, in dataset order.
    :param config: oracle settings; its alpha is ignored and its seed is
        the base seed of the per-point streams.
    :param k: grid step, in (0, 1].
    :param mapper: order-preserving map used for the per-instance work. A
        pool behind it must run `install_processes(processes)` in each
        worker.
    :param bisect: scan a coarse grid of step `coarse_k` first, then bisect
        on the fine grid inside the bracketing interval.
    :raises MissingReferences: if an instance has no reference.
    """
    if not 0.0 < k <= 1.0:
        raise UsageError(f'step k must lie in (0, 1], got {k}')
    ids = [p.instance.instance_id for p in processes]
    missing = [i for i in ids if i not in references]
    if missing:
        raise MissingReferences(missing)
    if len(model_costs) != len(ids):
        raise ValidationError(f'{len(model_costs)} model costs for '
                              f'{len(ids)} instances')
    ref_costs = [references[i].cost for i in ids]
    strict = all(references[i].provenance != BEST_KNOWN for i in ids)
    install_processes(processes)
    model_gap = aggregate_gap(model_costs, ref_costs, dataset_id,
                              gap_mode, strict).gap

    last = int(round(1.0 / k))
    if abs(last * k - 1.0) > 1e-9:
        last = ceil(1.0 / k)
    evaluated = {}

    def gap_at(index: int) -> float:
        alpha = min(index * k, 1.0) if index < last else 1.0
        point = config._replace(alpha=alpha,
                                seed=alpha_seed(config.seed, index))
        outcomes = list(mapper(_oracle_outcome,
                               [(i, point) for i in range(len(processes))]))
        gap = aggregate_gap([o.mean_cost for o in outcomes], ref_costs,
                            dataset_id, gap_mode, strict=False).gap
        evaluated[index] = (alpha, gap)
        worst = max(o.std_error for o in outcomes)
        logger.log(logging.DEBUG, f'alpha={alpha:.4f} oracle gap={gap:.6f} '
                                  f'model gap={model_gap:.6f} '
                                  f'max std error={worst:.6f}')
        return gap

    def accepts(index: int) -> bool:
        return index == last or gap_at(index) <= model_gap + GAP_SLACK

    if bisect:
        stride = max(1, int(round(coarse_k / k)))
        coarse = list(range(0, last, stride)) + [last]
        found, previous = last, None
        for index in coarse:
            if accepts(index):
                found = index
                break
            previous = index
        if previous is not None:
            lo, hi = previous, found
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if accepts(mid):
                    hi = mid
                else:
                    lo = mid
            found = hi
    else:
        found = last
        for index in range(last + 1):
            if accepts(index):
                found = index
                break
    if found not in evaluated:
        gap_at(found)

    curve = tuple(evaluated[i] for i in sorted(evaluated))
    return RodReport(evaluated[found][0], k, curve, model_gap, config.seed,
                     gap_mode, dataset_id)


def decision_accuracy(rollouts: Iterable[Rollout],
                      include_forced: bool = True) -> float:
    """
    Share of optimal decisions over a set of traces. Forced decisions count
    as optimal unless `include_forced` is False, which drops them.

    :raises ValidationError: if the traces contain no decision.
    """
    optimal = total = 0
    for rollout in rollouts:
        for decision in rollout.decisions:
            if decision.forced and not include_forced:
                continue
            total += 1
            optimal += decision.optimal
    if not total:
        raise ValidationError('no decisions to score')
    return optimal / total
