"""
Edge-score matrices produced by external models.
"""
from json import loads
from pathlib import Path

import numpy as np

from core.checks import SubmissionError
from core.tsp import TspInstance, Tour

EPSILON_COST = 1e-12


class Heatmap:
    """
    n x n non-negative scores, symmetrised on construction. The diagonal is
    kept but never read by the decoders.
    """
    __slots__ = ('scores', 'rows')

    def __init__(self, scores):
        scores = np.array(scores, dtype=float)
        if scores.ndim != 2 or scores.shape[0] != scores.shape[1]:
            raise SubmissionError(f'heatmap must be square, got '
                                  f'{scores.shape}')
        if not np.all(np.isfinite(scores)):
            raise SubmissionError('heatmap has non-finite scores')
        if scores.min() < 0:
            raise SubmissionError('heatmap has negative scores')
        scores = (scores + scores.T) / 2
        scores.setflags(write=False)
        self.scores = scores
        self.rows = scores.tolist()

    @property
    def n(self) -> int:
        return self.scores.shape[0]

    def check_size(self, instance: TspInstance):
        if self.n != instance.n:
            raise SubmissionError(
                f'heatmap is {self.n} x {self.n} but instance '
                f'{instance.instance_id} has {instance.n} vertices')

    def log_probabilities(self, epsilon: float = EPSILON_COST) -> list:
        """
        Row-normalised scores in log space, floored at log(epsilon). The
        diagonal is excluded from the normalisation.

        :return: nested lists of shape (n, n).
        """
        scores = self.scores.copy()
        np.fill_diagonal(scores, 0.0)
        totals = scores.sum(axis=1, keepdims=True)
        totals[totals == 0] = 1.0
        probs = np.maximum(scores / totals, epsilon)
        return np.log(probs).tolist()

    @classmethod
    def inverse_distance(cls, instance: TspInstance,
                         epsilon: float = EPSILON_COST):
        """
        Baseline heatmap scoring each edge by 1/distance.
        """
        scores = 1.0 / np.maximum(instance.dist, epsilon)
        np.fill_diagonal(scores, 0.0)
        return cls(scores)

    @classmethod
    def from_tour(cls, tour: Tour):
        """
        Indicator of the edges of a tour.
        """
        n = len(tour.order)
        scores = np.zeros((n, n))
        for a, b in tour.edges():
            scores[a, b] = scores[b, a] = 1.0
        return cls(scores)


def load_heatmap(path: Path) -> Heatmap:
    """
    Read a heatmap from CSV (n rows of n comma separated doubles) or JSON
    ({"n": int, "scores": [[...], ...]}).
    """
    if path.suffix.lower() == '.json':
        obj = loads(path.read_text(encoding='utf-8'))
        heatmap = Heatmap(obj['scores'])
        if obj.get('n', heatmap.n) != heatmap.n:
            raise SubmissionError(f'{path.name}: n = {obj["n"]} but scores '
                                  f'are {heatmap.n} x {heatmap.n}')
        return heatmap
    return Heatmap(np.loadtxt(path, delimiter=',', ndmin=2))
