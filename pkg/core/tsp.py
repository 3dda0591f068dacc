"""
Euclidean TSP on the unit square: instances, tours, the instance generator
and the TSP as a decision process built in tour-construction order.
"""
from collections import namedtuple
from json import dumps, loads
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np

from core.checks import InstanceMismatch, InvalidInstance, InvalidTour, \
    check_permutation
from core.cop import TERMINAL, DecisionProcess

START = 0


def build_distance_matrix(coords: np.ndarray) -> np.ndarray:
    """
    Pairwise Euclidean distances at full double precision.

    :param coords: array of shape (n, 2).
    :return: symmetric array of shape (n, n) with a zero diagonal.
    """
    return np.linalg.norm(coords[:, None] - coords[None, :], axis=2)


class TspInstance:
    """
    n vertices on the unit square and their distance matrix. Both arrays
    are read-only; `rows` mirrors `dist` as nested lists for scalar lookups
    in tight loops.
    """
    __slots__ = ('instance_id', 'coords', 'dist', 'rows')

    def __init__(self, coords, instance_id: str = ''):
        """
        :param coords: n pairs of reals in [0, 1].
        :param instance_id: identifier used by datasets and references.
        :raises InvalidInstance: on a bad shape, n < 3, or coordinates
            outside the unit square.
        """
        coords = np.array(coords, dtype=float)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise InvalidInstance(f'coords must be n x 2, got {coords.shape}')
        if coords.shape[0] < 3:
            raise InvalidInstance(f'need at least 3 vertices, got '
                                  f'{coords.shape[0]}')
        if not np.all(np.isfinite(coords)):
            raise InvalidInstance('coords must be finite')
        if coords.min() < 0.0 or coords.max() > 1.0:
            raise InvalidInstance('coords must lie in the unit square')
        coords.setflags(write=False)
        dist = build_distance_matrix(coords)
        dist.setflags(write=False)
        self.instance_id = instance_id
        self.coords = coords
        self.dist = dist
        self.rows = dist.tolist()

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def to_json(self) -> dict:
        return {'n': self.n, 'coords': self.coords.tolist()}

    @classmethod
    def from_json(cls, obj: dict, instance_id: str = ''):
        """
        :param obj: {"n": int, "coords": [[x, y], ...]}.
        :raises InvalidInstance: if n disagrees with the coordinate count.
        """
        coords = obj.get('coords')
        if coords is None:
            raise InvalidInstance('missing "coords"')
        if obj.get('n', len(coords)) != len(coords):
            raise InvalidInstance(f'n = {obj["n"]} but {len(coords)} coords')
        return cls(coords, instance_id)

    def __repr__(self):
        return f'TspInstance({self.instance_id!r}, n={self.n})'


def generate(n: int, seed: int, instance_id: str = '') -> TspInstance:
    """
    Sample n vertices independently and uniformly on the unit square.

    :param n: vertex count, at least 3.
    :param seed: generator seed; equal seeds give equal instances.
    :param instance_id: identifier of the new instance.
    :return: the instance.
    """
    if n < 3:
        raise InvalidInstance(f'need at least 3 vertices, got {n}')
    rng = np.random.default_rng(seed)
    return TspInstance(rng.random((n, 2)), instance_id)


def save_instance(path: Path, instance: TspInstance):
    path.write_text(dumps(instance.to_json()) + '\n', encoding='utf-8')


def load_instance(path: Path, instance_id: str = None) -> TspInstance:
    """
    :param path: instance JSON file.
    :param instance_id: identifier, defaults to the file stem.
    """
    obj = loads(path.read_text(encoding='utf-8'))
    return TspInstance.from_json(obj, instance_id or path.stem)


def tour_cost(instance: TspInstance, order: Sequence[int]) -> float:
    """
    Cyclic cost of visiting the vertices in `order`, closing edge included.

    :raises InvalidTour: if `order` is not a permutation of 0..n-1.
    """
    check_permutation(order, instance.n)
    rows = instance.rows
    total = 0.0
    for a, b in zip(order, order[1:]):
        total += rows[a][b]
    return total + rows[order[-1]][order[0]]


class Tour(namedtuple('Tour', ('order', 'cost'))):
    """
    A permutation of the vertices and its cost.
    """
    __slots__ = ()

    @classmethod
    def of(cls, instance: TspInstance, order: Iterable[int]):
        order = tuple(int(v) for v in order)
        return cls(order, tour_cost(instance, order))

    def edges(self) -> List[tuple]:
        order = self.order
        return [tuple(sorted((a, b)))
                for a, b in zip(order, order[1:] + order[:1])]

    def canonical(self) -> tuple:
        """
        :return: the order rotated to start at vertex 0 and oriented so the
            second vertex is the smaller neighbour of 0.
        """
        i = self.order.index(0)
        rotated = self.order[i:] + self.order[:i]
        if len(rotated) > 2 and rotated[-1] < rotated[1]:
            rotated = rotated[:1] + rotated[:0:-1]
        return rotated

    def validate(self, instance: TspInstance, rel: float = 1e-9):
        """
        :raises InvalidTour: if the order is not a permutation or the cached
            cost disagrees with the instance.
        """
        recomputed = tour_cost(instance, self.order)
        if abs(recomputed - self.cost) > rel * max(abs(recomputed), 1.0):
            raise InvalidTour(f'cached cost {self.cost!r} != {recomputed!r}')


class TspState(namedtuple('TspState', ('visited', 'current', 'index'))):
    """
    Visited vertices as a bitmask, the current vertex, and the 1-based
    number of the next decision (`TERMINAL` once every vertex is visited).
    """
    __slots__ = ()


class TspProcess(DecisionProcess):
    """
    Tour construction from the fixed start vertex 0. There are n-1
    decisions; the last one is forced and also pays the closing edge.
    """
    __slots__ = ('instance', 'table', '_full')

    def __init__(self, instance: TspInstance, table=None):
        """
        :param instance: the instance.
        :param table: object answering `optimal_action(state)`, normally
            the instance's `CompletionTable`.
        :raises InstanceMismatch: if the table was built for other
            coordinates.
        """
        bound = getattr(table, 'instance', None)
        if bound is not None and bound is not instance \
                and not np.array_equal(bound.coords, instance.coords):
            raise InstanceMismatch(f'completion table of '
                                   f'{bound.instance_id or "another instance"} '
                                   f'does not match {instance.instance_id}')
        self.instance = instance
        self.table = table
        self._full = (1 << instance.n) - 1

    def initial_state(self) -> TspState:
        return TspState(1 << START, START, 1)

    def valid_actions(self, state: TspState) -> tuple:
        visited = state.visited
        return tuple(v for v in range(self.instance.n)
                     if not visited >> v & 1)

    def transition(self, state: TspState, action: int) -> TspState:
        visited = state.visited | 1 << action
        index = TERMINAL if visited == self._full else state.index + 1
        return TspState(visited, action, index)

    def cost(self, state: TspState, action: int) -> float:
        rows = self.instance.rows
        step = rows[state.current][action]
        if state.visited | 1 << action == self._full:
            step += rows[action][START]
        return step

    def is_terminal(self, state: TspState) -> bool:
        return state.index is TERMINAL

    def optimal_action(self, state: TspState) -> int:
        if self.table is None:
            raise InvalidInstance('process was built without a completion '
                                  'table')
        return self.table.optimal_action(state)

    def tour_of(self, rollout) -> Tour:
        """
        :return: the tour induced by a complete rollout.
        """
        return Tour.of(self.instance, (START,) + rollout.actions)


def as_process(instance: TspInstance, table=None) -> TspProcess:
    """
    Build the decision process of an instance. Without a table, the
    completion table is computed by Held-Karp.

    :raises ExactBoundExceeded: if the instance is too large for Held-Karp.
    """
    if table is None:
        from core.exact import held_karp
        _, table = held_karp(instance)
    return TspProcess(instance, table)
