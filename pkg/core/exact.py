"""
Exact reference solutions: brute force, Held-Karp, and the completion table
that answers "which move is optimal from here" at any construction state.
Also the JSON-lines reference format used to bring in optima computed
elsewhere.
"""
import logging
from collections import namedtuple
from itertools import permutations
from json import dumps, loads
from pathlib import Path
from typing import Dict, Iterable, Mapping

import numpy as np

from core.checks import ExactBoundExceeded, InstanceMismatch, InvalidTour, \
    ReferenceMismatch, check_permutation
from core.local_search import multi_start_lin_kernighan
from core.tsp import START, TspInstance, TspState, tour_cost

MAX_BRUTE_FORCE = 10
MAX_HELD_KARP = 20
IMPORT_TOLERANCE = 1e-6

EXACT_SOURCES = ('held-karp', 'brute-force')
BEST_KNOWN_SOURCES = ('multi-start-lk',)
BEST_KNOWN = 'best-known'

logger = logging.getLogger(__name__)


class ReferenceSolution(namedtuple(
        'ReferenceSolution',
        ('instance_id', 'cost', 'order', 'source', 'validated'))):
    """
    Optimal (or best-known) cost of one instance. `order` may be None for
    imported records; `validated` tells whether the cost was checked
    against an order.
    """
    __slots__ = ()

    @property
    def provenance(self) -> str:
        if self.source in EXACT_SOURCES:
            return 'exact-in-process'
        if self.source in BEST_KNOWN_SOURCES:
            return BEST_KNOWN
        return 'imported'

    def to_json(self) -> dict:
        obj = {'id': self.instance_id, 'cost': self.cost}
        if self.order is not None:
            obj['order'] = list(self.order)
        obj['source'] = self.source
        return obj


class ReferenceImport(namedtuple('ReferenceImport', ('accepted', 'rejected'))):
    """
    `accepted` maps instance ids to solutions; `rejected` lists
    (instance id, reason) pairs.
    """
    __slots__ = ()


class CompletionTable:
    """
    f[visited, j]: the cheapest way to visit every vertex outside `visited`
    starting at j and return to the start vertex. Built once, read-only.
    """
    __slots__ = ('instance', 'f', '_bits', '_full')

    def __init__(self, instance: TspInstance, f: np.ndarray):
        f.setflags(write=False)
        self.instance = instance
        self.f = f
        self._bits = 1 << np.arange(instance.n)
        self._full = (1 << instance.n) - 1

    @property
    def optimal_cost(self) -> float:
        return float(self.f[1 << START, START])

    def value(self, visited: int, current: int) -> float:
        return float(self.f[visited, current])

    def completion_costs(self, state: TspState):
        """
        :return: (unvisited vertices, cost of moving to each of them and
            finishing optimally).
        """
        visited, current = state.visited, state.current
        if (visited > self._full or not visited >> START & 1
                or not 0 <= current < self.instance.n
                or not visited >> current & 1):
            raise InstanceMismatch()
        if visited == self._full:
            raise ValueError('terminal state has no action')
        unvisited = np.flatnonzero((visited & self._bits) == 0)
        costs = (self.instance.dist[current, unvisited]
                 + self.f[visited | self._bits[unvisited], unvisited])
        return unvisited, costs

    def optimal_action(self, state: TspState) -> int:
        """
        Argmin of the Bellman recurrence; ties go to the lowest vertex.
        """
        unvisited, costs = self.completion_costs(state)
        return int(unvisited[np.argmin(costs)])


def optimal_action(table: CompletionTable, state: TspState) -> int:
    return table.optimal_action(state)


def brute_force(instance: TspInstance) -> ReferenceSolution:
    """
    Enumerate the (n-1)!/2 distinct tours through vertex 0.

    :raises ExactBoundExceeded: for n > 10.
    """
    n = instance.n
    if n > MAX_BRUTE_FORCE:
        raise ExactBoundExceeded('brute force', n, MAX_BRUTE_FORCE)
    rows = instance.rows
    best_cost, best_order = float('inf'), None
    for perm in permutations(range(1, n)):
        # Skip mirrored tours.
        if perm[0] > perm[-1]:
            continue
        total = 0.0
        prev = START
        for v in perm:
            total += rows[prev][v]
            prev = v
        total += rows[prev][START]
        if total < best_cost:
            best_cost, best_order = total, (START,) + perm
    return ReferenceSolution(
        instance.instance_id, best_cost, best_order, 'brute-force', True)


def held_karp(instance: TspInstance) -> tuple:
    """
    Backward Held-Karp over bitmask states.

    :return: (ReferenceSolution, CompletionTable).
    :raises ExactBoundExceeded: for n > 20.
    """
    n = instance.n
    if n > MAX_HELD_KARP:
        raise ExactBoundExceeded('Held-Karp', n, MAX_HELD_KARP)
    dist = instance.dist
    bits = 1 << np.arange(n)
    full = (1 << n) - 1
    f = np.full((1 << n, n), np.inf)
    f[full, :] = dist[:, START]
    # Supersets are numerically larger, so descending order sees them first.
    for mask in range(full - 1, 0, -1):
        if not mask >> START & 1:
            continue
        unvisited = np.flatnonzero((mask & bits) == 0)
        members = np.flatnonzero(mask & bits)
        nxt = f[mask | bits[unvisited], unvisited]
        f[mask, members] = (dist[np.ix_(members, unvisited)] + nxt).min(axis=1)
    table = CompletionTable(instance, f)

    state = TspState(1 << START, START, 1)
    order = [START]
    while state.visited != full:
        a = table.optimal_action(state)
        order.append(a)
        state = TspState(state.visited | 1 << a, a, state.index + 1)
    solution = ReferenceSolution(instance.instance_id,
                                 tour_cost(instance, order), tuple(order),
                                 'held-karp', True)
    return solution, table


def best_known(instance: TspInstance, starts: int = 8,
               seed: int = 0) -> ReferenceSolution:
    """
    Non-exact reference from multi-start Lin-Kernighan, for instances too
    large for Held-Karp.
    """
    result = multi_start_lin_kernighan(instance, starts=starts, seed=seed)
    return ReferenceSolution(instance.instance_id, result.tour.cost,
                             result.tour.order, 'multi-start-lk', True)


def export_references(path: Path, solutions: Iterable[ReferenceSolution]):
    lines = [dumps(s.to_json()) for s in solutions]
    path.write_text(''.join(line + '\n' for line in lines), encoding='utf-8')


def import_references(
        path: Path,
        instances: Mapping[str, TspInstance] = None) -> ReferenceImport:
    """
    Read a JSON-lines reference file. Records with an order are checked
    against the instance; the others are accepted unvalidated.

    :param path: the reference file.
    :param instances: instances by id, used to validate orders.
    :return: accepted and rejected records.
    """
    accepted: Dict[str, ReferenceSolution] = {}
    rejected = []
    text = path.read_text(encoding='utf-8')
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = loads(line)
        instance_id = str(obj['id'])
        cost = float(obj['cost'])
        source = obj.get('source', 'imported')
        order = obj.get('order')
        if instances is not None and instance_id not in instances:
            rejected.append((instance_id, 'unknown instance'))
            continue
        if order is None or instances is None:
            logger.log(logging.WARNING,
                       f'Reference {instance_id} accepted unvalidated')
            accepted[instance_id] = ReferenceSolution(
                instance_id, cost,
                None if order is None else tuple(order), source, False)
            continue
        order = tuple(int(v) for v in order)
        instance = instances[instance_id]
        try:
            check_permutation(order, instance.n)
        except InvalidTour as e:
            rejected.append((instance_id, str(e)))
            continue
        recomputed = tour_cost(instance, order)
        if abs(recomputed - cost) > IMPORT_TOLERANCE * abs(recomputed):
            rejected.append((instance_id, str(
                ReferenceMismatch(instance_id, cost, recomputed))))
            continue
        accepted[instance_id] = ReferenceSolution(
            instance_id, cost, order, source, True)
    for instance_id, reason in rejected:
        logger.log(logging.WARNING,
                   f'Rejected reference {instance_id}: {reason}')
    return ReferenceImport(accepted, rejected)
