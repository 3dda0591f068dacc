"""
Tour construction: the nearest neighbour baseline and the three ways of
decoding a heatmap (greedy, sampling, beam search).
"""
import logging
from collections import namedtuple
from time import perf_counter

import numpy as np

from core.heatmap import EPSILON_COST, Heatmap
from core.tsp import START, Tour, TspInstance

logger = logging.getLogger(__name__)


class SearchResult(namedtuple(
        'SearchResult', ('tour', 'procedure', 'moves', 'wall_time'))):
    """
    Output of a construction or improvement procedure. `moves` counts
    complete constructions for decoders and accepted exchanges for local
    searches; `wall_time` is in seconds.
    """
    __slots__ = ()


def _nearest_unvisited(rows, current: int, visited: list) -> int:
    best, best_d = -1, float('inf')
    for v, d in enumerate(rows[current]):
        if not visited[v] and d < best_d:
            best, best_d = v, d
    return best


def nearest_neighbour(instance: TspInstance, start: int = START) \
        -> SearchResult:
    """
    Always move to the closest unvisited vertex, lowest index on ties.
    """
    t0 = perf_counter()
    n, rows = instance.n, instance.rows
    visited = [False] * n
    visited[start] = True
    order = [start]
    for _ in range(n - 1):
        v = _nearest_unvisited(rows, order[-1], visited)
        visited[v] = True
        order.append(v)
    tour = Tour.of(instance, order)
    return SearchResult(tour, 'nn', 1, perf_counter() - t0)


def greedy_decode(instance: TspInstance, heatmap: Heatmap,
                  start: int = START) -> SearchResult:
    """
    Follow the highest-scoring edge to an unvisited vertex, lowest index on
    ties. A row that scores every unvisited vertex 0 falls back to the
    nearest unvisited vertex.
    """
    heatmap.check_size(instance)
    t0 = perf_counter()
    n, rows, scores = instance.n, instance.rows, heatmap.rows
    visited = [False] * n
    visited[start] = True
    order = [start]
    fallbacks = 0
    for _ in range(n - 1):
        current = order[-1]
        best, best_s = -1, 0.0
        for v, s in enumerate(scores[current]):
            if not visited[v] and s > best_s:
                best, best_s = v, s
        if best < 0:
            fallbacks += 1
            best = _nearest_unvisited(rows, current, visited)
        visited[best] = True
        order.append(best)
    if fallbacks:
        logger.log(logging.WARNING,
                   f'{instance.instance_id}: {fallbacks} zero heatmap rows, '
                   f'used nearest unvisited vertex')
    tour = Tour.of(instance, order)
    return SearchResult(tour, 'greedy', 1, perf_counter() - t0)


def sampling_decode(instance: TspInstance, heatmap: Heatmap,
                    iterations: int, seed: int,
                    start: int = START) -> SearchResult:
    """
    Run `iterations` constructions that draw the next vertex in proportion
    to its score, and keep the cheapest. Iteration i always uses the stream
    (seed, i), so a larger budget only adds constructions.
    """
    heatmap.check_size(instance)
    if iterations < 1:
        raise ValueError(f'iterations must be >= 1, got {iterations}')
    t0 = perf_counter()
    n, rows, scores = instance.n, instance.rows, heatmap.rows
    best = None
    fallbacks = 0
    for it in range(iterations):
        rng = np.random.default_rng([seed, it])
        visited = [False] * n
        visited[start] = True
        order = [start]
        for _ in range(n - 1):
            current = order[-1]
            row = scores[current]
            total = sum(row[v] for v in range(n) if not visited[v])
            if total <= 0.0:
                fallbacks += 1
                nxt = _nearest_unvisited(rows, current, visited)
            else:
                u = rng.random() * total
                cumulative, nxt = 0.0, -1
                for v in range(n):
                    if visited[v] or row[v] <= 0.0:
                        continue
                    cumulative += row[v]
                    nxt = v
                    if cumulative > u:
                        break
            visited[nxt] = True
            order.append(nxt)
        tour = Tour.of(instance, order)
        if best is None or tour.cost < best.cost:
            best = tour
    if fallbacks:
        logger.log(logging.WARNING,
                   f'{instance.instance_id}: {fallbacks} zero heatmap rows '
                   f'while sampling, used nearest unvisited vertex')
    return SearchResult(best, 'sample', iterations, perf_counter() - t0)


def beam_search(instance: TspInstance, heatmap: Heatmap, width: int,
                shortest_tour_closing: bool = False, start: int = START,
                epsilon: float = EPSILON_COST) -> SearchResult:
    """
    Keep the `width` best partial tours at each depth. A partial tour
    scores the sum of log row-normalised scores of its edges; ties go to the
    cheaper partial tour, then to the lexicographically smaller one. A beam
    of one follows `greedy_decode` wherever the best score of a step is
    unique.

    :param shortest_tour_closing: select the cheapest complete tour among
        the final beams instead of the best scoring one.
    """
    heatmap.check_size(instance)
    if width < 1:
        raise ValueError(f'beam width must be >= 1, got {width}')
    t0 = perf_counter()
    n, rows = instance.n, instance.rows
    logp = heatmap.log_probabilities(epsilon)
    beams = [(0.0, 0.0, (start,), 1 << start)]
    for _ in range(n - 1):
        candidates = []
        for score, cost, path, mask in beams:
            current = path[-1]
            for v in range(n):
                if mask >> v & 1:
                    continue
                candidates.append((score + logp[current][v],
                                   cost + rows[current][v],
                                   path + (v,), mask | 1 << v))
        candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
        beams = candidates[:width]

    finals = []
    for score, _, path, _ in beams:
        tour = Tour.of(instance, path)
        finals.append((score + logp[path[-1]][start], tour))
    if shortest_tour_closing:
        _, tour = min(finals, key=lambda f: (f[1].cost, f[1].order))
        procedure = 'beam-st'
    else:
        _, tour = min(finals, key=lambda f: (-f[0], f[1].cost, f[1].order))
        procedure = 'beam'
    return SearchResult(tour, procedure, len(finals), perf_counter() - t0)


def construct(instance: TspInstance, construction: str,
              heatmap: Heatmap = None, iterations: int = 16,
              width: int = 16, seed: int = 0) -> SearchResult:
    """
    Dispatch a construction by its tag: nn, greedy, sample, beam, beam-st.
    """
    if construction == 'nn':
        return nearest_neighbour(instance)
    if heatmap is None:
        raise ValueError(f'construction {construction} needs a heatmap')
    if construction == 'greedy':
        return greedy_decode(instance, heatmap)
    if construction == 'sample':
        return sampling_decode(instance, heatmap, iterations, seed)
    if construction in ('beam', 'beam-st'):
        return beam_search(instance, heatmap, width,
                           construction == 'beam-st')
    raise ValueError(f'unknown construction {construction}')
