"""
Tour improvement: 2-opt and 3-opt with first-improvement scans in
lexicographic order, and a Lin-Kernighan style variable-depth search on
nearest-neighbour candidate lists that runs on top of 3-opt.
"""
from time import perf_counter
from typing import List, Optional, Sequence

import numpy as np

from core.construction import SearchResult, nearest_neighbour
from core.tsp import Tour, TspInstance

IMPROVEMENT_THRESHOLD = 1e-10
LK_DEPTH = 5
LK_NEIGHBORS = 5
# Levels of a chain at which every candidate is tried.
LK_BACKTRACK_LEVELS = 2


def _scan_two(order: Sequence[int], rows, start_i: int = 0) -> Optional[tuple]:
    n = len(order)
    for i in range(start_i, n - 2):
        a, b = order[i], order[i + 1]
        ra, dab = rows[a], rows[a][b]
        # With i == 0 the last edge shares vertex a with edge (a, b).
        for j in range(i + 2, n if i > 0 else n - 1):
            c, e = order[j], order[(j + 1) % n]
            delta = ra[c] + rows[b][e] - dab - rows[c][e]
            if delta < -IMPROVEMENT_THRESHOLD:
                return i, j
    return None


def find_improving_two_exchange(instance: TspInstance,
                                order: Sequence[int]) -> Optional[tuple]:
    """
    Exhaustive scan for a 2-exchange that shortens the tour.

    :return: positions (i, j) of the two removed edges, or None.
    """
    return _scan_two(list(order), instance.rows)


def two_opt(instance: TspInstance, tour: Tour) -> SearchResult:
    """
    Apply improving 2-exchanges until none is left. The scan resumes at the
    row of the last accepted move and stops after a clean full pass.
    """
    t0 = perf_counter()
    order, rows = list(tour.order), instance.rows
    moves, start_i = 0, 0
    while True:
        move = _scan_two(order, rows, start_i)
        if move is None:
            if start_i == 0:
                break
            start_i = 0
            continue
        i, j = move
        order[i + 1:j + 1] = order[i + 1:j + 1][::-1]
        moves += 1
        start_i = i
    result = Tour.of(instance, order) if moves else tour
    return SearchResult(result, '2opt', moves, perf_counter() - t0)


def _three_deltas(rows, a, b, c, d, e, f):
    """
    Cost change of the seven reconnections of segments A = b..c and
    B = d..e between a and f, in the order: A'B, AB', B'A', A'B', BA,
    BA', B'A.
    """
    ra, rb, rc, rd = rows[a], rows[b], rows[c], rows[d]
    orig = ra[b] + rc[d] + rows[e][f]
    yield ra[c] + rb[d] + rows[e][f] - orig
    yield ra[b] + rc[e] + rd[f] - orig
    yield ra[e] + rc[d] + rb[f] - orig
    yield ra[c] + rb[e] + rd[f] - orig
    yield ra[d] + rows[e][b] + rc[f] - orig
    yield ra[d] + rows[e][c] + rb[f] - orig
    yield ra[e] + rd[b] + rc[f] - orig


def _reconnect(seg_a: list, seg_b: list, case: int) -> list:
    return [
        seg_a[::-1] + seg_b,
        seg_a + seg_b[::-1],
        seg_b[::-1] + seg_a[::-1],
        seg_a[::-1] + seg_b[::-1],
        seg_b + seg_a,
        seg_b + seg_a[::-1],
        seg_b[::-1] + seg_a,
    ][case]


def _scan_three(order: Sequence[int], rows,
                start_i: int = 0) -> Optional[tuple]:
    n = len(order)
    for i in range(start_i, n - 2):
        a, b = order[i], order[i + 1]
        for j in range(i + 1, n - 1):
            c, d = order[j], order[j + 1]
            for k in range(j + 1, n):
                e, f = order[k], order[(k + 1) % n]
                for case, delta in enumerate(
                        _three_deltas(rows, a, b, c, d, e, f)):
                    if delta < -IMPROVEMENT_THRESHOLD:
                        return i, j, k, case
    return None


def find_improving_three_exchange(instance: TspInstance,
                                  order: Sequence[int]) -> Optional[tuple]:
    """
    Exhaustive scan over every 3-edge removal and reconnection, the
    2-exchanges included.

    :return: (i, j, k, reconnection case), or None.
    """
    return _scan_three(list(order), instance.rows)


def three_opt(instance: TspInstance, tour: Tour) -> SearchResult:
    """
    Apply improving 3-exchanges until none is left.
    """
    t0 = perf_counter()
    order, rows = list(tour.order), instance.rows
    moves, start_i = 0, 0
    while True:
        move = _scan_three(order, rows, start_i)
        if move is None:
            if start_i == 0:
                break
            start_i = 0
            continue
        i, j, k, case = move
        order[i + 1:k + 1] = _reconnect(order[i + 1:j + 1],
                                        order[j + 1:k + 1], case)
        moves += 1
        start_i = i
    result = Tour.of(instance, order) if moves else tour
    return SearchResult(result, '3opt', moves, perf_counter() - t0)


def neighbor_lists(instance: TspInstance, size: int) -> List[List[int]]:
    """
    :return: for every vertex, its `size` nearest other vertices, closest
        first, lowest index on ties.
    """
    rows = instance.rows
    return [[j for _, j in sorted((rows[i][j], j)
                                  for j in range(instance.n) if j != i)[:size]]
            for i in range(instance.n)]


def _edge(u: int, v: int) -> tuple:
    return (u, v) if u < v else (v, u)


def _lk_chain(order: list, t1: int, reverse: bool, rows, neigh,
              depth: int) -> float:
    """
    Grow chains of flips from base t1. The working tour keeps t1 at
    position 0, so the edge (t1, w[1]) is always the one that closes a
    chain. The first two levels try every candidate and backtrack; deeper
    levels follow the best look-ahead only. The search stops at the first
    subtree holding an improving close-up.

    :return: the gain committed to `order`, 0.0 when nothing improved.
    """
    n = len(order)
    p = order.index(t1)
    w = order[p:] + order[:p]
    if reverse:
        w = w[:1] + w[:0:-1]
    pos = [0] * n
    for idx, v in enumerate(w):
        pos[v] = idx
    best = [IMPROVEMENT_THRESHOLD, None]

    def candidates(g, added, removed):
        t2 = w[1]
        found = []
        for t3 in neigh[t2]:
            if t3 == t1 or t3 == t2:
                continue
            i3 = pos[t3]
            t4 = w[i3 - 1]
            if t4 == t2:
                continue
            if g - rows[t2][t3] <= IMPROVEMENT_THRESHOLD:
                continue
            if _edge(t2, t3) in removed or _edge(t4, t3) in added:
                continue
            found.append((rows[t4][t3] - rows[t2][t3], t3, i3, t4))
        found.sort(key=lambda c: -c[0])
        return found

    def flip(i3):
        w[1:i3] = w[1:i3][::-1]
        for idx in range(1, i3):
            pos[w[idx]] = idx

    def step(level, g, added, removed):
        # `level` edges are removed so far.
        if level >= depth:
            return
        found = candidates(g, added, removed)
        if level > LK_BACKTRACK_LEVELS:
            found = found[:1]
        for _, t3, i3, t4 in found:
            t2 = w[1]
            gain = g - rows[t2][t3] + rows[t4][t3]
            new_add, new_rem = _edge(t2, t3), _edge(t4, t3)
            fresh_add, fresh_rem = new_add not in added, new_rem not in removed
            added.add(new_add)
            removed.add(new_rem)
            flip(i3)
            close_gain = gain - rows[t4][t1]
            if close_gain > best[0]:
                best[0], best[1] = close_gain, list(w)
            step(level + 1, gain, added, removed)
            flip(i3)
            if fresh_add:
                added.discard(new_add)
            if fresh_rem:
                removed.discard(new_rem)
            if best[1] is not None:
                return

    step(1, rows[t1][w[1]], set(), {_edge(t1, w[1])})
    if best[1] is None:
        return 0.0
    order[:] = best[1]
    return best[0]


def lin_kernighan(instance: TspInstance, tour: Tour, depth: int = LK_DEPTH,
                  neighbors: int = LK_NEIGHBORS, seed=0) -> SearchResult:
    """
    Variable-depth search on top of the exhaustive 3-exchange
    neighbourhood. The input is first brought to a 3-opt local optimum;
    then, from every base vertex in both tour directions, sequential
    exchanges are grown whose partial gain stays positive, with added edges
    taken from the candidate lists, and the best improving close-up of a
    chain is applied. Chain passes and 3-opt descents alternate until
    neither improves, so the output is 3-opt optimal and never costs more
    than `three_opt` on the same input.

    :param depth: maximum number of removed edges per chain, at least 2.
    :param neighbors: candidate list size.
    :param seed: seed for the order in which base vertices are tried.
    """
    if depth < 2:
        raise ValueError(f'depth limit must be >= 2, got {depth}')
    t0 = perf_counter()
    rng = np.random.default_rng(seed)
    rows = instance.rows
    neigh = neighbor_lists(instance, neighbors)
    descent = three_opt(instance, tour)
    order, moves = list(descent.tour.order), descent.moves
    while True:
        improved = False
        for t1 in rng.permutation(instance.n).tolist():
            for reverse in (False, True):
                if _lk_chain(order, t1, reverse, rows, neigh, depth) > 0.0:
                    moves += 1
                    improved = True
        if not improved:
            break
        descent = three_opt(instance, Tour.of(instance, order))
        order = list(descent.tour.order)
        moves += descent.moves
    result = Tour.of(instance, order) if moves else tour
    return SearchResult(result, 'lk', moves, perf_counter() - t0)


def double_bridge(order: Sequence[int], rng: np.random.Generator) -> list:
    """
    Cut the tour into A B C D at three random points and reconnect as
    A C B D. Below four vertices a random permutation is returned.
    """
    n = len(order)
    if n < 4:
        return rng.permutation(order).tolist()
    a, b, c = sorted(rng.choice(np.arange(1, n), size=3, replace=False))
    order = list(order)
    return order[:a] + order[b:c] + order[a:b] + order[c:]


def multi_start_lin_kernighan(instance: TspInstance, starts: int = 8,
                              seed: int = 0, depth: int = LK_DEPTH,
                              neighbors: int = LK_NEIGHBORS) -> SearchResult:
    """
    Best of `starts` Lin-Kernighan runs. The first starts from the nearest
    neighbour tour, each later one from a double-bridge kick of the best
    tour so far drawn from the stream (seed, s).
    """
    t0 = perf_counter()
    best, moves = None, 0
    for s in range(starts):
        if s == 0:
            initial = nearest_neighbour(instance).tour
        else:
            rng = np.random.default_rng([seed, s])
            initial = Tour.of(instance, double_bridge(best.order, rng))
        result = lin_kernighan(instance, initial, depth, neighbors, [seed, s])
        moves += result.moves
        if best is None or result.tour.cost < best.cost:
            best = result.tour
    return SearchResult(best, 'multi-lk', moves, perf_counter() - t0)


def improve(instance: TspInstance, tour: Tour, local_search: str,
            lk_depth: int = LK_DEPTH, lk_neighbors: int = LK_NEIGHBORS,
            seed: int = 0) -> SearchResult:
    """
    Dispatch a local search by its tag: none, 2opt, 3opt, lk.
    """
    if local_search == 'none':
        return SearchResult(tour, 'none', 0, 0.0)
    if local_search == '2opt':
        return two_opt(instance, tour)
    if local_search == '3opt':
        return three_opt(instance, tour)
    if local_search == 'lk':
        return lin_kernighan(instance, tour, lk_depth, lk_neighbors, seed)
    raise ValueError(f'unknown local search {local_search}')
