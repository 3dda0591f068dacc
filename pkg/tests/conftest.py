import logging

import pytest

from core.exact import held_karp
from core.tsp import TspInstance, as_process, generate
from harness import RodHarness


def random_instances(n: int, count: int, seed: int = 0) -> list:
    return [generate(n, seed * 10007 + i, f'{n}-{i}') for i in range(count)]


@pytest.fixture
def square():
    """
    Unit square corners, optimal tour cost 4.
    """
    return TspInstance([(0, 0), (1, 0), (1, 1), (0, 1)], 'square')


@pytest.fixture
def collinear():
    return TspInstance([(0, 0), (0.5, 0), (1, 0)], 'collinear')


@pytest.fixture(scope='session')
def small_dataset():
    """
    Ten n = 8 instances with their Held-Karp references and processes.
    """
    instances = random_instances(8, 10, seed=3)
    references, processes = {}, []
    for inst in instances:
        solution, table = held_karp(inst)
        references[inst.instance_id] = solution
        processes.append(as_process(inst, table))
    return instances, references, processes


class Harness:
    """
    A RodHarness with captured output and a single worker.
    """

    def __init__(self):
        self.messages = []
        config = {
            'workers': 1,
            'oracle': {'rollouts_per_instance': 1,
                       'exclude_optimal_in_sampling': True,
                       'epsilon_cost': 1e-12},
            'rod': {'k': 0.001, 'coarse_k': 0.05},
            'search': {'sampling_iterations': 16, 'beam_width': 16,
                       'lk_depth': 5, 'lk_neighbors': 5, 'lk_starts': 8},
        }
        self.app = RodHarness('rod-harness', 0, config,
                              logging.getLogger('tests'),
                              self.messages.append)

    def __call__(self, *argv) -> int:
        from commands import Datasets, Evaluation, Info, \
            RatioOfOptimalDecisions
        app = self.app
        app.commands = {}
        groups = [Datasets(app), Evaluation(app),
                  RatioOfOptimalDecisions(app), Info(app)]
        return app.start(groups, [str(a) for a in argv])


@pytest.fixture
def cli():
    return Harness()
