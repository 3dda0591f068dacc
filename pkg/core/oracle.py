"""
The parametrized oracle: a policy that takes the optimal action with
probability alpha and otherwise samples another action with probability
inversely proportional to its step cost.
"""
from collections import namedtuple
from math import sqrt
from typing import Hashable, Sequence
from zlib import crc32

import numpy as np

from core.checks import UsageError
from core.cop import DecisionProcess, run_policy

EPSILON_COST = 1e-12


class OracleConfig(namedtuple('OracleConfig', (
        'alpha', 'rollouts_per_instance', 'seed',
        'exclude_optimal_in_sampling', 'epsilon_cost'))):
    __slots__ = ()

    def __new__(cls, alpha: float, rollouts_per_instance: int = 1,
                seed: int = 0, exclude_optimal_in_sampling: bool = True,
                epsilon_cost: float = EPSILON_COST):
        if not 0.0 <= alpha <= 1.0:
            raise UsageError(f'alpha must lie in [0, 1], got {alpha}')
        if rollouts_per_instance < 1:
            raise UsageError(f'rollouts per instance must be positive, got '
                             f'{rollouts_per_instance}')
        if not epsilon_cost > 0.0:
            raise UsageError(f'epsilon cost must be positive, got '
                             f'{epsilon_cost}')
        return super().__new__(cls, alpha, rollouts_per_instance, seed,
                               exclude_optimal_in_sampling, epsilon_cost)


class OracleOutcome(namedtuple(
        'OracleOutcome', ('instance_id', 'costs', 'mean_cost', 'rollouts'))):
    """
    Costs of the rollouts on one instance; `rollouts` holds the traces when
    they were kept.
    """
    __slots__ = ()

    @property
    def std_error(self) -> float:
        k = len(self.costs)
        if k < 2:
            return 0.0
        mean = self.mean_cost
        var = sum((c - mean) ** 2 for c in self.costs) / (k - 1)
        return sqrt(var / k)


def suboptimal_distribution(costs: Sequence[float],
                            epsilon: float = EPSILON_COST) -> np.ndarray:
    """
    Inverse-cost weights normalised to probabilities. Costs below `epsilon`
    are clamped to it, so zero-cost actions become near-certain picks.
    """
    inverse = 1.0 / np.maximum(np.asarray(costs, dtype=float), epsilon)
    return inverse / inverse.sum()


def sample_suboptimal(candidates: Sequence[Hashable], costs: Sequence[float],
                      rng: np.random.Generator,
                      epsilon: float = EPSILON_COST) -> Hashable:
    """
    Draw one candidate according to `suboptimal_distribution`.
    """
    probs = suboptimal_distribution(costs, epsilon)
    return candidates[int(rng.choice(len(candidates), p=probs))]


def theta(process: DecisionProcess, state, alpha: float,
          rng: np.random.Generator, exclude_optimal: bool = True,
          epsilon: float = EPSILON_COST) -> Hashable:
    """
    One oracle decision. A single valid action is returned without drawing.
    Otherwise the optimal action is kept when a uniform draw falls below
    alpha, and a sub-optimal one is sampled when it does not.

    :param exclude_optimal: sample among the other actions only; False
        samples over every valid action.
    """
    actions = process.valid_actions(state)
    if len(actions) == 1:
        return actions[0]
    optimal = process.optimal_action(state)
    # random() lies in [0, 1): alpha = 1 always keeps, alpha = 0 never does.
    if rng.random() < alpha:
        return optimal
    if exclude_optimal:
        candidates = [a for a in actions if a != optimal]
    else:
        candidates = list(actions)
    costs = [process.cost(state, a) for a in candidates]
    return sample_suboptimal(candidates, costs, rng, epsilon)


class ParametrizedOracle:
    """
    `theta` bound to a process, an accuracy and a random stream, usable as
    a policy for `run_policy`.
    """
    __slots__ = ('process', 'alpha', 'rng', 'exclude_optimal', 'epsilon')

    def __init__(self, process: DecisionProcess, alpha: float,
                 rng: np.random.Generator, exclude_optimal: bool = True,
                 epsilon: float = EPSILON_COST):
        self.process = process
        self.alpha = alpha
        self.rng = rng
        self.exclude_optimal = exclude_optimal
        self.epsilon = epsilon

    def __call__(self, state):
        return theta(self.process, state, self.alpha, self.rng,
                     self.exclude_optimal, self.epsilon)


def instance_key(instance_id: str) -> int:
    """
    Stable integer key of an instance id for seeding.
    """
    return crc32(instance_id.encode('utf-8'))


def run_oracle(process: DecisionProcess, config: OracleConfig,
               instance_id: str = None,
               keep_traces: bool = False) -> OracleOutcome:
    """
    Run independent oracle rollouts. Rollout r draws from the stream
    (seed, instance key, r), so scheduling cannot change the result.

    :param process: the decision process.
    :param config: accuracy, rollout count and seed.
    :param instance_id: defaults to the process instance's id.
    :param keep_traces: keep the full rollouts in the outcome.
    """
    if instance_id is None:
        instance_id = process.instance.instance_id
    key = instance_key(instance_id)
    costs, rollouts = [], []
    for r in range(config.rollouts_per_instance):
        rng = np.random.default_rng([config.seed, key, r])
        policy = ParametrizedOracle(process, config.alpha, rng,
                                    config.exclude_optimal_in_sampling,
                                    config.epsilon_cost)
        rollout = run_policy(process, policy)
        costs.append(rollout.total_cost)
        if keep_traces:
            rollouts.append(rollout)
    return OracleOutcome(instance_id, tuple(costs), sum(costs) / len(costs),
                         tuple(rollouts) if keep_traces else None)
