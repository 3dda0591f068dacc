"""
A combinatorial optimisation problem seen as a sequential decision process.

A process is the tuple (states, actions, transition, cost) plus an answer to
"which action is optimal here" for any reachable state. Everything that builds
or evaluates solutions step by step programs against `DecisionProcess`.
"""
from abc import ABC, abstractmethod
from collections import namedtuple
from typing import Callable, Hashable, Sequence

from core.checks import InvalidAction

# Index carried by the terminal state (every variable assigned).
TERMINAL = None


class DecisionProcess(ABC):
    """
    Interface of a decision process. Implementations are immutable after
    construction so that rollouts may share them across workers.

    States must expose an `index` attribute: the position (1-based) of the
    first unassigned variable, or `TERMINAL` once all are assigned.
    """

    @abstractmethod
    def initial_state(self):
        """
        :return: the state before any decision.
        """

    @abstractmethod
    def valid_actions(self, state) -> Sequence[Hashable]:
        """
        :param state: a non-terminal state.
        :return: the ordered, non-empty sequence of valid actions.
        """

    @abstractmethod
    def transition(self, state, action):
        """
        :return: the state reached by taking `action` in `state`.
        """

    @abstractmethod
    def cost(self, state, action) -> float:
        """
        :return: the non-negative increase of the objective caused by
            taking `action` in `state`.
        """

    @abstractmethod
    def is_terminal(self, state) -> bool:
        pass

    @abstractmethod
    def optimal_action(self, state):
        """
        :param state: a non-terminal state.
        :return: the first action of an optimal completion of `state`;
            always a member of `valid_actions(state)`.
        """


class Decision(namedtuple(
        'Decision', ('state', 'action', 'cost', 'optimal', 'forced'))):
    __slots__ = ()


class Rollout(namedtuple('Rollout', ('decisions', 'total_cost'))):
    """
    The full trace of one policy run. `total_cost` is the running sum of
    the step costs in decision order.
    """
    __slots__ = ()

    @property
    def actions(self) -> tuple:
        return tuple(d.action for d in self.decisions)

    @property
    def optimal_count(self) -> int:
        return sum(1 for d in self.decisions if d.optimal)

    @property
    def forced_count(self) -> int:
        return sum(1 for d in self.decisions if d.forced)

    def __len__(self):
        return len(self.decisions)


def run_policy(process: DecisionProcess,
               policy: Callable[[object], Hashable]) -> Rollout:
    """
    Run a policy from the initial state until the process terminates.
    Decisions are never revisited.

    :param process: the decision process.
    :param policy: maps a state to the action to take.
    :return: the decision trace.
    :raises InvalidAction: if the policy picks an action outside the valid
        set; the error names the 1-based step.
    """
    state = process.initial_state()
    decisions = []
    total = 0.0
    step = 0
    while not process.is_terminal(state):
        step += 1
        actions = process.valid_actions(state)
        action = policy(state)
        if action not in actions:
            raise InvalidAction(step, action, actions)
        # A forced move is a consequence of earlier choices, not an error.
        forced = len(actions) == 1
        optimal = forced or action == process.optimal_action(state)
        cost = process.cost(state, action)
        total += cost
        decisions.append(Decision(state, action, cost, optimal, forced))
        state = process.transition(state, action)
    return Rollout(tuple(decisions), total)
