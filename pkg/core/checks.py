from typing import Iterable, Sequence


class ValidationError(Exception):
    """
    Base class for every failure caused by bad input data.
    The CLI maps it to exit code 1.
    """
    exit_code = 1


class UsageError(Exception):
    """
    Raised when a command is invoked with an unusable combination of flags.
    """
    exit_code = 2

    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return f'Usage error: {self.msg}'


class InvalidTour(ValidationError):
    def __init__(self, reason: str, index: int = None,
                 instance_id: str = None, procedure: str = None):
        super().__init__(reason, index, instance_id, procedure)
        self.reason = reason
        self.index = index
        self.instance_id = instance_id
        self.procedure = procedure

    def __str__(self):
        msg = f'Invalid tour: {self.reason}'
        if self.index is not None:
            msg += f' (offending index {self.index})'
        if self.instance_id is not None:
            msg += f'\nInstance: {self.instance_id}'
        if self.procedure is not None:
            msg += f'\nProcedure: {self.procedure}'
        return msg


class InvalidInstance(ValidationError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason

    def __str__(self):
        return f'Invalid instance: {self.reason}'


class InvalidAction(ValidationError):
    def __init__(self, step: int, action, valid: Sequence):
        super().__init__(step, action, valid)
        self.step = step
        self.action = action
        self.valid = tuple(valid)

    def __str__(self):
        return (f'Policy returned an invalid action at step {self.step}: '
                f'{self.action!r} not in {list(self.valid)}')


class ExactBoundExceeded(ValidationError):
    def __init__(self, method: str, n: int, bound: int):
        super().__init__(method, n, bound)
        self.method = method
        self.n = n
        self.bound = bound

    def __str__(self):
        return (f'{self.method} is limited to n <= {self.bound}, got n = '
                f'{self.n}. Import references computed elsewhere '
                f'(solve --method import) or use best-known references '
                f'(solve --method lk).')


class InstanceMismatch(ValidationError):
    def __init__(self, msg: str = 'State does not belong to the instance of '
                                  'this table.'):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return self.msg


class ReferenceMismatch(ValidationError):
    def __init__(self, instance_id: str, reported: float, recomputed: float):
        super().__init__(instance_id, reported, recomputed)
        self.instance_id = instance_id
        self.reported = reported
        self.recomputed = recomputed

    def __str__(self):
        return (f'Reference {self.instance_id}: reported cost '
                f'{self.reported!r} but order costs {self.recomputed!r}')


class MissingReferences(ValidationError):
    def __init__(self, instance_ids: Iterable[str]):
        instance_ids = sorted(instance_ids)
        super().__init__(instance_ids)
        self.instance_ids = instance_ids

    def __str__(self):
        shown = ', '.join(self.instance_ids[:10])
        more = len(self.instance_ids) - 10
        if more > 0:
            shown += f' (+{more} more)'
        return f'Missing reference solutions for: {shown}'


class ClaimsBeatOptimum(ValidationError):
    def __init__(self, index: int, model_cost: float, reference_cost: float):
        super().__init__(index, model_cost, reference_cost)
        self.index = index
        self.model_cost = model_cost
        self.reference_cost = reference_cost

    def __str__(self):
        return (f'Model cost {self.model_cost!r} at position {self.index} is '
                f'below the reference cost {self.reference_cost!r}')


class DatasetError(ValidationError):
    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return f'Dataset error: {self.msg}'


class SubmissionError(ValidationError):
    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return f'Submission error: {self.msg}'


class ReportError(ValidationError):
    def __init__(self, msg: str):
        super().__init__(msg)
        self.msg = msg

    def __str__(self):
        return f'Report error: {self.msg}'


def check_permutation(order: Sequence[int], n: int):
    """
    Check that an order visits every vertex 0..n-1 exactly once.

    :param order: the vertex order.
    :param n: the vertex count.
    :raises InvalidTour: on a missing, repeated or out of range vertex.
    """
    seen = [False] * n
    for i, v in enumerate(order):
        if not 0 <= v < n:
            raise InvalidTour(f'vertex {v} out of range', i)
        if seen[v]:
            raise InvalidTour(f'vertex {v} repeated', i)
        seen[v] = True
    if len(order) != n:
        missing = seen.index(False)
        raise InvalidTour(f'vertex {missing} missing', missing)
