from argparse import ArgumentTypeError

from core.checks import UsageError

ALIASES = {
    'construction': {
        'nn': 'nn',
        'nearest': 'nn',
        'nearest-neighbour': 'nn',
        'nearest-neighbor': 'nn',
        'greedy': 'greedy',
        'sample': 'sample',
        'sampling': 'sample',
        'bs': 'beam',
        'beam': 'beam',
        'bs*': 'beam-st',
        'beam*': 'beam-st',
        'beam-st': 'beam-st',
        'bsst': 'beam-st',
    },
    'local_search': {
        'none': 'none',
        'no': 'none',
        '2opt': '2opt',
        '2-opt': '2opt',
        'two-opt': '2opt',
        '3opt': '3opt',
        '3-opt': '3opt',
        'three-opt': '3opt',
        'lk': 'lk',
        'lin-kernighan': 'lk',
    },
    'method': {
        'held-karp': 'held-karp',
        'heldkarp': 'held-karp',
        'hk': 'held-karp',
        'dp': 'held-karp',
        'brute': 'brute',
        'brute-force': 'brute',
        'import': 'import',
        'lk': 'lk',
        'best-known': 'lk',
    },
    'gap_mode': {
        'ratio-of-sums': 'ratio-of-sums',
        'sums': 'ratio-of-sums',
        'mean-of-ratios': 'mean-of-ratios',
        'mean': 'mean-of-ratios',
    }
}


def parse_argument(arg_type: str, arg: str) -> str:
    """
    Resolve a user spelling to its canonical value.

    :param arg_type: a key of ALIASES.
    :param arg: the user argument.

    :return: the canonical value.
    :raises UsageError: if the spelling is unknown.
    """
    value = ALIASES[arg_type].get(arg.strip().lower().replace('_', '-'))
    if value is None:
        choices = sorted(set(ALIASES[arg_type].values()))
        raise UsageError(f'unknown {arg_type.replace("_", " ")} {arg!r}, '
                         f'expected one of {", ".join(choices)}')
    return value


def alias_type(arg_type: str):
    """
    An argparse `type` that resolves aliases of `arg_type`.
    """
    def _parse(arg: str) -> str:
        try:
            return parse_argument(arg_type, arg)
        except UsageError as e:
            raise ArgumentTypeError(e.msg)
    _parse.__name__ = arg_type
    return _parse
