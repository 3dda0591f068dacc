from json import load
from sys import argv, exit
from time import time

from commands import *
from config import config_path
from harness import RodHarness
from harness.logger import setup_logging
from logs import log_path


def main(args=None) -> int:
    start_time = int(time())
    with config_path.joinpath('config.json').open() as f:
        config = load(f)

    logger = setup_logging(start_time, log_path,
                           config.get('log_level', 'INFO'),
                           config.get('timezone', 'UTC'))

    app = RodHarness('rod-harness', start_time, config, logger)
    groups = [Datasets(app), Evaluation(app), RatioOfOptimalDecisions(app),
              Info(app)]

    return app.start(groups, argv[1:] if args is None else args)


if __name__ == '__main__':
    exit(main())
