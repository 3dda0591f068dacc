import logging
from argparse import Namespace
from datetime import datetime
from pathlib import Path
from sys import stderr

from colorlog import ColoredFormatter
from pytz import timezone

CONSOLE_FORMAT = ('%(asctime)s %(log_color)s%(levelname)s %(name)s: '
                  '%(message)s')
FILE_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
DEFAULT_TIMEZONE = 'UTC'

_zone = timezone(DEFAULT_TIMEZONE)


def command_formatter(command: str, args: Namespace = None) -> str:
    """
    Format a command into a message to be logged.

    :param command: the command name.
    :param args: the parsed flags of the command.
    :return: the formatted log message.
    """
    if args is None:
        return command
    flags = ' '.join(f'--{key.replace("_", "-")} {val}'
                     for key, val in sorted(vars(args).items())
                     if key not in ('command', 'handler') and val is not None)
    return f'{command} {flags}'.rstrip()


def timestamp(*args):
    """
    Gets the current timestamp in the configured time zone.

    :return: a time tuple for the log formatters.
    """
    return datetime.now(_zone).timetuple()


def setup_logging(start_time, path: Path, level: str = 'INFO',
                  tz: str = DEFAULT_TIMEZONE):
    """
    Set up logging
    :param start_time: the start time of the run, names the log file.
    :param path: the path to the log folder
    :param level: the root log level.
    :param tz: the time zone of the timestamps.
    :return: the logger object
    """
    global _zone
    _zone = timezone(tz)
    logging.Formatter.converter = timestamp
    logger = logging.getLogger()
    logger.setLevel(level)
    logger.addHandler(get_file_handler(path, start_time))
    logger.addHandler(get_console_handler())
    return logger


def get_file_handler(path: Path, start_time):
    """
    Get a file handler for logging
    :param path: the log file path
    :param start_time: the start time
    :return: the file handler
    """
    handler = logging.FileHandler(
        filename=path.joinpath(f'{int(start_time)}.log'),
        encoding='utf-8',
        mode='w+'
    )
    handler.setFormatter(logging.Formatter(FILE_FORMAT))
    return handler


def get_console_handler():
    """
    Get a colourful console handler on stderr, so stdout stays free for
    command output.
    :return: the console handler
    """
    console = logging.StreamHandler(stderr)
    console.setFormatter(
        ColoredFormatter(
            CONSOLE_FORMAT,
            datefmt='%y-%m-%d %H:%M:%S',
            reset=True,
            log_colors={
                'DEBUG': 'cyan',
                'INFO': 'blue',
                'WARNING': 'yellow',
                'ERROR': 'red',
                'CRITICAL': 'red,bg_white',
            },
            secondary_log_colors={},
            style='%'
        )
    )
    return console
