import logging
from argparse import ArgumentParser
from collections import namedtuple
from traceback import format_exc
from typing import Sequence

from core.help import get_help, parse_doc
from harness.error_handler import command_error_handler, format_command_error
from harness.logger import command_formatter
from harness.worker_pool import get_pool_manager


class Command(namedtuple(
        'Command', ('name', 'aliases', 'callback', 'arguments', 'group'))):
    __slots__ = ()

    @property
    def help(self) -> str:
        return self.callback.__doc__ or ''


def argument(*flags, **kwargs) -> tuple:
    """
    Describe one argparse argument of a command.
    """
    return flags, kwargs


def command(*arguments, name: str = None, aliases: Sequence[str] = ()):
    """
    Mark a method of a command group as a CLI command. The method takes the
    parsed arguments and returns nothing; its docstring is the YAML help.
    :param arguments: results of `argument`.
    :param name: the command name, defaults to the method name.
    :param aliases: other names of the command.
    """
    def decorator(func):
        func.__command__ = (name or func.__name__, tuple(aliases), arguments)
        return func
    return decorator


class RodHarness:
    def __init__(self, prog: str, start_time: int, config: dict, logger,
                 output=print):
        """
        Init the instance of RodHarness.
        :param prog: the program name shown in usage and help.
        :param start_time: the run start time.
        :param config: the loaded config.json.
        :param logger: the logger.
        :param output: where command output is sent.
        """
        self.prog = prog
        self.start_time = start_time
        self.config = config
        self.logger = logger
        self.output = output
        self.commands = {}
        self.help_general = None
        self.all_help = None

    def say(self, msg: str):
        """
        Show a message to the user.
        """
        self.output(msg)

    def setting(self, section: str, key: str, value=None):
        """
        A command line value, falling back to the config.
        :param section: the config section, or None for a top level key.
        :param key: the config key.
        :param value: the value given on the command line, if any.
        """
        if value is not None:
            return value
        if section is None:
            return self.config.get(key)
        return self.config.get(section, {}).get(key)

    def pool(self, initializer=None, initargs: tuple = ()):
        """
        Get a worker pool sized by the config.
        """
        return get_pool_manager(self.logger, self.config.get('workers'),
                                initializer, initargs)

    def add_group(self, group):
        """
        Register every command of a command group.
        :param group: the command group instance.
        """
        for attr in dir(group):
            callback = getattr(group, attr)
            spec = getattr(callback, '__command__', None)
            if spec is None:
                continue
            name, aliases, arguments = spec
            self.commands[name] = Command(name, aliases, callback, arguments,
                                          type(group).__name__)

    def build_parser(self) -> ArgumentParser:
        """
        Build the argparse parser of every registered command.
        """
        parser = ArgumentParser(prog=self.prog)
        parser.add_argument('--workers', type=int, default=None,
                            help='worker processes (default from config)')
        subparsers = parser.add_subparsers(dest='command')
        subparsers.required = True
        for cmd in self.commands.values():
            description = str(parse_doc(cmd.help).get('Description', ''))
            sub = subparsers.add_parser(cmd.name, aliases=list(cmd.aliases),
                                        description=description.strip(),
                                        help=description.strip())
            for flags, kwargs in cmd.arguments:
                sub.add_argument(*flags, **kwargs)
            sub.set_defaults(handler=cmd)
        return parser

    def start(self, groups: list, argv: Sequence[str] = None) -> int:
        """
        Start the harness.
        :param groups: the list of command groups.
        :param argv: the command line, defaults to sys.argv.
        :return: the exit code.
        """
        for group in groups:
            self.add_group(group)
        self.help_general, self.all_help = get_help(self)
        return self.run(argv)

    def run(self, argv: Sequence[str] = None) -> int:
        """
        Parse and run one command.
        :return: 0 on success, 1 on a validation failure, 2 on a usage
            error.
        """
        args = self.build_parser().parse_args(argv)
        if args.workers is not None:
            self.config['workers'] = args.workers
        cmd = args.handler
        log_entry = command_formatter(cmd.name, args)
        self.logger.log(logging.INFO, log_entry)
        try:
            cmd.callback(args)
        except Exception as exception:
            return self.on_command_error(exception, log_entry)
        return 0

    def on_command_error(self, exception: Exception, log_entry: str) -> int:
        """
        Custom command error handling
        :param exception: the exception raised
        :param log_entry: the formatted command
        :return: the exit code.
        """
        try:
            res, code = command_error_handler(exception)
        except Exception as e:
            tb = format_exc()
            msg = format_command_error(e, log_entry)
            self.logger.log(logging.CRITICAL, f'\n{msg}\n\n{tb}')
            self.say(f'I ran into an unexpected error while executing this '
                     f'command.\n{msg}')
            return 1
        self.logger.log(logging.ERROR, res)
        self.say(res)
        return code
