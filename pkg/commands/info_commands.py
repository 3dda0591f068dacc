from harness import RodHarness, argument, command
from data import data_path


class Info:
    def __init__(self, app: RodHarness):
        self.app = app
        with data_path.joinpath('info.txt').open(encoding='utf-8') as f:
            self.info_msg = f.read()

    @command()
    def info(self, args):
        """
        Description: Displays information about the harness.
        """
        self.app.say(self.info_msg)

    @command(argument('name', nargs='*', help='command name'))
    def help(self, args):
        """
        Description: Help command.
        Usage: "`{prog} help` for a list of all commands,
        `{prog} help command name` for help for the specific command."
        """
        self.app.say(
            self.app.all_help.get(' '.join(args.name), self.app.help_general)
        )
