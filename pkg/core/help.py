import logging

from yaml import YAMLError, safe_load

from core.api import split_camel

logger = logging.getLogger(__name__)


def __resolve_alias(cmd):
    return set([cmd.name] + list(cmd.aliases))


def parse_doc(doc: str) -> dict:
    """
    Parse a YAML command docstring.
    :param doc: the docstring.
    :return: the help fields; the whole text is the description if the
        docstring isn't valid YAML.
    """
    try:
        help_dict = safe_load(doc)
    except (YAMLError, AttributeError) as e:
        logger.log(logging.WARN, str(e))
        return {'Description': doc or ''}
    if not isinstance(help_dict, dict):
        return {'Description': doc or ''}
    return help_dict


def get_help(app) -> tuple:
    """
    Return the general help text and the help of every command.
    :param app: the RodHarness instance.
    :return: the general help text, and a dict of help text by command name
        and alias.
    """
    from harness import __title__ as name
    lines = [f'{name} Help',
             f'For detailed help please use {app.prog} help [command_name]',
             '']
    group_cmd = {}
    all_help = {}
    for command in app.commands.values():
        _name = command.name
        for n in __resolve_alias(command):
            all_help[n] = single_help(app, command, _name)
        group_name = ' '.join(split_camel(command.group) + ['Commands'])
        group_cmd.setdefault(group_name, []).append(_name)
    for key in sorted(group_cmd.keys()):
        lines.append(f'{key}: {", ".join(sorted(set(group_cmd[key])))}')
    return '\n'.join(lines), all_help


def single_help(app, cmd, cmd_name) -> str:
    """
    Generate help text for a given command.
    :return: the help text for the given command.
    """
    help_dict = parse_doc(cmd.help)
    lines = [cmd_name, f'    {str(help_dict.pop("Description", "")).strip()}']
    if cmd.aliases:
        lines.append(f'Aliases: {", ".join(cmd.aliases)}')
    for key, val in help_dict.items():
        val = str(val)
        try:
            val = val.format(prog=app.prog)
        except (KeyError, IndexError):
            val = val.replace('{prog}', app.prog)
        lines.append(f'{key}:')
        lines.extend(f'    {line}' for line in val.strip().splitlines())
    return '\n'.join(lines)
