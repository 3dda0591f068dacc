from core.checks import UsageError, ValidationError


def command_error_handler(exception: Exception) -> tuple:
    """
    A function that handles command errors
    :param exception: the exception raised
    :return: the message to be shown and the exit code, based on the
        exception type
    :raises: the exception itself if it is not a known command error.
    """
    ex_str = str(exception)
    if isinstance(exception, (ValidationError, UsageError)):
        return ex_str, exception.exit_code
    if isinstance(exception, FileNotFoundError):
        return f'File not found: {exception.filename}', 1
    if isinstance(exception, ValueError):
        return f'Invalid value: {ex_str}', 1
    raise exception


def format_command_error(ex: Exception, command: str) -> str:
    """
    Format a command error to log.
    :param ex: the exception raised.
    :param command: the formatted command that triggered it.
    :return: a message to be logged.
    """
    four_space = ' ' * 4
    ex_type = type(ex).__name__
    return (
        f'{four_space}Triggered command: {command}\n'
        f'{four_space}Type: {ex_type}\n'
        f'{four_space}Exception: {ex}'
    )
