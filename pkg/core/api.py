"""
A collection of useful functions.
"""
import re
from hashlib import sha256
from pathlib import Path
from typing import List


def split_camel(s: str) -> List[str]:
    """
    Split a string by starting chars of UpperCamelCase
    :param s: the input string.
    :return: a list of strings that was split by capital letters.
    """
    regex = re.compile('[A-Z][^A-Z]*')
    return regex.findall(s)


def slugify(s: str) -> str:
    """
    Make a string safe to use as a file name.
    :param s: the input string.
    :return: the string with every run of unsafe chars replaced by '_'.
    """
    return re.sub(r'[^A-Za-z0-9._-]+', '_', s).strip('_') or '_'


def file_digest(path: Path) -> str:
    """
    :return: the hex SHA-256 of a file's bytes.
    """
    return sha256(path.read_bytes()).hexdigest()


def percent(fraction: float) -> str:
    """
    Render a fraction as a percentage with 2 decimals.
    """
    return f'{100 * fraction:.2f}'
