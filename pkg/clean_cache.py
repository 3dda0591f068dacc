from pathlib import Path

from logs import log_path


def clean():
    for _path in log_path.iterdir():
        path = Path(_path)
        if path.suffix == '.log' and not path.is_dir():
            path.unlink()


if __name__ == '__main__':
    clean()
