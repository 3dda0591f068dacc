from pathlib import Path

config_path = Path(Path(__file__).parent)

__all__ = ['config_path']
