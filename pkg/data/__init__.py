from pathlib import Path

data_path = Path(Path(__file__).parent)

__all__ = ['data_path']
