from pathlib import Path

log_path = Path(Path(__file__).parent)

__all__ = ['log_path']
