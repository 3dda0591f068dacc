from commands.dataset_commands import Datasets
from commands.evaluation_commands import Evaluation
from commands.info_commands import Info
from commands.rod_commands import RatioOfOptimalDecisions

__all__ = ['Datasets', 'Evaluation', 'Info', 'RatioOfOptimalDecisions']
