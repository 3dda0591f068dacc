from json import dumps
from pathlib import Path

from core.argument_parser import alias_type
from core.checks import ExactBoundExceeded, MissingReferences
from core.evaluation import EvaluationHandler, SearchSettings
from core.exact import MAX_HELD_KARP
from core.oracle import OracleConfig
from core.rod import RodReport, compute_rod, install_processes
from core.tsp import as_process
from data_controller.datasets import Dataset
from data_controller.submissions import ModelSubmission, load_costs
from harness import RodHarness, argument, command

ROD_JSON = 'rod.json'
ROD_CURVE = 'rod_curve.csv'

ORACLE_ARGUMENTS = (
    argument('--k', type=float, default=None,
             help='alpha grid step (default from config)'),
    argument('--rollouts', type=int, default=None,
             help='oracle rollouts per instance (default from config)'),
    argument('--bisect', action='store_true',
             help='coarse scan then bisection instead of a linear scan'),
    argument('--coarse-k', type=float, default=None,
             help='coarse step of --bisect (default from config)'),
    argument('--gap-mode', type=alias_type('gap_mode'),
             default='ratio-of-sums',
             help='ratio-of-sums or mean-of-ratios'),
    argument('--include-optimal', action='store_true',
             help='let the sub-optimal draw pick the optimal action too'),
)


def _completion_process(instance):
    return as_process(instance)


def oracle_config(app: RodHarness, args) -> OracleConfig:
    exclude = app.setting('oracle', 'exclude_optimal_in_sampling')
    return OracleConfig(
        alpha=0.0,
        rollouts_per_instance=app.setting('oracle', 'rollouts_per_instance',
                                          args.rollouts) or 1,
        seed=args.seed,
        exclude_optimal_in_sampling=(not args.include_optimal
                                     and exclude is not False),
        epsilon_cost=app.setting('oracle', 'epsilon_cost') or 1e-12)


def run_rod(app: RodHarness, dataset: Dataset, references: dict,
            model_costs: list, args) -> RodReport:
    """
    Build the completion tables of a dataset and scan the oracle accuracy.
    :param app: the harness.
    :param dataset: the dataset.
    :param references: reference solutions by instance id.
    :param model_costs: the model's costs in manifest order.
    :param args: the parsed oracle arguments.
    :return: the RodReport.
    """
    missing = [i for i in dataset.instance_ids if i not in references]
    if missing:
        raise MissingReferences(missing)
    if dataset.n > MAX_HELD_KARP:
        raise ExactBoundExceeded('ROD (completion tables)', dataset.n,
                                 MAX_HELD_KARP)
    with app.pool() as pool:
        processes = pool.map(_completion_process, dataset.instances())
    k = app.setting('rod', 'k', args.k) or 0.001
    coarse_k = app.setting('rod', 'coarse_k', args.coarse_k) or 0.05
    with app.pool(install_processes, (processes,)) as pool:
        return compute_rod(processes, references, model_costs,
                           oracle_config(app, args), k, pool.map,
                           args.bisect, coarse_k, args.gap_mode,
                           dataset.dataset_id)


def write_rod(path: Path, report: RodReport):
    path.mkdir(parents=True, exist_ok=True)
    path.joinpath(ROD_JSON).write_text(
        dumps(report.to_json(), indent=2) + '\n', encoding='utf-8')
    path.joinpath(ROD_CURVE).write_text(report.curve_csv(), encoding='utf-8')


class RatioOfOptimalDecisions:
    """
    A class to hold the ROD command.
    """

    def __init__(self, app: RodHarness):
        self.app = app

    def __model_costs(self, dataset: Dataset, source: str, seed: int):
        """
        Costs of the evaluated model, in manifest order.
        :param source: 'nn', a cost file from eval, or a submission file.
        """
        if source.lower() == 'nn':
            settings = SearchSettings('nn', seed=seed)
            sources = None
        else:
            path = Path(source)
            if path.suffix == '.jsonl':
                return load_costs(path, dataset)
            submission = ModelSubmission.load(path, dataset)
            params = submission.params
            settings = SearchSettings(
                submission.construction, 'none',
                params.get('iterations') or self.app.setting(
                    'search', 'sampling_iterations') or 16,
                params.get('width') or self.app.setting(
                    'search', 'beam_width') or 16,
                seed=params.get('seed', seed))
            sources = submission.sources
        handler = EvaluationHandler(dataset.instances(), {}, settings)
        with self.app.pool() as pool:
            handler.mapper = pool.map
            handler.run(sources)
        return handler.final_costs()

    @command(
        argument('--dataset', type=Path, required=True),
        argument('--costs-or-model', required=True,
                 help='nn, a costs/*.jsonl file from eval, or a model '
                      'submission'),
        argument('--seed', type=int, default=0),
        argument('--out', type=Path, required=True,
                 help='directory for rod.json and rod_curve.csv'),
        *ORACLE_ARGUMENTS, name='rod')
    def rod(self, args):
        """
        Description: Ratio of optimal decisions of a model on a dataset.
        Usage: |
            {prog} rod --dataset data/tsp12 --costs-or-model nn --out out/rod-nn
            {prog} rod --dataset data/tsp12 --costs-or-model model.json --k 0.01 --rollouts 16 --out out/rod
            Scans the oracle accuracy alpha = 0, k, 2k, ... and returns the
            first alpha whose oracle gap is no larger than the model's.
        """
        dataset = Dataset.load(args.dataset)
        references = dataset.references()
        missing = [i for i in dataset.instance_ids if i not in references]
        if missing:
            raise MissingReferences(missing)
        costs = self.__model_costs(dataset, args.costs_or_model, args.seed)
        report = run_rod(self.app, dataset, references, costs, args)
        write_rod(args.out, report)
        self.app.say(f'ROD = {100 * report.alpha:.1f}% (model gap '
                     f'{100 * report.model_gap:.2f}%, {len(report.curve)} '
                     f'alpha points) written to {args.out}')
