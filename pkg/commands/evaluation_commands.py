from pathlib import Path

from commands.rod_commands import ORACLE_ARGUMENTS, run_rod, write_rod
from core.api import percent, slugify
from core.argument_parser import alias_type
from core.checks import MissingReferences, ReportError
from core.evaluation import EvaluationHandler, SearchSettings
from data_controller.datasets import Dataset
from data_controller.reports import REPORT_CSV, ExperimentReport, \
    merge_reports, read_report, render_markdown, write_report
from data_controller.submissions import ModelSubmission, write_costs, \
    write_gaps
from harness import RodHarness, argument, command

BASELINE = 'baseline'


class Evaluation:
    """
    A class to hold all evaluation and reporting commands.
    """

    def __init__(self, app: RodHarness):
        self.app = app

    def __settings(self, args, submission: ModelSubmission) -> SearchSettings:
        params = submission.params if submission else {}
        construction = args.construction
        if construction is None:
            construction = 'nn' if submission is None \
                else submission.construction
        return SearchSettings(
            construction, args.local_search,
            args.iters or params.get('iterations')
            or self.app.setting('search', 'sampling_iterations') or 16,
            args.width or params.get('width')
            or self.app.setting('search', 'beam_width') or 16,
            self.app.setting('search', 'lk_depth', args.lk_depth) or 5,
            self.app.setting('search', 'lk_neighbors', args.lk_neighbors) or 5,
            args.seed)

    @command(
        argument('--dataset', type=Path, required=True),
        argument('--model-file', type=Path, default=None,
                 help='model submission; omit for the nearest neighbour '
                      'baseline'),
        argument('--construction', type=alias_type('construction'),
                 default=None,
                 help='nn, greedy, sample, beam or beam-st (bs*)'),
        argument('--iters', type=int, default=None,
                 help='sampling iterations'),
        argument('--width', type=int, default=None, help='beam width'),
        argument('--local-search', type=alias_type('local_search'),
                 default='none', help='none, 2opt, 3opt or lk'),
        argument('--lk-depth', type=int, default=None),
        argument('--lk-neighbors', type=int, default=None),
        argument('--seed', type=int, default=0),
        argument('--out', type=Path, required=True,
                 help='report directory'),
        argument('--rod', action='store_true',
                 help='also compute the ROD of the evaluated tours'),
        *ORACLE_ARGUMENTS, name='eval')
    def evaluate(self, args):
        """
        Description: Evaluate a construction and a local search on a dataset.
        Usage: |
            {prog} eval --dataset data/tsp12 --local-search 2opt --out out/nn
            {prog} eval --dataset data/tsp12 --model-file model.json --construction bs* --width 16 --local-search lk --out out/model
            Writes report.csv, timing.csv and report.md, plus the final
            tours in costs/<row>.jsonl and the per-instance gaps in
            gaps/<row>.json, <row> being <model>-<construction>-<local search>.
            A report directory collects one row per configuration.
        """
        dataset = Dataset.load(args.dataset)
        references = dataset.references()
        missing = [i for i in dataset.instance_ids if i not in references]
        if missing:
            raise MissingReferences(missing)
        submission = None
        if args.model_file is not None:
            submission = ModelSubmission.load(args.model_file, dataset)
        settings = self.__settings(args, submission)
        model = submission.model if submission else BASELINE
        label = settings.construction
        if submission is not None and submission.has_tours:
            label = submission.construction

        previous = ()
        if args.out.joinpath(REPORT_CSV).is_file():
            existing = read_report(args.out)
            if existing.dataset_id != dataset.dataset_id:
                raise ReportError(f'{args.out} holds a report of dataset '
                                  f'{existing.dataset_id}')
            previous = existing.rows

        handler = EvaluationHandler(dataset.instances(), references, settings)
        with self.app.pool() as pool:
            handler.mapper = pool.map
            outcomes = handler.run(submission.sources if submission else None)
        row = handler.row(model, label, args.gap_mode, dataset.dataset_id)
        if args.rod:
            report = run_rod(self.app, dataset, references,
                             handler.final_costs(), args)
            write_rod(args.out.joinpath('rod', slugify(row.name)), report)
            row = row._replace(rod=report.alpha)

        write_costs(args.out.joinpath('costs', f'{slugify(row.name)}.jsonl'),
                    outcomes)
        write_gaps(args.out.joinpath('gaps', f'{slugify(row.name)}.json'),
                   handler.gap_report)
        rows = [r for r in previous if r.key != row.key] + [row]
        write_report(args.out, ExperimentReport(dataset.dataset_id,
                                                tuple(rows)))
        self.app.say(f'{row.name}: gap {percent(row.gap)}% '
                     f'(without search {percent(row.base_gap)}%, '
                     f'delta {percent(row.delta)}%)')

    @command(
        argument('files', nargs='*', type=Path,
                 help='report directories or report.csv files'),
        argument('--out', type=Path, default=None,
                 help='directory for the merged report'))
    def report(self, args):
        """
        Description: Merge experiment reports of one dataset.
        Usage: |
            {prog} report out/nn out/model --out out/all
            Rows keep the order of the inputs; a row present twice or
            reports of different datasets are rejected.
        """
        merged = merge_reports([read_report(f) for f in args.files])
        if args.out is None:
            self.app.say(render_markdown(merged))
            return
        write_report(args.out, merged)
        self.app.say(f'Merged {len(merged.rows)} rows into {args.out}')
