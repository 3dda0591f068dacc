import logging
from pathlib import Path

from core.argument_parser import alias_type
from core.checks import DatasetError, ExactBoundExceeded, UsageError
from core.exact import MAX_BRUTE_FORCE, MAX_HELD_KARP, best_known, \
    brute_force, held_karp
from data_controller.datasets import Dataset
from harness import RodHarness, argument, command


def _held_karp_reference(instance):
    solution, _ = held_karp(instance)
    return solution


def _best_known_reference(job):
    instance, starts, seed = job
    return best_known(instance, starts, seed)


class Datasets:
    """
    A class to hold all dataset commands.
    """

    def __init__(self, app: RodHarness):
        self.app = app

    @command(
        argument('--n', type=int, required=True, help='vertices per instance'),
        argument('--count', type=int, required=True, help='instances'),
        argument('--seed', type=int, default=0, help='generator seed'),
        argument('--out', type=Path, required=True, help='dataset directory'),
        argument('--overwrite', action='store_true',
                 help='replace the contents of a non-empty directory'))
    def gen(self, args):
        """
        Description: Generate random euclidean instances on the unit square.
        Usage: |
            {prog} gen --n 12 --count 100 --seed 7 --out data/tsp12
            The same flags always give a byte-identical directory.
        """
        dataset = Dataset.create(args.out, args.n, args.count, args.seed,
                                 args.overwrite)
        self.app.say(f'Dataset {dataset.dataset_id}: {args.count} instances '
                     f'of n = {args.n} in {args.out}')

    @command(
        argument('--dataset', type=Path, required=True),
        argument('--method', type=alias_type('method'), default='held-karp',
                 help='held-karp, brute, import or lk (best-known)'),
        argument('--import-file', type=Path, default=None,
                 help='JSON lines references for --method import'),
        argument('--starts', type=int, default=None,
                 help='multi-start count for --method lk'),
        argument('--seed', type=int, default=0))
    def solve(self, args):
        """
        Description: Compute or import reference solutions of a dataset.
        Usage: |
            {prog} solve --dataset data/tsp12 --method held-karp
            {prog} solve --dataset data/tsp50 --method import --import-file opt.jsonl
            Held-Karp is exact up to n = 20 and brute force up to n = 10.
            Use --method lk for best-known references on larger instances.
        """
        dataset = Dataset.load(args.dataset)
        method = args.method
        if method == 'import':
            if args.import_file is None:
                raise UsageError('--method import needs --import-file')
            result = dataset.import_references(args.import_file)
            if result.rejected:
                raise DatasetError(
                    f'{len(result.rejected)} reference records rejected, '
                    f'first: {result.rejected[0][0]}: '
                    f'{result.rejected[0][1]}')
            missing = [i for i in dataset.instance_ids
                       if i not in result.accepted]
            if missing:
                self.app.logger.log(logging.WARNING,
                                    f'{len(missing)} instances have no '
                                    f'imported reference')
            solutions = [result.accepted[i] for i in dataset.instance_ids
                         if i in result.accepted]
        else:
            instances = dataset.instances()
            with self.app.pool() as pool:
                if method == 'held-karp':
                    if dataset.n > MAX_HELD_KARP:
                        raise ExactBoundExceeded('Held-Karp', dataset.n,
                                                 MAX_HELD_KARP)
                    solutions = pool.map(_held_karp_reference, instances)
                elif method == 'brute':
                    if dataset.n > MAX_BRUTE_FORCE:
                        raise ExactBoundExceeded('brute force', dataset.n,
                                                 MAX_BRUTE_FORCE)
                    solutions = pool.map(brute_force, instances)
                else:
                    starts = self.app.setting('search', 'lk_starts',
                                              args.starts)
                    solutions = pool.map(
                        _best_known_reference,
                        [(inst, starts, args.seed) for inst in instances])
        dataset.save_references(solutions)
        provenance = sorted({s.provenance for s in solutions})
        self.app.say(f'Wrote {len(solutions)} references '
                     f'({", ".join(provenance)}) to {dataset.references_path}')
