"""
Experiment tables: report.csv (reproducible), timing.csv (machine-relative
wall times) and report.md (rendered percentages).
"""
import csv
from collections import namedtuple
from pathlib import Path
from typing import Dict, List, Sequence

from core.api import percent
from core.checks import ReportError, UsageError
from core.evaluation import ExperimentRow

REPORT_CSV = 'report.csv'
TIMING_CSV = 'timing.csv'
REPORT_MD = 'report.md'

REPORT_COLUMNS = ('dataset', 'model', 'construction', 'local_search', 'gap',
                  'classical_gap', 'gap_without_search', 'delta', 'rod')
TIMING_COLUMNS = ('model', 'construction', 'local_search', 'mean_time_s')
MD_HEADER = ('Model', 'Construction', 'Local search', 'Gap (%)',
             'Classical gap (%)', 'Gap w/o search (%)', 'Δ (%)', 'ROD (%)',
             'Time (s)*')


class ExperimentReport(namedtuple('ExperimentReport',
                                  ('dataset_id', 'rows'))):
    """
    Rows of one dataset, unique by (model, construction, local search).
    """
    __slots__ = ()

    def check(self):
        """
        :raises ReportError: on a repeated row key.
        """
        seen = set()
        for row in self.rows:
            if row.key in seen:
                raise ReportError(f'duplicate row {"/".join(row.key)}')
            seen.add(row.key)


def _fmt(value) -> str:
    return '' if value is None else repr(float(value))


def _parse(value: str):
    return None if value == '' else float(value)


def write_report(path: Path, report: ExperimentReport):
    """
    Write report.csv, timing.csv and report.md into `path`.
    """
    report.check()
    path.mkdir(parents=True, exist_ok=True)
    with path.joinpath(REPORT_CSV).open('w', newline='',
                                        encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(REPORT_COLUMNS)
        for row in report.rows:
            writer.writerow((report.dataset_id, row.model, row.construction,
                             row.local_search, _fmt(row.gap),
                             _fmt(row.classical_gap), _fmt(row.base_gap),
                             _fmt(row.delta), _fmt(row.rod)))
    with path.joinpath(TIMING_CSV).open('w', newline='',
                                        encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TIMING_COLUMNS)
        for row in report.rows:
            writer.writerow(row.key + (_fmt(row.mean_time),))
    path.joinpath(REPORT_MD).write_text(render_markdown(report),
                                        encoding='utf-8')


def read_report(path: Path) -> ExperimentReport:
    """
    Read a report written by `write_report`.

    :param path: the report directory or its report.csv.
    :raises ReportError: on a malformed file or rows of several datasets.
    """
    csv_file = path.joinpath(REPORT_CSV) if path.is_dir() else path
    times: Dict[tuple, float] = {}
    timing_file = csv_file.with_name(TIMING_CSV)
    if timing_file.is_file():
        with timing_file.open(newline='', encoding='utf-8') as f:
            for rec in csv.DictReader(f):
                key = (rec['model'], rec['construction'], rec['local_search'])
                times[key] = _parse(rec['mean_time_s'])
    rows, datasets = [], set()
    with csv_file.open(newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise ReportError(f'{csv_file} is not an experiment report')
        for rec in reader:
            datasets.add(rec['dataset'])
            key = (rec['model'], rec['construction'], rec['local_search'])
            rows.append(ExperimentRow(
                *key, float(rec['gap']), float(rec['classical_gap']),
                float(rec['gap_without_search']), float(rec['delta']),
                times.get(key), _parse(rec['rod'])))
    if len(datasets) > 1:
        raise ReportError(f'{csv_file} mixes datasets '
                          f'{", ".join(sorted(datasets))}')
    if not datasets:
        raise ReportError(f'{csv_file} has no rows')
    return ExperimentReport(datasets.pop(), tuple(rows))


def merge_reports(reports: Sequence[ExperimentReport]) -> ExperimentReport:
    """
    Concatenate reports of one dataset, keeping input order.

    :raises UsageError: on an empty input list.
    :raises ReportError: on mixed datasets or a row present twice.
    """
    if not reports:
        raise UsageError('report needs at least one input')
    datasets = sorted({r.dataset_id for r in reports})
    if len(datasets) > 1:
        raise ReportError(f'cannot merge datasets {", ".join(datasets)}')
    rows: List[ExperimentRow] = [row for r in reports for row in r.rows]
    merged = ExperimentReport(datasets[0], tuple(rows))
    merged.check()
    return merged


def render_markdown(report: ExperimentReport) -> str:
    """
    Aligned markdown table with percentages to two decimals.
    """
    table = [MD_HEADER]
    for row in report.rows:
        table.append((
            row.model, row.construction, row.local_search, percent(row.gap),
            percent(row.classical_gap), percent(row.base_gap),
            percent(row.delta),
            '' if row.rod is None else percent(row.rod),
            '' if row.mean_time is None else f'{row.mean_time:.4f}'))
    widths = [max(len(line[i]) for line in table)
              for i in range(len(MD_HEADER))]

    def fmt(line):
        return '| ' + ' | '.join(c.ljust(w) for c, w in zip(line, widths)) \
               + ' |'

    lines = [f'Dataset: {report.dataset_id}', '', fmt(table[0]),
             '| ' + ' | '.join('-' * w for w in widths) + ' |']
    lines.extend(fmt(line) for line in table[1:])
    lines.extend(['', '* Mean wall time per instance of the search '
                      'procedures; machine-relative.', ''])
    return '\n'.join(lines)
