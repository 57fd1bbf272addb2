import csv
from pathlib import Path

from src.experiments.runner import METRICS, REPORT_METRICS, SweepResult
from src.metrics.measures import DIAGNOSTIC_COLUMNS, REPORT_COLUMNS, format_value
from src.utils.errors import ReportError
from src.utils.logger import log_activity, logger

REPORT_FILE = 'report.tsv'
SUMMARY_FILE = 'summary.tsv'
DIAGNOSTICS_FILE = 'diagnostics.tsv'
CURVES_DIR = 'curves'


def _writer(handle):
    return csv.writer(handle, delimiter='\t', lineterminator='\n')


def _aggregate_row(result: SweepResult, lam: float, length: int):
    row = [format_value(lam), str(length)]
    for metric in REPORT_METRICS:
        row.append(format_value(result.summary(metric, lam, length).mean))
    group = [r for r in result.reports if r.lam == lam and r.length == length]
    row.append(format_value(sum(r.evaluated_users for r in group) / len(group)))
    row.append(format_value(sum(r.skipped_users for r in group) / len(group)))
    row.append('mean')
    return row


def write_report(result: SweepResult, path: Path) -> int:
    #one row per (run, lambda, L), then one 'mean' row per (lambda, L)
    rows = 0
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(['#' + REPORT_COLUMNS[0], *REPORT_COLUMNS[1:]])
        for report in result.reports:
            writer.writerow(report.row())
            rows += 1
        for lam in result.config.lambda_grid:
            for length in result.config.list_lengths:
                writer.writerow(_aggregate_row(result, lam, length))
                rows += 1
    return rows


def write_diagnostics(result: SweepResult, path: Path) -> int:
    #per (run, lambda, L): short lists, sampling error, orphans and stranded item-tag mass
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(['#' + DIAGNOSTIC_COLUMNS[0], *DIAGNOSTIC_COLUMNS[1:]])
        for report in result.reports:
            writer.writerow(report.diagnostics_row())
    return len(result.reports)


def write_curves(result: SweepResult, directory: Path) -> int:
    #lambda<TAB>mean<TAB>std per metric per L, lambda to 4 decimals
    directory.mkdir(parents=True, exist_ok=True)
    files = 0
    for metric in METRICS:
        for length in result.config.list_lengths:
            with open(directory / f"{metric}_L{length}.tsv", 'w', newline='', encoding='utf-8') as f:
                writer = _writer(f)
                for lam, summary in result.curve(metric, length):
                    if summary.mean is None:
                        continue
                    writer.writerow([f"{lam:.4f}", format_value(summary.mean), format_value(summary.std)])
            files += 1
    return files


def write_summary(result: SweepResult, path: Path) -> None:
    #optimum per metric and L next to both pure baselines
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = _writer(f)
        writer.writerow(['#metric', 'L', 'lambda_opt', 'optimum', 'pure_item_tag', 'pure_user_item'])
        for length in result.config.list_lengths:
            for metric in METRICS:
                lam, best = result.optimum(metric, length)
                writer.writerow([
                    metric, str(length), format_value(lam), format_value(best),
                    format_value(result.summary(metric, 0.0, length).mean),
                    format_value(result.summary(metric, 1.0, length).mean),
                ])
        writer.writerow(['auc_improvement', str(result.config.list_lengths[0]), '', format_value(result.improvement()), '', ''])


def emit_report(result: SweepResult, destination) -> Path:
    destination = Path(destination)
    try:
        destination.mkdir(parents=True, exist_ok=True)
        rows = write_report(result, destination / REPORT_FILE)
        files = write_curves(result, destination / CURVES_DIR)
        write_summary(result, destination / SUMMARY_FILE)
        write_diagnostics(result, destination / DIAGNOSTICS_FILE)
    except OSError as e:
        raise ReportError(f"cannot write report to {destination}: {e}") from e

    short = sum(report.short_lists for report in result.reports)
    #orphans are per run, so count them on one (lambda, L) cell
    per_run = [r for r in result.reports
               if r.lam == result.config.lambda_grid[0] and r.length == result.config.list_lengths[0]]
    orphans = sum(r.orphan_pairs for r in per_run)
    logger.info(f"Wrote {rows} report rows and {files} curve files to {destination}")
    if short or orphans:
        logger.info(f"Diagnostics: {short} short lists over all (run, lambda, L), {orphans} orphaned test pairs")
    log_activity('Report', 'success', f"{destination} rows={rows} curves={files} short_lists={short} "
                                      f"orphan_pairs={orphans}",
                 seed=result.config.master_seed, lambdas=len(result.config.lambda_grid))
    return destination
