import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from Config import Config
from src.diffusion.kernels import check_lambda, diffuse_user
from src.experiments.config import FINE_LAMBDA_STEP, ExperimentConfig
from src.ingestion.parser import InteractionRecord
from src.metrics.measures import MetricsReport, auc_user, diversification, novelty, recall
from src.recommender.ranking import RecommendationList, candidate_items, top_items
from src.splitting.splitter import SplitDataset, derive_run_seed, split
from src.utils.errors import ConfigError, EvaluationError
from src.utils.logger import log_activity, logger
from src.utils.parallel import ordered_map

#columns of report.tsv; the sweep also tracks inverse-degree novelty
REPORT_METRICS = ('auc', 'recall', 'diversification', 'novelty')
METRICS = REPORT_METRICS + ('inverse_novelty',)
# novelty is degree-based: lower is more novel
LOWER_IS_BETTER = frozenset({'novelty'})


@dataclass(frozen=True)
class UserOutcome:
    #per-lambda (auc, top-L items, their scores) for one evaluated user
    user: int
    per_lambda: Tuple[Tuple[float, Tuple[int, ...], Tuple[float, ...]], ...]
    mass_loss: float = 0.0


_state = {}


def _init_worker(graph, test_sets, lambdas, max_length):
    _state.update(graph=graph, test_sets=test_sets, lambdas=lambdas, max_length=max_length)


def _evaluate_user(user) -> Optional[UserOutcome]:
    graph = _state['graph']
    candidates = candidate_items(graph.m, graph.profile(user))
    is_test = np.isin(candidates, _state['test_sets'][user], assume_unique=True)
    if is_test.all():
        return None

    diffusion = diffuse_user(graph, user)
    per_lambda = []
    for lam in _state['lambdas']:
        scores = diffusion.blend(lam)
        chosen = top_items(scores, candidates, _state['max_length'])
        per_lambda.append((
            auc_user(scores[candidates], is_test),
            tuple(int(i) for i in chosen),
            tuple(float(scores[i]) for i in chosen),
        ))
    return UserOutcome(user, tuple(per_lambda), diffusion.item_tag.mass_loss)


def evaluate_split(dataset: SplitDataset, lambdas: Sequence[float], config: ExperimentConfig,
                   run_index: int = 0) -> List[MetricsReport]:
    """Score every user holding test items once, then report each (lambda, L).

    Both diffusions are computed once per user; each lambda only re-blends
    them, so every lambda sees the same split and the same kernel outputs.
    """
    lambdas = tuple(check_lambda(lam) for lam in lambdas)
    graph = dataset.training_graph
    users = dataset.test_users
    outcomes = ordered_map(
        _evaluate_user, users, workers=config.workers,
        initializer=_init_worker,
        initargs=(graph, dict(dataset.test_sets), lambdas, config.max_length),
    )
    evaluated = [outcome for outcome in outcomes if outcome is not None]
    skipped = len(outcomes) - len(evaluated)
    if not evaluated:
        raise EvaluationError(
            f"run {run_index} (seed={dataset.seed}): no evaluable users among {len(users)} test users"
        )

    orphans = dataset.orphan_stats
    mass_loss = math.fsum(outcome.mass_loss for outcome in evaluated)
    reports = []
    for k, lam in enumerate(lambdas):
        user_auc = math.fsum(outcome.per_lambda[k][0] for outcome in evaluated) / len(evaluated)
        full_lists = [
            RecommendationList(outcome.user, outcome.per_lambda[k][1], outcome.per_lambda[k][2], config.max_length)
            for outcome in evaluated
        ]
        for length in config.list_lengths:
            lists = [rec.prefix(length) for rec in full_lists]
            diversity = diversification(
                lists, length,
                sampling_threshold=config.pair_sampling_threshold,
                sample_size=config.pair_sample_size,
                seed=dataset.seed,
            )
            reports.append(MetricsReport(
                lam=lam,
                length=length,
                auc=user_auc,
                recall=recall(lists, dataset.test_sets, length),
                diversification=diversity.value if diversity else None,
                novelty=novelty(lists, graph, length),
                inverse_novelty=novelty(lists, graph, length, inverse=True),
                evaluated_users=len(evaluated),
                skipped_users=skipped,
                seed=dataset.seed,
                run_index=run_index,
                short_lists=sum(rec.short for rec in lists),
                diversification_stderr=diversity.stderr if diversity else None,
                diversification_sampled=bool(diversity and diversity.sampled),
                orphan_pairs=orphans.pairs,
                orphan_users=orphans.users,
                orphan_items=orphans.items,
                mass_loss=mass_loss,
            ))
    return reports


def run_split(records: Sequence[InteractionRecord], config: ExperimentConfig, run_index: int) -> SplitDataset:
    return split(records, config.test_fraction, derive_run_seed(config.master_seed, run_index))


def run_once(records: Sequence[InteractionRecord], config: ExperimentConfig, lam: float,
             run_index: int) -> List[MetricsReport]:
    #one split, one lambda, one report per list length
    dataset = run_split(records, config, run_index)
    reports = evaluate_split(dataset, (lam,), config, run_index)
    logger.info(f"Run {run_index} lambda={lam}: AUC={reports[0].auc:.4f} users={reports[0].evaluated_users}")
    return reports


@dataclass(frozen=True)
class MetricSummary:
    mean: Optional[float]
    std: Optional[float]
    minimum: Optional[float]
    maximum: Optional[float]
    runs: int


def summarise(values: Sequence[Optional[float]]) -> MetricSummary:
    #mean and sample standard deviation; absent values are left out
    present = [v for v in values if v is not None]
    if not present:
        return MetricSummary(None, None, None, None, 0)
    mean = math.fsum(present) / len(present)
    std = float(np.std(present, ddof=1)) if len(present) > 1 else 0.0
    return MetricSummary(mean, std, min(present), max(present), len(present))


@dataclass(frozen=True)
class SweepResult:
    config: ExperimentConfig
    reports: Tuple[MetricsReport, ...]
    summaries: Mapping[Tuple[float, int, str], MetricSummary]
    lambda_opt: Mapping[Tuple[str, int], float]
    split_digests: Tuple[str, ...] = field(default=())

    def summary(self, metric: str, lam: float, length: int) -> MetricSummary:
        return self.summaries[(lam, length, metric)]

    def curve(self, metric: str, length: int) -> List[Tuple[float, MetricSummary]]:
        return [(lam, self.summaries[(lam, length, metric)]) for lam in self.config.lambda_grid]

    def optimum(self, metric: str = 'auc', length: int = None) -> Tuple[float, Optional[float]]:
        length = self.config.list_lengths[0] if length is None else length
        lam = self.lambda_opt[(metric, length)]
        return lam, self.summaries[(lam, length, metric)].mean

    def improvement(self, length: int = None) -> Optional[float]:
        #relative AUC gain of the optimum over pure user-item diffusion
        length = self.config.list_lengths[0] if length is None else length
        _, best = self.optimum('auc', length)
        baseline = self.summaries[(1.0, length, 'auc')].mean
        if best is None or not baseline:
            return None
        return best / baseline - 1.0


def find_optimum(grid: Sequence[float], means: Mapping[float, Optional[float]], lower_is_better: bool = False) -> float:
    #first grid point reaching the best mean, so ties go to the smaller lambda
    best_lam, best = grid[0], None
    for lam in grid:
        value = means[lam]
        if value is None:
            continue
        if best is None or (value < best if lower_is_better else value > best):
            best_lam, best = lam, value
    return best_lam


def aggregate(config: ExperimentConfig, reports: Sequence[MetricsReport],
              split_digests: Sequence[str] = ()) -> SweepResult:
    grouped: Dict[Tuple[float, int], List[MetricsReport]] = {}
    for report in reports:
        grouped.setdefault((report.lam, report.length), []).append(report)

    summaries = {}
    for (lam, length), group in grouped.items():
        for metric in METRICS:
            summaries[(lam, length, metric)] = summarise([getattr(report, metric) for report in group])

    lambda_opt = {}
    for length in config.list_lengths:
        for metric in METRICS:
            means = {lam: summaries[(lam, length, metric)].mean for lam in config.lambda_grid}
            lambda_opt[(metric, length)] = find_optimum(config.lambda_grid, means, metric in LOWER_IS_BETTER)

    return SweepResult(config, tuple(reports), summaries, lambda_opt, tuple(split_digests))


def _log_run(run_index: int, dataset: SplitDataset, run_reports: Sequence[MetricsReport],
             config: ExperimentConfig) -> None:
    first = run_reports[0]
    short = max(report.short_lists for report in run_reports)
    details = (
        f"users={first.evaluated_users} skipped={first.skipped_users} short_lists={short} "
        f"orphan_pairs={first.orphan_pairs} orphan_users={first.orphan_users} orphan_items={first.orphan_items} "
        f"mass_loss={first.mass_loss!r}"
    )
    logger.info(f"Run {run_index} (seed={dataset.seed}): {details}")
    if first.mass_loss > 0:
        logger.warning(
            f"Run {run_index}: item-tag diffusion lost {first.mass_loss:.6g} resource on tagless training items",
            extra={'run': run_index, 'seed': dataset.seed},
        )
    log_activity('Run', 'success', details, run=run_index, seed=dataset.seed, lambdas=len(config.lambda_grid))


def sweep(records: Sequence[InteractionRecord], config: ExperimentConfig) -> SweepResult:
    """Repeat the split/score/measure protocol over `runs` seeded splits.

    Run k's split depends only on (master_seed, k) and is shared by every
    lambda in the grid, so the lambda curves are paired.
    """
    reports: List[MetricsReport] = []
    digests: List[str] = []
    logger.info(
        f"=== Starting sweep: {len(config.lambda_grid)} lambdas x {config.runs} runs, "
        f"L={list(config.list_lengths)}, workers={config.workers} ==="
    )
    for run_index in tqdm(range(config.runs), desc='runs', disable=not Config.PROGRESS):
        dataset = run_split(records, config, run_index)
        digests.append(dataset.digest())
        run_reports = evaluate_split(dataset, config.lambda_grid, config, run_index)
        reports.extend(run_reports)
        _log_run(run_index, dataset, run_reports, config)

    result = aggregate(config, reports, digests)
    lam, best = result.optimum('auc')
    logger.info(f"=== Sweep complete: best mean AUC {best:.4f} at lambda={lam} ===")
    return result


def refine_optimum(records: Sequence[InteractionRecord], config: ExperimentConfig,
                   coarse: SweepResult, metric: str = 'auc', fine_step: float = None) -> SweepResult:
    """Re-sweep a fine grid around the coarse optimum.

    The fine grid covers one coarse step either side of the coarse optimum
    at `fine_step` spacing, plus both endpoints.
    """
    fine_step = FINE_LAMBDA_STEP if fine_step is None else fine_step
    if fine_step <= 0:
        raise ConfigError(f"fine lambda step must be positive, got {fine_step}")
    grid = config.lambda_grid
    center = coarse.lambda_opt[(metric, config.list_lengths[0])]
    position = grid.index(center)
    low = grid[max(position - 1, 0)]
    high = grid[min(position + 1, len(grid) - 1)]

    count = int(round((high - low) / fine_step))
    fine = {round(low + k * fine_step, 10) for k in range(count + 1)}
    fine.update({0.0, 1.0, round(high, 10)})
    logger.info(f"Refining {metric} optimum around lambda={center} on [{low}, {high}] step {fine_step}")
    return sweep(records, config.with_grid(sorted(fine)))
