import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from src.diffusion.kernels import check_lambda, score_user
from src.graph.tripartite import TripartiteGraph
from src.recommender.ranking import RecommendationList, candidate_items, check_length
from src.utils.errors import ContractError, EvaluationError


REPORT_COLUMNS = (
    'lambda', 'L', 'auc', 'recall', 'diversification', 'novelty',
    'evaluated_users', 'skipped_users', 'seed',
)

DIAGNOSTIC_COLUMNS = (
    'run', 'lambda', 'L', 'seed', 'short_lists', 'diversification_stderr', 'diversification_sampled',
    'orphan_pairs', 'orphan_users', 'orphan_items', 'item_tag_mass_loss',
)


def format_value(value) -> str:
    #shortest round-trip decimal; absent metrics print as NA
    if value is None:
        return 'NA'
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class MetricsReport:
    lam: float
    length: int
    auc: float
    recall: float
    diversification: Optional[float]
    novelty: float
    evaluated_users: int
    skipped_users: int
    seed: int
    run_index: int = 0
    short_lists: int = 0
    diversification_stderr: Optional[float] = None
    diversification_sampled: bool = False
    inverse_novelty: Optional[float] = None
    orphan_pairs: int = 0
    orphan_users: int = 0
    orphan_items: int = 0
    mass_loss: float = 0.0

    def row(self):
        return [
            format_value(self.lam), str(self.length), format_value(self.auc), format_value(self.recall),
            format_value(self.diversification), format_value(self.novelty),
            str(self.evaluated_users), str(self.skipped_users), str(self.seed),
        ]

    def diagnostics_row(self):
        #mass_loss is the item-tag resource stranded on tagless training items, summed over users
        return [
            str(self.run_index), format_value(self.lam), str(self.length), str(self.seed),
            str(self.short_lists), format_value(self.diversification_stderr),
            str(int(self.diversification_sampled)),
            str(self.orphan_pairs), str(self.orphan_users), str(self.orphan_items), format_value(self.mass_loss),
        ]


@dataclass(frozen=True)
class DiversityEstimate:
    value: float
    stderr: float
    pairs: int
    sampled: bool


@dataclass(frozen=True)
class AucResult:
    value: float
    evaluated_users: int
    skipped_users: int


def auc_user(candidate_scores, is_test) -> Optional[float]:
    """Mann-Whitney probability that a held-out item outscores a non-test candidate.

    Ties earn half credit. Computed from average ranks, O(C log C).
    Returns None when there is no non-test candidate to compare against.
    """
    scores = np.asarray(candidate_scores, dtype=np.float64)
    mask = np.asarray(is_test, dtype=bool)
    if scores.shape != mask.shape:
        raise ContractError(f"scores {scores.shape} and test mask {mask.shape} differ in shape")
    h = int(mask.sum())
    z = len(scores) - h
    if h == 0:
        raise ContractError("auc_user needs at least one test item")
    if z == 0:
        return None
    ranks = rankdata(scores, method='average')
    wins = float(ranks[mask].sum()) - h * (h + 1) / 2.0
    return wins / (h * z)


def user_auc_from_scores(graph: TripartiteGraph, user: int, scores: np.ndarray,
                         test_items: np.ndarray) -> Optional[float]:
    candidates = candidate_items(graph.m, graph.profile(user))
    mask = np.isin(candidates, test_items, assume_unique=True)
    return auc_user(scores[candidates], mask)


def auc_report(split, lam: float) -> AucResult:
    lam = check_lambda(lam)
    graph = split.training_graph
    values, skipped = [], 0
    for user in split.test_users:
        value = user_auc_from_scores(graph, user, score_user(graph, user, lam), split.test_sets[user])
        if value is None:
            skipped += 1
        else:
            values.append(value)
    if not values:
        raise EvaluationError(f"no evaluable users for AUC ({skipped} skipped)")
    return AucResult(math.fsum(values) / len(values), len(values), skipped)


def auc(split, lam: float) -> float:
    return auc_report(split, lam).value


def recall(lists: Sequence[RecommendationList], test_sets: Mapping[int, np.ndarray], length: int) -> float:
    #per-user averaged N_r / N_p, not the pooled ratio
    length = check_length(length)
    ratios = []
    for rec in lists:
        test_items = test_sets.get(rec.user)
        if test_items is None or len(test_items) == 0:
            continue
        recovered = len(set(rec.items[:length]).intersection(int(i) for i in test_items))
        ratios.append(recovered / len(test_items))
    if not ratios:
        raise EvaluationError("no users with held-out items among the lists")
    return math.fsum(ratios) / len(ratios)


def recall_curve(lists: Sequence[RecommendationList], test_sets: Mapping[int, np.ndarray],
                 lengths: Iterable[int]) -> Dict[int, float]:
    #lists must be built at max(lengths); shorter lengths read prefixes
    return {length: recall(lists, test_sets, length) for length in sorted(lengths)}


def _sampled_diversification(item_sets, length, sample_size, seed):
    rng = np.random.default_rng(seed)
    n = len(item_sets)
    first = rng.integers(0, n, size=sample_size)
    second = (first + rng.integers(1, n, size=sample_size)) % n
    distances = np.array([
        1.0 - len(item_sets[i] & item_sets[j]) / length for i, j in zip(first, second)
    ])
    stderr = float(distances.std(ddof=1) / math.sqrt(sample_size)) if sample_size > 1 else 0.0
    return DiversityEstimate(float(distances.mean()), stderr, sample_size, True)


def diversification(lists: Sequence[RecommendationList], length: int,
                    sampling_threshold: Optional[int] = None, sample_size: Optional[int] = None,
                    seed: int = 0) -> Optional[DiversityEstimate]:
    """Mean over user pairs of 1 - |overlap| / L.

    The exact value needs no pair loop: the overlap summed over all pairs
    equals the sum over items of C(c, 2), c being the number of lists holding
    the item. Above `sampling_threshold` lists a seeded uniform sample of
    pairs is used instead and its standard error reported.
    Returns None for fewer than two lists.
    """
    length = check_length(length)
    n = len(lists)
    if n < 2:
        return None

    if sampling_threshold is not None and sample_size and n > sampling_threshold:
        item_sets = [set(rec.items[:length]) for rec in lists]
        return _sampled_diversification(item_sets, length, sample_size, seed)

    counts = Counter(item for rec in lists for item in rec.items[:length])
    shared = sum(c * (c - 1) // 2 for c in counts.values())
    pairs = n * (n - 1) // 2
    return DiversityEstimate(1.0 - shared / (length * pairs), 0.0, pairs, False)


def novelty(lists: Sequence[RecommendationList], training_graph: TripartiteGraph, length: int,
            inverse: bool = False) -> float:
    """Average training degree of recommended items, over n_eval * L slots.

    Lower means more novel. With inverse=True, 1/k is averaged instead so
    that higher means more novel.
    """
    length = check_length(length)
    if not lists:
        raise EvaluationError("novelty needs at least one list")
    degrees = training_graph.item_degree
    if inverse:
        total = math.fsum(1.0 / degrees[i] for rec in lists for i in rec.items[:length] if degrees[i] > 0)
    else:
        total = float(sum(int(degrees[i]) for rec in lists for i in rec.items[:length]))
    return total / (len(lists) * length)
