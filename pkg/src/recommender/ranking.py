from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, TextIO, Tuple

import numpy as np
from scipy.stats import rankdata

from src.diffusion.kernels import check_lambda, score_user
from src.graph.tripartite import TripartiteGraph
from src.utils.errors import BoundsError, ConfigError, ContractError, UnscorableUserError
from src.utils.logger import logger


@dataclass(frozen=True)
class RecommendationList:
    user: int
    items: Tuple[int, ...]
    scores: Tuple[float, ...]
    length: int

    @property
    def short(self) -> bool:
        #fewer candidates than the requested length
        return len(self.items) < self.length

    def prefix(self, length: int) -> 'RecommendationList':
        return RecommendationList(self.user, self.items[:length], self.scores[:length], length)


def check_length(length: int) -> int:
    if int(length) != length or length < 1:
        raise ConfigError(f"list length L must be a positive integer, got {length}")
    return int(length)


def candidate_items(m: int, profile: np.ndarray) -> np.ndarray:
    #every item the user has not collected, ascending
    mask = np.ones(m, dtype=bool)
    mask[profile] = False
    return np.flatnonzero(mask)


def top_items(scores: np.ndarray, candidates: np.ndarray, length: int) -> np.ndarray:
    """Best `length` candidates by descending score, ties by ascending index.

    Uses a partition to find the cut-off score, so only the items at or above
    it get sorted.
    """
    values = scores[candidates]
    if length < len(candidates):
        cutoff = -np.partition(-values, length - 1)[length - 1]
        above = values > cutoff
        at_cutoff = np.flatnonzero(values == cutoff)[:length - int(above.sum())]
        keep = np.flatnonzero(above)
        keep = np.concatenate([keep, at_cutoff])
        candidates, values = candidates[keep], values[keep]
    order = np.lexsort((candidates, -values))
    return candidates[order]


def _profile_of(graph, target_user):
    profile = graph.profile(target_user)
    if profile.size == 0:
        raise UnscorableUserError(target_user)
    return profile


def recommendation_from_scores(graph: TripartiteGraph, target_user: int, scores: np.ndarray,
                               length: int) -> RecommendationList:
    candidates = candidate_items(graph.m, graph.profile(target_user))
    chosen = top_items(scores, candidates, length)
    return RecommendationList(
        user=target_user,
        items=tuple(int(i) for i in chosen),
        scores=tuple(float(scores[i]) for i in chosen),
        length=length,
    )


def recommend(graph: TripartiteGraph, target_user: int, lam: float, length: int) -> RecommendationList:
    length = check_length(length)
    lam = check_lambda(lam)
    _profile_of(graph, target_user)
    result = recommendation_from_scores(graph, target_user, score_user(graph, target_user, lam), length)
    if result.short:
        logger.debug(f"User {target_user}: only {len(result.items)} candidates for L={length}")
    return result


def mean_ranks(values: np.ndarray) -> np.ndarray:
    #1-based ranks, highest score first, tie groups share their mean rank
    return rankdata(-np.asarray(values, dtype=np.float64), method='average')


def rank_of_items(graph: TripartiteGraph, target_user: int, lam: float,
                  probe_items: Iterable[int]) -> Dict[int, Tuple[float, float]]:
    lam = check_lambda(lam)
    profile = _profile_of(graph, target_user)
    probes = [int(i) for i in probe_items]
    for item in probes:
        if not 0 <= item < graph.m:
            raise BoundsError(f"item index {item} out of range [0, {graph.m})")
    collected = set(profile.tolist())
    inside = [item for item in probes if item in collected]
    if inside:
        raise ContractError(f"probe items {inside} are in user {target_user}'s training profile")

    scores = score_user(graph, target_user, lam)
    candidates = candidate_items(graph.m, profile)
    ranks = mean_ranks(scores[candidates])
    position = {int(item): k for k, item in enumerate(candidates)}
    return {item: (float(scores[item]), float(ranks[position[item]])) for item in probes}


def recommend_all(graph: TripartiteGraph, lam: float, length: int,
                  users: Sequence[int] = None) -> Tuple[List[RecommendationList], int]:
    #lists for every scorable user; returns (lists, skipped count)
    lists, skipped = [], 0
    for user in range(graph.n) if users is None else users:
        try:
            lists.append(recommend(graph, user, lam, length))
        except UnscorableUserError:
            skipped += 1
    return lists, skipped


def export_recommendations(graph: TripartiteGraph, lists: Iterable[RecommendationList], stream: TextIO) -> int:
    #user_label<TAB>rank<TAB>item_label<TAB>score, scores as shortest round-trip decimals
    rows = 0
    for rec in lists:
        user_label = graph.users.label_of(rec.user)
        for rank, (item, score) in enumerate(zip(rec.items, rec.scores), start=1):
            stream.write(f"{user_label}\t{rank}\t{graph.items.label_of(item)}\t{score!r}\n")
            rows += 1
    return rows
