import hashlib
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, TextIO, Tuple

import numpy as np

from src.graph.tripartite import TripartiteGraph, build_graph
from src.ingestion.parser import InteractionRecord
from src.utils.errors import ConfigError
from src.utils.logger import logger

SEED_MASK = (1 << 64) - 1


def derive_run_seed(master_seed: int, run_index: int) -> int:
    #counter-based: run k's seed depends only on (master_seed, k), never on run order
    sequence = np.random.SeedSequence(master_seed & SEED_MASK, spawn_key=(run_index,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class OrphanStats:
    #held-out pairs dropped because the training graph lacks their user or item
    users: int = 0
    items: int = 0
    pairs: int = 0


@dataclass(frozen=True)
class SplitDataset:
    training_graph: TripartiteGraph
    test_sets: Mapping[int, np.ndarray]
    orphan_stats: OrphanStats
    seed: int
    test_fraction: float
    assignments: Tuple[Tuple[str, str, bool], ...] = field(repr=False, default=())

    @property
    def test_users(self) -> List[int]:
        return sorted(self.test_sets)

    @property
    def retained_test_pairs(self) -> int:
        return sum(len(items) for items in self.test_sets.values())

    def digest(self) -> str:
        graph = self.training_graph
        h = hashlib.sha256()
        for labels in (graph.users, graph.items, graph.tags):
            h.update('\x1f'.join(labels).encode('utf-8'))
            h.update(b'\x1e')
        for matrix in (graph.user_items_matrix, graph.item_tags_matrix):
            h.update(np.ascontiguousarray(matrix.indptr, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(matrix.indices, dtype=np.int64).tobytes())
        for user in self.test_users:
            h.update(np.int64(user).tobytes())
            h.update(np.ascontiguousarray(self.test_sets[user], dtype=np.int64).tobytes())
        return h.hexdigest()


def _distinct_pairs(records):
    #(user, item) -> ordered union of tags, in first-appearance order
    pairs: Dict[Tuple[str, str], dict] = {}
    for record in records:
        tags = pairs.setdefault((record.user, record.item), {})
        for tag in record.tags:
            tags.setdefault(tag, None)
    return pairs


def held_out_count(test_fraction: float, total: int) -> int:
    # rounding guards 0.05 * 100 against landing a hair above 5
    return math.ceil(round(test_fraction * total, 9))


def split(records: Sequence[InteractionRecord], test_fraction: float, seed: int) -> SplitDataset:
    """Hold out a seeded random share of the distinct (user, item) pairs.

    The training graph is rebuilt from the remaining pairs only, so tags seen
    only on held-out pairs never reach it. Held-out pairs whose user or item
    is missing from the training graph are dropped and counted.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must lie in (0, 1), got {test_fraction}")

    pairs = _distinct_pairs(records)
    total = len(pairs)
    n_test = held_out_count(test_fraction, total)
    if n_test >= total:
        raise ConfigError(f"test_fraction {test_fraction} holds out all {total} pairs")

    rng = np.random.default_rng(seed & SEED_MASK)
    held = np.zeros(total, dtype=bool)
    held[rng.permutation(total)[:n_test]] = True

    keys = list(pairs)
    training_records = [
        InteractionRecord(user, item, tuple(pairs[(user, item)]))
        for (user, item), is_test in zip(keys, held) if not is_test
    ]
    graph = build_graph(training_records)

    test_items: Dict[int, List[int]] = {}
    orphan_users = orphan_items = orphan_pairs = 0
    for (user, item), is_test in zip(keys, held):
        if not is_test:
            continue
        u = graph.users.get(user)
        i = graph.items.get(item)
        if u is None or i is None:
            orphan_users += u is None
            orphan_items += i is None
            orphan_pairs += 1
            continue
        test_items.setdefault(u, []).append(i)

    test_sets = {u: np.array(sorted(items), dtype=np.int64) for u, items in test_items.items()}
    orphans = OrphanStats(users=orphan_users, items=orphan_items, pairs=orphan_pairs)
    logger.debug(
        f"Split {total} pairs (seed={seed}): {total - n_test} train, "
        f"{n_test - orphan_pairs} test, {orphan_pairs} orphaned"
    )
    return SplitDataset(
        training_graph=graph,
        test_sets=test_sets,
        orphan_stats=orphans,
        seed=seed,
        test_fraction=test_fraction,
        assignments=tuple((user, item, bool(is_test)) for (user, item), is_test in zip(keys, held)),
    )


def write_manifest(dataset: SplitDataset, stream: TextIO) -> int:
    #audit trail: user<TAB>item<TAB>train|test for every distinct pair
    for user, item, is_test in dataset.assignments:
        stream.write(f"{user}\t{item}\t{'test' if is_test else 'train'}\n")
    return len(dataset.assignments)
