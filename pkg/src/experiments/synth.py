"""Topic-based surrogate collaborative tagging data.

Every user, item and tag belongs to one latent topic. A user's profile is
drawn mostly from items of the user's own topic (``topic_affinity``), with
item popularity following a lognormal weight so degrees are heavy-tailed.
Each collection carries tags; with probability ``signal`` a tag comes from
the item's topic pool (Zipf-weighted inside the pool), otherwise it is
uniform over all tags. With ``signal`` = 0 tags carry no information.
"""
from typing import List

import numpy as np

from src.ingestion.parser import InteractionRecord
from src.ingestion.purification import PurificationPolicy, purify
from src.experiments.config import SynthConfig
from src.utils.errors import PurgedDatasetError
from src.utils.logger import logger


def _weighted_sample(rng, pool, weights, size):
    size = min(size, len(pool))
    if size == 0:
        return np.empty(0, dtype=np.int64)
    p = weights / weights.sum()
    return rng.choice(pool, size=size, replace=False, p=p)


def _zipf(size):
    weights = 1.0 / np.arange(1, size + 1)
    return weights / weights.sum() if size else weights


def _topic_pools(rng, count, topics):
    #round-robin over a shuffled order, so pools differ in size by at most one
    topic_of = np.empty(count, dtype=np.int64)
    topic_of[rng.permutation(count)] = np.arange(count) % topics
    return topic_of, [np.flatnonzero(topic_of == t) for t in range(topics)]


def synth_generate(synth: SynthConfig) -> List[InteractionRecord]:
    rng = np.random.default_rng(synth.seed)

    user_topic = rng.integers(0, synth.topics, size=synth.users)
    item_topic, item_pools = _topic_pools(rng, synth.items, synth.topics)
    _, tag_pools = _topic_pools(rng, synth.tags, synth.topics)

    popularity = rng.lognormal(mean=0.0, sigma=synth.popularity_spread, size=synth.items)
    tag_probs = [_zipf(len(pool)) for pool in tag_pools]
    all_items = np.arange(synth.items)

    records = []
    for user in range(synth.users):
        size = min(1 + rng.poisson(synth.mean_profile - 1.0), synth.items)
        own = item_pools[user_topic[user]]
        on_topic = _weighted_sample(rng, own, popularity[own], rng.binomial(size, synth.topic_affinity))

        rest_mask = np.ones(synth.items, dtype=bool)
        rest_mask[on_topic] = False
        rest = all_items[rest_mask]
        off_topic = _weighted_sample(rng, rest, popularity[rest], size - len(on_topic))

        for item in np.concatenate([on_topic, off_topic]):
            pool = tag_pools[item_topic[item]]
            probs = tag_probs[item_topic[item]]
            count = 1 + rng.poisson(synth.tags_per_collection - 1.0)
            tags = []
            for _ in range(count):
                if len(pool) and rng.random() < synth.signal:
                    tag = pool[rng.choice(len(pool), p=probs)]
                else:
                    tag = rng.integers(0, synth.tags)
                tags.append(f"t{int(tag)}")
            records.append(InteractionRecord.of(f"u{user}", f"i{int(item)}", tags))

    try:
        purify(records, PurificationPolicy())
    except PurgedDatasetError as e:
        raise PurgedDatasetError(f"synthetic parameters {synth} produce an empty purified dataset: {e}") from e

    logger.info(
        f"Generated {len(records)} synthetic records: {synth.users} users, {synth.items} items, "
        f"{synth.tags} tags, {synth.topics} topics, signal={synth.signal}"
    )
    return records
