from collections import defaultdict
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from src.ingestion.parser import InteractionRecord
from src.utils.errors import ConfigError, PurgedDatasetError
from src.utils.logger import logger


@dataclass(frozen=True)
class PurificationPolicy:
    min_users_per_item: int = 2
    min_items_per_user: int = 1
    min_tags_per_item: int = 1
    drop_singleton_tags: bool = True

    def __post_init__(self):
        for name in ('min_users_per_item', 'min_items_per_user', 'min_tags_per_item'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class PassStats:
    tags_removed: int
    items_removed: int
    users_removed: int

    @property
    def total(self):
        return self.tags_removed + self.items_removed + self.users_removed


@dataclass
class PurificationStats:
    passes: List[PassStats] = field(default_factory=list)
    records_in: int = 0
    records_out: int = 0

    @property
    def tags_removed(self):
        return sum(p.tags_removed for p in self.passes)

    @property
    def items_removed(self):
        return sum(p.items_removed for p in self.passes)

    @property
    def users_removed(self):
        return sum(p.users_removed for p in self.passes)


def _drop_singleton_tags(records):
    items_per_tag = defaultdict(set)
    for record in records:
        for tag in record.tags:
            items_per_tag[tag].add(record.item)
    singletons = {tag for tag, items in items_per_tag.items() if len(items) < 2}
    if not singletons:
        return records, 0

    kept = []
    for record in records:
        if any(tag in singletons for tag in record.tags):
            record = InteractionRecord(
                record.user, record.item,
                tuple(tag for tag in record.tags if tag not in singletons)
            )
        kept.append(record)
    return kept, len(singletons)


def _drop_weak_items(records, policy):
    users_per_item = defaultdict(set)
    tags_per_item = defaultdict(set)
    for record in records:
        users_per_item[record.item].add(record.user)
        tags_per_item[record.item].update(record.tags)

    weak = {
        item for item, users in users_per_item.items()
        if len(users) < policy.min_users_per_item
        or len(tags_per_item[item]) < policy.min_tags_per_item
    }
    if not weak:
        return records, 0
    return [r for r in records if r.item not in weak], len(weak)


def _drop_weak_users(records, policy):
    items_per_user = defaultdict(set)
    for record in records:
        items_per_user[record.user].add(record.item)

    weak = {user for user, items in items_per_user.items() if len(items) < policy.min_items_per_user}
    if not weak:
        return records, 0
    return [r for r in records if r.user not in weak], len(weak)


def purify(records: Sequence[InteractionRecord],
           policy: PurificationPolicy = PurificationPolicy()) -> Tuple[List[InteractionRecord], PurificationStats]:
    """Apply the dataset cleaning rules until none of them fires.

    Each pass drops singleton tags (tags on fewer than two distinct items,
    when the policy asks for it), then items lacking users or surviving
    tags, then users lacking items. Removing an item can strand a user,
    so passes repeat until a pass removes nothing.
    """
    current = list(records)
    stats = PurificationStats(records_in=len(current))

    while True:
        tags_removed = 0
        if policy.drop_singleton_tags:
            current, tags_removed = _drop_singleton_tags(current)
        current, items_removed = _drop_weak_items(current, policy)
        current, users_removed = _drop_weak_users(current, policy)

        pass_stats = PassStats(tags_removed, items_removed, users_removed)
        if pass_stats.total == 0:
            break
        stats.passes.append(pass_stats)
        logger.debug(f"Purification pass {len(stats.passes)}: {pass_stats}")

        if not current:
            raise PurgedDatasetError(
                f"dataset fully purged after {len(stats.passes)} passes "
                f"({stats.items_removed} items, {stats.users_removed} users removed)"
            )

    if not current:
        raise PurgedDatasetError("dataset fully purged: no records to purify")

    stats.records_out = len(current)
    logger.info(
        f"Purified {stats.records_in} -> {stats.records_out} records in {len(stats.passes)} passes "
        f"(tags -{stats.tags_removed}, items -{stats.items_removed}, users -{stats.users_removed})"
    )
    return current, stats
