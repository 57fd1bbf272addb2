from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from src.utils.errors import BoundsError, IngestionError, UnknownLabelError
from src.utils.logger import logger


class Relation(Enum):
    USER_ITEMS = 'user->items'
    ITEM_USERS = 'item->users'
    ITEM_TAGS = 'item->tags'
    TAG_ITEMS = 'tag->items'


class LabelMap:
    #bijection external label <-> dense 0-based index, in first-appearance order

    def __init__(self, kind: str, labels: Sequence[str]):
        self.kind = kind
        self._labels = tuple(labels)
        self._index = {label: i for i, label in enumerate(self._labels)}
        if len(self._index) != len(self._labels):
            raise IngestionError(f"duplicate {kind} labels")

    def __len__(self):
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, label):
        return label in self._index

    def __eq__(self, other):
        return isinstance(other, LabelMap) and self.kind == other.kind and self._labels == other._labels

    def __hash__(self):
        return hash((self.kind, self._labels))

    def index_of(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(self.kind, label) from None

    def get(self, label: str, default=None):
        return self._index.get(label, default)

    def label_of(self, index: int) -> str:
        if not 0 <= index < len(self._labels):
            raise BoundsError(f"{self.kind} index {index} out of range [0, {len(self._labels)})")
        return self._labels[index]

    @property
    def labels(self) -> Tuple[str, ...]:
        return self._labels


@dataclass(frozen=True)
class GraphStats:
    #ingestion diagnostics: repeated edges that collapsed into one
    duplicate_user_items: int = 0
    duplicate_item_tags: int = 0


@dataclass(frozen=True)
class GraphSummary:
    users: int
    items: int
    tags: int
    user_item_links: int
    item_tag_links: int
    mean_item_degree: float
    mean_item_tag_degree: float
    sparsity: float


def _binary_csr(rows, cols, shape):
    matrix = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.float64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=shape,
    )
    matrix.sum_duplicates()
    matrix.sort_indices()
    matrix.data[:] = 1.0
    return matrix


def _freeze_array(array):
    array.flags.writeable = False
    return array


class TripartiteGraph:
    """Immutable user-item-tag graph.

    The user-item relation A and the item-tag relation A' are each stored
    twice, as CSR matrices in both directions, so either diffusion step can
    walk rows. Degrees are precomputed from the row lengths.
    """

    __slots__ = (
        'users', 'items', 'tags',
        'user_items_matrix', 'item_users_matrix', 'item_tags_matrix', 'tag_items_matrix',
        'user_degree', 'item_degree', 'item_tag_degree', 'tag_degree',
        'stats', '_frozen',
    )

    def __init__(self, users: LabelMap, items: LabelMap, tags: LabelMap,
                 user_items: sparse.csr_matrix, item_tags: sparse.csr_matrix,
                 stats: GraphStats = GraphStats()):
        n, m, r = len(users), len(items), len(tags)
        if user_items.shape != (n, m) or item_tags.shape != (m, r):
            raise IngestionError(
                f"adjacency shapes {user_items.shape}, {item_tags.shape} do not match n={n}, m={m}, r={r}"
            )

        self.users = users
        self.items = items
        self.tags = tags
        self.user_items_matrix = _sorted_csr(user_items)
        self.item_users_matrix = _sorted_csr(user_items.T)
        self.item_tags_matrix = _sorted_csr(item_tags)
        self.tag_items_matrix = _sorted_csr(item_tags.T)

        self.user_degree = _freeze_array(np.diff(self.user_items_matrix.indptr))
        self.item_degree = _freeze_array(np.diff(self.item_users_matrix.indptr))
        self.item_tag_degree = _freeze_array(np.diff(self.item_tags_matrix.indptr))
        self.tag_degree = _freeze_array(np.diff(self.tag_items_matrix.indptr))
        self.stats = stats
        self._frozen = True

    def __setattr__(self, name, value):
        if getattr(self, '_frozen', False):
            raise AttributeError(f"TripartiteGraph is immutable (tried to set {name})")
        object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return len(self.users)

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def r(self) -> int:
        return len(self.tags)

    @property
    def user_item_links(self) -> int:
        return int(self.user_items_matrix.nnz)

    @property
    def item_tag_links(self) -> int:
        return int(self.item_tags_matrix.nnz)

    def _matrix_for(self, relation: Relation):
        return {
            Relation.USER_ITEMS: (self.user_items_matrix, self.users),
            Relation.ITEM_USERS: (self.item_users_matrix, self.items),
            Relation.ITEM_TAGS: (self.item_tags_matrix, self.items),
            Relation.TAG_ITEMS: (self.tag_items_matrix, self.tags),
        }[relation]

    def neighbors(self, entity: int, relation: Relation) -> np.ndarray:
        #read-only view of the sorted adjacency row
        matrix, labels = self._matrix_for(Relation(relation))
        if not 0 <= entity < len(labels):
            raise BoundsError(f"{labels.kind} index {entity} out of range [0, {len(labels)})")
        view = matrix.indices[matrix.indptr[entity]:matrix.indptr[entity + 1]]
        view.flags.writeable = False
        return view

    def profile(self, user: int) -> np.ndarray:
        return self.neighbors(user, Relation.USER_ITEMS)

    @classmethod
    def from_edges(cls, user_labels: Sequence[str], item_labels: Sequence[str], tag_labels: Sequence[str],
                   user_item_edges: Iterable[Tuple[int, int]], item_tag_edges: Iterable[Tuple[int, int]],
                   stats: GraphStats = GraphStats()) -> 'TripartiteGraph':
        users = LabelMap('user', user_labels)
        items = LabelMap('item', item_labels)
        tags = LabelMap('tag', tag_labels)
        ui = list(user_item_edges)
        it = list(item_tag_edges)
        user_items = _binary_csr([u for u, _ in ui], [i for _, i in ui], (len(users), len(items)))
        item_tags = _binary_csr([i for i, _ in it], [t for _, t in it], (len(items), len(tags)))
        return cls(users, items, tags, user_items, item_tags, stats)

    @classmethod
    def from_adjacency(cls, user_items: Mapping[str, Iterable[str]],
                       item_tags: Optional[Mapping[str, Iterable[str]]] = None) -> 'TripartiteGraph':
        #handy for hand-written fixtures: {'U1': ['I1', 'I3']}, {'I1': ['T1']}
        item_tags = item_tags or {}
        user_index: Dict[str, int] = {}
        item_index: Dict[str, int] = {}
        tag_index: Dict[str, int] = {}
        ui, it = [], []
        for user, items in user_items.items():
            u = user_index.setdefault(user, len(user_index))
            for item in items:
                ui.append((u, item_index.setdefault(item, len(item_index))))
        for item, tags in item_tags.items():
            i = item_index.setdefault(item, len(item_index))
            for tag in tags:
                it.append((i, tag_index.setdefault(tag, len(tag_index))))
        return cls.from_edges(list(user_index), list(item_index), list(tag_index), ui, it)


def _sorted_csr(matrix):
    result = sparse.csr_matrix(matrix)
    result.sort_indices()
    return result


def build_graph(records) -> TripartiteGraph:
    """Collapse interaction records into the binary tripartite graph.

    Indices follow first appearance of each label. Tags are pooled per
    item across every user that collected it.
    """
    user_index: Dict[str, int] = {}
    item_index: Dict[str, int] = {}
    tag_index: Dict[str, int] = {}
    user_items = set()
    item_tags = set()
    duplicate_ui = duplicate_it = 0
    count = 0

    for record in records:
        count += 1
        if not record.user or not record.item:
            raise IngestionError(f"empty label in record {record!r}")
        u = user_index.setdefault(record.user, len(user_index))
        i = item_index.setdefault(record.item, len(item_index))
        if (u, i) in user_items:
            duplicate_ui += 1
        else:
            user_items.add((u, i))
        for tag in record.tags:
            if not tag:
                raise IngestionError(f"empty tag in record {record!r}")
            t = tag_index.setdefault(tag, len(tag_index))
            if (i, t) in item_tags:
                duplicate_it += 1
            else:
                item_tags.add((i, t))

    if count == 0:
        raise IngestionError("cannot build a graph from an empty record collection")

    graph = TripartiteGraph.from_edges(
        list(user_index), list(item_index), list(tag_index),
        user_items, item_tags,
        GraphStats(duplicate_user_items=duplicate_ui, duplicate_item_tags=duplicate_it),
    )
    logger.debug(
        f"Built graph n={graph.n} m={graph.m} r={graph.r} "
        f"links={graph.user_item_links}/{graph.item_tag_links} "
        f"(collapsed {duplicate_ui} user-item, {duplicate_it} item-tag duplicates)"
    )
    return graph


def neighbors(graph: TripartiteGraph, entity: int, relation: Relation) -> np.ndarray:
    return graph.neighbors(entity, relation)


def describe(graph: TripartiteGraph) -> GraphSummary:
    #the per-dataset statistics row: sizes, link counts, <k>, <k'>, sparsity
    m = graph.m
    return GraphSummary(
        users=graph.n,
        items=m,
        tags=graph.r,
        user_item_links=graph.user_item_links,
        item_tag_links=graph.item_tag_links,
        mean_item_degree=float(graph.item_degree.mean()) if m else 0.0,
        mean_item_tag_degree=float(graph.item_tag_degree.mean()) if m else 0.0,
        sparsity=graph.user_item_links / (graph.n * m) if graph.n and m else 0.0,
    )
