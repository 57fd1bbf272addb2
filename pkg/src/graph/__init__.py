from .tripartite import (
    GraphStats,
    GraphSummary,
    LabelMap,
    Relation,
    TripartiteGraph,
    build_graph,
    describe,
    neighbors,
)

__all__ = [
    'GraphStats',
    'GraphSummary',
    'LabelMap',
    'Relation',
    'TripartiteGraph',
    'build_graph',
    'describe',
    'neighbors',
]
