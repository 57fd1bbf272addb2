import os
import tempfile
from pathlib import Path

import numpy as np
import pytest

#Test Env - keep logs and outputs out of the working tree

os.environ.setdefault('TAGDIFF_DATA_DIR', str(Path(tempfile.gettempdir()) / 'tagdiff-tests'))
os.environ.setdefault('TAGDIFF_WORKERS', '1')

from src.graph.tripartite import TripartiteGraph, build_graph  # noqa: E402
from src.ingestion.parser import InteractionRecord  # noqa: E402


@pytest.fixture
def mock_config():
    from Config import Config
    Config.LOGS_DIR.mkdir(parents=True, exist_ok=True)
    return Config


@pytest.fixture
def g1_records():
    return [
        InteractionRecord('u1', 'i1', ('t1',)),
        InteractionRecord('u1', 'i2', ('t1',)),
        InteractionRecord('u2', 'i2', ('t2',)),
        InteractionRecord('u2', 'i3', ('t1', 't2')),
    ]


@pytest.fixture
def g1_graph(g1_records):
    return build_graph(g1_records)


@pytest.fixture
def fig2_graph():
    #three users, five items, four tags; U1 collected I1, I3, I5
    return TripartiteGraph.from_adjacency(
        {
            'U1': ['I1', 'I3', 'I5'],
            'U2': ['I1', 'I2', 'I4', 'I5'],
            'U3': ['I2', 'I3', 'I4'],
        },
        {
            'I1': ['T1', 'T2'],
            'I2': ['T1', 'T4'],
            'I3': ['T2', 'T3'],
            'I4': ['T3'],
            'I5': ['T3', 'T4'],
        },
    )


def random_graph(seed, max_size=20):
    """Small random tripartite graph; some items may end up with no tags
    or no users, some users with no items."""
    rng = np.random.default_rng(seed)
    n, m, r = (int(x) for x in rng.integers(1, max_size + 1, size=3))
    ui_density, it_density = rng.uniform(0.0, 0.6, size=2)
    ui = [(u, i) for u in range(n) for i in range(m) if rng.random() < ui_density]
    it = [(i, t) for i in range(m) for t in range(r) if rng.random() < it_density]
    return TripartiteGraph.from_edges(
        [f"u{k}" for k in range(n)], [f"i{k}" for k in range(m)], [f"t{k}" for k in range(r)], ui, it,
    )


@pytest.fixture
def random_graphs():
    return [random_graph(seed) for seed in range(200)]


def topical_records(users=60, items=40, seed=7, profile=6):
    """Small two-topic dataset where every item has two users and a tag.

    Users alternate topics; user u always holds two neighbouring items of
    its topic (so every item gets at least two users) plus random others.
    """
    rng = np.random.default_rng(seed)
    records = []
    for u in range(users):
        topic = u % 2
        own = [i for i in range(items) if i % 2 == topic]
        anchor = (u // 2) % len(own)
        fixed = [own[anchor], own[(anchor + 1) % len(own)]]
        rest = [i for i in own if i not in fixed]
        chosen = fixed + [int(i) for i in rng.choice(rest, size=profile - 2, replace=False)]
        for i in chosen:
            records.append(InteractionRecord(f"u{u}", f"i{int(i)}", (f"topic{topic}", f"t{int(i) % 7}")))
    return records


@pytest.fixture
def small_records():
    return topical_records()
