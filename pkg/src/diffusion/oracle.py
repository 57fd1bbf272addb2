"""Dense reference scorer used to cross-check the sparse kernels.

The transition matrices are built explicitly from the adjacency lists,

    W_UI = A^T D_U^-1 A D_I^-1        W_IT = A' D_T^-1 A'^T D'_I^-1

with zero-degree rows and columns contributing nothing. Cost is O(m^2)
memory, so graphs above Config.ORACLE_MAX_ITEMS items are refused.
"""
import numpy as np

from Config import Config
from src.diffusion.kernels import as_resource, check_lambda, initial_vector
from src.graph.tripartite import Relation, TripartiteGraph
from src.utils.errors import OracleSizeError


def _inverse(degrees):
    inverse = np.zeros(len(degrees), dtype=np.float64)
    nonzero = degrees > 0
    inverse[nonzero] = 1.0 / degrees[nonzero]
    return inverse


class DenseOracle:

    def __init__(self, graph: TripartiteGraph, max_items: int = None):
        limit = Config.ORACLE_MAX_ITEMS if max_items is None else max_items
        if graph.m > limit:
            raise OracleSizeError(f"dense oracle refuses m={graph.m} > {limit} items")
        self.graph = graph

        a = np.zeros((graph.n, graph.m), dtype=np.float64)
        for user in range(graph.n):
            a[user, graph.neighbors(user, Relation.USER_ITEMS)] = 1.0
        a_tag = np.zeros((graph.m, graph.r), dtype=np.float64)
        for item in range(graph.m):
            a_tag[item, graph.neighbors(item, Relation.ITEM_TAGS)] = 1.0

        # degrees recounted from the dense matrices, not taken from the graph
        k_user = a.sum(axis=1)
        k_item = a.sum(axis=0)
        k_tag = a_tag.sum(axis=0)
        k_item_tag = a_tag.sum(axis=1)

        self.user_item_operator = a.T @ np.diag(_inverse(k_user)) @ a @ np.diag(_inverse(k_item))
        self.item_tag_operator = a_tag @ np.diag(_inverse(k_tag)) @ a_tag.T @ np.diag(_inverse(k_item_tag))

    def diffuse_user_item(self, f) -> np.ndarray:
        return self.user_item_operator @ as_resource(f, self.graph.m)

    def diffuse_item_tag(self, f) -> np.ndarray:
        return self.item_tag_operator @ as_resource(f, self.graph.m)

    def score_user(self, target_user: int, lam: float) -> np.ndarray:
        lam = check_lambda(lam)
        f0 = initial_vector(self.graph, target_user)
        return lam * self.diffuse_user_item(f0) + (1.0 - lam) * self.diffuse_item_tag(f0)
