"""Resource diffusion on the user-item and item-tag bipartite projections.

Both kernels are the same two-step mass flow: every loaded item splits its
resource evenly over its neighbours (users or tags), and every neighbour
splits what it received evenly back over its items. An item with no
neighbour in the relation has nowhere to send its resource; that amount is
reported as ``mass_loss`` instead of being kept in place.

Only nonzero entries of the input are walked, so the cost of one call is
proportional to the edges reachable from the loaded items, not to ``m``.
"""
import math
from dataclasses import dataclass

import numpy as np

from src.graph.tripartite import TripartiteGraph
from src.utils.errors import ConfigError, ContractError


@dataclass(frozen=True)
class DiffusionResult:
    vector: np.ndarray
    mass_loss: float = 0.0


def check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0 or math.isnan(lam):
        raise ConfigError(f"lambda must lie in [0, 1], got {lam}")
    return lam


def as_resource(f, m: int) -> np.ndarray:
    #validates a resource vector: length m, finite, nonnegative
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1 or f.shape[0] != m:
        raise ContractError(f"resource vector has shape {f.shape}, expected ({m},)")
    if not np.all(np.isfinite(f)):
        raise ContractError("resource vector has non-finite entries")
    if np.any(f < 0):
        raise ContractError("resource vector has negative entries")
    return f


def initial_vector(graph: TripartiteGraph, target_user: int) -> np.ndarray:
    f = np.zeros(graph.m, dtype=np.float64)
    f[graph.profile(target_user)] = 1.0
    return f


def _two_step(f, outgoing, returning, source_degree, middle_degree, m):
    loaded = np.flatnonzero(f)
    degree = source_degree[loaded]
    stranded = degree == 0
    mass_loss = math.fsum(f[loaded[stranded]]) if stranded.any() else 0.0

    senders = loaded[~stranded]
    share = f[senders] / source_degree[senders]
    middle = np.asarray(outgoing[senders].T @ share).ravel()

    receivers = np.flatnonzero(middle)
    if receivers.size == 0:
        return DiffusionResult(np.zeros(m, dtype=np.float64), mass_loss)
    back = middle[receivers] / middle_degree[receivers]
    result = np.asarray(returning[receivers].T @ back).ravel()
    return DiffusionResult(result, mass_loss)


def diffuse_user_item(graph: TripartiteGraph, f) -> DiffusionResult:
    #items -> users -> items, normalised by k(I) then k(U)
    f = as_resource(f, graph.m)
    return _two_step(
        f, graph.item_users_matrix, graph.user_items_matrix,
        graph.item_degree, graph.user_degree, graph.m,
    )


def diffuse_item_tag(graph: TripartiteGraph, f) -> DiffusionResult:
    #items -> tags -> items, normalised by k'(I) then k(T)
    f = as_resource(f, graph.m)
    return _two_step(
        f, graph.item_tags_matrix, graph.tag_items_matrix,
        graph.item_tag_degree, graph.tag_degree, graph.m,
    )


def integrate(f_prime, f_double_prime, lam: float) -> np.ndarray:
    lam = check_lambda(lam)
    f_prime = np.asarray(f_prime, dtype=np.float64)
    f_double_prime = np.asarray(f_double_prime, dtype=np.float64)
    if f_prime.shape != f_double_prime.shape:
        raise ContractError(f"cannot blend vectors of shapes {f_prime.shape} and {f_double_prime.shape}")
    return lam * f_prime + (1.0 - lam) * f_double_prime


@dataclass(frozen=True)
class UserDiffusion:
    #both kernel outputs for one user; blend() is cheap so a lambda grid reuses them
    user: int
    user_item: DiffusionResult
    item_tag: DiffusionResult

    def blend(self, lam: float) -> np.ndarray:
        return integrate(self.user_item.vector, self.item_tag.vector, lam)


def diffuse_user(graph: TripartiteGraph, target_user: int) -> UserDiffusion:
    f0 = initial_vector(graph, target_user)
    return UserDiffusion(target_user, diffuse_user_item(graph, f0), diffuse_item_tag(graph, f0))


def score_user(graph: TripartiteGraph, target_user: int, lam: float) -> np.ndarray:
    check_lambda(lam)
    return diffuse_user(graph, target_user).blend(lam)
