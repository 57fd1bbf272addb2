from .kernels import (
    DiffusionResult,
    UserDiffusion,
    as_resource,
    check_lambda,
    diffuse_item_tag,
    diffuse_user,
    diffuse_user_item,
    initial_vector,
    integrate,
    score_user,
)
from .oracle import DenseOracle

__all__ = [
    'DiffusionResult',
    'UserDiffusion',
    'as_resource',
    'check_lambda',
    'diffuse_item_tag',
    'diffuse_user',
    'diffuse_user_item',
    'initial_vector',
    'integrate',
    'score_user',
    'DenseOracle',
]
