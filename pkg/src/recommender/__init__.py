from .ranking import (
    RecommendationList,
    candidate_items,
    check_length,
    export_recommendations,
    mean_ranks,
    rank_of_items,
    recommend,
    recommend_all,
    recommendation_from_scores,
    top_items,
)

__all__ = [
    'RecommendationList',
    'candidate_items',
    'check_length',
    'export_recommendations',
    'mean_ranks',
    'rank_of_items',
    'recommend',
    'recommend_all',
    'recommendation_from_scores',
    'top_items',
]
