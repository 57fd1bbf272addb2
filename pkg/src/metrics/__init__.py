from .measures import (
    REPORT_COLUMNS,
    AucResult,
    DiversityEstimate,
    MetricsReport,
    auc,
    auc_report,
    auc_user,
    diversification,
    format_value,
    novelty,
    recall,
    recall_curve,
    user_auc_from_scores,
)

__all__ = [
    'REPORT_COLUMNS',
    'AucResult',
    'DiversityEstimate',
    'MetricsReport',
    'auc',
    'auc_report',
    'auc_user',
    'diversification',
    'format_value',
    'novelty',
    'recall',
    'recall_curve',
    'user_auc_from_scores',
]
