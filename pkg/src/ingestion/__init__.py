from .parser import InteractionRecord, parse_interactions, write_interactions
from .purification import PassStats, PurificationPolicy, PurificationStats, purify

__all__ = [
    'InteractionRecord',
    'parse_interactions',
    'write_interactions',
    'PassStats',
    'PurificationPolicy',
    'PurificationStats',
    'purify',
]
