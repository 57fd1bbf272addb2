from .splitter import OrphanStats, SplitDataset, derive_run_seed, held_out_count, split, write_manifest

__all__ = [
    'OrphanStats',
    'SplitDataset',
    'derive_run_seed',
    'held_out_count',
    'split',
    'write_manifest',
]
