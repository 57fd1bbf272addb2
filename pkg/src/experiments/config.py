from dataclasses import dataclass, field, replace
from typing import Tuple

from Config import Config
from src.utils.errors import ConfigError

#EXPERIMENT PROTOCOL - fixed in code so results never depend on the environment
DEFAULT_SEED = 20090101
DEFAULT_RUNS = 50
DEFAULT_TEST_FRACTION = 0.05
DEFAULT_LAMBDA_STEP = 0.05
FINE_LAMBDA_STEP = 0.01
DEFAULT_LIST_LENGTHS = (10, 20, 50, 100)

#DIVERSIFICATION PAIR SAMPLING
PAIR_SAMPLING_THRESHOLD = 20000
PAIR_SAMPLE_SIZE = 200000

GRID_TOLERANCE = 1e-9


def lambda_range(start: float = 0.0, stop: float = 1.0, step: float = DEFAULT_LAMBDA_STEP) -> Tuple[float, ...]:
    #inclusive arithmetic grid, values rounded so 0.15 prints as 0.15
    if step <= 0 or stop < start:
        raise ConfigError(f"bad grid {start}:{stop}:{step}")
    count = int(round((stop - start) / step))
    if abs(start + count * step - stop) > GRID_TOLERANCE:
        raise ConfigError(f"step {step} does not divide [{start}, {stop}]")
    values = [round(start + k * step, 10) for k in range(count + 1)]
    return tuple(sorted(set(values)))


def parse_grid(spec: str) -> Tuple[float, ...]:
    #"0:1:0.05" or an explicit list "0,0.5,1"
    try:
        if ':' in spec:
            start, stop, step = (float(part) for part in spec.split(':'))
            return lambda_range(start, stop, step)
        return tuple(sorted({round(float(part), 10) for part in spec.split(',') if part.strip()}))
    except ValueError as e:
        raise ConfigError(f"cannot parse lambda grid {spec!r}: {e}") from None


def parse_lengths(spec: str) -> Tuple[int, ...]:
    try:
        return tuple(sorted({int(part) for part in spec.split(',') if part.strip()}))
    except ValueError as e:
        raise ConfigError(f"cannot parse list lengths {spec!r}: {e}") from None


@dataclass(frozen=True)
class ExperimentConfig:
    lambda_grid: Tuple[float, ...] = field(default_factory=lambda_range)
    runs: int = DEFAULT_RUNS
    test_fraction: float = DEFAULT_TEST_FRACTION
    list_lengths: Tuple[int, ...] = DEFAULT_LIST_LENGTHS
    master_seed: int = DEFAULT_SEED
    pair_sampling_threshold: int = PAIR_SAMPLING_THRESHOLD
    pair_sample_size: int = PAIR_SAMPLE_SIZE
    workers: int = field(default_factory=lambda: Config.WORKERS)

    def __post_init__(self):
        grid = tuple(float(lam) for lam in self.lambda_grid)
        lengths = tuple(int(length) for length in self.list_lengths)
        object.__setattr__(self, 'lambda_grid', grid)
        object.__setattr__(self, 'list_lengths', lengths)

        if not grid or list(grid) != sorted(set(grid)):
            raise ConfigError(f"lambda grid must be strictly ascending: {grid}")
        if grid[0] != 0.0 or grid[-1] != 1.0 or any(not 0.0 <= lam <= 1.0 for lam in grid):
            raise ConfigError(f"lambda grid must span [0, 1] and include both endpoints: {grid}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if not lengths or min(lengths) < 1 or list(lengths) != sorted(set(lengths)):
            raise ConfigError(f"list lengths must be distinct positive integers: {lengths}")
        if self.pair_sampling_threshold < 2 or self.pair_sample_size < 1:
            raise ConfigError("pair sampling threshold must be >= 2 and sample size >= 1")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    @property
    def max_length(self) -> int:
        return self.list_lengths[-1]

    def with_grid(self, grid) -> 'ExperimentConfig':
        return replace(self, lambda_grid=tuple(grid))

    @classmethod
    def recall_preset(cls, **overrides) -> 'ExperimentConfig':
        #pure item-tag, naive half/half and pure user-item, over L = 10..100
        settings = dict(lambda_grid=(0.0, 0.5, 1.0), list_lengths=tuple(range(10, 101, 10)))
        settings.update(overrides)
        return cls(**settings)


@dataclass(frozen=True)
class SynthConfig:
    users: int = 2000
    items: int = 5000
    tags: int = 1000
    topics: int = 20
    mean_profile: float = 15.0
    topic_affinity: float = 0.8
    tags_per_collection: float = 2.0
    signal: float = 0.9
    popularity_spread: float = 1.0
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        invalid = [name for name in ('users', 'items', 'tags', 'topics') if getattr(self, name) < 1]
        if self.mean_profile < 1:
            invalid.append('mean_profile')
        if self.tags_per_collection < 1:
            invalid.append('tags_per_collection')
        if not 0.0 <= self.signal <= 1.0:
            invalid.append('signal')
        if not 0.0 <= self.topic_affinity <= 1.0:
            invalid.append('topic_affinity')
        if self.popularity_spread < 0:
            invalid.append('popularity_spread')
        if invalid:
            raise ConfigError(f"Invalid synth config: {','.join(invalid)}")
