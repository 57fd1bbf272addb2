import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from Config import Config
from src.experiments.config import DEFAULT_SEED, SynthConfig
from src.experiments.synth import synth_generate
from src.ingestion.parser import InteractionRecord, write_interactions
from src.utils.logger import log_activity, logger

#two users, three items, two tags; u1 gets i3 recommended
G1 = [
    ('u1', 'i1', ('t1',)),
    ('u1', 'i2', ('t1',)),
    ('u2', 'i2', ('t2',)),
    ('u2', 'i3', ('t1', 't2')),
]

#three users, five items, four tags
WORKED_EXAMPLE = [
    ('U1', 'I1', ('T1', 'T2')), ('U1', 'I3', ('T2', 'T3')), ('U1', 'I5', ('T3', 'T4')),
    ('U2', 'I1', ('T1',)), ('U2', 'I2', ('T1', 'T4')), ('U2', 'I4', ('T3',)), ('U2', 'I5', ('T3',)),
    ('U3', 'I2', ('T4',)), ('U3', 'I3', ('T3',)), ('U3', 'I4', ('T3',)),
]


def _write(path, records):
    with open(path, 'w', encoding='utf-8', newline='') as f:
        return write_interactions(records, f)


def generate(destination, users=300, items=600, tags=150, seed=DEFAULT_SEED):
    #fixture files plus one small synthetic dataset
    destination = Path(destination)
    destination.mkdir(parents=True, exist_ok=True)
    written = {
        'g1.tsv': _write(destination / 'g1.tsv', [InteractionRecord(*row) for row in G1]),
        'worked_example.tsv': _write(destination / 'worked_example.tsv',
                                     [InteractionRecord(*row) for row in WORKED_EXAMPLE]),
    }
    synth = SynthConfig(users=users, items=items, tags=tags, topics=10, mean_profile=12.0,
                        seed=seed)
    written['synthetic.tsv'] = _write(destination / 'synthetic.tsv', synth_generate(synth))

    for name, rows in written.items():
        logger.info(f"Wrote {rows} records to {destination / name}")
    log_activity('Example Data', 'success', f"{destination} ({sum(written.values())} records)")
    return written


def main():
    parser = argparse.ArgumentParser(description='Write example interaction files')
    parser.add_argument('--out', default=str(Config.DATA_DIR / 'examples'))
    parser.add_argument('--users', type=int, default=300)
    parser.add_argument('--items', type=int, default=600)
    parser.add_argument('--tags', type=int, default=150)
    parser.add_argument('--seed', type=int, default=DEFAULT_SEED)
    args = parser.parse_args()
    generate(args.out, args.users, args.items, args.tags, args.seed)


if __name__ == "__main__":
    main()
