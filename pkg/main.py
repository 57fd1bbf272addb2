#Main entry point
import argparse
import sys
from pathlib import Path

from Config import Config
from src.diffusion.oracle import DenseOracle
from src.experiments.config import (
    DEFAULT_SEED, DEFAULT_TEST_FRACTION, ExperimentConfig, SynthConfig, parse_grid, parse_lengths,
)
from src.experiments.report import emit_report
from src.experiments.runner import refine_optimum, sweep
from src.experiments.synth import synth_generate
from src.graph.tripartite import build_graph, describe
from src.ingestion.parser import parse_interactions, write_interactions
from src.ingestion.purification import PurificationPolicy, purify
from src.recommender.ranking import export_recommendations, recommend, recommend_all
from src.splitting.splitter import split, write_manifest
from src.utils.errors import ConfigError, DataError, TagDiffusionError
from src.utils.logger import log_activity, logger


class _Parser(argparse.ArgumentParser):
    #usage errors exit 1 like every other config error
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _read_records(path):
    try:
        with open(path, encoding='utf-8') as f:
            return parse_interactions(f)
    except OSError as e:
        raise DataError(f"cannot read {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise DataError(f"{path} is not UTF-8: {e}") from e


def _open_output(path):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, 'w', encoding='utf-8', newline='')
    except OSError as e:
        raise DataError(f"cannot write {path}: {e}") from e


def run_ingest(args):
    #parse + purify, write canonical TSV
    policy = PurificationPolicy(
        min_users_per_item=args.min_item_users,
        min_items_per_user=args.min_user_items,
        min_tags_per_item=args.min_item_tags,
        drop_singleton_tags=not args.no_singleton_tag_drop,
    )
    records, stats = purify(_read_records(args.input), policy)
    with _open_output(args.output) as f:
        written = write_interactions(records, f)
    summary = describe(build_graph(records))
    logger.info(
        f"Ingested {stats.records_in} -> {written} records: {summary.users} users, {summary.items} items, "
        f"{summary.tags} tags, <k>={summary.mean_item_degree:.2f}, <k'>={summary.mean_item_tag_degree:.2f}"
    )
    log_activity('Ingest', 'success', f"{args.input} -> {args.output} ({written} records)")


def run_split(args):
    dataset = split(_read_records(args.input), args.fraction, args.seed)
    with _open_output(args.manifest) as f:
        rows = write_manifest(dataset, f)
    logger.info(
        f"Split {rows} pairs: {dataset.retained_test_pairs} test pairs kept, "
        f"{dataset.orphan_stats.pairs} orphans dropped (digest {dataset.digest()[:12]})"
    )
    log_activity('Split', 'success', f"{args.input} manifest={args.manifest}", seed=args.seed)


def run_recommend(args):
    graph = build_graph(_read_records(args.input))
    if args.user is None:
        lists, skipped = recommend_all(graph, args.lam, args.top)
        export_recommendations(graph, lists, sys.stdout)
        if skipped:
            logger.warning(f"Skipped {skipped} users with empty profiles")
        return
    rec = recommend(graph, graph.users.index_of(args.user), args.lam, args.top)
    if rec.short:
        logger.warning(f"User {args.user} has only {len(rec.items)} candidate items (L={args.top})")
    export_recommendations(graph, [rec], sys.stdout)


def run_sweep(args):
    overrides = dict(master_seed=args.seed, workers=args.workers)
    if args.runs is not None:
        overrides['runs'] = args.runs
    if args.fraction is not None:
        overrides['test_fraction'] = args.fraction
    if args.preset == 'recall':
        config = ExperimentConfig.recall_preset(**overrides)
    else:
        if args.grid:
            overrides['lambda_grid'] = parse_grid(args.grid)
        if args.lengths:
            overrides['list_lengths'] = parse_lengths(args.lengths)
        config = ExperimentConfig(**overrides)

    records = _read_records(args.input)
    result = sweep(records, config)
    emit_report(result, args.out)
    if args.fine_opt:
        fine = refine_optimum(records, config, result)
        emit_report(fine, Path(args.out) / 'fine')
        lam, best = fine.optimum('auc')
        logger.info(f"Fine-grid optimum: AUC {best:.4f} at lambda={lam}")
    log_activity('Sweep', 'success', f"{args.input} -> {args.out}", seed=config.master_seed,
                 lambdas=len(config.lambda_grid))


def run_synth(args):
    synth = SynthConfig(
        users=args.users, items=args.items, tags=args.tags, topics=args.topics,
        mean_profile=args.mean_profile, signal=args.signal, seed=args.seed,
    )
    records = synth_generate(synth)
    with _open_output(args.output) as f:
        write_interactions(records, f)
    log_activity('Synth', 'success', f"{args.output} ({len(records)} records)", seed=args.seed)


def run_oracle(args):
    #dense reference scores for one user, every item in index order
    graph = build_graph(_read_records(args.input))
    scores = DenseOracle(graph).score_user(graph.users.index_of(args.user), args.lam)
    for item, score in enumerate(scores):
        sys.stdout.write(f"{graph.items.label_of(item)}\t{float(score)!r}\n")


def build_parser():
    parser = _Parser(prog='tagdiff', description='Tag-aware diffusion recommender and evaluation harness')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    ingest = commands.add_parser('ingest', help='parse and purify an interaction file')
    ingest.add_argument('--input', required=True)
    ingest.add_argument('--output', required=True)
    ingest.add_argument('--no-singleton-tag-drop', action='store_true')
    ingest.add_argument('--min-item-users', type=int, default=2)
    ingest.add_argument('--min-user-items', type=int, default=1)
    ingest.add_argument('--min-item-tags', type=int, default=1)
    ingest.set_defaults(handler=run_ingest)

    split_cmd = commands.add_parser('split', help='emit a seeded train/test manifest')
    split_cmd.add_argument('--input', required=True)
    split_cmd.add_argument('--fraction', type=float, default=DEFAULT_TEST_FRACTION)
    split_cmd.add_argument('--seed', type=int, default=DEFAULT_SEED)
    split_cmd.add_argument('--manifest', required=True)
    split_cmd.set_defaults(handler=run_split)

    rec = commands.add_parser('recommend', help="print a user's top-L list (all users without --user)")
    rec.add_argument('--input', required=True)
    rec.add_argument('--user')
    rec.add_argument('--lambda', dest='lam', type=float, required=True)
    rec.add_argument('--top', type=int, default=10)
    rec.set_defaults(handler=run_recommend)

    sweep_cmd = commands.add_parser('sweep', help='run the repeated-split lambda sweep')
    sweep_cmd.add_argument('--input', required=True)
    sweep_cmd.add_argument('--grid')
    sweep_cmd.add_argument('--runs', type=int)
    sweep_cmd.add_argument('--fraction', type=float)
    sweep_cmd.add_argument('--lengths')
    sweep_cmd.add_argument('--seed', type=int, default=DEFAULT_SEED)
    sweep_cmd.add_argument('--workers', type=int, default=Config.WORKERS)
    sweep_cmd.add_argument('--preset', choices=['recall'])
    sweep_cmd.add_argument('--out', default=str(Config.OUTPUT_DIR))
    sweep_cmd.add_argument('--fine-opt', action='store_true')
    sweep_cmd.set_defaults(handler=run_sweep)

    synth = commands.add_parser('synth', help='generate surrogate tagging data')
    synth.add_argument('--users', type=int, default=2000)
    synth.add_argument('--items', type=int, default=5000)
    synth.add_argument('--tags', type=int, default=1000)
    synth.add_argument('--topics', type=int, default=20)
    synth.add_argument('--mean-profile', type=float, default=15.0)
    synth.add_argument('--signal', type=float, default=0.9)
    synth.add_argument('--seed', type=int, default=DEFAULT_SEED)
    synth.add_argument('--output', required=True)
    synth.set_defaults(handler=run_synth)

    oracle = commands.add_parser('oracle', help='dense-matrix reference scores (small graphs)')
    oracle.add_argument('--input', required=True)
    oracle.add_argument('--user', required=True)
    oracle.add_argument('--lambda', dest='lam', type=float, required=True)
    oracle.set_defaults(handler=run_oracle)

    return parser


def main(argv=None):
    #returns the process exit code: 0 ok, 1 usage/config, 2 data, 3 internal
    try:
        Config.validate()
        args = build_parser().parse_args(argv)
        args.handler(args)
    except TagDiffusionError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        logger.exception(f"Internal error: {e}")
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
