import csv
import os
import re
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from src.experiments.config import (
    DEFAULT_LIST_LENGTHS,
    DEFAULT_SEED,
    ExperimentConfig,
    SynthConfig,
    lambda_range,
    parse_grid,
    parse_lengths,
)
from src.experiments.report import emit_report
from src.experiments.runner import (
    aggregate,
    evaluate_split,
    find_optimum,
    refine_optimum,
    run_once,
    run_split,
    summarise,
    sweep,
)
from src.experiments.synth import synth_generate
from src.graph.tripartite import build_graph
from src.ingestion.parser import InteractionRecord
from src.metrics.measures import DIAGNOSTIC_COLUMNS, auc_report
from src.recommender.ranking import candidate_items
from src.utils.errors import ConfigError, EvaluationError


def _config(**overrides):
    settings = dict(lambda_grid=(0.0, 0.5, 1.0), runs=2, test_fraction=0.1, list_lengths=(2, 5),
                    master_seed=11, workers=1)
    settings.update(overrides)
    return ExperimentConfig(**settings)


def _with_untagged_items(records):
    #three extra items nobody ever tags, ten users each
    return list(records) + [InteractionRecord(f"u{u}", f"bare{u % 3}", ()) for u in range(0, 60, 2)]


def _stranded_mass(dataset):
    #each untagged profile item strands its unit of item-tag resource
    graph = dataset.training_graph
    total = 0
    for user in dataset.test_users:
        candidates = candidate_items(graph.m, graph.profile(user))
        if np.isin(candidates, dataset.test_sets[user]).all():
            continue
        total += int(np.sum(graph.item_tag_degree[graph.profile(user)] == 0))
    return float(total)


class TestExperimentConfig:

    def test_default_grid(self):
        grid = lambda_range(step=0.05)
        assert len(grid) == 21
        assert grid[3] == 0.15
        assert grid[0] == 0.0 and grid[-1] == 1.0

    def test_parse_grid(self):
        assert parse_grid("0:1:0.25") == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert parse_grid("1,0,0.5") == (0.0, 0.5, 1.0)
        with pytest.raises(ConfigError):
            parse_grid("0:x:0.1")

    @pytest.mark.parametrize('spec', ["0:1:0.3", "0:1:0.4", "0:1:0.15"])
    def test_uneven_step_is_rejected(self, spec):
        with pytest.raises(ConfigError):
            parse_grid(spec)

    def test_exact_steps_keep_every_point(self):
        assert parse_grid("0:1:0.2") == (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
        assert len(parse_grid("0:1:0.01")) == 101

    def test_parse_lengths(self):
        assert parse_lengths("50,10,20") == (10, 20, 50)
        with pytest.raises(ConfigError):
            parse_lengths("ten")

    @pytest.mark.parametrize('overrides', [
        dict(lambda_grid=(0.0, 0.5)),
        dict(lambda_grid=(0.5, 0.0, 1.0)),
        dict(lambda_grid=(0.0, 1.0, 1.5)),
        dict(runs=0),
        dict(test_fraction=1.0),
        dict(list_lengths=(0, 10)),
        dict(workers=0),
    ])
    def test_rejects_bad_values(self, overrides):
        with pytest.raises(ConfigError):
            _config(**overrides)

    def test_recall_preset(self):
        preset = ExperimentConfig.recall_preset(runs=4)
        assert preset.lambda_grid == (0.0, 0.5, 1.0)
        assert preset.list_lengths == tuple(range(10, 101, 10))
        assert preset.runs == 4
        assert preset.max_length == 100

    def test_protocol_defaults_are_fixed(self, monkeypatch):
        for key, value in (('TAGDIFF_SEED', '1'), ('TAGDIFF_RUNS', '3'), ('TAGDIFF_TEST_FRACTION', '0.5'),
                           ('TAGDIFF_LIST_LENGTHS', '7'), ('TAGDIFF_LAMBDA_STEP', '0.5')):
            monkeypatch.setenv(key, value)
        config = ExperimentConfig()
        assert (config.master_seed, config.runs, config.test_fraction) == (DEFAULT_SEED, 50, 0.05)
        assert config.list_lengths == DEFAULT_LIST_LENGTHS == (10, 20, 50, 100)
        assert config.lambda_grid == lambda_range() == lambda_range(step=0.05)
        assert SynthConfig().seed == 20090101


class TestSynth:

    @pytest.fixture
    def synth(self):
        return SynthConfig(users=100, items=200, tags=50, topics=5, mean_profile=10.0, seed=1)

    def test_same_seed_same_records(self, synth):
        assert synth_generate(synth) == synth_generate(synth)

    def test_different_seed(self, synth):
        other = SynthConfig(users=100, items=200, tags=50, topics=5, mean_profile=10.0, seed=2)
        assert synth_generate(synth) != synth_generate(other)

    def test_size_and_labels(self, synth):
        records = synth_generate(synth)
        #profile sizes are 1 + Poisson(9), sd of the total is 30
        assert abs(len(records) - 1000) < 150
        assert all(re.fullmatch(r'u\d+', r.user) and re.fullmatch(r'i\d+', r.item) for r in records)
        assert all(r.tags and all(re.fullmatch(r't\d+', t) for t in r.tags) for r in records)
        assert len({(r.user, r.item) for r in records}) == len(records)

    def test_no_signal_item_tag_auc_is_chance(self):
        #one topic, flat popularity and noise tags: tags say nothing about what a user holds back
        records = synth_generate(SynthConfig(users=1000, items=300, tags=50, topics=1, mean_profile=20.0,
                                             topic_affinity=0.0, popularity_spread=0.0, signal=0.0, seed=5))
        config = ExperimentConfig(lambda_grid=(0.0, 1.0), runs=3, list_lengths=(10,), master_seed=5, workers=1)
        result = sweep(records, config)
        assert abs(result.summary('auc', 0.0, 10).mean - 0.5) < 0.04

    def test_no_signal_still_generates(self):
        records = synth_generate(SynthConfig(users=50, items=80, tags=20, topics=4, mean_profile=8.0,
                                             signal=0.0, seed=3))
        assert len({r.user for r in records}) == 50

    @pytest.mark.parametrize('overrides', [dict(signal=1.5), dict(users=0), dict(mean_profile=0.5),
                                           dict(popularity_spread=-1.0)])
    def test_rejects_bad_parameters(self, overrides):
        with pytest.raises(ConfigError):
            SynthConfig(**overrides)


class TestRunOnce:

    def test_one_report_per_length(self, small_records):
        reports = run_once(small_records, _config(), 0.5, 0)
        assert [r.length for r in reports] == [2, 5]
        assert len({r.auc for r in reports}) == 1
        for r in reports:
            assert 0 <= r.auc <= 1 and 0 <= r.recall <= 1 and 0 <= r.diversification <= 1
            assert r.novelty >= 0

    @pytest.mark.parametrize('lam', [0.0, 1.0])
    def test_endpoints_match_direct_auc(self, small_records, lam):
        config = _config()
        dataset = run_split(small_records, config, 0)
        reports = run_once(small_records, config, lam, 0)
        assert reports[0].auc == pytest.approx(auc_report(dataset, lam).value, abs=1e-15)

    def test_accounting(self, small_records):
        config = _config()
        dataset = run_split(small_records, config, 1)
        report = run_once(small_records, config, 0.3, 1)[0]
        assert report.evaluated_users + report.skipped_users == len(dataset.test_users)
        assert report.seed == dataset.seed

    def test_deterministic(self, small_records):
        assert run_once(small_records, _config(), 0.5, 0) == run_once(small_records, _config(), 0.5, 0)

    def test_recall_grows_with_length(self, small_records):
        reports = run_once(small_records, _config(list_lengths=(1, 3, 5, 10)), 0.5, 0)
        recalls = [r.recall for r in reports]
        assert recalls == sorted(recalls)

    def test_no_evaluable_user(self):
        records = [InteractionRecord(u, i, ('t',)) for u in 'ab' for i in 'xy']
        with pytest.raises(EvaluationError):
            evaluate_split(run_split(records, _config(test_fraction=0.25), 0), (0.5,), _config())


class TestSweep:

    @pytest.fixture
    def result(self, small_records):
        return sweep(small_records, _config())

    def test_splits_are_paired_across_lambdas(self, small_records, result):
        config = _config()
        assert result.split_digests == tuple(run_split(small_records, config, k).digest() for k in range(2))
        for run_index in range(2):
            seeds = {r.seed for r in result.reports if r.run_index == run_index}
            assert len(seeds) == 1

    def test_report_shape(self, result):
        assert len(result.reports) == 2 * 3 * 2
        assert set(result.summaries) == {(lam, length, metric) for lam in (0.0, 0.5, 1.0) for length in (2, 5)
                                         for metric in ('auc', 'recall', 'diversification', 'novelty',
                                                        'inverse_novelty')}

    def test_summary_matches_raw_rows(self, result):
        raw = [r.auc for r in result.reports if r.lam == 0.5 and r.length == 2]
        summary = result.summary('auc', 0.5, 2)
        assert summary.mean == pytest.approx(np.mean(raw), abs=1e-15)
        assert summary.std == pytest.approx(np.std(raw, ddof=1), abs=1e-15)
        assert summary.runs == 2

    def test_optimum_and_improvement(self, result):
        lam, best = result.optimum('auc', 2)
        means = [result.summary('auc', grid_lam, 2).mean for grid_lam in (0.0, 0.5, 1.0)]
        assert best == max(means)
        assert result.improvement(2) == pytest.approx(best / result.summary('auc', 1.0, 2).mean - 1.0)

    def test_inverse_novelty_is_tracked(self, result):
        for report in result.reports:
            assert 0.0 < report.inverse_novelty <= 1.0
        lam, best = result.optimum('inverse_novelty', 2)
        means = [result.summary('inverse_novelty', grid_lam, 2).mean for grid_lam in (0.0, 0.5, 1.0)]
        assert best == max(means)

    def test_diagnostics_reach_the_reports(self, small_records):
        records = _with_untagged_items(small_records)
        config = _config()
        result = sweep(records, config)
        for run_index in range(2):
            dataset = run_split(records, config, run_index)
            expected = _stranded_mass(dataset)
            for report in (r for r in result.reports if r.run_index == run_index):
                assert report.mass_loss == expected
                assert report.orphan_pairs == dataset.orphan_stats.pairs
                assert report.orphan_users == dataset.orphan_stats.users
                assert report.orphan_items == dataset.orphan_stats.items
                assert report.diversification_stderr == 0.0
                assert not report.diversification_sampled
        assert any(r.mass_loss > 0 for r in result.reports)

    def test_run_activity_rows(self, mocker, small_records):
        mock_activity = mocker.patch('src.experiments.runner.log_activity')
        mock_warning = mocker.patch('src.experiments.runner.logger.warning')
        config = _config()
        records = _with_untagged_items(small_records)
        sweep(records, config)

        assert len(mock_activity.call_args_list) == 2
        for run_index, call in enumerate(mock_activity.call_args_list):
            assert call.args[:2] == ('Run', 'success')
            assert call.kwargs['run'] == run_index
            assert call.kwargs['seed'] == run_split(records, config, run_index).seed
            assert call.kwargs['lambdas'] == 3
            assert 'orphan_pairs=' in call.args[2] and 'mass_loss=' in call.args[2]
        assert mock_warning.call_args_list
        for call in mock_warning.call_args_list:
            assert call.kwargs['extra']['run'] in (0, 1)
            assert 'tagless training items' in call.args[0]

    def test_endpoint_only_grid(self, small_records):
        result = sweep(small_records, _config(lambda_grid=(0.0, 1.0), runs=1))
        assert len(result.reports) == 4
        assert result.curve('auc', 5)[0][1].std == 0.0

    def test_parallel_matches_serial(self, small_records, tmp_path):
        serial = emit_report(sweep(small_records, _config(workers=1)), tmp_path / 'one')
        parallel = emit_report(sweep(small_records, _config(workers=2)), tmp_path / 'two')
        for name in ('report.tsv', 'summary.tsv', 'diagnostics.tsv', 'curves/auc_L5.tsv', 'curves/novelty_L2.tsv'):
            assert (serial / name).read_bytes() == (parallel / name).read_bytes()

    def test_refine_optimum(self, small_records):
        config = _config(lambda_grid=(0.0, 0.25, 0.5, 0.75, 1.0), runs=1)
        coarse = sweep(small_records, config)
        fine = refine_optimum(small_records, config, coarse, fine_step=0.05)
        center = coarse.lambda_opt[('auc', 2)]
        grid = fine.config.lambda_grid
        assert grid[0] == 0.0 and grid[-1] == 1.0
        assert center in grid
        inner = [lam for lam in grid if 0.0 < lam < 1.0]
        assert all(abs(lam - center) <= 0.25 + 1e-9 for lam in inner)
        assert fine.split_digests == coarse.split_digests

    def test_refine_rejects_bad_step(self, small_records, result):
        with pytest.raises(ConfigError):
            refine_optimum(small_records, _config(), result, fine_step=0.0)


class TestOptimum:

    def test_ties_go_to_smaller_lambda(self):
        assert find_optimum((0.0, 0.5, 1.0), {0.0: 0.8, 0.5: 0.9, 1.0: 0.9}) == 0.5

    def test_lower_is_better(self):
        assert find_optimum((0.0, 0.5, 1.0), {0.0: 3.0, 0.5: 2.0, 1.0: 4.0}, lower_is_better=True) == 0.5

    def test_absent_values_skipped(self):
        assert find_optimum((0.0, 1.0), {0.0: None, 1.0: 0.2}) == 1.0

    def test_summarise(self):
        summary = summarise([1.0, None, 3.0])
        assert (summary.mean, summary.minimum, summary.maximum, summary.runs) == (2.0, 1.0, 3.0, 2)
        assert summary.std == pytest.approx(np.sqrt(2.0))
        assert summarise([None]).mean is None
        assert summarise([0.5]).std == 0.0


class TestReport:

    def test_files_and_rows(self, small_records, tmp_path):
        config = _config()
        destination = emit_report(sweep(small_records, config), tmp_path)
        lines = (destination / 'report.tsv').read_text(encoding='utf-8').splitlines()
        assert lines[0].startswith('#lambda\tL\tauc')
        assert len(lines) == 1 + 2 * 3 * 2 + 3 * 2
        assert sum(line.endswith('\tmean') for line in lines) == 6
        curves = sorted(p.name for p in (destination / 'curves').iterdir())
        assert len(curves) == 5 * 2
        assert 'diversification_L5.tsv' in curves
        for line in (destination / 'curves' / 'auc_L2.tsv').read_text(encoding='utf-8').splitlines():
            assert re.fullmatch(r'[01]\.\d{4}\t\S+\t\S+', line)

    def test_mean_rows_match_summaries(self, small_records, tmp_path):
        result = sweep(small_records, _config())
        destination = emit_report(result, tmp_path)
        rows = [line.split('\t') for line in (destination / 'report.tsv').read_text(encoding='utf-8').splitlines()
                if line.endswith('\tmean')]
        first = rows[0]
        assert float(first[0]) == 0.0 and int(first[1]) == 2
        assert float(first[2]) == result.summary('auc', 0.0, 2).mean

    def test_diagnostics_file(self, small_records, tmp_path):
        records = _with_untagged_items(small_records)
        result = sweep(records, _config())
        destination = emit_report(result, tmp_path)
        with open(destination / 'diagnostics.tsv', newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f, delimiter='\t'))
        assert rows[0] == ['#run', *DIAGNOSTIC_COLUMNS[1:]]
        assert len(rows) == 1 + 2 * 3 * 2
        for row, report in zip(rows[1:], result.reports):
            fields = dict(zip(DIAGNOSTIC_COLUMNS, row))
            assert int(fields['run']) == report.run_index
            assert float(fields['lambda']) == report.lam and int(fields['L']) == report.length
            assert int(fields['short_lists']) == report.short_lists
            assert float(fields['diversification_stderr']) == report.diversification_stderr
            assert fields['diversification_sampled'] == '0'
            assert int(fields['orphan_pairs']) == report.orphan_pairs
            assert float(fields['item_tag_mass_loss']) == report.mass_loss
        assert any(float(row[-1]) > 0 for row in rows[1:])

    def test_aggregate_of_sweep_reports(self, small_records):
        result = sweep(small_records, _config())
        again = aggregate(result.config, result.reports)
        assert again.summaries == result.summaries
        assert again.lambda_opt == result.lambda_opt


@pytest.mark.slow
class TestSyntheticAcceptance:

    def test_integrated_beats_pure_and_curves_are_monotone(self):
        records = synth_generate(SynthConfig(users=2000, items=5000, tags=1000, signal=0.9, seed=20090101))
        config = ExperimentConfig(lambda_grid=lambda_range(step=0.05), runs=10, test_fraction=0.05,
                                  list_lengths=(20,), master_seed=20090101, workers=os.cpu_count() or 1)
        result = sweep(records, config)
        grid = config.lambda_grid
        auc = [result.summary('auc', lam, 20).mean for lam in grid]
        assert max(auc[1:-1]) >= max(auc[0], auc[-1]) + 0.005

        novelty = [result.summary('novelty', lam, 20).mean for lam in grid]
        diversity = [result.summary('diversification', lam, 20).mean for lam in grid]
        assert spearmanr(grid, novelty)[0] >= 0.9
        assert spearmanr(grid, diversity)[0] <= -0.9

    def test_single_lambda_envelope(self):
        records = synth_generate(SynthConfig(users=10000, items=50000, tags=20000, mean_profile=15.0, seed=7))
        config = ExperimentConfig(lambda_grid=(0.0, 0.5, 1.0), runs=1, list_lengths=(10, 20, 50, 100),
                                  master_seed=7, workers=os.cpu_count() or 1)
        started = time.monotonic()
        reports = run_once(records, config, 0.5, 0)
        assert time.monotonic() - started <= 300
        recalls = [r.recall for r in reports]
        assert recalls == sorted(recalls)
        assert build_graph(records).n == 10000
