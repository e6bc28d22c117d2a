"""Training loops: determinism, metrics, sweeps, fine-tuning plumbing."""

import numpy as np
import pytest

from matchformer import features, synth, train
from matchformer.errors import ConfigError, IntegrityError, NumericError
from matchformer.features import MaskedMatch, build_mpp_corpus, build_nmsp_dataset, split_dataset
from matchformer.model import HEAD_NMSP, config_from_vocab, init_model, save_checkpoint
from matchformer.train import (
    TrainConfig,
    evaluate_mpp,
    evaluate_nmsp,
    finetune_nmsp,
    mpp_metrics_from_logit_rows,
    mpp_tensors,
    nmsp_metrics_from_predictions,
    nmsp_tensors,
    predict_nmsp,
    pretrain_mpp,
)


@pytest.fixture(scope="module")
def mpp_setup():
    rows, sheets = synth.synth_league(n_teams=4, squad_size=8, n_rounds=6, seed=2,
                                      bench_per_team=0)
    vocab = features.build_vocabulary(rows)
    samples = build_mpp_corpus(rows, sheets, vocab, k=2, mask_rate=0.25, seed=0,
                               seq_len=20)
    corpus = split_dataset(samples, 0.8, mode="random", seed=0)
    return rows, sheets, vocab, corpus


def _mpp_config(vocab, seed=0, epochs=2, **model_kwargs):
    model_kwargs.setdefault("n_layers", 1)
    model_kwargs.setdefault("dim", 16)
    model_kwargs.setdefault("stat_input_width", 39)
    model_kwargs.setdefault("seq_len", 20)
    model = config_from_vocab(vocab, head="mpp", **model_kwargs)
    return TrainConfig(model=model, batch_size=16, base_lr=1e-3, epochs=epochs,
                       seed=seed, task="mpp")


class TestPretrain:
    def test_loss_decreases_and_report_is_valid(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        _, report = pretrain_mpp(corpus, _mpp_config(vocab, epochs=40))
        assert report.records[0]["val_loss"] > report.records[-1]["val_loss"]
        steps = [r["step"] for r in report.records]
        assert steps == sorted(steps) and len(set(steps)) == len(steps)
        for record in report.records:
            assert record["val_top3"] >= record["val_top1"]
            assert record["val_loss"] >= 0.0

    def test_bitwise_determinism(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        _, a = pretrain_mpp(corpus, _mpp_config(vocab, seed=3, epochs=2))
        _, b = pretrain_mpp(corpus, _mpp_config(vocab, seed=3, epochs=2))
        assert a.records == b.records
        _, c = pretrain_mpp(corpus, _mpp_config(vocab, seed=4, epochs=2))
        assert a.records != c.records

    def test_total_steps_mode(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        model = config_from_vocab(vocab, n_layers=1, dim=16, head="mpp",
                                  stat_input_width=39, seq_len=20)
        config = TrainConfig(model=model, batch_size=16, base_lr=1e-3,
                             total_steps=3, seed=0, task="mpp")
        _, report = pretrain_mpp(corpus, config)
        assert report.total_steps == 3
        assert report.records[-1]["step"] == 3

    def test_sample_without_masks_rejected(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        train_split, val_split = corpus
        broken = MaskedMatch(
            base=train_split[0].base,
            masked_positions=np.array([], dtype=np.int64),
            targets=np.array([], dtype=np.int64),
        )
        with pytest.raises(IntegrityError, match="no masked positions"):
            pretrain_mpp(([broken] + train_split[1:], val_split),
                         _mpp_config(vocab))

    def test_empty_corpus_rejected(self, mpp_setup):
        _, _, vocab, _ = mpp_setup
        with pytest.raises(ConfigError):
            pretrain_mpp(([], []), _mpp_config(vocab))

    def test_non_finite_loss_aborts_with_diagnostic(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        train_split, val_split = corpus
        poisoned = MaskedMatch(
            base=train_split[0].base,
            masked_positions=train_split[0].masked_positions,
            targets=train_split[0].targets,
        )
        poisoned.base.stats[0, 0] = np.inf
        try:
            with np.errstate(invalid="ignore"), pytest.raises(NumericError):
                pretrain_mpp(([poisoned] + train_split[1:], val_split),
                             _mpp_config(vocab))
        finally:
            poisoned.base.stats[0, 0] = 0.0

    def test_epochs_xor_steps_enforced(self, mpp_setup):
        _, _, vocab, _ = mpp_setup
        model = config_from_vocab(vocab, n_layers=1, dim=16, head="mpp",
                                  stat_input_width=39, seq_len=20)
        with pytest.raises(ConfigError):
            TrainConfig(model=model, epochs=2, total_steps=10, task="mpp")
        with pytest.raises(ConfigError):
            TrainConfig(model=model, task="mpp")


class TestMppMetrics:
    def test_uniform_logits_hit_rate_within_binomial_bound(self):
        """Zero model over a 2602 vocabulary: top-1 behaves like 1/V."""
        v, n_samples, n_masked = 2602, 125, 80
        gen = np.random.default_rng(0)
        from matchformer.model import ModelConfig

        model = ModelConfig(n_layers=1, dim=8, vocab_size=v, n_positions=4,
                            n_teams=3, stat_input_width=4, seq_len=n_masked,
                            n_heads=2)
        params = init_model(model, seed=0)
        params["head.w1"].data[:] = 0
        params["head.b1"].data[:] = 0
        params["head.w2"].data[:] = 0
        params["head.b2"].data[:] = 0
        data = train.MppTensors(
            player_idx=gen.integers(0, v - 2, size=(n_samples, n_masked)).astype(np.int32),
            position_idx=np.zeros((n_samples, n_masked), dtype=np.int32),
            team_idx=np.zeros((n_samples, n_masked), dtype=np.int32),
            stats=gen.normal(size=(n_samples, n_masked, 4)).astype(np.float32),
            is_pad=np.zeros((n_samples, n_masked), dtype=bool),
            loss_mask=np.ones((n_samples, n_masked), dtype=bool),
            targets=gen.integers(0, v, size=(n_samples, n_masked)),
        )
        scores = evaluate_mpp(params, model, data)
        total = n_samples * n_masked
        assert scores["n_positions"] == total == 10000
        p = 1.0 / v
        sigma = np.sqrt(total * p * (1 - p))
        hits = scores["top1"] * total
        assert abs(hits - total * p) <= 3 * sigma
        np.testing.assert_allclose(scores["cross_entropy"], np.log(v), atol=1e-6)

    def test_one_hot_logits_are_perfect(self):
        gen = np.random.default_rng(1)
        targets = gen.integers(0, 9, size=40)
        rows = np.full((40, 9), -30.0)
        rows[np.arange(40), targets] = 30.0
        scores = mpp_metrics_from_logit_rows(rows, targets)
        assert scores["hits1"] == scores["hits3"] == 40
        assert scores["nll_sum"] / 40 < 1e-12

    def test_fixture_matches_exhaustive_count(self):
        gen = np.random.default_rng(2)
        rows = gen.normal(size=(20, 7))
        targets = gen.integers(0, 7, size=20)
        scores = mpp_metrics_from_logit_rows(rows, targets)
        hits1 = hits3 = 0
        nll = 0.0
        for i in range(20):  # exhaustive hand count
            order = np.argsort(-rows[i])
            if order[0] == targets[i]:
                hits1 += 1
            if targets[i] in order[:3]:
                hits3 += 1
            p = np.exp(rows[i]) / np.exp(rows[i]).sum()
            nll += -np.log(p[targets[i]])
        assert scores["hits1"] == hits1
        assert scores["hits3"] == hits3
        np.testing.assert_allclose(scores["nll_sum"], nll, atol=1e-9)

    def test_top3_at_least_top1_randomized(self):
        gen = np.random.default_rng(3)
        for _ in range(25):
            rows = gen.normal(size=(30, 12))
            targets = gen.integers(0, 12, size=30)
            scores = mpp_metrics_from_logit_rows(rows, targets)
            assert scores["hits3"] >= scores["hits1"]

    def test_perturbing_unmasked_positions_changes_nothing(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        config = _mpp_config(vocab)
        params = init_model(config.model, seed=0)
        data = mpp_tensors(corpus[1], vocab.mask_index, np.float32)
        base = evaluate_mpp(params, config.model, data)
        tampered_stats = data.stats.copy()
        tampered = train.MppTensors(
            player_idx=data.player_idx, position_idx=data.position_idx,
            team_idx=data.team_idx, stats=tampered_stats, is_pad=data.is_pad,
            loss_mask=data.loss_mask,
            targets=np.where(data.loss_mask, data.targets, 7),
        )
        after = evaluate_mpp(params, config.model, tampered)
        assert base == after


class TestNmspMetrics:
    def test_perfect_predictions(self):
        gen = np.random.default_rng(0)
        targets = gen.poisson(20, size=(12, 36)).astype(np.float64)
        scores = nmsp_metrics_from_predictions(targets.copy(), targets)
        assert scores["global_mse"] == 0.0
        assert all(entry["rmse"] == 0.0 for entry in scores["per_stat"])
        assert len(scores["per_stat"]) == 18

    def test_constant_mean_prediction_gives_population_std(self):
        gen = np.random.default_rng(1)
        targets = gen.normal(50, 7, size=(40, 36))
        preds = np.empty_like(targets)
        for j in range(18):
            pooled = np.concatenate([targets[:, j], targets[:, 18 + j]])
            preds[:, j] = pooled.mean()
            preds[:, 18 + j] = pooled.mean()
        scores = nmsp_metrics_from_predictions(preds, targets)
        for j, entry in enumerate(scores["per_stat"]):
            pooled = np.concatenate([targets[:, j], targets[:, 18 + j]])
            np.testing.assert_allclose(entry["rmse"], pooled.std(), rtol=1e-12)

    def test_spreadsheet_recomputation_on_three_matches(self):
        preds = np.array([[10.0] * 36, [20.0] * 36, [30.0] * 36])
        targets = np.array([[12.0] * 36, [18.0] * 36, [33.0] * 36])
        scores = nmsp_metrics_from_predictions(preds, targets)
        # per match squared errors: 4, 4, 9 on every slot
        np.testing.assert_allclose(scores["global_mse"], (4 + 4 + 9) / 3)
        for entry in scores["per_stat"]:
            np.testing.assert_allclose(entry["rmse"], np.sqrt((4 + 4 + 9) / 3))
            np.testing.assert_allclose(
                entry["delta"], np.sqrt(17 / 3) / 21.0
            )

    def test_undefined_delta_marker(self):
        preds = np.zeros((4, 36))
        targets = np.zeros((4, 36))
        scores = nmsp_metrics_from_predictions(preds, targets)
        assert all(entry["delta"] is None for entry in scores["per_stat"])


@pytest.fixture(scope="module")
def nmsp_setup():
    rows, sheets = synth.synth_league(n_teams=4, squad_size=8, n_rounds=8,
                                      seed=5, bench_per_team=0)
    vocab = features.build_vocabulary(rows)
    examples = build_nmsp_dataset(rows, sheets, vocab, seq_len=20)
    dataset = split_dataset(examples, 0.8, mode="chronological")
    return vocab, dataset


def _nmsp_config(vocab, seed=0, epochs=2, init_checkpoint=None):
    model = config_from_vocab(
        vocab, n_layers=1, dim=16, head=HEAD_NMSP,
        stat_input_width=features.NMSP_WIDTH, seq_len=20,
    )
    return TrainConfig(model=model, batch_size=8, base_lr=1e-3,
                       warmup_ratio=0.1, weight_decay=0.01, epochs=epochs,
                       seed=seed, task="nmsp", init_checkpoint=init_checkpoint)


class TestFinetune:
    def test_random_init_trains(self, nmsp_setup):
        vocab, dataset = nmsp_setup
        _, report = finetune_nmsp(dataset, _nmsp_config(vocab, epochs=30))
        assert report.records[-1]["val_global_mse"] > 0
        assert report.records[0]["val_global_mse"] > report.records[-1]["val_global_mse"]

    def test_warm_start_from_checkpoint(self, nmsp_setup, tmp_path, mpp_setup):
        vocab_nmsp, dataset = nmsp_setup
        _, _, vocab_mpp, corpus = mpp_setup
        # pre-train briefly on the matching vocabulary, then reuse
        rows, sheets = synth.synth_league(n_teams=4, squad_size=8, n_rounds=8,
                                          seed=5, bench_per_team=0)
        vocab = features.build_vocabulary(rows)
        samples = build_mpp_corpus(rows, sheets, vocab, k=1, mask_rate=0.25,
                                   seed=0, seq_len=20)
        mpp_corpus = split_dataset(samples, 0.8, mode="random", seed=0)
        params, _ = pretrain_mpp(mpp_corpus, _mpp_config(vocab, epochs=1))
        ckpt = tmp_path / "mpp_ckpt"
        save_checkpoint(params, _mpp_config(vocab).model, ckpt)

        config = _nmsp_config(vocab, epochs=1, init_checkpoint=str(ckpt))
        tuned, report = finetune_nmsp(dataset, config)
        assert report.records
        # the backbone must have been loaded, not re-randomized: run a
        # second warm start and check the step-0 encoder weights agree
        tuned2, _ = finetune_nmsp(dataset, _nmsp_config(vocab, epochs=1,
                                                        init_checkpoint=str(ckpt)))
        assert (tuned["enc0.attn_q_w"].data.tobytes()
                == tuned2["enc0.attn_q_w"].data.tobytes())

    def test_architecture_mismatch_rejected(self, nmsp_setup, tmp_path):
        vocab, dataset = nmsp_setup
        other_model = config_from_vocab(vocab, n_layers=1, dim=32, head="mpp",
                                        stat_input_width=39, seq_len=20)
        params = init_model(other_model, seed=0)
        ckpt = tmp_path / "mismatch"
        save_checkpoint(params, other_model, ckpt)
        with pytest.raises(ConfigError, match="mismatch"):
            finetune_nmsp(dataset, _nmsp_config(vocab, init_checkpoint=str(ckpt)))

    def test_evaluate_nmsp_uses_prediction_path(self, nmsp_setup):
        vocab, dataset = nmsp_setup
        config = _nmsp_config(vocab)
        params = init_model(config.model, seed=1)
        data = nmsp_tensors(dataset[1], np.float32)
        direct = evaluate_nmsp(params, config.model, data)
        preds = predict_nmsp(params, config.model, data)
        recomputed = nmsp_metrics_from_predictions(preds,
                                                   data.target.astype(np.float64))
        assert direct["global_mse"] == recomputed["global_mse"]


class TestSweep:
    def test_single_config_matches_report(self, mpp_setup):
        _, _, vocab, corpus = mpp_setup
        config = _mpp_config(vocab, epochs=1)
        result = train.run_sweep([config], corpus)
        row = result["summary"][0]
        report = result["runs"][0]
        assert row["status"] == "ok"
        assert row["val_cross_entropy"] == report.final["val_loss"]
        assert row["val_top1"] == report.final["val_top1"]
        assert row["arch"] == "1l16d"

    def test_failures_recorded_and_sweep_continues(self, mpp_setup, tmp_path):
        _, _, vocab, corpus = mpp_setup
        bad_model = config_from_vocab(vocab, n_layers=1, dim=16, head="mpp",
                                      stat_input_width=39, seq_len=10)
        bad = TrainConfig(model=bad_model, batch_size=16, base_lr=1e-3,
                          epochs=1, task="mpp")  # seq_len mismatch
        good = _mpp_config(vocab, epochs=1)
        result = train.run_sweep([bad, good], corpus)
        statuses = [row["status"] for row in result["summary"]]
        assert any(s.startswith("error") for s in statuses)
        assert any(s == "ok" for s in statuses)
        path = tmp_path / "sweep.tsv"
        train.write_sweep_table(result["summary"], path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 3
        assert lines[0].split("\t") == list(train.SWEEP_COLUMNS)
