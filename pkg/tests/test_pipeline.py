# SPDX-License-Identifier: MIT
from __future__ import annotations

import math

import numpy as np
import pytest

from lungvit.data import model_input
from lungvit.errors import ConfigError
from lungvit.errors import DataError
from lungvit.errors import DivergedTrainingError
from lungvit.model import ViTConfig
from lungvit.model import forward
from lungvit.model import init_params
from lungvit.pipeline import INIT_SEED_OFFSET
from lungvit.pipeline import SGD
from lungvit.pipeline import EpochRecord
from lungvit.pipeline import Optimizer
from lungvit.pipeline import TrainConfig
from lungvit.pipeline import accuracy
from lungvit.pipeline import epoch_log_csv
from lungvit.pipeline import evaluate
from lungvit.pipeline import experiment_table_csv
from lungvit.pipeline import fine_tune
from lungvit.pipeline import freeze_backbone_fine_tune
from lungvit.pipeline import labels_of
from lungvit.pipeline import predict
from lungvit.pipeline import predict_proba
from lungvit.pipeline import random_head
from lungvit.pipeline import run_experiment
from lungvit.pipeline import untrained_head
from lungvit.pipeline import zero_shot_eval
from lungvit.tensor import Tensor
from lungvit.tensor import backward
from lungvit.tensor import cross_entropy
from lungvit.tensor import no_grad
from tests.conftest import TINY
from tests.conftest import synthetic_split

QUICK = TrainConfig(epochs=2, batch_size=8, learning_rate=1e-3, seed=0)


@pytest.fixture(scope="module")
def split():
    return synthetic_split(per_class=10, seed=0)


# ===========================================================================
#  TrainConfig
# ===========================================================================


class TestTrainConfig:
    def test_defaults(self):
        cfg = TrainConfig()
        assert (cfg.epochs, cfg.optimizer, cfg.learning_rate) == (5, "adam", 3e-4)
        assert (cfg.beta1, cfg.beta2, cfg.eps) == (0.9, 0.999, 1e-8)

    @pytest.mark.parametrize(
        "overrides",
        [
            pytest.param({"epochs": 0}, id="no-epochs"),
            pytest.param({"batch_size": 0}, id="empty-batch"),
            pytest.param({"learning_rate": -1e-3}, id="negative-lr"),
            pytest.param({"learning_rate": math.nan}, id="nan-lr"),
            pytest.param({"optimizer": "rmsprop"}, id="unknown-optimizer"),
            pytest.param({"beta2": 1.0}, id="beta-one"),
        ],
    )
    def test_invalid(self, overrides):
        with pytest.raises(ConfigError):
            TrainConfig(**overrides)


# ===========================================================================
#  Prediction and evaluation
# ===========================================================================


class TestEvaluate:
    def test_probabilities_are_rows_of_simplex(self, tiny_params, split):
        probs = predict_proba(tiny_params, split.test, batch_size=4)
        assert probs.shape == (len(split.test), 3)
        assert np.allclose(probs.sum(axis=1), 1.0, rtol=0, atol=1e-12)

    def test_batching_does_not_change_results(self, tiny_params, split):
        a = predict_proba(tiny_params, split.test, batch_size=1)
        b = predict_proba(tiny_params, split.test, batch_size=64)
        assert np.allclose(a, b, rtol=0, atol=1e-12)

    def test_report_accuracy_matches_predictions(self, tiny_params, split):
        result = evaluate(tiny_params, split.test)
        expected = np.mean(predict(tiny_params, split.test) == labels_of(split.test))
        assert result.accuracy == expected == accuracy(tiny_params, split.test)
        assert len(result.roc) == 3

    def test_empty_split(self, tiny_params):
        with pytest.raises(DataError, match="empty"):
            predict_proba(tiny_params, [])

    def test_untrained_head_is_uniform(self, tiny_params, split):
        probs = predict_proba(untrained_head(tiny_params), split.test)
        assert np.allclose(probs, 1 / 3, rtol=0, atol=1e-15)
        assert not predict(untrained_head(tiny_params), split.test).any()

    def test_untrained_head_keeps_backbone(self, tiny_params):
        head = untrained_head(tiny_params)
        names = tiny_params.backbone_names()
        assert head.checksum(names) == tiny_params.checksum(names)
        assert tiny_params["head.fc2.weight"].data.any()

    def test_random_head_keeps_backbone(self, tiny_params):
        head = random_head(tiny_params, 7)
        names = tiny_params.backbone_names()
        assert head.checksum(names) == tiny_params.checksum(names)
        assert head.checksum(head.head_names()) != tiny_params.checksum(head.head_names())

    def test_random_head_matches_seeded_init(self, tiny_params):
        fresh = init_params(TINY, 7)
        head = random_head(tiny_params, 7)
        for name in head.head_names():
            assert np.array_equal(head[name].data, fresh[name].data)

    def test_random_head_of_same_seed_is_identity(self):
        params = init_params(TINY, 4)
        assert random_head(params, 4).checksum() == params.checksum()


class TestZeroShot:
    def test_parameters_untouched(self, tiny_params, split):
        before = tiny_params.checksum()
        zero_shot_eval(tiny_params, split)
        assert tiny_params.checksum() == before

    def test_reports_on_test_split(self, tiny_params, split):
        result = zero_shot_eval(tiny_params, split)
        assert result.num_samples == len(split.test)

    def test_untrained_head_is_at_chance(self):
        for seed in range(20):
            data = synthetic_split(per_class=15, seed=seed)
            result = zero_shot_eval(untrained_head(init_params(TINY, seed)), data)
            assert 0.20 <= result.accuracy <= 0.47

    def test_random_head_band_over_seeds(self):
        accuracies = [
            zero_shot_eval(init_params(TINY, seed), synthetic_split(15, seed)).accuracy
            for seed in range(20)
        ]
        assert 0.20 <= float(np.mean(accuracies)) <= 0.47


# ===========================================================================
#  Fine-tuning
# ===========================================================================


class TestFineTune:
    def test_one_record_per_epoch(self, tiny_params, split):
        _, records = fine_tune(tiny_params, split, QUICK)
        assert [r.epoch for r in records] == [1, 2]
        for r in records:
            assert 0.0 <= r.validation_accuracy <= 1.0
            assert 0.0 <= r.test_accuracy <= 1.0
            assert math.isfinite(r.train_loss)

    def test_input_params_not_modified(self, tiny_params, split):
        before = tiny_params.checksum()
        fine_tune(tiny_params, split, QUICK)
        assert tiny_params.checksum() == before

    @pytest.mark.parametrize("optimizer", ["adam", "sgd"])
    def test_zero_learning_rate_changes_nothing(self, tiny_params, split, optimizer):
        cfg = TrainConfig(epochs=3, batch_size=8, learning_rate=0.0, optimizer=optimizer)
        best, records = fine_tune(tiny_params, split, cfg)
        assert best.checksum() == tiny_params.checksum()
        assert len({(r.validation_accuracy, r.test_accuracy) for r in records}) == 1

    def test_deterministic(self, split):
        params = init_params(ViTConfig.tiny(drop_rate=0.1), 3)
        best_a, records_a = fine_tune(params, split, QUICK)
        best_b, records_b = fine_tune(params, split, QUICK)
        assert records_a == records_b
        assert best_a.checksum() == best_b.checksum()

    def test_seed_changes_run(self, tiny_params, split):
        _, a = fine_tune(tiny_params, split, QUICK)
        _, b = fine_tune(tiny_params, split, TrainConfig(epochs=2, batch_size=8, seed=9))
        assert [r.train_loss for r in a] != [r.train_loss for r in b]

    def test_weights_move(self, tiny_params, split):
        best, _ = fine_tune(tiny_params, split, QUICK)
        assert best.checksum() != tiny_params.checksum()

    def test_divergence_names_step(self, tiny_params, split):
        broken = tiny_params.copy()
        broken["head.fc2.bias"].data[:] = math.nan
        with pytest.raises(DivergedTrainingError, match="step 1") as info:
            fine_tune(broken, split, QUICK)
        assert info.value.step == 1
        assert info.value.exit_code == 3

    def test_runaway_learning_rate_diverges(self, tiny_params, split):
        cfg = TrainConfig(
            epochs=2, batch_size=4, learning_rate=1e6, optimizer="sgd", momentum=0.0
        )
        with pytest.raises(DivergedTrainingError, match="training diverged at step") as info:
            fine_tune(tiny_params, split, cfg)
        assert info.value.step >= 1
        assert info.value.exit_code == 3

    def test_empty_train_split(self, tiny_params, split):
        empty = type(split)([], split.validation, split.test)
        with pytest.raises(DataError, match="D_train"):
            fine_tune(tiny_params, empty, QUICK)


class TestFrozenBackbone:
    def test_backbone_checksum_invariant(self, tiny_params, split):
        names = tiny_params.backbone_names()
        best, _ = freeze_backbone_fine_tune(tiny_params, split, QUICK)
        assert best.checksum(names) == tiny_params.checksum(names)

    def test_head_weights_change(self, tiny_params, split):
        names = tiny_params.head_names()
        best, _ = freeze_backbone_fine_tune(tiny_params, split, QUICK)
        assert best.checksum(names) != tiny_params.checksum(names)


def test_optimizer_base_is_abstract(tiny_params):
    with pytest.raises(TypeError, match="abstract"):
        Optimizer(tiny_params, None, 0.1)  # type: ignore[abstract]


@pytest.mark.parametrize("seed", range(20))
def test_small_step_does_not_increase_batch_loss(seed):
    params = init_params(TINY, seed)
    data = synthetic_split(per_class=4, seed=seed)
    rng = np.random.default_rng(seed)
    batch = [data.train[i] for i in rng.choice(len(data.train), size=4, replace=False)]
    inputs, labels = model_input(batch, TINY.image_size), labels_of(batch)

    loss = cross_entropy(forward(params, Tensor(inputs)).logits, labels)
    before = loss.item()
    backward(loss)
    SGD(params, lr=1e-4, momentum=0.0).step()
    with no_grad():
        after = cross_entropy(forward(params, Tensor(inputs)).logits, labels).item()
    assert after <= before


# ===========================================================================
#  Logs and the comparison table
# ===========================================================================


def test_epoch_log_format():
    records = [EpochRecord(1, 0.5, 0.25, 1.0), EpochRecord(2, 0.125, 1.0, 0.75)]
    assert epoch_log_csv(records) == (
        "epoch,train_loss,val_acc,test_acc\n1,0.5,0.25,1\n2,0.125,1,0.75\n"
    )


def test_experiment_table(tiny_params, split):
    result = run_experiment(tiny_params, split, QUICK)
    lines = experiment_table_csv(result).splitlines()
    assert lines[0] == "model,epoch,val_acc,test_acc"
    assert lines[1].startswith("zero_shot,0,")
    assert [line.split(",")[:2] for line in lines[2:]] == [["few_shot", "1"], ["few_shot", "2"]]
    baseline = random_head(tiny_params, QUICK.seed + INIT_SEED_OFFSET)
    assert result.zero_shot_test.accuracy == accuracy(baseline, split.test)
    _, records = fine_tune(baseline, split, QUICK)
    assert result.records == records
    assert result.accuracy_gain == result.few_shot_test.accuracy - result.zero_shot_test.accuracy


# ===========================================================================
#  Desk-scale runs (opt-in)
# ===========================================================================


@pytest.mark.slow
def test_desk_experiment_reaches_full_validation_accuracy():
    data = synthetic_split(per_class=100, seed=0)
    cfg = TrainConfig(epochs=5, batch_size=16, learning_rate=1e-3, seed=0)
    result = run_experiment(init_params(TINY, 1), data, cfg)
    assert result.records[-1].validation_accuracy >= 0.99
    assert result.accuracy_gain > 0
    assert all(curve.auc >= 0.99 for curve in result.few_shot_test.roc)
    for curve in result.few_shot_test.roc:
        fpr = [point.fpr for point in curve.points]
        tpr = [point.tpr for point in curve.points]
        assert (fpr[0], tpr[0]) == (0.0, 0.0)
        assert (fpr[-1], tpr[-1]) == (1.0, 1.0)
        assert fpr == sorted(fpr)
        assert tpr == sorted(tpr)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_desk_random_head_is_near_chance(seed):
    data = synthetic_split(per_class=100, seed=seed)
    result = zero_shot_eval(random_head(init_params(TINY, seed), seed + 1), data)
    assert 0.20 <= result.accuracy <= 0.47


@pytest.mark.slow
def test_desk_frozen_backbone_beats_chance():
    data = synthetic_split(per_class=100, seed=0)
    cfg = TrainConfig(epochs=5, batch_size=16, learning_rate=1e-2, seed=0)
    best, records = freeze_backbone_fine_tune(init_params(TINY, 1), data, cfg)
    assert records[-1].test_accuracy >= 1 / 3 + 0.20
    assert accuracy(best, data.test) >= 1 / 3 + 0.20
