# SPDX-License-Identifier: MIT
from lungvit.pipeline.optim import SGD
from lungvit.pipeline.optim import Adam
from lungvit.pipeline.optim import Optimizer
from lungvit.pipeline.evaluate import accuracy
from lungvit.pipeline.evaluate import evaluate
from lungvit.pipeline.evaluate import labels_of
from lungvit.pipeline.evaluate import predict
from lungvit.pipeline.evaluate import predict_proba
from lungvit.pipeline.evaluate import random_head
from lungvit.pipeline.evaluate import untrained_head
from lungvit.pipeline.evaluate import zero_shot_eval
from lungvit.pipeline.train import DROPOUT_SEED_OFFSET
from lungvit.pipeline.train import INIT_SEED_OFFSET
from lungvit.pipeline.train import SHUFFLE_SEED_OFFSET
from lungvit.pipeline.train import EpochRecord
from lungvit.pipeline.train import TrainConfig
from lungvit.pipeline.train import epoch_log_csv
from lungvit.pipeline.train import fine_tune
from lungvit.pipeline.train import freeze_backbone_fine_tune
from lungvit.pipeline.train import make_optimizer
from lungvit.pipeline.train import write_epoch_log
from lungvit.pipeline.experiment import ExperimentResult
from lungvit.pipeline.experiment import experiment_table_csv
from lungvit.pipeline.experiment import run_experiment
from lungvit.pipeline.experiment import write_experiment_table

__all__ = [
    "DROPOUT_SEED_OFFSET",
    "INIT_SEED_OFFSET",
    "SGD",
    "SHUFFLE_SEED_OFFSET",
    "Adam",
    "EpochRecord",
    "ExperimentResult",
    "Optimizer",
    "TrainConfig",
    "accuracy",
    "epoch_log_csv",
    "evaluate",
    "experiment_table_csv",
    "fine_tune",
    "freeze_backbone_fine_tune",
    "labels_of",
    "make_optimizer",
    "predict",
    "predict_proba",
    "random_head",
    "run_experiment",
    "untrained_head",
    "write_epoch_log",
    "write_experiment_table",
    "zero_shot_eval",
]
