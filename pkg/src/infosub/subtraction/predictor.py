"""Prediction through cleaned features.

Stage one runs information subtraction with the feature block as the
target and the protected (or domain) variable as the condition, yielding a
representation of the features with the protected information squeezed
out. Stage two trains an ordinary classifier on that representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..numerics import MlpModel
from ..reports.predict import PredictorConfig, predict_labels, train_classifier
from .trainer import (
    SubtractionConfig,
    TrainedSubtractor,
    _net_seed,
    train_information_subtraction,
)


@dataclass
class UnbiasedPredictionResult:
    subtractor: TrainedSubtractor
    predictor: MlpModel
    train_accuracy: float
    test_accuracy: float | None  # None when no test split was given


def predictor_config_from(config: SubtractionConfig) -> PredictorConfig:
    return PredictorConfig(hidden=config.predictor_hidden,
                           learning_rate=config.lr_predictor,
                           epochs=config.predictor_epochs,
                           batch_size=config.batch_size,
                           clip_norm=config.clip_norm,
                           hidden_activation=config.hidden_activation,
                           seed=_net_seed(config.seed, 5))


def train_unbiased_predictor(config: SubtractionConfig, features, protected,
                             labels, n_classes: int, test=None,
                             log_every: int = 0, log=print
                             ) -> UnbiasedPredictionResult:
    """Subtract the protected variable from the features, then classify.

    `test`, when given, is a (features, labels) pair evaluated with the
    trained pipeline; the subtraction itself never sees it.
    """
    subtractor = train_information_subtraction(
        config, condition=protected, target=features,
        log_every=log_every, log=log)
    z_train = subtractor.represent(features)
    predictor = train_classifier(z_train, labels, n_classes,
                                 predictor_config_from(config))
    train_acc = float(np.mean(predict_labels(predictor, z_train)
                              == np.asarray(labels).ravel()))
    test_acc = None
    if test is not None:
        test_features, test_labels = test
        z_test = subtractor.represent(test_features)
        test_acc = float(np.mean(predict_labels(predictor, z_test)
                                 == np.asarray(test_labels).ravel()))
    return UnbiasedPredictionResult(subtractor=subtractor, predictor=predictor,
                                    train_accuracy=train_acc,
                                    test_accuracy=test_acc)
