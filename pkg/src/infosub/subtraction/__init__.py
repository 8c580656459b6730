"""The information-subtraction trainer and its applications."""

from .predictor import (
    UnbiasedPredictionResult,
    predictor_config_from,
    train_unbiased_predictor,
)
from .trainer import (
    DiagnosticsTrace,
    EpochRecord,
    Standardizer,
    SubtractionConfig,
    SubtractionError,
    SubtractionTrainer,
    TrainedSubtractor,
    generate_representation,
    train_information_subtraction,
)
from .venn import VennDecomposition, VennSector, venn_decompose

__all__ = [
    "DiagnosticsTrace",
    "EpochRecord",
    "Standardizer",
    "SubtractionConfig",
    "SubtractionError",
    "SubtractionTrainer",
    "TrainedSubtractor",
    "UnbiasedPredictionResult",
    "VennDecomposition",
    "VennSector",
    "generate_representation",
    "predictor_config_from",
    "train_information_subtraction",
    "train_unbiased_predictor",
    "venn_decompose",
]
