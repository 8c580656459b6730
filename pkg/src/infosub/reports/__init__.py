"""Report tables: information decompositions, fairness metrics, predictors.

The sweep runner lives in `infosub.reports.sweep` (imported explicitly, as
it pulls in the trainer).
"""

from .fairness import FairnessError, FairnessReport, fairness_metrics
from .info import InfoReport, information_report
from .predict import (
    PredictorConfig,
    predict_labels,
    train_classifier,
    train_eval_predictor,
)
from .render import (
    render_accuracy_table,
    render_fairness_table,
    render_info_rows,
    render_info_table,
    to_json,
)

__all__ = [
    "FairnessError",
    "FairnessReport",
    "InfoReport",
    "PredictorConfig",
    "fairness_metrics",
    "information_report",
    "predict_labels",
    "render_accuracy_table",
    "render_fairness_table",
    "render_info_rows",
    "render_info_table",
    "to_json",
    "train_classifier",
    "train_eval_predictor",
]
