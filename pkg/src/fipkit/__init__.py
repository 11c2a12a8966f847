"""Interpretable forgotten-item prediction for retail transaction logs."""

from .domain import Basket, CustomerHistory, LabelerConfig, XmtConfig
from .labeler import ForgottenInstance, label_forgotten, labeling_stats
from .profiles import CustomerProfile, ItemStats, build_profile
from .scoring import Prediction, ScoreBreakdown, predict_forgotten
from .patterns import TarsPattern, mine_tars, omega_scores, predict_forgotten_tars
from .evaluation import EvalReport, SplitSpec, evaluate, prf, split_history, sweep
from .explain import Explanation, explain

__version__ = "0.1.0"

__all__ = [
    "Basket",
    "CustomerHistory",
    "CustomerProfile",
    "EvalReport",
    "Explanation",
    "ForgottenInstance",
    "ItemStats",
    "LabelerConfig",
    "Prediction",
    "ScoreBreakdown",
    "SplitSpec",
    "TarsPattern",
    "XmtConfig",
    "build_profile",
    "evaluate",
    "explain",
    "label_forgotten",
    "labeling_stats",
    "mine_tars",
    "omega_scores",
    "predict_forgotten",
    "predict_forgotten_tars",
    "prf",
    "split_history",
    "sweep",
]
