from .amplifier import EnsConfig, EnsRun, ens_search, final_validation
from .linear import LogisticModel, balanced_weights, logistic_loss_and_grad
from .net import MLPModel, init_params, mlp_loss_and_grad
from .sampling import smote_oversample
from .stack import (StackedModel, fit_base, fit_stacked, out_of_fold_probs,
                    stratified_folds)
from .tree import DecisionTree, RandomForest, best_split

__all__ = [
    "DecisionTree",
    "EnsConfig",
    "EnsRun",
    "LogisticModel",
    "MLPModel",
    "RandomForest",
    "StackedModel",
    "balanced_weights",
    "best_split",
    "ens_search",
    "final_validation",
    "fit_base",
    "fit_stacked",
    "init_params",
    "logistic_loss_and_grad",
    "mlp_loss_and_grad",
    "out_of_fold_probs",
    "smote_oversample",
    "stratified_folds",
]
