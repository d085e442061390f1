from .base import ScoredPrediction, predict, predict_labels
from .cv import CvError, CvResult, cross_validate, stratified_kfold
from .dense import DenseNetConfig, DenseNetModel, fit_dense_net
from .knn import KnnConfig, KnnModel, fit_knn
from .linear import (
    LinearModel,
    LinearSvmConfig,
    LogisticConfig,
    fit_linear_svm,
    fit_logistic,
)
from .svm_rbf import RbfSvmConfig, RbfSvmModel, fit_rbf_svm
from .tree import DecisionTreeModel, TreeConfig, TreeNode, fit_decision_tree, gini

__all__ = [
    "ScoredPrediction", "predict", "predict_labels",
    "CvError", "CvResult", "cross_validate", "stratified_kfold",
    "DenseNetConfig", "DenseNetModel", "fit_dense_net",
    "KnnConfig", "KnnModel", "fit_knn",
    "LinearModel", "LinearSvmConfig", "LogisticConfig",
    "fit_linear_svm", "fit_logistic",
    "RbfSvmConfig", "RbfSvmModel", "fit_rbf_svm",
    "DecisionTreeModel", "TreeConfig", "TreeNode", "fit_decision_tree", "gini",
]
