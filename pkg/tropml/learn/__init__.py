"""Statistical learning on the tropical projective torus."""
from .kde import KdeModel, kde_fit, kde_outlier_scores, kde_scores
from .logistic import LogisticModel, TrainMeta, fit_logistic, predict_prob, predict_proba
from .pca import PcaTriangle, fit_tropical_pca, pca_plot_coords
from .roc import roc_auc

__all__ = [
    "KdeModel",
    "LogisticModel",
    "PcaTriangle",
    "TrainMeta",
    "fit_logistic",
    "fit_tropical_pca",
    "kde_fit",
    "kde_outlier_scores",
    "kde_scores",
    "pca_plot_coords",
    "predict_prob",
    "predict_proba",
    "roc_auc",
]
