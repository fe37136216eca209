"""ROC curves and their area."""
from __future__ import annotations

import numpy as np
from sklearn.metrics import auc, roc_curve

from ..exceptions import DimensionMismatchError, InputError, SingleClassError


def roc_auc(scores, labels) -> tuple[float, np.ndarray]:
    """Return the ROC AUC and the (fpr, tpr) rows of the exact step curve.

    Tied scores share a threshold, which averages them in the area.
    """
    scores = np.asarray(scores, dtype=float).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if scores.size != labels.size:
        raise DimensionMismatchError(f"{scores.size} scores for {labels.size} labels")
    if not np.all(np.isin(labels, (0, 1))):
        raise InputError("labels must be 0 or 1")
    if np.unique(labels).size < 2:
        raise SingleClassError("ROC needs both classes")
    fpr, tpr, _ = roc_curve(labels.astype(int), scores, drop_intermediate=False)
    return float(auc(fpr, tpr)), np.column_stack([fpr, tpr])
