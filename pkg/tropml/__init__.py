"""Tropical geometry toolkit for statistical learning.

Max-plus linear algebra, hit-and-run samplers over tropical polytopes,
Fermat-Weber points, volume estimation and three learning methods
(logistic regression, PCA and kernel density estimation) with a
phylogenetic-tree front end.
"""
from __future__ import annotations

import json
from pathlib import Path

__version__: str = json.loads(
    (Path(__file__).with_name("manifest.json")).read_text(encoding="utf-8")
)["version"]
