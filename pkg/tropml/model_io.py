"""This module reads and writes tropml-model-v1 JSON files."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .const import LOGGER, MODEL_TYPE_LOGISTIC, MODEL_TYPE_PCA, MODEL_VERSION
from .exceptions import ModelFormatError
from .learn.logistic import LogisticModel, TrainMeta
from .learn.pca import PcaTriangle


class ModelEncoder(json.JSONEncoder):
    """JSON encoder that writes arrays as nested lists."""

    def default(self, o: Any) -> Any:
        """Encode numpy values."""
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        return super().default(o)


def model_to_dict(model: LogisticModel | PcaTriangle) -> dict[str, Any]:
    """Return the JSON document of a model."""
    if isinstance(model, LogisticModel):
        return {
            "version": MODEL_VERSION,
            "type": MODEL_TYPE_LOGISTIC,
            "omega0": model.omega0,
            "omega1": model.omega1,
            "scale": model.scale,
            "penalty": model.penalty,
            "train_meta": {
                "counts": list(model.train_meta.counts),
                "seed": model.train_meta.seed,
            },
        }
    if isinstance(model, PcaTriangle):
        return {
            "version": MODEL_VERSION,
            "type": MODEL_TYPE_PCA,
            "vertices": model.vertices,
            "objective": model.objective,
            "trace": model.trace,
        }
    raise TypeError(f"cannot encode {type(model).__name__}")


class ModelDecoder:
    """Decode a tropml model document."""

    @staticmethod
    def decode(document: dict) -> LogisticModel | PcaTriangle:
        """Decode a model document.

        Args:
            document (dict): The parsed JSON object.

        Returns:
            LogisticModel | PcaTriangle: The decoded model.

        """
        if not isinstance(document, dict) or document.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"not a {MODEL_VERSION} document")
        try:
            if ModelDecoder._contains_logistic_model(document):
                meta = document.get("train_meta", {})
                return LogisticModel(
                    omega0=np.asarray(document["omega0"], dtype=float),
                    omega1=np.asarray(document["omega1"], dtype=float),
                    scale=float(document["scale"]),
                    penalty=float(document["penalty"]),
                    train_meta=TrainMeta(
                        counts=tuple(int(c) for c in meta.get("counts", (0, 0))),
                        seed=int(meta.get("seed", 0)),
                    ),
                )
            if ModelDecoder._contains_pca_model(document):
                return PcaTriangle(
                    vertices=np.asarray(document["vertices"], dtype=float),
                    objective=float(document["objective"]),
                    trace=np.asarray(document.get("trace", []), dtype=float),
                )
        except (KeyError, TypeError, ValueError) as err:
            raise ModelFormatError(f"malformed model document: {err}") from err
        raise ModelFormatError(f"unknown model type {document.get('type')!r}")

    @staticmethod
    def _contains_logistic_model(document: dict) -> bool:
        """Check if the document holds a logistic model.

        Args:
            document (dict): The document to check.

        Returns:
            bool: True if the document is a logistic model, False otherwise.

        """
        return document.get("type") == MODEL_TYPE_LOGISTIC and "omega0" in document

    @staticmethod
    def _contains_pca_model(document: dict) -> bool:
        """Check if the document holds a PCA triangle."""
        return document.get("type") == MODEL_TYPE_PCA and "vertices" in document


def dumps_model(model: LogisticModel | PcaTriangle) -> str:
    """Serialize a model to JSON text."""
    return json.dumps(model_to_dict(model), cls=ModelEncoder, indent=2)


def loads_model(text: str) -> LogisticModel | PcaTriangle:
    """Parse a model from JSON text."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ModelFormatError(f"invalid JSON: {err}") from err
    return ModelDecoder.decode(document)


def save_model(model: LogisticModel | PcaTriangle, path: str | Path) -> None:
    """Write a model file."""
    Path(path).write_text(dumps_model(model) + "\n", encoding="utf-8")
    LOGGER.info("Saved %s model to %s", type(model).__name__, path)


def load_model(path: str | Path) -> LogisticModel | PcaTriangle:
    """Read a model file."""
    return loads_model(Path(path).read_text(encoding="utf-8"))
