"""
Model files and JSON reports.

A model file is a JSON document::

    {
      "schema_version": "1.0",
      "dimension": 2,
      "ontic_points": ["a", "b"],
      "preparations": [
        {"label": "zero", "state": [[1, 0], [0, 0]], "mu": [1.0, 0.0]},
        ...
      ],
      "responses": [
        {"basis": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]], "xi": [[1, 0], [0, 1]]}
      ]
    }

Complex amplitudes are written as [re, im] pairs. Composite models may add
"factors": {"points": [[...], [...]]} for a Cartesian-product ontic space and,
per preparation, "product": {"factor1": [...], "factor2": [...]} and
"factor_labels": [l1, l2].
"""

import json
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Optional, Union

import jsonschema
import numpy as np

from .exceptions import InvariantViolation, ParseError, SchemaError
from .ontology import (
    FiniteOnticSpace,
    FiniteOntologicalModel,
    PreparationMeasure,
    ResponseTable,
)
from .quantum import ProductState, ProjectiveMeasurement, PureState

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}
_VECTOR = {"type": "array", "items": _COMPLEX, "minItems": 1}
_PROBABILITIES = {"type": "array", "items": {"type": "number"}}

MODEL_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "ontolab finite ontological model",
    "type": "object",
    "required": ["schema_version", "dimension", "ontic_points", "preparations"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"type": "string", "enum": [SCHEMA_VERSION]},
        "dimension": {"type": "integer", "minimum": 1},
        "ontic_points": {
            "type": "array",
            "items": {"type": "string"},
            "minItems": 1,
            "uniqueItems": True,
        },
        "factors": {
            "type": "object",
            "required": ["points"],
            "additionalProperties": False,
            "properties": {
                "points": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "string"},
                        "minItems": 1,
                    },
                    "minItems": 2,
                    "maxItems": 2,
                }
            },
        },
        "preparations": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["label", "state", "mu"],
                "additionalProperties": False,
                "properties": {
                    "label": {"type": "string", "minLength": 1},
                    "state": _VECTOR,
                    "mu": _PROBABILITIES,
                    "product": {
                        "type": "object",
                        "required": ["factor1", "factor2"],
                        "additionalProperties": False,
                        "properties": {"factor1": _VECTOR, "factor2": _VECTOR},
                    },
                    "factor_labels": {
                        "type": "array",
                        "items": {"type": "string"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            },
        },
        "responses": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["basis", "xi"],
                "additionalProperties": False,
                "properties": {
                    "basis": {"type": "array", "items": _VECTOR, "minItems": 1},
                    "xi": {"type": "array", "items": _PROBABILITIES, "minItems": 1},
                },
            },
        },
    },
}

SCHEMA_HELP = """\
model file (JSON):
  schema_version  "1.0"
  dimension       Hilbert-space dimension d
  ontic_points    list of unique point identifiers
  preparations    [{label, state: d x [re, im], mu: one weight per point,
                    product?: {factor1, factor2}, factor_labels?: [l1, l2]}]
  responses       [{basis: d vectors of d x [re, im], xi: d rows of one
                    probability per point}]   (optional)
  factors         {points: [[...], [...]]}   (optional, product spaces)
"""


def json_path(parts: Iterable[Union[str, int]]) -> str:
    "Render a JSON location as preparations[1].mu"
    out = ""
    for part in parts:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += f".{part}" if out else str(part)
    return out or "<root>"


@contextmanager
def _at(path: str):
    try:
        yield
    except InvariantViolation as e:
        raise e.at(path) from None


def _state(pairs, path: str, dim: Optional[int] = None) -> PureState:
    if dim is not None and len(pairs) != dim:
        raise InvariantViolation(path, f"{len(pairs)} amplitudes for dimension {dim}")
    amps = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    with _at(path):
        return PureState(amps)


def _pairs(state: PureState) -> list:
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def validate_document(doc: Any):
    """
    Check a parsed document against MODEL_SCHEMA.

    Raises
    ------
    SchemaError
        naming the JSON path of the first offending field
    """
    validator = jsonschema.Draft7Validator(MODEL_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        raise SchemaError(f"{json_path(first.absolute_path)}: {first.message}")


def model_from_dict(doc: dict) -> FiniteOntologicalModel:
    """
    Build a validated model from a parsed model document.

    Raises
    ------
    SchemaError, InvariantViolation
    """
    validate_document(doc)
    dim = doc["dimension"]
    points = doc["ontic_points"]

    factors = None
    if "factors" in doc:
        with _at("factors"):
            first, second = (FiniteOnticSpace(tuple(p)) for p in doc["factors"]["points"])
        factors = (first, second)
    with _at("ontic_points"):
        space = FiniteOnticSpace(tuple(points), factors=factors)

    preparations = []
    for i, entry in enumerate(doc["preparations"]):
        path = f"preparations[{i}]"
        state = _state(entry["state"], f"{path}.state", dim)
        product = None
        if "product" in entry:
            f1 = _state(entry["product"]["factor1"], f"{path}.product.factor1")
            f2 = _state(entry["product"]["factor2"], f"{path}.product.factor2")
            with _at(f"{path}.product"):
                product = ProductState(f1, f2)
        if len(entry["mu"]) != space.size:
            raise InvariantViolation(
                f"{path}.mu", f"{len(entry['mu'])} weights for {space.size} ontic points"
            )
        with _at(path):
            preparations.append(
                PreparationMeasure(
                    label=entry["label"],
                    quantum_state=state,
                    weights=np.array(entry["mu"], dtype=np.float64),
                    product=product,
                    factor_labels=entry.get("factor_labels"),
                )
            )

    responses = []
    for i, entry in enumerate(doc.get("responses", [])):
        path = f"responses[{i}]"
        vectors = [
            _state(v, f"{path}.basis[{k}]", dim) for k, v in enumerate(entry["basis"])
        ]
        with _at(f"{path}.basis"):
            measurement = ProjectiveMeasurement(tuple(vectors))
        rows = entry["xi"]
        if any(len(row) != space.size for row in rows):
            raise InvariantViolation(
                f"{path}.xi", f"every outcome row needs {space.size} entries"
            )
        with _at(path):
            responses.append(ResponseTable(measurement, np.array(rows, dtype=np.float64)))

    return FiniteOntologicalModel(space, tuple(preparations), tuple(responses))


def model_to_dict(model: FiniteOntologicalModel) -> dict:
    "Inverse of model_from_dict; every float is written at full precision"
    doc = {
        "schema_version": SCHEMA_VERSION,
        "dimension": model.dimension,
        "ontic_points": list(model.space.points),
        "preparations": [],
    }
    if model.space.factors is not None:
        doc["factors"] = {"points": [list(f.points) for f in model.space.factors]}
    for p in model.preparations:
        entry = {
            "label": p.label,
            "state": _pairs(p.quantum_state),
            "mu": [float(w) for w in p.weights],
        }
        if p.product is not None:
            entry["product"] = {
                "factor1": _pairs(p.product.factor1),
                "factor2": _pairs(p.product.factor2),
            }
        if p.factor_labels is not None:
            entry["factor_labels"] = list(p.factor_labels)
        doc["preparations"].append(entry)
    if model.responses:
        doc["responses"] = [
            {
                "basis": [_pairs(b) for b in r.measurement.basis],
                "xi": r.xi.tolist(),
            }
            for r in model.responses
        ]
    return doc


def load_model(path) -> FiniteOntologicalModel:
    """
    Read and validate a model file.

    Parameters
    ----------
    path : str or Path

    Returns
    -------
    FiniteOntologicalModel

    Raises
    ------
    FileNotFoundError
    ParseError
        if the file is not UTF-8 JSON, with line and column
    SchemaError
        if the document does not follow MODEL_SCHEMA
    InvariantViolation
        if a state, measure or response table is invalid, prefixed with the JSON
        path of the offending entry
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"{path}: not UTF-8 text (byte {e.start}: {e.reason})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    model = model_from_dict(doc)
    logger.debug(
        "loaded %s: %d points, %d preparations, %d responses",
        path,
        model.space.size,
        len(model.preparations),
        len(model.responses),
    )
    return model


def save_model(model: FiniteOntologicalModel, path):
    Path(path).write_text(dumps(model_to_dict(model)))


def _plain(obj):
    "Convert numpy values to JSON types, non-finite floats to None"
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


def dumps(obj) -> str:
    "Stable JSON text: sorted keys, two-space indentation, trailing newline"
    return json.dumps(_plain(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def dump_report(obj, path=None, stream=None):
    """
    Write a report as JSON to path, or to stream when no path is given.
    """
    text = dumps(obj)
    if path is not None:
        Path(path).write_text(text)
        logger.info("report written to %s", path)
    else:
        (stream or sys.stdout).write(text)
