"""
Finite ontological models.

An ontological model assigns to every preparation a probability measure μ_ψ over
a finite ontic space Λ, and to every measurement a response table ξ_k(λ). The
quantum prediction P(k|ψ) is recovered as Σ_λ μ_ψ(λ) ξ_k(λ).
"""

import enum
import logging
from dataclasses import dataclass, replace
from typing import FrozenSet, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .exceptions import (
    DimensionMismatch,
    DomainError,
    InvariantViolation,
    SizeOverflow,
    UnknownPreparation,
    UnknownResponse,
)
from .quantum import (
    NORM_TOL,
    ProductState,
    ProjectiveMeasurement,
    PureState,
    born_probabilities,
    tensor,
)
from .utils import pairwise_min_overlap

logger = logging.getLogger(__name__)

DEFAULT_EPS = 1e-12
DEFAULT_PRODUCT_CAP = 10**6


class Onticity(str, enum.Enum):
    PSI_ONTIC = "PSI_ONTIC"
    PSI_EPISTEMIC = "PSI_EPISTEMIC"


def _probability_vector(values, field, what) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvariantViolation(field, f"{what} must be a flat vector")
    if not np.all(np.isfinite(arr)):
        raise InvariantViolation(field, f"{what} contains non-finite entries")
    if np.any(arr < 0.0):
        raise InvariantViolation(field, f"{what} has negative entries (min {arr.min():.3g})")
    total = arr.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise InvariantViolation(
            field, f"{what} sums to {total!r}, not 1 within {NORM_TOL}"
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteOnticSpace:
    """
    Ordered, finite set of ontic states.

    Parameters
    ----------
    points : sequence of str
        unique identifiers of the ontic states
    factors : pair of FiniteOnticSpace, optional
        set when the space is the Cartesian product of two factor spaces; point
        (i₁, i₂) then sits at index i₁ * len(factors[1]) + i₂
    """

    points: Tuple[str, ...]
    factors: Optional[Tuple["FiniteOnticSpace", "FiniteOnticSpace"]] = None

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise InvariantViolation("points", "the ontic space is empty")
        if any(not isinstance(p, str) for p in points):
            raise InvariantViolation("points", "point identifiers must be strings")
        if len(set(points)) != len(points):
            dupes = sorted({p for p in points if points.count(p) > 1})
            raise InvariantViolation("points", f"duplicate identifiers {dupes}")
        object.__setattr__(self, "points", points)
        if self.factors is not None:
            first, second = self.factors
            if first.size * second.size != len(points):
                raise InvariantViolation(
                    "factors",
                    f"{first.size} x {second.size} factor points cannot index "
                    f"{len(points)} composite points",
                )
            object.__setattr__(self, "factors", (first, second))
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(points)})

    def __len__(self):
        return len(self.points)

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, point: str) -> int:
        return self._index[point]

    def product(self, other: "FiniteOnticSpace") -> "FiniteOnticSpace":
        "Cartesian product Λ₁ × Λ₂ with composite identifiers 'a,b'"
        points = tuple(f"{a},{b}" for a in self.points for b in other.points)
        return FiniteOnticSpace(points, factors=(self, other))


@dataclass(frozen=True, eq=False)
class PreparationMeasure:
    """
    Epistemic distribution μ_ψ of one preparation.

    product and factor_labels are only set for product preparations
    |ψ₁⟩ ⊗ |ψ₂⟩ on a composite system.
    """

    label: str
    quantum_state: PureState
    weights: np.ndarray
    product: Optional[ProductState] = None
    factor_labels: Optional[Tuple[str, str]] = None

    def __post_init__(self):
        weights = _probability_vector(
            self.weights, "weights", f"mu of preparation {self.label!r}"
        )
        object.__setattr__(self, "weights", weights)
        if self.product is not None and not self.product.joint.ray_equal(
            self.quantum_state
        ):
            raise InvariantViolation(
                "product",
                f"declared product of preparation {self.label!r} differs from its state",
            )
        if self.factor_labels is not None:
            object.__setattr__(self, "factor_labels", tuple(self.factor_labels))


@dataclass(frozen=True, eq=False)
class ResponseTable:
    """
    Response functions ξ_k(λ) of one projective measurement.

    xi[k][λ] is the probability of outcome k given ontic state λ.
    """

    measurement: ProjectiveMeasurement
    xi: np.ndarray

    def __post_init__(self):
        xi = np.array(self.xi, dtype=np.float64)
        if xi.ndim != 2 or xi.shape[0] != self.measurement.dim:
            raise InvariantViolation(
                "xi",
                f"expected {self.measurement.dim} outcome rows, got shape {xi.shape}",
            )
        if not np.all(np.isfinite(xi)) or xi.min() < 0.0 or xi.max() > 1.0:
            raise InvariantViolation("xi", "response probabilities must lie in [0, 1]")
        col_err = np.abs(xi.sum(axis=0) - 1.0)
        if col_err.max() > NORM_TOL:
            raise InvariantViolation(
                "xi",
                f"outcome probabilities at ontic point {int(np.argmax(col_err))} "
                f"do not sum to 1",
            )
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)


@dataclass(frozen=True, eq=False)
class FiniteOntologicalModel:
    "Ontic space with its preparation measures and response tables"

    space: FiniteOnticSpace
    preparations: Tuple[PreparationMeasure, ...]
    responses: Tuple[ResponseTable, ...] = ()

    def __post_init__(self):
        preparations = tuple(self.preparations)
        responses = tuple(self.responses)
        n = self.space.size
        labels = [p.label for p in preparations]
        if len(set(labels)) != len(labels):
            raise InvariantViolation("preparations", "preparation labels must be unique")
        dims = {p.quantum_state.dim for p in preparations}
        dims.update(r.measurement.dim for r in responses)
        if len(dims) > 1:
            raise InvariantViolation(
                "dimension", f"states and measurements disagree on dimension: {sorted(dims)}"
            )
        for i, p in enumerate(preparations):
            if p.weights.size != n:
                raise InvariantViolation(
                    f"preparations[{i}].weights",
                    f"{p.weights.size} weights for {n} ontic points",
                )
        for i, r in enumerate(responses):
            if r.xi.shape[1] != n:
                raise InvariantViolation(
                    f"responses[{i}].xi", f"{r.xi.shape[1]} columns for {n} ontic points"
                )
        object.__setattr__(self, "preparations", preparations)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "_by_label", {p.label: p for p in preparations})

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(p.label for p in self.preparations)

    @property
    def dimension(self) -> Optional[int]:
        if self.preparations:
            return self.preparations[0].quantum_state.dim
        if self.responses:
            return self.responses[0].measurement.dim
        return None

    @property
    def weight_matrix(self) -> np.ndarray:
        "Preparation weights stacked into a (k, |Λ|) array"
        if not self.preparations:
            return np.zeros((0, self.space.size))
        return np.vstack([p.weights for p in self.preparations])

    def preparation(self, label: str) -> PreparationMeasure:
        try:
            return self._by_label[label]
        except KeyError:
            raise UnknownPreparation(label) from None

    def with_responses(self, responses: Sequence[ResponseTable]) -> "FiniteOntologicalModel":
        return replace(self, responses=tuple(responses))

    def restrict(self, labels: Sequence[str]) -> "FiniteOntologicalModel":
        "Model keeping only the named preparations, in the given order"
        return replace(self, preparations=tuple(self.preparation(l) for l in labels))


@dataclass(frozen=True, eq=False)
class OverlapReport:
    """
    Support and overlap analysis of a model's preparations.

    pair_overlaps[i, j] = Σ_λ min(μ_i(λ), μ_j(λ)) and total_variation[i, j] the
    distance ½Σ|μ_i − μ_j|; support_sets[i] are the
    indices with weight > eps; offending_pairs lists distinct-ray pairs whose
    supports intersect, with their overlap mass.
    """

    labels: Tuple[str, ...]
    pair_overlaps: np.ndarray
    total_variation: np.ndarray
    support_sets: Tuple[FrozenSet[int], ...]
    classification: Onticity
    eps: float
    offending_pairs: Tuple[Tuple[str, str, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "pair_overlaps": self.pair_overlaps.tolist(),
            "total_variation": self.total_variation.tolist(),
            "support_sets": [sorted(s) for s in self.support_sets],
            "classification": self.classification.value,
            "eps": self.eps,
            "offending_pairs": [
                {"pair": [a, b], "overlap": m} for a, b, m in self.offending_pairs
            ],
        }


def total_variation_distance(p: npt.ArrayLike, q: npt.ArrayLike) -> float:
    """
    Total variation distance ½ Σ|p − q| between two probability vectors.

    For normalized vectors this equals 1 − Σ min(p, q).
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise DimensionMismatch(f"shapes {p.shape} and {q.shape} differ")
    return 0.5 * float(np.sum(np.abs(p - q)))


def predicted_distribution(
    model: FiniteOntologicalModel, prep: str, response_index: int
) -> np.ndarray:
    """
    Outcome distribution P(k) = Σ_λ μ(λ) ξ_k(λ) predicted by the model.

    Raises
    ------
    UnknownPreparation, UnknownResponse
    """
    measure = model.preparation(prep)
    if not 0 <= response_index < len(model.responses):
        raise UnknownResponse(
            f"response {response_index} out of range ({len(model.responses)} tables)"
        )
    return model.responses[response_index].xi @ measure.weights


def born_residual(model: FiniteOntologicalModel) -> float:
    """
    Largest deviation |P_model(k) − P_Born(k)| over all preparations, declared
    measurements and outcomes. Zero when there is nothing to compare.
    """
    residual = 0.0
    for r_idx, table in enumerate(model.responses):
        for measure in model.preparations:
            predicted = table.xi @ measure.weights
            born = born_probabilities(measure.quantum_state, table.measurement)
            residual = max(residual, float(np.max(np.abs(predicted - born))))
    logger.debug("born residual %.3g over %d tables", residual, len(model.responses))
    return residual


def support(measure: PreparationMeasure, eps: float = DEFAULT_EPS) -> FrozenSet[int]:
    "Indices of the ontic points carrying weight > eps"
    if eps < 0:
        raise DomainError(f"support threshold must be non-negative, got {eps}")
    return frozenset(int(i) for i in np.flatnonzero(measure.weights > eps))


def ray_classes(model: FiniteOntologicalModel) -> List[int]:
    """
    For each preparation, the index of the first preparation with a ray-equal state.
    Preparations sharing a class describe the same quantum state.
    """
    classes = []
    for i, p in enumerate(model.preparations):
        for j in range(i):
            if classes[j] == j and model.preparations[j].quantum_state.ray_equal(
                p.quantum_state
            ):
                classes.append(j)
                break
        else:
            classes.append(i)
    return classes


def overlap_matrix(model: FiniteOntologicalModel, eps: float = DEFAULT_EPS) -> OverlapReport:
    """
    Pairwise overlaps and the ψ-ontic / ψ-epistemic classification of a model.

    The model is PSI_ONTIC iff the supports (at threshold eps) of every pair of
    preparations with distinct quantum-state rays are disjoint. Pairs of
    ray-equal preparations are not compared.

    Parameters
    ----------
    model : FiniteOntologicalModel with at least one preparation
    eps : float
        support threshold

    Returns
    -------
    OverlapReport
    """
    if not model.preparations:
        raise InvariantViolation("preparations", "overlap analysis needs a preparation")
    weights = np.ascontiguousarray(model.weight_matrix)
    overlaps = np.minimum(pairwise_min_overlap(weights), 1.0)
    np.fill_diagonal(overlaps, 1.0)
    k = len(model.preparations)
    distances = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            distances[i, j] = distances[j, i] = total_variation_distance(
                weights[i], weights[j]
            )
    supports = tuple(support(p, eps) for p in model.preparations)
    classes = ray_classes(model)

    offending = []
    for i in range(len(supports)):
        for j in range(i + 1, len(supports)):
            if classes[i] == classes[j]:
                continue
            if supports[i] & supports[j]:
                offending.append((model.labels[i], model.labels[j], float(overlaps[i, j])))
    classification = Onticity.PSI_EPISTEMIC if offending else Onticity.PSI_ONTIC
    overlaps.setflags(write=False)
    distances.setflags(write=False)
    logger.info(
        "%d preparations over %d ontic points: %s",
        len(supports),
        model.space.size,
        classification.value,
    )
    return OverlapReport(
        labels=model.labels,
        pair_overlaps=overlaps,
        total_variation=distances,
        support_sets=supports,
        classification=classification,
        eps=eps,
        offending_pairs=tuple(offending),
    )


def pip_compose(
    m1: FiniteOntologicalModel,
    m2: FiniteOntologicalModel,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> FiniteOntologicalModel:
    """
    Composite model under the Preparation Independence Postulate.

    Every pair of preparations (p₁, p₂) becomes the product preparation labelled
    "p₁,p₂" with μ(λ₁, λ₂) = μ₁(λ₁) μ₂(λ₂) and quantum state |ψ₁⟩ ⊗ |ψ₂⟩ on the
    Cartesian product space, renormalized to sum to 1. The composite carries no
    response tables.

    Raises
    ------
    SizeOverflow
        if |Λ₁| * |Λ₂| exceeds cap
    """
    size = m1.space.size * m2.space.size
    if size > cap:
        raise SizeOverflow(f"product space of {size} points exceeds the cap of {cap}")
    space = m1.space.product(m2.space)
    preparations = []
    for p1 in m1.preparations:
        for p2 in m2.preparations:
            prod = tensor(p1.quantum_state, p2.quantum_state)
            # factors sum to 1 only within NORM_TOL, their product within twice that
            mu = np.outer(p1.weights, p2.weights).ravel()
            mu /= mu.sum()
            preparations.append(
                PreparationMeasure(
                    label=f"{p1.label},{p2.label}",
                    quantum_state=prod.joint,
                    weights=mu,
                    product=prod,
                    factor_labels=(p1.label, p2.label),
                )
            )
    logger.debug(
        "composed %d x %d preparations over %d ontic points",
        len(m1.preparations),
        len(m2.preparations),
        size,
    )
    return FiniteOntologicalModel(space, tuple(preparations))


def marginalize(
    weights: npt.ArrayLike,
    space1: FiniteOnticSpace,
    space2: FiniteOnticSpace,
    subsystem: int,
) -> np.ndarray:
    """
    Marginal of a measure on Λ₁ × Λ₂ (row-major) over one factor.

    Parameters
    ----------
    weights : array_like of length |Λ₁| * |Λ₂|
    space1, space2 : factor spaces
    subsystem : 1 or 2, the factor to keep

    Returns
    -------
    marginal probability vector over the kept factor
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size != space1.size * space2.size:
        raise DimensionMismatch(
            f"{weights.size} weights for a {space1.size} x {space2.size} product space"
        )
    if subsystem not in (1, 2):
        raise DomainError(f"subsystem must be 1 or 2, got {subsystem}")
    grid = weights.reshape(space1.size, space2.size)
    return grid.sum(axis=1) if subsystem == 1 else grid.sum(axis=0)
