"""
The PBR four-preparation experiment.

Two qubits are prepared in |0⊗0⟩, |0⊗+⟩, |+⊗0⟩ or |+⊗+⟩ and measured in an
entangled basis in which each preparation has one outcome of probability zero.
Ontic points shared by all four preparation measures make that impossible: at
such a point the four forbidden-outcome responses sum to one, so the model must
give some preparation at least Δ/4 probability for its forbidden outcome, where
Δ is the common overlap mass.
"""

import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Tuple

import numpy as np

from .exceptions import ConstructionInvalid, MissingPreparation, ScenarioMismatch
from .ontology import (
    DEFAULT_EPS,
    DEFAULT_PRODUCT_CAP,
    FiniteOntologicalModel,
    ResponseTable,
    pip_compose,
)
from .quantum import (
    NORM_TOL,
    ProductState,
    ProjectiveMeasurement,
    ket0,
    ket_plus,
    orthogonality_table,
    pbr_entangled_basis,
    pbr_preparations,
    ray_equal,
)
from .utils import common_overlap_partials, common_support_mask

logger = logging.getLogger(__name__)

DEFAULT_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class PbrScenario:
    """
    Preparations, measurement and forbidden outcomes of the PBR experiment.

    born_table[i, k] is the Born probability of outcome k for preparation i.
    """

    preparations: Tuple[Tuple[str, ProductState], ...]
    basis: ProjectiveMeasurement
    forbidden_outcome: Mapping[str, int]
    born_table: np.ndarray


@dataclass(frozen=True, eq=False)
class PbrReport:
    """
    Exclusion witness of a composite model.

    common_overlap_mass is Δ = Σ_λ min_i μ_i(λ) over the four preparations and
    min_deviation_bound = Δ/4 the smallest forbidden-outcome probability some
    preparation must predict. per_prep_residuals (predicted − Born, one row per
    preparation) and forbidden_probabilities are only filled when the composite
    carries a response table for the PBR basis.
    """

    common_overlap_mass: float
    witness_points: Tuple[str, ...]
    min_deviation_bound: float
    preparation_labels: Tuple[str, ...]
    eps: float
    per_prep_residuals: Optional[np.ndarray] = None
    forbidden_probabilities: Optional[Mapping[str, float]] = None

    def to_dict(self) -> dict:
        return {
            "common_overlap_mass": self.common_overlap_mass,
            "witness_points": list(self.witness_points),
            "min_deviation_bound": self.min_deviation_bound,
            "preparation_labels": list(self.preparation_labels),
            "eps": self.eps,
            "per_prep_residuals": (
                None if self.per_prep_residuals is None else self.per_prep_residuals.tolist()
            ),
            "forbidden_probabilities": (
                None
                if self.forbidden_probabilities is None
                else dict(self.forbidden_probabilities)
            ),
        }


def build_scenario() -> PbrScenario:
    """
    Assemble the PBR scenario.

    The forbidden outcome of each preparation is read off the Born probabilities,
    not hard-coded.

    Raises
    ------
    ConstructionInvalid
        if a preparation does not have exactly one outcome of probability < 1e-12
    """
    basis = pbr_entangled_basis()
    preparations = pbr_preparations()
    table = orthogonality_table(basis, [p.joint for _, p in preparations])
    forbidden = {}
    for (label, _), row in zip(preparations, table):
        zeros = np.flatnonzero(row < NORM_TOL)
        if zeros.size != 1:
            raise ConstructionInvalid(
                f"preparation {label} has {zeros.size} zero-probability outcomes"
            )
        forbidden[label] = int(zeros[0])
    table.setflags(write=False)
    return PbrScenario(preparations, basis, MappingProxyType(forbidden), table)


def common_overlap_mass(
    weights: np.ndarray, chunk: int = DEFAULT_CHUNK, eps: float = DEFAULT_EPS
) -> float:
    """
    Σ_λ min_i μ_i(λ) over the rows of weights, restricted to the points every
    row supports (weight > eps). Δ > 0 exactly when some such point exists.

    The sum is accumulated over ranges of chunk ontic points, evaluated in
    parallel and added in range order.
    """
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    partials = common_overlap_partials(weights, chunk, eps)
    return float(np.sum(partials))


def _matches_basis(table: ResponseTable, basis: ProjectiveMeasurement) -> bool:
    if table.measurement.dim != basis.dim:
        return False
    return all(ray_equal(a, b) for a, b in zip(table.measurement.basis, basis.basis))


def exclusion_witness(
    composite: FiniteOntologicalModel,
    scenario: PbrScenario,
    eps: float = DEFAULT_EPS,
    chunk: int = DEFAULT_CHUNK,
) -> PbrReport:
    """
    Common overlap of the four PBR preparations in a composite model.

    Composite preparations are matched to the scenario by their quantum state
    (ray equality), not by label.

    Parameters
    ----------
    composite : FiniteOntologicalModel on the two-qubit system
    scenario : PbrScenario
    eps : float
        support threshold; Δ sums the witness points only
    chunk : int
        ontic points per partial sum of Δ

    Returns
    -------
    PbrReport

    Raises
    ------
    ScenarioMismatch
        if a scenario preparation has no counterpart in the composite
    """
    found = []
    missing = []
    for label, prod in scenario.preparations:
        match = next(
            (
                p
                for p in composite.preparations
                if p.quantum_state.dim == prod.joint.dim
                and ray_equal(p.quantum_state, prod.joint)
            ),
            None,
        )
        if match is None:
            missing.append(label)
        else:
            found.append(match)
    if missing:
        raise ScenarioMismatch(f"composite has no preparation for {missing}")

    weights = np.vstack([p.weights for p in found])
    delta = min(max(common_overlap_mass(weights, chunk, eps), 0.0), 1.0)
    mask = common_support_mask(weights, eps)
    witnesses = tuple(composite.space.points[i] for i in np.flatnonzero(mask))
    bound = delta / 4.0 if delta > 0.0 else 0.0

    residuals = None
    forbidden = None
    table = next((t for t in composite.responses if _matches_basis(t, scenario.basis)), None)
    if table is not None:
        predicted = np.array([table.xi @ p.weights for p in found])
        residuals = predicted - scenario.born_table
        residuals.setflags(write=False)
        forbidden = MappingProxyType(
            {
                p.label: float(predicted[i, scenario.forbidden_outcome[label]])
                for i, (p, (label, _)) in enumerate(zip(found, scenario.preparations))
            }
        )
    elif composite.responses:
        logger.warning("composite has response tables but none for the PBR basis")

    logger.info("PBR common overlap %.6g over %d witness points", delta, len(witnesses))
    return PbrReport(
        common_overlap_mass=delta,
        witness_points=witnesses,
        min_deviation_bound=bound,
        preparation_labels=tuple(p.label for p in found),
        eps=eps,
        per_prep_residuals=residuals,
        forbidden_probabilities=forbidden,
    )


def _find_label(model: FiniteOntologicalModel, state, name: str) -> str:
    for p in model.preparations:
        if p.quantum_state.dim == state.dim and ray_equal(p.quantum_state, state):
            return p.label
    raise MissingPreparation(f"the model has no preparation for {name}")


def run_pbr_experiment(
    single_model: FiniteOntologicalModel,
    eps: float = DEFAULT_EPS,
    cap: int = DEFAULT_PRODUCT_CAP,
) -> PbrReport:
    """
    Compose a single-qubit model with itself under preparation independence and
    compute the PBR exclusion witness of the composite.

    Parameters
    ----------
    single_model : FiniteOntologicalModel with preparations for |0⟩ and |+⟩
    eps : float
        support threshold
    cap : int
        largest allowed composite ontic space

    Raises
    ------
    MissingPreparation
        if the model is not a qubit model or lacks |0⟩ or |+⟩
    """
    if single_model.dimension != 2:
        raise MissingPreparation(
            f"PBR needs a qubit model, got dimension {single_model.dimension}"
        )
    labels = [
        _find_label(single_model, ket0(), "|0>"),
        _find_label(single_model, ket_plus(), "|+>"),
    ]
    reduced = single_model.restrict(labels)
    composite = pip_compose(reduced, reduced, cap)
    return exclusion_witness(composite, build_scenario(), eps)
