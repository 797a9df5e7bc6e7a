"""
Delta-function representation of ψ-ontic models.

When the supports of distinct-state preparations are pairwise disjoint, every
ontic point can be labelled by the one quantum state it is compatible with. The
label map f: Λ → Ψ splits the ontic state into λ = (λ_ψ, η) with λ_ψ = f(λ) and
η the position inside the fiber f⁻¹({ψ}), and every preparation measure takes the
form μ_ψ(λ_ψ, η) = δ(λ_ψ − ψ) ν_ψ(η).

On composite models over a Cartesian product space, the label of a product
preparation splits into the labels of its tensor factors, and the subsystem
marginals of those labels must be point masses.
"""

import enum
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from .exceptions import (
    InconsistentLabelMap,
    InvariantViolation,
    NotProductPreparation,
    PsiEpistemicInput,
)
from .ontology import (
    DEFAULT_EPS,
    FiniteOnticSpace,
    FiniteOntologicalModel,
    Onticity,
    overlap_matrix,
    ray_classes,
)
from .quantum import NORM_TOL, PureState, ray_equal, tensor

logger = logging.getLogger(__name__)


class SubsystemVerdict(str, enum.Enum):
    ONTIC = "ONTIC"
    VIOLATION = "VIOLATION"


@dataclass(frozen=True, eq=False)
class StateLabelMap:
    """
    The label map f: Λ → Ψ, with quantum states named by preparation labels.

    Parameters
    ----------
    assignment : mapping of ontic point -> preparation label
    default_label : label given to points outside every support (the arbitrary ψ₀)
    """

    assignment: Mapping[str, str]
    default_label: Optional[str]

    def __post_init__(self):
        object.__setattr__(self, "assignment", MappingProxyType(dict(self.assignment)))

    def __call__(self, point: str) -> Optional[str]:
        return self.assignment.get(point, self.default_label)

    def to_dict(self) -> dict:
        return {"assignment": dict(self.assignment), "default_label": self.default_label}


@dataclass(frozen=True, eq=False)
class FiberDecomposition:
    """
    Fibers f⁻¹({ψ}) and conditional measures ν_ψ of every preparation.

    The residual coordinate η of a point is its position in the fiber's point list,
    so conditional_measures[label][η] = ν_ψ(η).
    """

    fibers: Mapping[str, Tuple[str, ...]]
    conditional_measures: Mapping[str, np.ndarray]
    default_label: Optional[str] = None

    def __post_init__(self):
        fibers = {k: tuple(v) for k, v in self.fibers.items()}
        measures = {}
        for label, nu in self.conditional_measures.items():
            nu = np.array(nu, dtype=np.float64)
            if label not in fibers or nu.size != len(fibers[label]):
                raise InvariantViolation(
                    f"nu.{label}", "conditional measure does not match its fiber"
                )
            if abs(nu.sum() - 1.0) > NORM_TOL:
                raise InvariantViolation(f"nu.{label}", f"sums to {nu.sum()!r}, not 1")
            nu.setflags(write=False)
            measures[label] = nu
        object.__setattr__(self, "fibers", MappingProxyType(fibers))
        object.__setattr__(self, "conditional_measures", MappingProxyType(measures))

    def reconstruct(self, label: str, space: FiniteOnticSpace) -> np.ndarray:
        "[λ ∈ fiber] ν_ψ(η(λ)) as a weight vector over the whole space"
        out = np.zeros(space.size)
        idx = [space.index(p) for p in self.fibers[label]]
        out[idx] = self.conditional_measures[label]
        return out

    def to_dict(self) -> dict:
        return {
            "fibers": {k: list(v) for k, v in self.fibers.items()},
            "nu": {k: v.tolist() for k, v in self.conditional_measures.items()},
            "default_label": self.default_label,
        }


@dataclass(frozen=True)
class DeltaFormCheck:
    holds: bool
    max_error: float
    errors: Mapping[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "max_error": self.max_error, "errors": dict(self.errors)}


@dataclass(frozen=True)
class LabelCoordinates:
    "Subsystem labels (λ_ψ1, λ_ψ2) of one product preparation"

    first: str
    second: str
    first_state: PureState
    second_state: PureState


@dataclass(frozen=True)
class SubsystemOnticityVerdict:
    """
    Outcome of the subsystem-onticity check for one subsystem.

    witness holds two distinct subsystem labels that occur with positive
    probability under the single preparation named in preparation.
    """

    subsystem: int
    verdict: SubsystemVerdict
    witness: Optional[Tuple[str, str]] = None
    preparation: Optional[str] = None
    marginals: Mapping[str, Mapping[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        if (self.witness is None) != (self.verdict is SubsystemVerdict.ONTIC):
            raise InvariantViolation(
                "witness", "a witness is present iff the verdict is VIOLATION"
            )

    def to_dict(self) -> dict:
        return {
            "subsystem": self.subsystem,
            "verdict": self.verdict.value,
            "witness": list(self.witness) if self.witness else None,
            "preparation": self.preparation,
            "marginals": {k: dict(v) for k, v in self.marginals.items()},
        }


def construct_label_map(
    model: FiniteOntologicalModel, eps: float = DEFAULT_EPS
) -> StateLabelMap:
    """
    Build the label map f of a ψ-ontic model.

    Every point in the support of a preparation gets that preparation's label;
    ray-equal preparations share the label of the first of them. Points outside
    every support get the label of the first preparation.

    Parameters
    ----------
    model : FiniteOntologicalModel
    eps : float
        support threshold

    Returns
    -------
    StateLabelMap with μ_ψ(f⁻¹({ψ})) = 1 for every preparation

    Raises
    ------
    PsiEpistemicInput
        if two distinct-ray preparations have overlapping supports
    """
    report = overlap_matrix(model, eps)
    if report.classification is Onticity.PSI_EPISTEMIC:
        first, second, mass = report.offending_pairs[0]
        raise PsiEpistemicInput((first, second), mass)

    labels = model.labels
    classes = ray_classes(model)
    default_label = labels[0]
    assignment = {}
    for i, supp in enumerate(report.support_sets):
        for idx in supp:
            assignment[model.space.points[idx]] = labels[classes[i]]
    unassigned = 0
    for point in model.space.points:
        if point not in assignment:
            assignment[point] = default_label
            unassigned += 1
    label_map = StateLabelMap(assignment, default_label)

    for i, p in enumerate(model.preparations):
        mass = sum(
            w
            for pt, w in zip(model.space.points, p.weights)
            if label_map(pt) == labels[classes[i]]
        )
        if abs(mass - 1.0) > NORM_TOL:
            logger.warning(
                "preparation %r keeps %.3g of its mass below the support threshold",
                p.label,
                1.0 - mass,
            )
    logger.debug(
        "label map built, %d points carry the default label %r", unassigned, default_label
    )
    return label_map


def _class_members(model: FiniteOntologicalModel) -> Dict[str, set]:
    "For each preparation label, the labels of all ray-equal preparations"
    classes = ray_classes(model)
    labels = model.labels
    return {
        labels[i]: {labels[j] for j in range(len(labels)) if classes[j] == classes[i]}
        for i in range(len(labels))
    }


def _check_labels(model: FiniteOntologicalModel, label_map: StateLabelMap):
    known = set(model.labels)
    for point in model.space.points:
        if label_map(point) not in known:
            raise InconsistentLabelMap(
                f"point {point!r} carries label {label_map(point)!r}, "
                f"which is not a preparation of the model"
            )


def fiber_decomposition(
    model: FiniteOntologicalModel, label_map: StateLabelMap
) -> FiberDecomposition:
    """
    Fibers f⁻¹({ψ}) and normalized restrictions ν_ψ of every preparation measure.

    Raises
    ------
    InconsistentLabelMap
        if the label map names unknown preparations or a preparation puts no
        mass on its own fiber
    """
    _check_labels(model, label_map)
    members = _class_members(model)
    fibers = {}
    measures = {}
    for p in model.preparations:
        idx = [
            i for i, pt in enumerate(model.space.points) if label_map(pt) in members[p.label]
        ]
        mass = float(p.weights[idx].sum())
        if mass <= 0.0:
            raise InconsistentLabelMap(f"preparation {p.label!r} puts no mass on its fiber")
        fibers[p.label] = tuple(model.space.points[i] for i in idx)
        measures[p.label] = p.weights[idx] / mass
    return FiberDecomposition(fibers, measures, label_map.default_label)


def verify_delta_form(
    model: FiniteOntologicalModel, decomposition: FiberDecomposition
) -> DeltaFormCheck:
    """
    Check μ_ψ(λ) = [λ ∈ f⁻¹({ψ})] ν_ψ(η) for every preparation.

    The error of a preparation is the larger of its mass outside the fiber and the
    largest pointwise reconstruction error. The form holds when every error is
    below 1e-12; a model without preparations holds vacuously.
    """
    errors = {}
    for p in model.preparations:
        if p.label not in decomposition.fibers:
            errors[p.label] = 1.0
            continue
        recon = decomposition.reconstruct(p.label, model.space)
        inside = np.zeros(model.space.size, dtype=bool)
        inside[[model.space.index(pt) for pt in decomposition.fibers[p.label]]] = True
        outside_mass = float(p.weights[~inside].sum())
        errors[p.label] = max(float(np.max(np.abs(recon - p.weights))), outside_mass)
    max_error = max(errors.values(), default=0.0)
    return DeltaFormCheck(max_error <= NORM_TOL, max_error, MappingProxyType(errors))


def _require_product_structure(composite: FiniteOntologicalModel):
    if composite.space.factors is None:
        raise NotProductPreparation("the ontic space is not a Cartesian product")
    for p in composite.preparations:
        if p.product is None:
            raise NotProductPreparation(f"preparation {p.label!r} is not a product state")


def _factor_names(composite: FiniteOntologicalModel) -> Dict[str, Tuple[str, str]]:
    """
    Subsystem label names of every preparation's factors.

    Ray-equal factors share a name: the factor label of the first preparation
    carrying that ray, or "s<k>:<n>" when no factor labels were declared.
    """
    names = {}
    registries: Tuple[List[Tuple[PureState, str]], ...] = ([], [])
    for p in composite.preparations:
        pair = []
        for s, state in enumerate((p.product.factor1, p.product.factor2)):
            for known, name in registries[s]:
                if ray_equal(known, state):
                    break
            else:
                if p.factor_labels is not None:
                    name = p.factor_labels[s]
                else:
                    name = f"s{s + 1}:{len(registries[s])}"
                registries[s].append((state, name))
            pair.append(name)
        names[p.label] = tuple(pair)
    return names


def _label_marginals(
    composite: FiniteOntologicalModel, label_map: StateLabelMap
) -> Dict[str, Tuple[Dict[str, float], Dict[str, float]]]:
    "Per preparation, the distributions of the subsystem-1 and subsystem-2 labels"
    _check_labels(composite, label_map)
    names = _factor_names(composite)
    point_names = [names[label_map(pt)] for pt in composite.space.points]
    marginals = {}
    for p in composite.preparations:
        first: Dict[str, float] = {}
        second: Dict[str, float] = {}
        for (n1, n2), w in zip(point_names, p.weights):
            if w > 0.0:
                first[n1] = first.get(n1, 0.0) + float(w)
                second[n2] = second.get(n2, 0.0) + float(w)
        marginals[p.label] = (first, second)
    return marginals


def _require_ontic(composite: FiniteOntologicalModel, eps: float):
    report = overlap_matrix(composite, eps)
    if report.classification is Onticity.PSI_EPISTEMIC:
        first, second, mass = report.offending_pairs[0]
        raise PsiEpistemicInput((first, second), mass)


def product_label_coordinates(
    composite: FiniteOntologicalModel,
    eps: float = DEFAULT_EPS,
    label_map: Optional[StateLabelMap] = None,
) -> Dict[str, LabelCoordinates]:
    """
    Split the label λ_ψ of every product preparation into (λ_ψ1, λ_ψ2).

    The factor states come from the preparation's declared product state. The
    split is checked: under each preparation, the distribution of each subsystem
    label must be a point mass on that preparation's own factor.

    Raises
    ------
    NotProductPreparation
        if the space is not a Cartesian product or a preparation is not a product
    PsiEpistemicInput
        if the composite is not ψ-ontic at eps
    InconsistentLabelMap
        if a supplied label map spreads a preparation over several subsystem labels
    """
    _require_product_structure(composite)
    _require_ontic(composite, eps)
    if label_map is None:
        label_map = construct_label_map(composite, eps)
    names = _factor_names(composite)
    marginals = _label_marginals(composite, label_map)
    coords = {}
    for p in composite.preparations:
        for s in range(2):
            carried = [n for n, m in marginals[p.label][s].items() if m > eps]
            if carried != [names[p.label][s]]:
                raise InconsistentLabelMap(
                    f"subsystem {s + 1} label of {p.label!r} is spread over {carried}"
                )
        coords[p.label] = LabelCoordinates(
            names[p.label][0], names[p.label][1], p.product.factor1, p.product.factor2
        )
    return coords


def subsystem_onticity_check(
    composite: FiniteOntologicalModel,
    eps: float = DEFAULT_EPS,
    label_map: Optional[StateLabelMap] = None,
) -> Tuple[SubsystemOnticityVerdict, SubsystemOnticityVerdict]:
    """
    Decide whether each subsystem label is sharp under every product preparation.

    A subsystem is ONTIC when, for every preparation, the marginal distribution of
    its label component is concentrated on a single label. Otherwise the verdict
    is VIOLATION with the two distinct labels λ_ψ1^a ≠ λ_ψ1^b found under one
    preparation. With the label map built from the composite itself this check
    always returns ONTIC; an externally supplied label map may not.

    Parameters
    ----------
    composite : FiniteOntologicalModel over a Cartesian product space
    eps : float
        support threshold
    label_map : StateLabelMap, optional
        labels to test instead of the map built by construct_label_map

    Returns
    -------
    verdicts for subsystem 1 and subsystem 2
    """
    _require_product_structure(composite)
    _require_ontic(composite, eps)
    if label_map is None:
        label_map = construct_label_map(composite, eps)
    marginals = _label_marginals(composite, label_map)
    verdicts = []
    for s in range(2):
        per_prep = {label: MappingProxyType(m[s]) for label, m in marginals.items()}
        verdict = SubsystemOnticityVerdict(s + 1, SubsystemVerdict.ONTIC, marginals=per_prep)
        for label, dist in per_prep.items():
            carried = [n for n, m in dist.items() if m > eps]
            if len(carried) > 1:
                verdict = SubsystemOnticityVerdict(
                    s + 1,
                    SubsystemVerdict.VIOLATION,
                    witness=(carried[0], carried[1]),
                    preparation=label,
                    marginals=per_prep,
                )
                break
        logger.info("subsystem %d: %s", s + 1, verdict.verdict.value)
        verdicts.append(verdict)
    return verdicts[0], verdicts[1]


def corollary_check(
    composite: FiniteOntologicalModel, eps: float = DEFAULT_EPS
) -> Dict[str, bool]:
    """
    For each product preparation, whether λ_ψ = ψ₁ ⊗ ψ₂ on its whole support.

    The state attached to each support point by the composite label map is
    compared with the tensor product of the preparation's declared factors.
    """
    _require_product_structure(composite)
    label_map = construct_label_map(composite, eps)
    result = {}
    for p in composite.preparations:
        joint = tensor(p.product.factor1, p.product.factor2).joint
        ok = True
        for idx in np.flatnonzero(p.weights > eps):
            labelled = composite.preparation(label_map(composite.space.points[idx]))
            if not ray_equal(labelled.quantum_state, joint):
                ok = False
                break
        result[p.label] = ok
    return result
