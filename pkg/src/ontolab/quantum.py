"""
Pure-state linear algebra for small finite dimensions.

States are dense complex vectors stored exactly as given; two states describe the
same physical preparation when they are ray-equal (equal up to a global phase).
Every object here is immutable after construction.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .exceptions import ConstructionInvalid, DimensionMismatch, InvariantViolation

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
BASIS_TOL = 1e-10
RAY_TOL = 1e-10


def _frozen_array(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Normalized state vector |ψ⟩ of a d-dimensional system.

    Parameters
    ----------
    amplitudes : array_like of complex
        probability amplitudes, Σ|a_i|² = 1 within 1e-12
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(np.ravel(self.amplitudes))
        if amps.size == 0:
            raise InvariantViolation("amplitudes", "a state needs at least one amplitude")
        if not np.all(np.isfinite(amps)):
            raise InvariantViolation("amplitudes", "amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantViolation(
                "amplitudes", f"squared norm {norm!r} differs from 1 by more than {NORM_TOL}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: npt.ArrayLike, normalize: bool = True):
        "Build a state, rescaling the amplitudes to unit norm when normalize is set"
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise InvariantViolation("amplitudes", "the zero vector is not a state")
            amps = amps / norm
        return cls(amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def ray_equal(self, other: "PureState", tol: float = RAY_TOL) -> bool:
        "True iff the states differ only by a global phase, see ray_equal"
        return ray_equal(self, other, tol)

    def __repr__(self):
        body = ", ".join(f"{a.real:.6g}{a.imag:+.6g}j" for a in self.amplitudes)
        return f"PureState([{body}])"


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """
    Rank-one projective measurement given by an orthonormal basis.

    Outcome k corresponds to the basis vector basis[k].
    """

    basis: Tuple[PureState, ...]

    def __post_init__(self):
        basis = tuple(self.basis)
        if not basis:
            raise InvariantViolation("basis", "a measurement needs at least one vector")
        dim = basis[0].dim
        if any(b.dim != dim for b in basis):
            raise InvariantViolation("basis", "basis vectors have different dimensions")
        if len(basis) != dim:
            raise InvariantViolation(
                "basis", f"{len(basis)} vectors cannot span a {dim}-dimensional space"
            )
        matrix = np.column_stack([b.amplitudes for b in basis])
        gram = matrix.conj().T @ matrix
        off_diag = np.abs(gram - np.diag(np.diag(gram)))
        if off_diag.size and off_diag.max() >= BASIS_TOL:
            i, j = np.unravel_index(np.argmax(off_diag), off_diag.shape)
            raise InvariantViolation(
                "basis",
                f"vectors {i} and {j} are not orthogonal "
                f"(|<b_i|b_j>| = {off_diag[i, j]:.3g} >= {BASIS_TOL})",
            )
        completeness = matrix @ matrix.conj().T - np.eye(dim)
        if np.abs(completeness).max() >= BASIS_TOL:
            raise InvariantViolation("basis", "projectors do not sum to the identity")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_matrix", _frozen_array(matrix))

    @classmethod
    def from_vectors(cls, vectors: Sequence[npt.ArrayLike]):
        return cls(tuple(PureState(v) for v in vectors))

    @property
    def dim(self) -> int:
        return self.basis[0].dim

    @property
    def matrix(self) -> np.ndarray:
        "Matrix whose k-th column is basis vector k"
        return self._matrix


@dataclass(frozen=True, eq=False)
class ProductState:
    """
    Product state |ψ₁⟩ ⊗ |ψ₂⟩ together with its joint vector.

    When joint is omitted it is computed as the Kronecker product of the factors.
    A supplied joint vector must equal that product up to a global phase.
    """

    factor1: PureState
    factor2: PureState
    joint: Optional[PureState] = None

    def __post_init__(self):
        kron = np.kron(self.factor1.amplitudes, self.factor2.amplitudes)
        if self.joint is None:
            object.__setattr__(self, "joint", PureState(kron))
            return
        if self.joint.dim != kron.size:
            raise InvariantViolation(
                "joint",
                f"dimension {self.joint.dim} != {self.factor1.dim} * {self.factor2.dim}",
            )
        overlap = np.vdot(kron, self.joint.amplitudes)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        if np.abs(self.joint.amplitudes - phase * kron).max() > NORM_TOL:
            raise InvariantViolation(
                "joint", "joint vector is not the tensor product of its factors"
            )

    @property
    def dims(self) -> Tuple[int, int]:
        return self.factor1.dim, self.factor2.dim


def inner_product(a: PureState, b: PureState) -> complex:
    """
    ⟨a|b⟩, conjugate-linear in the first argument.

    Raises
    ------
    DimensionMismatch
        if the states live in spaces of different dimension
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot pair a {a.dim}-dim state with a {b.dim}-dim state")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def ray_equal(a: PureState, b: PureState, tol: float = RAY_TOL) -> bool:
    """
    True iff a and b differ only by a global phase.

    Compares min_θ ‖a − e^{iθ} b‖ against tol. The distance grows linearly with
    the angle between the rays, so tol is also their angular resolution.
    """
    if a.dim != b.dim:
        return False
    overlap = inner_product(b, a)
    if abs(overlap) == 0.0:
        return False
    aligned = b.amplitudes * (overlap / abs(overlap))
    return float(np.linalg.norm(a.amplitudes - aligned)) <= tol


def born_probabilities(state: PureState, m: ProjectiveMeasurement) -> np.ndarray:
    """
    Born-rule outcome probabilities |⟨b_k|ψ⟩|² of a projective measurement.

    Parameters
    ----------
    state : PureState
    m : ProjectiveMeasurement with m.dim == state.dim

    Returns
    -------
    probabilities : ndarray(float64) of length dim, summing to 1 within 1e-12
    """
    if state.dim != m.dim:
        raise DimensionMismatch(
            f"state of dimension {state.dim} measured in a {m.dim}-dim basis"
        )
    amps = m.matrix.conj().T @ state.amplitudes
    return np.abs(amps) ** 2


def tensor(a: PureState, b: PureState) -> ProductState:
    "|a⟩ ⊗ |b⟩ as a ProductState"
    return ProductState(a, b)


def orthogonality_table(m: ProjectiveMeasurement, states: Sequence[PureState]) -> np.ndarray:
    "Born probabilities, one row per state and one column per outcome of m"
    return np.array([born_probabilities(s, m) for s in states])


def canonical_amplitudes(state: PureState, tol: float = NORM_TOL) -> np.ndarray:
    "Amplitudes with the global phase fixed so that the first non-zero one is real positive"
    amps = state.amplitudes
    idx = np.flatnonzero(np.abs(amps) > tol)[0]
    return amps * (abs(amps[idx]) / amps[idx])


def computational_basis(dim: int) -> ProjectiveMeasurement:
    return ProjectiveMeasurement.from_vectors(np.eye(dim, dtype=np.complex128))


def ket0() -> PureState:
    return PureState([1.0, 0.0])


def ket1() -> PureState:
    return PureState([0.0, 1.0])


def ket_plus() -> PureState:
    return PureState(np.array([1.0, 1.0]) / np.sqrt(2.0))


def ket_minus() -> PureState:
    return PureState(np.array([1.0, -1.0]) / np.sqrt(2.0))


def bloch_state(theta: float, phi: float = 0.0) -> PureState:
    """
    Qubit state cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.

    theta is the polar angle from |0⟩ (north pole) and phi the azimuth, in radians.
    """
    return PureState([np.cos(theta / 2.0), np.exp(1j * phi) * np.sin(theta / 2.0)])


def _require_qubit(state: PureState):
    if state.dim != 2:
        raise DimensionMismatch(f"expected a qubit state, got dimension {state.dim}")


def bloch_angles(state: PureState) -> Tuple[float, float]:
    "(θ, φ) of a qubit state, θ in [0, π] from |0⟩ and φ in [0, 2π)"
    _require_qubit(state)
    a0, a1 = state.amplitudes
    theta = 2.0 * np.arctan2(abs(a1), abs(a0))
    if abs(a1) <= NORM_TOL or abs(a0) <= NORM_TOL:
        return float(theta), 0.0
    phi = (np.angle(a1) - np.angle(a0)) % (2.0 * np.pi)
    return float(theta), float(phi)


def bloch_vector(state: PureState) -> np.ndarray:
    "Unit Bloch vector (x, y, z) of a qubit state"
    _require_qubit(state)
    a0, a1 = state.amplitudes
    coherence = np.conj(a0) * a1
    return np.array(
        [2.0 * coherence.real, 2.0 * coherence.imag, abs(a0) ** 2 - abs(a1) ** 2]
    )


def qubit_basis(theta: float, phi: float = 0.0) -> ProjectiveMeasurement:
    "Qubit basis {|n⟩, |−n⟩} for the Bloch direction n = (theta, phi)"
    return ProjectiveMeasurement(
        (bloch_state(theta, phi), bloch_state(np.pi - theta, phi + np.pi))
    )


def pbr_preparations() -> Tuple[Tuple[str, ProductState], ...]:
    "The four product preparations |0⊗0⟩, |0⊗+⟩, |+⊗0⟩, |+⊗+⟩ with their labels"
    kets = {"0": ket0(), "+": ket_plus()}
    return tuple(
        (f"{l1},{l2}", tensor(kets[l1], kets[l2])) for l1 in "0+" for l2 in "0+"
    )


def _superpose(first: ProductState, second: ProductState) -> PureState:
    return PureState((first.joint.amplitudes + second.joint.amplitudes) / np.sqrt(2.0))


@functools.lru_cache(maxsize=None)
def pbr_entangled_basis() -> ProjectiveMeasurement:
    """
    Entangled two-qubit basis in which each PBR preparation has one impossible outcome.

    Each vector is an equal superposition of two product terms:

        Φ₁ = (|0⟩|1⟩ + |1⟩|0⟩)/√2    orthogonal to |0⊗0⟩
        Φ₂ = (|0⟩|−⟩ + |1⟩|+⟩)/√2    orthogonal to |0⊗+⟩
        Φ₃ = (|+⟩|1⟩ + |−⟩|0⟩)/√2    orthogonal to |+⊗0⟩
        Φ₄ = (|+⟩|−⟩ + |−⟩|+⟩)/√2    orthogonal to |+⊗+⟩

    The orthonormality, completeness and the one-zero-per-preparation pattern are
    checked here instead of being assumed.

    Raises
    ------
    ConstructionInvalid
        if any of those checks fails
    """
    k0, k1, kp, km = ket0(), ket1(), ket_plus(), ket_minus()
    vectors = (
        _superpose(tensor(k0, k1), tensor(k1, k0)),
        _superpose(tensor(k0, km), tensor(k1, kp)),
        _superpose(tensor(kp, k1), tensor(km, k0)),
        _superpose(tensor(kp, km), tensor(km, kp)),
    )
    try:
        basis = ProjectiveMeasurement(vectors)
    except InvariantViolation as err:
        raise ConstructionInvalid(f"PBR basis is not orthonormal: {err}") from err

    table = orthogonality_table(basis, [p.joint for _, p in pbr_preparations()])
    zeros = table < NORM_TOL
    if not (np.all(zeros.sum(axis=1) == 1) and np.all(zeros.sum(axis=0) == 1)):
        raise ConstructionInvalid(
            f"PBR basis does not forbid exactly one outcome per preparation:\n{table}"
        )
    logger.debug("PBR basis verified, forbidden pattern %s", np.argmax(zeros, axis=1))
    return basis
