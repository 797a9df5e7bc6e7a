"""
ψ-epistemic qubit model on the ontic space ℂP¹ × [0, 1].

An ontic state is a Bloch direction λ̂ together with a hidden variable x. The
preferred state |0⟩ defines the open hemisphere R₀ (polar angle θ < π/2) and the
region

    E₀ = {(λ̂, x) : λ̂ ∈ R₀, 0 ≤ x < (1 − sin θ_λ)/2}.

A state |ψ⟩ ∈ R₀ is prepared as the mixture

    μ_ψ = (1 − w_ψ) · [λ̂ = ψ̂, x uniform on [w_ψ, 1]] + w_ψ · μ_E₀,
    w_ψ = (1 − sin θ_ψ)/2,

and a measurement {φ₀, φ₁}, ordered so that |⟨φ₀|0⟩|² ≥ |⟨φ₁|0⟩|², answers
outcome 0 iff |⟨λ|φ₀⟩|² > x. Every point of E₀ answers outcome 0 for every
ordered basis, which together with the shifted uniform x of the delta branch
reproduces the Born rule for any μ_E₀ concentrated on E₀.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence, Tuple, Union

import numpy as np
import scipy.optimize

from ..exceptions import DimensionMismatch, DomainError, InvariantViolation, OutsideHemisphere
from ..quantum import (
    BASIS_TOL,
    NORM_TOL,
    ProjectiveMeasurement,
    PureState,
    bloch_angles,
    bloch_state,
    bloch_vector,
    canonical_amplitudes,
    inner_product,
    ket0,
    ray_equal,
)
from ..rng import spawn_generators, split_counts
from ..utils import (
    bloch_vectors,
    count_outcome_zero,
    e0_constancy_violations as _e0_constancy_kernel,
)

logger = logging.getLogger(__name__)

HEMISPHERE = np.pi / 2


def epistemic_weight(theta_psi: float) -> float:
    """
    Weight w = (1 − sin θ)/2 of the shared E₀ component.

    Parameters
    ----------
    theta_psi : float
        polar angle from |0⟩ in radians, within [0, π]
    """
    if not 0.0 <= theta_psi <= np.pi:
        raise DomainError(f"polar angle {theta_psi} outside [0, pi]")
    return (1.0 - np.sin(theta_psi)) / 2.0


def min_favored_probability(theta_lambda: float) -> float:
    """
    Smallest |⟨λ|φ₀⟩|² over all ordered qubit bases, for λ at polar angle θ_λ.

    The worst φ₀ sits on the equator, opposite λ in azimuth, giving (1 − sin θ_λ)/2.
    """
    if not 0.0 <= theta_lambda < HEMISPHERE:
        raise DomainError(f"polar angle {theta_lambda} outside [0, pi/2)")
    return (1.0 - np.sin(theta_lambda)) / 2.0


def min_favored_probability_numeric(theta_lambda: float, grid: int = 41) -> float:
    """
    Numerical oracle for min_favored_probability.

    Minimizes |⟨λ|φ₀⟩|² over φ₀ in the closed upper hemisphere (the ordered
    bases), first on a grid with scipy.optimize.brute and then with a bounded
    local refinement.
    """
    if not 0.0 <= theta_lambda < HEMISPHERE:
        raise DomainError(f"polar angle {theta_lambda} outside [0, pi/2)")
    lam = np.array([np.sin(theta_lambda), 0.0, np.cos(theta_lambda)])

    def favored(angles):
        alpha, beta = angles
        phi0 = np.array(
            [np.sin(alpha) * np.cos(beta), np.sin(alpha) * np.sin(beta), np.cos(alpha)]
        )
        return 0.5 * (1.0 + lam @ phi0)

    bounds = ((0.0, HEMISPHERE), (0.0, 2.0 * np.pi))
    start = scipy.optimize.brute(favored, bounds, Ns=grid, finish=None)
    polished = scipy.optimize.minimize(favored, start, method="L-BFGS-B", bounds=bounds)
    return float(min(favored(start), polished.fun))


@dataclass(frozen=True, eq=False)
class LewisOnticPoint:
    "Ontic state (λ̂, x) of the qubit model"

    lambda_hat: PureState
    x: float

    def __post_init__(self):
        if self.lambda_hat.dim != 2:
            raise InvariantViolation("lambda_hat", "the ontic direction must be a qubit state")
        if not 0.0 <= self.x <= 1.0:
            raise InvariantViolation("x", f"hidden variable {self.x} outside [0, 1]")
        object.__setattr__(self, "x", float(self.x))

    @property
    def theta(self) -> float:
        return bloch_angles(self.lambda_hat)[0]


class LewisRegion:
    "Membership tests for the hemisphere R₀ and the overlap region E₀"

    @staticmethod
    def theta(point: LewisOnticPoint) -> float:
        return point.theta

    @staticmethod
    def in_r0(point: LewisOnticPoint) -> bool:
        return point.theta < HEMISPHERE

    @staticmethod
    def in_e0(point: LewisOnticPoint) -> bool:
        theta = point.theta
        return theta < HEMISPHERE and 0.0 <= point.x < (1.0 - np.sin(theta)) / 2.0

    @staticmethod
    def in_e0_arrays(theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        "Vectorized in_e0 over polar angles and hidden variables"
        return (theta < HEMISPHERE) & (x >= 0.0) & (x < (1.0 - np.sin(theta)) / 2.0)


@dataclass(frozen=True, eq=False)
class OrderedBasis:
    "Qubit basis {φ₀, φ₁} with |⟨φ₀|0⟩|² ≥ |⟨φ₁|0⟩|²"

    phi0: PureState
    phi1: PureState

    def __post_init__(self):
        if self.phi0.dim != 2 or self.phi1.dim != 2:
            raise DimensionMismatch("an ordered basis is made of qubit states")
        if abs(inner_product(self.phi0, self.phi1)) >= BASIS_TOL:
            raise InvariantViolation("phi1", "basis states are not orthogonal")
        if abs(self.phi0.amplitudes[0]) ** 2 < abs(self.phi1.amplitudes[0]) ** 2 - NORM_TOL:
            raise InvariantViolation("phi0", "phi0 must be at least as close to |0> as phi1")

    @property
    def axis(self) -> np.ndarray:
        "Bloch vector of φ₀"
        return bloch_vector(self.phi0)

    @property
    def measurement(self) -> ProjectiveMeasurement:
        return ProjectiveMeasurement((self.phi0, self.phi1))


def order_basis(b: ProjectiveMeasurement) -> OrderedBasis:
    """
    Order a qubit basis relative to |0⟩.

    φ₀ is the vector with the larger |⟨φ|0⟩|². When both are equal within 1e-12
    the vector whose phase-canonical amplitudes (Re a₀, Im a₀, Re a₁, Im a₁) are
    lexicographically larger becomes φ₀, so the result does not depend on the
    input order.
    """
    if b.dim != 2:
        raise DimensionMismatch(f"expected a qubit basis, got dimension {b.dim}")
    first, second = b.basis
    p_first = abs(first.amplitudes[0]) ** 2
    p_second = abs(second.amplitudes[0]) ** 2
    if abs(p_first - p_second) <= NORM_TOL:

        def key(state):
            amps = canonical_amplitudes(state)
            return (amps[0].real, amps[0].imag, amps[1].real, amps[1].imag)

        swap = key(second) > key(first)
    else:
        swap = p_second > p_first
    return OrderedBasis(second, first) if swap else OrderedBasis(first, second)


def response(b: OrderedBasis, p: LewisOnticPoint) -> int:
    "Outcome of measuring b on ontic state p: 0 iff |⟨λ|φ₀⟩|² − x > 0, else 1"
    favored = abs(inner_product(p.lambda_hat, b.phi0)) ** 2
    return 0 if favored - p.x > 0.0 else 1


@dataclass(frozen=True, eq=False)
class LewisSamples:
    """
    Batch of ontic states drawn from one epistemic state.

    bloch holds the Bloch vectors of λ̂ (shape (n, 3)), theta their polar angles,
    x the hidden variables and from_e0 marks draws from the E₀ component.
    """

    bloch: np.ndarray
    theta: np.ndarray
    x: np.ndarray
    from_e0: np.ndarray

    def __len__(self):
        return self.x.size

    @property
    def in_e0(self) -> np.ndarray:
        return LewisRegion.in_e0_arrays(self.theta, self.x)


class E0Measure(Protocol):
    "A probability measure concentrated on E₀"

    name: str

    def sample(
        self, n: int, rng: np.random.Generator
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        "Return Bloch vectors (n, 3), polar angles (n,) and hidden variables (n,)"
        ...


def _below(bound: np.ndarray, x: np.ndarray) -> np.ndarray:
    # keeps x strictly under its E₀ bound after rounding
    return np.minimum(x, np.nextafter(bound, 0.0))


@dataclass(frozen=True)
class UniformE0Measure:
    """
    Uniform measure on E₀: solid angle on R₀ times Lebesgue measure on the
    allowed x-interval, normalized over E₀.

    The polar angle has density ∝ sin θ (1 − sin θ) on [0, π/2) and is drawn by
    rejection from the solid-angle density.
    """

    name: str = "uniform"
    batch: int = 4096

    def sample(self, n, rng):
        thetas = []
        needed = n
        while needed > 0:
            size = max(self.batch, 5 * needed)
            cos_theta = 1.0 - rng.random(size)
            theta = np.arccos(cos_theta)
            keep = rng.random(size) < 1.0 - np.sin(theta)
            accepted = theta[keep][:needed]
            thetas.append(accepted)
            needed -= accepted.size
        theta = np.concatenate(thetas) if thetas else np.empty(0)
        phi = 2.0 * np.pi * rng.random(n)
        bound = (1.0 - np.sin(theta)) / 2.0
        x = _below(bound, bound * rng.random(n))
        return bloch_vectors(theta, phi), theta, x


@dataclass(frozen=True)
class AxialE0Measure:
    "μ_E₀ concentrated on λ̂ = |0⟩ with x uniform on [0, 1/2)"

    name: str = "axial"

    def sample(self, n, rng):
        theta = np.zeros(n)
        bloch = np.zeros((n, 3))
        bloch[:, 2] = 1.0
        x = _below(np.full(n, 0.5), 0.5 * rng.random(n))
        return bloch, theta, x


E0_MEASURES = {"uniform": UniformE0Measure, "axial": AxialE0Measure}


def e0_measure_from_name(name: str) -> E0Measure:
    try:
        return E0_MEASURES[name]()
    except KeyError:
        raise DomainError(
            f"unknown E0 measure {name!r}, choose from {sorted(E0_MEASURES)}"
        ) from None


@dataclass(frozen=True, eq=False)
class LewisEpistemicState:
    """
    Epistemic state μ_ψ of the model.

    With fallback set (only for θ_ψ ≥ π/2, outside the model's stated domain)
    the state is the pure delta branch with x uniform on [0, 1].
    """

    psi: PureState
    theta_psi: float
    weight_e0: float
    e0_measure: E0Measure
    fallback: bool = False

    def __post_init__(self):
        if not 0.0 <= self.weight_e0 <= 0.5:
            raise InvariantViolation("weight_e0", f"{self.weight_e0} outside [0, 1/2]")

    def sample_many(self, n: int, rng: np.random.Generator) -> LewisSamples:
        """
        Draw n ontic states.

        Each draw comes from the E₀ component with probability w_ψ and from the
        delta branch (λ̂ = ψ̂, x uniform on [w_ψ, 1]) otherwise.
        """
        from_e0 = rng.random(n) < self.weight_e0
        n_e0 = int(from_e0.sum())
        n_delta = n - n_e0

        bloch = np.empty((n, 3))
        theta = np.empty(n)
        x = np.empty(n)

        w = self.weight_e0
        bloch[~from_e0] = bloch_vector(self.psi)
        theta[~from_e0] = self.theta_psi
        x[~from_e0] = w + (1.0 - w) * rng.random(n_delta)

        if n_e0:
            e0_bloch, e0_theta, e0_x = self.e0_measure.sample(n_e0, rng)
            bloch[from_e0] = e0_bloch
            theta[from_e0] = e0_theta
            x[from_e0] = e0_x
        return LewisSamples(bloch, theta, x, from_e0)


@dataclass(frozen=True)
class BornCheck:
    """
    Monte Carlo estimate of P(outcome 0) against the Born value |⟨φ₀|ψ⟩|².

    standard_error is the binomial standard error sqrt(B (1 − B) / n) of the
    Born value B.
    """

    estimate: float
    standard_error: float
    born: float
    n_samples: int

    @property
    def deviation(self) -> float:
        return abs(self.estimate - self.born)

    @property
    def deviation_sigmas(self) -> float:
        if self.standard_error > 0.0:
            return self.deviation / self.standard_error
        return 0.0 if self.deviation == 0.0 else float("inf")

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.standard_error,
            "born": self.born,
            "deviation": self.deviation,
            "deviation_sigmas": self.deviation_sigmas,
            "samples": self.n_samples,
        }


@dataclass(frozen=True)
class OverlapEstimate:
    "Analytic overlap min(w_ψ, w_φ) next to its Monte Carlo estimate"

    analytic: float
    estimate: float
    standard_error: float
    n_samples: int

    @property
    def deviation_sigmas(self) -> float:
        deviation = abs(self.estimate - self.analytic)
        if self.standard_error > 0.0:
            return deviation / self.standard_error
        return 0.0 if deviation == 0.0 else float("inf")

    def to_dict(self) -> dict:
        return {
            "analytic": self.analytic,
            "estimate": self.estimate,
            "stderr": self.standard_error,
            "deviation_sigmas": self.deviation_sigmas,
            "samples": self.n_samples,
        }


BasisLike = Union[OrderedBasis, ProjectiveMeasurement]


def _ordered(basis: BasisLike) -> OrderedBasis:
    return basis if isinstance(basis, OrderedBasis) else order_basis(basis)


def _polar_angle(state: PureState) -> float:
    if state.dim != 2:
        raise DimensionMismatch(f"expected a qubit state, got dimension {state.dim}")
    return bloch_angles(state)[0]


@dataclass(frozen=True)
class LewisModel:
    """
    Configuration of the model: the E₀ measure and whether states outside R₀ use
    the delta-branch fallback instead of being rejected.
    """

    e0_measure: E0Measure = field(default_factory=UniformE0Measure)
    allow_outside_hemisphere: bool = False

    def epistemic_state(self, psi: PureState) -> LewisEpistemicState:
        """
        Epistemic state of |ψ⟩.

        Raises
        ------
        OutsideHemisphere
            if θ_ψ ≥ π/2 and the fallback is disabled
        """
        theta = _polar_angle(psi)
        if theta < HEMISPHERE:
            return LewisEpistemicState(psi, theta, epistemic_weight(theta), self.e0_measure)
        if not self.allow_outside_hemisphere:
            raise OutsideHemisphere(f"polar angle {theta:.6g} is not below pi/2")
        logger.warning("state at polar angle %.6g uses the delta-branch fallback", theta)
        return LewisEpistemicState(psi, theta, 0.0, self.e0_measure, fallback=True)

    def sample(self, psi: PureState, rng: np.random.Generator) -> LewisOnticPoint:
        "One ontic state drawn from μ_ψ"
        draw = self.epistemic_state(psi).sample_many(1, rng)
        if not draw.from_e0[0]:
            return LewisOnticPoint(psi, draw.x[0])
        vec = draw.bloch[0]
        lambda_hat = bloch_state(draw.theta[0], np.arctan2(vec[1], vec[0]))
        return LewisOnticPoint(lambda_hat, draw.x[0])

    def born_check(
        self,
        psi: PureState,
        basis: BasisLike,
        n_samples: int,
        seed: int,
        workers: int = 1,
    ) -> BornCheck:
        """
        Monte Carlo check of the Born rule for outcome 0 of an ordered basis.

        The samples are split over workers, each drawing from its own child
        stream of seed; the outcome counts are summed.
        """
        if n_samples < 1:
            raise DomainError(f"need at least one sample, got {n_samples}")
        if n_samples < 1000:
            logger.warning("born check with only %d samples", n_samples)
        state = self.epistemic_state(psi)
        ordered = _ordered(basis)
        axis = ordered.axis
        born = abs(inner_product(ordered.phi0, psi)) ** 2

        def run(job):
            count, rng = job
            if count == 0:
                return 0
            samples = state.sample_many(count, rng)
            return int(count_outcome_zero(samples.bloch, samples.x, axis))

        jobs = list(zip(split_counts(n_samples, workers), spawn_generators(seed, workers)))
        if workers == 1:
            hits = run(jobs[0])
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                hits = sum(pool.map(run, jobs))
        check = BornCheck(
            estimate=hits / n_samples,
            standard_error=float(np.sqrt(born * (1.0 - born) / n_samples)),
            born=float(born),
            n_samples=n_samples,
        )
        logger.info(
            "born check: estimate %.6f, born %.6f (%.2f sigma)",
            check.estimate,
            check.born,
            check.deviation_sigmas,
        )
        return check

    def overlap(self, psi: PureState, phi: PureState) -> float:
        """
        Total-variation overlap of μ_ψ and μ_φ, min(w_ψ, w_φ).

        Both epistemic states contain the same μ_E₀ scaled by their weights,
        while their delta branches sit on different directions.
        """
        theta_psi, theta_phi = _polar_angle(psi), _polar_angle(phi)
        for theta in (theta_psi, theta_phi):
            if theta >= HEMISPHERE:
                raise OutsideHemisphere(f"polar angle {theta:.6g} is not below pi/2")
        if ray_equal(psi, phi):
            raise DomainError("overlap needs two distinct states")
        return min(epistemic_weight(theta_psi), epistemic_weight(theta_phi))

    def overlap_mc(
        self, psi: PureState, phi: PureState, n_samples: int, seed: int
    ) -> OverlapEstimate:
        """
        Monte Carlo estimate of the overlap from independent samples of μ_ψ and μ_φ.

        Each state draws n_samples ontic states from its own child stream of seed.
        The overlap is estimated as min(P̂_ψ(E₀), P̂_φ(E₀)), and the standard error
        is the binomial error of the smaller estimate.
        """
        if n_samples < 1:
            raise DomainError(f"need at least one sample, got {n_samples}")
        analytic = self.overlap(psi, phi)
        rng_psi, rng_phi = spawn_generators(seed, 2)
        fractions = [
            float(np.mean(self.epistemic_state(state).sample_many(n_samples, rng).in_e0))
            for state, rng in ((psi, rng_psi), (phi, rng_phi))
        ]
        p = min(fractions)
        return OverlapEstimate(
            analytic=analytic,
            estimate=p,
            standard_error=float(np.sqrt(p * (1.0 - p) / n_samples)),
            n_samples=n_samples,
        )


DEFAULT_MODEL = LewisModel()


def sample(
    psi: PureState, rng: np.random.Generator, model: LewisModel = DEFAULT_MODEL
) -> LewisOnticPoint:
    return model.sample(psi, rng)


def born_check(
    psi: PureState,
    basis: BasisLike,
    n_samples: int,
    seed: int,
    workers: int = 1,
    model: LewisModel = DEFAULT_MODEL,
) -> BornCheck:
    return model.born_check(psi, basis, n_samples, seed, workers)


def overlap(psi: PureState, phi: PureState, model: LewisModel = DEFAULT_MODEL) -> float:
    return model.overlap(psi, phi)


def overlap_mc(
    psi: PureState,
    phi: PureState,
    n_samples: int,
    seed: int,
    model: LewisModel = DEFAULT_MODEL,
) -> OverlapEstimate:
    return model.overlap_mc(psi, phi, n_samples, seed)


def delta_branch_probability(psi: PureState, basis: BasisLike) -> float:
    "P(outcome 0 | delta branch) = (|⟨ψ|φ₀⟩|² − w_ψ)/(1 − w_ψ)"
    theta = _polar_angle(psi)
    if theta >= HEMISPHERE:
        raise OutsideHemisphere(f"polar angle {theta:.6g} is not below pi/2")
    w = epistemic_weight(theta)
    born = abs(inner_product(_ordered(basis).phi0, psi)) ** 2
    return (born - w) / (1.0 - w)


def e0_constancy_violations(samples: LewisSamples, bases: Sequence[BasisLike]) -> int:
    """
    Number of (E₀ sample, basis) pairs whose response is not outcome 0.

    Samples outside E₀ are ignored.
    """
    mask = samples.in_e0
    axes = np.ascontiguousarray(np.array([_ordered(b).axis for b in bases]).reshape(-1, 3))
    bloch = np.ascontiguousarray(samples.bloch[mask])
    return int(_e0_constancy_kernel(bloch, np.ascontiguousarray(samples.x[mask]), axes))


def canonical_pair() -> Tuple[PureState, PureState]:
    "The demonstration pair |0⟩ and the state at polar angle π/3, both strictly inside R₀"
    return ket0(), bloch_state(np.pi / 3.0)
