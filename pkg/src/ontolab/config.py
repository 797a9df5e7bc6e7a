"""
Run configuration shared by the command-line tools.
"""

import json
from dataclasses import dataclass, fields, replace
from typing import Any, Mapping, Optional

from .exceptions import DomainError, InvariantViolation, ParseError
from .models.lewis import E0_MEASURES, LewisModel, e0_measure_from_name
from .ontology import DEFAULT_EPS, DEFAULT_PRODUCT_CAP
from .rng import MAX_SEED


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one ontolab run.

    Parameters
    ----------
    seed : int
        unsigned 64-bit seed of every random stream
    eps : float
        support threshold, ≥ 0
    mc_samples : int
        Monte Carlo sample count, ≥ 1
    product_space_cap : int
        largest composite ontic space pip_compose may build
    workers : int
        parallel sampling streams, ≥ 1
    e0_measure : str
        name of the E₀ measure of the qubit model ("uniform" or "axial")
    allow_outside_hemisphere : bool
        use the delta-branch fallback for states with θ ≥ π/2
    """

    seed: int = 0
    eps: float = DEFAULT_EPS
    mc_samples: int = 100_000
    product_space_cap: int = DEFAULT_PRODUCT_CAP
    workers: int = 1
    e0_measure: str = "uniform"
    allow_outside_hemisphere: bool = False

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise InvariantViolation("seed", f"expected an integer, got {self.seed!r}")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvariantViolation("seed", f"{self.seed} is not an unsigned 64-bit integer")
        if not self.eps >= 0.0:
            raise InvariantViolation("eps", f"must be >= 0, got {self.eps}")
        if self.mc_samples < 1:
            raise InvariantViolation("mc_samples", f"must be >= 1, got {self.mc_samples}")
        if self.product_space_cap < 1:
            raise InvariantViolation(
                "product_space_cap", f"must be >= 1, got {self.product_space_cap}"
            )
        if self.workers < 1:
            raise InvariantViolation("workers", f"must be >= 1, got {self.workers}")
        if self.e0_measure not in E0_MEASURES:
            raise InvariantViolation(
                "e0_measure", f"{self.e0_measure!r} is not one of {sorted(E0_MEASURES)}"
            )

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise InvariantViolation("config", f"unknown settings {unknown}")
        return cls(**dict(values))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        "Read a JSON object of settings"
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
        except UnicodeDecodeError as e:
            raise ParseError(f"{path}: not UTF-8 text (byte {e.start}: {e.reason})") from None
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
        if not isinstance(values, dict):
            raise ParseError(f"{path}: the configuration must be a JSON object")
        return cls.from_mapping(values)

    @classmethod
    def from_args(cls, args, base: Optional["RunConfig"] = None) -> "RunConfig":
        """
        Overlay parsed command-line flags on base.

        Flags left at None keep the value of base (or of the defaults).
        """
        config = base if base is not None else cls()
        flags = {
            "seed": getattr(args, "seed", None),
            "eps": getattr(args, "eps", None),
            "mc_samples": getattr(args, "samples", None),
            "product_space_cap": getattr(args, "cap", None),
            "workers": getattr(args, "workers", None),
            "e0_measure": getattr(args, "e0_measure", None),
            "allow_outside_hemisphere": getattr(args, "allow_outside_hemisphere", None),
        }
        return replace(config, **{k: v for k, v in flags.items() if v is not None})

    def lewis_model(self) -> LewisModel:
        try:
            measure = e0_measure_from_name(self.e0_measure)
        except DomainError as e:
            raise InvariantViolation("e0_measure", str(e)) from None
        return LewisModel(measure, self.allow_outside_hemisphere)
