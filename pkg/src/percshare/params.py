"""Radio parameters, unit conversion and validity checks.

All powers are handled in decibels at the boundary and converted to linear
ratios on demand.  Only the ratio of received power at unit distance to
noise power enters any formula, so no absolute power reference is fixed.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path


class ParameterError(ValueError):
    """Base class for invalid radio parameters."""


class OutOfRangeGamma(ParameterError):
    pass


class AlphaNotGreaterThanTwo(ParameterError):
    pass


class NoiseDominatesSignal(ParameterError):
    """Raised when P_t/N_0 does not exceed the SINR threshold."""


class NoPercolationWarning(UserWarning):
    """beta * gamma >= 1: coverage areas of distinct BSs cannot connect."""


class SharingStrategy(enum.Enum):
    NO_SHARING = "none"
    ACTIVE_SHARING = "active"
    PASSIVE_SHARING = "passive"

    @classmethod
    def parse(cls, value: "str | SharingStrategy") -> "SharingStrategy":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {
            "none": cls.NO_SHARING,
            "no": cls.NO_SHARING,
            "no_sharing": cls.NO_SHARING,
            "nosharing": cls.NO_SHARING,
            "active": cls.ACTIVE_SHARING,
            "active_sharing": cls.ACTIVE_SHARING,
            "passive": cls.PASSIVE_SHARING,
            "passive_sharing": cls.PASSIVE_SHARING,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown sharing strategy {value!r}") from None


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Downlink SINR model parameters.

    Attributes:
        pt_db: received power at 1 m from a BS, dB.
        n0_db: noise power, dB.
        beta_db: SINR threshold, dB.
        gamma: interference cancellation factor in [0, 1].
        alpha: path loss exponent, must exceed 2.
    """

    pt_db: float = 13.0
    n0_db: float = -104.0
    beta_db: float = -3.0
    gamma: float = 1.0
    alpha: float = 4.0

    @property
    def beta(self) -> float:
        return db_to_linear(self.beta_db)

    @property
    def beta0(self) -> float:
        """Linear P_t / N_0."""
        return db_to_linear(self.pt_db - self.n0_db)

    @property
    def beta_gamma(self) -> float:
        return self.beta * self.gamma

    @property
    def percolation_possible(self) -> bool:
        return self.beta_gamma < 1.0

    def validate(self) -> bool:
        """Check the parameter invariants.

        Raises one of the ParameterError subclasses on a hard violation.
        Returns whether beta*gamma < 1; when it is not, a
        NoPercolationWarning is also emitted, since the analytic functions
        remain evaluable and simply predict zero percolation probability.
        """
        for name in ("pt_db", "n0_db", "beta_db", "gamma", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if not 0.0 <= self.gamma <= 1.0:
            raise OutOfRangeGamma(f"gamma={self.gamma} outside [0, 1]")
        if not self.alpha > 2.0:
            raise AlphaNotGreaterThanTwo(f"alpha={self.alpha} must be > 2")
        if not self.beta0 > self.beta:
            raise NoiseDominatesSignal(
                f"P_t/N_0={self.beta0:.4g} does not exceed beta={self.beta:.4g}"
            )
        if not self.percolation_possible:
            warnings.warn(
                f"beta*gamma={self.beta_gamma:.4g} >= 1: no percolation possible",
                NoPercolationWarning,
                stacklevel=2,
            )
            return False
        return True

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        known = {"pt_db", "n0_db", "beta_db", "gamma", "alpha"}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown parameter keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    @classmethod
    def from_json(cls, path: "str | Path") -> "SystemParams":
        with open(path) as fh:
            data = json.load(fh)
        if "params" in data and isinstance(data["params"], dict):
            data = data["params"]
        return cls.from_dict(data)


# Reference parameter set used throughout the evaluation.
REFERENCE_PARAMS = SystemParams(pt_db=13.0, n0_db=-104.0, beta_db=-3.0, gamma=1.0, alpha=4.0)
