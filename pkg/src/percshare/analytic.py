"""Closed-form percolation criteria for SINR coverage under BS sharing.

The SINR coverage of a low-density PPP network is approximated by a Gilbert
disk model D(lambda, r_m) whose radius r_m (the average coverage radius)
solves ``F(r, lambda) = 1``.  Critical densities for each sharing strategy
follow from the disk-model condition ``lambda * r**2 > lambda_c(1) / 4``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .params import ParameterError, SharingStrategy, SystemParams

# lambda * (2r)**2 at the phase transition of a Gilbert disk model.
LAMBDA_C1 = 4.0 * math.log(2.0) / math.pi

# |margin| at or below this many units of lambda_c(1) is reported as Critical.
CRITICAL_RTOL = 1e-12

BISECT_RTOL = 1e-12


class AnalyticError(ArithmeticError):
    pass


class RadiusBelowUnit(AnalyticError):
    """The coverage radius would not exceed the 1 m near-field distance."""


class BracketNonPositive(AnalyticError):
    """Interference is too strong for the critical-density formula."""


class SideLengthOutOfRange(AnalyticError):
    pass


class OutOfRangeProbability(AnalyticError):
    pass


class Phase(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"


@dataclass(frozen=True)
class PhaseVerdict:
    phase: Phase
    margin: float

    @classmethod
    def from_margin(cls, margin: float, tol: float) -> "PhaseVerdict":
        if abs(margin) <= tol:
            return cls(Phase.CRITICAL, margin)
        return cls(Phase.SUPERCRITICAL if margin > 0 else Phase.SUBCRITICAL, margin)

    @property
    def percolates(self) -> bool:
        return self.phase is Phase.SUPERCRITICAL


class Region(enum.Enum):
    BELOW = "below"
    INSIDE = "inside"
    ABOVE = "above"


@dataclass(frozen=True)
class GilbertDisk:
    lam: float
    radius: float

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"density must be >= 0, got {self.lam}")
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0, got {self.radius}")


@dataclass(frozen=True)
class HexEnvelopes:
    side_a: float
    radius_r: float
    s_in: float
    s_out: float
    chord_b: float
    angle_theta: float


def lambda_c1() -> float:
    return LAMBDA_C1


def snr_radius(params: SystemParams) -> float:
    """Radius of the noise-limited coverage disk, (P_t/(N_0 beta))**(1/alpha)."""
    return (params.beta0 / params.beta) ** (1.0 / params.alpha)


def f_ratio(r: float, lam: float, params: SystemParams) -> float:
    a = params.alpha
    return (params.beta / params.beta0) * r**a + (
        2.0 * math.pi * params.gamma * params.beta * lam / (a - 2.0)
    ) * r**2


def bisect_increasing(
    fn: Callable[[float], float], lo: float, hi: float, rtol: float = BISECT_RTOL
) -> float:
    """Root of an increasing function with fn(lo) <= 0 <= fn(hi).

    Stops once the bracket width falls below ``rtol * hi`` (relative to the
    current upper end), or when the midpoint can no longer be split.
    """
    if lo > hi:
        raise ValueError("empty bracket")
    flo, fhi = fn(lo), fn(hi)
    if flo > 0 or fhi < 0:
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    while hi - lo > rtol * abs(hi):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _radius_closed_form_alpha4(lam: float, params: SystemParams) -> float:
    # u = r**2 solves (beta/beta0) u**2 + pi*gamma*beta*lam u - 1 = 0;
    # rationalised root avoids cancellation for large lam.
    c = math.pi * params.gamma * lam * params.beta0 / 2.0
    k = params.beta0 / params.beta
    u = k / (c + math.sqrt(c * c + k))
    return math.sqrt(u)


def _radius_bisection(lam: float, params: SystemParams) -> float:
    hi = snr_radius(params)
    if params.gamma > 0 and lam > 0:
        cap = math.sqrt((params.alpha - 2.0) / (2.0 * math.pi * params.gamma * params.beta * lam))
        hi = min(hi, cap)
    return bisect_increasing(lambda r: f_ratio(r, lam, params) - 1.0, 0.0, hi)


def avg_coverage_radius(lam: float, params: SystemParams, method: str = "auto") -> float:
    """Average coverage radius r_m(lam): the unique root of F(r, lam) = 1.

    ``method`` is ``"auto"`` (closed form when alpha == 4, else bisection),
    ``"closed"`` or ``"bisect"``.

    Raises RadiusBelowUnit when the root does not exceed 1 m.
    """
    if lam < 0:
        raise ValueError(f"density must be >= 0, got {lam}")
    if params.gamma == 0 or lam == 0:
        r = snr_radius(params)
    elif method == "closed" or (method == "auto" and params.alpha == 4.0):
        if params.alpha != 4.0:
            raise ValueError("closed form only exists for alpha == 4")
        r = _radius_closed_form_alpha4(lam, params)
    elif method in ("auto", "bisect"):
        r = _radius_bisection(lam, params)
    else:
        raise ValueError(f"unknown method {method!r}")
    if r <= 1.0:
        raise RadiusBelowUnit(f"coverage radius {r:.4g} m at density {lam:.4g} is not above 1 m")
    return r


def radius_bounds(lam: float, params: SystemParams) -> tuple[float, float]:
    """(F(1, lam)**(-1/alpha), F(1, lam)**(-1/2)), which bracket r_m(lam)."""
    f1 = f_ratio(1.0, lam, params)
    if f1 >= 1.0:
        raise RadiusBelowUnit(f"F(1, {lam:.4g}) = {f1:.4g} >= 1")
    return f1 ** (-1.0 / params.alpha), f1 ** (-0.5)


def max_potential_serving(params: SystemParams) -> float:
    """Upper bound on covering BSs other than the nearest one.

    Largest integer strictly below 1/(beta*gamma), floored at 0.  Returns
    ``math.inf`` when gamma == 0.
    """
    bg = params.beta_gamma
    if bg == 0:
        return math.inf
    return max(0, math.ceil(1.0 / bg) - 1)


def _critical_bracket(params: SystemParams) -> float:
    lc = LAMBDA_C1
    return 1.0 - math.pi * params.gamma * params.beta * lc / (2.0 * (params.alpha - 2.0))


def critical_density_no_sharing(params: SystemParams) -> float:
    """Critical BS density of a single operator network."""
    params.validate()
    bracket = _critical_bracket(params)
    if bracket <= 0:
        raise BracketNonPositive(f"critical-density bracket {bracket:.4g} <= 0")
    return LAMBDA_C1 / 4.0 * (params.beta0 / params.beta * bracket) ** (-2.0 / params.alpha)


def critical_density_passive(params: SystemParams) -> float:
    """Critical value of lambda_a + lambda_b under site sharing."""
    return critical_density_no_sharing(params)


def phase_no_sharing(lam: float, params: SystemParams) -> PhaseVerdict:
    r = avg_coverage_radius(lam, params)
    margin = lam * r**2 - LAMBDA_C1 / 4.0
    return PhaseVerdict.from_margin(margin, CRITICAL_RTOL * LAMBDA_C1)


def phase_active(lambda_a: float, lambda_b: float, params: SystemParams) -> PhaseVerdict:
    ra = avg_coverage_radius(lambda_a, params)
    rb = avg_coverage_radius(lambda_b, params)
    margin = lambda_a * ra**2 + lambda_b * rb**2 - LAMBDA_C1 / 4.0
    return PhaseVerdict.from_margin(margin, CRITICAL_RTOL * LAMBDA_C1)


def phase_passive(lambda_a: float, lambda_b: float, params: SystemParams) -> PhaseVerdict:
    return phase_no_sharing(lambda_a + lambda_b, params)


def phase(strategy: SharingStrategy, lambda_a: float, lambda_b: float,
          params: SystemParams) -> PhaseVerdict:
    strategy = SharingStrategy.parse(strategy)
    if strategy is SharingStrategy.NO_SHARING:
        return phase_no_sharing(lambda_a, params)
    if strategy is SharingStrategy.ACTIVE_SHARING:
        return phase_active(lambda_a, lambda_b, params)
    return phase_passive(lambda_a, lambda_b, params)


def restriction_region_active(lambda_a: float, lambda_b: float, params: SystemParams) -> Region:
    """Classify lambda_a + lambda_b against the active-sharing critical band.

    Below the band the superposed network cannot percolate; above it, it
    must.  Inside, the verdict is left to ``phase_active``.
    """
    ra2 = avg_coverage_radius(lambda_a, params) ** 2
    rb2 = avg_coverage_radius(lambda_b, params) ** 2
    low = LAMBDA_C1 / (4.0 * max(ra2, rb2))
    high = LAMBDA_C1 / (4.0 * min(ra2, rb2))
    total = lambda_a + lambda_b
    if total < low:
        return Region.BELOW
    if total > high:
        return Region.ABOVE
    return Region.INSIDE


def critical_lambda_a(strategy: SharingStrategy, lambda_b: float, params: SystemParams) -> float:
    """Smallest lambda_a at which operator a's UEs reach the critical point."""
    strategy = SharingStrategy.parse(strategy)
    crit = critical_density_no_sharing(params)
    if strategy is SharingStrategy.NO_SHARING:
        return crit
    if strategy is SharingStrategy.PASSIVE_SHARING:
        return max(0.0, crit - lambda_b)

    def margin(la: float) -> float:
        return phase_active(la, lambda_b, params).margin

    if margin(0.0) >= 0:
        return 0.0
    # operator a alone is critical at ``crit``, so the sum is already >= 0 there
    return bisect_increasing(margin, 0.0, crit)


def coverage_probability_gdm(lam: float, radius: float) -> float:
    if lam < 0 or radius <= 0:
        raise ValueError("need lam >= 0 and radius > 0")
    return -math.expm1(-lam * math.pi * radius * radius)


def theoretical_coverage(strategy: SharingStrategy, lambda_a: float, lambda_b: float,
                         params: SystemParams) -> float:
    """Disk-model coverage probability using the average coverage radii."""
    strategy = SharingStrategy.parse(strategy)
    if strategy is SharingStrategy.NO_SHARING:
        mean = lambda_a * avg_coverage_radius(lambda_a, params) ** 2
    elif strategy is SharingStrategy.ACTIVE_SHARING:
        mean = (lambda_a * avg_coverage_radius(lambda_a, params) ** 2
                + lambda_b * avg_coverage_radius(lambda_b, params) ** 2)
    else:
        total = lambda_a + lambda_b
        mean = total * avg_coverage_radius(total, params) ** 2
    return -math.expm1(-math.pi * mean)


def coverage_to_phase(p_cov: float) -> PhaseVerdict:
    if not 0.0 <= p_cov <= 1.0:
        raise OutOfRangeProbability(f"coverage probability {p_cov} outside [0, 1]")
    return PhaseVerdict.from_margin(p_cov - 0.5, CRITICAL_RTOL)


def hex_envelopes(side_a: float, radius_r: float) -> HexEnvelopes:
    """Inner/outer envelope areas of a hexagon of side ``side_a``.

    A BS inside the inner envelope covers the whole hexagon; with no BS in
    the outer envelope the hexagon is entirely uncovered.
    """
    a, r = side_a, radius_r
    if not (r > 0 and 0 < a < r / 2):
        raise SideLengthOutOfRange(f"need 0 < a < r/2, got a={a}, r={r}")
    b = math.sqrt(r * r - a * a / 4.0) - math.sqrt(3.0) / 2.0 * a
    theta = math.asin(b / (2.0 * r))
    s_in = 6.0 * theta * r * r - 3.0 * a * b
    s_out = 1.5 * math.sqrt(3.0) * a * a + math.pi * r * r + 6.0 * a * r
    return HexEnvelopes(a, r, s_in, s_out, b, theta)


def gdm_phase(model: GilbertDisk) -> PhaseVerdict:
    margin = model.lam * (2.0 * model.radius) ** 2 - LAMBDA_C1
    return PhaseVerdict.from_margin(margin, CRITICAL_RTOL * LAMBDA_C1)


def gdm_critical_density(radius: float) -> float:
    return LAMBDA_C1 / (4.0 * radius * radius)


__all__ = [
    "LAMBDA_C1", "AnalyticError", "RadiusBelowUnit", "BracketNonPositive",
    "SideLengthOutOfRange", "OutOfRangeProbability", "ParameterError", "Phase",
    "PhaseVerdict", "Region", "GilbertDisk", "HexEnvelopes", "lambda_c1",
    "snr_radius", "f_ratio", "bisect_increasing", "avg_coverage_radius",
    "radius_bounds", "max_potential_serving", "critical_density_no_sharing",
    "critical_density_passive", "phase_no_sharing", "phase_active", "phase_passive",
    "phase", "restriction_region_active", "critical_lambda_a",
    "coverage_probability_gdm", "theoretical_coverage", "coverage_to_phase",
    "hex_envelopes", "gdm_phase", "gdm_critical_density",
]
