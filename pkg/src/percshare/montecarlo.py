"""Seeded Monte Carlo sweeps over BS density.

The percolation estimate is the frequency with which a single covered
component crosses the observation window.  This indicates whether the
infinite-plane percolation probability is non-zero; it is not an estimate
of that probability's value.

Every trial draws its randomness from a seed derived only from
``(master_seed, grid_index, trial_index)``, so results do not depend on trial
order or on how trials are spread over worker processes.  Trials at the same
grid position share deployments across strategies (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage, stats

from .params import SharingStrategy, SystemParams
from .spatial import (
    Window,
    coverage_grid,
    disk_coverage,
    has_crossing,
    label_components,
    sample_deployment,
    sample_ppp,
)


def trial_seed(master_seed: int, grid_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([int(master_seed), int(grid_index), int(trial_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError("need 0 <= successes <= trials and trials >= 1")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    n = trials
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    low = 0.0 if successes == 0 else max(0.0, centre - half)
    high = 1.0 if successes == trials else min(1.0, centre + half)
    return min(low, p), max(high, p)


@dataclass(frozen=True)
class SweepSpec:
    strategy: SharingStrategy
    lambda_a_grid: tuple[float, ...]
    lambda_b: float = 0.0
    trials: int = 200
    window: Window = field(default_factory=Window)
    master_seed: int = 0
    connectivity: int = 8
    crossing: str = "horizontal"

    def __post_init__(self):
        object.__setattr__(self, "strategy", SharingStrategy.parse(self.strategy))
        object.__setattr__(self, "lambda_a_grid", tuple(float(x) for x in self.lambda_a_grid))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        grid = self.lambda_a_grid
        if not grid:
            raise ValueError("density grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("density grid must be strictly increasing")
        if any(x < 0 for x in grid) or self.lambda_b < 0:
            raise ValueError("densities must be >= 0")


@dataclass(frozen=True)
class SweepPoint:
    strategy: str
    lambda_a: float
    lambda_b: float
    trials: int
    crossings: int
    perc_prob: float
    ci_low: float
    ci_high: float
    cov_prop_mean: float
    cov_prop_sd: float

    @property
    def ci_half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def perc_prob(self) -> np.ndarray:
        return np.array([p.perc_prob for p in self.points])

    @property
    def cov_prop_mean(self) -> np.ndarray:
        return np.array([p.cov_prop_mean for p in self.points])


@dataclass(frozen=True)
class TrialOutcome:
    crossed: bool
    covered_fraction: float


def _aggregate(label: str, lambda_a: float, lambda_b: float,
               outcomes: Sequence[TrialOutcome]) -> SweepPoint:
    n = len(outcomes)
    hits = sum(o.crossed for o in outcomes)
    fracs = np.array([o.covered_fraction for o in outcomes], dtype=float)
    lo, hi = wilson_interval(hits, n)
    sd = float(fracs.std(ddof=1)) if n > 1 else 0.0
    return SweepPoint(label, lambda_a, lambda_b, n, hits, hits / n, lo, hi,
                      float(fracs.mean()), sd)


def run_trial(strategy: SharingStrategy, lambda_a: float, lambda_b: float, window: Window,
              params: SystemParams, seed: int, connectivity: int = 8,
              crossing: str = "horizontal") -> TrialOutcome:
    dep = sample_deployment(lambda_a, lambda_b, window, seed)
    grid = coverage_grid(strategy, dep, params)
    labels, _ = label_components(grid.covered, connectivity)
    return TrialOutcome(has_crossing(labels, crossing), grid.coverage_proportion)


def _sinr_job(args) -> TrialOutcome:
    return run_trial(*args)


def _map(fn: Callable, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) < 2:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def run_sweep(spec: SweepSpec, params: SystemParams, workers: int = 1,
              progress: Callable[[int, SweepPoint], None] | None = None) -> SweepResult:
    params.validate()
    points = []
    for gi, la in enumerate(spec.lambda_a_grid):
        jobs = [
            (spec.strategy, la, spec.lambda_b, spec.window, params,
             trial_seed(spec.master_seed, gi, t), spec.connectivity, spec.crossing)
            for t in range(spec.trials)
        ]
        outcomes = _map(_sinr_job, jobs, workers)
        pt = _aggregate(spec.strategy.value, la, spec.lambda_b, outcomes)
        points.append(pt)
        if progress is not None:
            progress(gi, pt)
    return SweepResult(tuple(points))


def _gdm_job(args) -> TrialOutcome:
    lam, radius, window, seed, connectivity, crossing = args
    pts = sample_ppp(lam, window, seed)
    covered = disk_coverage(pts, radius, window)
    labels, _ = label_components(covered, connectivity)
    return TrialOutcome(has_crossing(labels, crossing), float(covered.mean()))


def run_gdm_sweep(lambda_grid: Sequence[float], radius: float, trials: int, window: Window,
                  master_seed: int = 0, connectivity: int = 8, crossing: str = "horizontal",
                  workers: int = 1) -> SweepResult:
    """Crossing frequency of the Boolean disk model D(lambda, radius)."""
    if radius <= 0 or trials < 1:
        raise ValueError("need radius > 0 and trials >= 1")
    points = []
    for gi, lam in enumerate(lambda_grid):
        jobs = [(float(lam), radius, window, trial_seed(master_seed, gi, t), connectivity, crossing)
                for t in range(trials)]
        points.append(_aggregate("gdm", float(lam), 0.0, _map(_gdm_job, jobs, workers)))
    return SweepResult(tuple(points))


# Axial coordinates: cell (row, col) touches (row, col+-1), (row+-1, col),
# (row-1, col+1) and (row+1, col-1), i.e. the six edge-sharing hexagons.
HEX_STRUCTURE = np.array([[0, 1, 1],
                          [1, 1, 1],
                          [1, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class HexLattice:
    cols: int = 100
    rows: int = 100
    open_prob: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.cols < 2 or self.rows < 2:
            raise ValueError("lattice needs at least 2 x 2 cells")
        if not 0.0 <= self.open_prob <= 1.0:
            raise ValueError("open_prob must be in [0, 1]")


def hex_crossing(open_cells: np.ndarray) -> bool:
    """Left-right crossing of open cells on a rhombus of hexagons."""
    labels, _ = ndimage.label(open_cells, structure=HEX_STRUCTURE)
    return has_crossing(labels, "horizontal")


def run_hex_site(lattice: HexLattice, trials: int) -> float:
    hits = 0
    for t in range(trials):
        rng = np.random.default_rng(trial_seed(lattice.seed, 0, t))
        cells = rng.random((lattice.rows, lattice.cols)) < lattice.open_prob
        hits += hex_crossing(cells)
    return hits / trials


def with_strategy(spec: SweepSpec, strategy: SharingStrategy) -> SweepSpec:
    return replace(spec, strategy=SharingStrategy.parse(strategy))
