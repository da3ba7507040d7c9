"""Poisson deployments and rasterised SINR coverage fields.

Coordinates are metres.  The observation window is ``[0, width] x [0,
height]``; BSs are sampled on the window extended by ``guard`` on every side
so that coverage and interference near the edges are not biased.  Coverage
is evaluated at pixel centres of the interior window only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .params import SharingStrategy, SystemParams

# rows per block when building SINR rasters; bounds the (n_bs, rows, cols) temporaries
_CHUNK_ROWS = 64


@dataclass(frozen=True)
class Window:
    width: float = 4000.0
    height: float = 4000.0
    guard: float = 1800.0
    pixel: float = 10.0

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0 and self.pixel > 0):
            raise ValueError("width, height and pixel must be positive")
        if self.guard < 0:
            raise ValueError("guard must be >= 0")
        if self.pixel > min(self.width, self.height) / 10.0:
            raise ValueError("pixel must be at most a tenth of the window side")

    @property
    def shape(self) -> tuple[int, int]:
        """Raster shape as (rows, cols) = (ny, nx)."""
        return (max(1, int(round(self.height / self.pixel))),
                max(1, int(round(self.width / self.pixel))))

    @property
    def extended_area(self) -> float:
        return (self.width + 2 * self.guard) * (self.height + 2 * self.guard)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """Guard-extended sampling rectangle (xmin, xmax, ymin, ymax)."""
        g = self.guard
        return (-g, self.width + g, -g, self.height + g)

    def pixel_centers(self) -> tuple[np.ndarray, np.ndarray]:
        ny, nx = self.shape
        xs = (np.arange(nx) + 0.5) * (self.width / nx)
        ys = (np.arange(ny) + 0.5) * (self.height / ny)
        return xs, ys


@dataclass(frozen=True)
class Deployment:
    points_a: np.ndarray
    points_b: np.ndarray
    lambda_a: float
    lambda_b: float
    window: Window
    seed: int | None = None

    @property
    def all_points(self) -> np.ndarray:
        return np.concatenate([self.points_a, self.points_b], axis=0)


@dataclass
class CoverageGrid:
    """Coverage raster for one strategy.

    ``cover_count`` counts BSs whose own SINR clears the threshold at the
    pixel (summed over both spectra for active sharing).  ``serving_index``
    is the index of the nearest BS that serves the pixel, into
    ``Deployment.all_points`` for active/passive sharing and into
    ``points_a`` for no sharing; -1 where no BS exists.
    """

    covered: np.ndarray
    cover_count: np.ndarray
    serving_index: np.ndarray
    best_sinr: np.ndarray
    strategy: SharingStrategy
    window: Window = field(repr=False)

    @property
    def coverage_proportion(self) -> float:
        return float(self.covered.mean())


def _empty_points() -> np.ndarray:
    return np.empty((0, 2), dtype=float)


def sample_ppp(lam: float, window: Window, seed=None) -> np.ndarray:
    """Homogeneous PPP of intensity ``lam`` on the guard-extended window.

    ``seed`` may be anything accepted by ``numpy.random.default_rng``,
    including an existing Generator.
    """
    if lam < 0:
        raise ValueError(f"density must be >= 0, got {lam}")
    rng = np.random.default_rng(seed)
    n = rng.poisson(lam * window.extended_area) if lam > 0 else 0
    if n == 0:
        return _empty_points()
    xmin, xmax, ymin, ymax = window.bounds
    pts = rng.random((n, 2))
    pts[:, 0] = xmin + pts[:, 0] * (xmax - xmin)
    pts[:, 1] = ymin + pts[:, 1] * (ymax - ymin)
    return pts


def sample_deployment(lambda_a: float, lambda_b: float, window: Window, seed: int) -> Deployment:
    # operators draw from independent child streams of the trial seed
    ss_a, ss_b = np.random.SeedSequence(seed).spawn(2)
    return Deployment(
        points_a=sample_ppp(lambda_a, window, np.random.default_rng(ss_a)),
        points_b=sample_ppp(lambda_b, window, np.random.default_rng(ss_b)),
        lambda_a=lambda_a,
        lambda_b=lambda_b,
        window=window,
        seed=seed,
    )


def path_gain(d2: np.ndarray, alpha: float) -> np.ndarray:
    """Distance attenuation from squared distance, clamped to 1 within 1 m."""
    d2 = np.maximum(np.asarray(d2, dtype=float), 1.0)
    if alpha == 4.0:
        return 1.0 / (d2 * d2)
    return d2 ** (-alpha / 2.0)


def sinr_at(point, signal_bs, interferers, params: SystemParams) -> float:
    """SINR at ``point`` from ``signal_bs`` with co-channel ``interferers``."""
    z = np.asarray(point, dtype=float)
    s = path_gain(np.sum((np.asarray(signal_bs, dtype=float) - z) ** 2), params.alpha)
    others = np.asarray(interferers, dtype=float).reshape(-1, 2)
    interference = path_gain(np.sum((others - z) ** 2, axis=1), params.alpha).sum()
    # powers normalised by N_0, so P_t becomes beta0
    return float(params.beta0 * s / (1.0 + params.gamma * params.beta0 * interference))


def _network_fields(points: np.ndarray, window: Window, params: SystemParams):
    """Per-pixel nearest index, nearest-BS SINR and covering-BS count.

    All BSs in ``points`` share one spectrum and interfere with each other.
    """
    ny, nx = window.shape
    nearest = np.full((ny, nx), -1, dtype=np.int32)
    sinr = np.zeros((ny, nx), dtype=float)
    count = np.zeros((ny, nx), dtype=np.int16)
    if len(points) == 0:
        return nearest, sinr, count

    xs, ys = window.pixel_centers()
    dx2 = (points[:, 0, None] - xs[None, :]) ** 2          # (n, nx)
    b0, g, beta = params.beta0, params.gamma, params.beta
    for r0 in range(0, ny, _CHUNK_ROWS):
        r1 = min(ny, r0 + _CHUNK_ROWS)
        dy2 = (points[:, 1, None] - ys[None, r0:r1]) ** 2    # (n, rows)
        d2 = dy2[:, :, None] + dx2[:, None, :]               # (n, rows, nx)
        gain = path_gain(d2, params.alpha)
        total = gain.sum(axis=0)
        idx = np.argmin(d2, axis=0)
        g_near = np.take_along_axis(gain, idx[None], axis=0)[0]
        sinr[r0:r1] = b0 * g_near / (1.0 + g * b0 * (total - g_near))
        # BS i covers z iff b0*l_i >= beta*(1 + g*b0*(total - l_i))
        ok = b0 * gain >= beta * (1.0 + g * b0 * (total[None] - gain))
        count[r0:r1] = ok.sum(axis=0)
        nearest[r0:r1] = idx
    return nearest, sinr, count


def coverage_grid(strategy: SharingStrategy, deployment: Deployment,
                  params: SystemParams) -> CoverageGrid:
    strategy = SharingStrategy.parse(strategy)
    window = deployment.window
    beta = params.beta
    if strategy is SharingStrategy.NO_SHARING:
        idx, sinr, count = _network_fields(deployment.points_a, window, params)
        covered = sinr >= beta
    elif strategy is SharingStrategy.PASSIVE_SHARING:
        idx, sinr, count = _network_fields(deployment.all_points, window, params)
        covered = sinr >= beta
    else:
        # separate spectra: each operator's BSs only interfere with their own
        idx_a, sinr_a, cnt_a = _network_fields(deployment.points_a, window, params)
        idx_b, sinr_b, cnt_b = _network_fields(deployment.points_b, window, params)
        n_a = len(deployment.points_a)
        use_b = sinr_b > sinr_a
        idx = np.where(use_b, np.where(idx_b >= 0, idx_b + n_a, -1), idx_a).astype(np.int32)
        sinr = np.where(use_b, sinr_b, sinr_a)
        count = (cnt_a + cnt_b).astype(np.int16)
        covered = (sinr_a >= beta) | (sinr_b >= beta)
    return CoverageGrid(covered=covered, cover_count=count, serving_index=idx,
                        best_sinr=sinr, strategy=strategy, window=window)


@dataclass(frozen=True)
class UnionCheck:
    identical: bool
    mismatches: int


def sca_union_equals_ca_union(points: np.ndarray, window: Window,
                              params: SystemParams) -> UnionCheck:
    """Compare any-BS coverage with nearest-BS-only coverage on one spectrum.

    The first raster marks pixels where at least one BS achieves the SINR
    threshold; the second only tests each pixel's nearest BS.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    _, sinr_nearest, count = _network_fields(points, window, params)
    any_bs = count >= 1
    nearest_only = sinr_nearest >= params.beta
    mism = int(np.count_nonzero(any_bs != nearest_only))
    return UnionCheck(identical=mism == 0, mismatches=mism)


def disk_coverage(points: np.ndarray, radius: float, window: Window) -> np.ndarray:
    """Boolean raster of the union of radius-``radius`` disks (Gilbert model)."""
    ny, nx = window.shape
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return np.zeros((ny, nx), dtype=bool)
    xs, ys = window.pixel_centers()
    gx, gy = np.meshgrid(xs, ys)
    tree = cKDTree(points)
    d, _ = tree.query(np.column_stack([gx.ravel(), gy.ravel()]), k=1,
                      distance_upper_bound=radius * (1 + 1e-12))
    return (d <= radius).reshape(ny, nx)


_STRUCTURES = {
    4: ndimage.generate_binary_structure(2, 1),
    8: ndimage.generate_binary_structure(2, 2),
}


def label_components(covered, connectivity: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """Connected components of covered pixels.

    Returns ``(labels, sizes)``: labels are 1..n (0 = uncovered) and
    ``sizes[k]`` is the pixel count of component ``k + 1``.
    """
    if isinstance(covered, CoverageGrid):
        covered = covered.covered
    try:
        structure = _STRUCTURES[int(connectivity)]
    except KeyError:
        raise ValueError("connectivity must be 4 or 8") from None
    labels, n = ndimage.label(np.asarray(covered, dtype=bool), structure=structure)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)[1:]
    return labels, sizes


def _spans(first: np.ndarray, last: np.ndarray) -> bool:
    common = np.intersect1d(first, last)
    return bool(np.any(common > 0))


def has_crossing(labels: np.ndarray, direction: str = "horizontal") -> bool:
    """Whether one component touches two opposite window edges.

    ``direction``: ``"horizontal"`` (left to right), ``"vertical"``, or
    ``"both"`` (requires crossings in both directions).
    """
    h = _spans(labels[:, 0], labels[:, -1])
    if direction == "horizontal":
        return h
    v = _spans(labels[0, :], labels[-1, :])
    if direction == "vertical":
        return v
    if direction == "both":
        return h and v
    raise ValueError(f"unknown crossing direction {direction!r}")


def default_guard(max_lambda: float, params: SystemParams) -> float:
    from .analytic import avg_coverage_radius, snr_radius

    r_snr = snr_radius(params)
    try:
        r = avg_coverage_radius(max_lambda, params)
    except ArithmeticError:
        r = r_snr
    return min(2.0 * r, 2.0 * r_snr)


def write_pgm(path: "str | Path", covered: np.ndarray) -> None:
    """Binary PGM (P5): 255 = covered, 0 = uncovered; top row is max y."""
    img = np.where(np.asarray(covered, dtype=bool)[::-1], 255, 0).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path: "str | Path") -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = int(parts[1]), int(parts[2])
    pix = np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)
    return pix[::-1] > 0
