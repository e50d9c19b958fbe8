"""Range/Doppler processing and CA-CFAR target extraction."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats
from scipy.ndimage import maximum_filter1d

from snsofdm.config import mw_to_dbm


@dataclass(frozen=True)
class CfarParams:
    """Cell-averaging CFAR window and false-alarm rate.

    Cell counts are per side of the cell under test.
    """

    train_cells: int = 16
    guard_cells: int = 4
    pfa: float = 1e-4

    def __post_init__(self):
        if self.train_cells < 1 or self.guard_cells < 0:
            raise ValueError("CFAR needs at least one training cell and non-negative guard cells")
        if not 0.0 < self.pfa < 1.0:
            raise ValueError("CFAR pfa must lie in (0, 1)")

    @property
    def window(self) -> int:
        return 2 * (self.train_cells + self.guard_cells) + 1

    def scale(self, looks: int = 1) -> float:
        """Threshold multiplier on the training-cell mean.

        Cells are sums of ``looks`` exponential powers (square-law,
        non-coherent integration). X/(X+Y) with X ~ Gamma(looks) and
        Y ~ Gamma(N*looks) is Beta(looks, N*looks) distributed.
        """
        n = 2 * self.train_cells
        b = stats.beta.isf(self.pfa, looks, n * looks)
        return n * b / (1.0 - b)


@dataclass(frozen=True)
class Detection:
    range_bin: int
    range_m: float = float("nan")
    power: float = 0.0
    snr_db: float = float("nan")
    complex_gains: np.ndarray | None = field(default=None, compare=False)


@dataclass(frozen=True, eq=False)
class RangeDopplerProduct:
    """Per-symbol range profiles Q and their non-coherent integration."""

    profiles: np.ndarray
    integrated: np.ndarray
    doppler_map: np.ndarray | None = None
    detections: tuple = ()

    @property
    def num_bins(self) -> int:
        return self.profiles.shape[0]

    @property
    def num_symbols(self) -> int:
        return self.profiles.shape[1]

    def power_dbm(self) -> np.ndarray:
        """Mean per-symbol profile power in dBm."""
        return mw_to_dbm(self.integrated / self.num_symbols)


def range_profiles(d, config=None) -> RangeDopplerProduct:
    """Orthonormal Nc-point inverse DFT of each column plus power integration."""
    d = np.asarray(d)
    q = np.fft.ifft(d, axis=0, norm="ortho")
    return RangeDopplerProduct(q, np.sum(np.abs(q) ** 2, axis=1))


def _training_mean(x: np.ndarray, params: CfarParams) -> np.ndarray:
    # Circular sliding sums via a wrapped cumulative sum.
    n = x.size
    reach = params.train_cells + params.guard_cells
    padded = np.concatenate([x[-reach:], x, x[:reach]])
    csum = np.concatenate([[0.0], np.cumsum(padded)])
    centre = np.arange(n) + reach

    def window_sum(half):
        return csum[centre + half + 1] - csum[centre - half]

    inner = window_sum(params.guard_cells)
    outer = window_sum(reach)
    return (outer - inner) / (2 * params.train_cells)


def cfar_threshold(integrated: np.ndarray, params: CfarParams, looks: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Return (threshold, noise estimate) per cell for a circular profile."""
    x = np.asarray(integrated, dtype=float)
    if x.size < params.window:
        raise ValueError(f"profile of {x.size} cells is shorter than the CFAR window ({params.window})")
    noise = _training_mean(x, params)
    return params.scale(looks) * noise, noise


def cfar_detect(integrated, params: CfarParams | None = None, looks: int = 1, range_resolution: float | None = None) -> list[Detection]:
    """CA-CFAR with circular windows; one detection per local maximum."""
    params = params or CfarParams()
    x = np.asarray(integrated, dtype=float)
    threshold, noise = cfar_threshold(x, params, looks)
    local_max = maximum_filter1d(x, size=2 * params.guard_cells + 1, mode="wrap")
    hits = np.flatnonzero((x > threshold) & (x >= local_max))
    res = float("nan") if range_resolution is None else range_resolution
    with np.errstate(divide="ignore"):
        return [
            Detection(
                range_bin=int(b),
                range_m=b * res,
                power=float(x[b] / looks),
                snr_db=float(10 * np.log10(x[b] / noise[b])),
            )
            for b in hits
        ]


def extract_targets(product: RangeDopplerProduct, detections) -> list[Detection]:
    """Attach per-symbol complex gains (alpha * exp(j q w Ts) estimates).

    The orthonormal inverse DFT gives an on-bin target a peak of
    sqrt(Nc) * alpha, so the profile value is divided by sqrt(Nc).
    """
    norm = np.sqrt(product.num_bins)
    return [replace(det, complex_gains=product.profiles[det.range_bin] / norm) for det in detections]


def doppler_process(product: RangeDopplerProduct) -> np.ndarray:
    """Ns-point forward DFT across symbols for each range bin."""
    if product.num_symbols < 2:
        raise ValueError("Doppler processing requires multiple symbols")
    return np.fft.fft(product.profiles, axis=1)
