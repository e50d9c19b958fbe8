"""Profile-level measurements: sidelobe level, ISL and detected SNR."""

from __future__ import annotations

import numpy as np

# Reported instead of -inf when the sidelobe region carries no power at all.
BELOW_FLOOR_DB = -np.inf


def sidelobe_mask(num_bins: int, peak_bins, guard: int) -> np.ndarray:
    """Boolean mask of bins outside every circular peak +/- guard zone."""
    mask = np.ones(num_bins, dtype=bool)
    offsets = np.arange(-guard, guard + 1)
    for b in peak_bins:
        mask[(int(b) + offsets) % num_bins] = False
    return mask


def sidelobe_power(profile, peak_bins, guard: int) -> float:
    """Mean power over the bins outside the peak zones (linear)."""
    x = np.asarray(profile, dtype=float)
    mask = sidelobe_mask(x.size, peak_bins, guard)
    if not mask.any():
        raise ValueError("guard zones cover the whole profile")
    return float(np.mean(x[mask]))


def sidelobe_level_db(profile, peak_bins, guard: int) -> float:
    with np.errstate(divide="ignore"):
        return float(10 * np.log10(sidelobe_power(profile, peak_bins, guard)))


def measure_isl(profile, peak_bins, guard: int) -> float:
    """Mean sidelobe power relative to the strongest peak, in dB.

    Returns ``-inf`` when the sidelobe region is exactly zero.
    """
    x = np.asarray(profile, dtype=float)
    if x.size == 0:
        raise ValueError("empty profile")
    peak_bins = list(peak_bins) or [int(np.argmax(x))]
    floor = sidelobe_power(x, peak_bins, guard)
    peak = max(x[int(b)] for b in peak_bins)
    if floor == 0:
        return BELOW_FLOOR_DB
    return float(10 * np.log10(floor / peak))


def measure_snr(profile, peak_bin: int, guard: int, exclude=()) -> float:
    """Peak power at ``peak_bin`` over the mean sidelobe floor, in dB."""
    x = np.asarray(profile, dtype=float)
    floor = sidelobe_power(x, [peak_bin, *exclude], guard)
    return float(10 * np.log10(x[int(peak_bin)] / floor))
