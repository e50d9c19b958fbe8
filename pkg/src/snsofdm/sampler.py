"""ADC model: uniform sub-Nyquist decimation and folded demodulation."""

from __future__ import annotations

import numpy as np

from snsofdm.channel import Band, FreqFrame
from snsofdm.config import RadarConfig
from snsofdm.waveform import TimeSignal


def subsample(rx: TimeSignal, config: RadarConfig) -> TimeSignal:
    """Keep every L-th complex sample, starting at offset 0. No anti-alias filter."""
    ell = config.sub_sampling_ratio
    if not np.isclose(rx.sample_rate, config.bandwidth):
        raise ValueError(f"expected a Nyquist-rate signal at {config.bandwidth} Hz, got {rx.sample_rate} Hz")
    return TimeSignal(np.asarray(rx.samples)[::ell], config.bandwidth / ell, isi=rx.isi)


def demodulate_folded(rx_sub: TimeSignal | np.ndarray, config: RadarConfig) -> FreqFrame:
    """Folded frame Z from a symbol-aligned signal sampled at B/L.

    Drops Ncp/L samples per symbol and takes the (Nc/L)-point DFT. The DFT is
    scaled by L so that Z equals the sum of the L full-band row blocks.
    """
    samples = np.asarray(rx_sub.samples if isinstance(rx_sub, TimeSignal) else rx_sub)
    ell = config.sub_sampling_ratio
    per_symbol = config.samples_per_symbol // ell
    expected = per_symbol * config.num_symbols
    if samples.size != expected:
        raise ValueError(
            f"misaligned capture: expected {expected} samples "
            f"({config.num_symbols} symbols x {per_symbol}), got {samples.size}"
        )
    body = samples.reshape(config.num_symbols, per_symbol)[:, config.cp_samples // ell:]
    z = ell * np.fft.fft(body, axis=1).T
    return FreqFrame(z, Band.FOLDED if ell > 1 else Band.FULL)


def fold_frame(frame, num_blocks: int) -> FreqFrame:
    """Sum the L row blocks of a full-band frame (frequency-domain aliasing)."""
    s = np.asarray(frame)
    rows, cols = s.shape
    if rows % num_blocks:
        raise ValueError(f"{num_blocks} blocks do not tile {rows} rows")
    z = s.reshape(num_blocks, rows // num_blocks, cols).sum(axis=0)
    return FreqFrame(z, Band.FOLDED if num_blocks > 1 else Band.FULL)


def synthesize_folded(z, config: RadarConfig) -> TimeSignal:
    """Inverse of :func:`demodulate_folded`: the B/L-rate samples whose folded frame is ``z``."""
    z = np.asarray(z)
    ell = config.sub_sampling_ratio
    body = np.fft.ifft(z, axis=0) / ell
    ncp = config.cp_samples // ell
    if ncp:
        body = np.concatenate([body[-ncp:], body], axis=0)
    return TimeSignal(body.T.ravel(), config.bandwidth / ell)
