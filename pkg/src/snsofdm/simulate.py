"""Front end shared by the pipeline and the sweeps: symbols -> channel -> ADC -> unfolded frame."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from snsofdm.channel import FreqFrame, TargetSet, apply_channel_freq, apply_channel_time
from snsofdm.config import RadarConfig
from snsofdm.sampler import demodulate_folded, fold_frame, subsample
from snsofdm.unfold import unfold_full
from snsofdm.waveform import SymbolMatrix, TimeSignal, generate_symbols, modulate


class ChannelModel(str, enum.Enum):
    FREQ = "freq"
    TIME = "time"


@dataclass(frozen=True, eq=False)
class SimulatedFrame:
    symbols: SymbolMatrix
    folded: FreqFrame
    unfolded: FreqFrame
    rx_sub: TimeSignal | None = None


def simulate_frame(config: RadarConfig, targets: TargetSet, channel_model="freq", constellation="QPSK", add_noise=True) -> SimulatedFrame:
    """Simulate one received frame and unfold it.

    The ``freq`` model folds the full-band frame by row-block summation; the
    ``time`` model synthesizes the waveform, applies the exact echo model and
    decimates the samples. Both use the same symbol and noise streams.
    """
    model = ChannelModel(channel_model)
    symbols = generate_symbols(config, constellation)
    ell = config.sub_sampling_ratio
    rx_sub = None
    if model is ChannelModel.FREQ:
        s = apply_channel_freq(symbols, targets, config, add_noise)
        z = fold_frame(s, ell)
    else:
        rx = apply_channel_time(modulate(symbols, config), targets, config, add_noise)
        rx_sub = subsample(rx, config)
        z = demodulate_folded(rx_sub, config)
    return SimulatedFrame(symbols, z, unfold_full(z, symbols), rx_sub)


def trial_seeds(base_seed: int, trials: int) -> list[int]:
    """Seeds for Monte-Carlo trials; trial 0 reuses the scenario seed."""
    return [base_seed + i for i in range(trials)]
