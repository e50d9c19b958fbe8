"""Sub-Nyquist sampling OFDM radar simulation and processing."""

from snsofdm.config import ConfigError, RadarConfig, dbm_to_mw, mw_to_dbm
from snsofdm.waveform import Constellation, SymbolMatrix, generate_symbols, modulate, demodulate
from snsofdm.channel import (
    FreqFrame,
    Target,
    TargetSet,
    TimeSignal,
    apply_channel_freq,
    apply_channel_time,
    steering_vectors,
)
from snsofdm.sampler import demodulate_folded, fold_frame, subsample
from snsofdm.unfold import demod_subband, unfold_full
from snsofdm.detect import (
    CfarParams,
    Detection,
    RangeDopplerProduct,
    cfar_detect,
    doppler_process,
    extract_targets,
    range_profiles,
)
from snsofdm.smnc import SmncReport, SmncState, reconstruct_smn, run_smnc, smnc_init, smnc_iterate

__version__ = "0.1.0"

__all__ = [
    "CfarParams",
    "ConfigError",
    "Constellation",
    "Detection",
    "FreqFrame",
    "RadarConfig",
    "RangeDopplerProduct",
    "SmncReport",
    "SmncState",
    "SymbolMatrix",
    "Target",
    "TargetSet",
    "TimeSignal",
    "apply_channel_freq",
    "apply_channel_time",
    "cfar_detect",
    "dbm_to_mw",
    "demod_subband",
    "demodulate",
    "demodulate_folded",
    "doppler_process",
    "extract_targets",
    "fold_frame",
    "generate_symbols",
    "modulate",
    "mw_to_dbm",
    "range_profiles",
    "reconstruct_smn",
    "run_smnc",
    "smnc_init",
    "smnc_iterate",
    "steering_vectors",
    "subsample",
    "unfold_full",
]
