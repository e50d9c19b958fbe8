"""Multi-target radar channel: frequency-domain fast model and time-domain exact model."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from snsofdm.config import SPEED_OF_LIGHT, RadarConfig
from snsofdm.waveform import SymbolMatrix, TimeSignal, demodulate


class Band(str, enum.Enum):
    FULL = "full"
    FOLDED = "folded"


@dataclass(frozen=True, eq=False)
class FreqFrame:
    """A (rows x Ns) frequency-domain frame, either full band or folded."""

    entries: np.ndarray
    band: Band = Band.FULL

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ValueError("frequency frame must be two-dimensional")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "band", Band(self.band))

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class Target:
    """Point target: round-trip delay (s), Doppler (rad/s) and complex amplitude.

    ``abs(amplitude)**2`` is the received power per frequency bin in mW.
    """

    delay: float
    doppler: float = 0.0
    amplitude: complex = 1.0

    def __post_init__(self):
        if not np.isfinite(self.amplitude) or self.amplitude == 0:
            raise ValueError("target amplitude must be finite and nonzero")
        if self.delay < 0:
            raise ValueError("target delay must be non-negative")

    @classmethod
    def from_range(cls, range_m, config: RadarConfig, velocity=0.0, amplitude=1.0) -> "Target":
        delay = 2.0 * range_m / SPEED_OF_LIGHT
        doppler = 4.0 * np.pi * config.carrier_freq * velocity / SPEED_OF_LIGHT
        return cls(delay, doppler, amplitude)

    @classmethod
    def on_bin(cls, range_bin: int, config: RadarConfig, doppler=0.0, amplitude=1.0) -> "Target":
        return cls(range_bin / config.bandwidth, doppler, amplitude)

    @property
    def range_m(self) -> float:
        return SPEED_OF_LIGHT * self.delay / 2.0

    @property
    def power(self) -> float:
        return abs(self.amplitude) ** 2

    def velocity(self, config: RadarConfig) -> float:
        return self.doppler * SPEED_OF_LIGHT / (4.0 * np.pi * config.carrier_freq)

    def normalized_doppler(self, config: RadarConfig) -> float:
        return self.doppler / (2.0 * np.pi * config.subcarrier_spacing)

    def ambiguous(self, config: RadarConfig) -> bool:
        """True when the delay falls outside the unambiguous span [0, 1/df)."""
        return not 0.0 <= self.delay < 1.0 / config.subcarrier_spacing


@dataclass(frozen=True)
class TargetSet:
    targets: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))

    def __iter__(self):
        return iter(self.targets)

    def __len__(self):
        return len(self.targets)

    def __or__(self, other: "TargetSet") -> "TargetSet":
        return TargetSet(self.targets + tuple(other))

    @property
    def total_power(self) -> float:
        return float(sum(t.power for t in self.targets))


def _as_targets(targets) -> TargetSet:
    return targets if isinstance(targets, TargetSet) else TargetSet(tuple(targets))


def steering_vectors(target: Target, config: RadarConfig):
    """Range (Nc) and Doppler (Ns) steering vectors, 0-based phase indices."""
    n = np.arange(config.num_subcarriers)
    q = np.arange(config.num_symbols)
    range_vec = np.exp(-2j * np.pi * n * config.subcarrier_spacing * target.delay)
    doppler_vec = np.exp(1j * q * target.doppler * config.symbol_duration)
    return range_vec, doppler_vec


def target_matrix(targets, config: RadarConfig) -> np.ndarray:
    """X = R A V^T, the noiseless target response per subcarrier and symbol."""
    targets = _as_targets(targets)
    x = np.zeros((config.num_subcarriers, config.num_symbols), dtype=complex)
    for target in targets:
        r, v = steering_vectors(target, config)
        x += target.amplitude * np.outer(r, v)
    return x


def complex_noise(rng: np.random.Generator, shape, power: float) -> np.ndarray:
    """Circular complex Gaussian samples with E|w|^2 = power."""
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def apply_channel_freq(symbols: SymbolMatrix, targets, config: RadarConfig, add_noise=True, rng=None) -> FreqFrame:
    """Received full-band frame S = C * X + W."""
    s = symbols.entries * target_matrix(targets, config)
    if add_noise and config.noise_power > 0:
        rng = config.rng("noise") if rng is None else rng
        s = s + complex_noise(rng, s.shape, config.noise_power)
    return FreqFrame(s, Band.FULL)


def _delayed_echo(symbols: np.ndarray, delay_samples: float, config: RadarConfig) -> np.ndarray:
    # Band-limited CP-OFDM evaluated at (m - delay) for every received sample m,
    # with the frame treated as periodic so early samples see the previous frame.
    nc, ns = symbols.shape
    ncp = config.cp_samples
    per_symbol = nc + ncp
    whole = int(np.floor(delay_samples))
    frac = delay_samples - whole
    n = np.arange(nc)
    shifted = np.fft.ifft(symbols * np.exp(-2j * np.pi * n * frac / nc)[:, None], axis=0)
    j = np.arange(ns * per_symbol) - whole
    src = np.floor((j - frac) / per_symbol).astype(np.int64)
    idx = (j - src * per_symbol - ncp) % nc
    return shifted[idx, src % ns]


def _time_noise(rng, config: RadarConfig) -> np.ndarray:
    # Drawn as the per-bin matrix W first, so the time model sees the same noise
    # realization as the frequency model. Body samples are white with variance
    # sigma^2/Nc; CP positions get independent draws of the same variance.
    nc, ns, ncp = config.num_subcarriers, config.num_symbols, config.cp_samples
    w = complex_noise(rng, (nc, ns), config.noise_power)
    body = np.fft.ifft(w, axis=0)
    cp = complex_noise(rng, (ncp, ns), config.noise_power / nc)
    return np.concatenate([cp, body], axis=0).T.ravel()


def apply_channel_time(tx: TimeSignal, targets, config: RadarConfig, add_noise=True, rng=None) -> TimeSignal:
    """Exact sample-level echo model with intra-symbol Doppler rotation.

    Each echo is the transmitted band-limited waveform delayed by the target
    delay (fractional delays via a per-symbol subcarrier phase ramp) and
    multiplied by ``exp(j*doppler*t)`` with ``t`` measured from frame start.
    Moving targets therefore produce inter-carrier interference.
    """
    targets = _as_targets(targets)
    expected = config.num_symbols * config.samples_per_symbol
    if len(tx.samples) != expected:
        raise ValueError(f"transmit signal has {len(tx.samples)} samples, expected {expected}")
    # tx is a CP-OFDM frame, so its subcarrier symbols are recoverable exactly.
    symbols = demodulate(tx, config)
    t = np.arange(expected) / config.bandwidth
    rx = np.zeros(expected, dtype=complex)
    isi = False
    for target in targets:
        echo = _delayed_echo(symbols, target.delay * config.bandwidth, config)
        if target.doppler:
            echo = echo * np.exp(1j * target.doppler * t)
        rx += target.amplitude * echo
        isi = isi or target.delay > config.cp_duration
    if add_noise and config.noise_power > 0:
        rng = config.rng("noise") if rng is None else rng
        rx += _time_noise(rng, config)
    return TimeSignal(rx, config.bandwidth, isi=isi)
