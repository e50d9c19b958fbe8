"""OFDM symbol generation and CP-OFDM synthesis."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from snsofdm.config import ConfigError, RadarConfig


class Constellation(str, enum.Enum):
    BPSK = "BPSK"
    QPSK = "QPSK"
    QAM16 = "QAM16"

    @classmethod
    def parse(cls, value) -> "Constellation":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(f"unsupported constellation: {value!r}") from None

    def points(self) -> np.ndarray:
        if self is Constellation.BPSK:
            return np.array([1.0, -1.0], dtype=complex)
        if self is Constellation.QPSK:
            return np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / np.sqrt(2)
        levels = np.array([-3.0, -1.0, 1.0, 3.0])
        grid = (levels[:, None] + 1j * levels[None, :]).ravel()
        return grid / np.sqrt(10.0)  # unit average power


@dataclass(frozen=True, eq=False)
class SymbolMatrix:
    """Transmitted constellation symbols, one column per OFDM symbol.

    Rows are subcarriers (Nc), columns are OFDM symbols (Ns). ``block(k)``
    returns the k-th of ``L`` contiguous row blocks, 1-based.
    """

    entries: np.ndarray
    constellation: Constellation = Constellation.QPSK

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ValueError("symbol matrix must be two-dimensional")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def blocks(self, num_blocks: int) -> np.ndarray:
        """All row blocks stacked as an array of shape (L, Nc/L, Ns)."""
        nc, ns = self.entries.shape
        if num_blocks < 1 or nc % num_blocks:
            raise ValueError(f"{num_blocks} blocks do not tile {nc} rows")
        return self.entries.reshape(num_blocks, nc // num_blocks, ns)

    def block(self, k: int, num_blocks: int) -> np.ndarray:
        if not 1 <= k <= num_blocks:
            raise IndexError(f"block index {k} outside 1..{num_blocks}")
        return self.blocks(num_blocks)[k - 1]


@dataclass(frozen=True, eq=False)
class TimeSignal:
    """Complex baseband samples at a given sample rate.

    ``isi`` flags that at least one echo was delayed past the cyclic prefix.
    """

    samples: np.ndarray
    sample_rate: float
    isi: bool = False

    def __len__(self):
        return len(self.samples)


def generate_symbols(config: RadarConfig, constellation="QPSK", rng=None) -> SymbolMatrix:
    """Draw an Nc x Ns matrix of i.i.d. uniform constellation points.

    The draw is reproducible from ``config.rng_seed`` unless an explicit
    generator is passed.
    """
    constellation = Constellation.parse(constellation)
    if rng is None:
        rng = config.rng("symbols")
    points = constellation.points()
    idx = rng.integers(0, len(points), size=(config.num_subcarriers, config.num_symbols))
    return SymbolMatrix(points[idx], constellation)


def _check_cp(config: RadarConfig) -> int:
    ncp = config.cp_duration * config.bandwidth
    if abs(ncp - round(ncp)) > 1e-9 * max(1.0, ncp):
        raise ConfigError(f"cp_duration*bandwidth = {ncp!r} is not integral")
    return int(round(ncp))


def modulate(symbols: SymbolMatrix | np.ndarray, config: RadarConfig) -> TimeSignal:
    """Synthesize the baseband CP-OFDM frame at sample rate ``config.bandwidth``.

    Each column goes through an Nc-point inverse DFT (1/Nc scaling) and gets
    its last Ncp samples prepended. Returns a flat array of
    ``Ns * (Nc + Ncp)`` complex samples.
    """
    entries = symbols.entries if isinstance(symbols, SymbolMatrix) else np.asarray(symbols)
    if entries.shape != (config.num_subcarriers, config.num_symbols):
        raise ValueError(
            f"symbol matrix shape {entries.shape} does not match config "
            f"({config.num_subcarriers}, {config.num_symbols})"
        )
    ncp = _check_cp(config)
    body = np.fft.ifft(entries, axis=0)
    if ncp:
        body = np.concatenate([body[-ncp:], body], axis=0)
    return TimeSignal(body.T.ravel(), config.bandwidth)


def demodulate(signal: TimeSignal | np.ndarray, config: RadarConfig) -> np.ndarray:
    """Full-band receiver: strip the CP and take the Nc-point DFT per symbol."""
    samples = signal.samples if isinstance(signal, TimeSignal) else signal
    ncp = _check_cp(config)
    per_symbol = config.num_subcarriers + ncp
    expected = per_symbol * config.num_symbols
    samples = np.asarray(samples)
    if samples.size != expected:
        raise ValueError(f"expected {expected} samples, got {samples.size}")
    frame = samples.reshape(config.num_symbols, per_symbol)[:, ncp:]
    return np.fft.fft(frame, axis=1).T
