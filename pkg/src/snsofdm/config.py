"""Radar configuration and unit helpers."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

# Tolerance used when checking that a duration maps onto an integer sample count.
_INTEGRAL_TOL = 1e-9


class ConfigError(ValueError):
    """Raised when a radar configuration violates a structural constraint."""


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(np.asarray(mw, dtype=float))


@dataclass(frozen=True)
class RadarConfig:
    """Waveform and sampling constants of one OFDM radar frame.

    The bandwidth and the number of subcarriers are primary; the subcarrier
    spacing, symbol duration and cyclic-prefix length are derived from them.

    Attributes:
        num_subcarriers: Subcarriers per OFDM symbol (Nc).
        num_symbols: OFDM symbols per frame (Ns).
        bandwidth: Total signal bandwidth in Hz, equal to the Nyquist rate.
        cp_duration: Cyclic prefix duration in seconds.
        carrier_freq: RF carrier in Hz, used only for velocity conversion.
        sub_sampling_ratio: ADC decimation factor L (1 means Nyquist).
        noise_power: Per-frequency-bin noise power in linear mW.
        rng_seed: Root seed for every random stream of a run.
    """

    num_subcarriers: int = 2048
    num_symbols: int = 1
    bandwidth: float = 1e9
    cp_duration: float = 0.512e-6
    carrier_freq: float = 77e9
    sub_sampling_ratio: int = 1
    noise_power: float = 1e-8
    rng_seed: int = 0

    def __post_init__(self):
        nc, ns, ell = self.num_subcarriers, self.num_symbols, self.sub_sampling_ratio
        for name, value in (("num_subcarriers", nc), ("num_symbols", ns), ("sub_sampling_ratio", ell)):
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        for name in ("bandwidth", "cp_duration", "carrier_freq"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        if self.noise_power < 0 or not np.isfinite(self.noise_power):
            raise ConfigError("noise_power must be finite and non-negative")
        if nc % ell:
            raise ConfigError(f"L must divide Nc (L={ell}, Nc={nc})")
        ncp_exact = self.cp_duration * self.bandwidth
        if abs(ncp_exact - round(ncp_exact)) > _INTEGRAL_TOL * max(1.0, ncp_exact):
            raise ConfigError(f"cp_duration*bandwidth = {ncp_exact!r} is not an integer sample count")
        if round(ncp_exact) % ell:
            raise ConfigError(f"L must divide the cyclic prefix length (L={ell}, Ncp={round(ncp_exact)})")

    @property
    def subcarrier_spacing(self) -> float:
        return self.bandwidth / self.num_subcarriers

    @property
    def symbol_duration(self) -> float:
        """OFDM symbol duration including the cyclic prefix (Ts)."""
        return 1.0 / self.subcarrier_spacing + self.cp_duration

    @property
    def cp_samples(self) -> int:
        return int(round(self.cp_duration * self.bandwidth))

    @property
    def samples_per_symbol(self) -> int:
        return self.num_subcarriers + self.cp_samples

    @property
    def folded_subcarriers(self) -> int:
        return self.num_subcarriers // self.sub_sampling_ratio

    @property
    def adc_rate(self) -> float:
        return self.bandwidth / self.sub_sampling_ratio

    @property
    def range_resolution(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.bandwidth)

    @property
    def max_range(self) -> float:
        return self.num_subcarriers * self.range_resolution

    def replace(self, **changes) -> "RadarConfig":
        values = asdict(self)
        values.update(changes)
        return RadarConfig(**values)

    def to_dict(self) -> dict:
        return asdict(self)

    def rng(self, stream: str) -> np.random.Generator:
        """Independent generator for a named random stream of this run."""
        key = [int.from_bytes(stream.encode(), "little") % (2**63)]
        return np.random.default_rng(np.random.SeedSequence(self.rng_seed, spawn_key=key))
