import numpy as np
import pytest

from snsofdm import RadarConfig, Target, TargetSet, dbm_to_mw

TWO_TARGET_BINS = (27, 67)  # 4 m and 10 m on the 0.1499 m grid


def small_config(**kw):
    """Nc = 8, B = 8 MHz, Ncp = 2 samples; L in {1, 2} is valid."""
    base = dict(num_subcarriers=8, num_symbols=2, bandwidth=8e6, cp_duration=0.25e-6, carrier_freq=1e9,
                sub_sampling_ratio=2, noise_power=0.0, rng_seed=3)
    base.update(kw)
    return RadarConfig(**base)


def reference_config(**kw):
    base = dict(num_subcarriers=2048, num_symbols=1, bandwidth=1e9, cp_duration=0.512e-6, carrier_freq=77e9,
                sub_sampling_ratio=8, noise_power=float(dbm_to_mw(-80)), rng_seed=7)
    base.update(kw)
    return RadarConfig(**base)


def two_targets(config):
    return TargetSet([
        Target.on_bin(TWO_TARGET_BINS[0], config, amplitude=1.0),
        Target.on_bin(TWO_TARGET_BINS[1], config, amplitude=float(np.sqrt(dbm_to_mw(-26)))),
    ])


@pytest.fixture
def small():
    return small_config()


@pytest.fixture
def reference():
    return reference_config()
