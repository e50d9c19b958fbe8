import numpy as np
import pytest

from snsofdm import ConfigError, RadarConfig, dbm_to_mw, mw_to_dbm


def test_reference_derived_quantities():
    cfg = RadarConfig(sub_sampling_ratio=8)
    assert cfg.subcarrier_spacing == pytest.approx(488.28125e3)
    assert cfg.symbol_duration == pytest.approx(2.56e-6)
    assert cfg.cp_samples == 512 == cfg.num_subcarriers // 4
    assert cfg.adc_rate == pytest.approx(125e6)
    assert cfg.range_resolution == pytest.approx(0.1499, abs=1e-4)


@pytest.mark.parametrize("ell", [1, 2, 4, 8, 16, 32])
def test_reference_adc_rates(ell):
    cfg = RadarConfig(sub_sampling_ratio=ell)
    assert cfg.adc_rate == pytest.approx(1e9 / ell)


def test_ratio_must_divide_subcarriers():
    with pytest.raises(ConfigError, match="L must divide Nc"):
        RadarConfig(sub_sampling_ratio=3)


def test_ratio_must_divide_cp():
    # Nc = 64 with a 4-sample CP: L = 8 divides Nc but not Ncp.
    with pytest.raises(ConfigError, match="cyclic prefix"):
        RadarConfig(num_subcarriers=64, bandwidth=64e6, cp_duration=4 / 64e6, sub_sampling_ratio=8)


def test_non_integral_cp_rejected():
    with pytest.raises(ConfigError, match="integer sample count"):
        RadarConfig(cp_duration=0.5125e-6)


@pytest.mark.parametrize("field", ["num_subcarriers", "num_symbols", "sub_sampling_ratio"])
def test_positive_integers(field):
    with pytest.raises(ConfigError):
        RadarConfig(**{field: 0})


def test_dbm_round_trip():
    assert dbm_to_mw(-80) == pytest.approx(1e-8)
    assert mw_to_dbm(dbm_to_mw(-26.0)) == pytest.approx(-26.0)
    assert mw_to_dbm(0.0) == -np.inf


def test_named_streams_are_independent_and_reproducible():
    cfg = RadarConfig(rng_seed=11)
    a = cfg.rng("symbols").standard_normal(4)
    b = cfg.rng("noise").standard_normal(4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, cfg.rng("symbols").standard_normal(4))
