"""OFDM waveform generation: structure, power, spectrum, determinism."""

import numpy as np
import pytest

from fdsim.errors import ConfigurationError
from fdsim.ofdm import OfdmConfig, generate_ofdm, occupied_band_ratio_db
from fdsim.signals import mean_power, measure_papr


def test_symbol_sample_count():
    cfg = OfdmConfig()
    assert cfg.symbol_samples == (64 + 16) * 4 == 320
    s = generate_ofdm(cfg, 7, seed=0)
    assert len(s) == 7 * 320
    assert s.sample_rate == pytest.approx(64e6)


def test_unit_mean_power():
    s = generate_ofdm(OfdmConfig(), 50, seed=1)
    assert mean_power(s) == pytest.approx(1.0, abs=1e-12)


def test_determinism_and_independence():
    cfg = OfdmConfig()
    a = generate_ofdm(cfg, 5, seed=42)
    b = generate_ofdm(cfg, 5, seed=42)
    c = generate_ofdm(cfg, 5, seed=43)
    assert np.array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)


def test_cyclic_prefix_is_copy_of_tail():
    cfg = OfdmConfig()
    s = generate_ofdm(cfg, 3, seed=5)
    sym, cp = cfg.symbol_samples, cfg.guard_interval * cfg.oversampling
    for k in range(3):
        block = s.samples[k * sym: (k + 1) * sym]
        assert np.allclose(block[:cp], block[-cp:])


def test_data_bins_symmetric_dc_free():
    bins = OfdmConfig().data_bins()
    assert bins.size == 48
    assert 0 not in bins
    assert set(bins) == set(range(1, 25)) | set(range(-24, 0))


def test_unloaded_bins_are_empty():
    # zero-padded IFFT synthesis leaves guard bins exactly empty
    cfg = OfdmConfig()
    s = generate_ofdm(cfg, 20, seed=9)
    assert occupied_band_ratio_db(s, cfg) < -200.0


def test_papr_plausible_for_ofdm():
    s = generate_ofdm(OfdmConfig(), 200, seed=11)
    papr = measure_papr(s, clip_prob=1e-4)
    assert 7.0 < papr < 13.0


def test_config_validation():
    with pytest.raises(ConfigurationError):
        OfdmConfig(n_data_subcarriers=65)
    with pytest.raises(ConfigurationError):
        OfdmConfig(guard_interval=64)
    with pytest.raises(ConfigurationError):
        OfdmConfig(constellation="qam64")
    with pytest.raises(ConfigurationError):
        generate_ofdm(OfdmConfig(), 0, seed=0)


def test_16qam_grid_recovered():
    cfg = OfdmConfig()
    s = generate_ofdm(cfg, 4, seed=13)
    sym, cp = cfg.symbol_samples, cfg.guard_interval * cfg.oversampling
    nfft = cfg.n_subcarriers * cfg.oversampling
    body = s.samples[:sym][cp:]
    spec = np.fft.fft(body) / np.sqrt(nfft)
    vals = spec[cfg.data_bins()]
    # demodulated tones land on a scaled 16-QAM grid
    levels = np.unique(np.round(vals.real / np.min(np.abs(vals.real)), 6))
    assert len(levels) <= 4
