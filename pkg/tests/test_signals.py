"""Power/dBm conventions and the ComplexSignal container."""

import numpy as np
import pytest

from fdsim.errors import DomainError
from fdsim.signals import (ComplexSignal, dbm_to_watts, mean_power,
                           measure_papr, power_dbm, scale_to_power)


def test_unit_power_is_30_dbm():
    s = ComplexSignal(np.ones(64), 64e6)
    assert power_dbm(s) == pytest.approx(30.0, abs=1e-12)


def test_dbm_round_trip():
    for p in (-98.93, -30.0, 0.0, 13.0, 27.0):
        assert 10.0 * np.log10(dbm_to_watts(p)) + 30.0 == pytest.approx(p, abs=1e-12)


def test_scale_to_power_exact():
    rng = np.random.default_rng(3)
    s = ComplexSignal(rng.standard_normal(512) + 1j * rng.standard_normal(512), 64e6)
    out = scale_to_power(s, -17.0)
    assert power_dbm(out) == pytest.approx(-17.0, abs=1e-10)
    # scaling is a positive real factor: phase untouched
    ratio = out.samples / s.samples
    assert np.allclose(ratio.imag, 0.0) and np.all(ratio.real > 0)


def test_mean_power_matches_definition():
    x = np.array([1.0, 1j, -2.0])
    assert mean_power(x) == pytest.approx(2.0)


def test_papr_constant_signal_is_zero():
    s = ComplexSignal(np.full(1000, 0.7 + 0.1j), 64e6)
    assert measure_papr(s, clip_prob=0.0) == pytest.approx(0.0, abs=1e-12)


def test_papr_quantile_definition():
    # half the samples at power 1, half at power 4 -> max/avg = 4/2.5
    samp = np.concatenate([np.ones(500), 2.0 * np.ones(500)]).astype(complex)
    s = ComplexSignal(samp, 64e6)
    assert measure_papr(s, clip_prob=0.0) == pytest.approx(10 * np.log10(4 / 2.5), abs=1e-9)


def test_rejects_bad_inputs():
    with pytest.raises(DomainError):
        ComplexSignal(np.array([1.0, np.nan]), 64e6)
    with pytest.raises(DomainError):
        ComplexSignal(np.ones(4), 0.0)
    with pytest.raises(DomainError):
        power_dbm(np.zeros(8))
    with pytest.raises(DomainError):
        scale_to_power(ComplexSignal(np.zeros(8), 64e6), 0.0)


def test_with_samples_preserves_metadata():
    s = ComplexSignal(np.ones(4), 64e6, meta={"tag": 1})
    t = s.with_samples(2.0 * np.ones(4))
    assert t.sample_rate == s.sample_rate and t.meta == {"tag": 1}
    t.meta["tag"] = 2
    assert s.meta["tag"] == 1
