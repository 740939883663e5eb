"""Two-tone intercept measurement oracles against closed-form nonlinearities."""

import numpy as np
import pytest

from fdsim.errors import DomainError
from fdsim.measure import measure_iip2, measure_iip3, two_tone
from fdsim.signals import dbm_to_watts, power_dbm


def _cubic(iip3_dbm, gain=1.0):
    a3 = gain / dbm_to_watts(iip3_dbm)
    return lambda s: gain * s.samples - a3 * np.abs(s.samples) ** 2 * s.samples


def _square(iip2_dbm, gain=1.0):
    a2 = gain / np.sqrt(dbm_to_watts(iip2_dbm))
    return lambda s: gain * s.samples + a2 * np.abs(s.samples) ** 2


def test_two_tone_level_is_per_tone():
    probe = two_tone(-20.0)
    # two tones at -20 dBm each -> total -20 + 10*log10(2) dBm
    assert power_dbm(probe) == pytest.approx(-20.0 + 10 * np.log10(2), abs=1e-9)


@pytest.mark.parametrize("iip3", [5.0, 13.0, 20.0])
def test_measure_iip3_closed_form(iip3):
    assert measure_iip3(_cubic(iip3), -30.0) == pytest.approx(iip3, abs=0.05)


def test_measure_iip3_gain_invariant():
    assert measure_iip3(_cubic(15.0, gain=10 ** (25 / 20)), -30.0) == \
        pytest.approx(15.0, abs=0.05)


@pytest.mark.parametrize("iip2", [40.0, 50.0])
def test_measure_iip2_closed_form(iip2):
    assert measure_iip2(_square(iip2), -30.0) == pytest.approx(iip2, abs=0.05)


def test_linear_system_raises():
    with pytest.raises(DomainError):
        measure_iip3(lambda s: 2.0 * s.samples, -30.0)
    with pytest.raises(DomainError):
        measure_iip2(lambda s: 2.0 * s.samples, -30.0)
