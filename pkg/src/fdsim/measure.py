"""Two-tone intercept-point measurement probes.

Convention: a two-tone probe at level L dBm has per-tone complex-envelope
power L dBm (tone amplitude A with A^2 = 10^((L-30)/10)). The intercept
point is where the slope-1 fundamental and slope-3 (or slope-2) product
extrapolations meet, per tone.
"""

import numpy as np

from fdsim.errors import DomainError
from fdsim.signals import ComplexSignal, dbm_to_watts

_N_FFT = 4096
_BIN1, _BIN2 = 101, 157   # tone bins; IM3 at 2*b1-b2=45 and 2*b2-b1=213, IM2 beat at 56
_FLOOR_GAP_DB = 250.0     # products further below the fundamental are FFT leakage


def two_tone(level_dbm: float, sample_rate: float = 64e6, n: int = _N_FFT,
             bins: tuple = (_BIN1, _BIN2)) -> ComplexSignal:
    amp = np.sqrt(dbm_to_watts(level_dbm))
    t = np.arange(n)
    s = amp * (np.exp(2j * np.pi * bins[0] * t / n) + np.exp(2j * np.pi * bins[1] * t / n))
    return ComplexSignal(s, sample_rate)


def _bin_power_dbm(y: np.ndarray, k: int) -> float:
    c = np.fft.fft(y)[k] / y.size
    p = np.abs(c) ** 2
    if p == 0.0:
        return -np.inf
    return 10.0 * np.log10(p) + 30.0


def measure_iip3(system, probe_level_dbm: float, sample_rate: float = 64e6) -> float:
    """Two-tone third-order input intercept (dBm) of a signal-to-signal map.

    Probe well below compression; the intercept is extrapolated from the
    fundamental/IM3 gap at the probe level.
    """
    x = two_tone(probe_level_dbm, sample_rate)
    y = np.asarray(system(x).samples if hasattr(system(x), "samples") else system(x))
    p_fund = _bin_power_dbm(y, _BIN1)
    p_im3 = _bin_power_dbm(y, (2 * _BIN1 - _BIN2) % _N_FFT)
    if p_im3 < p_fund - _FLOOR_GAP_DB:
        raise DomainError("no measurable IM3 product; is the system linear?")
    return probe_level_dbm + (p_fund - p_im3) / 2.0


def measure_iip2(system, probe_level_dbm: float, sample_rate: float = 64e6) -> float:
    """Two-tone second-order input intercept (dBm) via the baseband beat."""
    x = two_tone(probe_level_dbm, sample_rate)
    y = np.asarray(system(x).samples if hasattr(system(x), "samples") else system(x))
    p_fund = _bin_power_dbm(y, _BIN1)
    p_im2 = _bin_power_dbm(y, (_BIN2 - _BIN1) % _N_FFT)
    if p_im2 < p_fund - _FLOOR_GAP_DB:
        raise DomainError("no measurable IM2 product")
    return probe_level_dbm + (p_fund - p_im2)


def iip3_intercept_sweep(system, levels_dbm, sample_rate: float = 64e6) -> float:
    """Fit slope-1/slope-3 lines over several probe levels and intersect them."""
    levels = np.asarray(levels_dbm, dtype=float)
    fund, im3 = [], []
    for lv in levels:
        x = two_tone(lv, sample_rate)
        y = np.asarray(system(x).samples if hasattr(system(x), "samples") else system(x))
        fund.append(_bin_power_dbm(y, _BIN1))
        im3.append(_bin_power_dbm(y, (2 * _BIN1 - _BIN2) % _N_FFT))
    b1 = np.mean(np.asarray(fund) - levels)          # slope-1 intercept
    b3 = np.mean(np.asarray(im3) - 3.0 * levels)     # slope-3 intercept
    return (b1 - b3) / 2.0
