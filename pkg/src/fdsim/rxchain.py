"""Receiver front-end: LNA, mixer, VGA, residual I/Q imbalance, thermal
noise, and ADC quantization.

Noise is injected once at the chain input as white noise at the
composite-noise-figure density (-174 dBm/Hz + NF), so its power inside
the receiver bandwidth matches the sensitivity arithmetic while the
oversampled band carries proportionally more total noise. Stage
nonlinearities are memoryless, derived from the two-tone
intercept points; the second-order term is the envelope-square IM2
mechanism of a direct-conversion mixer. The VGA gain is picked by a
peak-based AGC rule and then frozen.
"""

from dataclasses import dataclass, field

import numpy as np

from fdsim.errors import ConfigurationError, DomainError
from fdsim.signals import ComplexSignal, dbm_to_watts
from fdsim.txchain import IqImbalance, iq_from_irr, iq_modulate


@dataclass(frozen=True)
class NonlinearStage:
    """Memoryless gain stage with optional 2nd/3rd-order intercepts (dBm)."""

    gain_db: float
    iip3_dbm: float | None = None
    iip2_dbm: float | None = None

    @property
    def gain(self) -> float:
        return 10.0 ** (self.gain_db / 20.0)

    def with_gain(self, gain_db: float) -> "NonlinearStage":
        return NonlinearStage(gain_db, self.iip3_dbm, self.iip2_dbm)

    def apply(self, x: np.ndarray, nonlinear: bool = True) -> np.ndarray:
        y = self.gain * x
        if not nonlinear:
            return y
        if self.iip2_dbm is not None:
            a2 = self.gain / np.sqrt(dbm_to_watts(self.iip2_dbm))
            y = y + a2 * np.abs(x) ** 2
        if self.iip3_dbm is not None:
            a3 = self.gain / dbm_to_watts(self.iip3_dbm)
            y = y - a3 * np.abs(x) ** 2 * x
        return y


@dataclass(frozen=True)
class RxChainConfig:
    lna: NonlinearStage = NonlinearStage(25.0, iip3_dbm=5.0)
    mixer: NonlinearStage = NonlinearStage(6.0, iip3_dbm=15.0, iip2_dbm=50.0)
    vga: NonlinearStage = NonlinearStage(0.0, iip3_dbm=20.0, iip2_dbm=50.0)
    vga_gain_range_db: tuple = (0.0, 69.0)
    rx_irr_db: float = 50.0
    adc_bits: int = 12
    adc_full_scale: float = 1.0
    agc_backoff_db: float = 1.0
    bandwidth: float = 12.5e6
    composite_nf_db: float = 4.1

    def __post_init__(self):
        if self.adc_bits < 1:
            raise ConfigurationError("adc_bits must be >= 1")
        if self.vga_gain_range_db[0] > self.vga_gain_range_db[1]:
            raise ConfigurationError("invalid VGA gain range")

    @property
    def rx_iq(self) -> IqImbalance:
        if np.isinf(self.rx_irr_db):
            return IqImbalance(1.0, 0.0)
        return iq_from_irr(self.rx_irr_db, phase_split=0.0)

    def noise_floor_dbm(self) -> float:
        """Input-referred thermal noise power: -174 dBm/Hz + bandwidth + NF."""
        return -174.0 + 10.0 * np.log10(self.bandwidth) + self.composite_nf_db

    def linear_gain(self, vga_gain_db: float) -> float:
        """Composite small-signal field gain with impairments off."""
        return self.lna.gain * self.mixer.gain * 10.0 ** (vga_gain_db / 20.0)


@dataclass
class RxResult:
    signal: ComplexSignal
    vga_gain_db: float
    saturated: bool


def adc_quantize(x: ComplexSignal, bits: int, full_scale: float) -> ComplexSignal:
    """Uniform mid-rise quantizer, I and Q independently, clipping at full scale."""
    if full_scale <= 0:
        raise DomainError("full_scale must be positive")
    delta = 2.0 * full_scale / 2.0 ** bits
    top = full_scale - delta / 2.0

    def q(v):
        return np.clip(delta * (np.floor(v / delta) + 0.5), -top, top)

    return x.with_samples(q(x.samples.real) + 1j * q(x.samples.imag))


def agc_gain(peak: float, cfg: RxChainConfig) -> tuple[float, bool]:
    """VGA gain placing the observed peak at ADC full scale minus backoff.

    Returns (gain_db, saturated); saturated flags clamping at either end
    of the VGA range.
    """
    if peak <= 0:
        raise DomainError("peak must be positive")
    target = cfg.adc_full_scale * 10.0 ** (-cfg.agc_backoff_db / 20.0)
    want = 20.0 * np.log10(target / peak)
    lo, hi = cfg.vga_gain_range_db
    gain = float(np.clip(want, lo, hi))
    return gain, bool(want > hi)


def rx_chain(r: ComplexSignal, cfg: RxChainConfig, seed=None, *,
             vga_gain_db: float | None = None,
             include_noise: bool = True,
             include_nonlinearities: bool = True,
             include_iq_imbalance: bool = True,
             include_adc: bool = True) -> RxResult:
    """Run a received signal through the full front-end.

    If `vga_gain_db` is None the AGC picks it from the signal peak at the
    VGA input; pass a frozen value to keep the chain identical across
    blocks of the same run.
    """
    y = r.samples.copy()
    if include_noise:
        rng = np.random.default_rng(seed)
        # white at the -174 dBm/Hz + NF density over the simulated rate, so
        # the power inside the receiver bandwidth equals noise_floor_dbm()
        over = max(1.0, r.sample_rate / cfg.bandwidth)
        sigma = np.sqrt(dbm_to_watts(cfg.noise_floor_dbm()) * over / 2.0)
        y = y + sigma * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size))

    y = cfg.lna.apply(y, nonlinear=include_nonlinearities)
    y = cfg.mixer.apply(y, nonlinear=include_nonlinearities)

    if include_iq_imbalance:
        iq = cfg.rx_iq
        y = iq.k1 * y + iq.k2 * np.conj(y)

    saturated = False
    if vga_gain_db is None:
        peak = float(np.max(np.abs(y)))
        vga_gain_db, saturated = agc_gain(peak, cfg)
    y = cfg.vga.with_gain(vga_gain_db).apply(y, nonlinear=include_nonlinearities)

    out = r.with_samples(y)
    if include_adc:
        out = adc_quantize(out, cfg.adc_bits, cfg.adc_full_scale)
    return RxResult(out, vga_gain_db, saturated)
