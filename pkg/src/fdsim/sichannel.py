"""MIMO self-interference channel and analog RF cancellation.

The propagation channel from each TX to each RX antenna is a tapped delay
line: a Rician first tap (dominant direct coupling) followed by Rayleigh
taps on an exponentially decaying power-delay profile. The RF canceller
taps a copy of each PA output and subtracts it after per-tap complex
adjustment; its accuracy is calibrated to a target suppression figure.
"""

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from fdsim.errors import DomainError
from fdsim.signals import ComplexSignal, mean_power


@dataclass(frozen=True)
class MimoSiChannel:
    """Per-(RX, TX) FIR taps, shape (n_rx, n_tx, n_taps)."""

    taps: np.ndarray
    k_factor_db: float
    path_loss_db: float

    @property
    def n_rx(self) -> int:
        return self.taps.shape[0]

    @property
    def n_tx(self) -> int:
        return self.taps.shape[1]

    @property
    def n_taps(self) -> int:
        return self.taps.shape[2]


@dataclass(frozen=True)
class RfCanceller:
    """Per-(RX, TX) RF-canceller FIR taps, shape (n_rx, n_tx, n_taps)."""

    taps: np.ndarray


def draw_si_channel(n_tx: int, n_rx: int, delay_spread: float, sample_rate: float,
                    k_factor_db: float, path_loss_db: float, seed,
                    pdp_span_db: float = 20.0) -> MimoSiChannel:
    """Draw a random SI channel realization.

    Tap 0 is Rician: a deterministic unit-phase direct component holding
    K/(K+1) of the ensemble power, plus complex Gaussian scatter. The
    remaining taps span the delay spread with an exponential profile whose
    last tap sits `pdp_span_db` below the first scattered tap. Ensemble
    total power per (RX, TX) pair is -path_loss_db.
    """
    if delay_spread < 0 or path_loss_db < 0:
        raise DomainError("delay_spread and path_loss must be non-negative")
    n_taps = max(1, int(np.ceil(delay_spread * sample_rate)))
    rng = np.random.default_rng(seed)

    p_total = 10.0 ** (-path_loss_db / 10.0)
    k = np.inf if np.isinf(k_factor_db) else 10.0 ** (k_factor_db / 10.0)
    if np.isinf(k):
        p_los, p_scatter = p_total, 0.0
    else:
        p_los = p_total * k / (k + 1.0)
        p_scatter = p_total / (k + 1.0)

    # exponential scatter profile; decay fixed by the tap-1..tap-L span
    l = np.arange(n_taps, dtype=float)
    decay = pdp_span_db / (n_taps - 2) if n_taps > 2 else 0.0
    profile = 10.0 ** (-decay * l / 10.0)
    profile *= p_scatter / profile.sum() if p_scatter > 0 else 0.0

    sigma = np.sqrt(profile / 2.0)
    scatter = sigma * (rng.standard_normal((n_rx, n_tx, n_taps))
                       + 1j * rng.standard_normal((n_rx, n_tx, n_taps)))
    taps = scatter.astype(np.complex128)
    taps[:, :, 0] += np.sqrt(p_los)
    return MimoSiChannel(taps, k_factor_db, path_loss_db)


def _filter_bank(taps: np.ndarray, x: list[ComplexSignal]) -> list[ComplexSignal]:
    n_rx, n_tx = taps.shape[:2]
    if len(x) != n_tx:
        raise DomainError(f"expected {n_tx} TX signals, got {len(x)}")
    n = len(x[0])
    if any(len(s) != n or s.sample_rate != x[0].sample_rate for s in x):
        raise DomainError("TX signals must share length and sample rate")
    out = []
    for i in range(n_rx):
        acc = np.zeros(n, dtype=np.complex128)
        for j in range(n_tx):
            acc += lfilter(taps[i, j], [1.0], x[j].samples)
        out.append(x[0].with_samples(acc))
    return out


def propagate(x_pa: list[ComplexSignal], ch: MimoSiChannel) -> list[ComplexSignal]:
    """Convolve the PA outputs with the SI channel (zero prehistory)."""
    return _filter_bank(ch.taps, x_pa)


def design_rf_canceller(ch: MimoSiChannel, target_suppression_db: float, seed,
                        probe: list[ComplexSignal] | None = None) -> RfCanceller:
    """Build an imperfect copy of the channel achieving a given suppression.

    Canceller taps are c*(1 + s*eps) with i.i.d. complex per-tap errors
    eps; the per-receiver scale s is solved in closed form (the residual
    power is exactly quadratic in s) so the linear SI power after
    cancellation, for the probe excitation, is target_suppression_db below
    the incident SI power.
    """
    if target_suppression_db < 0:
        raise DomainError("target suppression must be >= 0 dB")
    if np.isinf(target_suppression_db):
        return RfCanceller(ch.taps.copy())
    rng = np.random.default_rng(seed)
    eps = (rng.standard_normal(ch.taps.shape) + 1j * rng.standard_normal(ch.taps.shape)) / np.sqrt(2.0)

    if probe is None:
        from fdsim.ofdm import OfdmConfig, generate_ofdm
        cfg = OfdmConfig()
        probe = [generate_ofdm(cfg, 8, np.random.default_rng(rng.integers(2 ** 63)))
                 for _ in range(ch.n_tx)]

    incident = propagate(probe, ch)
    # residual channel at unit scale: -c .* eps
    err = _filter_bank(ch.taps * eps, probe)
    taps = ch.taps.copy()
    for i in range(ch.n_rx):
        p_in = mean_power(incident[i])
        p_err = mean_power(err[i])
        s = 10.0 ** (-target_suppression_db / 20.0) * np.sqrt(p_in / p_err)
        taps[i] = ch.taps[i] * (1.0 + s * eps[i])
    return RfCanceller(taps)


def rf_cancel(z: list[ComplexSignal], x_pa: list[ComplexSignal],
              rf: RfCanceller) -> list[ComplexSignal]:
    """Subtract the RF-canceller copy of each PA output from each RX signal."""
    if len(z) != rf.taps.shape[0]:
        raise DomainError("RX count mismatch between signals and canceller")
    replica = _filter_bank(rf.taps, x_pa)
    out = []
    for zi, ri in zip(z, replica):
        if len(zi) != len(ri):
            raise DomainError("signal length mismatch")
        out.append(zi.with_samples(zi.samples - ri.samples))
    return out


def residual_channel(ch: MimoSiChannel, rf: RfCanceller) -> MimoSiChannel:
    """Composite channel c - h_rf seen by the digital canceller."""
    return MimoSiChannel(ch.taps - rf.taps, ch.k_factor_db, ch.path_loss_db)
