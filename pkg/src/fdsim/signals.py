"""Complex baseband signal container and power utilities.

Power convention: a signal is referenced to dBm through a 1-ohm
normalization, P_dBm = 10*log10(mean |s|^2) + 30. A unit-mean-power
sequence therefore sits at +30 dBm.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from fdsim.errors import DomainError

DBM_REF_DB = 30.0  # 1-ohm convention: 0 dBm <-> mean|s|^2 = 1e-3


@dataclass
class ComplexSignal:
    """Uniformly sampled complex baseband sequence with sample-rate metadata."""

    samples: np.ndarray
    sample_rate: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.sample_rate <= 0:
            raise DomainError("sample_rate must be positive")
        if not np.all(np.isfinite(self.samples.view(np.float64))):
            raise DomainError("signal contains non-finite samples")

    def __len__(self):
        return len(self.samples)

    def with_samples(self, samples: np.ndarray) -> "ComplexSignal":
        return replace(self, samples=samples, meta=dict(self.meta))


def mean_power(s: ComplexSignal | np.ndarray) -> float:
    x = s.samples if isinstance(s, ComplexSignal) else np.asarray(s)
    if x.size == 0:
        raise DomainError("empty signal")
    return float(np.mean(np.abs(x) ** 2))


def power_dbm(s: ComplexSignal | np.ndarray) -> float:
    """Mean power of the signal in dBm under the 1-ohm convention."""
    p = mean_power(s)
    if p == 0.0:
        raise DomainError("zero-power signal has no dBm value")
    return 10.0 * np.log10(p) + DBM_REF_DB


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - DBM_REF_DB) / 10.0)


def scale_to_power(s: ComplexSignal, p_dbm: float) -> ComplexSignal:
    """Scale by a positive real factor so that mean power equals `p_dbm`."""
    p = mean_power(s)
    if p == 0.0:
        raise DomainError("cannot scale an all-zero signal")
    gain = np.sqrt(dbm_to_watts(p_dbm) / p)
    return s.with_samples(s.samples * gain)


def measure_papr(s: ComplexSignal, clip_prob: float = 1e-4) -> float:
    """Peak-to-average power ratio in dB.

    The "peak" is the (1 - clip_prob) quantile of instantaneous power,
    so clip_prob=0 gives the true maximum.
    """
    if len(s) == 0:
        raise DomainError("empty signal")
    if not 0.0 <= clip_prob < 1.0:
        raise DomainError("clip_prob must be in [0, 1)")
    inst = np.abs(s.samples) ** 2
    peak = np.quantile(inst, 1.0 - clip_prob)
    return float(10.0 * np.log10(peak / np.mean(inst)))
