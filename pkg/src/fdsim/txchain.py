"""Transmitter impairment models.

Per-transmitter cascade: frequency-independent I/Q modulator imbalance
followed by a nonlinear power amplifier. Three PA structures are
supported:

* parallel Hammerstein -- odd-order polynomial branches, each with its
  own FIR filter;
* Hammerstein -- static odd-order polynomial followed by one FIR;
* Wiener -- FIR followed by the static polynomial.

The cascade of I/Q imbalance and a parallel-Hammerstein PA expands
analytically into conjugate-basis terms x^q x*^(p-q); `cascade_expand`
produces those coefficients and serves as the modeling oracle.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.signal import lfilter

from fdsim.errors import ConfigurationError, DomainError
from fdsim.signals import ComplexSignal, dbm_to_watts


# ---------------------------------------------------------------------------
# I/Q modulator imbalance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IqImbalance:
    """Gain/phase imbalance (g, phi) of an I/Q modulator.

    The widely-linear map is y = k1*x + k2*conj(x) with
    k1 = (1 + g*exp(j*phi))/2 and k2 = (1 - g*exp(j*phi))/2.
    """

    g: float = 1.0
    phi: float = 0.0

    @property
    def k1(self) -> complex:
        return 0.5 * (1.0 + self.g * np.exp(1j * self.phi))

    @property
    def k2(self) -> complex:
        return 0.5 * (1.0 - self.g * np.exp(1j * self.phi))


def iq_modulate(x: ComplexSignal, iq: IqImbalance) -> ComplexSignal:
    y = iq.k1 * x.samples + iq.k2 * np.conj(x.samples)
    return x.with_samples(y)


def irr_db(iq: IqImbalance) -> float:
    """Image rejection ratio 10*log10(|k1|^2/|k2|^2); +inf for an ideal modulator."""
    k2 = abs(iq.k2)
    if k2 == 0.0:
        return np.inf
    return float(20.0 * np.log10(abs(iq.k1) / k2))


def iq_from_irr(irr: float, phase_split: float = 0.0) -> IqImbalance:
    """Construct an imbalance with the requested IRR (dB).

    phase_split apportions the image between gain and phase imbalance:
    0 puts it all in the gain (g > 1, phi = 0), 1 all in the phase (g = 1).
    """
    if np.isinf(irr):
        return IqImbalance(1.0, 0.0)
    if irr <= 0:
        raise DomainError("IRR must be positive (dB)")
    if not 0.0 <= phase_split <= 1.0:
        raise DomainError("phase_split must be in [0, 1]")
    rho = 10.0 ** (-irr / 20.0)  # target |k2/k1|
    phi = 2.0 * np.arctan(phase_split * rho)
    # solve |1 - g e^{j phi}|^2 = rho^2 |1 + g e^{j phi}|^2 for g >= 1
    c = np.cos(phi)
    a = 1.0 - rho ** 2
    disc = (c * (1.0 + rho ** 2)) ** 2 - a ** 2
    g = (c * (1.0 + rho ** 2) + np.sqrt(max(disc, 0.0))) / a
    return IqImbalance(float(g), float(phi))


# ---------------------------------------------------------------------------
# Power amplifier models
# ---------------------------------------------------------------------------

PH = "ph"
HAMMERSTEIN = "hammerstein"
WIENER = "wiener"


@dataclass(frozen=True)
class MemorySpec:
    """Memory profile for PA FIR filters.

    Taps beyond the main tap are i.i.d. complex Gaussian on an
    exponentially decaying power profile (decay_db_per_tap), and each
    filter is renormalized to unit energy so the power gain is preserved.
    """

    n_taps: int = 1
    decay_db_per_tap: float = 10.0

    def __post_init__(self):
        if self.n_taps < 1:
            raise ConfigurationError("n_taps must be >= 1")


@dataclass(frozen=True)
class PaModel:
    variant: str                      # "ph" | "hammerstein" | "wiener"
    order: int
    branch_filters: dict = field(default_factory=dict)   # ph: p -> FIR
    static_poly: dict = field(default_factory=dict)      # hammerstein/wiener: p -> coeff
    fir: np.ndarray | None = None                        # hammerstein/wiener

    def __post_init__(self):
        if self.variant not in (PH, HAMMERSTEIN, WIENER):
            raise ConfigurationError(f"unknown PA variant {self.variant!r}")
        if self.order < 1 or self.order % 2 == 0:
            raise ConfigurationError("PA order must be odd and >= 1")
        orders = self.branch_filters if self.variant == PH else self.static_poly
        for p in orders:
            if p % 2 == 0 or p > self.order:
                raise ConfigurationError(f"invalid branch order {p}")
        if self.variant != PH and self.fir is None:
            raise ConfigurationError("hammerstein/wiener model needs a FIR")

    @property
    def memory_taps(self) -> int:
        if self.variant == PH:
            return max(len(h) for h in self.branch_filters.values())
        return len(self.fir)

    def as_parallel_hammerstein(self) -> "PaModel":
        """Equivalent PH model; exact for PH and Hammerstein variants."""
        if self.variant == PH:
            return self
        if self.variant == WIENER:
            raise DomainError("a Wiener model has no exact parallel-Hammerstein form")
        branches = {p: a * np.asarray(self.fir) for p, a in self.static_poly.items()}
        return PaModel(PH, self.order, branch_filters=branches)


def ph_basis(x: np.ndarray, p: int) -> np.ndarray:
    """Odd-order envelope basis |x|^(p-1) * x."""
    return np.abs(x) ** (p - 1) * x


def _static_poly_eval(x: np.ndarray, poly: dict) -> np.ndarray:
    y = np.zeros_like(x)
    for p, a in poly.items():
        y = y + a * ph_basis(x, p)
    return y


def pa_apply(x: ComplexSignal, pa: PaModel) -> ComplexSignal:
    """Run the signal through the PA model (zero prehistory)."""
    s = x.samples
    if pa.variant == PH:
        y = np.zeros_like(s)
        for p, h in pa.branch_filters.items():
            y += lfilter(np.asarray(h), [1.0], ph_basis(s, p))
    elif pa.variant == HAMMERSTEIN:
        y = lfilter(np.asarray(pa.fir), [1.0], _static_poly_eval(s, pa.static_poly))
    else:  # wiener
        y = _static_poly_eval(lfilter(np.asarray(pa.fir), [1.0], s), pa.static_poly)
    return x.with_samples(y)


def _memory_fir(mem: MemorySpec, rng: np.random.Generator) -> np.ndarray:
    if mem.n_taps == 1:
        return np.ones(1, dtype=np.complex128)
    m = np.arange(1, mem.n_taps)
    sigma = 10.0 ** (-mem.decay_db_per_tap * m / 20.0)
    tail = sigma / np.sqrt(2.0) * (rng.standard_normal(m.size) + 1j * rng.standard_normal(m.size))
    h = np.concatenate([[1.0 + 0j], tail])
    return h / np.linalg.norm(h)


def pa_from_specs(gain_db: float, iip3_dbm: float, order: int = 3,
                  memory: MemorySpec = MemorySpec(), seed=None,
                  variant: str = PH,
                  higher_order_backoff_db: float = 10.0) -> PaModel:
    """Build a PA model hitting the given small-signal gain and two-tone IIP3.

    The linear coefficient is 10^(gain/20); the 3rd-order coefficient is
    set by the two-tone intercept (compressive, negative real). 5th- and
    7th-order coefficients are anchored so each sits
    `higher_order_backoff_db` below the next-lower odd order at the 1-dB
    compression input.
    """
    if order < 1 or order % 2 == 0 or order > 7:
        raise ConfigurationError("order must be odd, in {1, 3, 5, 7}")
    if not np.isfinite(gain_db) or not np.isfinite(iip3_dbm):
        raise ConfigurationError("gain and IIP3 must be finite")
    if order > 1 and iip3_dbm < -30.0:
        raise ConfigurationError("IIP3 below noise scale; check units")

    a1 = 10.0 ** (gain_db / 20.0)
    coeffs = {1: a1 + 0j}
    if order >= 3:
        a_iip3_sq = dbm_to_watts(iip3_dbm)  # squared input amplitude at the intercept
        coeffs[3] = -a1 / a_iip3_sq
        # 1-dB compression input power of the (a1, a3) core
        a_1db_sq = (1.0 - 10.0 ** (-1.0 / 20.0)) * abs(coeffs[1] / coeffs[3])
        step = 10.0 ** (-higher_order_backoff_db / 20.0) / a_1db_sq
        if order >= 5:
            coeffs[5] = -abs(coeffs[3]) * step
        if order >= 7:
            coeffs[7] = -abs(coeffs[5]) * step

    rng = np.random.default_rng(seed)
    if variant == PH:
        branches = {p: a * _memory_fir(memory, rng) for p, a in coeffs.items()}
        return PaModel(PH, order, branch_filters=branches)
    fir = _memory_fir(memory, rng)
    return PaModel(variant, order, static_poly=coeffs, fir=fir)


# ---------------------------------------------------------------------------
# Analytic cascade expansion (I/Q imbalance -> parallel Hammerstein)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CascadeCoefficients:
    """FIR coefficients h_p^(q, p-q) of the conjugate-basis expansion,
    keyed by (p, q)."""

    coeffs: dict  # (p, q) -> np.ndarray

    def evaluate(self, x: ComplexSignal) -> ComplexSignal:
        """Apply the expanded model to a signal (zero prehistory)."""
        s = x.samples
        y = np.zeros_like(s)
        for (p, q), h in self.coeffs.items():
            basis = s ** q * np.conj(s) ** (p - q)
            y += lfilter(np.asarray(h), [1.0], basis)
        return x.with_samples(y)


def cascade_expand(iq: IqImbalance, pa: PaModel) -> CascadeCoefficients:
    """Expand the I/Q-imbalance + PH-PA cascade into x^q x*^(p-q) filters.

    For each odd branch p there are p+1 filters, obtained by binomial
    expansion of (k1 x + k2 x*)^((p+1)/2) * (k1* x* + k2* x)^((p-1)/2).
    """
    if pa.variant != PH:
        raise DomainError("cascade expansion requires a parallel-Hammerstein PA")
    k1, k2 = iq.k1, iq.k2
    out: dict = {}
    for p, h in pa.branch_filters.items():
        n1, n2 = (p + 1) // 2, (p - 1) // 2
        scale = np.zeros(p + 1, dtype=np.complex128)  # index q
        for a in range(n1 + 1):
            ca = comb(n1, a) * k1 ** a * k2 ** (n1 - a)
            for b in range(n2 + 1):
                cb = comb(n2, b) * np.conj(k1) ** b * np.conj(k2) ** (n2 - b)
                q = a + n2 - b
                scale[q] += ca * cb
        for q in range(p + 1):
            out[(p, q)] = scale[q] * np.asarray(h)
    return CascadeCoefficients(out)
