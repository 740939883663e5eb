"""Transmitter impairments: I/Q image, PA compression, and the cascade.

Shows that (1) the I/Q modulator creates a conjugate image exactly IRR
below the signal, (2) the behavioral PA hits its specified two-tone IIP3,
and (3) the imbalance+PA cascade expands analytically into conjugate
basis terms x^q x*^(p-q) -- the identity the joint canceller is built on.
"""

import numpy as np

from fdsim import (MemorySpec, cascade_expand, generate_ofdm, iq_from_irr,
                   iq_modulate, irr_db, measure_iip3, pa_apply, pa_from_specs)
from fdsim.ofdm import OfdmConfig
from fdsim.signals import power_dbm, scale_to_power

# --- I/Q imbalance -------------------------------------------------------
iq = iq_from_irr(25.0)
print(f"I/Q imbalance for 25 dB IRR: g = {iq.g:.4f}, phi = {iq.phi:.4f} rad")
print(f"round-trip IRR: {irr_db(iq):.2f} dB, K1 = {iq.k1:.4f}, K2 = {iq.k2:.4f}")

n = 4096
tone = np.exp(2j * np.pi * 300 * np.arange(n) / n)
from fdsim.signals import ComplexSignal
spec = np.abs(np.fft.fft(iq_modulate(ComplexSignal(tone, 64e6), iq).samples)) ** 2
print(f"tone at +f, image at -f: {10 * np.log10(spec[300] / spec[n - 300]):.1f} dB apart\n")

# --- PA nonlinearity -----------------------------------------------------
pa = pa_from_specs(gain_db=27.0, iip3_dbm=13.0, order=5,
                   memory=MemorySpec(5, 18.0), seed=3, variant="hammerstein")
meas = measure_iip3(lambda s: pa_apply(s, pa), probe_level_dbm=-25.0)
print(f"PA spec: 27 dB gain, 13 dBm IIP3 -> measured IIP3 {meas:.2f} dBm")

x = generate_ofdm(OfdmConfig(), 50, seed=4)
for level in (-30.0, -10.0, 0.0):
    out = power_dbm(pa_apply(scale_to_power(x, level), pa))
    print(f"  input {level:6.1f} dBm -> output {out:6.1f} dBm "
          f"(gain {out - level:.2f} dB)")

# --- cascade expansion ---------------------------------------------------
ph = pa_from_specs(27.0, 13.0, order=5, memory=MemorySpec(5, 18.0), seed=3,
                   variant="ph")
coeffs = cascade_expand(iq, ph)
print(f"\ncascade expansion produces {len(coeffs.coeffs)} conjugate-basis filters:")
for (p, q), h in sorted(coeffs.coeffs.items()):
    print(f"  (p={p}, q={q}): ||h|| = {np.linalg.norm(h):.3e}")

probe = scale_to_power(x, -10.0)
direct = pa_apply(iq_modulate(probe, iq), ph)
expanded = coeffs.evaluate(probe)
rel = np.linalg.norm(direct.samples - expanded.samples) / np.linalg.norm(direct.samples)
print(f"expansion vs direct composition: relative error {rel:.2e}")
