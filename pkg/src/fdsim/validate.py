"""Fast invariant suite backing the CLI --validate flag.

Each check is self-contained and prints one PASS/FAIL line; the suite is
sized to finish in well under two minutes on a laptop core.
"""

import time
from dataclasses import dataclass, replace

import numpy as np

from fdsim.canceller import build_basis_matrix, ls_estimate, make_term_set
from fdsim.measure import measure_iip3
from fdsim.ofdm import OfdmConfig, generate_ofdm
from fdsim.rxchain import RxChainConfig, rx_chain
from fdsim.signals import ComplexSignal, power_dbm
from fdsim.simkit import ScenarioConfig, result_table, sweep, sweep_to_csv
from fdsim.txchain import MemorySpec, iq_from_irr, irr_db, pa_apply, pa_from_specs


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def _check_irr_round_trip() -> CheckResult:
    worst = 0.0
    for irr in (20.0, 25.0, 50.0):
        for split in (0.0, 0.3, 0.7, 1.0):
            worst = max(worst, abs(irr_db(iq_from_irr(irr, split)) - irr))
    return CheckResult("irr_round_trip", worst <= 0.01, f"max error {worst:.2e} dB")


def _check_iip3() -> CheckResult:
    errs = []
    for order in (3, 5, 7):
        pa = pa_from_specs(27.0, 13.0, order=order)
        errs.append(abs(measure_iip3(lambda s: pa_apply(s, pa), -20.0) - 13.0))
    rx = RxChainConfig()
    for stage, target in ((rx.lna, 5.0), (rx.mixer, 15.0), (rx.vga, 20.0)):
        probe = min(-20.0, target - 30.0)
        errs.append(abs(measure_iip3(lambda s: s.with_samples(stage.apply(s.samples)), probe) - target))
    worst = max(errs)
    return CheckResult("iip3_two_tone", worst <= 0.5, f"max error {worst:.3f} dB")


def _check_noise_floor() -> CheckResult:
    from fdsim.simkit import band_project
    cfg = RxChainConfig()
    zero = ComplexSignal(np.zeros(1_000_000), 64e6)
    res = rx_chain(zero, cfg, seed=7, vga_gain_db=0.0, include_adc=False,
                   include_nonlinearities=False, include_iq_imbalance=False)
    inband = band_project(res.signal.samples, 64e6, cfg.bandwidth)
    measured = (10.0 * np.log10(np.mean(np.abs(inband) ** 2)) + 30.0
                - 20.0 * np.log10(cfg.linear_gain(0.0)))
    err = abs(measured - cfg.noise_floor_dbm())
    return CheckResult("noise_floor", err <= 0.2,
                       f"input-referred {measured:.2f} dBm (target {cfg.noise_floor_dbm():.2f})")


def _check_residual_orthogonality() -> CheckResult:
    rng = np.random.default_rng(11)
    x = [ComplexSignal(rng.standard_normal(3000) + 1j * rng.standard_normal(3000), 64e6)]
    ts = make_term_set("joint_full", order=5)
    psi = build_basis_matrix(x, ts, 8, 2000, 16)
    y = (rng.standard_normal(2000) + 1j * rng.standard_normal(2000))
    h = ls_estimate(psi, y)
    e = y - psi.matrix @ h
    rel = np.linalg.norm(psi.matrix.conj().T @ e) / (np.linalg.norm(psi.matrix) * np.linalg.norm(y))
    return CheckResult("residual_orthogonality", rel <= 1e-8, f"normalized gram residual {rel:.2e}")


def _mini_cfg() -> ScenarioConfig:
    return ScenarioConfig(cancellers=("linear", "widely_linear", "joint_full"),
                          sweep_powers=(-5.0, 10.0, 25.0), runs=3,
                          est_n_samples=6000, seed=99)


def _check_determinism() -> CheckResult:
    cfg = replace(_mini_cfg(), sweep_powers=(10.0,), runs=2,
                  cancellers=("linear", "widely_linear"))
    a = sweep_to_csv(sweep(cfg))
    b = sweep_to_csv(sweep(cfg))
    return CheckResult("determinism", a == b, "identical CSV bytes" if a == b else "CSV mismatch")


def _check_ceiling_and_ordering(result=None) -> list[CheckResult]:
    cfg = _mini_cfg()
    res = result or sweep(cfg)
    table = result_table(res)
    ceiling_ok, worst = True, -np.inf
    for (power, name), row in table.items():
        worst = max(worst, row.mean_sinr_db)
        ceiling_ok &= row.mean_sinr_db <= cfg.soi_snr_db + 0.5
    checks = [CheckResult("ceiling_law", ceiling_ok,
                          f"max mean SINR {worst:.2f} dB vs ceiling {cfg.soi_snr_db} dB")]
    order_ok, msg = True, []
    for power in cfg.sweep_powers:
        slack = 3.0 * max(table[(power, n)].std_sinr_db for n in
                          ("linear", "widely_linear", "joint_full5")) / np.sqrt(cfg.runs)
        wl = table[(power, "widely_linear")].mean_sinr_db
        if table[(power, "joint_full5")].mean_sinr_db < wl - slack and power >= 10.0:
            order_ok, _ = False, msg.append(f"joint<wl at {power}")
        if wl < table[(power, "linear")].mean_sinr_db - slack:
            order_ok, _ = False, msg.append(f"wl<linear at {power}")
    checks.append(CheckResult("ordering_law", order_ok, "; ".join(msg) or "joint >= wl >= linear"))
    return checks


def _check_spectrum() -> CheckResult:
    from fdsim.ofdm import occupied_band_ratio_db
    cfg = OfdmConfig()
    s = generate_ofdm(cfg, 100, 5)
    oob = occupied_band_ratio_db(s, cfg)
    return CheckResult("ofdm_band_occupancy", oob <= -40.0, f"out-of-band {oob:.1f} dB")


def validate(verbose: bool = True) -> list[CheckResult]:
    checks = []
    t0 = time.time()
    for fn in (_check_irr_round_trip, _check_iip3, _check_noise_floor,
               _check_residual_orthogonality, _check_spectrum, _check_determinism):
        checks.append(fn())
    checks.extend(_check_ceiling_and_ordering())
    if verbose:
        for c in checks:
            print(f"{'PASS' if c.ok else 'FAIL'}  {c.name}: {c.detail}")
        print(f"validation finished in {time.time() - t0:.1f} s")
    return checks
