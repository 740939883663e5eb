"""Scenario config files: INI sections mirroring ScenarioConfig.

Every key is optional (defaults reproduce the standard 2x2 scenario);
unknown sections or keys are rejected.
"""

import configparser
from dataclasses import replace

import numpy as np

from fdsim.errors import ConfigurationError
from fdsim.ofdm import OfdmConfig
from fdsim.rxchain import NonlinearStage, RxChainConfig
from fdsim.simkit import ScenarioConfig

_SCHEMA = {
    "general": {"n_tx", "n_rx", "tx_irr_db", "tx_irr_phase_split",
                "rf_suppression_db", "soi_snr_db"},
    "ofdm": {"n_subcarriers", "n_data_subcarriers", "guard_interval",
             "oversampling", "constellation", "sample_period_ns"},
    "pa": {"variant", "gain_db", "iip3_dbm", "order", "memory_taps",
           "memory_decay_db", "higher_order_backoff_db"},
    "channel": {"delay_spread_ns", "k_factor_db", "path_loss_db", "pdp_span_db"},
    "rx": {"lna_gain_db", "lna_iip3_dbm", "mixer_gain_db", "mixer_iip3_dbm",
           "mixer_iip2_dbm", "vga_iip3_dbm", "vga_iip2_dbm", "vga_gain_min_db",
           "vga_gain_max_db", "rx_irr_db", "adc_bits", "adc_full_scale",
           "agc_backoff_db", "bandwidth_mhz", "noise_figure_db"},
    "estimation": {"n_samples", "memory", "soi_present"},
    "sweep": {"powers_dbm", "runs", "cancellers", "canceller_order", "seed"},
}


def parse_power_grid(spec: str) -> tuple:
    """Parse 'start:step:stop' (inclusive) or a comma list of dBm values."""
    try:
        if ":" in spec:
            start, step, stop = (float(v) for v in spec.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            return tuple(float(p) for p in np.arange(start, stop + step / 2, step))
        return tuple(float(v) for v in spec.split(","))
    except ValueError as exc:
        raise ConfigurationError(f"bad power grid {spec!r}; use start:step:stop") from exc


def _get(cp, section, key, cast, current):
    if cp.has_option(section, key):
        raw = cp.get(section, key)
        try:
            return cast(raw) if cast is not bool else cp.getboolean(section, key)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return current


def _get_scaled(cp, section, key, divisor, current):
    """Like _get(float) with a unit conversion; absent keys pass `current`
    through bit-exactly. Dividing by an exact power of ten keeps values
    like 15.625 ns correctly rounded."""
    if not cp.has_option(section, key):
        return current
    return _get(cp, section, key, float, None) / divisor


def load_config(path) -> ScenarioConfig:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path}")
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigurationError(f"unknown config section [{section}]")
        unknown = set(cp.options(section)) - _SCHEMA[section]
        if unknown:
            raise ConfigurationError(f"unknown keys in [{section}]: {sorted(unknown)}")

    cfg = ScenarioConfig()
    ofdm, rx = cfg.ofdm, cfg.rx

    ofdm = replace(
        ofdm,
        n_subcarriers=_get(cp, "ofdm", "n_subcarriers", int, ofdm.n_subcarriers),
        n_data_subcarriers=_get(cp, "ofdm", "n_data_subcarriers", int, ofdm.n_data_subcarriers),
        guard_interval=_get(cp, "ofdm", "guard_interval", int, ofdm.guard_interval),
        oversampling=_get(cp, "ofdm", "oversampling", int, ofdm.oversampling),
        constellation=_get(cp, "ofdm", "constellation", str, ofdm.constellation),
        sample_period=_get_scaled(cp, "ofdm", "sample_period_ns", 1e9,
                                  ofdm.sample_period),
    )
    rx = replace(
        rx,
        lna=NonlinearStage(_get(cp, "rx", "lna_gain_db", float, rx.lna.gain_db),
                           iip3_dbm=_get(cp, "rx", "lna_iip3_dbm", float, rx.lna.iip3_dbm)),
        mixer=NonlinearStage(_get(cp, "rx", "mixer_gain_db", float, rx.mixer.gain_db),
                             iip3_dbm=_get(cp, "rx", "mixer_iip3_dbm", float, rx.mixer.iip3_dbm),
                             iip2_dbm=_get(cp, "rx", "mixer_iip2_dbm", float, rx.mixer.iip2_dbm)),
        vga=NonlinearStage(0.0,
                           iip3_dbm=_get(cp, "rx", "vga_iip3_dbm", float, rx.vga.iip3_dbm),
                           iip2_dbm=_get(cp, "rx", "vga_iip2_dbm", float, rx.vga.iip2_dbm)),
        vga_gain_range_db=(_get(cp, "rx", "vga_gain_min_db", float, rx.vga_gain_range_db[0]),
                           _get(cp, "rx", "vga_gain_max_db", float, rx.vga_gain_range_db[1])),
        rx_irr_db=_get(cp, "rx", "rx_irr_db", float, rx.rx_irr_db),
        adc_bits=_get(cp, "rx", "adc_bits", int, rx.adc_bits),
        adc_full_scale=_get(cp, "rx", "adc_full_scale", float, rx.adc_full_scale),
        agc_backoff_db=_get(cp, "rx", "agc_backoff_db", float, rx.agc_backoff_db),
        bandwidth=_get_scaled(cp, "rx", "bandwidth_mhz", 1e-6, rx.bandwidth),
        composite_nf_db=_get(cp, "rx", "noise_figure_db", float, rx.composite_nf_db),
    )

    cancellers = cfg.cancellers
    if cp.has_option("sweep", "cancellers"):
        cancellers = tuple(s.strip() for s in cp.get("sweep", "cancellers").split(",") if s.strip())
    powers = cfg.sweep_powers
    if cp.has_option("sweep", "powers_dbm"):
        powers = parse_power_grid(cp.get("sweep", "powers_dbm"))

    return replace(
        cfg,
        ofdm=ofdm, rx=rx,
        n_tx=_get(cp, "general", "n_tx", int, cfg.n_tx),
        n_rx=_get(cp, "general", "n_rx", int, cfg.n_rx),
        tx_irr_db=_get(cp, "general", "tx_irr_db", float, cfg.tx_irr_db),
        tx_irr_phase_split=_get(cp, "general", "tx_irr_phase_split", float,
                                cfg.tx_irr_phase_split),
        rf_suppression_db=_get(cp, "general", "rf_suppression_db", float,
                               cfg.rf_suppression_db),
        soi_snr_db=_get(cp, "general", "soi_snr_db", float, cfg.soi_snr_db),
        pa_variant=_get(cp, "pa", "variant", str, cfg.pa_variant).lower(),
        pa_gain_db=_get(cp, "pa", "gain_db", float, cfg.pa_gain_db),
        pa_iip3_dbm=_get(cp, "pa", "iip3_dbm", float, cfg.pa_iip3_dbm),
        pa_order=_get(cp, "pa", "order", int, cfg.pa_order),
        pa_memory_taps=_get(cp, "pa", "memory_taps", int, cfg.pa_memory_taps),
        pa_memory_decay_db=_get(cp, "pa", "memory_decay_db", float, cfg.pa_memory_decay_db),
        pa_higher_order_backoff_db=_get(cp, "pa", "higher_order_backoff_db", float,
                                        cfg.pa_higher_order_backoff_db),
        delay_spread=_get_scaled(cp, "channel", "delay_spread_ns", 1e9,
                                 cfg.delay_spread),
        k_factor_db=_get(cp, "channel", "k_factor_db", float, cfg.k_factor_db),
        path_loss_db=_get(cp, "channel", "path_loss_db", float, cfg.path_loss_db),
        pdp_span_db=_get(cp, "channel", "pdp_span_db", float, cfg.pdp_span_db),
        est_n_samples=_get(cp, "estimation", "n_samples", int, cfg.est_n_samples),
        est_memory=_get(cp, "estimation", "memory", int, cfg.est_memory),
        est_soi_present=_get(cp, "estimation", "soi_present", bool, cfg.est_soi_present),
        cancellers=cancellers,
        canceller_order=_get(cp, "sweep", "canceller_order", int, cfg.canceller_order),
        sweep_powers=powers,
        runs=_get(cp, "sweep", "runs", int, cfg.runs),
        seed=_get(cp, "sweep", "seed", int, cfg.seed),
    )
