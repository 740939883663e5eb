"""End-to-end scenario assembly, Monte-Carlo SINR sweeps, and validation.

A scenario wires the blocks together: per-TX OFDM waveforms through I/Q
imbalance and the PA, the MIMO SI channel, analog RF cancellation, the
receiver chain, and finally the requested digital cancellers. Canceller
coefficients are learned on an SoI-free estimation block; SINR is
measured on a separate evaluation block with the SoI present.
"""

import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from fdsim.canceller import (BasisMatrix, CancellerModel, TermSet,
                             build_basis_matrix, coeffs_from_vector,
                             full_term_order, ls_estimate, make_term_set)
from fdsim.errors import ConfigurationError, DomainError
from fdsim.ofdm import OfdmConfig, generate_ofdm
from fdsim.rxchain import RxChainConfig, rx_chain
from fdsim.sichannel import design_rf_canceller, draw_si_channel, propagate, rf_cancel
from fdsim.signals import ComplexSignal, mean_power, power_dbm, scale_to_power
from fdsim.txchain import (MemorySpec, iq_from_irr, iq_modulate, pa_apply,
                           pa_from_specs)

DEFAULT_POWER_GRID = tuple(float(p) for p in np.arange(-5.0, 25.01, 2.5))


@dataclass(frozen=True)
class ScenarioConfig:
    n_tx: int = 2
    n_rx: int = 2
    ofdm: OfdmConfig = OfdmConfig()
    # transmitter
    tx_irr_db: float = 25.0
    tx_irr_phase_split: float = 0.0
    pa_variant: str = "hammerstein"      # "ph" | "hammerstein" | "wiener"
    pa_gain_db: float = 27.0
    pa_iip3_dbm: float = 13.0
    pa_order: int = 5
    pa_memory_taps: int = 5
    pa_memory_decay_db: float = 18.0
    pa_higher_order_backoff_db: float = 8.0
    # SI channel and RF canceller
    delay_spread: float = 125e-9
    k_factor_db: float = 35.8
    path_loss_db: float = 40.0
    pdp_span_db: float = 20.0
    rf_suppression_db: float = 30.0
    # receiver
    rx: RxChainConfig = RxChainConfig()
    ideal_rx: bool = False
    include_noise: bool = True
    # signal of interest
    soi_snr_db: float = 15.0
    include_soi: bool = True
    # estimation
    est_n_samples: int = 10000
    est_memory: int = 10
    est_soi_present: bool = False
    # sweep
    cancellers: tuple = ("linear", "widely_linear", "pa_only", "joint_full")
    canceller_order: int = 5
    sweep_powers: tuple = DEFAULT_POWER_GRID
    runs: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n_tx < 1 or self.n_rx < 1:
            raise ConfigurationError("n_tx and n_rx must be >= 1")
        if self.runs < 1:
            raise ConfigurationError("runs must be >= 1")
        if not self.cancellers:
            raise ConfigurationError("at least one canceller is required")

    def term_sets(self) -> list[TermSet]:
        return [parse_canceller_name(name, self.canceller_order) for name in self.cancellers]


def parse_canceller_name(name: str, default_order: int = 5) -> TermSet:
    """Map a CLI/config canceller name to its term set.

    Accepted: linear, widely_linear/wl, pa_only[P], joint_full[P],
    joint_topk<k>/topk<k>; a trailing integer overrides the default order.
    """
    s = name.strip().lower()
    for prefix, kind in (("joint_topk", "joint_topk"), ("topk", "joint_topk"),
                         ("pa_only", "pa_only"), ("joint_full", "joint_full")):
        if s.startswith(prefix):
            tail = s[len(prefix):]
            if kind == "joint_topk":
                if not tail.isdigit():
                    raise ConfigurationError(f"joint_topk needs a row count: {name!r}")
                return make_term_set("joint_topk", k=int(tail))
            order = int(tail) if tail else default_order
            return make_term_set(kind, order=order)
    if s in ("linear", "widely_linear", "wl"):
        return make_term_set(s)
    raise ConfigurationError(f"unknown canceller {name!r}")


@dataclass
class RunRecord:
    sinr_db: float
    per_rx_sinr_db: list
    saturated: bool


@dataclass(frozen=True)
class SweepRow:
    tx_power_dbm: float
    canceller: str
    mean_sinr_db: float
    std_sinr_db: float
    runs: int
    saturation_count: int


@dataclass
class SweepResult:
    rows: list
    config_hash: str
    master_seed: int


def band_project(samples: np.ndarray, sample_rate: float, bandwidth: float) -> np.ndarray:
    """Ideal brick-wall projection onto |f| <= bandwidth/2.

    The SINR is assessed inside the receiver bandwidth: spectral regrowth
    falling outside the channel would be removed by channel-select
    filtering before demodulation and must not count against a canceller.
    """
    if bandwidth >= sample_rate:
        return samples
    spec = np.fft.fft(samples)
    f = np.fft.fftfreq(samples.size, d=1.0 / sample_rate)
    spec[np.abs(f) > bandwidth / 2.0] = 0.0
    return np.fft.ifft(spec)


def compute_sinr(s_hat: ComplexSignal, s_ref: ComplexSignal) -> float:
    """10*log10(P(s_ref) / P(s_hat - s_ref)); +inf if the error is zero."""
    if len(s_hat) != len(s_ref):
        raise DomainError("signals must have equal length")
    p_ref = mean_power(s_ref)
    if p_ref == 0.0:
        raise DomainError("reference signal has zero power")
    p_err = mean_power(s_hat.samples - s_ref.samples)
    if p_err == 0.0:
        return np.inf
    return float(10.0 * np.log10(p_ref / p_err))


def _tx_block(cfg: ScenarioConfig, n_symbols: int, level_dbm: float, iq, pas,
              wave_seeds) -> tuple[list, list]:
    """Generate per-TX baseband blocks and their PA outputs."""
    x, x_pa = [], []
    for j in range(cfg.n_tx):
        xj = scale_to_power(generate_ofdm(cfg.ofdm, n_symbols, wave_seeds[j]), level_dbm)
        x.append(xj)
        x_pa.append(pa_apply(iq_modulate(xj, iq), pas[j]))
    return x, x_pa


def _soi_block(cfg: ScenarioConfig, n_symbols: int, target_dbm: float,
               seed) -> list[ComplexSignal]:
    """Independent OFDM stream through per-RX Rayleigh channels, scaled to
    exactly target_dbm at each receiver input."""
    ss = np.random.SeedSequence(seed) if not isinstance(seed, np.random.SeedSequence) else seed
    wave_seed, chan_seed = ss.spawn(2)
    s = generate_ofdm(cfg.ofdm, n_symbols, wave_seed)
    rng = np.random.default_rng(chan_seed)
    n_taps = max(1, int(np.ceil(cfg.delay_spread * cfg.ofdm.sample_rate)))
    out = []
    from scipy.signal import lfilter
    for _ in range(cfg.n_rx):
        h = (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)) / np.sqrt(2 * n_taps)
        y = s.with_samples(lfilter(h, [1.0], s.samples))
        out.append(scale_to_power(y, target_dbm))
    return out


def _gather_columns(master: TermSet, m_taps: int, n_tx: int, ts: TermSet) -> np.ndarray:
    """Column indices of `ts` (in its own term order) inside the master basis."""
    pos = {pq: t for t, pq in enumerate(master.pairs)}
    n_terms = len(master.pairs)
    idx = []
    for j in range(n_tx):
        base = j * n_terms * m_taps
        for pq in ts.pairs:
            start = base + pos[pq] * m_taps
            idx.extend(range(start, start + m_taps))
    return np.asarray(idx)


def run_once(cfg: ScenarioConfig, tx_power_dbm: float, seed,
             collect_models: dict | None = None) -> dict:
    """Single scenario realization; returns {canceller name: RunRecord}.

    Pass a dict as `collect_models` to receive the fitted CancellerModel
    per canceller name."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    (est_wave, eval_wave, pa_seed, chan_seed, rf_seed,
     soi_seed, soi_est_seed, noise_est, noise_eval) = ss.spawn(9)

    iq = iq_from_irr(cfg.tx_irr_db, cfg.tx_irr_phase_split)
    mem = MemorySpec(cfg.pa_memory_taps, cfg.pa_memory_decay_db)
    pas = [pa_from_specs(cfg.pa_gain_db, cfg.pa_iip3_dbm, cfg.pa_order, mem,
                         s, cfg.pa_variant, cfg.pa_higher_order_backoff_db)
           for s in pa_seed.spawn(cfg.n_tx)]

    per_ant_dbm = tx_power_dbm - 10.0 * np.log10(cfg.n_tx)
    input_dbm = per_ant_dbm - cfg.pa_gain_db

    sym = cfg.ofdm.symbol_samples
    offset = max(64, cfg.est_memory)
    n_symbols = int(np.ceil((offset + cfg.est_n_samples) / sym))
    n_rows = cfg.est_n_samples

    x_est, pa_est = _tx_block(cfg, n_symbols, input_dbm, iq, pas, est_wave.spawn(cfg.n_tx))
    x_eval, pa_eval = _tx_block(cfg, n_symbols, input_dbm, iq, pas, eval_wave.spawn(cfg.n_tx))

    chan = draw_si_channel(cfg.n_tx, cfg.n_rx, cfg.delay_spread, cfg.ofdm.sample_rate,
                           cfg.k_factor_db, cfg.path_loss_db, chan_seed, cfg.pdp_span_db)
    rf = design_rf_canceller(chan, cfg.rf_suppression_db, rf_seed, probe=pa_est)
    r_est = rf_cancel(propagate(pa_est, chan), pa_est, rf)
    r_eval = rf_cancel(propagate(pa_eval, chan), pa_eval, rf)

    soi_target = cfg.rx.noise_floor_dbm() + cfg.soi_snr_db
    soi = _soi_block(cfg, n_symbols, soi_target, soi_seed) if cfg.include_soi else None
    if cfg.est_soi_present:
        soi_est = _soi_block(cfg, n_symbols, soi_target, soi_est_seed)
        r_est = [r.with_samples(r.samples + s.samples) for r, s in zip(r_est, soi_est)]

    rx_kwargs = dict(include_noise=cfg.include_noise)
    if cfg.ideal_rx:
        rx_kwargs.update(include_nonlinearities=False, include_iq_imbalance=False,
                         include_adc=False)

    noise_est_seeds = noise_est.spawn(cfg.n_rx)
    noise_eval_seeds = noise_eval.spawn(cfg.n_rx)
    y_est, y_eval, s_ref, saturated = [], [], [], False
    for i in range(cfg.n_rx):
        res_e = rx_chain(r_est[i], cfg.rx, noise_est_seeds[i],
                         vga_gain_db=0.0 if cfg.ideal_rx else None, **rx_kwargs)
        saturated |= res_e.saturated
        ri = r_eval[i]
        if soi is not None:
            ri = ri.with_samples(ri.samples + soi[i].samples)
        res_v = rx_chain(ri, cfg.rx, noise_eval_seeds[i],
                         vga_gain_db=res_e.vga_gain_db, **rx_kwargs)
        y_est.append(res_e.signal)
        y_eval.append(res_v.signal)
        if soi is not None:
            s_ref.append(soi[i].with_samples(
                soi[i].samples * cfg.rx.linear_gain(res_e.vga_gain_db)))

    # shared basis over the union of requested terms, canonical order first
    term_sets = cfg.term_sets()
    union = set().union(*(ts.pairs for ts in term_sets))
    max_p = max(p for p, _ in union)
    master_pairs = tuple(pq for pq in full_term_order(max_p) if pq in union)
    master = TermSet("master", master_pairs)
    psi_est = build_basis_matrix(x_est, master, cfg.est_memory, n_rows, offset)
    psi_eval = build_basis_matrix(x_eval, master, cfg.est_memory, n_rows, offset)
    y_mat = np.stack([s.samples[offset: offset + n_rows] for s in y_est], axis=1)

    records = {}
    for ts in term_sets:
        cols = _gather_columns(master, cfg.est_memory, cfg.n_tx, ts)
        sub = np.ascontiguousarray(psi_est.matrix[:, cols])
        h = ls_estimate(BasisMatrix(sub, [psi_est.columns[c] for c in cols], None), y_mat)
        if collect_models is not None:
            collect_models[ts.name] = CancellerModel(
                ts, cfg.est_memory, cfg.n_tx, cfg.n_rx,
                coeffs_from_vector(h, ts, cfg.est_memory, cfg.n_tx))
        r_hat = psi_eval.matrix[:, cols] @ h
        sinrs = []
        fs, bw = cfg.ofdm.sample_rate, cfg.rx.bandwidth
        for i in range(cfg.n_rx):
            s_hat_i = y_eval[i].samples[offset: offset + n_rows] - r_hat[:, i]
            if soi is not None:
                ref = band_project(s_ref[i].samples[offset: offset + n_rows], fs, bw)
                err = band_project(s_hat_i, fs, bw) - ref
                ref_sig = ComplexSignal(ref, fs)
                sinrs.append(compute_sinr(ComplexSignal(ref + err, fs), ref_sig))
            else:
                # SoI-free diagnostics: report residual SI suppression instead
                pre = mean_power(band_project(
                    y_eval[i].samples[offset: offset + n_rows], fs, bw))
                post = mean_power(band_project(s_hat_i, fs, bw))
                sinrs.append(float(10.0 * np.log10(pre / post)) if post > 0 else np.inf)
        records[ts.name] = RunRecord(float(np.mean(sinrs)), sinrs, saturated)
    return records


def config_hash(cfg: ScenarioConfig) -> str:
    doc = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(doc.encode()).hexdigest()[:16]


def run_seed(master_seed: int, power_index: int, run_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence((int(master_seed), int(power_index), int(run_index)))


def sweep(cfg: ScenarioConfig, progress=None) -> SweepResult:
    """Monte-Carlo sweep over the power grid: `runs` independent scenario
    realizations per power, aggregated per canceller."""
    names = [ts.name for ts in cfg.term_sets()]
    rows = []
    for pi, power in enumerate(cfg.sweep_powers):
        sinr = {n: [] for n in names}
        sat = {n: 0 for n in names}
        for run in range(cfg.runs):
            rec = run_once(cfg, power, run_seed(cfg.seed, pi, run))
            for n in names:
                sinr[n].append(rec[n].sinr_db)
                sat[n] += int(rec[n].saturated)
            if progress is not None:
                progress(power, run)
        for n in names:
            vals = np.asarray(sinr[n])
            rows.append(SweepRow(float(power), n, float(vals.mean()),
                                 float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
                                 cfg.runs, sat[n]))
    return SweepResult(rows, config_hash(cfg), cfg.seed)


def sweep_to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write("# fdsim transmit-power sweep\n")
    buf.write(f"# config_hash={result.config_hash}\n")
    buf.write(f"# master_seed={result.master_seed}\n")
    buf.write("tx_power_dbm,canceller,mean_sinr_db,std_sinr_db,runs,saturation_count\n")
    for r in result.rows:
        buf.write(f"{r.tx_power_dbm:.3f},{r.canceller},{r.mean_sinr_db:.3f},"
                  f"{r.std_sinr_db:.3f},{r.runs},{r.saturation_count}\n")
    return buf.getvalue()


def write_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as f:
        f.write(sweep_to_csv(result))


def result_table(result: SweepResult) -> dict:
    """{(power, canceller): SweepRow} convenience view."""
    return {(r.tx_power_dbm, r.canceller): r for r in result.rows}
