"""Baseband full-duplex transceiver simulator with digital SI cancellation."""

from fdsim.canceller import (CancellerModel, TermSet, build_basis_matrix,
                             cancel, fit_canceller, load_canceller_model,
                             ls_estimate, make_term_set, regenerate_si,
                             save_canceller_model)
from fdsim.errors import ConfigurationError, DomainError, IllConditionedError
from fdsim.measure import iip3_intercept_sweep, measure_iip2, measure_iip3, two_tone
from fdsim.ofdm import OfdmConfig, generate_ofdm, occupied_band_ratio_db
from fdsim.rxchain import NonlinearStage, RxChainConfig, RxResult, rx_chain
from fdsim.sichannel import (MimoSiChannel, RfCanceller, design_rf_canceller,
                             draw_si_channel, propagate, residual_channel,
                             rf_cancel)
from fdsim.signals import (ComplexSignal, dbm_to_watts, mean_power,
                           measure_papr, power_dbm, scale_to_power)
from fdsim.simkit import (ScenarioConfig, SweepResult, SweepRow, compute_sinr,
                          parse_canceller_name, result_table, run_once,
                          run_seed, sweep, sweep_to_csv, write_csv)
from fdsim.txchain import (CascadeCoefficients, IqImbalance, MemorySpec,
                           PaModel, cascade_expand, iq_from_irr, iq_modulate,
                           irr_db, pa_apply, pa_from_specs, ph_basis)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
