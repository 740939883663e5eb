"""Command-line front-end: power sweeps to CSV, plus a --validate mode."""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from fdsim.canceller import save_canceller_model
from fdsim.config import load_config, parse_power_grid
from fdsim.errors import ConfigurationError, DomainError
from fdsim.simkit import ScenarioConfig, run_once, run_seed, sweep, write_csv

_PA_NAMES = {"ph": "ph", "hammerstein": "hammerstein", "wiener": "wiener"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fdsim",
        description="Full-duplex transceiver simulator: SINR-vs-transmit-power "
                    "sweeps for digital self-interference cancellers.")
    p.add_argument("--config", type=Path, help="INI scenario config file")
    p.add_argument("--out", type=Path, help="output CSV path (default sweep.csv)")
    p.add_argument("--pa", choices=sorted(_PA_NAMES), help="PA model variant override")
    p.add_argument("--cancellers", help="comma list, e.g. linear,widely_linear,joint_full")
    p.add_argument("--powers", help="transmit power grid, start:step:stop in dBm")
    p.add_argument("--runs", type=int, help="Monte-Carlo runs per power level")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--validate", action="store_true",
                   help="run the invariant suite instead of a sweep")
    p.add_argument("--dump-models", type=Path, metavar="DIR",
                   help="save fitted canceller models from one reference run")
    return p


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.pa:
        cfg = replace(cfg, pa_variant=_PA_NAMES[args.pa])
    if args.cancellers:
        names = tuple(s.strip() for s in args.cancellers.split(",") if s.strip())
        cfg = replace(cfg, cancellers=names)
    if args.powers:
        cfg = replace(cfg, sweep_powers=parse_power_grid(args.powers))
    if args.runs is not None:
        if args.runs < 1:
            raise ConfigurationError("--runs must be >= 1")
        cfg = replace(cfg, runs=args.runs)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.validate:
            from fdsim.validate import validate
            checks = validate(verbose=True)
            return 0 if all(c.ok for c in checks) else 1

        cfg = load_config(args.config) if args.config else ScenarioConfig()
        cfg = _apply_overrides(cfg, args)
        cfg.term_sets()  # fail fast on bad canceller names

        if args.dump_models:
            args.dump_models.mkdir(parents=True, exist_ok=True)
            models: dict = {}
            power = max(cfg.sweep_powers)
            run_once(cfg, power, run_seed(cfg.seed, len(cfg.sweep_powers) - 1, 0),
                     collect_models=models)
            for name, model in models.items():
                save_canceller_model(model, args.dump_models / f"{name}.json")
            print(f"dumped {len(models)} models (at {power:g} dBm) to {args.dump_models}")

        total = len(cfg.sweep_powers) * cfg.runs

        def progress(power, run):
            done = progress.count = getattr(progress, "count", 0) + 1
            if run == cfg.runs - 1:
                print(f"  {done}/{total} runs done (power {power:g} dBm)",
                      file=sys.stderr, flush=True)

        result = sweep(cfg, progress=progress)
        out = args.out or Path("sweep.csv")
        write_csv(result, out)
        print(f"wrote {out} ({len(result.rows)} rows, config {result.config_hash})")
        return 0
    except (ConfigurationError, DomainError, OSError) as exc:
        print(f"fdsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
