"""Config-file loading and the command-line interface."""

import numpy as np
import pytest

from fdsim.canceller import load_canceller_model
from fdsim.cli import main
from fdsim.config import load_config, parse_power_grid
from fdsim.errors import ConfigurationError
from fdsim.simkit import ScenarioConfig


class TestPowerGrid:
    def test_range_spec(self):
        assert parse_power_grid("-5:2.5:25") == tuple(np.arange(-5, 25.01, 2.5))

    def test_comma_list(self):
        assert parse_power_grid("0,10,21") == (0.0, 10.0, 21.0)

    def test_bad_specs(self):
        for bad in ("5:0:10", "10:1:5", "a:b:c", "1,two,3"):
            with pytest.raises(ConfigurationError):
                parse_power_grid(bad)


class TestConfigFile:
    def test_defaults_when_empty(self, tmp_path):
        p = tmp_path / "empty.cfg"
        p.write_text("[general]\n")
        assert load_config(p) == ScenarioConfig()

    def test_overrides(self, tmp_path):
        p = tmp_path / "s.cfg"
        p.write_text(
            "[general]\n"
            "n_tx = 1\n"
            "tx_irr_db = 30\n"
            "[pa]\n"
            "variant = wiener\n"
            "iip3_dbm = 15\n"
            "[sweep]\n"
            "powers_dbm = 0:5:10\n"
            "runs = 3\n"
            "cancellers = linear, joint_full\n"
            "seed = 9\n")
        cfg = load_config(p)
        assert cfg.n_tx == 1 and cfg.tx_irr_db == 30.0
        assert cfg.pa_variant == "wiener" and cfg.pa_iip3_dbm == 15.0
        assert cfg.sweep_powers == (0.0, 5.0, 10.0)
        assert cfg.runs == 3 and cfg.seed == 9
        assert cfg.cancellers == ("linear", "joint_full")

    def test_unit_suffixed_keys(self, tmp_path):
        p = tmp_path / "u.cfg"
        p.write_text("[channel]\ndelay_spread_ns = 250\n[rx]\nbandwidth_mhz = 20\n")
        cfg = load_config(p)
        assert cfg.delay_spread == pytest.approx(250e-9)
        assert cfg.rx.bandwidth == pytest.approx(20e6)

    def test_unknown_section_and_key(self, tmp_path):
        p = tmp_path / "bad1.cfg"
        p.write_text("[amplifier]\ngain = 3\n")
        with pytest.raises(ConfigurationError):
            load_config(p)
        p2 = tmp_path / "bad2.cfg"
        p2.write_text("[pa]\ncolor = red\n")
        with pytest.raises(ConfigurationError):
            load_config(p2)

    def test_bad_value(self, tmp_path):
        p = tmp_path / "bad3.cfg"
        p.write_text("[sweep]\nruns = many\n")
        with pytest.raises(ConfigurationError):
            load_config(p)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "nope.cfg")


class TestCli:
    def test_sweep_to_csv(self, tmp_path, capsys):
        out = tmp_path / "out.csv"
        code = main(["--out", str(out), "--powers", "10:5:15", "--runs", "1",
                     "--cancellers", "linear,widely_linear", "--seed", "3"])
        assert code == 0
        lines = out.read_text().strip().split("\n")
        header = [ln for ln in lines if not ln.startswith("#")]
        assert header[0] == "tx_power_dbm,canceller,mean_sinr_db,std_sinr_db,runs,saturation_count"
        assert len(header) == 1 + 2 * 2  # 2 powers x 2 cancellers

    def test_config_plus_flag_override(self, tmp_path):
        cfgfile = tmp_path / "s.cfg"
        cfgfile.write_text("[sweep]\npowers_dbm = 10\nruns = 2\n"
                           "cancellers = linear\n[estimation]\nn_samples = 4000\n")
        out = tmp_path / "o.csv"
        assert main(["--config", str(cfgfile), "--out", str(out),
                     "--runs", "1", "--pa", "wiener"]) == 0
        rows = [ln for ln in out.read_text().splitlines()
                if not ln.startswith("#")][1:]
        assert len(rows) == 1 and rows[0].endswith(",1,0")

    def test_error_exit_codes(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "missing.cfg")]) == 2
        assert main(["--powers", "bad"]) == 2
        assert main(["--cancellers", "nope", "--powers", "10",
                     "--runs", "1"]) == 2
        err = capsys.readouterr().err
        assert "error" in err

    def test_unknown_flag_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["--frobnicate"])
        assert exc.value.code != 0

    def test_dump_models(self, tmp_path):
        out = tmp_path / "o.csv"
        mdir = tmp_path / "models"
        code = main(["--out", str(out), "--powers", "10", "--runs", "1",
                     "--cancellers", "linear,pa_only", "--dump-models", str(mdir)])
        assert code == 0
        files = sorted(f.name for f in mdir.glob("*.json"))
        assert files == ["linear.json", "pa_only5.json"]
        m = load_canceller_model(mdir / "pa_only5.json")
        assert m.coeffs.shape == (2, 2, 3, 10)
