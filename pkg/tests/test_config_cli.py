import json
import math

import pytest

from eitmem.cli import main
from eitmem.config import SCHEMA, ConfigError, derived_quantities, load_config, parse_config


def test_default_config_derived(cfg):
    d = derived_quantities(cfg)
    assert d["slots_per_window"] == 50
    assert d["probe_pulses_per_second"] == 50_000
    assert d["delta_k_channels_rad_per_m"] == pytest.approx(2 * math.pi / 795e-9 * math.sin(math.radians(0.45)),
                                                            rel=2e-3)
    assert d["delta_k_channels_rad_per_m"] == pytest.approx(6.2e4, rel=0.01)
    assert d["efficiency_channel1"] == pytest.approx(0.35, abs=1e-6)
    assert d["efficiency_channel2"] == pytest.approx(0.23, abs=1e-6)
    assert d["compressed_pulse_length_m"] < 30e-3


def test_canonical_round_trip(cfg):
    again = parse_config(cfg.canonical())
    assert again.values == cfg.values and again.hash == cfg.hash
    assert len(cfg.canonical().splitlines()) == len(SCHEMA)


def test_empty_config_takes_defaults():
    cfg = parse_config("")
    assert cfg["seed"] == SCHEMA["seed"][1]


def test_parse_error_line_column():
    with pytest.raises(ConfigError) as exc:
        parse_config("seed = 1\n[grid]\nn = = 3\n")
    assert exc.value.line == 3 and exc.value.column is not None


@pytest.mark.parametrize("text,field", [
    ("bogus = 1", "bogus"),
    ("[grid]\nn = 1.5", "grid.n"),
    ('[timing]\npulse_period = "x"', "timing.pulse_period"),
    ("[timing]\npulse_period = 300e-6", "timing.pulse_period"),
    ("[scenario]\nphoton_sweep = [1.0, -2.0]\nsweep_frames = [1, 1]", "scenario.photon_sweep"),
    ("[scenario]\nsweep_frames = [1, 2]", "scenario.sweep_frames"),
    ("[channel1]\nread_efficiency = 1.5", "medium"),
    ("[detection]\nquantum_efficiency = 2.0", "detection"),
])
def test_invariant_violations_named(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_with_overrides_revalidates(cfg):
    c = cfg.with_overrides({"seed": 5})
    assert c["seed"] == 5 and c.hash != cfg.hash and cfg["seed"] != 5
    with pytest.raises(ConfigError):
        cfg.with_overrides({"timing.pulse_period": 1.0})


def test_cli_validate(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "# slots_per_window = 50" in out
    assert "seed = " in out


def test_cli_errors_are_json(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("[timing]\npulse_period = 300e-6\n")
    assert main(["validate", "--config", str(bad)]) != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["field"] == "timing.pulse_period"
    bad.write_text("seed = = 1\n")
    assert main(["validate", "--config", str(bad)]) != 0
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["line"] == 1
    assert main(["dual-image", "--out", str(tmp_path), "--mask1", str(tmp_path / "none.pgm")]) != 0
    assert "error" in json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_cli_seed_and_frames_override(tmp_path, capsys, small_cfg):
    path = tmp_path / "small.toml"
    path.write_text(small_cfg.canonical())
    assert main(["temporal", "--config", str(path), "--out", str(tmp_path / "o"), "--seed", "9"]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["config_hash"] == small_cfg.with_overrides({"seed": 9}).hash
    assert main(["photon-sweep", "--config", str(path), "--out", str(tmp_path / "p"), "--frames", "3"]) == 0
    snap = load_config(tmp_path / "p" / "photon-sweep_config.toml")
    assert snap["scenario.sweep_frames"] == [3, 3, 3]


def test_load_config_does_not_touch_file(tmp_path, small_cfg):
    path = tmp_path / "c.toml"
    path.write_text(small_cfg.canonical())
    before = path.read_bytes()
    main(["temporal", "--config", str(path), "--out", str(tmp_path / "o")])
    assert path.read_bytes() == before
