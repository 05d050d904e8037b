import pathlib

import pytest

from spindrift import gallery
from spindrift.config import (ConfigError, ScenarioConfig, parse_config,
                              serialize_config)

DATA = pathlib.Path(__file__).parent / "data"

MINIMAL_SIMULATE = """
[scenario]
name = minimal
mode = simulate

[fields]
B = 0 0 0.02
"""


def test_minimal_simulate_defaults():
    cfg = parse_config(MINIMAL_SIMULATE)
    assert cfg.name == "minimal"
    assert cfg.mass == 1.0
    assert cfg.charge == -1.0
    assert cfg.sample_every == 1
    assert cfg.E == (0.0, 0.0, 0.0)
    assert cfg.B == (0.0, 0.0, 0.02)
    assert cfg.pryce_kinds == ("c", "d", "e")


def test_comments_allowed():
    cfg = parse_config("# header comment\n" + MINIMAL_SIMULATE +
                       "# trailing comment\n")
    assert cfg.B[2] == 0.02


def test_superluminal_velocity_named_diagnostic():
    text = MINIMAL_SIMULATE + "\n[initial]\nv = 1.2 0 0\n"
    with pytest.raises(ConfigError, match="initial.v"):
        parse_config(text)


def test_unknown_key_rejected():
    text = MINIMAL_SIMULATE + "\n[integration]\ndtt = 0.1\n"
    with pytest.raises(ConfigError, match="integration.dtt"):
        parse_config(text)


def test_unknown_section_rejected():
    with pytest.raises(ConfigError, match="wibble"):
        parse_config(MINIMAL_SIMULATE + "\n[wibble]\na = 1\n")


def test_mode_foreign_section_rejected():
    with pytest.raises(ConfigError, match="packet"):
        parse_config(MINIMAL_SIMULATE + "\n[packet]\ngrid_points = 32\n")


def test_missing_mode_rejected():
    with pytest.raises(ConfigError, match="mode"):
        parse_config("[scenario]\nname = x\n")


def test_unknown_mode_rejected():
    with pytest.raises(ConfigError, match="mode"):
        parse_config("[scenario]\nname = x\nmode = explode\n")


def test_verify_fg_requires_packet_block():
    with pytest.raises(ConfigError, match=r"\[packet\]"):
        parse_config("[scenario]\nname = x\nmode = verify-fg\n")


def test_converge_requires_block_and_rungs():
    with pytest.raises(ConfigError, match=r"\[converge\]"):
        parse_config("[scenario]\nname = x\nmode = converge\n")
    with pytest.raises(ConfigError, match="rungs"):
        parse_config("[scenario]\nname = x\nmode = converge\n\n"
                     "[converge]\ntarget = integrator\nrungs = 2\n")


def test_bad_vector_rejected():
    with pytest.raises(ConfigError, match="fields.B"):
        parse_config("[scenario]\nname = x\nmode = simulate\n\n"
                     "[fields]\nB = 1 2\n")


def test_duplicate_kinds_rejected():
    with pytest.raises(ConfigError, match="pryce_kinds"):
        parse_config(MINIMAL_SIMULATE + "\n[output]\npryce_kinds = c c\n")


def test_unknown_kind_rejected():
    with pytest.raises(ConfigError, match="pryce_kinds"):
        parse_config(MINIMAL_SIMULATE + "\n[output]\npryce_kinds = c q\n")


def test_golden_file_roundtrip():
    golden = (DATA / "golden_simulate.cfg").read_text(encoding="utf-8")
    assert serialize_config(parse_config(golden)) == golden


def test_serialize_parse_idempotent_gallery():
    for cfg in {**gallery.gallery_configs(),
                **gallery.converge_configs()}.values():
        text = serialize_config(cfg)
        again = serialize_config(parse_config(text))
        assert again == text


def test_parse_preserves_values():
    cfg0 = ScenarioConfig(name="x", mode="verify-fg")
    cfg0.packet.widths = (0.01, 0.02, 0.03)
    cfg = parse_config(serialize_config(cfg0))
    assert cfg.packet.widths == (0.01, 0.02, 0.03)
    assert cfg.packet.grid_points == 32
    assert cfg.packet.grid_radius == 5.0
