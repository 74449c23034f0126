import json

import pytest

from posefuse.config import (DENOISER_KINDS, ConfigError, RunConfig,
                             config_from_dict, config_to_json,
                             load_run_config)


def test_defaults_are_valid():
    cfg = config_from_dict({})
    assert cfg == RunConfig()
    assert cfg.total_frames == 36
    assert cfg.mode == "progressive"


def test_partial_override():
    cfg = config_from_dict({"total_frames": 48, "mode": "uniform",
                            "eta": 0.5})
    assert cfg.total_frames == 48
    assert cfg.mode == "uniform"
    assert cfg.eta == 0.5
    assert cfg.segment_length == 16  # untouched default


def test_load_from_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"seed": 11, "steps": 5}), encoding="utf-8")
    cfg = load_run_config(path)
    assert cfg.seed == 11 and cfg.steps == 5


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("{nope", encoding="utf-8")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_run_config(path)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown config keys: fames"):
        config_from_dict({"fames": 36})
    with pytest.raises(ConfigError, match="a, b"):
        config_from_dict({"b": 1, "a": 2})


def test_non_object_rejected():
    with pytest.raises(ConfigError, match="JSON object"):
        config_from_dict([1, 2])


def test_type_strictness():
    with pytest.raises(ConfigError, match="steps: expected int"):
        config_from_dict({"steps": "25"})
    with pytest.raises(ConfigError, match="expected int, got bool"):
        config_from_dict({"steps": True})
    with pytest.raises(ConfigError, match="parallel: expected bool"):
        config_from_dict({"parallel": 1})
    with pytest.raises(ConfigError, match="expected float"):
        config_from_dict({"eta": "0.5"})
    with pytest.raises(ConfigError, match="mode: expected str"):
        config_from_dict({"mode": 3})


def test_int_promoted_for_float_fields():
    cfg = config_from_dict({"w_hand": 5})
    assert isinstance(cfg.w_hand, float)
    assert cfg.w_hand == 5.0


@pytest.mark.parametrize("doc, msg", [
    ({"context_overlap": 16}, "overlap must be smaller than segment length"),
    ({"context_overlap": 0}, "overlap must be smaller than segment length"),
    ({"total_frames": 0}, "total_frames"),
    ({"steps": 0}, "steps"),
    ({"mode": "blend"}, "mode must be one of"),
    ({"seed": -1}, "seed"),
    ({"latent_channels": 0}, "latent dims"),
    ({"denoiser": "unet"}, "denoiser must be one of"),
    ({"eta": 0.0}, "eta"),
    ({"eta": 1.5}, "eta"),
    ({"phase_jitter": -0.1}, "phase_jitter"),
    ({"period_min": 50.0}, "period_min"),
    ({"sigma0": 0.0}, "sigma0"),
    ({"width": 4}, "canvas"),
    ({"keypoint_radius": 0.0}, "keypoint_radius"),
    ({"confidence_mode": "soft"}, "confidence_mode"),
    ({"threshold": 1.5}, "threshold"),
    ({"tau_hand": -0.2}, "tau_hand"),
    ({"pad_frac": -1.0}, "pad_frac"),
    ({"w_hand": 0.5}, "w_hand"),
])
def test_constraint_messages(doc, msg):
    with pytest.raises(ConfigError, match=msg):
        config_from_dict(doc)


def test_denoiser_kinds_accepted():
    for kind in DENOISER_KINDS:
        assert config_from_dict({"denoiser": kind}).denoiser == kind


def test_json_roundtrip(tmp_path):
    cfg = config_from_dict({"total_frames": 30, "w_hand": 4.0,
                            "parallel": True, "out_dir": "artifacts"})
    path = tmp_path / "c.json"
    path.write_text(config_to_json(cfg), encoding="utf-8")
    assert load_run_config(path) == cfg


def test_json_dump_is_flat_and_sorted():
    doc = json.loads(config_to_json(RunConfig()))
    assert set(doc) == {f for f in doc}
    keys = list(doc)
    assert keys == sorted(keys)
    assert all(not isinstance(v, (dict, list)) for v in doc.values())
