"""Run configuration: a flat JSON document whose keys mirror RunConfig
field names exactly. Loading re-validates every constraint owned by the
modules the fields feed (planner, style, weights, denoisers), so a bad
config fails at load time rather than mid-run.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .fusion import FUSION_MODES
from .render import CONFIDENCE_MODES

DENOISER_KINDS = ("phase_smoother", "analytic_gaussian")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # long-video segmentation and denoising
    total_frames: int = 36
    segment_length: int = 16
    context_overlap: int = 6
    steps: int = 25
    mode: str = "progressive"
    seed: int = 0
    parallel: bool = False
    # per-frame latent dims
    latent_channels: int = 4
    latent_height: int = 8
    latent_width: int = 8
    # toy denoiser kind and parameters
    denoiser: str = "phase_smoother"
    eta: float = 0.35
    phase_jitter: float = 0.3
    period_min: float = 24.0
    period_max: float = 48.0
    mu: float = 0.0
    sigma0: float = 1.0
    # canvas and guidance rendering
    width: int = 1024
    height: int = 576
    keypoint_radius: float = 4.0
    limb_thickness: float = 4.0
    confidence_mode: str = "scaled"
    threshold: float = 0.3
    # hand-region weighting
    tau_hand: float = 0.6
    pad_frac: float = 0.25
    w_hand: float = 10.0
    # artifact output
    out_dir: str = "out"


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    defaults = RunConfig()
    clean = {}
    for key, value in doc.items():
        have = getattr(defaults, key)
        if isinstance(have, bool):
            ok = isinstance(value, bool)
        elif isinstance(have, int):
            ok = isinstance(value, int) and not isinstance(value, bool)
        elif isinstance(have, float):
            ok = isinstance(value, (int, float)) and not isinstance(value, bool)
            value = float(value)
        else:
            ok = isinstance(value, str)
        if not ok:
            raise ConfigError(f"{key}: expected {type(have).__name__}, "
                              f"got {type(value).__name__}")
        clean[key] = value
    cfg = RunConfig(**clean)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    def need(ok: bool, msg: str):
        if not ok:
            raise ConfigError(msg)

    need(cfg.total_frames >= 1, "total_frames must be >= 1")
    need(0 < cfg.context_overlap < cfg.segment_length,
         "overlap must be smaller than segment length")
    need(cfg.steps >= 1, "steps must be >= 1")
    need(cfg.mode in FUSION_MODES, f"mode must be one of {FUSION_MODES}")
    need(0 <= cfg.seed < 2 ** 64, "seed must fit in 64 bits")
    need(cfg.latent_channels >= 1 and cfg.latent_height >= 1
         and cfg.latent_width >= 1, "latent dims must be >= 1")
    need(cfg.denoiser in DENOISER_KINDS,
         f"denoiser must be one of {DENOISER_KINDS}")
    need(0 < cfg.eta <= 1, "eta must lie in (0, 1]")
    need(cfg.phase_jitter >= 0, "phase_jitter must be >= 0")
    need(0 < cfg.period_min < cfg.period_max,
         "need 0 < period_min < period_max")
    need(cfg.sigma0 > 0, "sigma0 must be > 0")
    need(cfg.width >= 8 and cfg.height >= 8, "canvas must be at least 8x8")
    need(cfg.keypoint_radius > 0, "keypoint_radius must be > 0")
    need(cfg.limb_thickness > 0, "limb_thickness must be > 0")
    need(cfg.confidence_mode in CONFIDENCE_MODES,
         f"confidence_mode must be one of {CONFIDENCE_MODES}")
    need(0 <= cfg.threshold <= 1, "threshold must lie in [0, 1]")
    need(0 <= cfg.tau_hand <= 1, "tau_hand must lie in [0, 1]")
    need(cfg.pad_frac >= 0, "pad_frac must be >= 0")
    need(cfg.w_hand >= 1, "w_hand must be >= 1")


def load_run_config(path: str | Path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return config_from_dict(doc)


def config_to_json(cfg: RunConfig) -> str:
    return json.dumps(dataclasses.asdict(cfg), indent=2, sort_keys=True) + "\n"
