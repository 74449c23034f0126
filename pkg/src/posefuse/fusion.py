"""Segment planning and progressive latent fusion for long videos.

A long clip of L frames is denoised as overlapping segments of N frames
(consecutive segments share C frames). After every denoising step the
overlapping copies are blended: at overlap position k (1-based) the
incoming segment gets weight k/(C+1) and the outgoing segment the
remainder, so each transition inside the overlap moves by at most
1/(C+1) of the disagreement. All copies of a frame are assigned the
same fused value, which keeps segments consistent going into the next
step. Uniform fusion (plain averaging of all copies) and no fusion are
kept alongside as ablation baselines.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .diffusion import Condition, Denoiser
from .seeding import stream_rng

FUSION_MODES = ("progressive", "uniform", "none")


@dataclass(frozen=True)
class SegmentPlan:
    """Half-open frame ranges [start, start + N) covering [0, L).

    When the clip is shorter than one segment the plan degrades to a
    single truncated segment [0, L), flagged so callers can tell.
    """

    total_frames: int
    segment_length: int
    context_overlap: int
    starts: tuple[int, ...]
    truncated: bool = False

    @property
    def frames_per_segment(self) -> int:
        return self.total_frames if self.truncated else self.segment_length

    @property
    def segments(self) -> tuple[tuple[int, int], ...]:
        n = self.frames_per_segment
        return tuple((s, s + n) for s in self.starts)

    def segment(self, i: int) -> tuple[int, int]:
        return self.starts[i], self.starts[i] + self.frames_per_segment

    def __len__(self) -> int:
        return len(self.starts)


def plan_segments(total_frames: int, segment_length: int,
                  context_overlap: int) -> SegmentPlan:
    """Choose segment starts covering [0, total_frames).

    Starts advance by segment_length - context_overlap. When the final
    stride would overshoot, the last segment is pinned to end exactly at
    total_frames, which can only enlarge its overlap with the previous
    segment. A clip shorter than one segment yields a single truncated
    segment.
    """
    L, N, C = total_frames, segment_length, context_overlap
    if not 0 < C < N:
        raise ValueError(f"overlap must be smaller than segment length "
                         f"(got C={C}, N={N})")
    if L < 1:
        raise ValueError("total_frames must be >= 1")
    if L < N:
        return SegmentPlan(L, N, C, (0,), truncated=True)
    starts = [0]
    while starts[-1] + N < L:
        nxt = starts[-1] + (N - C)
        if nxt + N > L:
            nxt = L - N
        starts.append(nxt)
    return SegmentPlan(L, N, C, tuple(starts))


def format_plan(plan: SegmentPlan) -> str:
    starts = ",".join(str(s) for s in plan.starts)
    return (f"{plan.total_frames} {plan.segment_length} "
            f"{plan.context_overlap}: {starts}")


def parse_plan(text: str) -> SegmentPlan:
    head, _, tail = text.strip().partition(":")
    try:
        L, N, C = (int(p) for p in head.split())
        starts = tuple(int(p) for p in tail.strip().split(","))
    except ValueError as exc:
        raise ValueError(f"malformed plan text {text!r}") from exc
    plan = plan_segments(L, N, C)
    if plan.starts != starts:
        raise ValueError(f"plan starts {starts} inconsistent with L={L} N={N} C={C}")
    return plan


def fusion_lambda(context_overlap: int) -> float:
    return 1.0 / (context_overlap + 1)


@dataclass(frozen=True)
class FusionWeights:
    """Blend weights per overlap position k = 1..C.

    w_next[k-1] = k / (C + 1) goes to the incoming segment's copy and
    w_prev[k-1] = 1 - w_next[k-1] to the outgoing one; the pair sums to
    1 exactly in floating point.
    """

    context_overlap: int
    w_next: np.ndarray
    w_prev: np.ndarray


def fusion_weights(context_overlap: int) -> FusionWeights:
    C = context_overlap
    if C < 1:
        raise ValueError("context_overlap must be >= 1")
    w_next = np.array([k / (C + 1) for k in range(1, C + 1)])
    return FusionWeights(C, w_next, 1.0 - w_next)


def overlap_weights(context_overlap: int, overlap_size: int) -> np.ndarray:
    """Incoming-segment weight at each position of an actual overlap.

    Position m (0-based) gets (m + 1) / (C + 1); when the overlap
    exceeds C (a pinned tail segment), positions past the ramp belong
    to the incoming segment outright.
    """
    C = context_overlap
    if overlap_size < 1:
        raise ValueError("overlap_size must be >= 1")
    return np.array([(m + 1) / (C + 1) if m < C else 1.0
                     for m in range(overlap_size)])


def _check_segment_latents(latents: Sequence[np.ndarray], plan: SegmentPlan):
    if len(latents) != len(plan):
        raise ValueError(f"expected {len(plan)} segment arrays, got {len(latents)}")
    n = plan.frames_per_segment
    for z in latents:
        if z.ndim != 4 or z.shape[0] != n:
            raise ValueError(f"segment latents must be (N, C, H, W) with "
                             f"N={n}, got {z.shape}")
        if z.shape[1:] != latents[0].shape[1:]:
            raise ValueError("segments disagree on latent shape")


def _holders(plan: SegmentPlan, frame: int) -> list[int]:
    return [i for i, (s, e) in enumerate(plan.segments) if s <= frame < e]


def progressive_fuse(latents: Sequence[np.ndarray],
                     plan: SegmentPlan) -> list[np.ndarray]:
    """Blend overlapping frame copies with the position-ramped weights.

    Fused values are computed from the pre-fusion arrays, so the order
    of the two per-pair updates cannot matter; when a frame sits in more
    than two segments (possible for a pinned tail) the later adjacent
    pair decides it. Every copy receives the same value.
    """
    _check_segment_latents(latents, plan)
    originals = [np.asarray(z, dtype=np.float64) for z in latents]
    fused: dict[int, np.ndarray] = {}
    for i in range(len(plan) - 1):
        s_prev, _e_prev = plan.segment(i)
        s_next, e_next = plan.segment(i + 1)
        ov_end = min(plan.segment(i)[1], e_next)
        w = overlap_weights(plan.context_overlap, ov_end - s_next)
        for m, f in enumerate(range(s_next, ov_end)):
            w_next = float(w[m])
            fused[f] = (w_next * originals[i + 1][f - s_next]
                        + (1.0 - w_next) * originals[i][f - s_prev])
    out = [z.copy() for z in originals]
    for f, value in fused.items():
        for i in _holders(plan, f):
            out[i][f - plan.starts[i]] = value
    return out


def uniform_fuse(latents: Sequence[np.ndarray],
                 plan: SegmentPlan) -> list[np.ndarray]:
    """Replace every copy of a shared frame with the mean of all copies."""
    _check_segment_latents(latents, plan)
    originals = [np.asarray(z, dtype=np.float64) for z in latents]
    out = [z.copy() for z in originals]
    for f in range(plan.total_frames):
        holders = _holders(plan, f)
        if len(holders) < 2:
            continue
        value = np.mean([originals[i][f - plan.starts[i]] for i in holders], axis=0)
        for i in holders:
            out[i][f - plan.starts[i]] = value
    return out


def fuse_segments(latents: Sequence[np.ndarray], plan: SegmentPlan,
                  mode: str) -> list[np.ndarray]:
    if mode == "progressive":
        return progressive_fuse(latents, plan)
    if mode == "uniform":
        return uniform_fuse(latents, plan)
    if mode == "none":
        _check_segment_latents(latents, plan)
        return [np.asarray(z, dtype=np.float64).copy() for z in latents]
    raise ValueError(f"unknown fusion mode {mode!r}, expected one of {FUSION_MODES}")


def assemble(latents: Sequence[np.ndarray], plan: SegmentPlan) -> np.ndarray:
    """Concatenate segments into an (L, C, H, W) video.

    Segment i contributes frames [start_i, start_{i+1}); the final
    segment contributes its whole range. After fusion the choice of
    contributor would not matter on overlaps since all copies agree,
    but without fusion this rule defines the hard-concat baseline.
    """
    _check_segment_latents(latents, plan)
    shape = (plan.total_frames,) + latents[0].shape[1:]
    video = np.empty(shape)
    for i, (s, _e) in enumerate(plan.segments):
        cut = plan.starts[i + 1] if i + 1 < len(plan) else plan.total_frames
        video[s:cut] = latents[i][:cut - s]
    return video


StepCallback = Callable[[int, list[np.ndarray]], None]


def run_long_denoise(denoiser: Denoiser, cond: Condition | None,
                     plan: SegmentPlan, steps: int,
                     mode: str = "progressive", seed: int = 0, *,
                     latent_shape: tuple[int, int, int] | None = None,
                     parallel: bool = False,
                     on_step: StepCallback | None = None) -> np.ndarray:
    """Denoise-then-fuse over all segments; returns the assembled video.

    Segment i starts from Gaussian noise drawn on its own seed stream,
    so results do not depend on scheduling. Each step applies the
    denoiser to every segment (optionally across a thread pool, bit
    identical to the serial path) and then fuses overlaps per mode.
    Steps count down from `steps` to 1; the per-frame latent shape comes
    from cond.ref_latent unless given explicitly.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if mode not in FUSION_MODES:
        raise ValueError(f"unknown fusion mode {mode!r}")
    base = cond if cond is not None else Condition()
    if latent_shape is None:
        if base.ref_latent is None:
            raise ValueError("need latent_shape or cond.ref_latent")
        latent_shape = base.ref_latent.shape[1:]
    shape = (plan.frames_per_segment,) + tuple(latent_shape)

    conds = []
    latents = []
    for i, (s, e) in enumerate(plan.segments):
        c = replace(base, frame_offset=s, segment_index=i)
        if (base.pose_features is not None
                and len(base.pose_features) == plan.total_frames):
            c = replace(c, pose_features=base.pose_features[s:e])
        conds.append(c)
        latents.append(stream_rng(seed, i, 0).standard_normal(shape))

    for t in range(steps, 0, -1):
        if parallel:
            with ThreadPoolExecutor(max_workers=len(latents)) as pool:
                futures = [pool.submit(denoiser, z, c, t)
                           for z, c in zip(latents, conds)]
                stepped = [f.result() for f in futures]
        else:
            stepped = [denoiser(z, c, t) for z, c in zip(latents, conds)]
        for z, before in zip(stepped, latents):
            if z.shape != before.shape:
                raise ValueError(f"denoiser changed shape {before.shape} "
                                 f"-> {z.shape}")
        latents = fuse_segments(stepped, plan, mode)
        if on_step is not None:
            on_step(t, latents)
    return assemble(latents, plan)


def frame_difference_profile(video: np.ndarray) -> np.ndarray:
    """Mean absolute change between consecutive frames, length L - 1."""
    if video.ndim < 2 or video.shape[0] < 2:
        raise ValueError("need at least 2 frames")
    diffs = np.abs(np.diff(video, axis=0))
    return diffs.reshape(diffs.shape[0], -1).mean(axis=1)


def boundary_transitions(plan: SegmentPlan) -> tuple[int, ...]:
    """Frame-transition indices where segment seams can show.

    For each adjacent pair these are the transition into the overlap
    (start_{i+1} - 1) and the one leaving it (end_i - 1), clipped to the
    valid transition range.
    """
    last = plan.total_frames - 2
    marks = set()
    for i in range(len(plan) - 1):
        for f in (plan.starts[i + 1] - 1, plan.segment(i)[1] - 1):
            marks.add(min(max(f, 0), last))
    return tuple(sorted(marks))


def boundary_jump_metric(profile: np.ndarray, plan: SegmentPlan) -> float:
    """Worst seam-transition difference minus the typical interior one."""
    if len(profile) != plan.total_frames - 1:
        raise ValueError("profile length must be total_frames - 1")
    marks = list(boundary_transitions(plan))
    if not marks:
        return 0.0
    interior = np.delete(profile, marks)
    baseline = np.median(interior) if interior.size else np.median(profile)
    return float(np.max(profile[marks]) - baseline)


def make_phase_instance(plan: SegmentPlan, latent_shape: tuple[int, int, int],
                        seed: int, eta: float = 0.35,
                        phase_jitter: float = 0.3,
                        period_range: tuple[float, float] = (24.0, 48.0),
                        ) -> Denoiser:
    """Synthetic long-video workload where segments mildly disagree.

    Every latent pixel follows its own sinusoid over frame index (random
    period and phase), and each segment perturbs the phase by a small
    random offset. The denoiser pulls latents a fraction eta toward its
    segment's version of the trajectory per step, so without fusion the
    seams keep a phase mismatch while fusion reconciles them.
    """
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    lo, hi = period_range
    if not 0 < lo < hi:
        raise ValueError("period_range must be increasing and positive")
    shape = tuple(latent_shape)
    period = stream_rng(seed, 100).uniform(lo, hi, size=shape)
    pixel_phase = stream_rng(seed, 101).uniform(0.0, 2.0 * math.pi, size=shape)
    seg_phase = stream_rng(seed, 102).uniform(-phase_jitter, phase_jitter,
                                              size=len(plan))

    def denoise(z: np.ndarray, cond: Condition, t: int) -> np.ndarray:
        if z.shape[1:] != shape:
            raise ValueError(f"latents {z.shape[1:]} != instance shape {shape}")
        frames = cond.frame_offset + np.arange(z.shape[0])
        angle = (2.0 * math.pi * frames[:, None, None, None] / period
                 + pixel_phase + seg_phase[cond.segment_index])
        return z + eta * (np.sin(angle) - z)

    return denoise
