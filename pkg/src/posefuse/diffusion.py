"""Forward diffusion, noise distributions, weighted eps-loss, toy denoisers.

The weighted loss is the plain mean-squared noise-prediction error with
per-pixel weights from a LossWeightMap, normalized by the total weight
so amplified regions change the gradient balance but not the loss scale.
Toy denoisers satisfy the same call contract as the real video model
(latents, condition, step) -> latents and stand in for it everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .regions import LossWeightMap

DEFAULT_BETA_1 = 1e-4
DEFAULT_BETA_T = 0.02
DEFAULT_T = 1000


class TrainingDiverged(RuntimeError):
    def __init__(self, trace: list[float]):
        super().__init__(f"toy training diverged, last loss {trace[-1]:.4g}")
        self.trace = trace


@dataclass(frozen=True)
class NoiseSchedule:
    """DDPM-style schedule; alpha_bar(0) is defined as 1."""

    beta: np.ndarray
    alpha: np.ndarray = field(repr=False)
    alpha_bar: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.beta.ndim != 1 or len(self.beta) < 1:
            raise ValueError("beta must be a nonempty 1-D array")
        if np.any(self.beta <= 0) or np.any(self.beta >= 1):
            raise ValueError("every beta_t must lie in (0, 1)")
        if np.any(np.diff(self.alpha_bar) >= 0):
            raise ValueError("alpha_bar must be strictly decreasing")
        for a in (self.beta, self.alpha, self.alpha_bar):
            a.setflags(write=False)

    @classmethod
    def from_betas(cls, betas: Sequence[float] | np.ndarray) -> "NoiseSchedule":
        beta = np.asarray(betas, dtype=np.float64).copy()
        alpha = 1.0 - beta
        return cls(beta, alpha, np.cumprod(alpha))

    @property
    def T(self) -> int:
        return len(self.beta)

    def alpha_bar_at(self, t: int) -> float:
        if not 0 <= t <= self.T:
            raise ValueError(f"step {t} out of range [0, {self.T}]")
        return 1.0 if t == 0 else float(self.alpha_bar[t - 1])


def linear_beta_schedule(T: int = DEFAULT_T, beta_1: float = DEFAULT_BETA_1,
                         beta_T: float = DEFAULT_BETA_T) -> NoiseSchedule:
    if T < 1:
        raise ValueError("T must be >= 1")
    if not 0 < beta_1 <= beta_T < 1:
        raise ValueError("need 0 < beta_1 <= beta_T < 1")
    return NoiseSchedule.from_betas(np.linspace(beta_1, beta_T, T))


def forward_diffuse(x0: np.ndarray, t: int, sched: NoiseSchedule,
                    noise: np.ndarray) -> np.ndarray:
    """sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * noise."""
    if x0.shape != noise.shape:
        raise ValueError(f"noise shape {noise.shape} != x0 shape {x0.shape}")
    ab = sched.alpha_bar_at(t)
    return np.sqrt(ab) * x0 + np.sqrt(1.0 - ab) * noise


@dataclass(frozen=True)
class SigmaDist:
    """log sigma ~ Normal(p_mean, p_std^2)."""

    p_mean: float = 0.5
    p_std: float = 1.4

    def __post_init__(self):
        if self.p_std <= 0:
            raise ValueError("p_std must be > 0")


def karras_sigma_sample(dist: SigmaDist, rng: np.random.Generator,
                        size: int | tuple[int, ...] | None = None):
    """Draw noise levels sigma = exp(p_mean + p_std * g), g standard normal."""
    g = rng.standard_normal(size)
    sigma = np.exp(dist.p_mean + dist.p_std * g)
    return float(sigma) if size is None else sigma


def _broadcast_weights(w, shape: tuple[int, ...]) -> np.ndarray:
    data = w.data if isinstance(w, LossWeightMap) else np.asarray(w, dtype=np.float64)
    if data.shape == shape:
        return data
    if data.shape == shape[-2:]:
        return np.broadcast_to(data, shape)
    raise ValueError(f"weight shape {data.shape} incompatible with {shape}")


def weighted_eps_loss(eps_hat: np.ndarray, eps: np.ndarray,
                      w: LossWeightMap | np.ndarray) -> float:
    """Weighted mean of squared errors: sum(w * d^2) / sum(w)."""
    if eps_hat.shape != eps.shape:
        raise ValueError(f"shape mismatch {eps_hat.shape} vs {eps.shape}")
    wb = _broadcast_weights(w, eps.shape)
    total = float(np.sum(wb))
    if total <= 0:
        raise ValueError("weights must have positive total")
    d = eps_hat - eps
    return float(np.sum(wb * d * d) / total)


@dataclass(frozen=True)
class AffineParams:
    """Per-channel affine noise predictor: eps_hat = a[c] * x_t + b[c]."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError("a and b must be 1-D arrays of equal length")

    @classmethod
    def zeros(cls, channels: int) -> "AffineParams":
        return cls(np.zeros(channels), np.zeros(channels))

    def predict(self, x_t: np.ndarray) -> np.ndarray:
        c = len(self.a)
        if x_t.shape[1] != c:
            raise ValueError(f"expected {c} channels, got {x_t.shape[1]}")
        return self.a.reshape(1, c, 1, 1) * x_t + self.b.reshape(1, c, 1, 1)


Sample = tuple[np.ndarray, np.ndarray, int]  # (x_t, eps, t)


def affine_batch_loss(params: AffineParams, samples: Sequence[Sample],
                      w: LossWeightMap | np.ndarray) -> float:
    losses = [weighted_eps_loss(params.predict(x_t), eps, w)
              for x_t, eps, _t in samples]
    return float(np.mean(losses))


def loss_grad_linear(params: AffineParams, samples: Sequence[Sample],
                     w: LossWeightMap | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form gradient of affine_batch_loss wrt (a, b)."""
    c = len(params.a)
    ga = np.zeros(c)
    gb = np.zeros(c)
    n = len(samples)
    for x_t, eps, _t in samples:
        wb = _broadcast_weights(w, x_t.shape)
        total = float(np.sum(wb))
        d = params.predict(x_t) - eps
        # d loss / d a_c = 2 sum(w d x over channel c) / sum(w), averaged over batch
        ga += 2.0 * np.sum(wb * d * x_t, axis=(0, 2, 3)) / total / n
        gb += 2.0 * np.sum(wb * d, axis=(0, 2, 3)) / total / n
    return ga, gb


def train_toy_denoiser(samples: Sequence[Sample], w: LossWeightMap | np.ndarray,
                       steps: int, lr: float,
                       params: AffineParams | None = None,
                       ) -> tuple[AffineParams, list[float]]:
    """Plain gradient descent on the weighted eps-loss; returns loss trace."""
    if lr <= 0:
        raise ValueError("lr must be > 0")
    if params is None:
        params = AffineParams.zeros(samples[0][0].shape[1])
    trace = [affine_batch_loss(params, samples, w)]
    for _ in range(steps):
        ga, gb = loss_grad_linear(params, samples, w)
        params = AffineParams(params.a - lr * ga, params.b - lr * gb)
        trace.append(affine_batch_loss(params, samples, w))
        if trace[-1] > 1e6:
            raise TrainingDiverged(trace)
    return params, trace


@dataclass(frozen=True)
class Condition:
    """Conditioning bundle handed to a denoiser.

    ref_latent is the encoded reference image stand-in (1, C, H, W);
    pose_features carry per-frame guidance features. frame_offset and
    segment_index identify which slice of a long video a segment covers,
    so per-segment denoiser calls know their position.
    """

    ref_latent: np.ndarray | None = None
    pose_features: np.ndarray | None = None
    frame_offset: int = 0
    segment_index: int = 0

    def __post_init__(self):
        if self.ref_latent is not None:
            if self.ref_latent.ndim != 4 or self.ref_latent.shape[0] != 1:
                raise ValueError("ref_latent must have shape (1, C, H, W)")
        if self.pose_features is not None and self.ref_latent is not None:
            if self.pose_features.shape[-2:] != self.ref_latent.shape[-2:]:
                raise ValueError("pose_features spatial dims must match ref_latent")


Denoiser = Callable[[np.ndarray, Condition, int], np.ndarray]


def make_toy_denoiser(kind: str, *, target: np.ndarray | None = None,
                      eta: float | None = None, mu: float = 0.0,
                      sigma0: float = 1.0,
                      sched: NoiseSchedule | None = None) -> Denoiser:
    """Build a stand-in denoiser satisfying the model call contract.

    ``smoother`` pulls latents a fraction eta toward the matching slice
    of a supplied target trajectory each step. ``analytic_gaussian`` is
    the exact posterior-mean denoiser for i.i.d. Normal(mu, sigma0^2)
    data under the given schedule.
    """
    if kind == "smoother":
        if target is None or eta is None:
            raise ValueError("smoother needs target and eta")
        if not 0 < eta <= 1:
            raise ValueError("eta must lie in (0, 1]")
        tgt_full = np.asarray(target, dtype=np.float64)

        def smoother(z: np.ndarray, cond: Condition, t: int) -> np.ndarray:
            off = cond.frame_offset if cond is not None else 0
            tgt = tgt_full[off:off + z.shape[0]]
            if tgt.shape != z.shape:
                raise ValueError(f"target slice {tgt.shape} != latents {z.shape}")
            return z + eta * (tgt - z)

        return smoother

    if kind == "analytic_gaussian":
        if sched is None:
            raise ValueError("analytic_gaussian needs a schedule")
        if sigma0 <= 0:
            raise ValueError("sigma0 must be > 0")
        var0 = sigma0 * sigma0

        def posterior_mean(z: np.ndarray, cond: Condition, t: int) -> np.ndarray:
            ab = sched.alpha_bar_at(t)
            return (var0 * np.sqrt(ab) * z + (1.0 - ab) * mu) / (ab * var0 + (1.0 - ab))

        return posterior_mean

    raise ValueError(f"unknown toy denoiser kind {kind!r}")
