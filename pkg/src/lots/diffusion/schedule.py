"""Variance-preserving noise schedule for training and deterministic sampling."""

from __future__ import annotations

import torch

from ..config import ScheduleConfig


class ScheduleError(ValueError):
    pass


class NoiseSchedule:
    """Linear-beta schedule with x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.

    Coefficients are kept in float64 so the signal+noise variance identity
    holds to 1e-12 at every step.
    """

    def __init__(self, cfg: ScheduleConfig | None = None):
        cfg = cfg or ScheduleConfig()
        if cfg.timesteps < 1:
            raise ScheduleError("timesteps must be >= 1")
        self.cfg = cfg
        self.timesteps = cfg.timesteps
        betas = torch.linspace(cfg.beta_start, cfg.beta_end, cfg.timesteps, dtype=torch.float64)
        alphas = 1.0 - betas
        alpha_bars = torch.cumprod(alphas, dim=0)
        if not (betas[1:] >= betas[:-1]).all():
            raise ScheduleError("betas must be non-decreasing")
        if not (alpha_bars[1:] <= alpha_bars[:-1]).all():
            raise ScheduleError("alpha_bar must be non-increasing")
        self.betas = betas
        self.alphas = alphas
        self.alpha_bars = alpha_bars
        self.signal = alpha_bars.sqrt()
        self.noise = (1.0 - alpha_bars).sqrt()

    def variance_identity_error(self) -> float:
        """max_t |signal_t^2 + noise_t^2 - 1|."""
        return float((self.signal**2 + self.noise**2 - 1.0).abs().max())

    def add_noise(self, x0: torch.Tensor, eps: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
        """Forward process at integer timesteps t (shape: batch)."""
        s = self.signal[t].to(x0.dtype).view(-1, *([1] * (x0.ndim - 1)))
        n = self.noise[t].to(x0.dtype).view(-1, *([1] * (x0.ndim - 1)))
        return s * x0 + n * eps

    def sampling_timesteps(self, steps: int) -> list[int]:
        """Evenly spaced decreasing timesteps for the deterministic sampler."""
        if steps < 1:
            raise ScheduleError("steps must be >= 1")
        steps = min(steps, self.timesteps)
        stride = self.timesteps / steps
        ts = [min(self.timesteps - 1, int(round(i * stride))) for i in range(steps)]
        ts = sorted(set(ts), reverse=True)
        return ts

    def ddim_step(self, x: torch.Tensor, eps_pred: torch.Tensor, t: int, t_prev: int) -> torch.Tensor:
        """One deterministic reverse update from t to t_prev (t_prev < t, -1 = clean)."""
        s_t = float(self.signal[t])
        n_t = float(self.noise[t])
        x0 = (x - n_t * eps_pred) / s_t
        if t_prev < 0:
            return x0
        s_p = float(self.signal[t_prev])
        n_p = float(self.noise[t_prev])
        return s_p * x0 + n_p * eps_pred
