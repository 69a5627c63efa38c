"""Decentral smart-grid control: delayed swing-equation stability labels.

The network is a five-node star: four consumers (power -1) attached to a
central producer (power +4), damping 0.1 and line coupling 8 throughout.
Each consumer additionally feeds back its own time-averaged frequency
with a reaction delay, giving the delayed term

    (gamma_j / T_j) * (theta_j(t - tau_j) - theta_j(t - tau_j - T_j))

subtracted from its acceleration.  The twelve free inputs are the four
consumers' (gamma, tau, T) triples; column layout is g1..g4, tau1..tau4,
T1..T4 with ranges [0.05, 1], [0.5, 5] and [1, 4].

Integration is fixed-step classical Runge-Kutta with a ring-buffer
history and linear interpolation for delayed lookups; history before
t=0 is held constant at the initial state.  All machines start phase
aligned (theta = 0) with a common frequency offset ``initial_omega``,
and a run is labeled unstable (y=1) when the largest |dtheta/dt| inside
the trailing ``window`` seconds still exceeds that offset.  The horizon
default of 44 s was calibrated once so that the positive share over the
first 10^4 Halton points is 52.5%, matching its documented 53.7% within
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxes import HyperBox
from .errors import InvalidConfigError, SimulationFailureError

__all__ = ["DsgcParams", "SimConfig", "DSGC_BOX", "simulate_batch", "dsgc_simulate", "stability_margin"]

N_CONSUMERS = 4
POWER_CONSUMER = -1.0
POWER_PRODUCER = 4.0
DAMPING = 0.1
COUPLING = 8.0

DSGC_BOX = HyperBox(
    np.array([0.05] * 4 + [0.5] * 4 + [1.0] * 4),
    np.array([1.0] * 4 + [5.0] * 4 + [4.0] * 4),
)

_MAX_LAG = 9.0  # tau + T never exceeds 5 + 4 seconds


@dataclass(frozen=True)
class SimConfig:
    """Integration settings for the stability simulation."""

    step: float = 0.01
    horizon: float = 44.0
    window: float = 5.0
    initial_omega: float = 0.1
    threshold: float = 0.1
    chunk: int = 2000

    def __post_init__(self):
        if self.step <= 0 or self.horizon <= self.window or self.window <= 0:
            raise InvalidConfigError("need step > 0 and horizon > window > 0")


@dataclass(frozen=True)
class DsgcParams:
    """Per-consumer control parameters of one grid configuration."""

    gamma: np.ndarray
    tau: np.ndarray
    t_avg: np.ndarray

    def __post_init__(self):
        for name in ("gamma", "tau", "t_avg"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (N_CONSUMERS,):
                raise InvalidConfigError(f"{name} must have shape ({N_CONSUMERS},)")
            object.__setattr__(self, name, arr)
        vec = self.to_vector()
        if np.any(vec < DSGC_BOX.lower) or np.any(vec > DSGC_BOX.upper):
            raise InvalidConfigError("parameters outside the allowed ranges")

    @classmethod
    def from_vector(cls, x) -> "DsgcParams":
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape != (12,):
            raise InvalidConfigError("parameter vector must have 12 entries")
        return cls(x[0:4], x[4:8], x[8:12])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.gamma, self.tau, self.t_avg])


def stability_margin(params: np.ndarray, config: SimConfig = SimConfig()) -> np.ndarray:
    """Max |dtheta/dt| over the trailing window, one value per row of params."""
    params = np.atleast_2d(np.asarray(params, dtype=float))
    if params.shape[1] != 12:
        raise InvalidConfigError("params must have 12 columns")
    out = np.empty(params.shape[0])
    for start in range(0, params.shape[0], config.chunk):
        out[start : start + config.chunk] = _integrate_chunk(
            params[start : start + config.chunk], config
        )
    return out


def simulate_batch(params: np.ndarray, config: SimConfig = SimConfig()) -> np.ndarray:
    """Binary instability labels for a batch of 12-column parameter rows."""
    margin = stability_margin(params, config)
    return (margin > config.threshold).astype(np.int64)


def dsgc_simulate(params: DsgcParams, config: SimConfig = SimConfig()) -> int:
    """Label a single configuration: 1 when the run stays agitated."""
    return int(simulate_batch(params.to_vector()[None, :], config)[0])


def _integrate_chunk(params: np.ndarray, cfg: SimConfig) -> np.ndarray:
    n_sim = params.shape[0]
    gamma = params[:, 0:4]
    tau = params[:, 4:8]
    t_avg = params[:, 8:12]
    coef = gamma / t_avg
    lag_short = tau
    lag_long = tau + t_avg

    h = cfg.step
    n_steps = int(round(cfg.horizon / h))
    n_ring = int(np.ceil(_MAX_LAG / h)) + 4
    hist = np.zeros((n_ring, n_sim, N_CONSUMERS))
    theta = np.zeros((n_sim, 5))
    omega = np.full((n_sim, 5), cfg.initial_omega)
    sim_idx = np.arange(n_sim)[:, None]
    node_idx = np.arange(N_CONSUMERS)[None, :]

    def lookup(step_now: int, t_query: float, lag: np.ndarray) -> np.ndarray:
        t_past = t_query - lag
        pos = t_past / h
        i0 = np.floor(pos).astype(np.int64)
        frac = pos - i0
        before_start = i0 < 0
        i0c = np.clip(i0, 0, step_now)
        i1c = np.clip(i0 + 1, 0, step_now)
        val = hist[i0c % n_ring, sim_idx, node_idx] * (1.0 - frac)
        val += hist[i1c % n_ring, sim_idx, node_idx] * frac
        val[before_start] = 0.0  # constant pre-start history equals theta(0)
        return val

    def rates(th: np.ndarray, om: np.ndarray, delayed: np.ndarray):
        sin_pc = np.sin(th[:, 4:5] - th[:, :4])
        dom = np.empty_like(om)
        dom[:, :4] = POWER_CONSUMER - DAMPING * om[:, :4] + COUPLING * sin_pc - delayed
        dom[:, 4] = POWER_PRODUCER - DAMPING * om[:, 4] - COUPLING * sin_pc.sum(axis=1)
        return om, dom

    max_rate = np.zeros(n_sim)
    window_start = cfg.horizon - cfg.window
    for k in range(n_steps):
        t = k * h
        delayed_0 = coef * (lookup(k, t, lag_short) - lookup(k, t, lag_long))
        delayed_m = coef * (lookup(k, t + h / 2, lag_short) - lookup(k, t + h / 2, lag_long))
        delayed_1 = coef * (lookup(k, t + h, lag_short) - lookup(k, t + h, lag_long))
        k1t, k1w = rates(theta, omega, delayed_0)
        k2t, k2w = rates(theta + h / 2 * k1t, omega + h / 2 * k1w, delayed_m)
        k3t, k3w = rates(theta + h / 2 * k2t, omega + h / 2 * k2w, delayed_m)
        k4t, k4w = rates(theta + h * k3t, omega + h * k3w, delayed_1)
        theta = theta + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
        omega = omega + h / 6 * (k1w + 2 * k2w + 2 * k3w + k4w)
        hist[(k + 1) % n_ring] = theta[:, :4]
        if t + h >= window_start:
            np.maximum(max_rate, np.abs(omega).max(axis=1), out=max_rate)
    if not np.all(np.isfinite(max_rate)):
        raise SimulationFailureError("non-finite state during integration")
    return max_rate
