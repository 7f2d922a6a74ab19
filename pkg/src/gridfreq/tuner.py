"""Offline particle-swarm tuning of estimator gains.

Global-best PSO over a box-bounded search space with integral-square-error
fitness computed by running the estimator over a scenario battery.  The
driver is deterministic under a fixed seed; fitness evaluations are pure
and reduced in particle order, so parallel evaluation cannot change the
answer (the reference implementation evaluates serially).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError
from .estimator import EstimatorConfig, run
from .synth import GroundTruth, SampleStream

DIVERGENCE_PENALTY = 1e6


@dataclass(frozen=True)
class SearchSpace:
    """Per-dimension (lower, upper) box bounds, optionally log-scaled."""

    bounds: tuple[tuple[float, float], ...]
    log_scale: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "bounds", tuple(tuple(b) for b in self.bounds))
        if not self.bounds:
            raise ConfigError("search space must have at least one dimension")
        for lo, hi in self.bounds:
            if not lo < hi:
                raise ConfigError("each lower bound must be below its upper bound")
        if not self.log_scale:
            object.__setattr__(self, "log_scale", (False,) * len(self.bounds))
        else:
            object.__setattr__(self, "log_scale", tuple(self.log_scale))
            if len(self.log_scale) != len(self.bounds):
                raise ConfigError("log_scale length must match bounds")
        for (lo, _), lg in zip(self.bounds, self.log_scale):
            if lg and lo <= 0:
                raise ConfigError("log-scaled dimensions need positive bounds")

    @property
    def dims(self) -> int:
        return len(self.bounds)


@dataclass(frozen=True)
class PsoParams:
    swarm_size: int = 30
    iterations: int = 50
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.swarm_size < 2:
            raise ConfigError("swarm size must be >= 2")
        if self.iterations < 1:
            raise ConfigError("iteration count must be >= 1")


def apply_gain_vector(config: EstimatorConfig, gains: Sequence[float]
                      ) -> EstimatorConfig:
    """Map a flat gain vector onto a config.

    Length 2n+2 sets (gamma_c[1..n], gamma_s[1..n], gamma_dc, gamma_dc1);
    length 2n+3 additionally sets eta_opt as the last element.
    """
    g = [float(v) for v in gains]
    n = config.n
    if len(g) not in (2 * n + 2, 2 * n + 3):
        raise ConfigError(
            f"gain vector length {len(g)} does not match 2n+2 or 2n+3 for n={n}"
        )
    cfg = replace(config,
                  gamma_c=tuple(g[:n]),
                  gamma_s=tuple(g[n:2 * n]),
                  gamma_dc=g[2 * n],
                  gamma_dc1=g[2 * n + 1])
    if len(g) == 2 * n + 3:
        cfg = replace(cfg, eta_opt=g[2 * n + 2])
    return cfg


def ise_fitness(gains: Sequence[float],
                scenarios: Sequence[tuple[SampleStream, GroundTruth]],
                config: EstimatorConfig,
                apply: Callable[[EstimatorConfig, Sequence[float]],
                                EstimatorConfig] = apply_gain_vector) -> float:
    """Integral square frequency error over the battery; lower is better.

    Each scenario contributes sum_k (f_hat_k - f_k)^2 * dt at the report
    cadence; a diverged run adds a large constant penalty instead.
    """
    if not scenarios:
        raise ConfigError("scenario battery must not be empty")
    try:
        cfg = apply(config, gains)
        cfg.validate()
    except ConfigError:
        return DIVERGENCE_PENALTY
    score = 0.0
    for stream, truth in scenarios:
        series = run(stream, cfg)
        if series.diverged_at is not None or len(series) == 0:
            score += DIVERGENCE_PENALTY
            continue
        t = series.t()
        f_true = np.interp(t, truth.times(), truth.freq_hz)
        dt = cfg.ts * cfg.report_every
        score += float(np.sum((series.f_hz() - f_true) ** 2) * dt)
    return score


@dataclass
class TuneResult:
    best_position: np.ndarray
    best_score: float
    history: list[float] = field(default_factory=list)   # best score per iteration


def pso_minimize(fn: Callable[[np.ndarray], float], space: SearchSpace,
                 pso: PsoParams) -> TuneResult:
    """Standard global-best PSO over a box; deterministic under pso.seed."""
    rng = np.random.default_rng(pso.seed)
    d = space.dims
    lo = np.array([b[0] for b in space.bounds])
    hi = np.array([b[1] for b in space.bounds])
    lg = np.array(space.log_scale)
    # work in log space for log-scaled dimensions
    wlo = np.where(lg, np.log(np.where(lg, lo, 1.0)), lo)
    whi = np.where(lg, np.log(np.where(lg, hi, 1.0)), hi)
    span = whi - wlo

    def decode(w: np.ndarray) -> np.ndarray:
        return np.where(lg, np.exp(w), w)

    pos = wlo + rng.random((pso.swarm_size, d)) * span
    vel = (rng.random((pso.swarm_size, d)) - 0.5) * span
    vmax = span  # velocity clamped to the box extent

    pbest = pos.copy()
    pbest_score = np.array([fn(decode(p)) for p in pos])
    gbest_idx = int(np.argmin(pbest_score))
    gbest = pbest[gbest_idx].copy()
    gbest_score = float(pbest_score[gbest_idx])

    history = []
    for _ in range(pso.iterations):
        r1 = rng.random((pso.swarm_size, d))
        r2 = rng.random((pso.swarm_size, d))
        vel = (pso.inertia * vel
               + pso.cognitive * r1 * (pbest - pos)
               + pso.social * r2 * (gbest - pos))
        vel = np.clip(vel, -vmax, vmax)
        pos = np.clip(pos + vel, wlo, whi)
        for i in range(pso.swarm_size):
            s = fn(decode(pos[i]))
            if s < pbest_score[i]:
                pbest_score[i] = s
                pbest[i] = pos[i]
                if s < gbest_score:
                    gbest_score = float(s)
                    gbest = pos[i].copy()
        history.append(gbest_score)
    return TuneResult(best_position=decode(gbest), best_score=gbest_score,
                      history=history)


def pso_tune(space: SearchSpace,
             scenarios: Sequence[tuple[SampleStream, GroundTruth]],
             pso: PsoParams, config: EstimatorConfig,
             apply: Callable[[EstimatorConfig, Sequence[float]],
                             EstimatorConfig] = apply_gain_vector
             ) -> tuple[np.ndarray, float, list[float]]:
    """Tune a gain vector against the scenario battery.

    Returns (best gain vector, best score, per-iteration best-score history).
    """
    result = pso_minimize(lambda x: ise_fitness(x, scenarios, config, apply),
                          space, pso)
    return result.best_position, result.best_score, result.history
