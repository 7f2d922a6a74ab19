"""Per-sample adaptive observer for frequency and RoCoF.

The estimator tracks the coefficients of the harmonic-plus-DC signal model
(:mod:`gridfreq.model`) with gradient parameter updates driven by the
filtered observation residual, and adjusts the fundamental frequency by
steepest descent on the squared prediction error.  The learning rate of the
frequency loop is self-tuning, clamped to a narrow band around its
calibrated optimum.

All laws are strictly per-sample: one call to :func:`step` consumes one
sample and mutates the state in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError
from .model import ParameterVector, harmonic_basis
from .synth import SampleStream

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# Configuration
# --------------------------------------------------------------------------

@dataclass
class EstimatorConfig:
    """Gains and rates of the estimator.

    ``gamma_c[i-1]``/``gamma_s[i-1]`` drive the sine/cosine coefficient of
    harmonic i, ``gamma_dc``/``gamma_dc1`` the DC pair.  ``eta_opt`` is the
    calibrated frequency-loop learning rate; the self-tuned rate is clamped
    to [1-eta_band, 1+eta_band] * eta_opt.
    """

    n: int = 7
    f0: float = 50.0
    ts: float = 1.0 / 1200.0
    gamma_c: tuple[float, ...] = ()
    gamma_s: tuple[float, ...] = ()
    gamma_dc: float = 50.0
    gamma_dc1: float = 50.0
    beta_omega: float = 1.0
    eta_opt: float = 1600.0
    eta_band: float = 0.05
    obs_filter: str = "identity"          # "identity" | "lowpass"
    obs_cutoff_hz: float = 500.0
    rocof_smooth_window: int = 96
    report_every: int = 12
    anchor_policy: str = "saturate"       # "saturate" | "reset"
    t_reset_s: float = 0.25
    grad_floor: float = 1e-6

    def __post_init__(self) -> None:
        if not self.gamma_c:
            self.gamma_c = (40.0,) * self.n
        if not self.gamma_s:
            self.gamma_s = (40.0,) * self.n
        self.gamma_c = tuple(self.gamma_c)
        self.gamma_s = tuple(self.gamma_s)

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("harmonic order n must be >= 1")
        if self.f0 <= 0:
            raise ConfigError("nominal frequency must be positive")
        if self.ts <= 0:
            raise ConfigError("sampling interval must be positive")
        if self.n * self.f0 >= 0.5 / self.ts:
            raise ConfigError(
                f"harmonic order {self.n} at f0={self.f0:g} Hz violates Nyquist "
                f"for ts={self.ts:g} s"
            )
        if len(self.gamma_c) != self.n or len(self.gamma_s) != self.n:
            raise ConfigError("gain vectors must have length n")
        if any(g <= 0 for g in (*self.gamma_c, *self.gamma_s,
                                self.gamma_dc, self.gamma_dc1)):
            raise ConfigError("all gains must be positive")
        if not 0.0 < self.beta_omega < 2.0:
            raise ConfigError("beta_omega must lie in (0, 2)")
        if self.eta_opt <= 0:
            raise ConfigError("eta_opt must be positive")
        if not 0.0 <= self.eta_band <= 0.5:
            raise ConfigError("eta_band must lie in [0, 0.5]")
        if self.obs_filter not in ("identity", "lowpass"):
            raise ConfigError(f"unknown observation filter {self.obs_filter!r}")
        if self.rocof_smooth_window < 1 or self.report_every < 1:
            raise ConfigError("window and report interval must be >= 1 sample")
        if self.anchor_policy not in ("saturate", "reset"):
            raise ConfigError(f"unknown anchor policy {self.anchor_policy!r}")
        if self.t_reset_s <= 0:
            raise ConfigError("anchor cap / re-anchor period must be positive")


# --------------------------------------------------------------------------
# State and outputs
# --------------------------------------------------------------------------

@dataclass
class EstimatorState:
    theta: ParameterVector
    omega1: float                      # rad/s
    f_hz: float
    phase_acc: float = 0.0             # wrapped fundamental phase, [0, 2pi)
    k: int = 0
    t_anchor: float = 0.0              # elapsed time since last re-anchor
    eta_k: float = 0.0
    zfilt: float = 0.0                 # one-pole observation-filter state
    diverged: bool = False
    rocof_buf: list[float] = field(default_factory=list)

    def copy(self) -> "EstimatorState":
        s = EstimatorState(self.theta.copy(), self.omega1, self.f_hz,
                           self.phase_acc, self.k, self.t_anchor, self.eta_k,
                           self.zfilt, self.diverged, list(self.rocof_buf))
        return s


@dataclass
class EstimateRecord:
    t: float
    f_hz: float
    rocof_hzps: float                  # boxcar-smoothed
    rocof_raw_hzps: float              # last per-sample value, unsmoothed
    amps: list[float]
    phases: list[float]
    a_dc: float
    a_dc1: float
    residual: float
    eta: float
    phase_acc: float
    t_anchor: float


@dataclass
class EstimateSeries:
    records: list[EstimateRecord]
    n: int
    diverged_at: int | None = None     # sample index of divergence, if any

    def __len__(self) -> int:
        return len(self.records)

    def t(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def f_hz(self) -> np.ndarray:
        return np.array([r.f_hz for r in self.records])

    def rocof_hzps(self) -> np.ndarray:
        return np.array([r.rocof_hzps for r in self.records])

    def residual(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def init(config: EstimatorConfig) -> EstimatorState:
    """Fresh state at the nominal frequency with all coefficients zero."""
    config.validate()
    return EstimatorState(theta=ParameterVector.zeros(config.n),
                          omega1=TWO_PI * config.f0,
                          f_hz=config.f0,
                          eta_k=config.eta_opt)


def regressor(state: EstimatorState, config: EstimatorConfig) -> list[float]:
    """Basis vector [cos(i*phi), sin(i*phi) ... 1, -t_anchor]."""
    cos_i, sin_i = harmonic_basis(state.phase_acc, config.n)
    out: list[float] = []
    for i in range(config.n):
        out.append(cos_i[i])
        out.append(sin_i[i])
    out.append(1.0)
    out.append(-state.t_anchor)
    return out


def predict(state: EstimatorState, config: EstimatorConfig) -> float:
    """Model output at the current phase accumulator and anchor time."""
    cos_i, sin_i = harmonic_basis(state.phase_acc, config.n)
    th = state.theta
    acc = th.a_dc - th.a_dc1 * state.t_anchor
    for i in range(config.n):
        acc += th.a_c[i] * sin_i[i] + th.a_s[i] * cos_i[i]
    return acc


def adapt_eta(gradient: float, config: EstimatorConfig) -> float:
    """Self-tuned learning rate, clamped to the band around eta_opt."""
    g2 = max(gradient * gradient, config.grad_floor)
    eta_raw = config.beta_omega / (config.ts * g2)
    lo = (1.0 - config.eta_band) * config.eta_opt
    hi = (1.0 + config.eta_band) * config.eta_opt
    return min(max(eta_raw, lo), hi)


def amp_phase(a_s: float, a_c: float) -> tuple[float, float]:
    """Amplitude and full-quadrant phase of a (sin, cos) coefficient pair."""
    amp = math.hypot(a_s, a_c)
    if amp == 0.0:
        return 0.0, 0.0
    return amp, math.atan2(a_s, a_c)


def step(state: EstimatorState, sample: float, config: EstimatorConfig
         ) -> EstimateRecord | None:
    """Consume one sample; mutate the state; emit a record on report frames.

    Raises :class:`DivergenceError` when called on a diverged state.
    """
    if state.diverged:
        raise DivergenceError(f"estimator diverged at sample {state.k}")

    n = config.n
    ts = config.ts
    th = state.theta
    t = state.t_anchor
    cos_i, sin_i = harmonic_basis(state.phase_acc, n)

    # prediction and filtered residual
    ahat = th.a_dc - th.a_dc1 * t
    a_c = th.a_c
    a_s = th.a_s
    for i in range(n):
        ahat += a_c[i] * sin_i[i] + a_s[i] * cos_i[i]
    resid = sample - ahat
    if config.obs_filter == "lowpass":
        alpha = 1.0 - math.exp(-TWO_PI * config.obs_cutoff_hz * ts)
        state.zfilt += alpha * (resid - state.zfilt)
        z = state.zfilt
    else:
        z = resid

    # coefficient updates
    for i in range(n):
        a_c[i] += ts * config.gamma_c[i] * z * sin_i[i]
        a_s[i] += ts * config.gamma_s[i] * z * cos_i[i]
    th.a_dc += ts * config.gamma_dc * z
    th.a_dc1 -= t * ts * config.gamma_dc1 * z

    # frequency gradient and descent update
    g = 0.0
    for i in range(n):
        g += (i + 1) * t * (a_c[i] * cos_i[i] - a_s[i] * sin_i[i])
    eta = adapt_eta(g, config)
    state.eta_k = eta
    rocof_raw = (1.0 / TWO_PI) * eta * z * g
    state.f_hz = state.f_hz + ts * rocof_raw
    state.omega1 = TWO_PI * state.f_hz

    # divergence watchdog
    if not (math.isfinite(state.f_hz) and th.is_finite()) \
            or abs(state.f_hz - config.f0) > config.f0 / 2:
        state.diverged = True
        return None

    # advance phase, anchor and sample counter
    state.phase_acc = (state.phase_acc + state.omega1 * ts) % TWO_PI
    state.k += 1
    state.t_anchor = t + ts
    if state.t_anchor >= config.t_reset_s:
        if config.anchor_policy == "saturate":
            # hold the time multiplier at the cap so the frequency-loop
            # authority stays uniform instead of collapsing periodically
            state.t_anchor = config.t_reset_s
        else:
            # move the time origin; fold the accumulated slope contribution
            # into the constant term so the model output is continuous
            th.a_dc -= th.a_dc1 * state.t_anchor
            state.t_anchor = 0.0

    buf = state.rocof_buf
    buf.append(rocof_raw)
    if len(buf) > config.rocof_smooth_window:
        del buf[0]

    if state.k % config.report_every != 0:
        return None
    amps: list[float] = []
    phases: list[float] = []
    for i in range(n):
        a, p = amp_phase(a_s[i], a_c[i])
        amps.append(a)
        phases.append(p)
    return EstimateRecord(
        t=state.k * ts,
        f_hz=state.f_hz,
        rocof_hzps=sum(buf) / len(buf),
        rocof_raw_hzps=rocof_raw,
        amps=amps,
        phases=phases,
        a_dc=th.a_dc,
        a_dc1=th.a_dc1,
        residual=z,
        eta=eta,
        phase_acc=state.phase_acc,
        t_anchor=state.t_anchor,
    )


def run(stream: SampleStream, config: EstimatorConfig) -> EstimateSeries:
    """Fold :func:`step` over a stream; report divergence if it occurs."""
    config.validate()
    if abs(stream.ts - config.ts) > 1e-9 * config.ts:
        raise ConfigError(
            f"stream interval {stream.ts:g} does not match config ts {config.ts:g}"
        )
    state = init(config)
    records: list[EstimateRecord] = []
    diverged_at: int | None = None
    for sample in stream.values:
        rec = step(state, float(sample), config)
        if rec is not None:
            records.append(rec)
        if state.diverged:
            diverged_at = state.k
            break
    return EstimateSeries(records=records, n=config.n, diverged_at=diverged_at)


# --------------------------------------------------------------------------
# Persistence of excitation
# --------------------------------------------------------------------------

def pe_gram(omega1: float, n: int, fs: float, normalized: bool = True
            ) -> tuple[np.ndarray, float, float]:
    """Gram matrix of the sinusoidal regressor over one fundamental period.

    Integrates S*S^T (sinusoidal entries only, interleaved cos/sin per
    harmonic) over tau = 2*pi/omega1 by the rectangle rule at rate ``fs``.
    With ``normalized`` the integral is divided by the period length, so the
    diagonal of an orthogonal basis is 1/2; without it the diagonal is
    pi/omega1.  Returns (matrix, smallest eigenvalue, largest eigenvalue).
    """
    if omega1 <= 0:
        raise ConfigError("omega1 must be positive")
    if fs <= 2.0 * n * omega1 / TWO_PI:
        raise ConfigError("sampling rate violates Nyquist for the requested order")
    tau = TWO_PI / omega1
    m = int(round(fs * tau))
    t = np.arange(m) / fs
    rows = []
    for i in range(1, n + 1):
        rows.append(np.cos(i * omega1 * t))
        rows.append(np.sin(i * omega1 * t))
    S = np.vstack(rows)
    gram = (S @ S.T) / m
    if not normalized:
        gram = gram * tau
    eig = np.linalg.eigvalsh(gram)
    return gram, float(eig[0]), float(eig[-1])


# --------------------------------------------------------------------------
# Learning-rate calibration
# --------------------------------------------------------------------------

def calibrate_eta_opt(stream: SampleStream, config: EstimatorConfig,
                      skip_s: float = 0.5) -> float:
    """Offline eta_opt: beta / (Ts * mean-square frequency gradient).

    Runs the estimator over a calibration stream with the configured
    eta_opt, collects the squared frequency gradient after the initial
    transient and evaluates the stability-bound expression at its mean.
    """
    config.validate()
    state = init(config)
    g2_sum = 0.0
    count = 0
    skip = int(round(skip_s / config.ts))
    for sample in stream.values:
        cos_i, sin_i = harmonic_basis(state.phase_acc, config.n)
        t = state.t_anchor
        g = 0.0
        for i in range(config.n):
            g += (i + 1) * t * (state.theta.a_c[i] * cos_i[i]
                                - state.theta.a_s[i] * sin_i[i])
        step(state, float(sample), config)
        if state.diverged:
            break
        if state.k > skip:
            g2_sum += g * g
            count += 1
    if count == 0:
        raise ConfigError("calibration stream too short")
    return config.beta_omega / (config.ts * (g2_sum / count))
