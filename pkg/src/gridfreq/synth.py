"""Test-waveform synthesis with exact ground truth.

Generates single-channel sampled waveforms built from a fundamental with a
configurable frequency profile, harmonic content, amplitude/phase step
windows, decaying DC offsets, an optional soft-saturation distortion stage
and additive noise.  The fundamental phase is obtained by analytically
integrating the frequency profile, so ramps and dips are physically
consistent and the recorded ground truth (frequency, RoCoF, amplitude,
phase) is exact rather than finite-differenced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ScenarioError

TWO_PI = 2.0 * math.pi


# --------------------------------------------------------------------------
# Streams and truth
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleStream:
    """Uniformly sampled waveform: sample k is at time t0 + k*ts."""

    t0: float
    ts: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.ts <= 0:
            raise ScenarioError("sampling interval must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise ScenarioError("stream must contain at least one sample")

    def times(self) -> np.ndarray:
        return self.t0 + self.ts * np.arange(self.values.size)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class GroundTruth:
    """Per-sample true fundamental parameters paired with a SampleStream."""

    t0: float
    ts: float
    freq_hz: np.ndarray
    rocof_hzps: np.ndarray
    amp_pu: np.ndarray
    phase_rad: np.ndarray
    dc_amp: float = 0.0
    dc_tau: float = 1.0

    def __post_init__(self) -> None:
        for name in ("freq_hz", "rocof_hzps", "amp_pu", "phase_rad"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        n = self.freq_hz.size
        if any(getattr(self, f).size != n for f in ("rocof_hzps", "amp_pu", "phase_rad")):
            raise ScenarioError("ground-truth sequences must have equal length")
        if self.dc_amp != 0.0 and self.dc_tau <= 0:
            raise ScenarioError("dc_tau must be positive when dc_amp is nonzero")

    def times(self) -> np.ndarray:
        return self.t0 + self.ts * np.arange(self.freq_hz.size)

    def __len__(self) -> int:
        return self.freq_hz.size


@dataclass(frozen=True)
class PhasorFrame:
    """One reported phasor: amplitude, frequency, RoCoF and absolute phase."""

    t: float
    amp_pu: float
    freq_hz: float
    rocof_hzps: float
    phase_rad: float

    def __post_init__(self) -> None:
        if self.amp_pu < 0:
            raise ScenarioError("phasor amplitude must be non-negative")


# --------------------------------------------------------------------------
# Frequency profiles
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantProfile:
    """f(t) = base frequency for all t."""

    def freq(self, t: np.ndarray, f0: float) -> np.ndarray:
        return np.full_like(t, f0)

    def rocof(self, t: np.ndarray, f0: float) -> np.ndarray:
        return np.zeros_like(t)

    def freq_integral(self, t: np.ndarray, f0: float) -> np.ndarray:
        return f0 * t


@dataclass(frozen=True)
class RampProfile:
    """Linear excursion of ``df_hz`` over [t_start, t_start + duration].

    Frequency holds at f0 before the ramp and at f0 + df_hz after it.
    """

    t_start: float
    duration: float
    df_hz: float

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ScenarioError("ramp duration must be positive")

    @property
    def slope(self) -> float:
        return self.df_hz / self.duration

    def freq(self, t: np.ndarray, f0: float) -> np.ndarray:
        u = np.clip(t - self.t_start, 0.0, self.duration)
        return f0 + self.slope * u

    def rocof(self, t: np.ndarray, f0: float) -> np.ndarray:
        inside = (t >= self.t_start) & (t < self.t_start + self.duration)
        return np.where(inside, self.slope, 0.0)

    def freq_integral(self, t: np.ndarray, f0: float) -> np.ndarray:
        u = np.clip(t - self.t_start, 0.0, self.duration)
        return f0 * t + 0.5 * self.slope * u * u + self.df_hz * np.clip(
            t - self.t_start - self.duration, 0.0, None
        )


@dataclass(frozen=True)
class EventProfile:
    """Raised-cosine frequency excursion with exact peak deviation and RoCoF.

    f(t) = f0 - (D/2) * (1 - cos(2*pi*u/T)) for u = t - t_start in [0, T],
    with T = pi * |D| / R so that max |df/dt| equals ``peak_rocof_hzps`` and
    the peak deviation equals ``peak_dev_hz`` (negative deviation dips below
    nominal, positive swells above it).
    """

    t_start: float
    peak_dev_hz: float
    peak_rocof_hzps: float

    def __post_init__(self) -> None:
        if self.peak_rocof_hzps <= 0:
            raise ScenarioError("peak RoCoF must be positive")
        if self.peak_dev_hz == 0:
            raise ScenarioError("peak deviation must be nonzero")

    @property
    def duration(self) -> float:
        return math.pi * abs(self.peak_dev_hz) / self.peak_rocof_hzps

    def _window(self, t: np.ndarray) -> tuple[np.ndarray, float]:
        T = self.duration
        return np.clip(t - self.t_start, 0.0, T), T

    def freq(self, t: np.ndarray, f0: float) -> np.ndarray:
        u, T = self._window(t)
        return f0 - 0.5 * self.peak_dev_hz * (1.0 - np.cos(TWO_PI * u / T))

    def rocof(self, t: np.ndarray, f0: float) -> np.ndarray:
        u, T = self._window(t)
        inside = (t >= self.t_start) & (t < self.t_start + T)
        r = -0.5 * self.peak_dev_hz * (TWO_PI / T) * np.sin(TWO_PI * u / T)
        return np.where(inside, r, 0.0)

    def freq_integral(self, t: np.ndarray, f0: float) -> np.ndarray:
        u, T = self._window(t)
        return f0 * t - 0.5 * self.peak_dev_hz * (u - (T / TWO_PI) * np.sin(TWO_PI * u / T))


FreqProfile = ConstantProfile | RampProfile | EventProfile


# --------------------------------------------------------------------------
# Scenario specification
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class HarmonicSpec:
    """One harmonic: order >= 2, amplitude relative to the fundamental."""

    order: int
    rel_amp: float
    phase_rad: float = 0.0

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ScenarioError("harmonic order must be >= 2")
        if self.rel_amp < 0:
            raise ScenarioError("harmonic amplitude must be non-negative")


@dataclass(frozen=True)
class StepSpec:
    """Amplitude/phase step applied to the fundamental inside a window."""

    t_start: float
    duration: float
    amp_step_pu: float = 0.0
    phase_step_rad: float = 0.0


@dataclass(frozen=True)
class DcSpec:
    """Decaying DC offset a_dc * exp(-(t - t_start)/tau) for t >= t_start."""

    t_start: float
    a_dc_pu: float
    tau_s: float

    def __post_init__(self) -> None:
        if self.tau_s <= 0:
            raise ScenarioError("DC time constant must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise: gaussian, colored (AR(1)) or impulsive outliers.

    ``level`` is the noise standard deviation as a fraction of the
    fundamental amplitude.
    """

    kind: str = "gaussian"
    level: float = 0.0
    seed: int = 0
    pole: float = 0.9
    impulse_rate: float = 1e-3
    impulse_mag: float = 10.0

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "colored", "impulsive"):
            raise ScenarioError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.level <= 0.2:
            raise ScenarioError("noise level must lie in [0, 0.2]")
        if not 0.0 < self.pole < 1.0:
            raise ScenarioError("color pole must lie in (0, 1)")


@dataclass(frozen=True)
class ScenarioSpec:
    duration: float
    base_freq: float
    amp_pu: float = 1.0
    phase0_rad: float = 0.0
    profile: FreqProfile = field(default_factory=ConstantProfile)
    harmonics: tuple[HarmonicSpec, ...] = ()
    noise: NoiseSpec | None = None
    steps: tuple[StepSpec, ...] = ()
    dc_events: tuple[DcSpec, ...] = ()
    distortion_knee: float | None = None

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ScenarioError("scenario duration must be positive")
        if self.base_freq <= 0:
            raise ScenarioError("base frequency must be positive")
        object.__setattr__(self, "harmonics", tuple(self.harmonics))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "dc_events", tuple(self.dc_events))
        for s in self.steps:
            if s.t_start < 0 or s.t_start + s.duration > self.duration:
                raise ScenarioError("step window must lie within [0, duration]")
        if self.distortion_knee is not None and self.distortion_knee <= 0:
            raise ScenarioError("distortion knee must be positive")

    @property
    def max_order(self) -> int:
        return max((h.order for h in self.harmonics), default=1)


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------

def synthesize(spec: ScenarioSpec, fs: float, seed: int | None = None
               ) -> tuple[SampleStream, GroundTruth]:
    """Render a scenario at sampling rate ``fs`` and return stream + truth.

    The fundamental phase is 2*pi * integral of the frequency profile, so
    time-varying profiles produce physically consistent waveforms.  ``seed``
    overrides the seed of the scenario's noise block when given.
    """
    if fs <= 0:
        raise ScenarioError("sampling rate must be positive")
    if spec.duration * fs < 2:
        raise ScenarioError("scenario too short for the requested sampling rate")
    f_peak = spec.base_freq + max(abs(_peak_freq_excursion(spec.profile)), 0.0)
    if spec.max_order * f_peak >= fs / 2:
        raise ScenarioError(
            f"harmonic order {spec.max_order} at {f_peak:g} Hz violates Nyquist for fs={fs:g}"
        )

    n_samples = int(round(spec.duration * fs)) + 1
    t = np.arange(n_samples) / fs

    f1 = spec.profile.freq(t, spec.base_freq)
    rocof = spec.profile.rocof(t, spec.base_freq)
    phi1 = TWO_PI * spec.profile.freq_integral(t, spec.base_freq) + spec.phase0_rad

    amp = np.full(n_samples, spec.amp_pu)
    phase = phi1.copy()
    for s in spec.steps:
        win = (t >= s.t_start) & (t < s.t_start + s.duration)
        amp[win] *= 1.0 + s.amp_step_pu
        phase[win] += s.phase_step_rad

    values = amp * np.sin(phase)
    for h in spec.harmonics:
        values += spec.amp_pu * h.rel_amp * np.sin(h.order * phi1 + h.phase_rad)
    for dc in spec.dc_events:
        active = t >= dc.t_start
        values = values + np.where(active, dc.a_dc_pu * np.exp(-(t - dc.t_start) / dc.tau_s), 0.0)

    if spec.distortion_knee is not None:
        k = spec.distortion_knee
        values = k * np.tanh(values / k)

    stream = SampleStream(t0=0.0, ts=1.0 / fs, values=values)
    if spec.noise is not None and spec.noise.level > 0:
        eff_seed = spec.noise.seed if seed is None else seed
        stream = add_noise(stream, spec.noise.kind, spec.noise.level, eff_seed,
                           pole=spec.noise.pole,
                           impulse_rate=spec.noise.impulse_rate,
                           impulse_mag=spec.noise.impulse_mag,
                           amp_ref=spec.amp_pu)

    dc_amp = spec.dc_events[0].a_dc_pu if spec.dc_events else 0.0
    dc_tau = spec.dc_events[0].tau_s if spec.dc_events else 1.0
    truth = GroundTruth(t0=0.0, ts=1.0 / fs, freq_hz=f1, rocof_hzps=rocof,
                        amp_pu=amp, phase_rad=phase, dc_amp=dc_amp, dc_tau=dc_tau)
    return stream, truth


def _peak_freq_excursion(profile: FreqProfile) -> float:
    if isinstance(profile, RampProfile):
        return profile.df_hz
    if isinstance(profile, EventProfile):
        return max(profile.peak_dev_hz, 0.0)
    return 0.0


def add_noise(stream: SampleStream, kind: str, level: float, seed: int,
              pole: float = 0.9, impulse_rate: float = 1e-3,
              impulse_mag: float = 10.0, amp_ref: float | None = None
              ) -> SampleStream:
    """Return a copy of ``stream`` with additive noise.

    ``level`` is the target standard deviation as a fraction of the
    fundamental amplitude; when ``amp_ref`` is not given it is estimated as
    sqrt(2) * RMS of the stream (exact for a pure tone).
    """
    if level < 0:
        raise ScenarioError("noise level must be non-negative")
    if level == 0:
        return stream
    if amp_ref is None:
        amp_ref = math.sqrt(2.0) * float(np.sqrt(np.mean(stream.values ** 2)))
    sigma = level * amp_ref
    rng = np.random.default_rng(seed)
    n = len(stream)
    if kind == "gaussian":
        noise = rng.normal(0.0, sigma, n)
    elif kind == "colored":
        white = rng.normal(0.0, 1.0, n)
        y = np.empty(n)
        acc = 0.0
        for i in range(n):
            acc = pole * acc + white[i]
            y[i] = acc
        # variance-match the AR(1) output to the requested sigma
        noise = y * (sigma / math.sqrt(1.0 / (1.0 - pole * pole)))
    elif kind == "impulsive":
        hits = rng.random(n) < impulse_rate
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        noise = np.where(hits, signs * impulse_mag * sigma, 0.0)
    else:
        raise ScenarioError(f"unknown noise kind {kind!r}")
    return SampleStream(stream.t0, stream.ts, stream.values + noise)


def inject_step(stream: SampleStream, truth: GroundTruth, t_start: float,
                duration: float, amp_step: float, phase_step: float
                ) -> SampleStream:
    """Re-synthesize the fundamental inside [t_start, t_start+duration).

    Inside the window the fundamental amplitude is scaled by (1 + amp_step)
    and its phase offset by ``phase_step``; harmonics, DC and noise are left
    untouched.  The paired ground truth supplies the fundamental's
    per-sample amplitude and phase.
    """
    t = stream.times()
    t_end = t_start + duration
    if t_start < t[0] or t_end > t[-1] + stream.ts / 2:
        raise ScenarioError("step window must lie within the stream span")
    win = (t >= t_start) & (t < t_end)
    old = truth.amp_pu * np.sin(truth.phase_rad)
    new = truth.amp_pu * (1.0 + amp_step) * np.sin(truth.phase_rad + phase_step)
    values = stream.values + np.where(win, new - old, 0.0)
    return SampleStream(stream.t0, stream.ts, values)


def inject_decaying_dc(stream: SampleStream, t_start: float, a_dc: float,
                       tau: float) -> SampleStream:
    """Add a_dc * exp(-(t - t_start)/tau) for all samples at t >= t_start."""
    if tau <= 0:
        raise ScenarioError("DC time constant must be positive")
    t = stream.times()
    active = t >= t_start
    values = stream.values + np.where(active, a_dc * np.exp(-(t - t_start) / tau), 0.0)
    return SampleStream(stream.t0, stream.ts, values)


def phasor_to_waveform(frames: list[PhasorFrame], fs: float) -> SampleStream:
    """Reconstruct a sampled waveform from uniformly spaced phasor frames.

    Within each frame, sample k (counted from the frame start) is

        a(k) = amp * sin(2*pi*k*Ts*f + pi*k^2*Ts^2*rocof + phase)

    i.e. lookup-table-and-sampler semantics; frames are stitched in order.
    """
    if not frames:
        raise ScenarioError("frame sequence must not be empty")
    ts = 1.0 / fs
    if len(frames) == 1:
        k = np.arange(1)
        f = frames[0]
        vals = f.amp_pu * np.sin(TWO_PI * k * ts * f.freq_hz
                                 + math.pi * (k * ts) ** 2 * f.rocof_hzps
                                 + f.phase_rad)
        return SampleStream(f.t, ts, vals)

    spacing = frames[1].t - frames[0].t
    for a, b in zip(frames, frames[1:]):
        if abs((b.t - a.t) - spacing) > 1e-9:
            raise ScenarioError("phasor frames must be uniformly spaced")
    per_frame = fs * spacing
    m = int(round(per_frame))
    if abs(per_frame - m) > 1e-6 or m < 1:
        raise ScenarioError("sampling rate must be a multiple of the frame rate")

    k = np.arange(m)
    chunks = []
    for f in frames:
        kt = k * ts
        chunks.append(f.amp_pu * np.sin(TWO_PI * kt * f.freq_hz
                                        + math.pi * kt * kt * f.rocof_hzps
                                        + f.phase_rad))
    return SampleStream(frames[0].t, ts, np.concatenate(chunks))
