"""Reference methods: rolling-window RoCoF and truth-derivative extraction.

The rolling-window method divides the frequency change over a fixed window
by the window length.  It is exact on affine frequency profiles and
increasingly underestimates peak RoCoF as the window grows, which is the
classical weakness the adaptive observer addresses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, ScenarioError
from .synth import GroundTruth


@dataclass(frozen=True)
class FreqSeries:
    """Uniformly sampled scalar series (frequency in Hz or RoCoF in Hz/s)."""

    t0: float
    ts: float
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.ts <= 0:
            raise ScenarioError("series interval must be positive")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.size == 0:
            raise ScenarioError("series must contain at least one sample")

    def times(self) -> np.ndarray:
        return self.t0 + self.ts * np.arange(self.values.size)

    def __len__(self) -> int:
        return self.values.size


def rolling_rocof(series: FreqSeries, window: float) -> FreqSeries:
    """RoCoF by finite difference over a trailing window.

    rocof(t) = (f(t) - f(t - window)) / window, emitted at every sample
    where the full window fits; the output is timestamped at the trailing
    edge of the window (the most recent instant).
    """
    if window <= 0:
        raise ScenarioError("window must be positive")
    lag = int(round(window / series.ts))
    if lag < 1 or lag >= len(series):
        raise AlignmentError(
            f"window {window:g} s does not fit the series ({len(series)} samples "
            f"at {series.ts:g} s)"
        )
    span = lag * series.ts
    f = series.values
    rocof = (f[lag:] - f[:-lag]) / span
    return FreqSeries(t0=series.t0 + span, ts=series.ts, values=rocof)


def truth_derivatives(truth: GroundTruth) -> tuple[FreqSeries, FreqSeries]:
    """Frequency and RoCoF series straight from synthesizer ground truth."""
    return (FreqSeries(truth.t0, truth.ts, truth.freq_hz),
            FreqSeries(truth.t0, truth.ts, truth.rocof_hzps))


def derivatives_from_phase(t0: float, ts: float, phase_rad: np.ndarray
                           ) -> tuple[FreqSeries, FreqSeries]:
    """Frequency and RoCoF from a raw phase track by centered differences.

    f = (dθ/dt) / 2π via centered differences of the phase, and RoCoF via
    centered differences of that frequency; both series lose one sample at
    each edge, so the RoCoF series starts two samples in.
    """
    phase = np.asarray(phase_rad, dtype=float)
    if phase.size < 5:
        raise ScenarioError("phase track too short for centered differences")
    freq = (phase[2:] - phase[:-2]) / (2.0 * ts) / (2.0 * np.pi)
    rocof = (freq[2:] - freq[:-2]) / (2.0 * ts)
    return (FreqSeries(t0 + ts, ts, freq), FreqSeries(t0 + 2 * ts, ts, rocof))
