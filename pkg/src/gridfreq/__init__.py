"""Streaming power-system frequency and RoCoF estimation toolkit.

An adaptive observer tracks the coefficients of a harmonic-plus-DC signal
model sample by sample and adjusts the fundamental frequency by gradient
descent on the prediction error.  The package also ships a scenario
synthesizer with exact ground truth, a rolling-window baseline, a PSO gain
tuner, latency-aligned error metrics and a batch CLI.
"""

from .baselines import FreqSeries, derivatives_from_phase, rolling_rocof, truth_derivatives
from .errors import (AlignmentError, ConfigError, DivergenceError,
                     GridFreqError, ScenarioError)
from .estimator import (EstimateRecord, EstimateSeries, EstimatorConfig,
                        EstimatorState, amp_phase, calibrate_eta_opt, init,
                        pe_gram, run, step)
from .metrics import (MetricsReport, aggregate, align, evaluate, fe_re,
                      reconstruction_error)
from .model import ParameterVector, eval_model, freq_gradient, harmonic_basis
from .synth import (ConstantProfile, DcSpec, EventProfile, GroundTruth,
                    HarmonicSpec, NoiseSpec, PhasorFrame, RampProfile,
                    SampleStream, ScenarioSpec, StepSpec, add_noise,
                    inject_decaying_dc, inject_step, phasor_to_waveform,
                    synthesize)
from .tuner import (PsoParams, SearchSpace, TuneResult, apply_gain_vector,
                    ise_fitness, pso_minimize, pso_tune)

__version__ = "1.0.0"

__all__ = [
    "AlignmentError", "ConfigError", "ConstantProfile", "DcSpec",
    "DivergenceError", "EstimateRecord", "EstimateSeries", "EstimatorConfig",
    "EstimatorState", "EventProfile", "FreqSeries", "GridFreqError",
    "GroundTruth", "HarmonicSpec", "MetricsReport", "NoiseSpec",
    "ParameterVector", "PhasorFrame", "PsoParams", "RampProfile",
    "SampleStream", "ScenarioError", "ScenarioSpec", "SearchSpace",
    "StepSpec", "TuneResult", "add_noise", "aggregate", "align", "amp_phase",
    "apply_gain_vector", "calibrate_eta_opt", "derivatives_from_phase",
    "eval_model", "evaluate", "fe_re", "freq_gradient", "harmonic_basis",
    "init", "inject_decaying_dc", "inject_step", "ise_fitness", "pe_gram",
    "phasor_to_waveform", "pso_minimize", "pso_tune", "reconstruction_error",
    "rolling_rocof", "run", "step", "synthesize", "truth_derivatives",
]
