"""Property-based tests (hypothesis) for the algebraic building blocks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridfreq import (EventProfile, FreqSeries, SampleStream, amp_phase,
                      rolling_rocof)
from gridfreq import io as gio
from gridfreq.model import ParameterVector, eval_model, harmonic_basis

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False,
                   allow_infinity=False)


@given(a_s=finite, a_c=finite, x=st.floats(-10.0, 10.0))
def test_amp_phase_reconstructs_the_pair(a_s, a_c, x):
    amp, ph = amp_phase(a_s, a_c)
    expect = a_c * math.sin(x) + a_s * math.cos(x)
    scale = max(abs(a_s), abs(a_c), 1.0)
    assert amp * math.sin(x + ph) == pytest.approx(expect, abs=1e-9 * scale)
    assert amp >= 0.0


@given(phase=st.floats(-100.0, 100.0), n=st.integers(1, 8))
def test_harmonic_basis_matches_direct_trig(phase, n):
    cos_i, sin_i = harmonic_basis(phase, n)
    for i in range(n):
        assert cos_i[i] == pytest.approx(math.cos((i + 1) * phase), abs=1e-10)
        assert sin_i[i] == pytest.approx(math.sin((i + 1) * phase), abs=1e-10)


@given(data=st.data(), n=st.integers(1, 5),
       omega=st.floats(10.0, 500.0), t=st.floats(0.0, 1.0))
def test_eval_model_is_linear_in_the_coefficients(data, n, omega, t):
    coeffs = st.lists(finite, min_size=n, max_size=n)
    th1 = ParameterVector(data.draw(coeffs), data.draw(coeffs),
                          data.draw(finite), data.draw(finite))
    th2 = ParameterVector(data.draw(coeffs), data.draw(coeffs),
                          data.draw(finite), data.draw(finite))
    th_sum = ParameterVector([a + b for a, b in zip(th1.a_c, th2.a_c)],
                             [a + b for a, b in zip(th1.a_s, th2.a_s)],
                             th1.a_dc + th2.a_dc, th1.a_dc1 + th2.a_dc1)
    lhs = eval_model(th_sum, omega, t)
    rhs = eval_model(th1, omega, t) + eval_model(th2, omega, t)
    assert lhs == pytest.approx(rhs, abs=1e-8)


@given(slope=st.floats(-5.0, 5.0), intercept=st.floats(40.0, 60.0),
       lag=st.integers(1, 50))
def test_rolling_rocof_is_exact_on_affine_series(slope, intercept, lag):
    ts = 1.0 / 1200.0
    t = np.arange(100) * ts
    series = FreqSeries(0.0, ts, intercept + slope * t)
    out = rolling_rocof(series, lag * ts)
    np.testing.assert_allclose(out.values, slope, atol=1e-6)
    assert len(out) == 100 - lag


@given(peak_dev=st.floats(0.05, 2.0).filter(lambda v: abs(v) > 1e-3),
       peak_rocof=st.floats(0.1, 5.0), t=st.floats(0.0, 10.0))
def test_event_profile_respects_its_peaks(peak_dev, peak_rocof, t):
    ev = EventProfile(t_start=1.0, peak_dev_hz=peak_dev,
                      peak_rocof_hzps=peak_rocof)
    ta = np.array([t])
    dev = abs(float(ev.freq(ta, 50.0)[0]) - 50.0)
    assert dev <= abs(peak_dev) * (1.0 + 1e-9)
    assert abs(float(ev.rocof(ta, 50.0)[0])) <= peak_rocof * (1.0 + 1e-9)


@settings(max_examples=25, deadline=None)
@given(values=st.lists(st.floats(min_value=-1e6, max_value=1e6,
                                 allow_nan=False, allow_infinity=False,
                                 width=64),
                       min_size=2, max_size=40))
def test_sample_csv_round_trip_is_bitwise(values, tmp_path_factory):
    stream = SampleStream(0.0, 1.0 / 1200.0, np.array(values))
    path = tmp_path_factory.mktemp("io") / "s.csv"
    gio.write_samples(path, stream)
    back = gio.read_samples(path)
    np.testing.assert_array_equal(back.values, stream.values)
