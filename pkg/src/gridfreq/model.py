"""Harmonic-plus-DC signal model shared by the synthesizer and the estimator.

The model of a single-channel waveform is

    a(t) = sum_i  a_c[i] * sin(i*w1*t) + a_s[i] * cos(i*w1*t)
         + a_dc - a_dc1 * t

i.e. a truncated harmonic series around a fundamental w1 plus a first-order
(Taylor) approximation of a decaying DC offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class ParameterVector:
    """Coefficients of the harmonic-plus-DC model.

    ``a_c[i-1]`` multiplies sin(i*w1*t), ``a_s[i-1]`` multiplies cos(i*w1*t).
    ``a_dc`` is the constant offset in pu and ``a_dc1`` its decay slope in pu/s.
    """

    a_c: list[float]
    a_s: list[float]
    a_dc: float = 0.0
    a_dc1: float = 0.0

    def __post_init__(self) -> None:
        if len(self.a_c) != len(self.a_s):
            raise ValueError("a_c and a_s must have the same length")

    @classmethod
    def zeros(cls, n: int) -> "ParameterVector":
        return cls([0.0] * n, [0.0] * n, 0.0, 0.0)

    @property
    def n(self) -> int:
        return len(self.a_c)

    def copy(self) -> "ParameterVector":
        return ParameterVector(list(self.a_c), list(self.a_s), self.a_dc, self.a_dc1)

    def is_finite(self) -> bool:
        vals = [*self.a_c, *self.a_s, self.a_dc, self.a_dc1]
        return all(math.isfinite(v) for v in vals)


def harmonic_basis(phase: float, n: int) -> tuple[list[float], list[float]]:
    """cos(i*phase), sin(i*phase) for i = 1..n via the angle-sum recurrence."""
    c1 = math.cos(phase)
    s1 = math.sin(phase)
    cos_i = [c1]
    sin_i = [s1]
    for _ in range(1, n):
        c_prev = cos_i[-1]
        s_prev = sin_i[-1]
        cos_i.append(c_prev * c1 - s_prev * s1)
        sin_i.append(s_prev * c1 + c_prev * s1)
    return cos_i, sin_i


def eval_model(theta: ParameterVector, omega1: float, t: float) -> float:
    """Model output at time ``t`` for fundamental ``omega1`` (rad/s)."""
    cos_i, sin_i = harmonic_basis(omega1 * t, theta.n)
    acc = theta.a_dc - theta.a_dc1 * t
    for i in range(theta.n):
        acc += theta.a_c[i] * sin_i[i] + theta.a_s[i] * cos_i[i]
    return acc


def freq_gradient(theta: ParameterVector, omega1: float, t: float) -> float:
    """d(model)/d(omega1) at time ``t``.

    Each harmonic term contributes i*t*(a_c*cos(i*w1*t) - a_s*sin(i*w1*t));
    the DC terms do not depend on the fundamental.
    """
    cos_i, sin_i = harmonic_basis(omega1 * t, theta.n)
    g = 0.0
    for i in range(theta.n):
        g += (i + 1) * t * (theta.a_c[i] * cos_i[i] - theta.a_s[i] * sin_i[i])
    return g
