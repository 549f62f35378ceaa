"""BER-surrogate metrics of a detection window.

All metrics are computed for the strongest ISI pattern (all past bits 1).
For an absorbing receiver the per-tap signal fraction is F_ab at the
k-shifted window and the noise amplitude is sqrt(Q F (1-F)); for a passive
receiver the fraction is the sample-summed observation rate and the noise
amplitude is the Poisson sqrt(Q * rate).

``q_hat`` is the molecule count at which mSINAR reaches 1; it separates the
low-count regime (noise-aware window) from the high-count regime where the
inflation factor ``g_factor`` is applied instead.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    DetectionWindow,
    Receiver,
    SystemParams,
    absorbed_fraction,
    sample_probability,
    window_taps,
)
from .errors import GFactorPole, InfiniteSinar, InfiniteSir, NoFiniteQhat

__all__ = [
    "Metric",
    "MetricReport",
    "sir",
    "sid",
    "sinar",
    "msinar",
    "msid",
    "q_hat",
    "alphas",
    "g_factor",
    "metric_report",
    "metric_values_from_taps",
]


class Metric(enum.Enum):
    SIR = "sir"
    SID = "sid"
    SINAR = "sinar"
    MSINAR = "msinar"
    MSID = "msid"


@dataclass(frozen=True)
class MetricReport:
    sir: float
    sid: float
    sinar: float
    msinar: float
    msid: float
    q_hat: int | None
    g_factor: float
    alpha1: float
    alpha2: float


def _require_isi(params: SystemParams) -> None:
    if params.L < 1:
        raise ValueError("metrics need at least one ISI tap (L >= 1)")


def _require_q(params: SystemParams) -> None:
    if params.Q < 1:
        raise ValueError("noise-aware metrics need Q >= 1")


def _components(params: SystemParams, window: DetectionWindow):
    """(signal fraction, interference fraction sum, noise amplitude sum)."""
    taps = window_taps(params, window)
    f0 = float(taps.mean[0])
    interference = float(np.sum(taps.mean[1:]))
    noise_amp = float(np.sum(np.sqrt(taps.var)))
    return f0, interference, noise_amp


def sir(params: SystemParams, window: DetectionWindow) -> float:
    """Signal-to-interference ratio; independent of Q."""
    _require_isi(params)
    f0, interference, _ = _components(params, window)
    if interference == 0.0:
        raise InfiniteSir("all interference fractions are zero")
    return f0 / interference


def sid(params: SystemParams, window: DetectionWindow) -> float:
    """Signal-to-interference difference in molecules; linear in Q."""
    _require_isi(params)
    f0, interference, _ = _components(params, window)
    return params.Q * (f0 - interference)


def sinar(params: SystemParams, window: DetectionWindow) -> float:
    """Signal over interference-plus-noise amplitude."""
    _require_isi(params)
    _require_q(params)
    q = float(params.Q)
    f0, interference, noise_amp = _components(params, window)
    denom = q * interference + math.sqrt(q) * noise_amp
    if denom == 0.0:
        raise InfiniteSinar("zero interference and noise amplitude")
    return q * f0 / denom


def msinar(params: SystemParams, window: DetectionWindow) -> float:
    """Modified SINAR: equal-prior weighting, sqrt(2/Q)-inflated noise."""
    _require_isi(params)
    _require_q(params)
    q = float(params.Q)
    f0, interference, noise_amp = _components(params, window)
    denom = 0.5 * interference + noise_amp / math.sqrt(2.0 * q)
    if denom == 0.0:
        raise InfiniteSinar("zero interference and noise amplitude")
    return 0.5 * f0 / denom


def msid(params: SystemParams, window: DetectionWindow) -> float:
    """Modified SID: signal minus interference minus sqrt(2/Q) noise amplitude."""
    _require_isi(params)
    _require_q(params)
    q = float(params.Q)
    f0, interference, noise_amp = _components(params, window)
    return f0 - interference - math.sqrt(2.0 / q) * noise_amp


def q_hat(params: SystemParams, window: DetectionWindow) -> int:
    """Molecule count at which mSINAR at ``window`` reaches 1 (ceiling-valued)."""
    _require_isi(params)
    f0, interference, noise_amp = _components(params, window)
    margin = f0 - interference
    if margin <= 0.0:
        raise NoFiniteQhat(
            "window has no signal-over-interference margin; mSINAR cannot reach 1"
        )
    return int(math.ceil(2.0 * (noise_amp / margin) ** 2))


def alphas(params: SystemParams) -> tuple[float, float]:
    """Worst-case noise-to-signal amplitude ratios of the signal and first ISI tap.

    Absorbing: sqrt((1-F)/F) with F the whole-symbol absorbed fraction for
    the current (alpha1) and previous (alpha2) symbol.  Passive: the
    reciprocal root of the whole-symbol observation-rate sums.
    """
    if params.receiver is Receiver.ABSORBING:
        f_now = absorbed_fraction(params, 0.0, params.T_s)
        f_prev = absorbed_fraction(params, params.T_s, 2.0 * params.T_s)
        a1 = math.sqrt((1.0 - f_now) / f_now)
        a2 = math.sqrt((1.0 - f_prev) / f_prev)
    else:
        assert params.N is not None
        ns = np.arange(0, params.N + 1)
        rate0 = float(np.sum([sample_probability(params, int(n), 0) for n in ns]))
        rate1 = float(np.sum([sample_probability(params, int(n), 1) for n in ns]))
        a1 = 1.0 / math.sqrt(rate0)
        a2 = 1.0 / math.sqrt(rate1)
    return a1, a2


def g_factor(params: SystemParams, q: float) -> float:
    """Noise-inflation factor (sqrt(Q) + sqrt(2) a2) / (sqrt(Q) - sqrt(2) a1).

    Decreasing in Q with limit 1; poles at Q <= 2 a1^2.
    """
    a1, a2 = alphas(params)
    if q <= 2.0 * a1**2:
        raise GFactorPole(f"Q={q} is at or below the pole 2*alpha1^2={2.0 * a1 ** 2:.6g}")
    root = math.sqrt(q)
    return (root + math.sqrt(2.0) * a2) / (root - math.sqrt(2.0) * a1)


def metric_report(params: SystemParams, window: DetectionWindow) -> MetricReport:
    """All metrics plus regime quantities at one window.

    ``q_hat`` is None when mSINAR cannot reach 1; ``g_factor`` is NaN at or
    below its pole.
    """
    a1, a2 = alphas(params)
    try:
        qh: int | None = q_hat(params, window)
    except NoFiniteQhat:
        qh = None
    try:
        g = g_factor(params, float(params.Q))
    except GFactorPole:
        g = math.nan
    try:
        sir_value = sir(params, window)
    except InfiniteSir:
        sir_value = math.inf
    return MetricReport(
        sir=sir_value,
        sid=sid(params, window),
        sinar=sinar(params, window),
        msinar=msinar(params, window),
        msid=msid(params, window),
        q_hat=qh,
        g_factor=g,
        alpha1=a1,
        alpha2=a2,
    )


def metric_values_from_taps(
    metric: Metric, q: float, mean: np.ndarray, var: np.ndarray
) -> np.ndarray:
    """Vectorized metric over many windows.

    ``mean`` and ``var`` are (L+1, n_windows) per-tap fraction arrays
    (tap 0 = signal).  Windows where the metric is undefined (0/0) come back
    as NaN; unbounded ratios as +inf.
    """
    f0 = mean[0]
    interference = mean[1:].sum(axis=0)
    noise_amp = np.sqrt(var).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        if metric is Metric.SIR:
            return f0 / interference
        if metric is Metric.SID:
            return q * (f0 - interference)
        if metric is Metric.SINAR:
            return q * f0 / (q * interference + math.sqrt(q) * noise_amp)
        if metric is Metric.MSINAR:
            return 0.5 * f0 / (0.5 * interference + noise_amp / math.sqrt(2.0 * q))
        if metric is Metric.MSID:
            return f0 - interference - math.sqrt(2.0 / q) * noise_amp
    raise ValueError(f"unknown metric {metric!r}")
