"""Detection-interval optimization.

Closed forms
------------
The low-count regime window comes from the zero crossings of
h(t) - sum_k h(k T_s + t) (signal minus strongest-ISI density).  A [1,1]
Pade approximation of the logarithms reduces the start-time equation to a
linear one:

    t1* = 28 m^2 T_s / (120 T_s - 28 T_s ln(R) - 74 m^2)

with R the ISI-to-first-tap density ratio at an anchor point (R = 1 when
L = 1).  The end time solves a cubic in t2/T_s whose discriminant selects
between a Cardano branch, a quadratic root, or the quadratic vertex; when
the first-tap ISI at T_s stays below the signal the window simply ends at
T_s.  In the high-count regime every ISI ratio is inflated by the noise
factor g(Q) evaluated at Q = g(q_hat) * q_hat.

The passive receiver follows the same structure with m -> m_hat =
(d+r)/sqrt(4D), sample-rate ratios, and ceilinged sample indices.

Closed-form outputs falling outside [0, T_s] (or [0, N]) are clamped and
flagged; an empty window after clamping raises DegenerateWindow.

Searches
--------
Numeric metric maximization and exhaustive BER minimization run on a
uniform window grid (default step T_s/400) with a deterministic tie-break:
smaller start, then larger end.  The shift-tau baseline scans full-length
windows delayed by tau in [0, t_max], counting the next symbol's leakage as
interference.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from . import metrics
from .channel import (
    ContinuousWindow,
    DetectionWindow,
    Receiver,
    SampledWindow,
    SystemParams,
    TapProfile,
    _survival,
    derived,
    full_window,
    hitting_density,
    passive_probability,
    shift_taps,
)
from .errors import DegenerateWindow, DomainError, EnumerationTooLarge, NoFiniteQhat, SymbolTooShort
from .reception import ber_floor_from_taps, threshold_from_taps

__all__ = [
    "Regime",
    "Branch",
    "Method",
    "Scheme",
    "ClosedFormIntermediates",
    "OptimizationResult",
    "prop1_interval",
    "prop2_interval",
    "prop3_interval",
    "prop4_interval",
    "closed_form_interval",
    "regime_q_hat",
    "numeric_metric_search",
    "exhaustive_ber_search",
    "shift_tau_search",
    "full_window_result",
    "select_window",
    "default_grid_step",
]

GRID_DIVISIONS = 400

# Exhaustive BER search scores O(T_s/dt)^2 windows, each with a threshold
# scan over 2^L sequences; beyond this the scan is impractical.
MAX_BER_SEARCH_L = 12


class Regime(enum.Enum):
    BELOW_QHAT = "below-qhat"
    ABOVE_QHAT = "above-qhat"


class Branch(enum.Enum):
    COND_TS = "cond-ts"
    CUBIC_NEG_DISC = "cubic-neg-disc"
    QUAD_POS_DISC = "quad-pos-disc"
    QUAD_NEG_DISC = "quad-neg-disc"


class Method(enum.Enum):
    PROP1 = "prop1"
    PROP2 = "prop2"
    PROP3 = "prop3"
    PROP4 = "prop4"
    NUMERIC_METRIC = "numeric-metric"
    EXHAUSTIVE_BER = "exhaustive-ber"
    SHIFT_TAU = "shift-tau"
    FULL_WINDOW = "full-window"


class Scheme(enum.Enum):
    """Window-selection schemes offered to sweeps and the CLI."""

    FULL_WINDOW = "full"
    SHIFT_TAU = "shift-tau"
    NUMERIC_SID = "numeric-sid"
    NUMERIC_SINAR = "numeric-sinar"
    NUMERIC_MSINAR = "numeric-msinar"
    CLOSED_FORM = "closed-form"
    EXHAUSTIVE_BER = "exhaustive-ber"


@dataclass(frozen=True)
class ClosedFormIntermediates:
    regime: Regime
    branch: Branch
    i_ratio: float | None = None
    v_ratio: float | None = None
    w_ratio: float | None = None
    a_ratio: float | None = None
    gamma: float | None = None
    delta1: float | None = None
    delta2: float | None = None
    s1: complex | None = None
    s2: complex | None = None
    t1_anchor: float | None = None
    t2_anchor: float | None = None
    n1_anchor: float | None = None
    n2_anchor: float | None = None


@dataclass(frozen=True)
class OptimizationResult:
    window: DetectionWindow
    method: Method
    intermediates: ClosedFormIntermediates | None = None
    objective_value: float | None = None
    tau: float | None = None
    clamped: bool = False
    degenerate: bool = False


def default_grid_step(params: SystemParams) -> float:
    return params.T_s / GRID_DIVISIONS


# ---------------------------------------------------------------------------
# Closed-form building blocks
# ---------------------------------------------------------------------------


def _start_time(m2: float, T_s: float, ln_ratio: float) -> float:
    denom = 120.0 * T_s - 28.0 * T_s * ln_ratio - 74.0 * m2
    if denom <= 0.0:
        raise SymbolTooShort(
            f"start-time denominator {denom:.6g} <= 0 (T_s={T_s}, m^2={m2}, "
            f"ln-ratio={ln_ratio:.6g}); the closed form is invalid"
        )
    return 28.0 * m2 * T_s / denom


def _end_cond_sum(m2: float, T_s: float, L: int) -> float:
    """ISI-to-signal density sum at t = T_s; <= 1 keeps the window end at T_s."""
    k = np.arange(1, L + 1, dtype=float)
    return float(np.sum((1.0 + k) ** -1.5 * np.exp(k / (1.0 + k) * m2 / T_s)))


def _ratio_sum_absorbing(params: SystemParams, anchor: float) -> float:
    """sum_k h(k T_s + anchor) / h(T_s + anchor) for k = 1..L."""
    k = np.arange(1, params.L + 1, dtype=float)
    values = hitting_density(params, k * params.T_s + anchor)
    return float(np.sum(values) / values[0])


def _ratio_sum_passive(params: SystemParams, n_anchor: float) -> float:
    """sum_k p_{n,k} / p_{n,1} at the (possibly fractional) anchor sample."""
    assert params.t_s is not None
    k = np.arange(1, params.L + 1, dtype=float)
    values = passive_probability(params, n_anchor * params.t_s + k * params.T_s)
    return float(np.sum(values) / values[0])


def _cbrt(z: complex) -> complex:
    """Principal cube root; sign-preserving on the real axis."""
    if z.imag == 0.0:
        return complex(math.copysign(abs(z.real) ** (1.0 / 3.0), z.real), 0.0)
    return z ** (1.0 / 3.0)


@dataclass(frozen=True)
class _EndSolution:
    fraction: float  # t2 / T_s
    branch: Branch
    gamma: float
    delta1: float
    delta2: float
    s1: complex | None
    s2: complex | None


def _solve_end_fraction(m2: float, T_s: float, ln_v: float) -> _EndSolution:
    """Branch dispatch for the window-end cubic in x = t2/T_s.

    The cubic is x^3 ln(V) + 3 x^2 ln(V) + x (2 ln(V) + m^2/T_s - 6)
    + 2 m^2/T_s = 0.  delta1 < 0 selects the Cardano form (complex
    conjugate auxiliaries; the root is twice the real part of one cube
    root); otherwise delta2 picks the quadratic root or vertex.
    """
    M = m2 / T_s
    gamma = 2.0 * ln_v + M - 6.0
    delta1 = ln_v**2 * (
        (3.0 * gamma - 18.0 * M) ** 2
        - (12.0 * gamma / ln_v - 36.0) * (gamma**2 - 18.0 * M * ln_v)
    )
    delta2 = (M - 6.0) ** 2 + 4.0 * ln_v**2 - (20.0 * M + 24.0) * ln_v
    if delta1 < 0.0:
        real = -(81.0 / ln_v + 27.0 * M / (2.0 * ln_v))
        imag = math.sqrt(9.0 * -delta1) / (2.0 * ln_v**2)
        s1 = complex(real, imag)
        s2 = complex(real, -imag)
        fraction = (-3.0 + (_cbrt(s1) + _cbrt(s2)).real) / 3.0
        return _EndSolution(fraction, Branch.CUBIC_NEG_DISC, gamma, delta1, delta2, s1, s2)
    if delta2 >= 0.0:
        fraction = (-gamma + math.sqrt(delta2)) / (6.0 * ln_v)
        return _EndSolution(fraction, Branch.QUAD_POS_DISC, gamma, delta1, delta2, None, None)
    fraction = -gamma / (6.0 * ln_v)
    return _EndSolution(fraction, Branch.QUAD_NEG_DISC, gamma, delta1, delta2, None, None)


def _clamp_continuous(t1: float, t2: float, T_s: float) -> tuple[ContinuousWindow, bool]:
    c1 = min(max(t1, 0.0), T_s)
    c2 = min(max(t2, 0.0), T_s)
    clamped = (c1 != t1) or (c2 != t2)
    if c2 <= c1:
        raise DegenerateWindow(f"window [{t1:.6g}, {t2:.6g}] is empty after clamping")
    return ContinuousWindow(c1, c2), clamped


def _clamp_sampled(n1: int, n2: int, N: int) -> tuple[SampledWindow, bool]:
    if n1 > N:
        raise DegenerateWindow(f"window start sample {n1} exceeds N={N}")
    c1 = max(n1, 0)
    c2 = min(max(n2, 0), N)
    clamped = (c1 != n1) or (c2 != n2)
    if c2 < c1:
        raise DegenerateWindow(f"sample window [{n1}, {n2}] is empty after clamping")
    return SampledWindow(c1, c2), clamped


def _msinar_objective(params: SystemParams, window: DetectionWindow, q_eff: int) -> float | None:
    if q_eff < 1 or params.L < 1:
        return None
    try:
        return metrics.msinar(replace(params, Q=int(q_eff)), window)
    except DomainError:
        return None


def _require_receiver(params: SystemParams, kind: Receiver, where: str) -> None:
    if params.receiver is not kind:
        raise ValueError(f"{where} applies to the {kind.value} receiver")


# ---------------------------------------------------------------------------
# Closed-form intervals
# ---------------------------------------------------------------------------


def prop1_interval(params: SystemParams) -> OptimizationResult:
    """Low-count closed form for the absorbing receiver with L = 1."""
    _require_receiver(params, Receiver.ABSORBING, "prop1_interval")
    if params.L != 1:
        raise ValueError("prop1_interval needs L = 1")
    consts = derived(params)
    t1 = _start_time(consts.m**2, params.T_s, 0.0)
    window, clamped = _clamp_continuous(t1, params.T_s, params.T_s)
    inter = ClosedFormIntermediates(regime=Regime.BELOW_QHAT, branch=Branch.COND_TS)
    return OptimizationResult(
        window=window,
        method=Method.PROP1,
        intermediates=inter,
        objective_value=_msinar_objective(params, window, params.Q),
        clamped=clamped,
    )


def prop2_interval(params: SystemParams) -> OptimizationResult:
    """Low-count closed form for the absorbing receiver with L > 1."""
    _require_receiver(params, Receiver.ABSORBING, "prop2_interval")
    if params.L <= 1:
        raise ValueError("prop2_interval needs L > 1")
    consts = derived(params)
    m2 = consts.m**2
    t1_anchor = _start_time(m2, params.T_s, 0.0)
    i_ratio = _ratio_sum_absorbing(params, t1_anchor)
    t1 = _start_time(m2, params.T_s, math.log(i_ratio))

    if _end_cond_sum(m2, params.T_s, params.L) <= 1.0:
        window, clamped = _clamp_continuous(t1, params.T_s, params.T_s)
        inter = ClosedFormIntermediates(
            regime=Regime.BELOW_QHAT,
            branch=Branch.COND_TS,
            i_ratio=i_ratio,
            t1_anchor=t1_anchor,
        )
    else:
        t2_anchor = 0.5 * (consts.t_max + params.T_s)
        v_ratio = _ratio_sum_absorbing(params, t2_anchor)
        sol = _solve_end_fraction(m2, params.T_s, math.log(v_ratio))
        window, clamped = _clamp_continuous(t1, sol.fraction * params.T_s, params.T_s)
        inter = ClosedFormIntermediates(
            regime=Regime.BELOW_QHAT,
            branch=sol.branch,
            i_ratio=i_ratio,
            v_ratio=v_ratio,
            gamma=sol.gamma,
            delta1=sol.delta1,
            delta2=sol.delta2,
            s1=sol.s1,
            s2=sol.s2,
            t1_anchor=t1_anchor,
            t2_anchor=t2_anchor,
        )
    return OptimizationResult(
        window=window,
        method=Method.PROP2,
        intermediates=inter,
        objective_value=_msinar_objective(params, window, params.Q),
        clamped=clamped,
    )


def prop3_interval(params: SystemParams, q_hat: int | None = None) -> OptimizationResult:
    """High-count closed form for the absorbing receiver (Q >= q_hat).

    Recomputes the low-count window to anchor the ISI ratios, then inflates
    them by g evaluated at Q = g(q_hat) * q_hat.  ``q_hat`` may be supplied
    to skip its computation.
    """
    _require_receiver(params, Receiver.ABSORBING, "prop3_interval")
    if params.L < 1:
        raise ValueError("prop3_interval needs L >= 1")
    below = prop1_interval(params) if params.L == 1 else prop2_interval(params)
    if q_hat is None:
        q_hat = metrics.q_hat(params, below.window)
    if params.Q < q_hat:
        raise ValueError(
            f"prop3_interval needs Q >= q_hat ({params.Q} < {q_hat}); "
            "use prop1/prop2 in the low-count regime"
        )
    g1 = metrics.g_factor(params, float(q_hat))
    g = metrics.g_factor(params, g1 * q_hat)
    consts = derived(params)
    m2 = consts.m**2
    assert isinstance(below.window, ContinuousWindow)

    if params.L == 1:
        t1 = _start_time(m2, params.T_s, math.log(g))
        window, clamped = _clamp_continuous(t1, params.T_s, params.T_s)
        inter = ClosedFormIntermediates(
            regime=Regime.ABOVE_QHAT,
            branch=Branch.COND_TS,
            t1_anchor=below.window.t1,
        )
    else:
        t1_anchor = below.window.t1
        t2_anchor = 0.5 * (below.window.t2 + consts.t_max)
        i_ratio = _ratio_sum_absorbing(params, t1_anchor)
        t1 = _start_time(m2, params.T_s, math.log(i_ratio * g))
        if g * _end_cond_sum(m2, params.T_s, params.L) <= 1.0:
            window, clamped = _clamp_continuous(t1, params.T_s, params.T_s)
            inter = ClosedFormIntermediates(
                regime=Regime.ABOVE_QHAT,
                branch=Branch.COND_TS,
                i_ratio=i_ratio,
                t1_anchor=t1_anchor,
            )
        else:
            v_ratio = _ratio_sum_absorbing(params, t2_anchor)
            sol = _solve_end_fraction(m2, params.T_s, math.log(v_ratio * g))
            window, clamped = _clamp_continuous(t1, sol.fraction * params.T_s, params.T_s)
            inter = ClosedFormIntermediates(
                regime=Regime.ABOVE_QHAT,
                branch=sol.branch,
                i_ratio=i_ratio,
                v_ratio=v_ratio,
                gamma=sol.gamma,
                delta1=sol.delta1,
                delta2=sol.delta2,
                s1=sol.s1,
                s2=sol.s2,
                t1_anchor=t1_anchor,
                t2_anchor=t2_anchor,
            )
    return OptimizationResult(
        window=window,
        method=Method.PROP3,
        intermediates=inter,
        objective_value=_msinar_objective(params, window, q_hat),
        clamped=clamped,
    )


def _prop4_below(params: SystemParams) -> tuple[SampledWindow, ClosedFormIntermediates, bool]:
    assert params.N is not None and params.t_s is not None
    consts = derived(params)
    m2 = consts.m_hat**2
    n1_anchor = math.ceil(_start_time(m2, params.T_s, 0.0) / params.t_s)

    if params.L == 1:
        window, clamped = _clamp_sampled(n1_anchor, params.N, params.N)
        inter = ClosedFormIntermediates(regime=Regime.BELOW_QHAT, branch=Branch.COND_TS)
        return window, inter, clamped

    w_ratio = _ratio_sum_passive(params, float(n1_anchor))
    n1 = math.ceil(_start_time(m2, params.T_s, math.log(w_ratio)) / params.t_s)
    if _end_cond_sum(m2, params.T_s, params.L) <= 1.0:
        window, clamped = _clamp_sampled(n1, params.N, params.N)
        inter = ClosedFormIntermediates(
            regime=Regime.BELOW_QHAT,
            branch=Branch.COND_TS,
            w_ratio=w_ratio,
            n1_anchor=float(n1_anchor),
        )
        return window, inter, clamped

    n2_anchor = math.ceil((consts.t_max + params.T_s) / (2.0 * params.t_s))
    a_ratio = _ratio_sum_passive(params, float(n2_anchor))
    sol = _solve_end_fraction(m2, params.T_s, math.log(a_ratio))
    n2 = math.ceil(sol.fraction * params.N)
    window, clamped = _clamp_sampled(n1, n2, params.N)
    inter = ClosedFormIntermediates(
        regime=Regime.BELOW_QHAT,
        branch=sol.branch,
        w_ratio=w_ratio,
        a_ratio=a_ratio,
        gamma=sol.gamma,
        delta1=sol.delta1,
        delta2=sol.delta2,
        s1=sol.s1,
        s2=sol.s2,
        n1_anchor=float(n1_anchor),
        n2_anchor=float(n2_anchor),
    )
    return window, inter, clamped


def prop4_interval(params: SystemParams, q_hat: int | None = None) -> OptimizationResult:
    """Closed form for the passive receiver, both count regimes."""
    _require_receiver(params, Receiver.PASSIVE, "prop4_interval")
    if params.L < 1:
        raise ValueError("prop4_interval needs L >= 1")
    assert params.N is not None and params.t_s is not None
    below_window, below_inter, below_clamped = _prop4_below(params)
    if q_hat is None:
        try:
            q_hat = metrics.q_hat(params, below_window)
        except NoFiniteQhat:
            q_hat = None
    if q_hat is None or params.Q < q_hat:
        return OptimizationResult(
            window=below_window,
            method=Method.PROP4,
            intermediates=below_inter,
            objective_value=_msinar_objective(params, below_window, params.Q),
            clamped=below_clamped,
        )

    g1 = metrics.g_factor(params, float(q_hat))
    g = metrics.g_factor(params, g1 * q_hat)
    consts = derived(params)
    m2 = consts.m_hat**2

    if params.L == 1:
        n1 = math.ceil(_start_time(m2, params.T_s, math.log(g)) / params.t_s)
        window, clamped = _clamp_sampled(n1, params.N, params.N)
        inter = ClosedFormIntermediates(
            regime=Regime.ABOVE_QHAT,
            branch=Branch.COND_TS,
            n1_anchor=float(below_window.n1),
        )
    else:
        n1_anchor = float(below_window.n1)
        n2_anchor = (below_window.n2 * params.t_s + consts.t_max) / (2.0 * params.t_s)
        w_ratio = _ratio_sum_passive(params, n1_anchor)
        n1 = math.ceil(_start_time(m2, params.T_s, math.log(w_ratio * g)) / params.t_s)
        if g * _end_cond_sum(m2, params.T_s, params.L) <= 1.0:
            window, clamped = _clamp_sampled(n1, params.N, params.N)
            inter = ClosedFormIntermediates(
                regime=Regime.ABOVE_QHAT,
                branch=Branch.COND_TS,
                w_ratio=w_ratio,
                n1_anchor=n1_anchor,
            )
        else:
            a_ratio = _ratio_sum_passive(params, n2_anchor)
            sol = _solve_end_fraction(m2, params.T_s, math.log(a_ratio * g))
            n2 = math.ceil(sol.fraction * params.N)
            window, clamped = _clamp_sampled(n1, n2, params.N)
            inter = ClosedFormIntermediates(
                regime=Regime.ABOVE_QHAT,
                branch=sol.branch,
                w_ratio=w_ratio,
                a_ratio=a_ratio,
                gamma=sol.gamma,
                delta1=sol.delta1,
                delta2=sol.delta2,
                s1=sol.s1,
                s2=sol.s2,
                n1_anchor=n1_anchor,
                n2_anchor=n2_anchor,
            )
    return OptimizationResult(
        window=window,
        method=Method.PROP4,
        intermediates=inter,
        objective_value=_msinar_objective(params, window, q_hat),
        clamped=clamped,
    )


def regime_q_hat(params: SystemParams) -> int | None:
    """Regime threshold q_hat evaluated at the low-count closed-form window.

    None when the closed form fails or mSINAR cannot reach 1 there; callers
    then stay in the low-count regime for every Q.
    """
    if params.L < 1:
        return None
    try:
        if params.receiver is Receiver.ABSORBING:
            below = prop1_interval(params) if params.L == 1 else prop2_interval(params)
            window = below.window
        else:
            window, _, _ = _prop4_below(params)
        return metrics.q_hat(params, window)
    except DomainError:
        return None


def closed_form_interval(params: SystemParams) -> OptimizationResult:
    """Regime-dispatched closed form (Prop 1/2/3 absorbing, Prop 4 passive)."""
    if params.L < 1:
        raise ValueError("closed forms need L >= 1")
    if params.receiver is Receiver.PASSIVE:
        return prop4_interval(params)
    below = prop1_interval(params) if params.L == 1 else prop2_interval(params)
    try:
        qh = metrics.q_hat(params, below.window)
    except NoFiniteQhat:
        return below
    if params.Q < qh:
        return below
    return prop3_interval(params, q_hat=qh)


# ---------------------------------------------------------------------------
# Window grids
# ---------------------------------------------------------------------------


def _continuous_grid(params: SystemParams, dt: float):
    steps = int(round(params.T_s / dt))
    if steps < 1:
        raise DegenerateWindow(f"grid step {dt} leaves no window inside T_s={params.T_s}")
    edges = np.linspace(0.0, params.T_s, steps + 1)
    i1, i2 = np.triu_indices(steps + 1, k=1)
    surv = np.stack(
        [_survival(params, edges + k * params.T_s) for k in range(params.L + 1)]
    )
    mean = surv[:, i1] - surv[:, i2]
    var = mean * (1.0 - mean)
    return edges, i1, i2, mean, var


def _sampled_grid(params: SystemParams):
    assert params.N is not None and params.t_s is not None
    n = np.arange(0, params.N + 1, dtype=float)
    rates = np.stack(
        [
            passive_probability(params, n * params.t_s + k * params.T_s)
            for k in range(params.L + 1)
        ]
    )
    prefix = np.concatenate(
        [np.zeros((params.L + 1, 1)), np.cumsum(rates, axis=1)], axis=1
    )
    n1, n2 = np.triu_indices(params.N + 1, k=0)
    mean = prefix[:, n2 + 1] - prefix[:, n1]
    return n1, n2, mean, mean.copy()


def _argbest(values: np.ndarray, i1: np.ndarray, i2: np.ndarray, maximize: bool) -> int:
    """Index of the best window; ties go to the smaller start, then larger end."""
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise DegenerateWindow("no window produced a finite objective")
    best = finite.max() if maximize else finite.min()
    ties = np.flatnonzero(values == best)
    order = np.lexsort((-i2[ties], i1[ties]))
    return int(ties[order[0]])


def numeric_metric_search(
    params: SystemParams, metric: metrics.Metric, dt: float | None = None
) -> OptimizationResult:
    """Exhaustive grid maximization of a metric over detection windows.

    For mSINAR the count regime is honored by evaluating at
    min(Q, regime q_hat).  Undefined (0/0) windows are skipped.
    """
    if params.L < 1:
        raise ValueError("metric search needs L >= 1")
    q_eff = params.Q
    if metric is not metrics.Metric.SIR:
        if params.Q < 1:
            raise ValueError("metric search needs Q >= 1")
        if metric is metrics.Metric.MSINAR:
            qh = regime_q_hat(params)
            if qh is not None:
                q_eff = min(params.Q, qh)

    if params.receiver is Receiver.ABSORBING:
        step = default_grid_step(params) if dt is None else dt
        edges, i1, i2, mean, var = _continuous_grid(params, step)
    else:
        i1, i2, mean, var = _sampled_grid(params)

    values = metric_values_masked(metric, float(q_eff), mean, var)
    idx = _argbest(values, i1, i2, maximize=True)

    # difference metrics can be nonpositive everywhere (ISI swamps the
    # signal at every candidate window); fall back to a one-step window at
    # the response peak so downstream BER evaluation stays well-defined
    if metric in (metrics.Metric.SID, metrics.Metric.MSID) and values[idx] <= 0.0:
        window = _peak_fallback_window(params, edges if params.receiver is Receiver.ABSORBING else None)
        return OptimizationResult(
            window=window,
            method=Method.NUMERIC_METRIC,
            objective_value=float(values[idx]),
            degenerate=True,
        )

    if params.receiver is Receiver.ABSORBING:
        window: DetectionWindow = ContinuousWindow(float(edges[i1[idx]]), float(edges[i2[idx]]))
    else:
        window = SampledWindow(int(i1[idx]), int(i2[idx]))
    return OptimizationResult(
        window=window,
        method=Method.NUMERIC_METRIC,
        objective_value=float(values[idx]),
    )


def _peak_fallback_window(params: SystemParams, edges: np.ndarray | None) -> DetectionWindow:
    t_max = derived(params).t_max
    if params.receiver is Receiver.ABSORBING:
        assert edges is not None
        lo = int(np.clip(np.searchsorted(edges, t_max, side="right") - 1, 0, len(edges) - 2))
        return ContinuousWindow(float(edges[lo]), float(edges[lo + 1]))
    assert params.N is not None and params.t_s is not None
    n = int(np.clip(round(t_max / params.t_s), 0, params.N))
    return SampledWindow(n, n)


def metric_values_masked(
    metric: metrics.Metric, q: float, mean: np.ndarray, var: np.ndarray
) -> np.ndarray:
    values = metrics.metric_values_from_taps(metric, q, mean, var)
    return np.where(np.isnan(values), -np.inf, values)


def _msinar_seed_index(params: SystemParams, mean: np.ndarray, var: np.ndarray) -> int | None:
    if params.L < 1 or params.Q < 1:
        return None
    qh = regime_q_hat(params)
    q_eff = min(params.Q, qh) if qh is not None else params.Q
    values = metric_values_masked(metrics.Metric.MSINAR, float(q_eff), mean, var)
    if not np.isfinite(values).any():
        return None
    return int(np.argmax(values))


def exhaustive_ber_search(params: SystemParams, dt: float | None = None) -> OptimizationResult:
    """Grid argmin of the threshold-optimized analytical BER.

    This is the reference the closed forms and metric windows are judged
    against; cost grows as (T_s/dt)^2 * 2^L, so L is capped at 12.
    """
    if params.L > MAX_BER_SEARCH_L:
        raise EnumerationTooLarge(
            f"exhaustive BER search caps at L <= {MAX_BER_SEARCH_L}, got {params.L}"
        )
    if params.receiver is Receiver.ABSORBING:
        step = default_grid_step(params) if dt is None else dt
        edges, i1, i2, mean, var = _continuous_grid(params, step)
    else:
        i1, i2, mean, var = _sampled_grid(params)

    lags = tuple(range(params.L + 1))
    best_pe = math.inf
    best_idx = -1

    def consider(w: int) -> None:
        nonlocal best_pe, best_idx
        taps = TapProfile(lags=lags, mean=mean[:, w], var=var[:, w])
        if best_idx >= 0 and ber_floor_from_taps(params, taps) > best_pe:
            return
        _, estimate = threshold_from_taps(params, taps)
        pe = estimate.value
        better = pe < best_pe or (
            best_idx >= 0
            and pe == best_pe
            and (
                i1[w] < i1[best_idx]
                or (i1[w] == i1[best_idx] and i2[w] > i2[best_idx])
            )
        )
        if better:
            best_pe = pe
            best_idx = w

    # Seed with the mSINAR-best window so the lower-bound prune bites early.
    # The preference order is total, so traversal order cannot change the result.
    seed = _msinar_seed_index(params, mean, var)
    if seed is not None:
        consider(seed)
    for w in range(i1.size):
        if w != seed:
            consider(w)
    if best_idx < 0:
        raise DegenerateWindow("no candidate window")
    if params.receiver is Receiver.ABSORBING:
        window: DetectionWindow = ContinuousWindow(
            float(edges[i1[best_idx]]), float(edges[i2[best_idx]])
        )
    else:
        window = SampledWindow(int(i1[best_idx]), int(i2[best_idx]))
    return OptimizationResult(
        window=window, method=Method.EXHAUSTIVE_BER, objective_value=best_pe
    )


def shift_tau_search(params: SystemParams, dt: float | None = None) -> OptimizationResult:
    """Best full-length window delayed by tau in [0, t_max] (BER argmin).

    The delayed window overhangs into the next symbol; that symbol's leakage
    is counted as interference alongside the L past taps.
    """
    consts = derived(params)
    if params.receiver is Receiver.ABSORBING:
        step = default_grid_step(params) if dt is None else dt
        n_tau = max(1, int(round(consts.t_max / step)))
        taus = np.linspace(0.0, consts.t_max, n_tau + 1)
    else:
        assert params.t_s is not None
        n_tau = int(math.ceil(consts.t_max / params.t_s))
        taus = np.arange(0, n_tau + 1, dtype=float) * params.t_s

    best_pe = math.inf
    best_tau = 0.0
    for tau in taus:
        taps = shift_taps(params, float(tau))
        _, estimate = threshold_from_taps(params, taps)
        if estimate.value < best_pe:
            best_pe = estimate.value
            best_tau = float(tau)
    if params.receiver is Receiver.ABSORBING:
        window: DetectionWindow = ContinuousWindow(best_tau, best_tau + params.T_s)
    else:
        assert params.t_s is not None and params.N is not None
        j = int(round(best_tau / params.t_s))
        window = SampledWindow(j, j + params.N)
    return OptimizationResult(
        window=window,
        method=Method.SHIFT_TAU,
        objective_value=best_pe,
        tau=best_tau,
    )


def full_window_result(params: SystemParams) -> OptimizationResult:
    return OptimizationResult(window=full_window(params), method=Method.FULL_WINDOW)


_NUMERIC_SCHEMES = {
    Scheme.NUMERIC_SID: metrics.Metric.SID,
    Scheme.NUMERIC_SINAR: metrics.Metric.SINAR,
    Scheme.NUMERIC_MSINAR: metrics.Metric.MSINAR,
}


def select_window(
    params: SystemParams, scheme: Scheme, dt: float | None = None
) -> OptimizationResult:
    """Produce the detection window of one scheme (sweep/CLI entry point)."""
    if scheme is Scheme.FULL_WINDOW:
        return full_window_result(params)
    if scheme is Scheme.SHIFT_TAU:
        return shift_tau_search(params, dt)
    if scheme is Scheme.CLOSED_FORM:
        return closed_form_interval(params)
    if scheme is Scheme.EXHAUSTIVE_BER:
        return exhaustive_ber_search(params, dt)
    return numeric_metric_search(params, _NUMERIC_SCHEMES[scheme], dt)
