"""Physics built on the averages: state distances, the depolarizing channel,
purity/entanglement evolution, and closed/open thermalization."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import (
    FormFactorInputs,
    general_average,
    uniform_coeffs,
    variance_coeffs,
)
from .ensembles import (
    AveragedFormFactors,
    EnsembleKind,
    averaged_form_factors,
    averaged_time_coeffs,
    bessel_j1_over_t,
    sinc,
)
from .errors import DimensionError
from .linalg import (
    BipartiteDims,
    RngStream,
    check_state,
    hs_norm_sq,
    partial_trace_env,
    partial_trace_sys,
    sample_gue_hamiltonians,
    trace_power,
)

MARGINAL_MATCH_TOL = 1e-9
ENVELOPE_WINDOW = math.pi / 2  # oscillation period of the sin(2t)-type factors


@dataclass(frozen=True)
class PurityTrajectory:
    times: np.ndarray
    values: np.ndarray
    ensemble: EnsembleKind
    dims: BipartiteDims
    p0: float


@dataclass(frozen=True)
class ThermalizationParams:
    """Scalar inputs of the open-system thermalization curve.

    The initial state enters only through its purities; the default triple
    (1, 1, 1) is a pure product state.
    """

    dims: BipartiteDims
    p_gibbs: float
    p_rho0: float = 1.0
    p_s0: float = 1.0
    p_e0: float = 1.0
    beta: float | None = None


@dataclass(frozen=True)
class ThermalizationCurve:
    times: np.ndarray
    values: np.ndarray
    ensemble: EnsembleKind
    params: ThermalizationParams | None = None
    meta: dict = field(default_factory=dict)


def two_state_uniform(rho, rho_p, dims: BipartiteDims) -> tuple[float, float]:
    """Mean and variance of ||Tr_E{U (rho - rho') U^dag}||^2 over Haar U."""
    rho = check_state(rho)
    rho_p = check_state(rho_p)
    m = rho - rho_p
    if m.shape[0] != dims.d:
        raise DimensionError(f"state dim {m.shape[0]} != d = {dims.d}")
    c1, _ = uniform_coeffs(dims)
    _, _, _, c4, c5 = variance_coeffs(dims)
    t2 = trace_power(m, 2).real
    t4 = trace_power(m, 4).real
    return c1 * hs_norm_sq(m), c4 * t2**2 + c5 * t4


def two_state_general(rho, rho_p, dims: BipartiteDims, ff: FormFactorInputs) -> float:
    """Time-dependent mean distance of two evolving reduced states.

    When both marginals of rho and rho' agree the average collapses to
    ct1(t) * ||rho - rho'||^2; otherwise the full four-term average applies.
    """
    rho = check_state(rho)
    rho_p = check_state(rho_p)
    m = rho - rho_p
    if m.shape[0] != dims.d:
        raise DimensionError(f"state dim {m.shape[0]} != d = {dims.d}")
    env_gap = np.max(np.abs(partial_trace_env(m, dims)))
    sys_gap = np.max(np.abs(partial_trace_sys(m, dims)))
    if env_gap <= MARGINAL_MATCH_TOL and sys_gap <= MARGINAL_MATCH_TOL:
        from .closed_forms import time_coeffs

        return time_coeffs(ff, dims).ct1 * hs_norm_sq(m)
    return general_average(m, dims, ff)


def depolarizing_average(rho0, f2: float, d: int) -> np.ndarray:
    """Average evolved state: mixes rho0 with I/d, weights set by |f(t)|^2."""
    if d < 2:
        raise DimensionError(f"depolarizing channel needs d >= 2, got {d}")
    rho0 = check_state(rho0)
    if rho0.shape[0] != d:
        raise DimensionError(f"state dim {rho0.shape[0]} != d = {d}")
    if not 0.0 <= f2 <= 1.0:
        raise ValueError(f"|f(t)|^2 must lie in [0, 1], got {f2}")
    lam = (d**2 * f2 - 1.0) / (d**2 - 1.0)
    return (1.0 - lam) * np.eye(d, dtype=complex) / d + lam * rho0


def uniform_purity(p_total: float, dims: BipartiteDims) -> tuple[float, float | None]:
    """Mean reduced purity under a Haar average, plus the pure-state variance.

    The mean depends on the total state only through its purity; the variance
    closed form holds for pure total states only and is None otherwise.
    """
    d = dims.d
    if not 1.0 / d - 1e-12 <= p_total <= 1.0 + 1e-12:
        raise ValueError(f"total purity {p_total} outside [1/{d}, 1]")
    ds, de = dims.d_s, dims.d_e
    mean = ((ds**2 * de - de) * p_total + ds * de**2 - ds) / (ds**2 * de**2 - 1)
    variance = None
    if abs(p_total - 1.0) <= 1e-12:
        variance = (
            2.0
            * (de**2 - 1)
            * (ds**2 - 1)
            / ((d + 1) ** 2 * (d + 2) * (d + 3))
        )
    return mean, variance


def _purity_value(ff: AveragedFormFactors, dims: BipartiteDims, p0: float) -> float:
    ds, de, d = dims.d_s, dims.d_e, dims.d
    g = 4.0 * ff.f2 - ff.f2_2t - d**2 * ff.f4
    re = ff.re_f2fc2t
    return (
        (ds + de) / (d + 1)
        + (ds + de) * (g - 2 * d * re) / ((d - 1) * (d + 1) * (d + 3))
        + (2 * d * re - g) / ((d - 1) * (d + 3)) * p0
    )


def purity_evolution(
    ensemble: EnsembleKind, dims: BipartiteDims, p0: float, times
) -> PurityTrajectory:
    """Mean reduced purity of an initially pure total state along a time grid.

    p0 is the initial reduced purity; the trajectory starts at p0 exactly and
    relaxes towards (d_S + d_E)/(d_S d_E + 1), i.e. 1/d_S for large d_E.
    """
    if not 1.0 / dims.d_s - 1e-12 <= p0 <= 1.0 + 1e-12:
        raise ValueError(f"reduced purity {p0} outside [1/{dims.d_s}, 1]")
    times = np.asarray(times, dtype=float)
    if ensemble == EnsembleKind.UNIFORM:
        mean, _ = uniform_purity(1.0, dims)
        values = np.full(times.shape, mean)
    else:
        values = np.array(
            [
                _purity_value(averaged_form_factors(ensemble, t, dims.d), dims, p0)
                for t in times
            ]
        )
    return PurityTrajectory(times=times, values=values, ensemble=ensemble, dims=dims, p0=p0)


def gibbs_purity(levels, beta: float) -> float:
    """Purity of the thermal state of the spectrum: Tr e^{-2 b D} / (Tr e^{-b D})^2."""
    if beta < 0:
        raise ValueError(f"inverse temperature must be >= 0, got {beta}")
    e = np.asarray(levels, dtype=float)
    shifted = e - e.min()
    w = np.exp(-beta * shifted)
    return float(np.sum(w**2) / np.sum(w) ** 2)


def gibbs_purity_mc(
    ensemble: EnsembleKind,
    d: int,
    beta: float,
    n: int,
    rng: RngStream,
    workers: int | None = None,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the Gibbs purity over spectra."""
    from .mc import accumulate_chunks

    if ensemble not in (EnsembleKind.POISSON, EnsembleKind.GUE_NUMERIC):
        raise ValueError(f"gibbs_purity_mc supports Poisson/GUE sampling, got {ensemble}")
    if beta == 0.0:
        return 1.0 / d, 0.0

    def chunk(gen: np.random.Generator, count: int):
        if ensemble == EnsembleKind.POISSON:
            levels = gen.uniform(-2.0, 2.0, size=(count, d))
        else:
            levels = np.linalg.eigvalsh(sample_gue_hamiltonians(d, count, gen))
        shifted = levels - levels.min(axis=1, keepdims=True)
        w = np.exp(-beta * shifted)
        p = np.sum(w**2, axis=1) / np.sum(w, axis=1) ** 2
        return np.array([p.sum(), (p**2).sum()])

    s1, s2 = accumulate_chunks(chunk, n, rng, workers=workers)
    mean = s1 / n
    var = max(s2 / n - mean**2, 0.0) * n / max(n - 1, 1)
    return mean, math.sqrt(var / n)


def closed_thermalization(p_gibbs: float, p0: float, d: int) -> float:
    """Time-independent mean squared distance to the Gibbs state (closed system)."""
    for name, p in (("p_gibbs", p_gibbs), ("p0", p0)):
        if not 1.0 / d - 1e-12 <= p <= 1.0 + 1e-12:
            raise ValueError(f"{name} = {p} outside [1/{d}, 1]")
    return p_gibbs + p0 - 2.0 / d


def open_thermalization(
    params: ThermalizationParams, ensemble: EnsembleKind, times
) -> ThermalizationCurve:
    """Mean squared reduced distance to the Gibbs state along a time grid."""
    dims = params.dims
    d = dims.d
    for name, p in (
        ("p_gibbs", params.p_gibbs),
        ("p_rho0", params.p_rho0),
    ):
        if not 1.0 / d - 1e-12 <= p <= 1.0 + 1e-12:
            raise ValueError(f"{name} = {p} outside [1/{d}, 1]")
    for name, p, dim in (
        ("p_s0", params.p_s0, dims.d_s),
        ("p_e0", params.p_e0, dims.d_e),
    ):
        if not 1.0 / dim - 1e-12 <= p <= 1.0 + 1e-12:
            raise ValueError(f"{name} = {p} outside [1/{dim}, 1]")
    c1, c2 = uniform_coeffs(dims)
    base = c1 * params.p_gibbs + c2 - 2.0 / dims.d_s
    times = np.asarray(times, dtype=float)
    values = np.empty_like(times)
    for i, t in enumerate(times):
        c = averaged_time_coeffs(ensemble, t, dims)
        values[i] = (
            base
            + c.ct1 * params.p_rho0
            + c.ct2
            + c.ct3 * params.p_s0
            + c.ct4 * params.p_e0
        )
    return ThermalizationCurve(times=times, values=values, ensemble=ensemble, params=params)


def equilibration_large_de(
    ensemble: EnsembleKind, d_s: int, p_s0: float, times
) -> ThermalizationCurve:
    """Infinite-environment limit of the open thermalization curve.

    Poisson decays as c0 (cos t sin t / t)^4, the GUE as c0 (J1(2t)/t)^4,
    with c0 the initial reduced-purity excess over 1/d_S.
    """
    if d_s < 2:
        raise DimensionError(f"d_s must be >= 2, got {d_s}")
    c0 = p_s0 - 1.0 / d_s
    times = np.asarray(times, dtype=float)
    if ensemble == EnsembleKind.POISSON:
        values = np.array([c0 * sinc(2.0 * t) ** 4 for t in times])
    elif ensemble == EnsembleKind.GUE_LARGE_D:
        values = np.array([c0 * bessel_j1_over_t(t) ** 4 for t in times])
    else:
        raise ValueError(f"no large-d_E limit curve for ensemble {ensemble}")
    return ThermalizationCurve(
        times=times,
        values=values,
        ensemble=ensemble,
        meta={"d_s": d_s, "p_s0": p_s0, "c0": c0},
    )


def fit_decay_exponent(curve: ThermalizationCurve, t_window: tuple[float, float]) -> float:
    """Power-law exponent of the oscillating decay on a time window.

    The envelope is the running maximum over windows of one oscillation
    period; a raw log-log fit on the oscillating curve would be biased.
    """
    t0, t1 = t_window
    if t0 <= 0 or t1 <= t0:
        raise ValueError(f"need 0 < t0 < t1, got ({t0}, {t1})")
    times = curve.times
    values = curve.values
    if t0 < times.min() - 1e-12 or t1 > times.max() + 1e-12:
        raise ValueError("fit window extends beyond the curve")
    env_t = []
    env_v = []
    edge = t0
    while edge < t1 - 1e-12:
        hi = min(edge + ENVELOPE_WINDOW, t1)
        mask = (times >= edge) & (times <= hi)
        if mask.any():
            vals = values[mask]
            k = int(np.argmax(vals))
            if vals[k] <= 0:
                raise ValueError(f"window [{edge:.3f}, {hi:.3f}] has non-positive maximum")
            env_t.append(times[mask][k])
            env_v.append(vals[k])
        edge = hi
    if len(env_t) < 4:
        raise ValueError(f"only {len(env_t)} envelope points; need at least 4")
    slope, _ = np.polyfit(np.log(env_t), np.log(env_v), 1)
    return float(slope)
