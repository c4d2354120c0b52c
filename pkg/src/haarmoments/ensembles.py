"""Spectral-ensemble averages of the form-factor functions, and spectrum samplers.

Poisson (uncorrelated levels, flat density on [-2, 2]) has closed forms for
the averages of |f(t)|^2, Re{f(t)^2 f*(2t)} and |f(t)|^4.  The Gaussian
unitary ensemble comes in two flavours: GUE_NUMERIC evaluates the exact
determinantal two-point integral built from scaled Hermite functions
(practical for d <= 16), while GUE_LARGE_D uses the factorized large-d limit
h(t) = J1(2t)/t.  Both share the <|H_ij|^2> = 1/d normalization, so every
ensemble lives on the spectral span [-2, 2].
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .closed_forms import FormFactorInputs, TimeCoeffs, time_coeffs
from .errors import DimensionError
from .linalg import BipartiteDims, RngStream, sample_gue_hamiltonians
from .quadrature import integrate

GUE_NUMERIC_MAX_DIM = 16
GUE_DENSITY_MAX_DIM = 64


class EnsembleKind(enum.Enum):
    UNIFORM = "uniform"
    POISSON = "poi"
    GUE_NUMERIC = "gue"
    GUE_LARGE_D = "gue-large-d"

    @classmethod
    def from_name(cls, name: str) -> "EnsembleKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise ValueError(f"unknown ensemble {name!r}")


@dataclass(frozen=True)
class AveragedFormFactors(FormFactorInputs):
    """Ensemble means of the four spectral functions at a given time."""

    ensemble: EnsembleKind = EnsembleKind.POISSON
    t: float = 0.0
    d: int = 0


def sinc(x: float) -> float:
    """sin(x)/x with the limit value 1 at x = 0."""
    return float(np.sinc(x / np.pi))


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind J_1, to ~1e-10 absolute error.

    Power series below the crossover, Hankel asymptotic expansion beyond.
    The crossover sits at 16: there both branches are accurate to ~1e-10,
    whereas the optimally truncated asymptotic series has an irreducible
    ~1e-8 floor near x = 8.
    """
    if x < 0:
        return -bessel_j1(-x)
    if x < _J1_CROSSOVER:
        return _j1_series(x)
    return _j1_asymptotic(x)


_J1_CROSSOVER = 16.0


def _j1_series(x: float) -> float:
    # J1(x) = (x/2) sum_k (-1)^k (x^2/4)^k / (k! (k+1)!)
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    for k in range(1, 200):
        term *= -q / (k * (k + 1))
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)) and k > 0.5 * x:
            break
    return 0.5 * x * total


# Hankel coefficients A_k = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k) for nu = 1.
def _hankel_coeffs(count: int) -> list[float]:
    coeffs = [1.0]
    for k in range(1, count):
        coeffs.append(coeffs[-1] * (4.0 - (2 * k - 1) ** 2) / (8.0 * k))
    return coeffs


_A = _hankel_coeffs(40)


def _j1_asymptotic(x: float) -> float:
    # J1(x) ~ sqrt(2/(pi x)) [cos(w) P(x) - sin(w) Q(x)], w = x - 3 pi/4,
    # with P, Q the alternating asymptotic series; truncated at the smallest
    # term, which at x >= 16 is below the target accuracy.
    p = 0.0
    last = math.inf
    for k in range(0, len(_A), 2):
        term = (-1.0) ** (k // 2) * _A[k] / x**k
        if abs(term) >= last:
            break
        p += term
        last = abs(term)
    q = 0.0
    last = math.inf
    for k in range(1, len(_A), 2):
        term = (-1.0) ** ((k - 1) // 2) * _A[k] / x**k
        if abs(term) >= last:
            break
        q += term
        last = abs(term)
    w = x - 0.75 * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (math.cos(w) * p - math.sin(w) * q)


def bessel_j1_over_t(t: float) -> float:
    """J1(2t)/t with its t -> 0 limit value 1."""
    if t == 0.0:
        return 1.0
    return bessel_j1(2.0 * t) / t


def poisson_form_factors(t: float, d: int) -> AveragedFormFactors:
    """Closed-form Poisson (uncorrelated uniform levels) averages at time t.

    All four functions follow from the coincidence patterns of independent
    levels with single-level characteristic function sinc(2t).  The fourth
    moment keeps the |<exp(-2iEt)>|^2 pattern (two coincident index pairs),
    whose omission is detectable against sampled spectra at a few sigma.
    """
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    s2 = sinc(2.0 * t)
    s4 = sinc(4.0 * t)
    c2 = math.cos(2.0 * t)
    df = float(d)
    f2 = 1.0 / df + (d - 1) / df * s2**2
    f2_2t = 1.0 / df + (d - 1) / df * s4**2
    re = (
        1.0
        + (d - 1) * s4**2
        + 2.0 * (d - 1) * s2**2
        + (d - 2) * (d - 1) * c2 * s2**3
    ) / df**2
    f4 = (
        (2 * d - 1)
        + (d - 1) * s4**2
        + 4.0 * (d - 1) ** 2 * s2**2
        + 2.0 * (d - 1) * (d - 2) * c2 * s2**3
        + (d - 1) * (d - 2) * (d - 3) * s2**4
    ) / df**3
    return AveragedFormFactors(
        f2=f2, f2_2t=f2_2t, re_f2fc2t=re, f4=f4,
        ensemble=EnsembleKind.POISSON, t=t, d=d,
    )


def _gue_window(d: int) -> float:
    # Semicircle support [-2, 2] plus enough room that the Gaussian tails of
    # the highest Hermite function are below 1e-12.
    return 2.0 + 10.0 / math.sqrt(d)


def _hermite_functions(e: np.ndarray, d: int) -> np.ndarray:
    """Scaled Hermite functions phi_0..phi_{d-1} at abscissae e, shape (d, len(e)).

    Stable three-term recurrence on the normalized functions; the weight
    exp(-d E^2 / 4) is carried inside each value, never split off.
    """
    y = np.sqrt(d / 2.0) * np.asarray(e, dtype=float)
    scale = (d / 2.0) ** 0.25
    out = np.empty((d, y.size), dtype=float)
    out[0] = scale * np.pi**-0.25 * np.exp(-0.5 * y * y)
    if d > 1:
        out[1] = math.sqrt(2.0) * y * out[0]
    for k in range(2, d):
        out[k] = math.sqrt(2.0 / k) * y * out[k - 1] - math.sqrt(
            (k - 1) / k
        ) * out[k - 2]
    return out


def gue_level_density(e, d: int) -> np.ndarray | float:
    """Mean level density R1(E) of the d-dimensional GUE; integrates to d."""
    if d > GUE_DENSITY_MAX_DIM:
        raise DimensionError(
            f"GUE level density limited to d <= {GUE_DENSITY_MAX_DIM}, got {d}"
        )
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    arr = np.atleast_1d(np.asarray(e, dtype=float))
    r1 = np.sum(_hermite_functions(arr, d) ** 2, axis=0)
    return r1 if np.ndim(e) else float(r1[0])


def _require_gue_numeric(d: int):
    if d > GUE_NUMERIC_MAX_DIM:
        raise DimensionError(
            f"GUE numeric averages limited to d <= {GUE_NUMERIC_MAX_DIM}, got {d}"
        )


@lru_cache(maxsize=65536)
def _gue_h_numeric(t: float, d: int) -> complex:
    if t == 0.0:
        return 1.0 + 0.0j
    w = _gue_window(d)

    def integrand(e):
        return gue_level_density(e, d) * np.exp(-1j * e * t)

    return integrate(integrand, -w, w, rel_tol=1e-8, abs_tol=1e-10) / d


def gue_h(t: float, d: int, mode: EnsembleKind) -> complex:
    """Ensemble mean of f(t): Fourier transform of R1/d.

    GUE_NUMERIC integrates the Hermite-function density by quadrature;
    GUE_LARGE_D returns the large-d limit J1(2t)/t.
    """
    if mode == EnsembleKind.GUE_NUMERIC:
        _require_gue_numeric(d)
        return _gue_h_numeric(float(t), d)
    if mode == EnsembleKind.GUE_LARGE_D:
        return complex(bessel_j1_over_t(float(t)))
    raise ValueError(f"gue_h expects a GUE mode, got {mode}")


@lru_cache(maxsize=65536)
def _gue_f2_numeric(t: float, d: int) -> float:
    """Exact GUE <|f(t)|^2> from the determinantal two-point function."""
    if t == 0.0:
        return 1.0
    w = _gue_window(d)
    h = _gue_h_numeric(t, d)
    kernel_sq = 0.0
    for k in range(d):
        for l in range(k, d):

            def integrand(e, k=k, l=l):
                phi = _hermite_functions(e, d)
                return phi[k] * phi[l] * np.exp(-1j * e * t)

            g = integrate(integrand, -w, w, rel_tol=1e-8, abs_tol=1e-10)
            kernel_sq += (1.0 if k == l else 2.0) * abs(g) ** 2
    return 1.0 / d + abs(h) ** 2 - kernel_sq / d**2


def gue_form_factors(t: float, d: int, mode: EnsembleKind) -> AveragedFormFactors:
    """GUE averages of the spectral functions at time t.

    GUE_NUMERIC: |f|^2 exact via R2 = R1 R1 - |K|^2; the third- and
    fourth-order functions use the factorization through h(t) and <|f|^2>^2.
    GUE_LARGE_D: everything factorizes through h(t) = J1(2t)/t.
    """
    t = float(t)
    if mode == EnsembleKind.GUE_LARGE_D:
        if d < GUE_NUMERIC_MAX_DIM:
            warnings.warn(
                f"GUE large-d limit used at small dimension d = {d}",
                stacklevel=2,
            )
        h1 = bessel_j1_over_t(t)
        h2 = bessel_j1_over_t(2.0 * t)
        f2 = h1**2
        return AveragedFormFactors(
            f2=f2, f2_2t=h2**2, re_f2fc2t=h1**2 * h2, f4=f2**2,
            ensemble=mode, t=t, d=d,
        )
    if mode == EnsembleKind.GUE_NUMERIC:
        _require_gue_numeric(d)
        if t == 0.0:
            return AveragedFormFactors(
                f2=1.0, f2_2t=1.0, re_f2fc2t=1.0, f4=1.0,
                ensemble=mode, t=t, d=d,
            )
        h1 = _gue_h_numeric(t, d)
        h2 = _gue_h_numeric(2.0 * t, d)
        f2 = _gue_f2_numeric(t, d)
        return AveragedFormFactors(
            f2=f2,
            f2_2t=_gue_f2_numeric(2.0 * t, d),
            re_f2fc2t=float((h1 * h1 * h2.conjugate()).real),
            f4=f2**2,
            ensemble=mode, t=t, d=d,
        )
    raise ValueError(f"gue_form_factors expects a GUE mode, got {mode}")


def averaged_form_factors(ensemble: EnsembleKind, t: float, d: int) -> AveragedFormFactors:
    """Dispatch to the ensemble's averaged spectral functions."""
    if ensemble == EnsembleKind.POISSON:
        return poisson_form_factors(t, d)
    if ensemble in (EnsembleKind.GUE_NUMERIC, EnsembleKind.GUE_LARGE_D):
        return gue_form_factors(t, d, ensemble)
    raise ValueError(f"no time-dependent form factors for ensemble {ensemble}")


def averaged_time_coeffs(
    ensemble: EnsembleKind, t: float, dims: BipartiteDims
) -> TimeCoeffs:
    """Ensemble-averaged coefficients of the general time-dependent average."""
    return time_coeffs(averaged_form_factors(ensemble, t, dims.d), dims)


def sample_poisson_spectrum(d: int, rng) -> np.ndarray:
    """d i.i.d. levels, uniform on the spectral span [-2, 2]."""
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return gen.uniform(-2.0, 2.0, size=d)


def sample_gue_spectrum(d: int, rng) -> np.ndarray:
    """Eigenvalues of one GUE draw, ascending; span concentrates on [-2, 2]."""
    return np.linalg.eigvalsh(sample_gue_hamiltonians(d, 1, rng)[0])
