import warnings

import numpy as np
import pytest

from haarmoments.ensembles import (
    EnsembleKind,
    _gue_window,
    _j1_asymptotic,
    _j1_series,
    averaged_time_coeffs,
    bessel_j1,
    bessel_j1_over_t,
    gue_form_factors,
    gue_h,
    gue_level_density,
    poisson_form_factors,
    sample_gue_spectrum,
    sample_poisson_spectrum,
    sinc,
)
from haarmoments.ensembles import _gue_f2_numeric
from haarmoments.errors import DimensionError
from haarmoments.linalg import BipartiteDims, RngStream, sample_gue_hamiltonians
from haarmoments.quadrature import integrate

# high-precision reference values (Abramowitz & Stegun conventions)
J1_REFERENCE = [
    (0.5, 0.2422684576748739),
    (1.0, 0.4400505857449335),
    (2.0, 0.5767248077568734),
    (3.0, 0.3390589585259365),
    (5.0, -0.32757913759146523),
    (7.9, 0.2191793999217512),
    (8.0, 0.23463634685391463),
    (10.0, 0.04347274616886144),
    (13.5, 0.03804929208600142),
    (15.999, 0.09057768514822208),
    (16.0, 0.09039717566130419),
    (16.001, 0.09021658741463592),
    (20.0, 0.06683312417585005),
    (50.0, -0.09751182812517514),
    (100.0, -0.07714535201411216),
    (1000.0, 0.004728311907089524),
]


def test_bessel_j1_reference_values():
    for x, ref in J1_REFERENCE:
        assert abs(bessel_j1(x) - ref) <= 1e-10
        assert abs(bessel_j1(-x) + ref) <= 1e-10
    assert bessel_j1(0.0) == 0.0


def test_bessel_j1_small_argument_series():
    x = 1e-3
    assert bessel_j1(x) == pytest.approx(x / 2 - x**3 / 16, abs=1e-13)
    assert bessel_j1(x) == pytest.approx(4.999999375e-4, abs=1e-12)


def test_bessel_branch_continuity():
    assert abs(_j1_series(8.0) - _j1_asymptotic(8.0)) <= 1e-9
    assert abs(_j1_series(16.0) - _j1_asymptotic(16.0)) <= 1e-9


def test_bessel_first_zero_by_bisection():
    lo, hi = 3.0, 4.5
    assert bessel_j1(lo) > 0 > bessel_j1(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if bessel_j1(mid) > 0:
            lo = mid
        else:
            hi = mid
    assert 0.5 * (lo + hi) == pytest.approx(3.8317059702, abs=1e-3)


def test_bessel_j1_over_t_limit():
    assert bessel_j1_over_t(0.0) == 1.0
    assert bessel_j1_over_t(1e-9) == pytest.approx(1.0, abs=1e-9)


def test_poisson_form_factors_at_zero():
    for d in (2, 4, 7, 16):
        ff = poisson_form_factors(0.0, d)
        assert (ff.f2, ff.f2_2t, ff.re_f2fc2t, ff.f4) == (1.0, 1.0, 1.0, 1.0)


def test_poisson_f2_at_quarter_period():
    for d in (2, 5, 9):
        assert poisson_form_factors(np.pi / 2, d).f2 == pytest.approx(1 / d, abs=1e-15)


def test_poisson_f2_transcription():
    d = 7
    for t in np.linspace(0.001, 20, 1000):
        expected = 1 / d + (d - 1) / d * (np.sin(2 * t) / (2 * t)) ** 2
        assert poisson_form_factors(t, d).f2 == pytest.approx(expected, abs=1e-15)


def test_poisson_form_factors_against_sampled_spectra():
    n = 10_000
    gen = np.random.default_rng(404)
    for d in (4, 8):
        levels = gen.uniform(-2, 2, size=(n, d))
        for t in np.linspace(0.3, 6.0, 20):
            f = np.exp(-1j * levels * t).mean(axis=1)
            f2t = np.exp(-2j * levels * t).mean(axis=1)
            ff = poisson_form_factors(t, d)
            samples = {
                "f2": (np.abs(f) ** 2, ff.f2),
                "f2_2t": (np.abs(f2t) ** 2, ff.f2_2t),
                "re": ((f * f * np.conj(f2t)).real, ff.re_f2fc2t),
                "f4": (np.abs(f) ** 4, ff.f4),
            }
            for name, (vals, ana) in samples.items():
                se = vals.std(ddof=1) / np.sqrt(n)
                assert abs(vals.mean() - ana) <= 5 * se, (d, t, name)


def test_poisson_bounds_invariants():
    for d in (2, 8):
        for t in np.linspace(0, 30, 100):
            ff = poisson_form_factors(t, d)
            assert 0.0 <= ff.f2 <= 1.0
            assert 0.0 <= ff.f4 <= 1.0


def test_gue_level_density_normalization():
    d = 4
    w = _gue_window(d)
    val = integrate(lambda e: gue_level_density(e, d), -w, w, rel_tol=1e-10)
    assert abs(val.real - d) <= 1e-8


def test_gue_level_density_values():
    assert gue_level_density(0.0, 1) == pytest.approx(1 / np.sqrt(2 * np.pi), rel=1e-12)
    assert gue_level_density(0.0, 64) / 64 == pytest.approx(1 / np.pi, rel=0.03)


def test_gue_level_density_dim_guard():
    with pytest.raises(DimensionError):
        gue_level_density(0.0, 65)


def test_gue_h_normalization_and_modes():
    assert gue_h(0.0, 8, EnsembleKind.GUE_NUMERIC) == 1.0
    assert gue_h(0.0, 8, EnsembleKind.GUE_LARGE_D) == 1.0
    with pytest.raises(DimensionError):
        gue_h(1.0, 17, EnsembleKind.GUE_NUMERIC)
    with pytest.raises(ValueError):
        gue_h(1.0, 4, EnsembleKind.POISSON)


def test_gue_h_large_d_zero_at_first_bessel_root():
    t_zero = 3.8317059702 / 2
    assert abs(gue_h(t_zero, 64, EnsembleKind.GUE_LARGE_D).real) < 1e-6


def test_gue_h_numeric_close_to_large_d():
    diffs = [
        abs(
            gue_h(t, 16, EnsembleKind.GUE_NUMERIC).real
            - gue_h(t, 16, EnsembleKind.GUE_LARGE_D).real
        )
        for t in np.linspace(0, 6, 25)
    ]
    assert max(diffs) <= 0.05


def test_gue_form_factors_at_zero():
    for mode in (EnsembleKind.GUE_NUMERIC, EnsembleKind.GUE_LARGE_D):
        ff = gue_form_factors(0.0, 16, mode)
        assert (ff.f2, ff.f2_2t, ff.re_f2fc2t, ff.f4) == (1.0, 1.0, 1.0, 1.0)


def test_gue_large_d_long_time_decay():
    ff = gue_form_factors(50.0, 64, EnsembleKind.GUE_LARGE_D)
    assert ff.f2 <= 1e-4


def test_gue_large_d_warns_below_16():
    with pytest.warns(UserWarning):
        gue_form_factors(1.0, 4, EnsembleKind.GUE_LARGE_D)


def test_gue_numeric_f2_in_range():
    for t in (0.5, 1.0, 3.0):
        f2 = _gue_f2_numeric(t, 4)
        assert -1e-8 <= f2 <= 1.0 + 1e-8


def test_long_time_plateau():
    # mean |f|^2 over t in [50, 100] sits on the 1/d plateau
    grid = np.linspace(50, 100, 26)
    for d, mean_f2 in (
        (4, np.mean([poisson_form_factors(t, 4).f2 for t in grid])),
        (8, np.mean([poisson_form_factors(t, 8).f2 for t in grid])),
        (4, np.mean([_gue_f2_numeric(t, 4) for t in grid])),
    ):
        assert 0.5 / d <= mean_f2 <= 2.0 / d


def test_sample_poisson_spectrum_stats():
    rng = RngStream(31)
    levels = np.concatenate(
        [sample_poisson_spectrum(8, RngStream(31, i)) for i in range(12_500)]
    )
    assert levels.min() >= -2.0 and levels.max() <= 2.0
    se = levels.std(ddof=1) / np.sqrt(levels.size)
    assert abs(levels.mean()) <= 5 * se


def test_sample_poisson_f2_matches_closed_form():
    d, n, t = 8, 10_000, 1.0
    vals = np.empty(n)
    for i in range(n // 2500):
        gen = RngStream(32, i).generator()
        levels = gen.uniform(-2, 2, size=(2500, d))
        vals[i * 2500 : (i + 1) * 2500] = (
            np.abs(np.exp(-1j * levels * t).mean(axis=1)) ** 2
        )
    se = vals.std(ddof=1) / np.sqrt(n)
    assert abs(vals.mean() - poisson_form_factors(t, d).f2) <= 5 * se


def test_sample_gue_spectrum_sorted_and_scaled():
    spec = sample_gue_spectrum(16, RngStream(33))
    assert np.all(np.diff(spec) >= 0)
    means = []
    for i in range(500):
        s = sample_gue_spectrum(16, RngStream(34, i))
        means.append(np.sum(s**2) / 16)
    means = np.array(means)
    se = means.std(ddof=1) / np.sqrt(len(means))
    assert abs(means.mean() - 1.0) <= 5 * se


def test_gue_level_repulsion_at_d2():
    n = 100_000
    gen = np.random.default_rng(35)
    gue = np.linalg.eigvalsh(sample_gue_hamiltonians(2, n, gen))
    s_gue = gue[:, 1] - gue[:, 0]
    poi = np.sort(gen.uniform(-2, 2, size=(n, 2)), axis=1)
    s_poi = poi[:, 1] - poi[:, 0]
    frac_gue = np.mean(s_gue < 0.05 * s_gue.mean())
    frac_poi = np.mean(s_poi < 0.05 * s_poi.mean())
    assert frac_gue < frac_poi


def test_averaged_time_coeffs_at_zero():
    dims = BipartiteDims(2, 8)
    for kind in (EnsembleKind.POISSON, EnsembleKind.GUE_LARGE_D):
        c = averaged_time_coeffs(kind, 0.0, dims)
        assert (c.ct1, c.ct2, c.ct4) == (0.0, 0.0, 0.0)
        assert c.ct3 == 1.0


def test_averaged_time_coeffs_rejects_uniform():
    with pytest.raises(ValueError):
        averaged_time_coeffs(EnsembleKind.UNIFORM, 1.0, BipartiteDims(2, 2))


def test_ensemble_kind_names():
    assert EnsembleKind.from_name("poi") is EnsembleKind.POISSON
    assert EnsembleKind.from_name("gue-large-d") is EnsembleKind.GUE_LARGE_D
    with pytest.raises(ValueError):
        EnsembleKind.from_name("goe")


def test_sinc_limit():
    assert sinc(0.0) == 1.0
    assert sinc(np.pi) == pytest.approx(0.0, abs=1e-16)
