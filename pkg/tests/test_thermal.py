import math

import numpy as np
import pytest
from scipy.integrate import quad

from apsim.errors import QuadratureError
from apsim.thermal import (
    SpectrumCache,
    ThermalModel,
    boltzmann_pdf,
    broadened_spectrum,
    convolve,
    convolve_on_grid,
    sample_light_shift,
    truncated_mass,
)
from apsim.units import khz_to_rad_per_s


# ------------------------------------------------------------ model type

def test_model_validation():
    with pytest.raises(ValueError):
        ThermalModel(1.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        ThermalModel(-1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        ThermalModel(-1.0, 1.0, 1.5)
    # zero maximal shift is legal (shift support collapses onto zero)
    ThermalModel(0.0, 1.0, 0.5)


def test_model_json_round_trip(ref_thermal):
    d = ref_thermal.to_json_dict()
    assert d["delta_ls_max_khz"] == pytest.approx(-11.0)
    again = ThermalModel.from_json_dict(d)
    assert again == ref_thermal
    d["extra"] = 1
    with pytest.raises(ValueError):
        ThermalModel.from_json_dict(d)


# ------------------------------------------------------------ density

def test_pdf_zero_below_edge(ref_thermal):
    edge = ref_thermal.delta_ls_max
    assert boltzmann_pdf(edge - 1.0, ref_thermal) == 0.0
    assert boltzmann_pdf(edge, ref_thermal) == 0.0
    assert boltzmann_pdf(edge + ref_thermal.delta_th, ref_thermal) > 0.0


def test_pdf_normalized(ref_thermal):
    lo = ref_thermal.delta_ls_max
    hi = lo + 60.0 * ref_thermal.delta_th
    total, _ = quad(lambda d: boltzmann_pdf(d, ref_thermal), lo, hi, limit=200)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_pdf_mode_location(ref_thermal):
    # Gamma(3) mode sits two scale units above the edge
    mode = ref_thermal.delta_ls_max + 2.0 * ref_thermal.delta_th
    h = 1e-6 * ref_thermal.delta_th
    assert boltzmann_pdf(mode, ref_thermal) > boltzmann_pdf(mode - 50 * h, ref_thermal)
    assert boltzmann_pdf(mode, ref_thermal) > boltzmann_pdf(mode + 50 * h, ref_thermal)


def test_truncated_mass_closed_form(ref_thermal):
    r = -ref_thermal.delta_ls_max / ref_thermal.delta_th
    by_hand = 1.0 - math.exp(-r) * (1.0 + r + r * r / 2.0)
    assert truncated_mass(ref_thermal) == pytest.approx(by_hand, rel=1e-12)
    # wide support keeps almost everything
    assert truncated_mass(ThermalModel.from_khz(-100.0, 1.0, 0.5)) == pytest.approx(1.0)


# ------------------------------------------------------------ sampling

def test_sampling_deterministic(ref_thermal):
    a = sample_light_shift(ref_thermal, 7, 1000)
    b = sample_light_shift(ref_thermal, 7, 1000)
    np.testing.assert_array_equal(a, b)
    assert sample_light_shift(ref_thermal, 8, 1000)[0] != a[0]
    assert isinstance(sample_light_shift(ref_thermal, 7), float)


def test_sampling_statistics(ref_thermal):
    n = 200_000
    draws = sample_light_shift(ref_thermal, 123, n)
    assert np.all(draws >= ref_thermal.delta_ls_max)
    mean = ref_thermal.delta_ls_max + 3.0 * ref_thermal.delta_th
    se = math.sqrt(3.0) * ref_thermal.delta_th / math.sqrt(n)
    assert abs(np.mean(draws) - mean) < 4.0 * se


# ------------------------------------------------------------ convolution

def test_flat_spectrum_maps_to_truncated_mass(ref_thermal):
    flat = lambda d: 1.0  # noqa: E731
    raw = convolve(flat, ref_thermal)(0.0)
    assert raw == pytest.approx(ref_thermal.p_max * truncated_mass(ref_thermal), abs=1e-9)
    renorm = convolve(flat, ref_thermal, renormalize=True)(0.0)
    assert renorm == pytest.approx(ref_thermal.p_max, abs=1e-9)


def test_grid_rule_matches_adaptive(ref_cache, ref_thermal):
    deltas = khz_to_rad_per_s(np.array([-40.0, -30.0, -10.0, 0.0, 10.0, 30.0, 40.0]))
    adaptive = convolve(ref_cache, ref_thermal)(deltas)
    gridded = convolve_on_grid(ref_cache, deltas, ref_thermal)
    np.testing.assert_allclose(gridded, adaptive, atol=1e-5)


def test_monte_carlo_confirms_quadrature(ref_cache, ref_thermal):
    # draw physical shifts, keep only those inside the truncation window,
    # and average the bare spectrum; the quadrature must sit within the
    # Monte Carlo error bar
    n = 1_000_000
    shifts = sample_light_shift(ref_thermal, 2024, n)
    keep = shifts <= 0.0
    for delta_khz in (-30.0, 0.0, 40.0):
        delta = khz_to_rad_per_s(delta_khz)
        samples = np.where(keep, ref_cache(delta + shifts), 0.0)
        mc = ref_thermal.p_max * float(np.mean(samples))
        se = ref_thermal.p_max * float(np.std(samples)) / math.sqrt(n)
        quad_val = convolve(ref_cache, ref_thermal)(delta)
        assert abs(quad_val - mc) < 3.0 * se + 1e-6


def test_broadening_never_exceeds_bare_peak(ref_cache, ref_thermal):
    deltas = khz_to_rad_per_s(np.linspace(-60.0, 60.0, 41))
    out = convolve_on_grid(ref_cache, deltas, ref_thermal)
    assert np.all(out <= ref_thermal.p_max + 1e-12)
    assert np.all(out >= 0.0)


def test_renormalize_rescales_uniformly(ref_cache, ref_thermal):
    deltas = khz_to_rad_per_s(np.array([-20.0, 0.0, 20.0]))
    raw = convolve_on_grid(ref_cache, deltas, ref_thermal)
    renorm = convolve_on_grid(ref_cache, deltas, ref_thermal, renormalize=True)
    np.testing.assert_allclose(renorm, raw / truncated_mass(ref_thermal), rtol=1e-12)


def test_narrow_distribution_approaches_pure_shift(ref_cache):
    # delta_th -> 0 collapses the kernel onto the maximal shift; the
    # broadened curve tends to the bare one displaced by delta_ls_max
    probe = khz_to_rad_per_s(np.linspace(-45.0, 45.0, 31))

    def worst_error(th_khz):
        m = ThermalModel.from_khz(-11.0, th_khz, 0.95)
        conv = convolve_on_grid(ref_cache, probe, m, renormalize=True)
        shifted = m.p_max * ref_cache(probe + m.delta_ls_max)
        return float(np.max(np.abs(conv - shifted)))

    wide, narrow = worst_error(0.4), worst_error(0.05)
    assert narrow < wide
    assert narrow < 0.05


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_quadrature_failure_carries_estimate(ref_thermal):
    # hundreds of discontinuities exhaust the subdivision budget
    square = lambda d: float(np.sin(d / ref_thermal.delta_th * 500.0) > 0.0)  # noqa: E731
    with pytest.raises(QuadratureError) as err:
        convolve(square, ref_thermal)(0.0)
    assert math.isfinite(err.value.estimate)
    assert 0.0 < err.value.estimate < 1.0
    assert err.value.error_bound > 0.0


# ------------------------------------------------------------ cache

def test_cache_matches_direct_integration(ref_pulse, ref_cache):
    from apsim.bloch import detuning_spectrum

    probe = khz_to_rad_per_s(np.array([-37.3, -12.1, 0.55, 24.9, 41.7]))
    direct = detuning_spectrum(ref_pulse, probe)
    np.testing.assert_allclose(ref_cache(probe), direct, atol=1e-4)


def test_cache_clamps_outside_domain(ref_cache):
    below = ref_cache(ref_cache.lo - 1.0)
    above = ref_cache(ref_cache.hi + 1.0)
    assert below == pytest.approx(ref_cache(ref_cache.lo), abs=1e-12)
    assert above == pytest.approx(ref_cache(ref_cache.hi), abs=1e-12)


def test_cache_validation():
    with pytest.raises(ValueError):
        SpectrumCache([0.0, 1.0, 2.0], [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        SpectrumCache([0.0, 1.0, 1.0, 2.0], [0.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        SpectrumCache.from_pulse(None, 1.0, 0.0, 1.0)


def test_for_scan_covers_shifted_window(ref_pulse, ref_thermal):
    lo = khz_to_rad_per_s(-5.0)
    hi = khz_to_rad_per_s(5.0)
    cache = SpectrumCache.for_scan(ref_pulse, lo, hi, ref_thermal)
    assert cache.lo <= lo + ref_thermal.delta_ls_max + 1e-9
    assert cache.hi >= hi - 1e-9


# ------------------------------------------------------------ front end

def test_broadened_spectrum_methods_agree(ref_pulse, ref_thermal):
    deltas = khz_to_rad_per_s(np.array([-35.0, 0.0, 35.0]))
    a = broadened_spectrum(ref_pulse, ref_thermal, deltas, method="quad")
    b = broadened_spectrum(ref_pulse, ref_thermal, deltas, method="grid")
    np.testing.assert_allclose(a, b, atol=1e-5)
    with pytest.raises(ValueError):
        broadened_spectrum(ref_pulse, ref_thermal, deltas, method="fft")
