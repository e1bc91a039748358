import math

import numpy as np
import pytest

from qsensekit import radiometry as rad
from qsensekit.constants import BOLTZMANN as K_B, PLANCK as H


class TestModeCount:
    def test_tem_line_is_single_mode(self):
        assert rad.mode_count(rad.EtendueSpec.tem_line()) == 1.0

    def test_cone_with_unit_throughput(self):
        # A * pi * sin(theta)^2 = lambda^2  ->  exactly one mode
        lam = 1e-3
        theta = math.pi / 6.0
        area = lam ** 2 / (math.pi * math.sin(theta) ** 2)
        spec = rad.EtendueSpec.cone(area, lam, theta)
        assert rad.mode_count(spec) == pytest.approx(1.0, rel=1e-12)

    def test_half_space_square_centimetre_at_one_millimetre(self):
        spec = rad.EtendueSpec.half_space(1e-4, 1e-3)
        assert rad.mode_count(spec) == pytest.approx(100.0 * math.pi, rel=1e-12)

    def test_full_cone_equals_half_space(self):
        cone = rad.EtendueSpec.cone(2e-4, 1.3e-3, math.pi / 2.0)
        half = rad.EtendueSpec.half_space(2e-4, 1.3e-3)
        assert rad.mode_count(cone) == pytest.approx(rad.mode_count(half), rel=1e-12)

    def test_polarization_doubling(self):
        single = rad.EtendueSpec.half_space(1e-4, 1e-3)
        double = rad.EtendueSpec.half_space(1e-4, 1e-3, polarizations=2)
        assert rad.mode_count(double) == 2.0 * rad.mode_count(single)

    @pytest.mark.parametrize("kwargs", [
        dict(geometry=rad.Geometry.HALF_SPACE, area=-1.0),
        dict(geometry=rad.Geometry.HALF_SPACE, wavelength=0.0),
        dict(geometry=rad.Geometry.CONE, theta_max=0.0),
        dict(geometry=rad.Geometry.CONE, theta_max=2.0),
        dict(geometry=rad.Geometry.CONE),
        dict(geometry=rad.Geometry.TEM_LINE, theta_max=0.3),
        dict(geometry=rad.Geometry.HALF_SPACE, polarizations=3),
    ])
    def test_invalid_specs_rejected(self, kwargs):
        with pytest.raises(ValueError):
            rad.EtendueSpec(**kwargs)


class TestOccupancy:
    def test_unity_at_log_two_point(self):
        nu = 1e9
        temp = H * nu / (K_B * math.log(2.0))
        assert rad.occupancy(nu, temp) == pytest.approx(1.0, rel=1e-12)

    def test_zero_temperature_gives_exact_zero(self):
        assert rad.occupancy(1e9, 0.0) == 0.0
        assert np.all(rad.occupancy(np.array([1e6, 1e12]), 0.0) == 0.0)

    def test_five_gigahertz_near_gap_temperature(self):
        x = H * 5e9 / (K_B * 0.240)
        expected = 1.0 / math.expm1(x)
        got = rad.occupancy(5e9, 0.240)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(0.58198, rel=5e-4)

    def test_monotonic_in_frequency_and_temperature(self):
        nus = np.geomspace(1e8, 1e13, 60)
        occ = rad.occupancy(nus, 1.0)
        assert np.all(np.diff(occ) < 0.0)
        temps = np.linspace(0.01, 10.0, 40)
        occ_t = np.array([rad.occupancy(5e9, t) for t in temps])
        assert np.all(np.diff(occ_t) > 0.0)

    def test_rayleigh_jeans_limit(self):
        temp = 4.0
        nu = 1e5
        assert H * nu * rad.occupancy(nu, temp) == pytest.approx(K_B * temp, rel=1e-8)

    def test_no_overflow_at_extreme_arguments(self):
        assert rad.occupancy(1e13, 1e-6) == 0.0

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            rad.occupancy(0.0, 1.0)
        with pytest.raises(ValueError):
            rad.occupancy(1e9, -1.0)


class TestThermalPower:
    def test_zero_temperature(self):
        src = rad.ThermalSource(0.0, rad.EtendueSpec.tem_line())
        assert rad.thermal_power(src, rad.SpectralBand(1e8, 2e8)) == 0.0

    def test_rayleigh_jeans_narrow_band(self):
        temp = 10.0
        src = rad.ThermalSource(temp, rad.EtendueSpec.tem_line())
        band = rad.SpectralBand(100e6, 101e6)
        power = rad.thermal_power(src, band)
        assert power == pytest.approx(K_B * temp * band.width, rel=1e-3)

    def test_against_independent_trapezoid(self):
        temp = 0.010
        src = rad.ThermalSource(temp, rad.EtendueSpec.tem_line())
        band = rad.SpectralBand(100e6, 200e6)
        power = rad.thermal_power(src, band)
        nus = np.linspace(band.nu_lo, band.nu_hi, 10001)
        expected = np.trapezoid(H * nus * rad.occupancy(nus, temp), nus)
        assert power == pytest.approx(expected, rel=1e-9)

    def test_linear_in_mode_count(self):
        band = rad.SpectralBand(1e9, 2e9)
        p1 = rad.thermal_power(
            rad.ThermalSource(0.1, rad.EtendueSpec.half_space(1e-4, 1e-3)), band)
        p2 = rad.thermal_power(
            rad.ThermalSource(0.1, rad.EtendueSpec.half_space(3e-4, 1e-3)), band)
        assert p2 == pytest.approx(3.0 * p1, rel=1e-12)

    def test_quadrature_halving_converged(self):
        temp = 1.3

        def integrand(nu):
            return H * nu * rad.occupancy(nu, temp)

        coarse = rad.gauss_legendre_integral(integrand, 1e8, 1e12, 256, 5)
        fine = rad.gauss_legendre_integral(integrand, 1e8, 1e12, 512, 5)
        assert abs(fine - coarse) < 1e-9 * abs(fine)

    def test_nonconvergent_integral_reported(self):
        with pytest.raises(rad.QuadratureError):
            rad.adaptive_integral(lambda x: np.cos(1e4 * x), 1.0, 2.0,
                                  rtol=1e-12, initial_order=8, max_order=16)


class TestPowerFluctuation:
    def test_zero_temperature(self):
        src = rad.ThermalSource(0.0, rad.EtendueSpec.tem_line())
        fluct = rad.power_fluctuation(src, rad.SpectralBand(1e8, 2e8),
                                      rad.IntegrationSpec(1.0))
        assert fluct.classical == 0.0 and fluct.quantum == 0.0 and fluct.total == 0.0

    def test_reduces_to_radiometer_equation(self):
        # Rayleigh-Jeans single mode: dT = T/sqrt(B tau) from the power variance
        temp, tau = 10.0, 1.0
        src = rad.ThermalSource(temp, rad.EtendueSpec.tem_line())
        band = rad.SpectralBand(1.0e9, 1.01e9)
        fluct = rad.power_fluctuation(src, band, rad.IntegrationSpec(tau))
        delta_t = math.sqrt(fluct.total) / (K_B * band.width)
        assert delta_t == pytest.approx(
            rad.radiometer_resolution(temp, band.width, tau), rel=1e-5)

    def test_classical_quantum_ratio_is_occupancy(self):
        # narrow band held at occupancy 2: classical/quantum = n
        nbar = 2.0
        nu0 = 5e9
        temp = H * nu0 / (K_B * math.log(1.0 + 1.0 / nbar))
        src = rad.ThermalSource(temp, rad.EtendueSpec.tem_line())
        band = rad.SpectralBand(nu0 * (1 - 5e-6), nu0 * (1 + 5e-6))
        fluct = rad.power_fluctuation(src, band, rad.IntegrationSpec(1.0))
        assert fluct.classical / fluct.quantum == pytest.approx(nbar, rel=1e-6)

    def test_terms_equal_at_crossover_frequency(self):
        temp = 0.010
        nu_star = rad.crossover_frequency(temp)
        band = rad.SpectralBand(nu_star * (1 - 5e-6), nu_star * (1 + 5e-6))
        src = rad.ThermalSource(temp, rad.EtendueSpec.tem_line())
        fluct = rad.power_fluctuation(src, band, rad.IntegrationSpec(1.0))
        assert fluct.classical == pytest.approx(fluct.quantum, rel=1e-6)

    def test_both_terms_linear_in_mode_count(self):
        band = rad.SpectralBand(1e9, 1.5e9)
        integ = rad.IntegrationSpec(0.5)
        one = rad.power_fluctuation(
            rad.ThermalSource(0.2, rad.EtendueSpec.half_space(1e-4, 1e-3)), band, integ)
        four = rad.power_fluctuation(
            rad.ThermalSource(0.2, rad.EtendueSpec.half_space(4e-4, 1e-3)), band, integ)
        assert four.classical == pytest.approx(4.0 * one.classical, rel=1e-10)
        assert four.quantum == pytest.approx(4.0 * one.quantum, rel=1e-10)
        # at fixed spectral power the classical term therefore scales as 1/N
        p_one = rad.thermal_power(
            rad.ThermalSource(0.2, rad.EtendueSpec.half_space(1e-4, 1e-3)), band)
        p_four = rad.thermal_power(
            rad.ThermalSource(0.2, rad.EtendueSpec.half_space(4e-4, 1e-3)), band)
        assert (four.classical / p_four ** 2) == pytest.approx(
            0.25 * one.classical / p_one ** 2, rel=1e-10)


class TestRadiometerResolution:
    def test_hand_value(self):
        expected = 100.0 / math.sqrt(1e9 * 1.0)
        got = rad.radiometer_resolution(100.0, 1e9, 1.0)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(3.162e-3, rel=1e-3)

    def test_unit_bandwidth_time_product(self):
        assert rad.radiometer_resolution(7.5, 10.0, 0.1) == pytest.approx(7.5, rel=1e-12)

    def test_quadrupled_time_halves_resolution(self):
        base = rad.radiometer_resolution(5.0, 1e6, 2.0)
        assert rad.radiometer_resolution(5.0, 1e6, 8.0) == pytest.approx(
            0.5 * base, rel=1e-12)

    def test_invalid(self):
        with pytest.raises(ValueError):
            rad.radiometer_resolution(0.0, 1e9, 1.0)


class TestCrossoverFrequency:
    def test_ten_millikelvin(self):
        expected = K_B * 0.010 * math.log(2.0) / H
        got = rad.crossover_frequency(0.010)
        assert got == expected
        assert got == pytest.approx(144.4e6, rel=1e-3)

    def test_scales_linearly(self):
        assert rad.crossover_frequency(0.020) == pytest.approx(
            2.0 * rad.crossover_frequency(0.010), rel=1e-12)

    def test_one_kelvin(self):
        assert rad.crossover_frequency(1.0) == pytest.approx(14.44e9, rel=1e-3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            rad.crossover_frequency(0.0)


class TestBandValidation:
    def test_bad_bands(self):
        with pytest.raises(ValueError):
            rad.SpectralBand(0.0, 1e9)
        with pytest.raises(ValueError):
            rad.SpectralBand(2e9, 1e9)
        with pytest.raises(ValueError):
            rad.SpectralBand(1e9, 2e9, n_quadrature_points=1)

    def test_bad_integration(self):
        with pytest.raises(ValueError):
            rad.IntegrationSpec(0.0)

    def test_bad_source(self):
        with pytest.raises(ValueError):
            rad.ThermalSource(-0.1, rad.EtendueSpec.tem_line())
