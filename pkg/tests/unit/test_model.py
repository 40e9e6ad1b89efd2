import logging

import numpy as np
import pytest
from scipy.integrate import quad

from fdstates.errors import (
    InvalidDimensionError,
    MissingPeriodError,
    ResonanceError,
    UnsupportedEnvelopeError,
)
from fdstates.model import (
    LINEAR,
    PARAMETRIC,
    ConstantEnvelope,
    DeltaTrain,
    KerrModel,
    PeriodicTabulated,
    b_coefficient,
    b_parameter,
    check_model_dim,
    drive_hamiltonian,
    fourier_coefficient,
    kerr_hamiltonian,
    pulse_area,
)


@pytest.fixture
def triangle():
    return PeriodicTabulated(4.0, [0.0, 1.0, 0.0, -1.0])


class TestKerrHamiltonian:
    def test_two_photon(self):
        np.testing.assert_allclose(np.diag(kerr_hamiltonian(2, 1.0, 4).m), [0, 0, 1, 3])

    def test_three_photon(self):
        np.testing.assert_allclose(
            np.diag(kerr_hamiltonian(3, 1.0, 5).m), [0, 0, 0, 2, 8]
        )

    def test_degenerate_manifold(self):
        energies = np.diag(kerr_hamiltonian(4, 0.7, 8).m).real
        np.testing.assert_array_equal(energies[:4], 0.0)
        assert np.all(energies[4:] > 0)

    def test_is_hermitian(self):
        assert kerr_hamiltonian(2, 1.0, 3).hermitian

    @pytest.mark.parametrize(
        "order, dim", [(1, 4), (2, 6), (3, 7), (4, 9), (5, 3), (3, 3), (6, 1)]
    )
    def test_zero_energy_levels(self, order, dim):
        energies = np.diag(kerr_hamiltonian(order, 1.3, dim).m).real
        assert np.count_nonzero(energies == 0.0) == min(order, dim)


class TestDriveHamiltonian:
    def test_linear_two_levels(self):
        np.testing.assert_allclose(drive_hamiltonian(LINEAR, 0.1, 2).m, [[0, 0.1], [0.1, 0]])

    def test_parametric_couples_even_levels(self):
        m = drive_hamiltonian(PARAMETRIC, 1.0, 4).m
        assert m[2, 0] == pytest.approx(np.sqrt(2))
        assert m[3, 1] == pytest.approx(np.sqrt(6))
        assert m[1, 0] == 0

    @pytest.mark.parametrize("eps", [0.0, 0.05, 1.0, 7.5])
    def test_parametric_two_levels_is_zero(self, eps):
        drive = drive_hamiltonian(PARAMETRIC, eps, 2)
        np.testing.assert_array_equal(drive.m, np.zeros((2, 2)))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            drive_hamiltonian("cubic", 1.0, 3)


class TestEnvelopes:
    def test_constant_pulse_area(self):
        assert pulse_area(ConstantEnvelope(), 0.1, 3.0) == pytest.approx(0.3)

    def test_negative_time(self):
        assert pulse_area(DeltaTrain(1.0), 0.1, -0.5) == 0.0
        assert pulse_area(ConstantEnvelope(), 0.1, -0.5) == 0.0

    def test_delta_train_counts_first_pulse(self):
        assert pulse_area(DeltaTrain(np.pi), 0.1, 3.5 * np.pi) == pytest.approx(0.4)
        assert pulse_area(DeltaTrain(np.pi), 0.1, 0.0) == pytest.approx(0.1)

    def test_delta_train_on_pulse_boundary(self):
        assert DeltaTrain(np.pi).pulse_count(3 * np.pi) == 4

    def test_invalid_period(self):
        with pytest.raises(MissingPeriodError):
            DeltaTrain(0.0)

    def test_tabulated_needs_two_samples(self):
        with pytest.raises(UnsupportedEnvelopeError):
            PeriodicTabulated(1.0, [1.0])

    @pytest.mark.parametrize(
        "t, expected", [(1.0, 0.5), (1.5, 0.875), (2.0, 1.0), (4.0, 0.0), (5.0, 0.5)]
    )
    def test_tabulated_integral(self, triangle, t, expected):
        assert triangle.integral(t) == pytest.approx(expected, abs=1e-14)

    def test_constant_value(self):
        assert ConstantEnvelope().value(12.3) == 1.0

    @pytest.mark.parametrize(
        "t, expected",
        [(0.0, 0.0), (0.5, 0.5), (1.0, 1.0), (2.5, -0.5), (3.5, -0.5), (5.0, 1.0)],
    )
    def test_tabulated_value(self, triangle, t, expected):
        assert triangle.value(t) == pytest.approx(expected, abs=1e-14)

    def test_delta_train_has_no_value(self):
        assert not hasattr(DeltaTrain(1.0), "value")

    def test_equality(self):
        assert DeltaTrain(1.0) == DeltaTrain(1.0)
        assert DeltaTrain(1.0) != ConstantEnvelope(1.0)
        assert PeriodicTabulated(1.0, [1, 2]) == PeriodicTabulated(1.0, [1.0, 2.0])


class TestFourierCoefficient:
    def test_constant(self):
        assert fourier_coefficient(ConstantEnvelope(), 0, period=2.0) == 2.0
        assert fourier_coefficient(ConstantEnvelope(2.0), 3) == 0.0

    def test_constant_without_period(self):
        with pytest.raises(MissingPeriodError):
            fourier_coefficient(ConstantEnvelope(), 0)

    @pytest.mark.parametrize("n", [-7, 0, 1, 100])
    def test_delta_train(self, n):
        assert fourier_coefficient(DeltaTrain(1.0), n) == 1.0

    def test_tabulated_constant_samples(self):
        envelope = PeriodicTabulated(2.0, [1.0, 1.0, 1.0, 1.0])
        assert fourier_coefficient(envelope, 0) == pytest.approx(2.0)
        assert abs(fourier_coefficient(envelope, 4)) < 1e-14
        assert abs(fourier_coefficient(envelope, 1)) < 1e-14

    @pytest.mark.parametrize("n", [-3, -1, 0, 1, 2, 5])
    def test_tabulated_matches_quadrature(self, n):
        samples = np.array([0.3, 1.0, -0.4, 0.8, 0.1])
        period = 2.5
        envelope = PeriodicTabulated(period, samples)
        nodes = np.linspace(0, period, samples.shape[0] + 1)
        closed = np.append(samples, samples[0])

        def f(t):
            return np.interp(t, nodes, closed)

        real = quad(lambda t: f(t) * np.cos(2 * np.pi * n * t / period), 0, period,
                    points=nodes[1:-1], epsabs=1e-13, limit=200)[0]
        imag = quad(lambda t: -f(t) * np.sin(2 * np.pi * n * t / period), 0, period,
                    points=nodes[1:-1], epsabs=1e-13, limit=200)[0]
        assert fourier_coefficient(envelope, n) == pytest.approx(real + 1j * imag, abs=1e-9)


    @pytest.mark.parametrize("n", range(1, 8))
    def test_tabulated_conjugate_symmetry(self, n):
        envelope = PeriodicTabulated(1.7, [0.3, 1.0, -0.4, 0.8, 0.1, 2.2])
        assert fourier_coefficient(envelope, -n) == pytest.approx(
            np.conj(fourier_coefficient(envelope, n)), abs=1e-14
        )


class TestBCoefficient:
    def test_b_parameter(self):
        assert b_parameter(3, 1.0, 2 * np.pi) == pytest.approx(2.0)

    @pytest.mark.parametrize("order, expected", [(2, 1.0), (3, 0.5), (4, 1 / 6)])
    def test_constant(self, order, expected):
        assert b_coefficient(ConstantEnvelope(), order, 1.0, period=0.3) == pytest.approx(
            expected
        )

    def test_constant_at_integer_a(self):
        assert b_coefficient(ConstantEnvelope(), 2, 1.0, period=2 * np.pi) == pytest.approx(1.0)

    def test_delta_train_half_integer(self):
        assert abs(b_coefficient(DeltaTrain(np.pi), 2, 1.0)) < 1e-12

    def test_delta_train_resonance(self):
        with pytest.raises(ResonanceError):
            b_coefficient(DeltaTrain(2 * np.pi), 2, 1.0)

    def test_delta_train_matches_partial_sums(self):
        period = 0.3
        a = b_parameter(2, 1.0, period)
        cutoff = 200000
        n = np.arange(1, cutoff + 1, dtype=float)
        paired = 1 / a + np.sum(2 * a / (a ** 2 - n ** 2)) - 2 * a / (cutoff + 0.5)
        assert b_coefficient(DeltaTrain(period), 2, 1.0) == pytest.approx(
            paired / (2 * np.pi), abs=1e-10
        )

    def test_tabulated_constant_samples_match_constant_envelope(self):
        envelope = PeriodicTabulated(0.3, [1.0, 1.0, 1.0])
        assert b_coefficient(envelope, 2, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_tabulated_matches_direct_sum(self):
        envelope = PeriodicTabulated(0.7, [1.0, 2.0, 0.5, 1.5])
        a = b_parameter(2, 1.0, 0.7)
        ns = np.arange(-(2 ** 20), 2 ** 20 + 1)
        direct = np.sum(envelope.fourier_array(ns) / (ns + a)) / (2 * np.pi)
        assert b_coefficient(envelope, 2, 1.0) == pytest.approx(direct, abs=1e-9)

    def test_tabulated_resonance(self):
        envelope = PeriodicTabulated(2 * np.pi, [1.0, 2.0, 0.5, 1.5])
        with pytest.raises(ResonanceError):
            b_coefficient(envelope, 2, 1.0)

    def test_missing_period(self):
        with pytest.raises(MissingPeriodError):
            b_coefficient(ConstantEnvelope(), 2, 1.0)


class TestKerrModel:
    def test_default_dim(self):
        assert KerrModel(3, 1.0, 0.05).dim == 6

    def test_hamiltonian(self):
        model = KerrModel(2, 1.0, 0.1, dim=4)
        np.testing.assert_allclose(
            model.hamiltonian().m, model.kerr().m + model.drive_operator().m
        )
        assert model.hamiltonian().hermitian

    @pytest.mark.parametrize(
        "kwargs", [{"chi": 0.0}, {"chi": -1.0}, {"eps": -0.1}, {"drive": "cubic"}]
    )
    def test_invalid_parameters(self, kwargs):
        params = {"order": 2, "chi": 1.0, "eps": 0.1}
        params.update(kwargs)
        with pytest.raises(ValueError):
            KerrModel(**params)

    def test_invalid_dim(self):
        with pytest.raises(InvalidDimensionError):
            KerrModel(2, 1.0, 0.1, dim=0)

    def test_weak_drive(self):
        assert KerrModel(2, 1.0, 0.2).weak_drive
        assert not KerrModel(2, 1.0, 0.5).weak_drive

    def test_strong_drive_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="fdstates.model"):
            KerrModel(2, 1.0, 0.5)
        assert "perturbative" in caplog.text

    def test_headroom_warning(self, caplog):
        with caplog.at_level(logging.WARNING, logger="fdstates.model"):
            KerrModel(3, 1.0, 0.05, dim=4)
        assert "leakage level" in caplog.text

    def test_with_dim(self):
        model = KerrModel(2, 1.0, 0.1, envelope=DeltaTrain(np.pi)).with_dim(10)
        assert model.dim == 10
        assert model.envelope == DeltaTrain(np.pi)

    def test_check_model_dim(self, rabi_model):
        check_model_dim(rabi_model, 6)
        with pytest.raises(InvalidDimensionError):
            check_model_dim(rabi_model, 5)
