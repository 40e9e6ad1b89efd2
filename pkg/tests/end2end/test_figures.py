import numpy as np
import pytest

from fdstates.analytic import (
    fd_coherent_state,
    fd_squeezed_vacuum,
    three_level_amplitudes,
    two_level_amplitudes,
)
from fdstates.base import closed_form_deviation
from fdstates.dynamics import (
    KickSchedule,
    evolve_continuous,
    evolve_envelope,
    evolve_kicked,
    ode_oracle,
)
from fdstates.model import PARAMETRIC, DeltaTrain, KerrModel, PeriodicTabulated
from fdstates.operators import StateVector, probabilities


def kicked_infidelity(order, eps, period, n_pulses):
    model = KerrModel(order, 1.0, eps, envelope=DeltaTrain(period))
    result = evolve_kicked(
        model,
        StateVector.vacuum(model.dim),
        KickSchedule(period, n_pulses),
        lambda t: fd_coherent_state(-1j * eps * round(t / period), order - 1),
    )
    return 1 - result.fidelity_vs_target


class TestTwoPhotonRabi:
    def test_follows_closed_form(self, preset_scenario):
        scenario = preset_scenario("fig1")
        result = scenario.simulate()
        eps = scenario.model.eps
        expected = np.array([probabilities(two_level_amplitudes(eps * t)) for t in result.times])
        assert np.max(np.abs(result.probs[:, :2] - expected)) <= 2e-2

    def test_runs_within_a_second(self, preset_scenario, tmp_path):
        report = preset_scenario("fig1").run(str(tmp_path))
        assert report.wall_clock_seconds < 1.0

    def test_output_is_deterministic(self, preset_scenario, tmp_path):
        first, second = tmp_path / "first", tmp_path / "second"
        preset_scenario("fig1").run(str(first))
        preset_scenario("fig1").run(str(second))
        assert (first / "fig1.csv").read_bytes() == (second / "fig1.csv").read_bytes()


class TestThreePhotonDynamics:
    def test_follows_closed_form(self, preset_scenario):
        scenario = preset_scenario("fig2")
        result = scenario.simulate()
        eps = scenario.model.eps
        expected = np.array(
            [probabilities(three_level_amplitudes(eps, t)) for t in result.times]
        )
        assert np.max(np.abs(result.probs[:, :3] - expected)) <= 1e-2

    def test_middle_level_peak(self, preset_scenario):
        result = preset_scenario("fig2").simulate()
        assert result.peaks()[1] == pytest.approx(1 / 3, abs=0.02)

    def test_leakage_level_stays_small(self, preset_scenario):
        result = preset_scenario("fig3").simulate()
        assert 2.0e-3 <= result.peaks()[3] <= 3.3e-3


class TestKickedCoherentStates:
    @pytest.mark.parametrize("order, period", [(2, np.pi), (3, 1.0)])
    def test_fidelity(self, eps, order, period):
        assert np.max(kicked_infidelity(order, eps, period, 20)) <= 1e-2

    def test_preset(self, preset_scenario):
        result = preset_scenario("kicked").simulate()
        assert np.min(result.fidelity_vs_target[:21]) >= 0.99

    @pytest.mark.parametrize("order, period", [(2, np.pi), (3, 1.0)])
    def test_infidelity_scales_with_drive(self, eps, order, period):
        coarse = kicked_infidelity(order, eps, period, 20)[-1]
        fine = kicked_infidelity(order, eps / 2, period, 40)[-1]
        assert 2.5 <= coarse / fine <= 6


class TestDampedKickedRabi:
    def test_weak_damping(self, preset_scenario, tmp_path):
        report = preset_scenario("fig4").run(str(tmp_path))
        assert report.damping["peak_ratio"][1] >= 0.75

    def test_strong_damping(self, preset_scenario, tmp_path):
        report = preset_scenario("fig4_strong").run(str(tmp_path))
        assert report.damping["amplitude_ratio"][1] <= 0.35


class TestSqueezedStates:
    @pytest.mark.parametrize("s", [2, 4])
    def test_fd_squeezed_vacuum(self, eps, s):
        model = KerrModel(s + 1, 1.0, eps, dim=s + 4, drive=PARAMETRIC)
        duration = np.pi / 2 / eps
        result = evolve_continuous(
            model,
            StateVector.vacuum(model.dim),
            duration,
            201,
            lambda t: fd_squeezed_vacuum(-2j * eps * t, s),
        )
        assert np.min(result.fidelity_vs_target) >= 0.99
        assert np.max(result.probs[:, 1::2]) <= 1e-12

    def test_preset(self, preset_scenario):
        result = preset_scenario("squeezed").simulate()
        assert np.min(result.fidelity_vs_target) >= 0.99


class TestTruncation:
    def test_larger_space_agrees(self, eps):
        small = KerrModel(2, 1.0, eps, dim=5)
        large = small.with_dim(20)
        small_result = evolve_continuous(small, StateVector.vacuum(5), 100.0, 101)
        large_result = evolve_continuous(large, StateVector.vacuum(20), 100.0, 101)
        assert np.max(np.abs(small_result.probs - large_result.probs[:, :5])) <= 1e-5

    def test_agrees_with_ode(self, eps):
        model = KerrModel(3, 1.0, eps, dim=7)
        result = evolve_continuous(model, StateVector.vacuum(7), 40.0, 2)
        state, tail = ode_oracle(model, StateVector.vacuum(7), 40.0, 12)
        assert tail <= 1e-5
        np.testing.assert_allclose(probabilities(state), result.probs[-1], atol=1e-6)


class TestVerification:
    def test_deviation_scales_with_drive_squared(self, eps):
        coarse = closed_form_deviation(2, eps)
        fine = closed_form_deviation(2, eps / 2)
        assert 3 <= coarse / fine <= 5


class TestShapedEnvelope:
    @pytest.mark.parametrize(
        "samples", [[1.0, 1.6, 1.0, 0.4], [0.2, 1.0, 1.8, 1.0, 0.5, 1.5]]
    )
    def test_matches_constant_drive_at_equal_area(self, eps, samples):
        envelope = PeriodicTabulated(1.0, samples)
        shaped = KerrModel(2, 1.0, eps, dim=6, envelope=envelope)
        constant = KerrModel(2, 1.0, eps, dim=6)
        # one sample per period, where both drives have delivered the same area
        duration = 50.0
        shaped_result = evolve_envelope(shaped, StateVector.vacuum(6), duration, 51)
        constant_result = evolve_continuous(constant, StateVector.vacuum(6), duration, 51)
        assert np.max(np.abs(shaped_result.probs - constant_result.probs)) <= eps
        assert np.max(shaped_result.leakage(2)) <= 2e-2

    def test_preset(self, preset_scenario):
        result = preset_scenario("shaped").simulate()
        assert np.min(result.fidelity_vs_target) >= 0.95
