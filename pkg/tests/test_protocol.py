import math

import numpy as np
import pytest

from spinsense import metrology, protocol, states
from spinsense.dephasing import DephasingModel
from spinsense.errors import SelectivityWarning, ValidationError


class TestIdealPreparation:
    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16, 32, 64])
    def test_exact_cat_fidelity(self, n):
        prep = protocol.prepare_cat(n, 1.0, mode="ideal_gate")
        assert prep.fidelity >= 1 - 1e-10

    def test_complex_label(self):
        prep = protocol.prepare_cat(12, 0.8 + 1.1j, mode="ideal_gate")
        assert prep.fidelity >= 1 - 1e-10

    def test_first_step_is_control_superposition(self):
        n = 5
        steps = protocol.ideal_preparation_steps(n, 1.0)
        dim = n + 1
        expected = np.zeros(2 * dim, dtype=complex)
        expected[0] = expected[dim] = 1 / math.sqrt(2)
        assert np.max(np.abs(steps[0].amplitudes - expected)) <= 1e-12

    def test_second_step_entangles_branches(self):
        n = 4
        steps = protocol.ideal_preparation_steps(n, 1.0)
        coh = states.spin_coherent(1.0, n).amplitudes
        assert np.allclose(steps[1].memory_block(0), coh / math.sqrt(2))
        ground = np.zeros(n + 1)
        ground[0] = 1
        assert np.allclose(steps[1].memory_block(1), ground / math.sqrt(2))

    def test_final_state_in_control_ground(self):
        prep = protocol.prepare_cat(6, 1.0, mode="ideal_gate")
        assert np.linalg.norm(prep.state.memory_block(1)) <= 1e-12

    def test_pulse_frequencies(self):
        sys = protocol.SystemParams()
        prep = protocol.prepare_cat(7, 1.0, mode="ideal_gate", system=sys)
        freqs = [p.frequency for p in prep.pulses]
        assert freqs[0] == sys.omega_c - sys.g1 * 7
        assert freqs[1] == sys.omega_m - sys.g1
        assert freqs[2] == sys.omega_c - sys.g1 * 7

    def test_rejects_zero_label(self):
        with pytest.raises(ValidationError):
            protocol.prepare_cat(4, 0.0)

    def test_pulse_angle_bounds(self):
        with pytest.raises(ValidationError):
            protocol.PulseSpec("control", 1.0, 0.0, 0.0, "ideal_gate")
        with pytest.raises(ValidationError):
            protocol.PulseSpec("control", 1.0, 3 * math.pi, 0.0, "ideal_gate")


class TestIdealReadout:
    def test_balanced_at_zero_field_all_n(self):
        for n in range(1, 65):
            prep = protocol.prepare_cat(n, 1.0, mode="ideal_gate")
            p = protocol.readout_phase(prep.state, 0.0, 0.4, DephasingModel.none())
            assert abs(p - 0.5) <= 1e-12, n

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_matches_closed_form(self, n):
        z = 1.2 - 0.4j
        model = DephasingModel.gaussian(0.45)
        prep = protocol.prepare_cat(n, z, mode="ideal_gate")
        p_protocol = protocol.readout_phase(prep.state, 0.3, 1.0, model)
        p_closed = metrology.cat_readout_probability(z, n, 0.3, 1.0, model)
        assert abs(p_protocol - p_closed) <= 1e-9

    def test_linear_regime_slope(self):
        n, z, t = 16, 1.0, 0.05
        prep = protocol.prepare_cat(n, z, mode="ideal_gate")
        h = 1e-5
        model = DephasingModel.none()
        slope = (
            protocol.readout_phase(prep.state, +h, t, model)
            - protocol.readout_phase(prep.state, -h, t, model)
        ) / (2 * h)
        expected = -0.5 * (abs(z) ** 2 / (1 + abs(z) ** 2)) * n * t
        assert abs(slope / expected - 1.0) <= 1e-4

    def test_requires_cat_label(self):
        with pytest.raises(ValidationError):
            protocol.readout_phase(
                protocol.ground_joint_state(4), 0.0, 0.1, DephasingModel.none()
            )


class TestTimeDomain:
    def test_fidelity_at_design_point(self):
        prep = protocol.prepare_cat(4, 2.5, mode="time_domain", rabi_ratio=1 / 20)
        assert prep.fidelity >= 0.99

    def test_defect_shrinks_with_weaker_drive(self):
        d_strong = 1 - protocol.prepare_cat(4, 2.5, mode="time_domain", rabi_ratio=1 / 5).fidelity
        d_weak = 1 - protocol.prepare_cat(4, 2.5, mode="time_domain", rabi_ratio=1 / 20).fidelity
        assert d_weak < d_strong

    def test_branch_residual_small(self):
        prep = protocol.prepare_cat(6, 2.5, mode="time_domain", rabi_ratio=1 / 20)
        _, _, residual = protocol.branch_coefficients(prep.state)
        assert residual <= 1 - prep.fidelity + 1e-6

    def test_selectivity_warning(self):
        with pytest.warns(SelectivityWarning):
            protocol.prepare_cat(3, 1.0, mode="time_domain", rabi_ratio=1.5)

    def test_readout_close_to_ideal(self):
        z, n = 2.5, 4
        model = DephasingModel.gaussian(0.3)
        prep = protocol.prepare_cat(n, z, mode="time_domain", rabi_ratio=1 / 40)
        p_td = protocol.readout_phase(prep.state, 0.2, 1.0, model)
        p_ideal = metrology.cat_readout_probability(z, n, 0.2, 1.0, model)
        assert abs(p_td - p_ideal) <= 0.01


class TestFreeEvolution:
    def test_populations_preserved(self):
        prep = protocol.prepare_cat(8, 1.3, mode="ideal_gate")
        evolved = protocol.free_evolution(prep.state, 7.7)
        assert np.max(
            np.abs(np.abs(evolved.amplitudes) ** 2 - np.abs(prep.state.amplitudes) ** 2)
        ) <= 1e-10

    def test_norm_preserved(self):
        state = protocol.ground_joint_state(5)
        assert abs(protocol.free_evolution(state, 3.0).norm() - 1.0) <= 1e-12


class TestSampling:
    def test_deterministic_given_seed(self):
        a = protocol.sample_readout(0.37, 1000, seed=11)
        b = protocol.sample_readout(0.37, 1000, seed=11)
        assert a == b
        assert 0 <= a <= 1000

    def test_rejects_bad_probability(self):
        with pytest.raises(ValidationError):
            protocol.sample_readout(1.5, 10, seed=0)
