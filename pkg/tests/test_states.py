import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinsense import dicke, oracle, states
from spinsense.dephasing import pure_state_moments
from spinsense.errors import DegenerateCatError, ValidationError

from conftest import build_state

ALL_KINDS = ["coherent", "oat", "tat", "cat", "ghz"]


class TestSpinCoherent:
    def test_ground(self):
        s = states.spin_coherent(0.0, 6)
        expected = np.zeros(7)
        expected[0] = 1.0
        assert np.allclose(s.amplitudes, expected)

    def test_z1_n2_amplitudes(self):
        s = states.spin_coherent(1.0, 2)
        assert np.allclose(s.amplitudes, [0.5, 1 / np.sqrt(2), 0.5])

    @settings(max_examples=25, deadline=None)
    @given(zr=st.floats(-3, 3), zi=st.floats(-3, 3), n=st.integers(1, 60))
    def test_jz_expectation(self, zr, zi, n):
        z = complex(zr, zi)
        moments = pure_state_moments(states.spin_coherent(z, n))
        expected = (n / 2) * (abs(z) ** 2 - 1) / (1 + abs(z) ** 2)
        assert abs(moments.first[2] - expected) <= 1e-9 * max(1, n)

    def test_z1_mean_jz_zero(self):
        moments = pure_state_moments(states.spin_coherent(1.0, 11))
        assert abs(moments.first[2]) <= 1e-12

    def test_large_n_no_overflow(self):
        s = states.spin_coherent(3.0, 100000)
        assert abs(s.norm() - 1.0) <= 1e-12

    def test_rejects_nonfinite(self):
        with pytest.raises(ValidationError):
            states.spin_coherent(complex("inf"), 4)


class TestOatState:
    def test_chi_zero_is_seed(self):
        seed = states.spin_coherent(1.0, 7)
        twisted = states.oat_state(1.0, 0.0, 7)
        assert np.allclose(twisted.amplitudes, seed.amplitudes)

    def test_two_pi_periodicity_even_n(self):
        # (k - N/2)^2 is an integer for even N, so chi = 2 pi is trivial
        seed = states.spin_coherent(1j, 8)
        twisted = states.oat_state(1j, 2 * np.pi, 8)
        phase = twisted.amplitudes[4] / seed.amplitudes[4]
        assert np.max(np.abs(twisted.amplitudes - phase * seed.amplitudes)) <= 1e-10

    def test_brute_force_equivalence(self):
        n, chi = 6, 0.2
        state = states.oat_state(1.0, chi, n)
        psi_full = oracle.embed_dicke_vector(states.spin_coherent(1.0, n))
        _, _, jz_full = oracle.full_collective_ops(n)
        twisted_full = np.exp(-1j * chi * np.diag(jz_full.real) ** 2) * psi_full
        back = oracle.embed_dicke_vector(state)
        assert np.max(np.abs(back - twisted_full)) <= 1e-9

    def test_rejects_non_unit_modulus(self):
        with pytest.raises(ValidationError):
            states.oat_state(1.5, 0.1, 4)


class TestTatState:
    def test_chi_zero_is_ground(self):
        s = states.tat_state(0.0, 9)
        expected = np.zeros(10)
        expected[0] = 1.0
        assert np.allclose(s.amplitudes, expected)

    @pytest.mark.parametrize("n,chi", [(5, 0.3), (8, 0.11), (9, 0.5)])
    def test_odd_levels_empty(self, n, chi):
        s = states.tat_state(chi, n)
        assert np.max(np.abs(s.amplitudes[1::2])) == 0.0

    @pytest.mark.parametrize("n", [2, 3, 6, 11, 16])
    def test_sector_path_matches_dense_exponential(self, n):
        for chi in (0.02, 0.3):
            fast = states.tat_state(chi, n).amplitudes
            dense = states.tat_state_dense(chi, n).amplitudes
            k = int(np.argmax(np.abs(dense)))
            aligned = fast * np.exp(1j * (np.angle(dense[k]) - np.angle(fast[k])))
            assert np.max(np.abs(aligned - dense)) <= 1e-10

    def test_brute_force_equivalence(self):
        n, chi = 6, 0.05
        g = states.tat_generator(chi, n)
        u = dicke.unitary_exp(g)
        expected = u[:, 0]
        assert np.max(np.abs(states.tat_state(chi, n).amplitudes - expected)) <= 1e-9

    def test_full_space_construction(self):
        # exp(chi (J_+^2 - J_-^2)) applied to |g...g> on the full 2^6 space
        from conftest import taylor_expm

        n, chi = 6, 0.05
        jx, jy, _ = oracle.full_collective_ops(n)
        jp = jx + 1j * jy
        gen = chi * (jp @ jp - jp.conj().T @ jp.conj().T)
        ground = np.zeros(2**n, dtype=complex)
        ground[0] = 1.0
        psi_full = taylor_expm(gen) @ ground
        embedded = oracle.embed_dicke_vector(states.tat_state(chi, n))
        assert np.max(np.abs(psi_full - embedded)) <= 1e-9

    def test_size_cap(self):
        with pytest.raises(ValidationError):
            states.tat_state(0.1, states.TAT_MAX_QUBITS + 1)


class TestSpinCat:
    def test_z1_n2_amplitudes(self):
        s = states.spin_cat(1.0, 2)
        raw = np.array([1.5, 1 / np.sqrt(2), 0.5])
        assert np.allclose(s.amplitudes, raw / np.linalg.norm(raw))

    def test_asymptotic_norm(self):
        # branch overlap vanishes for large N, so the raw norm^2 tends to 2
        ground = states.spin_coherent(0.0, 200).amplitudes
        excited = states.spin_coherent(1.0, 200).amplitudes
        assert abs(np.linalg.norm(ground + excited) ** 2 - 2.0) <= 1e-12

    def test_exact_norm_small_n(self):
        n, z = 3, 0.8
        overlap = (1 + abs(z) ** 2) ** (-n / 2)
        ground = states.spin_coherent(0.0, n).amplitudes
        excited = states.spin_coherent(z, n).amplitudes
        assert np.isclose(np.linalg.norm(ground + excited) ** 2, 2 * (1 + overlap))

    def test_self_fidelity(self):
        s = states.spin_cat(0.9j, 5)
        assert abs(abs(dicke.inner(s, s)) ** 2 - 1.0) <= 1e-12

    def test_degenerate_cat(self):
        with pytest.raises(DegenerateCatError):
            states.spin_cat(0.0, 4)


class TestGhz:
    def test_single_qubit(self):
        s = states.ghz_state(1)
        assert np.allclose(s.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])

    @pytest.mark.parametrize("n", [1, 2, 5, 12])
    def test_mean_jz_zero(self, n):
        assert abs(pure_state_moments(states.ghz_state(n)).first[2]) <= 1e-12

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_jz_variance(self, n):
        moments = pure_state_moments(states.ghz_state(n))
        var = moments.second[2, 2] - moments.first[2] ** 2
        full = oracle.embed_dicke(states.ghz_state(n))
        _, second = oracle.oracle_moments(full)
        assert np.isclose(var, n**2 / 4)
        assert np.isclose(second[2, 2], n**2 / 4)


class TestFactoryInvariants:
    @settings(max_examples=30, deadline=None)
    @given(
        kind=st.sampled_from(ALL_KINDS),
        n=st.integers(1, 30),
        zr=st.floats(-2, 2),
        chi=st.floats(0, 1),
    )
    def test_normalized(self, kind, n, zr, chi):
        z = complex(zr if abs(zr) > 0.05 else 1.0, 0.3)
        state = build_state(kind, n, z=z, chi=chi)
        assert abs(state.norm() - 1.0) <= 1e-10

    @pytest.mark.parametrize("kind", ALL_KINDS)
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_embedding_roundtrip(self, kind, n):
        """Factory output equals the full-space construction projected back."""
        state = build_state(kind, n, z=0.8 + 0.5j, chi=0.17)
        psi = oracle.embed_dicke_vector(state)
        assert abs(np.linalg.norm(psi) - 1.0) <= 1e-9
        # project back level by level
        pops = np.array([bin(i).count("1") for i in range(2**n)])
        from scipy.special import comb

        rebuilt = np.array(
            [
                psi[pops == k].sum() / np.sqrt(comb(n, k, exact=True))
                for k in range(n + 1)
            ]
        )
        assert np.max(np.abs(rebuilt - state.amplitudes)) <= 1e-9

    def test_coherent_product_embedding(self):
        # |z,3> embeds to the literal 3-fold product state
        z = 1.0
        psi = oracle.embed_dicke_vector(states.spin_coherent(z, 3))
        assert np.allclose(psi, np.full(8, 1 / (2 ** 1.5)))

    def test_statespec_build_dispatch(self):
        for kind in ALL_KINDS:
            spec = states.StateSpec(
                kind=kind, n_qubits=4, z=1.0, chi=0.2 if kind in ("oat", "tat") else None
            )
            assert spec.build().n_qubits == 4

    def test_statespec_requires_chi(self):
        with pytest.raises(ValidationError):
            states.StateSpec(kind="oat", n_qubits=4, z=1.0)
