"""Lindblad generators and the fixed-step integrator."""

import math

import numpy as np
import pytest

from qubitthermo.dynamics import (
    ABSORPTION,
    EMISSION,
    IntegratorConfig,
    LindbladModel,
    PositivityError,
    dephasing_model,
    exchange_unitary_model,
    integrate,
    lindblad_rhs,
    liouvillian_matrix,
    planck_occupation,
    thermal_bath_model,
    two_atom_model,
)
from qubitthermo.linalg import IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, pauli_vector
from qubitthermo.states import BlochState, bloch_to_density, partial_trace
from qubitthermo.thermo import equilibrium_bloch


def bloch_of(m):
    return pauli_vector(m)


class TestPlanckOccupation:
    def test_zero_temperature(self):
        assert planck_occupation(math.inf) == 0.0

    def test_log2_gives_one(self):
        assert abs(planck_occupation(math.log(2)) - 1.0) < 1e-14

    def test_high_temperature_value(self):
        # k_B T_E / eps = 10 with gap 2 eps: x = 0.2
        assert abs(planck_occupation(0.2) - 1.0 / math.expm1(0.2)) < 1e-15
        assert abs(planck_occupation(0.2) - 4.516655566126994) < 1e-12

    def test_monotone_decreasing(self):
        xs = np.linspace(0.05, 5.0, 40)
        ns = [planck_occupation(x) for x in xs]
        assert all(a > b for a, b in zip(ns, ns[1:]))

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            planck_occupation(0.0)
        with pytest.raises(ValueError):
            planck_occupation(-1.0)


class TestThermalBathModel:
    def test_zero_temperature_single_channel(self):
        model = thermal_bath_model(1.0, 0.0, 1.0)
        assert len(model.jumps) == 1
        op, rate = model.jumps[0]
        assert rate == 1.0
        assert np.allclose(op, EMISSION)

    def test_emission_maps_excited_to_ground(self):
        # |e> = (0, 1): EMISSION |e><e| EMISSION^dag = |g><g|
        excited = np.diag([0.0, 1.0]).astype(complex)
        out = EMISSION @ excited @ EMISSION.conj().T
        assert np.allclose(out, np.diag([1.0, 0.0]))

    @pytest.mark.parametrize("t_env", [0.5, 0.8, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 10.0, 20.0])
    def test_gibbs_fixed_point(self, t_env):
        model = thermal_bath_model(1.0, t_env, 1.0)
        gibbs = bloch_to_density(equilibrium_bloch(t_env, 1.0))
        assert np.abs(lindblad_rhs(model, gibbs)).max() < 1e-12

    def test_transverse_decay_coefficient(self):
        # off-diagonal decay rate gamma0 (2N+1)/2 read off a coherent state
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho = bloch_to_density(BlochState(0.6, 0.0, 0.0))
        bdot = bloch_of(lindblad_rhs(model, rho))
        n_occ = planck_occupation(0.2)
        assert abs((2 * n_occ + 1) / 2 - 5.016655566126994) < 1e-12
        assert abs(bdot[0] / 0.6 + (2 * n_occ + 1) / 2) < 1e-12

    def test_bloch_rates_closed_form(self):
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho = bloch_to_density(BlochState(0.2, 0.5, 0.4))
        bdot = bloch_of(lindblad_rhs(model, rho))
        n_occ = planck_occupation(0.2)
        expected = np.array([
            -(2 * n_occ + 1) / 2 * 0.2,
            -(2 * n_occ + 1) / 2 * 0.5,
            1.0 - (2 * n_occ + 1) * 0.4,
        ])
        assert np.abs(bdot - expected).max() < 1e-12
        # frozen values
        assert np.abs(bdot - [-1.003331, -2.508328, -3.013324]).max() < 1e-6

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            thermal_bath_model(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            thermal_bath_model(1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            LindbladModel(2, np.zeros((2, 2)), ((EMISSION, -0.5),))


class TestDephasingModel:
    def test_diagonal_state_stationary(self):
        model = dephasing_model(1.0, 1.0)
        rho = np.diag([0.7, 0.3]).astype(complex)
        assert np.abs(lindblad_rhs(model, rho)).max() < 1e-15

    def test_coherence_decay_rate(self):
        model = dephasing_model(1.0, 1.0)
        rho = bloch_to_density(BlochState(0.5, 0.0, 0.5))
        bdot = bloch_of(lindblad_rhs(model, rho))
        assert np.abs(bdot - [-0.5, 0.0, 0.0]).max() < 1e-14

    def test_exact_exponential_decay(self):
        gamma_phi = 0.7
        model = dephasing_model(gamma_phi, 1.0)
        rho0 = bloch_to_density(BlochState(0.6, 0.2, 0.3))
        traj = integrate(model, rho0, IntegratorConfig(t_max=2.0, dt=1e-3,
                                                       sample_stride=200))
        for t, rho in zip(traj.times, traj.states):
            assert abs(rho[0, 1] - rho0[0, 1] * math.exp(-gamma_phi * t)) < 1e-9

    def test_energy_constant(self):
        model = dephasing_model(1.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.5, 0.0, 0.5))
        traj = integrate(model, rho0, IntegratorConfig(t_max=3.0, dt=1e-3,
                                                       sample_stride=100))
        bz = np.real(np.einsum("tij,ji->t", traj.states, SIGMA_Z))
        assert np.abs(bz - 0.5).max() < 1e-12


class TestTwoAtomModel:
    def test_ground_state_stationary(self):
        model = two_atom_model(1.0, 0.8, 1.0)
        gg = np.zeros((4, 4), dtype=complex)
        gg[0, 0] = 1.0
        assert np.abs(lindblad_rhs(model, gg)).max() < 1e-15

    def test_collective_rates(self):
        model = two_atom_model(1.0, 0.8, 1.0)
        assert sorted(r for _, r in model.jumps) == pytest.approx([0.2, 1.8])

    def test_decoupled_limit_matches_independent_channels(self):
        rng = np.random.default_rng(31)
        collective = two_atom_model(1.0, 0.0, 1.0)
        la = np.kron(EMISSION, IDENTITY_2)
        lb = np.kron(IDENTITY_2, EMISSION)
        independent = LindbladModel(4, np.zeros((4, 4)), ((la, 1.0), (lb, 1.0)))
        for _ in range(20):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = m @ m.conj().T
            rho /= np.trace(rho)
            diff = lindblad_rhs(collective, rho) - lindblad_rhs(independent, rho)
            assert np.abs(diff).max() < 1e-13

    def test_generator_matches_double_sum(self):
        # cross terms g*gamma0*(L_A rho L_B^dag + L_B rho L_A^dag - ...)
        g, gamma0 = 0.8, 1.0
        la = np.kron(EMISSION, IDENTITY_2)
        lb = np.kron(IDENTITY_2, EMISSION)
        rng = np.random.default_rng(32)
        model = two_atom_model(gamma0, g, 1.0)
        rates = {("A", "A"): gamma0, ("B", "B"): gamma0,
                 ("A", "B"): g * gamma0, ("B", "A"): g * gamma0}
        ops = {"A": la, "B": lb}
        for _ in range(20):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            rho = m @ m.conj().T
            rho /= np.trace(rho)
            expected = np.zeros_like(rho)
            for (k, l), rate in rates.items():
                lk, ll = ops[k], ops[l]
                expected += rate * (lk @ rho @ ll.conj().T
                                    - 0.5 * (ll.conj().T @ lk @ rho
                                             + rho @ ll.conj().T @ lk))
            assert np.abs(lindblad_rhs(model, rho) - expected).max() < 1e-13

    def test_relaxes_to_ground(self):
        model = two_atom_model(1.0, 0.5, 1.0)
        rho0 = np.kron(bloch_to_density(BlochState(0.3, 0.2, -0.5)),
                       bloch_to_density(BlochState(0.0, 0.4, 0.6)))
        traj = integrate(model, rho0, IntegratorConfig(t_max=40.0, dt=2e-3,
                                                       sample_stride=1000))
        assert traj.states[-1][0, 0].real > 1 - 1e-3

    def test_invalid_g(self):
        with pytest.raises(ValueError):
            two_atom_model(1.0, 1.2, 1.0)


class TestExchangeUnitary:
    def test_gg_stationary(self):
        model = exchange_unitary_model(1.0)
        gg = np.zeros((4, 4), dtype=complex)
        gg[0, 0] = 1.0
        assert np.abs(lindblad_rhs(model, gg)).max() < 1e-15

    def test_purity_and_spectrum_conserved(self):
        model = exchange_unitary_model(1.0)
        rho0 = np.kron(bloch_to_density(BlochState(0.6, 0.0, 0.8)),
                       bloch_to_density(BlochState(0.0, 0.0, 1.0)))
        traj = integrate(model, rho0, IntegratorConfig(t_max=6.0, dt=1e-3,
                                                       sample_stride=100))
        p0 = np.trace(rho0 @ rho0).real
        w0 = np.sort(np.linalg.eigvalsh(rho0))
        for rho in traj.states:
            assert abs(np.trace(rho @ rho).real - p0) < 1e-9
            assert np.abs(np.sort(np.linalg.eigvalsh(rho)) - w0).max() < 1e-9

    def test_schmidt_equal_entropies(self):
        model = exchange_unitary_model(1.0)
        rho0 = np.kron(bloch_to_density(BlochState(0.6, 0.0, 0.8)),
                       bloch_to_density(BlochState(0.0, 0.0, 1.0)))
        traj = integrate(model, rho0, IntegratorConfig(t_max=6.0, dt=1e-3,
                                                       sample_stride=50))

        def entropy(m):
            w = np.linalg.eigvalsh(m)
            return -sum(x * math.log(x) for x in w if x > 1e-14)

        for rho in traj.states:
            sa = entropy(partial_trace(rho, "A", validate=False))
            sb = entropy(partial_trace(rho, "B", validate=False))
            assert abs(sa - sb) < 1e-8

    def test_zero_coupling_rejected(self):
        with pytest.raises(ValueError):
            exchange_unitary_model(0.0)


class TestLindbladRhs:
    def test_precession(self):
        # H-only qubit: Bdot = 2 B x v
        rng = np.random.default_rng(33)
        for _ in range(50):
            bvec = rng.normal(size=3) * 0.3
            vvec = rng.normal(size=3)
            h = -(vvec[0] * SIGMA_X + vvec[1] * SIGMA_Y + vvec[2] * SIGMA_Z)
            model = LindbladModel(2, h, ())
            rho = bloch_to_density(BlochState.from_vec(bvec))
            bdot = bloch_of(lindblad_rhs(model, rho))
            assert np.abs(bdot - 2 * np.cross(bvec, vvec)).max() < 1e-12

    def test_traceless_hermitian_output(self):
        rng = np.random.default_rng(34)
        models = [thermal_bath_model(1.0, 3.0, 1.0), dephasing_model(0.5, 1.0)]
        for model in models:
            for _ in range(30):
                m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                rho = m @ m.conj().T
                rho /= np.trace(rho)
                out = lindblad_rhs(model, rho)
                assert abs(np.trace(out)) < 1e-12
                assert np.abs(out - out.conj().T).max() < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            lindblad_rhs(thermal_bath_model(1.0, 1.0, 1.0), np.eye(4) / 4)


class TestIntegrate:
    def test_thermalization_asymptote(self):
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.2, 0.5, 0.4))
        traj = integrate(model, rho0, IntegratorConfig(t_max=10.0, dt=1e-3,
                                                       sample_stride=100))
        b_final = bloch_of(traj.states[-1])
        assert np.abs(b_final - [0.0, 0.0, math.tanh(0.1)]).max() < 1e-4

    def test_unitary_conserves_modulus(self):
        # precession about v: |B| and B_z conserved over 10 periods
        vvec = np.array([0.0, 0.0, 1.0])
        h = -vvec[2] * SIGMA_Z
        model = LindbladModel(2, h, ())
        rho0 = bloch_to_density(BlochState(0.5, 0.0, 0.3))
        # angular frequency of precession is 2|v|; 10 periods = 10 pi
        traj = integrate(model, rho0, IntegratorConfig(t_max=10 * math.pi, dt=1e-3,
                                                       sample_stride=500))
        for rho in traj.states:
            b = bloch_of(rho)
            assert abs(np.linalg.norm(b) - math.sqrt(0.34)) < 1e-9
            assert abs(b[2] - 0.3) < 1e-9

    def test_fourth_order_self_convergence(self):
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.2, 0.5, 0.4))

        def final(dt):
            cfg = IntegratorConfig(t_max=0.2, dt=dt, sample_stride=10 ** 9)
            return integrate(model, rho0, cfg).states[-1]

        ref = final(0.2 / 1600)
        err_h = np.abs(final(4e-3) - ref).max()
        err_h2 = np.abs(final(2e-3) - ref).max()
        ratio = err_h / err_h2
        assert 12.0 < ratio < 20.0   # ~16x per halving

    def test_trace_drift_monitored_not_hidden(self):
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.2, 0.5, 0.4))
        traj = integrate(model, rho0, IntegratorConfig(t_max=2.0, dt=1e-3,
                                                       sample_stride=50))
        traces = np.real(np.einsum("tii->t", traj.states))
        assert np.abs(traces - 1.0).max() < 1e-8
        herm = np.abs(traj.states - np.transpose(traj.states.conj(), (0, 2, 1))).max()
        assert herm < 1e-10

    def test_sample_layout_and_derivatives(self):
        model = dephasing_model(1.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.5, 0.0, 0.5))
        traj = integrate(model, rho0, IntegratorConfig(t_max=0.01, dt=1e-3,
                                                       sample_stride=3))
        assert np.allclose(traj.times, [0.0, 0.003, 0.006, 0.009, 0.01])
        for rho, rdot in zip(traj.states, traj.derivatives):
            assert np.abs(rdot - lindblad_rhs(model, rho)).max() == 0.0

    def test_positivity_breach_aborts(self):
        # gamma' dt = 5 puts RK4 far outside its stability region
        model = thermal_bath_model(1.0, 10.0, 1.0)
        rho0 = bloch_to_density(BlochState(0.2, 0.5, 0.4))
        with pytest.raises(PositivityError) as err:
            integrate(model, rho0, IntegratorConfig(t_max=40.0, dt=0.5))
        assert err.value.time > 0.0

    def test_monotone_approach_to_equilibrium(self):
        model = thermal_bath_model(1.0, 2.0, 1.0)
        beq = math.tanh(0.5)
        for bz0 in (-0.8, 0.0, 0.9):
            rho0 = bloch_to_density(BlochState(0.1, 0.2, bz0))
            traj = integrate(model, rho0, IntegratorConfig(t_max=4.0, dt=1e-3,
                                                           sample_stride=40))
            gaps = np.abs(np.real(np.einsum("tij,ji->t", traj.states, SIGMA_Z)) - beq)
            assert np.all(np.diff(gaps) <= 1e-12)

    def test_rejects_bad_initial_state(self):
        model = thermal_bath_model(1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            integrate(model, np.diag([0.6, 0.6]), IntegratorConfig(t_max=1.0))


def test_liouvillian_matrix_matches_rhs():
    rng = np.random.default_rng(35)
    for model in (thermal_bath_model(1.0, 5.0, 1.0), two_atom_model(1.0, 0.8, 1.0),
                  exchange_unitary_model(0.7)):
        lmat = liouvillian_matrix(model)
        for _ in range(10):
            d = model.dim
            m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            direct = lindblad_rhs(model, m)
            via_matrix = (lmat @ m.ravel()).reshape(d, d)
            assert np.abs(direct - via_matrix).max() < 1e-12


def test_absorption_is_adjoint_of_emission():
    assert np.allclose(ABSORPTION, EMISSION.conj().T)


def test_integrator_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(t_max=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(t_max=1.0, dt=-1e-3)
    with pytest.raises(ValueError):
        IntegratorConfig(t_max=1.0, sample_stride=0)
