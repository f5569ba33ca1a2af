"""State algebra: conversions, spectra, entropy, coherence, partial trace."""

import math

import numpy as np
import pytest

from qubitthermo.linalg import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    jacobi_hermitian,
    offdiagonal_norm,
    pauli_vector,
)
from qubitthermo.states import (
    BlochState,
    EffectiveField,
    PhysicalityError,
    bloch_to_density,
    density_to_bloch,
    eigendecompose,
    entropy_of_modulus,
    field_hamiltonian,
    internal_energy,
    l1_coherence,
    partial_trace,
    polar_angles,
    von_neumann_entropy,
)

def random_bloch(rng, max_mod=0.999):
    vec = rng.normal(size=3)
    vec /= np.linalg.norm(vec)
    return BlochState.from_vec(vec * rng.uniform(0.0, max_mod))


def random_field(rng):
    vec = rng.normal(size=3)
    vec /= np.linalg.norm(vec)
    return EffectiveField.from_vec(vec * rng.uniform(0.2, 3.0))


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = m @ m.conj().T
    return m / np.trace(m)


class TestBlochDensity:
    def test_maximally_mixed(self):
        rho = bloch_to_density(BlochState(0, 0, 0))
        assert np.allclose(rho, np.eye(2) / 2)

    def test_pole_state_is_ground(self):
        rho = bloch_to_density(BlochState(0, 0, 1))
        assert np.allclose(rho, np.diag([1.0, 0.0]))

    def test_generic_vector(self):
        rho = bloch_to_density(BlochState(0.2, 0.5, 0.4))
        expected = np.array([[0.7, 0.1 - 0.25j], [0.1 + 0.25j, 0.3]])
        assert np.abs(rho - expected).max() < 1e-15

    def test_unphysical_rejected(self):
        with pytest.raises(PhysicalityError, match="modulus"):
            BlochState(0.9, 0.9, 0.9)

    def test_density_to_bloch_examples(self):
        assert np.allclose(density_to_bloch(np.eye(2) / 2).vec, 0.0)
        b = density_to_bloch(np.diag([0.3, 0.7]).astype(complex))
        assert np.allclose(b.vec, [0.0, 0.0, -0.4], atol=1e-14)

    def test_density_to_bloch_rejects_nonhermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            density_to_bloch(np.array([[0.5, 0.3], [0.0, 0.5]]))
        with pytest.raises(PhysicalityError, match="trace"):
            density_to_bloch(np.diag([0.6, 0.6]).astype(complex))

    def test_round_trip_1000_states(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            b = random_bloch(rng)
            b2 = density_to_bloch(bloch_to_density(b))
            assert np.abs(b2.vec - b.vec).max() < 1e-12


class TestInternalEnergy:
    def test_ground_state(self):
        assert internal_energy(BlochState(0, 0, 1), EffectiveField(0, 0, 1)) == -1.0

    def test_orthogonal_zero(self):
        assert internal_energy(BlochState(0.7, 0, 0), EffectiveField(0, 0, 1)) == 0.0

    def test_dot_product(self):
        e = internal_energy(BlochState(0.2, 0.5, 0.4), EffectiveField(0, 0, 1))
        assert abs(e - (-0.4)) < 1e-15

    def test_matches_trace_formula(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            b, v = random_bloch(rng), random_field(rng)
            via_trace = np.real(np.trace(field_hamiltonian(v) @ bloch_to_density(b)))
            assert abs(internal_energy(b, v) - via_trace) < 1e-12

    def test_zero_field_rejected(self):
        with pytest.raises(PhysicalityError, match="zero"):
            EffectiveField(0, 0, 0)


class TestEigendecompose:
    def test_maximally_mixed_flagged(self):
        spec = eigendecompose(np.eye(2) / 2)
        assert np.allclose(spec.eigenvalues, [0.5, 0.5])
        assert spec.degenerate

    def test_qubit_closed_form(self):
        spec = eigendecompose(bloch_to_density(BlochState(0, 0.3, 0.4)))
        assert np.allclose(spec.eigenvalues, [0.75, 0.25], atol=1e-14)

    def test_closed_form_random(self):
        rng = np.random.default_rng(13)
        for _ in range(300):
            b = random_bloch(rng)
            spec = eigendecompose(bloch_to_density(b))
            bm = b.modulus
            assert abs(spec.eigenvalues[0] - (1 + bm) / 2) < 1e-12
            assert abs(spec.eigenvalues[1] - (1 - bm) / 2) < 1e-12
            if bm > 1e-6:
                # leading eigenvector points along +Bhat
                u = spec.eigenvectors[:, 0]
                back = np.real([u.conj() @ s @ u for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
                assert np.abs(back - b.unit).max() < 1e-10

    def test_dim4_reconstruction(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            m = (m + m.conj().T) / 2
            spec = eigendecompose(m)
            rec = (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T
            assert np.abs(rec - m).max() < 1e-10

    def test_dim4_matches_lapack(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            m = random_density(rng, 4)
            spec = eigendecompose(m)
            ref = np.sort(np.linalg.eigvalsh(m))[::-1]
            assert np.abs(spec.eigenvalues - ref).max() < 1e-11

    def test_jacobi_offdiagonal_target(self):
        rng = np.random.default_rng(16)
        m = random_density(rng, 4)
        w, v = jacobi_hermitian(m)
        assert offdiagonal_norm(v.conj().T @ m @ v) < 1e-12

    def test_degeneracy_resolved_by_derivative(self):
        # rho = I/2 with a nonzero derivative picks the derivative eigenbasis
        rhodot = 0.1 * (SIGMA_X + 0.5 * SIGMA_Z)
        spec = eigendecompose(np.eye(2) / 2, rhodot=rhodot)
        assert not spec.degenerate
        sub = spec.eigenvectors.conj().T @ rhodot @ spec.eigenvectors
        assert abs(sub[0, 1]) < 1e-12

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            eigendecompose(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestEntropy:
    def test_reference_points(self):
        assert abs(von_neumann_entropy(eigendecompose(np.eye(2) / 2)) - math.log(2)) < 1e-12
        pure = bloch_to_density(BlochState(0, 0, 1))
        assert von_neumann_entropy(eigendecompose(pure)) == 0.0
        half = eigendecompose(bloch_to_density(BlochState(0.5, 0, 0)))
        assert abs(von_neumann_entropy(half) - 0.5623351446188083) < 1e-12

    def test_matches_modulus_closed_form(self):
        rng = np.random.default_rng(17)
        for _ in range(300):
            b = random_bloch(rng)
            s = von_neumann_entropy(eigendecompose(bloch_to_density(b)))
            assert abs(s - entropy_of_modulus(b.modulus)) < 1e-12

    def test_unitary_invariance(self):
        rng = np.random.default_rng(18)
        for dim in (2, 4):
            for _ in range(50):
                rho = random_density(rng, dim)
                q, _ = np.linalg.qr(rng.normal(size=(dim, dim))
                                    + 1j * rng.normal(size=(dim, dim)))
                s1 = von_neumann_entropy(eigendecompose(rho))
                s2 = von_neumann_entropy(eigendecompose(q @ rho @ q.conj().T))
                assert abs(s1 - s2) < 1e-10

    def test_spectrum_invariants_for_densities(self):
        rng = np.random.default_rng(19)
        for dim in (2, 4):
            for _ in range(100):
                spec = eigendecompose(random_density(rng, dim))
                assert abs(spec.eigenvalues.sum() - 1.0) < 1e-10
                assert spec.eigenvalues.min() > -1e-9
                assert spec.eigenvalues.max() < 1 + 1e-9
                assert np.all(np.diff(spec.eigenvalues) <= 1e-14)


class TestCoherence:
    def test_aligned_is_incoherent(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            v = random_field(rng)
            b = BlochState.from_vec(v.unit * rng.uniform(0, 1))
            assert l1_coherence(bloch_to_density(b), v) < 1e-12

    def test_transverse_component(self):
        v = EffectiveField(0, 0, 1)
        c = l1_coherence(bloch_to_density(BlochState(0.5, 0, 0.5)), v)
        assert abs(c - 0.5) < 1e-12
        c = l1_coherence(bloch_to_density(BlochState(0.2, 0.5, 0.4)), v)
        assert abs(c - math.sqrt(0.04 + 0.25)) < 1e-12

    def test_equals_b_sin_theta(self):
        rng = np.random.default_rng(21)
        for _ in range(300):
            b, v = random_bloch(rng), random_field(rng)
            bm, theta, _ = polar_angles(b, v)
            got = l1_coherence(bloch_to_density(b), v)
            assert abs(got - bm * math.sin(theta)) < 1e-12


class TestPartialTrace:
    def test_product_state(self):
        rng = np.random.default_rng(22)
        for _ in range(50):
            ra, rb = random_density(rng, 2), random_density(rng, 2)
            rho = np.kron(ra, rb)
            assert np.abs(partial_trace(rho, "A") - ra).max() < 1e-12
            assert np.abs(partial_trace(rho, "B") - rb).max() < 1e-12

    def test_bell_state(self):
        psi = np.zeros(4, dtype=complex)
        psi[0] = psi[3] = 1 / math.sqrt(2)       # (|gg> + |ee>)/sqrt(2)
        rho = np.outer(psi, psi.conj())
        for keep in ("A", "B"):
            assert np.abs(partial_trace(rho, keep) - np.eye(2) / 2).max() < 1e-14

    def test_trace_and_hermiticity_preserved(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            rho = random_density(rng, 4)
            for keep in ("A", "B"):
                red = partial_trace(rho, keep)
                assert abs(np.trace(red) - 1.0) < 1e-12
                assert np.abs(red - red.conj().T).max() < 1e-14

    def test_bad_selector(self):
        with pytest.raises(ValueError, match="keep"):
            partial_trace(np.eye(4) / 4, "C")


class TestPolarAngles:
    def test_parallel_and_perpendicular(self):
        v = EffectiveField(0, 0, 2.0)
        assert polar_angles(BlochState(0, 0, 0.5), v)[1] == 0.0
        _, theta, _ = polar_angles(BlochState(0.5, 0, 0), v)
        assert abs(theta - math.pi / 2) < 1e-15

    def test_generic_state(self):
        bm, theta, _ = polar_angles(BlochState(0.2, 0.5, 0.4), EffectiveField(0, 0, 1))
        assert abs(bm - 0.6708203932499369) < 1e-15
        assert abs(theta - 0.9319311825594854) < 1e-12

    def test_zero_state_theta_absent(self):
        bm, theta, phi = polar_angles(BlochState(0, 0, 0), EffectiveField(0, 0, 1))
        assert bm == 0.0 and math.isnan(theta) and phi == 0.0

    def test_pole_phi_zero(self):
        _, _, phi = polar_angles(BlochState(0, 0, -0.8), EffectiveField(0, 0, 1))
        assert phi == 0.0

    def test_frame_consistency(self):
        # reconstruct the vector from (B, theta, phi) in the frame used
        rng = np.random.default_rng(24)
        for _ in range(100):
            b, v = random_bloch(rng), random_field(rng)
            bm, theta, phi = polar_angles(b, v)
            if math.isnan(theta) or math.sin(theta) < 1e-6:
                continue
            vhat = v.unit
            e1 = np.cross([0.0, 0.0, 1.0], vhat)
            e1 = np.array([1.0, 0.0, 0.0]) if np.linalg.norm(e1) < 1e-12 \
                else e1 / np.linalg.norm(e1)
            e2 = np.cross(vhat, e1)
            rebuilt = bm * (math.sin(theta) * (math.cos(phi) * e1 + math.sin(phi) * e2)
                            + math.cos(theta) * vhat)
            assert np.abs(rebuilt - b.vec).max() < 1e-10


def test_pauli_vector_roundtrip():
    rng = np.random.default_rng(25)
    for _ in range(50):
        vec = rng.normal(size=3)
        m = vec[0] * SIGMA_X + vec[1] * SIGMA_Y + vec[2] * SIGMA_Z
        assert np.abs(pauli_vector(m) / 2 - vec).max() < 1e-13


def test_unit_system_is_read_only():
    from qubitthermo.states import UNITS
    assert UNITS.hbar == 1.0 and UNITS.k_b == 1.0
    with pytest.raises(Exception):
        UNITS.k_b = 2.0
