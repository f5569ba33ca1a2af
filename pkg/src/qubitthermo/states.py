"""State algebra for one- and two-qubit density matrices.

Bloch-vector/density conversions, spectra, von Neumann entropy, l1
coherence and partial traces, all in units hbar = k_B = 1. Basis
convention: index 0 is the ground state |g> (the +v Bloch pole of the
Hamiltonian H = -v.sigma, energy -|v|), index 1 the excited state |e>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import (  # noqa: F401  (re-exported building blocks)
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    jacobi_hermitian,
    pauli_vector,
    require_hermitian,
)

BLOCH_TOL = 1e-9          # |B| may exceed 1 by at most this much
DENSITY_TRACE_TOL = 1e-10
DENSITY_EIG_FLOOR = -1e-9
DEGENERACY_TOL = 1e-10
_ZERO = 1e-14


class PhysicalityError(ValueError):
    """Input violates a physical-state invariant (norm, trace or positivity)."""


@dataclass(frozen=True)
class UnitSystem:
    """Unit conventions shared by the whole package (read-only)."""

    hbar: float = 1.0
    k_b: float = 1.0
    energy_unit: str = "epsilon"
    time_unit: str = "1/gamma0"


UNITS = UnitSystem()


@dataclass(frozen=True)
class BlochState:
    """Qubit state as a Bloch vector; physical states satisfy |B| <= 1."""

    bx: float
    by: float
    bz: float

    def __post_init__(self) -> None:
        m = math.sqrt(self.bx ** 2 + self.by ** 2 + self.bz ** 2)
        if m > 1.0 + BLOCH_TOL:
            raise PhysicalityError(
                f"Bloch vector ({self.bx}, {self.by}, {self.bz}) has modulus "
                f"{m:.12f} > 1 + {BLOCH_TOL:.0e}: not a physical state")

    @classmethod
    def from_vec(cls, vec) -> "BlochState":
        x, y, z = np.asarray(vec, dtype=float)
        return cls(float(x), float(y), float(z))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz])

    @property
    def modulus(self) -> float:
        return math.sqrt(self.bx ** 2 + self.by ** 2 + self.bz ** 2)

    @property
    def unit(self) -> np.ndarray:
        m = self.modulus
        if m <= _ZERO:
            raise PhysicalityError("direction of a zero Bloch vector is undefined")
        return self.vec / m


@dataclass(frozen=True)
class EffectiveField:
    """Field vector v defining the local Hamiltonian H = -v.sigma (energy units)."""

    vx: float
    vy: float
    vz: float

    def __post_init__(self) -> None:
        if self.eps <= 0.0:
            raise PhysicalityError(
                f"effective field ({self.vx}, {self.vy}, {self.vz}) has zero "
                "modulus; thermodynamic quantities need eps = |v| > 0")

    @classmethod
    def from_vec(cls, vec) -> "EffectiveField":
        x, y, z = np.asarray(vec, dtype=float)
        return cls(float(x), float(y), float(z))

    @property
    def vec(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])

    @property
    def eps(self) -> float:
        """Positive energy eigenvalue |v|."""
        return math.sqrt(self.vx ** 2 + self.vy ** 2 + self.vz ** 2)

    @property
    def unit(self) -> np.ndarray:
        return self.vec / self.eps


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (descending) and orthonormal eigenvector columns.

    ``degenerate`` is True when a degenerate eigenspace could not be
    resolved (no derivative context was available to pick a basis).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = False

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])


def require_density(m: np.ndarray, what: str = "density matrix") -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return complex array."""
    m = require_hermitian(m, what=what)
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise PhysicalityError(f"{what}: trace {tr!r} differs from 1 by more "
                               f"than {DENSITY_TRACE_TOL:.0e}")
    lo = float(np.linalg.eigvalsh(m)[0])
    if lo < DENSITY_EIG_FLOOR:
        raise PhysicalityError(f"{what}: smallest eigenvalue {lo:.3e} below "
                               f"{DENSITY_EIG_FLOOR:.0e}")
    return m


def bloch_to_density(b: BlochState) -> np.ndarray:
    """rho = (I + B.sigma)/2 in the |g>, |e> basis."""
    v = b.vec
    return 0.5 * (IDENTITY_2 + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)


def density_to_bloch(rho: np.ndarray) -> BlochState:
    """Inverse of bloch_to_density: B_k = tr(rho sigma_k)."""
    m = require_density(rho, what="density_to_bloch input")
    if m.shape != (2, 2):
        raise ValueError(f"density_to_bloch expects a 2x2 matrix, got {m.shape}")
    return BlochState.from_vec(pauli_vector(m))


def field_hamiltonian(v: EffectiveField) -> np.ndarray:
    """H = -v.sigma."""
    w = v.vec
    return -(w[0] * SIGMA_X + w[1] * SIGMA_Y + w[2] * SIGMA_Z)


def internal_energy(b: BlochState, v: EffectiveField) -> float:
    """E = -B.v, identical to tr(H rho)."""
    return -float(np.dot(b.vec, v.vec))


def _eig2_closed_form(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form spectrum of a 2x2 Hermitian m = a0 I + a.sigma.

    Eigenvalues a0 -/+ |a| (ascending) with eigenvectors along -/+ the unit
    direction of a. Caller handles |a| ~ 0 (degenerate).
    """
    a0 = float(np.real(np.trace(m))) / 2.0
    av = pauli_vector(m) / 2.0
    r = float(np.linalg.norm(av))
    ax, ay, az = av
    # branch keeps the denominator away from zero
    if az >= 0.0:
        up = np.array([r + az, ax + 1j * ay]) / math.sqrt(2.0 * r * (r + az))
    else:
        up = np.array([ax - 1j * ay, r - az]) / math.sqrt(2.0 * r * (r - az))
    um = np.array([-up[1].conjugate(), up[0].conjugate()])
    vecs = np.column_stack([um, up])
    return np.array([a0 - r, a0 + r]), vecs


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the largest-modulus entry of each column real positive."""
    for j in range(vecs.shape[1]):
        k = int(np.argmax(np.abs(vecs[:, j])))
        z = vecs[k, j]
        if abs(z) > 0.0:
            vecs[:, j] = vecs[:, j] * (z.conjugate() / abs(z))
    return vecs


def _degenerate_groups(w: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for i in range(1, len(w)):
        if abs(w[i] - w[i - 1]) < tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def eigendecompose(rho: np.ndarray, rhodot: np.ndarray | None = None) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix, eigenvalues descending.

    Dimension 2 uses the closed form (for a density matrix this is
    lambda_+/- = (1 +/- B)/2 with eigenvectors along +/- the Bloch
    direction); dimension 4 uses cyclic Jacobi. Within a degenerate
    eigenspace the basis is chosen to diagonalize the projection of
    ``rhodot`` when given, which keeps spectral heat rates well defined
    along trajectories; otherwise an arbitrary basis is returned and the
    spectrum is flagged degenerate.
    """
    m = require_hermitian(rho, what="eigendecompose input")
    n = m.shape[0]
    if n == 2:
        a0 = float(np.real(np.trace(m))) / 2.0
        if float(np.linalg.norm(pauli_vector(m))) / 2.0 < _ZERO:
            w = np.array([a0, a0])
            vecs = np.eye(2, dtype=complex)
        else:
            w, vecs = _eig2_closed_form(m)
    elif n == 4:
        w, vecs = jacobi_hermitian(m)
    else:
        raise ValueError(f"eigendecompose supports dimensions 2 and 4, got {n}")

    order = np.argsort(-w, kind="stable")
    w = w[order]
    vecs = vecs[:, order]

    flag = False
    for group in _degenerate_groups(w, DEGENERACY_TOL):
        if len(group) == 1:
            continue
        if rhodot is None:
            flag = True
            continue
        block = vecs[:, group]
        sub = block.conj().T @ np.asarray(rhodot, dtype=complex) @ block
        sub = 0.5 * (sub + sub.conj().T)
        if len(group) == 2:
            sw, sv = np.linalg.eigh(sub)
        else:
            sw, sv = jacobi_hermitian(sub)
        vecs[:, group] = block @ sv[:, ::-1]
        gaps = np.abs(np.diff(np.sort(sw)))
        if gaps.size and float(gaps.min()) < DEGENERACY_TOL:
            flag = True

    return Spectrum(w, _fix_phases(vecs), flag)


def von_neumann_entropy(spectrum: Spectrum) -> float:
    """S = -sum lambda ln lambda in units of k_B, with 0 ln 0 = 0."""
    s = 0.0
    for lam in spectrum.eigenvalues:
        if lam > 0.0:
            s -= float(lam) * math.log(float(lam))
    return s


def entropy_of_modulus(b_modulus: float) -> float:
    """Qubit entropy as a function of the Bloch modulus alone."""
    b = min(max(b_modulus, 0.0), 1.0)
    if b >= 1.0:
        return 0.0
    lp, lm = (1.0 + b) / 2.0, (1.0 - b) / 2.0
    if lm <= 0.0:
        return 0.0
    return -(lp * math.log(lp) + lm * math.log(lm))


def field_eigenbasis(v: EffectiveField) -> np.ndarray:
    """Columns (|g>, |e>) of H = -v.sigma: spinors along +v and -v."""
    av = v.unit
    _, vecs = _eig2_closed_form(av[0] * SIGMA_X + av[1] * SIGMA_Y + av[2] * SIGMA_Z)
    # ascending eigenvalues of v.sigma put -v first; ground state is +v
    return vecs[:, ::-1]


def l1_coherence(rho: np.ndarray, v: EffectiveField) -> float:
    """Sum of |off-diagonal| entries of rho in the eigenbasis of H = -v.sigma.

    For a qubit this equals B sin(theta), the Bloch component transverse
    to the field.
    """
    m = require_hermitian(rho, what="l1_coherence input")
    if m.shape != (2, 2):
        raise ValueError(f"l1_coherence expects a 2x2 matrix, got {m.shape}")
    u = field_eigenbasis(v)
    r = u.conj().T @ m @ u
    return float(abs(r[0, 1]) + abs(r[1, 0]))


def partial_trace(rho: np.ndarray, keep: str, validate: bool = True) -> np.ndarray:
    """Reduced 2x2 matrix of a two-qubit operator with ordering A (x) B.

    ``keep`` selects the retained subsystem, "A" or "B". With
    ``validate`` the input must be a valid 4x4 density matrix; disable it
    to reduce non-density operators such as derivatives.
    """
    m = np.asarray(rho, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 matrix, got {m.shape}")
    if validate:
        require_density(m, what="partial_trace input")
    r = m.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.ascontiguousarray(np.einsum("abcb->ac", r))
    if keep == "B":
        return np.ascontiguousarray(np.einsum("abac->bc", r))
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def polar_angles(b: BlochState, v: EffectiveField) -> tuple[float, float, float]:
    """(B, theta, phi) with the polar axis along the field direction.

    theta = arccos(Bhat.vhat) in [0, pi]; phi is the azimuth in a fixed
    right-handed frame completing vhat. theta is NaN for B = 0 and phi is
    0 at the poles.
    """
    bm = b.modulus
    if bm <= _ZERO:
        return 0.0, math.nan, 0.0
    vhat = v.unit
    bhat = b.vec / bm
    c = float(np.dot(bhat, vhat))
    theta = math.acos(min(1.0, max(-1.0, c)))
    e1 = np.cross(np.array([0.0, 0.0, 1.0]), vhat)
    if np.linalg.norm(e1) < 1e-12:
        e1 = np.array([1.0, 0.0, 0.0])
    else:
        e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(vhat, e1)
    if math.sin(theta) < 1e-12:
        return bm, theta, 0.0
    phi = math.atan2(float(np.dot(b.vec, e2)), float(np.dot(b.vec, e1)))
    return bm, theta, phi
