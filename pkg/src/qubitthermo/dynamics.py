"""Lindblad generators for one and two qubits and a fixed-step RK4 integrator.

All model builders work in the frame whose z axis is the field direction,
with time measured in units of 1/gamma0. The generators are written in the
rotating (interaction) picture, i.e. with zero Hamiltonian part where the
underlying process is purely dissipative; this leaves every thermodynamic
rate unchanged because the free precession about the field contributes
nothing to them (it preserves |B|, Bhat.v and B.v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import IDENTITY_2, require_hermitian
from .states import require_density

#: |g><e|, the channel that de-excites the qubit (index 0 = ground).
#: The assignment is fixed operationally: the jump carrying rate
#: gamma0*(N+1) must map excited -> ground so that the Gibbs state of
#: H = -v.sigma is the generator's fixed point.
EMISSION = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
ABSORPTION = EMISSION.conj().T

TRACE_TOL = 1e-8
HERMITICITY_TOL = 1e-10
POSITIVITY_FLOOR = -1e-7


class IntegrationError(RuntimeError):
    """Trajectory monitoring detected an invariant breach."""


class PositivityError(IntegrationError):
    """A sampled state developed an eigenvalue below the positivity floor."""

    def __init__(self, time: float, min_eigenvalue: float):
        super().__init__(
            f"positivity breach at t = {time:.6g}: min eigenvalue "
            f"{min_eigenvalue:.3e} < {POSITIVITY_FLOOR:.0e}")
        self.time = time
        self.min_eigenvalue = min_eigenvalue


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian part plus weighted jump operators; generates rho-dot."""

    dim: int
    hamiltonian: np.ndarray
    jumps: tuple[tuple[np.ndarray, float], ...]
    label: str = ""

    def __post_init__(self) -> None:
        if self.dim not in (2, 4):
            raise ValueError(f"dim must be 2 or 4, got {self.dim}")
        h = require_hermitian(self.hamiltonian, what=f"{self.label or 'model'} Hamiltonian")
        if h.shape != (self.dim, self.dim):
            raise ValueError(f"Hamiltonian shape {h.shape} does not match dim {self.dim}")
        object.__setattr__(self, "hamiltonian", h)
        ops = []
        for op, rate in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != (self.dim, self.dim):
                raise ValueError(f"jump operator shape {op.shape} does not match dim {self.dim}")
            if rate < 0.0:
                raise ValueError(f"negative jump rate {rate!r} in model {self.label!r}")
            ops.append((op, float(rate)))
        object.__setattr__(self, "jumps", tuple(ops))


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step RK4 settings; times in units of 1/gamma0."""

    t_max: float
    dt: float = 1e-3
    sample_stride: int = 1

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if self.t_max <= 0.0:
            raise ValueError(f"t_max must be positive, got {self.t_max!r}")
        if int(self.sample_stride) < 1:
            raise ValueError(f"sample_stride must be >= 1, got {self.sample_stride!r}")


@dataclass
class Trajectory:
    """Sampled density matrices with the analytic generator image at each sample."""

    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    model: LindbladModel
    min_eigenvalue: float = field(default=0.0)

    @property
    def dim(self) -> int:
        return self.model.dim

    def __len__(self) -> int:
        return int(self.times.shape[0])


def planck_occupation(beta_h_omega0: float) -> float:
    """Mean thermal photon number 1/(exp(x) - 1) at x = beta hbar omega0.

    Accepts x = +inf (zero bath temperature, N = 0); rejects x <= 0
    (negative bath temperatures are not modeled).
    """
    if not beta_h_omega0 > 0.0:
        raise ValueError(f"beta*hbar*omega0 must be positive, got {beta_h_omega0!r}")
    return 1.0 / math.expm1(beta_h_omega0)


def thermal_bath_model(gamma0: float, t_env: float, eps: float,
                       label: str = "thermal_bath") -> LindbladModel:
    """Single qubit damped by a thermal field at temperature ``t_env``.

    Emission at rate gamma0*(N+1) and absorption at rate gamma0*N, with N
    the Planck occupation at the transition gap 2*eps. The Gibbs state of
    H = -eps*sigma_z at t_env is the unique fixed point.
    """
    if gamma0 <= 0.0:
        raise ValueError(f"gamma0 must be positive, got {gamma0!r}")
    if t_env < 0.0:
        raise ValueError(f"environment temperature must be >= 0, got {t_env!r}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    n_occ = 0.0 if t_env == 0.0 else planck_occupation(2.0 * eps / t_env)
    jumps: list[tuple[np.ndarray, float]] = [(EMISSION, gamma0 * (n_occ + 1.0))]
    if n_occ > 0.0:
        jumps.append((ABSORPTION, gamma0 * n_occ))
    return LindbladModel(2, np.zeros((2, 2), dtype=complex), tuple(jumps), label)


def dephasing_model(gamma_phi: float, eps: float,
                    label: str = "dephasing") -> LindbladModel:
    """Pure dephasing in the energy eigenbasis.

    The jump operator sigma_z/sqrt(2) at rate gamma_phi makes the
    off-diagonal elements decay exactly as exp(-gamma_phi t) while the
    populations stay frozen. ``eps`` only sets the energy scale of the
    bookkeeping; the rotating-frame generator does not depend on it.
    """
    if gamma_phi <= 0.0:
        raise ValueError(f"gamma_phi must be positive, got {gamma_phi!r}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    sz = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex) / math.sqrt(2.0)
    return LindbladModel(2, np.zeros((2, 2), dtype=complex), ((sz, gamma_phi),), label)


def two_atom_model(gamma0: float, g: float, eps: float,
                   label: str = "two_atom") -> LindbladModel:
    """Two qubits decaying into a common zero-temperature environment.

    Local emission rates gamma0 and cross (photon-exchange) rates g*gamma0
    are realized by diagonalizing the 2x2 rate matrix [[1, g], [g, 1]]*gamma0
    into two independent collective channels (L_A +/- L_B)/sqrt(2) with
    rates gamma0*(1 +/- g); the generator is algebraically identical to the
    double-sum dissipator and manifestly completely positive.
    """
    if gamma0 <= 0.0:
        raise ValueError(f"gamma0 must be positive, got {gamma0!r}")
    if not 0.0 <= g <= 1.0:
        raise ValueError(f"exchange ratio g must lie in [0, 1], got {g!r}")
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    la = np.kron(EMISSION, IDENTITY_2)
    lb = np.kron(IDENTITY_2, EMISSION)
    sym = (la + lb) / math.sqrt(2.0)
    asym = (la - lb) / math.sqrt(2.0)
    jumps: list[tuple[np.ndarray, float]] = [(sym, gamma0 * (1.0 + g))]
    if g < 1.0:
        jumps.append((asym, gamma0 * (1.0 - g)))
    return LindbladModel(4, np.zeros((4, 4), dtype=complex), tuple(jumps), label)


def exchange_unitary_model(j_coupling: float,
                           label: str = "exchange_unitary") -> LindbladModel:
    """Purely Hamiltonian excitation exchange J(|ge><eg| + |eg><ge|)."""
    if j_coupling == 0.0:
        raise ValueError("exchange coupling J must be nonzero")
    h = np.zeros((4, 4), dtype=complex)
    h[1, 2] = j_coupling
    h[2, 1] = j_coupling
    return LindbladModel(4, h, (), label)


def lindblad_rhs(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    """rho-dot = -i[H, rho] + sum_k rate_k (L rho L^† - {L^†L, rho}/2)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (model.dim, model.dim):
        raise ValueError(f"state shape {rho.shape} does not match model dim {model.dim}")
    h = model.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for op, rate in model.jumps:
        opd = op.conj().T
        opdo = opd @ op
        out = out + rate * (op @ rho @ opd - 0.5 * (opdo @ rho + rho @ opdo))
    return out


def liouvillian_matrix(model: LindbladModel) -> np.ndarray:
    """Dense matrix of the generator acting on vectorized (row-major) states."""
    d = model.dim
    mat = np.zeros((d * d, d * d), dtype=complex)
    basis = np.zeros((d, d), dtype=complex)
    for k in range(d * d):
        basis.flat[k] = 1.0
        mat[:, k] = lindblad_rhs(model, basis).ravel()
        basis.flat[k] = 0.0
    return mat


def _rk4_propagator(liouvillian: np.ndarray, dt: float) -> np.ndarray:
    """One-step map of classic RK4 for the autonomous linear generator.

    For a time-independent generator the RK4 update is exactly the
    degree-4 Taylor polynomial of exp(dt*L); precomputing it turns every
    step into a single matrix-vector product.
    """
    m = dt * liouvillian
    prop = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, 5):
        term = term @ m / k
        prop = prop + term
    return prop


def integrate(model: LindbladModel, rho0: np.ndarray,
              cfg: IntegratorConfig) -> Trajectory:
    """Propagate ``rho0`` with fixed-step RK4, sampling every ``sample_stride`` steps.

    Stored samples carry the analytic derivative lindblad_rhs(rho). The
    trace is monitored, never renormalized; a sampled state whose smallest
    eigenvalue drops below the positivity floor aborts the run.
    """
    rho0 = require_density(np.asarray(rho0, dtype=complex), what="initial state")
    if rho0.shape != (model.dim, model.dim):
        raise ValueError(f"initial state shape {rho0.shape} does not match "
                         f"model dim {model.dim}")
    n_steps = max(1, int(round(cfg.t_max / cfg.dt)))
    stride = int(cfg.sample_stride)
    prop = _rk4_propagator(liouvillian_matrix(model), cfg.dt)

    times: list[float] = []
    states: list[np.ndarray] = []
    derivs: list[np.ndarray] = []
    min_eig = math.inf

    def take_sample(step: int, vec: np.ndarray) -> None:
        nonlocal min_eig
        t = step * cfg.dt
        rho = vec.reshape(model.dim, model.dim).copy()
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        min_eig = min(min_eig, lo)
        if lo < POSITIVITY_FLOOR:
            raise PositivityError(t, lo)
        herm_dev = float(np.abs(rho - rho.conj().T).max())
        if herm_dev > HERMITICITY_TOL:
            raise IntegrationError(f"hermiticity drift {herm_dev:.3e} at t = {t:.6g}")
        tr_dev = abs(float(np.real(np.trace(rho))) - 1.0)
        if tr_dev > TRACE_TOL:
            raise IntegrationError(f"trace drift {tr_dev:.3e} at t = {t:.6g}")
        times.append(t)
        states.append(rho)
        derivs.append(lindblad_rhs(model, rho))

    y = rho0.ravel().copy()
    take_sample(0, y)
    for step in range(1, n_steps + 1):
        y = prop @ y
        if step % stride == 0 or step == n_steps:
            take_sample(step, y)

    return Trajectory(np.array(times), np.array(states), np.array(derivs),
                      model, min_eig)
