"""Dense Hermitian linear algebra for 2x2 and 4x4 matrices.

Provides the Pauli basis, Hermiticity checks, and a cyclic Jacobi
eigensolver with complex (phase-augmented) plane rotations.
"""

from __future__ import annotations

import math

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: Stack of the three Pauli matrices, shape (3, 2, 2).
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])

HERMITIAN_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Jacobi sweep limit reached before the off-diagonal norm target."""


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.abs(m - m.conj().T).max() <= tol)


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL,
                      what: str = "matrix") -> np.ndarray:
    """Return ``m`` as a complex array, raising if it is not Hermitian."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what}: expected a square matrix, got shape {m.shape}")
    dev = float(np.abs(m - m.conj().T).max())
    if dev > tol:
        raise ValueError(f"{what}: not Hermitian (max |M - M^†| = {dev:.3e} > {tol:.1e})")
    return m


def pauli_vector(m: np.ndarray) -> np.ndarray:
    """Real 3-vector (tr(m sigma_x), tr(m sigma_y), tr(m sigma_z)) of a 2x2 Hermitian m."""
    m = np.asarray(m, dtype=complex)
    return np.real(np.einsum("kij,ji->k", PAULIS, m))


def offdiagonal_norm(m: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    m = np.asarray(m)
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _jacobi_rotation(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero a[p, q] (p < q) by a unitary plane rotation; update a and v in place.

    The rotation is the real Jacobi rotation of the phase-reduced 2x2 block:
    with a[p, q] = |a_pq| u, the unitary diag(1, conj(u)) makes the block real
    symmetric, then the classic angle choice annihilates the off-diagonal.
    """
    apq = a[p, q]
    mod = abs(apq)
    if mod == 0.0:
        return
    u = apq / mod
    tau = (a[q, q].real - a[p, p].real) / (2.0 * mod)
    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.sqrt(1.0 + t * t)
    s = t * c

    r = np.eye(a.shape[0], dtype=complex)
    r[p, p] = c
    r[p, q] = s
    r[q, p] = -s * u.conjugate()
    r[q, q] = c * u.conjugate()

    a[...] = r.conj().T @ a @ r
    v[...] = v @ r


def jacobi_hermitian(m: np.ndarray, tol: float = 1e-12,
                     max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose a Hermitian matrix by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, eigenvector columns). Convergence target
    is off-diagonal Frobenius norm below ``tol``; exceeding ``max_sweeps``
    raises ConvergenceError.
    """
    a = require_hermitian(m, what="jacobi input").copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        if offdiagonal_norm(a) < tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                _jacobi_rotation(a, v, p, q)
    else:
        raise ConvergenceError(
            f"Jacobi did not reach off-diagonal norm {tol:.1e} "
            f"in {max_sweeps} sweeps (residual {offdiagonal_norm(a):.3e})")
    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]
