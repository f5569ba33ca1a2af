"""Heat, work, temperature, heat capacity and entropy production for qubits.

Two bookkeeping conventions run side by side:

* Paradigm 1 (Hamiltonian split): work is the energy change driven by the
  Hamiltonian, dW = -B.dv, and heat the rest, dQ = -dB.v.
* Paradigm 2 (spectral split): heat is the part of the energy change that
  moves the density-matrix eigenvalues (and hence the entropy),
  dQ = -dB (Bhat.v); work is the remainder, including the rotational term
  dW' = -B dBhat.v that pays for turning the Bloch vector in the field.

Temperatures and heat capacities use a three-way result: a finite float,
``inf`` (infinite-temperature marker) or ``nan`` (undefined marker).
Audits and serialization treat the markers explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .linalg import PAULIS
from .states import (
    UNITS,
    BlochState,
    EffectiveField,
    bloch_to_density,
    eigendecompose,
    entropy_of_modulus,
    internal_energy,
)

K_B = UNITS.k_b

NEAR_PURE = 1.0 - 1e-12   # above this, arctanh limits apply symbolically
ZERO_MODULUS = 1e-15      # below this the Bloch direction is undefined
PERP_TOL = 1e-12          # |Bhat.vhat| below this counts as theta = pi/2

FIRST_LAW_RTOL = 1e-5
CLAUSIUS_TOL = 1e-5


def p1_rates(b: BlochState, bdot: np.ndarray, v: EffectiveField,
             vdot: np.ndarray | None = None) -> tuple[float, float]:
    """Paradigm-1 (heat, work) rates: q1 = -Bdot.v, w1 = -B.vdot."""
    q1 = -float(np.dot(bdot, v.vec))
    w1 = 0.0 if vdot is None else -float(np.dot(b.vec, vdot))
    return q1, w1


def p2_rates_bloch(b: BlochState, bdot: np.ndarray, v: EffectiveField,
                   vdot: np.ndarray | None = None) -> tuple[float, float, float]:
    """Paradigm-2 (heat, work, rotational-work) rates in Bloch form.

    q2 = -(dB/dt)(Bhat.v) with dB/dt = B.Bdot/B; w2 = dE/dt - q2 and
    wprime = w2 - w1. At B = 0 the 0/0 modulus derivative is resolved by
    the spectral form, which stays meaningful there.
    """
    q1, w1 = p1_rates(b, bdot, v, vdot)
    de = q1 + w1
    bm = b.modulus
    if bm <= ZERO_MODULUS:
        rho = bloch_to_density(b)
        rhodot = 0.5 * np.einsum("k,kij->ij", np.asarray(bdot, float), PAULIS)
        h = -np.einsum("k,kij->ij", v.vec, PAULIS)
        hdot = None if vdot is None else -np.einsum("k,kij->ij",
                                                    np.asarray(vdot, float), PAULIS)
        q2, w2 = p2_rates_spectral(rho, rhodot, h, hdot)
        return q2, w2, w2 - w1
    db_dt = float(np.dot(b.vec, bdot)) / bm
    q2 = -db_dt * float(np.dot(b.vec, v.vec)) / bm
    w2 = de - q2
    return q2, w2, w2 - w1


def p2_rates_spectral(rho: np.ndarray, rhodot: np.ndarray, h: np.ndarray,
                      hdot: np.ndarray | None = None) -> tuple[float, float]:
    """Paradigm-2 (heat, work) rates from the instantaneous spectrum.

    q2 = sum_j <psi_j|rhodot|psi_j> <psi_j|H|psi_j>, using the first-order
    identity lambda-dot_j = <psi_j|rhodot|psi_j>; w2 closes the first law:
    w2 = tr(Hdot rho) + tr(H rhodot) - q2. Works for dimensions 2 and 4.

    An unresolved degeneracy falls back to the Bloch form in dimension 2
    (where it can only mean rho and rhodot are both proportional to the
    identity) and yields NaN rates in dimension 4.
    """
    rho = np.asarray(rho, dtype=complex)
    rhodot = np.asarray(rhodot, dtype=complex)
    h = np.asarray(h, dtype=complex)
    de = float(np.real(np.trace(h @ rhodot)))
    if hdot is not None:
        de += float(np.real(np.trace(np.asarray(hdot, complex) @ rho)))
    spectrum = eigendecompose(rho, rhodot=rhodot)
    if spectrum.degenerate and rho.shape[0] == 4:
        return math.nan, math.nan
    # a flagged dim-2 spectrum means rhodot is scalar on the degenerate
    # subspace, so the diagonal sums below are basis-independent anyway
    vecs = spectrum.eigenvectors
    lam_dot = np.real(np.einsum("ij,ik,kj->j", vecs.conj(), rhodot, vecs))
    h_diag = np.real(np.einsum("ij,ik,kj->j", vecs.conj(), h, vecs))
    q2 = float(np.dot(lam_dot, h_diag))
    return q2, de - q2


def rotational_work_rate(b: BlochState, bdot: np.ndarray,
                         v: EffectiveField) -> float:
    """Rate of the rotational work dW' = -B dBhat.v.

    Equals the torque form -(B x v).d(theta)-vector and C_l1 * eps * d(theta)/dt;
    zero at the poles (no lever arm) and at B = 0.
    """
    bm = b.modulus
    if bm <= ZERO_MODULUS:
        return 0.0
    bvec = b.vec
    bhat = bvec / bm
    dbhat = np.asarray(bdot, float) / bm - bhat * (float(np.dot(bhat, bdot)) / bm)
    return -bm * float(np.dot(dbhat, v.vec))


def temperature_p1(b: BlochState, v: EffectiveField) -> float:
    """T1 = eps / (k_B (Bhat.vhat) arctanh B).

    Markers: inf for the maximally mixed state, NaN when the Bloch vector
    is orthogonal to the field (temperature not defined), 0 for pure
    states away from that plane.
    """
    bm = b.modulus
    if bm <= ZERO_MODULUS:
        return math.inf
    c = float(np.dot(b.vec, v.unit)) / bm
    if abs(c) <= PERP_TOL:
        return math.nan
    if bm >= NEAR_PURE:
        return 0.0
    return v.eps / (K_B * c * math.atanh(bm))


def temperature_p2(b: BlochState, v: EffectiveField) -> float:
    """T2 = eps (Bhat.vhat) / (k_B arctanh B).

    Markers: inf only for the maximally mixed state; zero for pure states
    and for states with the Bloch vector orthogonal to the field.
    """
    bm = b.modulus
    if bm <= ZERO_MODULUS:
        return math.inf
    if bm >= NEAR_PURE:
        return 0.0
    c = float(np.dot(b.vec, v.unit)) / bm
    if abs(c) <= PERP_TOL:
        return 0.0
    return v.eps * c / (K_B * math.atanh(bm))


def heat_capacity_p1(b: BlochState, v: EffectiveField) -> float:
    """Paradigm-1 heat capacity, with the full projection B cos(theta).

        C1 = k_B B (1-B^2) arctanh(B)^2 (B.vhat)^2
             / [arctanh(B) (B^2 - (B.vhat)^2)(1-B^2) + B (B.vhat)]

    evaluated verbatim; a vanishing denominator yields NaN. For incoherent
    states this reduces to B * k_B (1-B^2) arctanh(B)^2, which differs from
    the equilibrium curve by the factor B; see heat_capacity_fd for the
    finite-difference cross-check of both paradigms' zero-work paths.
    """
    bm = b.modulus
    if bm <= ZERO_MODULUS or bm >= NEAR_PURE:
        return 0.0
    c = float(np.dot(b.vec, v.unit)) / bm
    at = math.atanh(bm)
    # common factor B^2 removed from numerator and denominator
    bracket = at * (1.0 - c * c) * (1.0 - bm * bm) + c
    if abs(bracket) < 1e-12:
        return math.nan
    return K_B * bm * (1.0 - bm * bm) * at * at * c * c / bracket


def heat_capacity_p2(b: BlochState, v: EffectiveField) -> float:
    """Paradigm-2 heat capacity C2 = k_B [x / cosh x]^2 with x = (Bhat.v)/(k_B T2).

    The closed form of T2 reduces x to arctanh(B), so C2 depends on the
    modulus alone; pure states give 0 (the x -> inf limit) and at thermal
    equilibrium C2 is the classical two-level curve.
    """
    bm = b.modulus
    if bm >= NEAR_PURE:
        return 0.0
    x = math.atanh(bm)
    r = x / math.cosh(x)
    return K_B * r * r


def heat_capacity_fd(b: BlochState, v: EffectiveField, paradigm: int = 2,
                     step: float = 1e-5) -> float:
    """Central-difference dE/dT along the paradigm's zero-work path.

    Both paths vary the modulus B at fixed direction and fixed field
    (fixed eps and Bhat, hence also fixed Bhat.v); they differ in which
    temperature is differentiated. Returns NaN when the stencil leaves
    (0, 1) or the temperature difference vanishes.
    """
    bm = b.modulus
    if not step < bm < NEAR_PURE - step:
        return math.nan
    bhat = b.unit
    temp = temperature_p2 if paradigm == 2 else temperature_p1
    hi = BlochState.from_vec(bhat * (bm + step))
    lo = BlochState.from_vec(bhat * (bm - step))
    dtemp = temp(hi, v) - temp(lo, v)
    if not math.isfinite(dtemp) or dtemp == 0.0:
        return math.nan
    return (internal_energy(hi, v) - internal_energy(lo, v)) / dtemp


def entropy_production_p1_rate(b: BlochState, bdot: np.ndarray,
                               v: EffectiveField) -> float:
    """Paradigm-1 internal entropy production rate.

    sgen1 = -k_B arctanh(B) [Bhat - (vhat.Bhat) vhat].Bdot; for a fixed
    field this is -k_B arctanh(B) sin(theta) d(B sin theta)/dt, i.e.
    proportional to the coherence change. Zero at B = 0; inf marker at
    exactly pure states.
    """
    bm = b.modulus
    if bm <= ZERO_MODULUS:
        return 0.0
    if bm >= NEAR_PURE:
        return math.inf
    bhat = b.vec / bm
    vhat = v.unit
    proj = bhat - float(np.dot(vhat, bhat)) * vhat
    return -K_B * math.atanh(bm) * float(np.dot(proj, bdot))


def boundary_entropy_rate(q_rate: float, t_sys: float, t_env: float) -> float:
    """Entropy production rate of heat transfer across the boundary.

    q_rate * (1/t_sys - 1/t_env); the caller picks which paradigm's
    (heat, temperature) pair to use. Marker temperatures (NaN, inf, zero)
    or a non-positive environment temperature yield NaN.
    """
    if not (math.isfinite(t_sys) and math.isfinite(t_env)):
        return math.nan
    if t_sys == 0.0 or t_env <= 0.0:
        return math.nan
    if not math.isfinite(q_rate):
        return math.nan
    return q_rate * (1.0 / t_sys - 1.0 / t_env)


def equilibrium_bloch(t_env: float, eps: float = 1.0) -> BlochState:
    """Gibbs-state Bloch vector tanh(eps/(k_B T_env)) along +z (zero T -> the pole)."""
    if t_env < 0.0:
        raise ValueError(f"environment temperature must be >= 0, got {t_env!r}")
    if t_env == 0.0:
        return BlochState(0.0, 0.0, 1.0)
    return BlochState(0.0, 0.0, math.tanh(eps / (K_B * t_env)))


@dataclass(frozen=True)
class EnvironmentSpec:
    """Environment temperature in energy/k_B units; 0 allowed."""

    t_e: float

    def __post_init__(self) -> None:
        if self.t_e < 0.0:
            raise ValueError(f"environment temperature must be >= 0, got {self.t_e!r}")

    @property
    def beta(self) -> float:
        return math.inf if self.t_e == 0.0 else 1.0 / (K_B * self.t_e)


@dataclass(frozen=True)
class ThermoSample:
    """Instantaneous thermodynamic record at one trajectory sample."""

    t: float
    bloch: BlochState
    theta: float
    e: float
    s: float
    q1_rate: float
    w1_rate: float
    q2_rate: float
    w2_rate: float
    wprime_rate: float
    coherence: float
    temp1: float
    temp2: float
    cap1: float
    cap2: float
    sgen1_rate: float
    sgen_ht_rate: float
    flagged: bool = False


@dataclass
class LedgerAudit:
    name: str
    passed: bool
    skipped: bool
    value: float
    tolerance: float
    worst_time: float = math.nan
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.passed or self.skipped

    def verdict(self) -> str:
        if self.skipped:
            return "skip"
        return "PASS" if self.passed else "FAIL"


#: Ledger series keys, in the order they are serialized.
LEDGER_COLUMNS = (
    "t", "bx", "by", "bz", "Bmod", "theta", "E", "S",
    "q1_rate", "w1_rate", "q2_rate", "w2_rate", "wprime_rate",
    "Q1", "W1", "Q2", "W2", "T1", "T2", "C1", "C2",
    "sgen1_rate", "Sgen1", "sgen_ht_rate", "coherence",
)


@dataclass
class ThermoLedger:
    """Columnar time series of rates, state functions and cumulative integrals.

    ``series`` holds the serialized columns; ``cumulative_extra`` carries the
    remaining trapezoid integrals (Wprime, Sgen_ht) that are not part of the
    CSV contract.
    """

    label: str
    series: dict[str, np.ndarray]
    t_env: float | None
    audits: list[LedgerAudit]
    flagged_samples: int = 0
    cumulative_extra: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def t(self) -> np.ndarray:
        return self.series["t"]

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def failed(self) -> bool:
        return any(not a.ok for a in self.audits)

    def total(self, key: str) -> float:
        if key in self.series:
            return float(self.series[key][-1])
        return float(self.cumulative_extra[key][-1])

    def sample(self, i: int) -> ThermoSample:
        s = self.series
        b = BlochState(float(s["bx"][i]), float(s["by"][i]), float(s["bz"][i]))
        return ThermoSample(
            t=float(s["t"][i]), bloch=b, theta=float(s["theta"][i]),
            e=float(s["E"][i]), s=float(s["S"][i]),
            q1_rate=float(s["q1_rate"][i]), w1_rate=float(s["w1_rate"][i]),
            q2_rate=float(s["q2_rate"][i]), w2_rate=float(s["w2_rate"][i]),
            wprime_rate=float(s["wprime_rate"][i]),
            coherence=float(s["coherence"][i]),
            temp1=float(s["T1"][i]), temp2=float(s["T2"][i]),
            cap1=float(s["C1"][i]), cap2=float(s["C2"][i]),
            sgen1_rate=float(s["sgen1_rate"][i]),
            sgen_ht_rate=float(s["sgen_ht_rate"][i]),
            flagged=bool(s["Bmod"][i] <= ZERO_MODULUS or s["Bmod"][i] >= NEAR_PURE),
        )


def cumtrapz_skipping(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Cumulative trapezoid that skips intervals touching non-finite samples.

    Marker samples contribute no area; the running value is carried
    forward across them. Returns an array of the same length starting at 0.
    """
    out = np.zeros_like(t, dtype=float)
    fin = np.isfinite(y)
    acc = 0.0
    for i in range(1, len(t)):
        if fin[i] and fin[i - 1]:
            acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1])
        out[i] = acc
    return out


def _reduced_bloch_series(traj: Trajectory,
                          subsystem: str | None) -> tuple[np.ndarray, np.ndarray]:
    """(B(t), Bdot(t)) arrays of shape (n, 3) for the selected qubit."""
    states = traj.states
    derivs = traj.derivatives
    if traj.dim == 4:
        if subsystem not in ("A", "B"):
            raise ValueError("a 4-dimensional trajectory needs subsystem 'A' or 'B'")
        r = states.reshape(-1, 2, 2, 2, 2)
        d = derivs.reshape(-1, 2, 2, 2, 2)
        if subsystem == "A":
            states = np.einsum("tabcb->tac", r)
            derivs = np.einsum("tabcb->tac", d)
        else:
            states = np.einsum("tabac->tbc", r)
            derivs = np.einsum("tabac->tbc", d)
    bs = np.real(np.einsum("tij,kji->tk", states, PAULIS))
    bdots = np.real(np.einsum("tij,kji->tk", derivs, PAULIS))
    return bs, bdots


def annotate_trajectory(traj: Trajectory, v: EffectiveField,
                        env: EnvironmentSpec | None = None,
                        subsystem: str | None = None,
                        label: str | None = None) -> ThermoLedger:
    """Build the full thermodynamic ledger along a trajectory.

    For 4-dimensional trajectories ``subsystem`` selects the qubit; the
    reduced state and its derivative come from the partial trace of rho
    and of the generator image. Cumulative quantities use the trapezoid
    rule on the stored samples. The boundary entropy rate pairs the
    paradigm-2 heat with the paradigm-2 temperature, matching the
    convention in which no internal production exists.

    First-law (both paradigms) and paradigm-2 Clausius audits are
    evaluated and stored; a breach marks the ledger failed and records the
    worst offending sample time.
    """
    if traj.dim == 2 and subsystem is not None:
        raise ValueError("subsystem selection only applies to 4-dimensional trajectories")
    bs, bdots = _reduced_bloch_series(traj, subsystem)
    t = traj.times
    n = len(t)
    vvec = v.vec
    vhat = v.unit
    eps = v.eps

    cols = {k: np.empty(n, dtype=float) for k in
            ("bx", "by", "bz", "Bmod", "theta", "E", "S",
             "q1_rate", "w1_rate", "q2_rate", "w2_rate", "wprime_rate",
             "T1", "T2", "C1", "C2", "sgen1_rate", "sgen_ht_rate", "coherence")}
    flagged = 0

    for i in range(n):
        b = BlochState.from_vec(bs[i])
        bdot = bdots[i]
        bm = b.modulus
        cols["bx"][i], cols["by"][i], cols["bz"][i] = bs[i]
        cols["Bmod"][i] = bm
        cols["E"][i] = -float(np.dot(bs[i], vvec))
        cols["S"][i] = entropy_of_modulus(bm)
        if bm <= ZERO_MODULUS:
            cols["theta"][i] = math.nan
            cols["coherence"][i] = 0.0
        else:
            c = float(np.dot(bs[i], vhat)) / bm
            c = min(1.0, max(-1.0, c))
            cols["theta"][i] = math.acos(c)
            cols["coherence"][i] = bm * math.sqrt(max(0.0, 1.0 - c * c))
        q1, w1 = p1_rates(b, bdot, v)
        q2, w2, wp = p2_rates_bloch(b, bdot, v)
        cols["q1_rate"][i] = q1
        cols["w1_rate"][i] = w1
        cols["q2_rate"][i] = q2
        cols["w2_rate"][i] = w2
        cols["wprime_rate"][i] = wp
        t1 = temperature_p1(b, v)
        t2 = temperature_p2(b, v)
        cols["T1"][i] = t1
        cols["T2"][i] = t2
        cols["C1"][i] = heat_capacity_p1(b, v)
        cols["C2"][i] = heat_capacity_p2(b, v)
        cols["sgen1_rate"][i] = entropy_production_p1_rate(b, bdot, v)
        cols["sgen_ht_rate"][i] = (boundary_entropy_rate(q2, t2, env.t_e)
                                   if env is not None else math.nan)
        if bm <= ZERO_MODULUS or bm >= NEAR_PURE:
            flagged += 1

    series: dict[str, np.ndarray] = {"t": t.astype(float)}
    series.update(cols)
    series["Q1"] = cumtrapz_skipping(t, cols["q1_rate"])
    series["W1"] = cumtrapz_skipping(t, cols["w1_rate"])
    series["Q2"] = cumtrapz_skipping(t, cols["q2_rate"])
    series["W2"] = cumtrapz_skipping(t, cols["w2_rate"])
    series["Sgen1"] = cumtrapz_skipping(t, cols["sgen1_rate"])
    series = {k: series[k] for k in LEDGER_COLUMNS}
    extra = {"Wprime": cumtrapz_skipping(t, cols["wprime_rate"]),
             "Sgen_ht": cumtrapz_skipping(t, cols["sgen_ht_rate"])}

    audits = _audit_ledger(series, traj.min_eigenvalue)
    return ThermoLedger(label or (subsystem and f"atom{subsystem}") or "atom",
                        series, env.t_e if env is not None else None,
                        audits, flagged, extra)


def _audit_ledger(series: dict[str, np.ndarray],
                  min_eigenvalue: float) -> list[LedgerAudit]:
    t = series["t"]
    de = series["E"] - series["E"][0]
    audits = []
    for name, qk, wk in (("first_law_p1", "Q1", "W1"), ("first_law_p2", "Q2", "W2")):
        gap = np.abs(de - (series[qk] + series[wk]))
        tol = FIRST_LAW_RTOL * max(1.0, abs(float(de[-1])))
        worst = int(np.argmax(gap))
        audits.append(LedgerAudit(name, bool(gap[-1] <= tol), False,
                                  float(gap[-1]), tol, float(t[worst])))

    bm = series["Bmod"]
    t2 = series["T2"]
    markers = (~np.isfinite(t2)).any() or (bm >= NEAR_PURE).any() or (bm <= ZERO_MODULUS).any()
    if markers:
        audits.append(LedgerAudit("clausius_p2", True, True, math.nan, CLAUSIUS_TOL,
                                  note="temperature markers present; audit skipped"))
    else:
        ds = series["S"] - series["S"][0]
        flux = cumtrapz_skipping(t, series["q2_rate"] / t2)
        gap = np.abs(ds - flux)
        worst = int(np.argmax(gap))
        audits.append(LedgerAudit("clausius_p2", bool(gap[-1] <= CLAUSIUS_TOL), False,
                                  float(gap[-1]), CLAUSIUS_TOL, float(t[worst])))

    audits.append(LedgerAudit("positivity", bool(min_eigenvalue >= -1e-7), False,
                              float(min_eigenvalue), -1e-7))
    return audits
