"""Brute-force state-vector verifier for every closed-form channel quantity.

Builds the explicit joint spin-meter state, applies the evolution factors
one unitary at a time, projects onto the final magnetic state, and obtains
the QFI from central finite differences of the normalized state.  Nothing
here shares code with the analytic series in ``channel``.

The n meter copies act only through the d-dimensional span of the n-fold
basis products, so the meter factor is kept d-dimensional with effective
eigenvalues n*u_k.  Rotation signs are fixed so the projected amplitudes
reproduce the positive-corner d-matrix convention of ``wigner``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import P_FLOOR, ChannelParams, VanishingPostselectionError
from .meter import MeterSpec
from .wigner import HalfInt, m_values

__all__ = [
    "ConjugatePointError",
    "SpinOps",
    "DenseState",
    "evolve_joint",
    "qfi_finite_difference",
    "gauge_invariance_check",
    "noncyclic_geometric_phase",
    "parallel_transport_residual",
]


class ConjugatePointError(ArithmeticError):
    """An intermediate overlap along the path vanished."""


# The projected amplitudes come out of dense rotations as sums of O(1)
# terms, so below this squared norm they are roundoff-dominated and the
# normalized state carries no usable digits.
ORACLE_P_FLOOR = 1e-24


@dataclass(frozen=True)
class SpinOps:
    """Dense spin matrices in the descending-m basis (m = j, j-1, ..., -j)."""

    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jt: np.ndarray

    @classmethod
    def for_spin(cls, j: HalfInt) -> "SpinOps":
        return _spin_ops(j.twice)

    @property
    def dim(self) -> int:
        return self.jz.shape[0]


@lru_cache(maxsize=64)
def _spin_ops(twice_j: int) -> SpinOps:
    jv = 0.5 * twice_j
    m = np.array([0.5 * t for t in range(twice_j, -twice_j - 2, -2)])
    dim = twice_j + 1
    jz = np.diag(m).astype(complex)
    jp = np.zeros((dim, dim), dtype=complex)
    for a in range(1, dim):
        # raising operator connects m[a] -> m[a] + 1 = m[a-1]
        jp[a - 1, a] = np.sqrt(jv * (jv + 1.0) - m[a] * (m[a] + 1.0))
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = (jp - jm) / 2j
    jt = jv * np.eye(dim, dtype=complex)
    return SpinOps(jx=jx, jy=jy, jz=jz, jt=jt)


def _expi_herm(h: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(i t H) for Hermitian H via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T


@lru_cache(maxsize=64)
def _half_turn_x(twice_j: int, sign: int) -> np.ndarray:
    ops = _spin_ops(twice_j)
    return _expi_herm(ops.jx, sign * 0.5 * np.pi)


@dataclass(frozen=True)
class DenseState:
    """Joint spin-meter amplitudes, shape (2j+1, d), system index first."""

    amplitudes: np.ndarray
    dims: tuple[int, int]

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def project_system(self, j: HalfInt, m_f: HalfInt) -> np.ndarray:
        idx = (j.twice - m_f.twice) // 2
        return self.amplitudes[idx].copy()


def _joint_state(params: ChannelParams, spec: MeterSpec, lam: float) -> DenseState:
    tj = params.j.twice
    dim = tj + 1
    d = spec.d
    m = np.array([0.5 * t for t in range(tj, -tj - 2, -2)])
    jv = 0.5 * tj
    u_eff = spec.n * spec.u_values()

    psi = np.zeros((dim, d), dtype=complex)
    idx_i = (tj - params.m_i.twice) // 2
    psi[idx_i, :] = 1.0 / np.sqrt(d)

    psi = _half_turn_x(tj, -1) @ psi
    # coupling exp(i lam (J_t + J_z) (x) U): diagonal in both indices
    psi = psi * np.exp(1j * lam * np.outer(jv + m, u_eff))
    # controlled phase exp(i theta (J_t - J_z)); diagonal on the system
    psi = psi * np.exp(1j * params.theta * (jv - m))[:, None]
    psi = _half_turn_x(tj, +1) @ psi
    return DenseState(amplitudes=psi, dims=(dim, d))


def evolve_joint(params: ChannelParams, spec: MeterSpec) -> np.ndarray:
    """Unnormalized postselected meter state Phi; |Phi|^2 equals P."""
    state = _joint_state(params, spec, params.lam)
    return state.project_system(params.j, params.m_f)


def _normalized_meter(params: ChannelParams, spec: MeterSpec, lam: float) -> np.ndarray:
    phi = _joint_state(params, spec, lam).project_system(params.j, params.m_f)
    norm_sq = float(np.sum(np.abs(phi) ** 2))
    if norm_sq <= max(P_FLOOR, ORACLE_P_FLOOR):
        raise VanishingPostselectionError(
            f"postselection probability {norm_sq:.3e} numerically unresolvable at lam={lam}"
        )
    return phi / np.sqrt(norm_sq)


def _qfi_from_states(psi_c, psi_p, psi_m, h: float) -> float:
    dpsi = (psi_p - psi_m) / (2.0 * h)
    total = float(np.real(np.vdot(dpsi, dpsi)))
    overlap = np.vdot(psi_c, dpsi)
    return 4.0 * (total - abs(overlap) ** 2)


def qfi_finite_difference(
    params: ChannelParams,
    spec: MeterSpec,
    h: float | None = None,
    richardson: bool = False,
) -> float:
    """Observable QFI from central differences of the normalized state.

    With ``richardson`` the h and h/2 estimates are combined to cancel the
    leading O(h^2) truncation term.
    """
    if h is None:
        h = 1e-6 * (1.0 + abs(params.lam))
    if h <= 0.0 or params.lam + h == params.lam:
        raise ValueError(f"finite-difference step {h} underflows at lam={params.lam}")

    def estimate(step: float) -> float:
        psi_c = _normalized_meter(params, spec, params.lam)
        psi_p = _normalized_meter(params, spec, params.lam + step)
        psi_m = _normalized_meter(params, spec, params.lam - step)
        return _qfi_from_states(psi_c, psi_p, psi_m, step)

    if not richardson:
        return estimate(h)
    coarse = estimate(h)
    fine = estimate(0.5 * h)
    return (4.0 * fine - coarse) / 3.0


def gauge_invariance_check(
    params: ChannelParams,
    spec: MeterSpec,
    phase_poly,
    h: float | None = None,
) -> float:
    """|QFI(gauged path) - QFI(path)| for the gauge exp(i phi(lam)).

    ``phase_poly`` lists polynomial coefficients of phi, lowest order first.
    """
    if h is None:
        h = 1e-6 * (1.0 + abs(params.lam))
    coeffs = np.asarray(phase_poly, dtype=float)

    def phi(lam: float) -> float:
        return float(np.polynomial.polynomial.polyval(lam, coeffs)) if coeffs.size else 0.0

    lam0 = params.lam
    psi_c = _normalized_meter(params, spec, lam0)
    psi_p = _normalized_meter(params, spec, lam0 + h)
    psi_m = _normalized_meter(params, spec, lam0 - h)
    plain = _qfi_from_states(psi_c, psi_p, psi_m, h)
    gauged = _qfi_from_states(
        psi_c * np.exp(1j * phi(lam0)),
        psi_p * np.exp(1j * phi(lam0 + h)),
        psi_m * np.exp(1j * phi(lam0 - h)),
        h,
    )
    return abs(gauged - plain)


def _meter_path_state(spec: MeterSpec, lam: float) -> np.ndarray:
    return np.exp(1j * spec.n * spec.u_values() * lam) / np.sqrt(spec.d)


def noncyclic_geometric_phase(
    spec: MeterSpec, lambda_start: float, lambda_end: float, steps: int
) -> tuple[float, float, float]:
    """(theta_tot, theta_dyn, theta_geo) along a straight coupling path.

    theta_tot is the phase between the endpoint states, theta_dyn the
    accumulated phase of successive overlaps, and theta_geo their
    difference; the discrete product converges to the integral form.
    """
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if lambda_end == lambda_start:
        return 0.0, 0.0, 0.0
    lams = np.linspace(lambda_start, lambda_end, steps)
    states = [_meter_path_state(spec, lam) for lam in lams]
    first, last = states[0], states[-1]

    total_overlap = np.vdot(first, last)
    if abs(total_overlap) < 1e-12:
        raise ConjugatePointError("endpoint overlap vanishes; total phase undefined")
    theta_tot = float(np.angle(total_overlap))

    theta_dyn = 0.0
    for a, b in zip(states[:-1], states[1:]):
        ov = np.vdot(a, b)
        if abs(ov) < 1e-12:
            raise ConjugatePointError("intermediate overlap vanishes along the path")
        theta_dyn += float(np.angle(ov))
    return theta_tot, theta_dyn, theta_tot - theta_dyn


def parallel_transport_residual(spec: MeterSpec, lam: float, h: float = 1e-6) -> float:
    """|Im <chi | d_lambda chi>| of the meter path by central differences.

    Zero exactly when the eigenvalue spectrum is balanced (parallel
    transport); cross-checks ``meter.parallel_transport_term``.
    """
    chi_c = _meter_path_state(spec, lam)
    chi_p = _meter_path_state(spec, lam + h)
    chi_m = _meter_path_state(spec, lam - h)
    dchi = (chi_p - chi_m) / (2.0 * h)
    return abs(float(np.imag(np.vdot(chi_c, dchi))))
