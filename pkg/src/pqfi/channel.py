"""Compression-channel engine: postselection probability and QFI breakdown.

The channel operator K projects the joint spin-meter evolution onto fixed
initial/final magnetic states; acting on mode k of the meter it reduces to
the rotation element d^(j)_{m_f,m_i}(beta_k) with beta_k = theta - n u_k lam.
All quantities below derive from that series:

    P       = (1/d) sum_k d(beta_k)^2
    Q_total = <dK^dag dK>   = (n^2/d) sum_k u_k^2 |A_k|^2
    Q_par   = |<K^dag dK>|^2 = (n^2/d^2) |sum_k u_k d(beta_k) A_k|^2
    A_k     = i j d(beta_k) - d'(beta_k)

and the observable QFI is I_perp = 4 P^-2 (Q_total P - Q_par).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meter import MeterSpec, expect_O, meter_diagonal, parallel_transport_term
from .wigner import DomainError, HalfInt, valid_magnetic, wigner_d, wigner_d_deriv

__all__ = [
    "P_FLOOR",
    "VanishingPostselectionError",
    "ChannelParams",
    "QfiBreakdown",
    "EstimationBudget",
    "postselection_probability",
    "q_total",
    "q_parallel",
    "qfi_breakdown",
    "snr_bound",
    "cramer_rao_uncertainty",
    "interference_probability_qubit",
    "qubit_fringe_terms",
    "extremal_grid",
]

# Below this probability the conditional state is undefined and the QFI diverges.
P_FLOOR = 1e-300


class VanishingPostselectionError(ArithmeticError):
    """Postselection probability at or below the floor; QFI undefined."""


@dataclass(frozen=True)
class ChannelParams:
    """Coupling lam, postselection phase theta, spin j and selected states.

    Defaults to extremal selection m_i = j, m_f = -j (highest weight in,
    lowest weight out), for which the rotation element has the closed form
    sin(beta/2)**(2j).
    """

    lam: float
    theta: float
    j: HalfInt
    m_i: HalfInt | None = None
    m_f: HalfInt | None = None

    def __post_init__(self) -> None:
        j = self.j if isinstance(self.j, HalfInt) else HalfInt.from_value(self.j)
        object.__setattr__(self, "j", j)
        m_i = self.m_i if self.m_i is not None else j
        m_f = self.m_f if self.m_f is not None else -j
        m_i = m_i if isinstance(m_i, HalfInt) else HalfInt.from_value(m_i)
        m_f = m_f if isinstance(m_f, HalfInt) else HalfInt.from_value(m_f)
        object.__setattr__(self, "m_i", m_i)
        object.__setattr__(self, "m_f", m_f)
        for name, m in (("m_i", m_i), ("m_f", m_f)):
            if not valid_magnetic(j, m):
                raise DomainError(f"({j}, {m}) is not a valid (j, {name}) pair")

    @property
    def extremal(self) -> bool:
        return self.m_i.twice == self.j.twice and self.m_f.twice == -self.j.twice

    def with_theta(self, theta: float) -> "ChannelParams":
        return ChannelParams(self.lam, theta, self.j, self.m_i, self.m_f)

    def with_lambda(self, lam: float) -> "ChannelParams":
        return ChannelParams(lam, self.theta, self.j, self.m_i, self.m_f)


@dataclass(frozen=True)
class QfiBreakdown:
    """Every channel quantity at one (lam, theta) point.

    baseline is the no-postselection QFI bound (2j)^2, the squared spread
    of the system generator spectrum.
    """

    p: float
    q_total: float
    q_parallel: float
    i_total: float
    i_parallel: float
    i_perp: float
    t_per_trial: float
    baseline: float

    def normalized(self, n: int) -> "QfiBreakdown":
        """Same breakdown with the QFI-type entries divided by n^2."""
        s = 1.0 / (n * n)
        return QfiBreakdown(
            p=self.p,
            q_total=self.q_total * s,
            q_parallel=self.q_parallel * s,
            i_total=self.i_total * s,
            i_parallel=self.i_parallel * s,
            i_perp=self.i_perp * s,
            t_per_trial=self.t_per_trial * s,
            baseline=self.baseline,
        )


@dataclass(frozen=True)
class EstimationBudget:
    """Number of (attempted) measurement trials M."""

    trials: int = 1

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


def _series_terms(params: ChannelParams, spec: MeterSpec, theta=None, lam=None):
    """(P, Q_total, Q_parallel) for scalars or broadcastable theta/lam arrays."""
    u = spec.u_values()
    n = spec.n
    theta = params.theta if theta is None else theta
    lam = params.lam if lam is None else lam
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    # beta has shape (..., d) with the mode index last
    beta = theta[..., None] - n * u * lam[..., None]
    tj = params.j.twice
    jv = 0.5 * tj

    if tj == 0:
        shape = np.broadcast_shapes(theta.shape, lam.shape)
        return np.ones(shape), np.zeros(shape), np.zeros(shape)

    if params.extremal:
        s = np.sin(0.5 * beta)
        d_val = s**tj  # sin^(2j)
        p = np.mean(d_val * d_val, axis=-1)
        qt = (n * n * jv * jv) * np.mean(u * u * s ** (2 * tj - 2), axis=-1)
        series = np.mean(u * s ** (2 * tj - 1) * np.exp(0.5j * n * u * lam[..., None]), axis=-1)
        qp = (n * n * jv * jv) * np.abs(series) ** 2
    else:
        d_val = wigner_d(params.j, params.m_f, params.m_i, beta)
        d_der = wigner_d_deriv(params.j, params.m_f, params.m_i, beta)
        p = np.mean(d_val * d_val, axis=-1)
        a_sq = jv * jv * d_val * d_val + d_der * d_der
        qt = n * n * np.mean(u * u * a_sq, axis=-1)
        series = np.mean(u * d_val * (1j * jv * d_val - d_der), axis=-1)
        qp = n * n * np.abs(series) ** 2
    return p, qt, qp


def postselection_probability(params: ChannelParams, spec: MeterSpec) -> float:
    """P = (1/d) sum_k d^(j)_{m_f,m_i}(beta_k)^2."""
    p, _, _ = _series_terms(params, spec)
    return float(p)


def q_total(params: ChannelParams, spec: MeterSpec) -> float:
    """Average total channel change <dK^dag dK>."""
    _, qt, _ = _series_terms(params, spec)
    return float(qt)


def q_parallel(params: ChannelParams, spec: MeterSpec) -> float:
    """Parallel channel change |<K^dag dK>|^2."""
    _, _, qp = _series_terms(params, spec)
    return float(qp)


def _assemble(p, qt, qp, baseline):
    """Vectorized QFI assembly; invalid (p <= floor) entries become NaN."""
    p = np.asarray(p, dtype=float)
    bad = p <= P_FLOOR
    safe_p = np.where(bad, 1.0, p)
    i_total = 4.0 * qt / safe_p
    i_parallel = 4.0 * qp / (safe_p * safe_p)
    i_perp = i_total - i_parallel
    # Cauchy-Schwarz guarantees i_perp >= 0; clip roundoff-scale negatives.
    i_perp = np.where((i_perp < 0.0) & (i_perp > -1e-10 * np.abs(i_total)), 0.0, i_perp)
    t = p * i_perp
    nan = np.nan
    return (
        np.where(bad, nan, i_total),
        np.where(bad, nan, i_parallel),
        np.where(bad, nan, i_perp),
        np.where(bad, nan, t),
    )


def qfi_breakdown(params: ChannelParams, spec: MeterSpec) -> QfiBreakdown:
    """P, channel changes, the three QFI components and the per-trial yield."""
    p, qt, qp = _series_terms(params, spec)
    p = float(p)
    if p <= P_FLOOR:
        raise VanishingPostselectionError(
            f"postselection probability {p:.3e} at or below floor {P_FLOOR:.0e}"
        )
    i_total, i_parallel, i_perp, t = _assemble(p, float(qt), float(qp), None)
    baseline = float(params.j.twice) ** 2  # (2j)^2
    return QfiBreakdown(
        p=p,
        q_total=float(qt),
        q_parallel=float(qp),
        i_total=float(i_total),
        i_parallel=float(i_parallel),
        i_perp=float(i_perp),
        t_per_trial=float(t),
        baseline=baseline,
    )


def snr_bound(params: ChannelParams, spec: MeterSpec, lambda_true: float) -> float:
    """Largest attainable signal-to-noise ratio lambda_true * sqrt(I_perp)."""
    bd = qfi_breakdown(params, spec)
    return lambda_true * np.sqrt(bd.i_perp)


def cramer_rao_uncertainty(
    params: ChannelParams, spec: MeterSpec, budget: EstimationBudget
) -> float:
    """Best-case estimator uncertainty 1 / sqrt(M * I_perp)."""
    bd = qfi_breakdown(params, spec)
    return 1.0 / np.sqrt(budget.trials * bd.i_perp)


def interference_probability_qubit(theta: float, spec: MeterSpec, lam: float) -> float:
    """Fringe form (1/2)[1 - |<O>| cos(theta - phase)] of P for spin 1/2.

    Identical to ``postselection_probability`` with extremal j = 1/2; kept as
    an independent route for cross-checking.
    """
    e = expect_O(spec, lam)
    return 0.5 * (1.0 - e.modulus * np.cos(theta - e.phase))


def qubit_fringe_terms(spec: MeterSpec, lam: float):
    """Scalars fixing the whole j = 1/2 landscape: (visibility, phase, QT, S0, S).

    For spin 1/2 the channel quantities reduce to meter moments:
    QT = n^2 sum(u^2) / (4d), Q_par(theta) = (n/(4d))^2 |S - e^{i theta} S0|^2
    with S0 = sum(u) and S = sum(u e^{i n u lam}).
    """
    u = spec.u_values()
    n = spec.n
    e = expect_O(spec, lam)
    qt = n * n * float(np.sum(u * u)) / (4.0 * spec.d)
    s0 = float(np.sum(u))
    s = complex(np.sum(u * meter_diagonal(spec, lam)))
    return e, qt, s0, s


def qubit_landscape(spec: MeterSpec, lam: float, theta: np.ndarray):
    """(P, QT, Qpar) over a theta array for spin 1/2, O(d) once then O(1) per point."""
    e, qt, s0, s = qubit_fringe_terms(spec, lam)
    theta = np.asarray(theta, dtype=float)
    p = 0.5 * (1.0 - e.modulus * np.cos(theta - e.phase))
    scale = (spec.n / (4.0 * spec.d)) ** 2
    qp = scale * (abs(s) ** 2 + s0 * s0 - 2.0 * s0 * np.abs(s) * np.cos(theta - np.angle(s)))
    return p, np.full_like(p, qt), qp


def extremal_grid(
    j: HalfInt,
    spec: MeterSpec,
    lam: np.ndarray,
    theta: np.ndarray,
    trials: int = 1,
    chunk: int = 1 << 18,
):
    """All sweep quantities on the (lam, theta) product grid.

    Returns a dict of (len(lam), len(theta)) arrays keyed by the CSV column
    names; entries where P falls below the floor are NaN.
    """
    lam = np.asarray(lam, dtype=float)
    theta = np.asarray(theta, dtype=float)
    nl, nt = lam.size, theta.size
    params = ChannelParams(lam=0.0, theta=0.0, j=j)
    out = {
        name: np.empty((nl, nt))
        for name in ("P", "QT", "Qpar", "IT", "Ipar", "Iperp", "T", "SNR", "dlambda")
    }
    rows_per_chunk = max(1, chunk // max(1, spec.d * nt))
    for start in range(0, nl, rows_per_chunk):
        stop = min(nl, start + rows_per_chunk)
        lam_block = lam[start:stop]
        tt, ll = np.meshgrid(theta, lam_block)
        p, qt, qp = _series_terms(params, spec, theta=tt, lam=ll)
        i_total, i_parallel, i_perp, t = _assemble(p, qt, qp, None)
        out["P"][start:stop] = p
        out["QT"][start:stop] = qt
        out["Qpar"][start:stop] = qp
        out["IT"][start:stop] = i_total
        out["Ipar"][start:stop] = i_parallel
        out["Iperp"][start:stop] = i_perp
        out["T"][start:stop] = t
        with np.errstate(invalid="ignore", divide="ignore"):
            out["SNR"][start:stop] = ll * np.sqrt(i_perp)
            out["dlambda"][start:stop] = 1.0 / np.sqrt(trials * i_perp)
    return out
