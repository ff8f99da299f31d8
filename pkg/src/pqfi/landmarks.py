"""Characteristic postselection phases of the compression channel.

Three landmarks organize the landscape over the postselection phase:

* ``theta_total_max``    -- maximizes the total QFI; equals the
  Pancharatnam phase of the meter expectation for spin 1/2,
* ``theta_perp_max``     -- maximizes the observable QFI,
* ``theta_parallel_zero`` -- suppresses the parallel channel change and
  maximizes the per-trial yield.

Closed forms are used where they exist; everything else goes through a
deterministic nested-grid search refined by golden-section iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import (
    P_FLOOR,
    ChannelParams,
    VanishingPostselectionError,
    _assemble,
    _series_terms,
    qubit_landscape,
)
from .meter import MeterSpec, expect_O, meter_diagonal

__all__ = [
    "DegenerateLandscapeError",
    "NoSuppressionError",
    "ThetaLandmarks",
    "CoincidenceReport",
    "theta_total_max",
    "theta_parallel_zero",
    "theta_perp_max",
    "coincidence_check",
    "compute_landmarks",
    "golden_section_max",
]

TWO_PI = 2.0 * np.pi

COARSE_POINTS = 4096
REFINE_LEVELS = 3
THETA_TOL = 1e-12

# Closed-form branches assume the weak-coupling regime.
ANALYTIC_MAX_NLAM = 1.0


class DegenerateLandscapeError(ArithmeticError):
    """The landscape carries no theta dependence; an argmax is undefined."""


class NoSuppressionError(ArithmeticError):
    """The parallel change cannot be tuned by theta (no zero exists)."""


@dataclass(frozen=True)
class ThetaLandmarks:
    """The three landmark phases plus the meter Pancharatnam phase.

    A field is None only when computed with ``partial`` and the landmark
    does not exist for the given law (method tag "undefined").
    """

    theta_t: float | None
    theta_perp: float | None
    theta_par: float | None
    pancharatnam: float
    method: dict = field(default_factory=dict)
    degenerate: bool = False


@dataclass(frozen=True)
class CoincidenceReport:
    theta_t: float
    theta_perp: float
    theta_par: float
    max_pairwise_gap: float


def _wrap(theta: float) -> float:
    return float(np.mod(theta, TWO_PI))


def golden_section_max(f, lo: float, hi: float, tol: float = THETA_TOL) -> float:
    """Deterministic golden-section argmax of a unimodal f on [lo, hi]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = float(lo), float(hi)
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _local_maxima_brackets(theta: np.ndarray, vals: np.ndarray, top: int) -> list[tuple[float, float]]:
    """Brackets around the strongest local maxima of a sampled landscape."""
    step = theta[1] - theta[0]
    finite = np.isfinite(vals)
    safe = np.where(finite, vals, -np.inf)
    left = np.roll(safe, 1)
    right = np.roll(safe, -1)
    is_peak = (safe >= left) & (safe >= right) & finite
    idx = np.nonzero(is_peak)[0]
    if idx.size == 0:
        idx = np.array([int(np.argmax(safe))])
    order = idx[np.argsort(safe[idx])[::-1][:top]]
    return [(float(theta[i] - step), float(theta[i] + step)) for i in np.sort(order)]


def _refine_bracket(f_vec, lo: float, hi: float) -> float:
    """Two nested 2048-point grids inside the bracket, then golden polish."""
    a, b = lo, hi
    for _ in range(REFINE_LEVELS - 1):
        theta = np.linspace(a, b, 2048)
        vals = f_vec(theta)
        vals = np.where(np.isfinite(vals), vals, -np.inf)
        best = int(np.argmax(vals))
        step = (b - a) / 2047
        a, b = theta[best] - step, theta[best] + step
    return golden_section_max(lambda t: float(f_vec(np.array([t]))[0]), a, b)


def _nested_argmax(f_vec, aux_center: float | None = None, top: int = 8) -> float:
    """Global argmax over [0, 2*pi) robust to peaks narrower than the grid.

    A 4096-point coarse scan seeds several candidate brackets (the top
    local maxima plus an optional window around ``aux_center``, where
    interference structure concentrates); each is refined by nested grids
    and golden-section iteration.  Near-ties resolve to the smallest theta.
    """
    theta = np.linspace(0.0, TWO_PI, COARSE_POINTS, endpoint=False)
    vals = f_vec(theta)
    if not np.isfinite(vals).any():
        raise VanishingPostselectionError("landscape undefined on the whole grid")
    brackets = _local_maxima_brackets(theta, vals, top)
    if aux_center is not None:
        step = TWO_PI / COARSE_POINTS
        brackets.append((aux_center - step, aux_center + step))
    candidates = [_wrap(_refine_bracket(f_vec, lo, hi)) for lo, hi in brackets]
    values = [float(f_vec(np.array([t]))[0]) for t in candidates]
    values = [-np.inf if not np.isfinite(v) else v for v in values]
    best_val = max(values)
    near = [t for t, v in zip(candidates, values) if v >= best_val - 1e-9 * abs(best_val)]
    return min(near)


# Above this meter dimension the spin-1/2 landscape switches from the exact
# mode-sum to the O(1)-per-point fringe form; the fringe form carries a
# ~1e-9 relative cancellation error in 1 - visibility, so small d stays on
# the mode-sum for optimizer-grade precision.
FRINGE_FORM_MIN_D = 257


def _iperp_landscape(params: ChannelParams, spec: MeterSpec):
    """Vectorized theta -> I_perp with NaN where P is floored."""
    if params.j.twice == 1 and params.extremal and spec.d >= FRINGE_FORM_MIN_D:
        def f_vec(theta):
            p, qt, qp = qubit_landscape(spec, params.lam, theta)
            _, _, i_perp, _ = _assemble(p, qt, qp, None)
            return i_perp
    else:
        def f_vec(theta):
            p, qt, qp = _series_terms(params, spec, theta=theta)
            _, _, i_perp, _ = _assemble(p, qt, qp, None)
            return i_perp
    return f_vec


def _itotal_landscape(params: ChannelParams, spec: MeterSpec):
    def f_vec(theta):
        p, qt, _ = _series_terms(params, spec, theta=theta)
        bad = p <= P_FLOOR
        return np.where(bad, np.nan, 4.0 * qt / np.where(bad, 1.0, p))
    return f_vec


def _qpar_landscape(params: ChannelParams, spec: MeterSpec):
    def f_vec(theta):
        _, _, qp = _series_terms(params, spec, theta=theta)
        return qp
    return f_vec


def theta_total_max(params: ChannelParams, spec: MeterSpec) -> float:
    """Argmax of the total QFI over theta.

    For spin 1/2 the total QFI is 4*QT/P with constant QT, so the maximum
    sits at the fringe minimum: the Pancharatnam phase of the meter
    expectation.  Larger spins fall back to the numeric argmax.
    """
    if params.lam == 0.0:
        return 0.0
    e = expect_O(spec, params.lam)
    if params.j.twice == 1 and params.extremal and e.phase_defined:
        return _wrap(e.phase)
    aux = _wrap(e.phase) if e.phase_defined else None
    return _nested_argmax(_itotal_landscape(params, spec), aux_center=aux)


def theta_parallel_zero(params: ChannelParams, spec: MeterSpec) -> float:
    """The theta suppressing the parallel channel change.

    For spin 1/2 this aligns exp(i theta) * sum(u) with the weighted sum
    S = sum(u exp(i n u lam)); the shifted-spectrum law at d = 2 gives the
    exact zero theta = n*lam.  At lam = 0 every theta qualifies and 0 is
    returned by convention.
    """
    if params.lam == 0.0:
        return 0.0
    n, lam = spec.n, params.lam
    if params.j.twice == 1 and params.extremal:
        if spec.law == "pancharatnam" and spec.d == 2:
            return _wrap(n * lam)
        u = spec.u_values()
        s0 = float(np.sum(u))
        s = complex(np.sum(u * meter_diagonal(spec, lam)))
        if abs(s0) < 1e-15 * max(1.0, float(np.max(np.abs(u)))):
            raise NoSuppressionError(
                "eigenvalue spectrum sums to zero; the parallel change has no theta dependence"
            )
        return _wrap(float(np.angle(s / s0)))
    qp = _qpar_landscape(params, spec)
    e = expect_O(spec, params.lam)
    aux = _wrap(e.phase) if e.phase_defined else None
    return _nested_argmax(lambda t: -qp(t), aux_center=aux)


def theta_parallel_closed_form(d: int, n: int, lam: float) -> float:
    """Closed-form suppression phase for the linear-spectrum law.

    theta = -n*lam + arg[d e^{i n d lam} - e^{i n lam} + (1-d) e^{i n (d+1) lam}].
    """
    z = (
        d * np.exp(1j * n * d * lam)
        - np.exp(1j * n * lam)
        + (1 - d) * np.exp(1j * n * (d + 1) * lam)
    )
    return _wrap(-n * lam + float(np.angle(z)))


def theta_parallel_bisect(params: ChannelParams, spec: MeterSpec, tol: float = 1e-14) -> float:
    """Bisection on the wrapped phase misalignment, for cross-checking.

    Finds the root of g(theta) = arg(S) - arg(e^{i theta} S0) in a bracket
    around the coarse minimum of the parallel change.
    """
    u = spec.u_values()
    s0 = float(np.sum(u))
    if abs(s0) < 1e-15:
        raise NoSuppressionError("spectrum sums to zero")
    s = complex(np.sum(u * meter_diagonal(spec, params.lam)))
    target = float(np.angle(s / s0))

    def g(theta: float) -> float:
        return float(np.angle(np.exp(1j * (target - theta))))

    lo, hi = target - 1.0, target + 1.0
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return _wrap(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if abs(hi - lo) < tol:
            break
        if (gm > 0.0) == (glo > 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return _wrap(0.5 * (lo + hi))


def theta_perp_max(params: ChannelParams, spec: MeterSpec) -> float:
    """Argmax of the observable QFI over theta.

    Analytic in the weak-coupling qubit cases (arccos(cos^2(n lam/2)) for
    the linear-spectrum law at d = 2, +n*lam/2 for the zero-sum law at
    d = 2, smallest positive by tie-break); numeric otherwise.
    """
    if params.lam == 0.0:
        return 0.0
    n, lam = spec.n, params.lam
    if (
        params.j.twice == 1
        and params.extremal
        and spec.d == 2
        and abs(n * lam) < ANALYTIC_MAX_NLAM
    ):
        if spec.law == "pancharatnam":
            return float(np.arccos(np.cos(0.5 * n * lam) ** 2))
        if spec.law == "symmetric":
            return _wrap(0.5 * n * lam)

    f_vec = _iperp_landscape(params, spec)
    probe = f_vec(np.linspace(0.0, TWO_PI, 1024, endpoint=False))
    finite = probe[np.isfinite(probe)]
    if finite.size == 0:
        raise VanishingPostselectionError("postselection probability floored everywhere")
    if np.ptp(finite) <= 1e-12 * (1.0 + np.max(np.abs(finite))):
        raise DegenerateLandscapeError("observable QFI carries no theta dependence")
    e = expect_O(spec, params.lam)
    aux = _wrap(e.phase) if e.phase_defined else None
    return _nested_argmax(f_vec, aux_center=aux)


def compute_landmarks(
    params: ChannelParams, spec: MeterSpec, partial: bool = False
) -> ThetaLandmarks:
    """All three landmarks with per-field method tags.

    With ``partial`` a landmark whose defining condition cannot be met
    (no suppression point, degenerate landscape) is reported as None
    instead of raising.
    """
    e = expect_O(spec, params.lam)
    if params.lam == 0.0:
        return ThetaLandmarks(
            theta_t=0.0,
            theta_perp=0.0,
            theta_par=0.0,
            pancharatnam=_wrap(e.phase),
            method={"theta_t": "degenerate", "theta_perp": "degenerate", "theta_par": "degenerate"},
            degenerate=True,
        )
    qubit = params.j.twice == 1 and params.extremal
    method = {
        "theta_t": "analytic" if (qubit and e.phase_defined) else "numeric",
        "theta_perp": "analytic"
        if (qubit and spec.d == 2 and spec.law in ("pancharatnam", "symmetric")
            and abs(spec.n * params.lam) < ANALYTIC_MAX_NLAM)
        else "numeric",
        "theta_par": "analytic" if qubit else "numeric",
    }

    def attempt(fn, key):
        try:
            return fn(params, spec)
        except (NoSuppressionError, DegenerateLandscapeError):
            if not partial:
                raise
            method[key] = "undefined"
            return None

    return ThetaLandmarks(
        theta_t=attempt(theta_total_max, "theta_t"),
        theta_perp=attempt(theta_perp_max, "theta_perp"),
        theta_par=attempt(theta_parallel_zero, "theta_par"),
        pancharatnam=_wrap(e.phase),
        method=method,
    )


def coincidence_check(params: ChannelParams, spec: MeterSpec) -> CoincidenceReport:
    """The three landmarks and their largest pairwise separation.

    For the fractional law in the large-d, small-eps regime all three
    collapse onto the coupling itself; other laws serve as controls.
    """
    lm = compute_landmarks(params, spec)
    values = (lm.theta_t, lm.theta_perp, lm.theta_par)
    gap = max(abs(a - b) for a in values for b in values)
    return CoincidenceReport(
        theta_t=lm.theta_t,
        theta_perp=lm.theta_perp,
        theta_par=lm.theta_par,
        max_pairwise_gap=gap,
    )
