"""Exact half-integer quantum numbers and Wigner small-d rotation elements.

Convention: ``wigner_d(j, m_f, m_i, beta)`` is the matrix element
``<j, m_f| exp(-i beta J_y) |j, m_i>``, which makes the corner element
``d[j, -j, j](beta) = sin(beta/2)**(2j)`` positive for every spin.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DomainError",
    "HalfInt",
    "valid_magnetic",
    "m_values",
    "wigner_d",
    "wigner_d_deriv",
    "wigner_d_matrix",
]

MAX_TWICE_J = 200

# log(n!) for n = 0 .. 2*MAX_TWICE_J; factorial arguments never exceed 2j.
_LOG_FACT = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1.0, 2 * MAX_TWICE_J + 1)))))


class DomainError(ValueError):
    """Raised for quantum numbers outside their allowed domain."""


@dataclass(frozen=True, order=True)
class HalfInt:
    """A half-integer stored exactly as its doubled value (2j or 2m)."""

    twice: int

    def __post_init__(self) -> None:
        if not isinstance(self.twice, (int, np.integer)):
            raise TypeError(f"twice must be an integer, got {type(self.twice).__name__}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse '2', '-1/2', '3/2' or a decimal like '1.5'."""
        frac = Fraction(str(text).strip())
        if frac.denominator not in (1, 2):
            raise DomainError(f"{text!r} is not a half-integer")
        return cls(int(frac * 2))

    @classmethod
    def from_value(cls, value) -> "HalfInt":
        if isinstance(value, HalfInt):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        twice = 2 * Fraction(value)
        if twice.denominator != 1:
            raise DomainError(f"{value!r} is not a half-integer")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice / 2.0

    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    def __neg__(self) -> "HalfInt":
        return HalfInt(-self.twice)

    def __str__(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def valid_magnetic(j: HalfInt, m: HalfInt) -> bool:
    """True when m is a magnetic number of spin j (same parity, |m| <= j)."""
    return j.twice >= 0 and abs(m.twice) <= j.twice and (j.twice - m.twice) % 2 == 0


def m_values(j: HalfInt) -> list[HalfInt]:
    """Magnetic numbers of spin j in descending order (j, j-1, ..., -j)."""
    return [HalfInt(t) for t in range(j.twice, -j.twice - 2, -2)]


def _check_args(j: HalfInt, m_f: HalfInt, m_i: HalfInt) -> None:
    if j.twice < 0:
        raise DomainError(f"spin j must be nonnegative, got {j}")
    if j.twice > MAX_TWICE_J:
        raise DomainError(f"spin j = {j} exceeds the supported maximum {MAX_TWICE_J}/2")
    for name, m in (("m_f", m_f), ("m_i", m_i)):
        if not valid_magnetic(j, m):
            raise DomainError(f"({j}, {m}) is not a valid (j, {name}) magnetic pair")


def _signed_pow_log(base: np.ndarray, power: int) -> tuple[np.ndarray, np.ndarray]:
    """(log|base**power|, sign(base**power)) with base**0 == 1 even at base 0."""
    if power == 0:
        zeros = np.zeros_like(base)
        return zeros, np.ones_like(base)
    mag = np.abs(base)
    with np.errstate(divide="ignore"):
        log_mag = power * np.log(mag)
    sign = np.where(base >= 0.0, 1.0, -1.0 if power % 2 else 1.0)
    sign = np.where(mag == 0.0, 0.0, sign)
    log_mag = np.where(mag == 0.0, -np.inf, log_mag)
    return log_mag, sign


def wigner_d(j: HalfInt, m_f: HalfInt, m_i: HalfInt, beta) -> float | np.ndarray:
    """d^(j)_{m_f, m_i}(beta) = <j,m_f| exp(-i beta J_y) |j,m_i>.

    Evaluated by the factorial sum over log-magnitudes with sign tracking,
    stable up to j.twice <= 200.  ``beta`` may be a scalar or an ndarray.
    """
    _check_args(j, m_f, m_i)
    scalar_in = np.isscalar(beta) or np.ndim(beta) == 0
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))

    tj, tmf, tmi = j.twice, m_f.twice, m_i.twice
    jpmi = (tj + tmi) // 2
    jmmi = (tj - tmi) // 2
    jpmf = (tj + tmf) // 2
    jmmf = (tj - tmf) // 2
    dm = (tmf - tmi) // 2  # m_f - m_i, an exact integer offset

    half = 0.5 * beta_arr
    cos_h = np.cos(half)
    sin_h = np.sin(half)
    prefactor = 0.5 * (_LOG_FACT[jpmf] + _LOG_FACT[jmmf] + _LOG_FACT[jpmi] + _LOG_FACT[jmmi])

    k_min = max(0, -dm)
    k_max = min(jpmi, jmmf)
    if k_max < k_min:
        out = np.zeros_like(beta_arr)
        return float(out[0]) if scalar_in else out

    log_terms = []
    signs = []
    for k in range(k_min, k_max + 1):
        # cos^(2j + m_i - m_f - 2k) * sin^(m_f - m_i + 2k), both of beta/2
        cos_pow = tj - dm - 2 * k
        sin_pow = dm + 2 * k
        log_c, sign_c = _signed_pow_log(cos_h, cos_pow)
        log_s, sign_s = _signed_pow_log(sin_h, sin_pow)
        log_den = (
            _LOG_FACT[jpmi - k] + _LOG_FACT[k] + _LOG_FACT[jmmf - k] + _LOG_FACT[dm + k]
        )
        log_terms.append(prefactor - log_den + log_c + log_s)
        signs.append((-1.0 if (dm + k) % 2 else 1.0) * sign_c * sign_s)

    log_terms = np.stack(log_terms)
    signs = np.stack(signs)
    peak = np.max(log_terms, axis=0)
    peak_safe = np.where(np.isfinite(peak), peak, 0.0)
    scaled = np.where(np.isfinite(log_terms), np.exp(log_terms - peak_safe), 0.0)
    total = np.sum(signs * scaled, axis=0) * np.exp(peak_safe)
    total = np.where(np.isfinite(peak), total, 0.0)
    return float(total[0]) if scalar_in else total


def wigner_d_deriv(j: HalfInt, m_f: HalfInt, m_i: HalfInt, beta) -> float | np.ndarray:
    """Analytic derivative d/dbeta of ``wigner_d`` via the ladder recurrence.

    ∂β d_{m_f,m_i} = ½ [ sqrt((j+m_i)(j-m_i+1)) d_{m_f,m_i-1}
                       - sqrt((j-m_i)(j+m_i+1)) d_{m_f,m_i+1} ]
    """
    _check_args(j, m_f, m_i)
    tj, tmi = j.twice, m_i.twice
    jv = 0.5 * tj
    mv = 0.5 * tmi

    result = 0.0
    c_down = np.sqrt((jv + mv) * (jv - mv + 1.0))
    if c_down > 0.0:
        result = result + c_down * wigner_d(j, m_f, HalfInt(tmi - 2), beta)
    c_up = np.sqrt((jv - mv) * (jv + mv + 1.0))
    if c_up > 0.0:
        result = result - c_up * wigner_d(j, m_f, HalfInt(tmi + 2), beta)
    result = 0.5 * result
    if np.isscalar(beta) or np.ndim(beta) == 0:
        return float(result)
    return result + np.zeros_like(np.asarray(beta, dtype=float))


def wigner_d_matrix(j: HalfInt, beta: float) -> np.ndarray:
    """Full (2j+1) x (2j+1) small-d matrix, rows/columns in descending m."""
    ms = m_values(j)
    out = np.empty((len(ms), len(ms)))
    for a, mf in enumerate(ms):
        for b, mi in enumerate(ms):
            out[a, b] = wigner_d(j, mf, mi, beta)
    return out
