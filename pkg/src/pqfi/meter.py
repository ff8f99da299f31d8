"""Qudit meter states with diagonal unitary meter operators.

The meter is the uniform superposition of n-fold copies of d basis modes;
the meter operator imprints a relative phase exp(i*n*u_k*lambda) on mode k.
Four eigenvalue laws are supported:

* ``pancharatnam``: u_k = k (nonzero Pancharatnam phase),
* ``symmetric``:    u_k = k - (d-1)/2 (zero-sum spectrum, zero phase),
* ``fractional``:   u_k = k**eps with u_0 = 0 (slowly varying phase),
* ``explicit``:     arbitrary user-supplied eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "LAWS",
    "PHASE_FLOOR",
    "MeterSpec",
    "ComplexExpectation",
    "expect_O",
    "meter_diagonal",
    "parallel_transport_term",
    "gauge_shift_equivalence",
    "pancharatnam_visibility",
    "fractional_phase_approx",
]

LAWS = ("pancharatnam", "symmetric", "fractional", "explicit")

# Below this visibility the principal phase is numerically meaningless.
PHASE_FLOOR = 1e-14


@dataclass(frozen=True)
class MeterSpec:
    """Meter dimension d, copy count n and the eigenvalue law u_k."""

    d: int
    n: int
    law: str = "pancharatnam"
    eps: float | None = None
    u: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"meter dimension d must be >= 2, got {self.d}")
        if self.n < 1:
            raise ValueError(f"copy count n must be >= 1, got {self.n}")
        if self.law not in LAWS:
            raise ValueError(f"unknown eigenvalue law {self.law!r}")
        if self.law == "fractional":
            if self.eps is None or not self.eps > 0.0:
                raise ValueError("fractional law requires eps > 0")
        elif self.eps is not None:
            raise ValueError(f"eps is only meaningful for the fractional law")
        if self.law == "explicit":
            if self.u is None or len(self.u) != self.d:
                raise ValueError("explicit law requires exactly d eigenvalues")
            object.__setattr__(self, "u", tuple(float(v) for v in self.u))
        elif self.u is not None:
            raise ValueError("eigenvalue list is only meaningful for the explicit law")

    @classmethod
    def pancharatnam(cls, d: int, n: int = 1) -> "MeterSpec":
        return cls(d=d, n=n, law="pancharatnam")

    @classmethod
    def symmetric(cls, d: int, n: int = 1) -> "MeterSpec":
        return cls(d=d, n=n, law="symmetric")

    @classmethod
    def fractional(cls, d: int, n: int = 1, eps: float = 1e-4) -> "MeterSpec":
        return cls(d=d, n=n, law="fractional", eps=eps)

    @classmethod
    def explicit(cls, u, n: int = 1) -> "MeterSpec":
        u = tuple(float(v) for v in u)
        return cls(d=len(u), n=n, law="explicit", u=u)

    def u_values(self) -> np.ndarray:
        """Eigenvalues u_0 .. u_{d-1} of the single-copy meter generator."""
        return _u_values(self)


@lru_cache(maxsize=128)
def _u_values(spec: MeterSpec) -> np.ndarray:
    k = np.arange(spec.d, dtype=float)
    if spec.law == "pancharatnam":
        u = k
    elif spec.law == "symmetric":
        u = k - (spec.d - 1) / 2.0
    elif spec.law == "fractional":
        u = k**spec.eps
        u[0] = 0.0
    else:
        u = np.asarray(spec.u, dtype=float)
    u.setflags(write=False)
    return u


@dataclass(frozen=True)
class ComplexExpectation:
    """A complex expectation value with its modulus and principal phase.

    ``phase_defined`` is False when the modulus sits below PHASE_FLOOR, in
    which case ``phase`` is reported as 0 and callers must branch.
    """

    value: complex
    modulus: float
    phase: float
    phase_defined: bool = True

    @classmethod
    def from_value(cls, z: complex, phase_floor: float = PHASE_FLOOR) -> "ComplexExpectation":
        modulus = abs(z)
        if modulus < phase_floor:
            return cls(value=z, modulus=modulus, phase=0.0, phase_defined=False)
        return cls(value=z, modulus=modulus, phase=float(np.angle(z)), phase_defined=True)


def meter_diagonal(spec: MeterSpec, lam: float) -> np.ndarray:
    """Diagonal entries exp(i n u_k lambda) of the meter operator."""
    return np.exp(1j * spec.n * spec.u_values() * lam)


def expect_O(spec: MeterSpec, lam: float) -> ComplexExpectation:
    """Expectation of the meter operator in the uniform meter state.

    Returns (1/d) sum_k exp(i n u_k lambda); the modulus is the fringe
    visibility and the principal phase is the Pancharatnam phase.
    """
    z = complex(np.mean(meter_diagonal(spec, lam)))
    return ComplexExpectation.from_value(z)


def parallel_transport_term(spec: MeterSpec, lam: float = 0.0) -> complex:
    """<O_lambda^dag d_lambda O_lambda> = (i n / d) sum_k u_k.

    Purely imaginary and independent of lambda for every law; it vanishes
    exactly when the eigenvalue spectrum sums to zero (parallel transport).
    """
    return 1j * spec.n * float(np.mean(spec.u_values()))


def gauge_shift_equivalence(spec_p: MeterSpec, spec_0: MeterSpec, lam: float) -> complex:
    """Global phase g(lambda) relating the two canonical meter operators.

    The shifted-spectrum operator equals g(lambda) times the zero-sum one,
    elementwise on the diagonal, with g = exp(i n (d-1) lambda / 2).
    """
    if spec_p.law != "pancharatnam" or spec_0.law != "symmetric":
        raise ValueError("expected a pancharatnam-law and a symmetric-law meter")
    if (spec_p.d, spec_p.n) != (spec_0.d, spec_0.n):
        raise ValueError(
            f"meter shapes differ: (d={spec_p.d}, n={spec_p.n}) vs (d={spec_0.d}, n={spec_0.n})"
        )
    ratio = meter_diagonal(spec_p, lam) / meter_diagonal(spec_0, lam)
    g = complex(ratio[0])
    if np.max(np.abs(ratio - g)) > 1e-12:
        raise ValueError("diagonals are not related by a single global phase")
    return g


def pancharatnam_visibility(d: int, n: int, lam: float) -> float:
    """Closed-form visibility |sin(d n lam / 2)| / (d |sin(n lam / 2)|).

    A Taylor branch removes the 0/0 at n*lam -> 0.
    """
    x = 0.5 * n * lam
    if abs(x) < 1e-6:
        return 1.0 - (d * d - 1.0) * x * x / 6.0
    return abs(np.sin(d * x) / (d * np.sin(x)))


def fractional_phase_approx(d: int, eps: float, lam: float) -> float:
    """Large-d, small-eps approximation lam * (1 - eps + eps*ln d) of the phase."""
    return lam * (1.0 - eps + eps * np.log(d))
