"""Order parameters and the special-function constants built from them.

All constants are closed-form gamma expressions.  ``gamma`` wraps the
standard library implementation, which is accurate to a few ulp on the
positive axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError

__all__ = ["FracParams", "ConstantSet", "gamma", "constants_for"]


def gamma(x: float) -> float:
    """Gamma function on the positive real axis."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"gamma requires a finite positive argument, got {x!r}")
    return math.gamma(x)


@dataclass(frozen=True)
class FracParams:
    """Order ``s`` of the fractional Laplacian and spatial dimension ``dim``."""

    s: float
    dim: int = 1

    def __post_init__(self):
        s = float(self.s)
        if not (0.0 < s < 1.0):
            raise DomainError(f"order s must lie strictly inside (0, 1), got {self.s!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DomainError(f"dimension must be a positive integer, got {self.dim!r}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "dim", int(self.dim))

    @property
    def below_dimension(self) -> bool:
        """True when N > 2s; several interval results need it and fail for N=1, s>=1/2."""
        return self.dim > 2 * self.s

    @property
    def is_half(self) -> bool:
        return abs(self.s - 0.5) < 1e-3


@dataclass(frozen=True)
class ConstantSet:
    """Constants attached to one ``FracParams``.

    c_Ns            normalisation of the singular integral
    b_Ns            fundamental-solution prefactor, F(x) = b_Ns |x|^(2s-N);
                    negative for N = 1, s > 1/2 and nan for N = 2s, where the
                    kernel is logarithmic
    l_s             torsion prefactor of the unit ball, u = l_s (1-|x|^2)^s
    kappa_s         Green-function prefactor of the unit ball
    d_s             boundary constant Gamma(1+s)^2
    lions_prefactor Gamma(s)^2 Gamma(s+1)^2
    """

    c_Ns: float
    b_Ns: float
    l_s: float
    kappa_s: float
    d_s: float
    lions_prefactor: float


def _gamma_any(x: float) -> float:
    # math.gamma handles negative non-integers through reflection
    return math.gamma(x)


@lru_cache(maxsize=256)
def _constants(s: float, n: int) -> ConstantSet:
    half_n = 0.5 * n
    pi_n = math.pi ** half_n
    four_s = 4.0 ** s
    c = s * four_s * gamma(half_n + s) / (pi_n * gamma(1.0 - s))
    if abs(half_n - s) < 1e-14:
        b = math.nan
    else:
        b = _gamma_any(half_n - s) / (four_s * pi_n * gamma(s))
    g_half_n = gamma(half_n)
    l_s = g_half_n / (four_s * gamma(1.0 + s) * gamma(half_n + s))
    kappa = g_half_n / (four_s * pi_n * gamma(s) ** 2)
    d = gamma(1.0 + s) ** 2
    lions = gamma(s) ** 2 * gamma(1.0 + s) ** 2
    return ConstantSet(c_Ns=c, b_Ns=b, l_s=l_s, kappa_s=kappa, d_s=d, lions_prefactor=lions)


def constants_for(p: FracParams) -> ConstantSet:
    """Constants for order ``p.s`` in dimension ``p.dim``.

    For N = 1 these reduce to the interval forms
    l_s = 2^(-2s) Gamma(1/2) / (Gamma(s+1/2) Gamma(1+s)) and
    kappa_s = 1 / (4^s Gamma(s)^2).
    """
    return _constants(p.s, p.dim)
