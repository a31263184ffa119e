"""Reproducing kernel of the s-harmonic functions on an interval.

On (-lam, lam) the boundary integral defining the kernel is a two-point sum
of products of Green boundary ratios.  The reproducing property is tested on
u(z) = (lam^2 - z^2)^(s-1), which is s-harmonic inside the interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import FracParams, constants_for
from .errors import DomainError
from .fracoracle import pointwise_frac_laplacian
from .green1d import IntervalDomain, boundary_ratios
from .quadrature import boundary_sum_1d
from .report import make_report, timer

__all__ = [
    "KernelEval",
    "kernel",
    "gram",
    "harmonic_profile",
    "check_reproducing",
    "check_s_harmonic",
    "check_gram_psd",
    "classical_lions_kernel",
    "classical_trend",
]

HARMONIC_TOL = 5e-3


@dataclass(frozen=True)
class KernelEval:
    K: float
    components: tuple  # (plus-endpoint product, minus-endpoint product)


def _ratio_arrays(p, xs, dom):
    plus, minus = boundary_ratios(p, np.asarray(xs, dtype=float), dom)
    return np.asarray(plus, dtype=float), np.asarray(minus, dtype=float)


def kernel(p: FracParams, x: float, y: float, dom: IntervalDomain = IntervalDomain()) -> KernelEval:
    """K(x, y) = Gamma(s)^2 Gamma(1+s)^2 sum over the endpoints of the ratio products."""
    if p.dim != 1:
        raise DomainError("kernel is implemented on the interval (dim = 1)")
    dom.require_interior(x, y)
    pre = constants_for(FracParams(p.s)).lions_prefactor
    xp, xm = (float(v) for v in boundary_ratios(p, x, dom))
    yp, ym = (float(v) for v in boundary_ratios(p, y, dom))
    plus, minus = xp * yp, xm * ym
    lam = dom.half_width
    k = pre * boundary_sum_1d(lambda sig: plus if sig == lam else minus, with_normal=False, half_width=lam)
    return KernelEval(k, (plus, minus))


def gram(p: FracParams, xs, dom: IntervalDomain = IntervalDomain()) -> np.ndarray:
    """Gram matrix K(x_i, x_j); symmetric by construction."""
    xs = np.asarray(xs, dtype=float)
    dom.require_interior(*xs)
    pre = constants_for(FracParams(p.s)).lions_prefactor
    plus, minus = _ratio_arrays(p, xs, dom)
    return pre * (np.outer(plus, plus) + np.outer(minus, minus))


def harmonic_profile(p: FracParams, dom: IntervalDomain = IntervalDomain()):
    """z -> (lam^2 - z^2)_+^(s-1) as a numpy callable."""
    lam, s = dom.half_width, p.s

    def u(z):
        z = np.asarray(z, dtype=float)
        q = (lam - np.abs(z)) * (lam + np.abs(z))
        return np.where(q > 0, np.where(q > 0, q, 1.0) ** (s - 1.0), 0.0)

    return u


def check_reproducing(p: FracParams, x: float, dom: IntervalDomain = IntervalDomain(), amplitude: float = 1.0):
    """a u(x) = <a u, Gamma(s) Gamma(1+s) G(x,.)/delta^s> with u/delta^(s-1) = a (2 lam)^(s-1) at both ends."""
    with timer() as tm:
        dom.require_interior(x)
        s, lam = p.s, dom.half_width
        lhs = amplitude * float(harmonic_profile(p, dom)(x))
        trace = amplitude * (2.0 * lam) ** (s - 1.0)
        plus, minus = (float(v) for v in boundary_ratios(p, x, dom))
        pre = math.gamma(s) * math.gamma(1.0 + s)
        rhs = pre * boundary_sum_1d(lambda sig: trace * (plus if sig == lam else minus),
                                    with_normal=False, half_width=lam)
    return make_report("reproducing", {"s": s, "x": x, "amplitude": amplitude, "half_width": lam},
                       lhs, rhs, 1e-9, "test function (lam^2 - z^2)^(s-1)", runtime_ms=tm["ms"])


def check_s_harmonic(p: FracParams, z: float, dom: IntervalDomain = IntervalDomain()):
    """(-Delta)^s of the test function vanishes at the interior point z (tol 5e-3)."""
    with timer() as tm:
        dom.require_interior(z)
        lam = dom.half_width
        val = pointwise_frac_laplacian(p, harmonic_profile(p, dom), z, support=lam, breakpoints=(-lam, lam))
    return make_report("s-harmonic", {"s": p.s, "z": z, "half_width": lam}, float(val), 0.0, HARMONIC_TOL,
                       "pointwise singular-integral oracle", runtime_ms=tm["ms"])


def check_gram_psd(p: FracParams, xs, dom: IntervalDomain = IntervalDomain(), tol: float = 1e-10):
    """Smallest Gram eigenvalue is >= -tol; lhs reports min(lambda_min, 0)."""
    with timer() as tm:
        xs = np.asarray(xs, dtype=float)
        ev = float(np.linalg.eigvalsh(gram(p, xs, dom)).min())
    return make_report("gram-psd", {"s": p.s, "n_points": len(xs), "half_width": dom.half_width},
                       min(ev, 0.0), 0.0, tol, f"lambda_min = {ev:.6g}", runtime_ms=tm["ms"])


def classical_lions_kernel(x, y):
    """Endpoint sum of normal derivatives of G(x,y) = (min+1)(1-max)/2 on (-1, 1): (1 + xy)/2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * (1.0 + x * y)


def classical_trend(p: FracParams, x: float, y: float) -> float:
    """|K_s(x,y) / K_classical(x,y) - 1| on (-1, 1); a soft trend indicator as s -> 1."""
    k = kernel(p, x, y).K
    return abs(k / float(classical_lions_kernel(x, y)) - 1.0)
