"""One-dimensional quadrature for endpoint-singular, principal-value and
semi-infinite integrals.

The adaptive engine is tanh-sinh (double exponential) quadrature on a
halving step sequence; each level reuses the previous sum, so refinement is
monotone and the error estimate is the difference of consecutive levels.
Nodes are generated as offsets from the nearest endpoint, so an integrand
whose singular point sits at 0 of its own variable is sampled without
cancellation.  Smooth integrands use Gauss-Legendre with doubling order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import AccuracyError, DomainError

__all__ = [
    "QuadSpec",
    "integrate",
    "integrate_pv",
    "boundary_sum_1d",
    "gauss_legendre",
    "gauss_jacobi",
    "tanh_sinh_rule",
]

KINDS = ("smooth", "endpoint_power", "principal_value", "semi_infinite")

# t beyond which 1 - tanh(pi/2 sinh t) underflows double precision
_T_MAX = 6.2
_MIN_LEVEL = 3


@dataclass(frozen=True)
class QuadSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_refinements: int = 10
    kind: str = "endpoint_power"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be at least 1")
        if self.kind not in KINDS:
            raise DomainError(f"unknown quadrature kind {self.kind!r}; expected one of {KINDS}")

    def with_kind(self, kind):
        return QuadSpec(self.abs_tol, self.rel_tol, self.max_refinements, kind)


DEFAULT = QuadSpec()


@lru_cache(maxsize=32)
def _de_level(level):
    """New tanh-sinh nodes of one level on the reference interval (0, 1).

    Returns offsets ``off`` from the nearer endpoint, weights, the step h and
    whether the centre node belongs to this level.
    """
    h = 2.0 ** (-level)
    kmax = int(_T_MAX / h)
    k = np.arange(1, kmax + 1, 1 if level == 0 else 2)
    t = k * h
    with np.errstate(over="ignore", under="ignore"):
        u = 0.5 * math.pi * np.sinh(t)
        ch = np.cosh(u)
        off = 0.5 * np.exp(-u) / ch
        w = 0.25 * math.pi * np.cosh(t) / ch**2
    keep = (off > 0) & (w > 0)
    off, w = off[keep], w[keep]
    off.setflags(write=False)
    w.setflags(write=False)
    return off, w, h


def tanh_sinh_rule(level: int):
    """Cumulative tanh-sinh rule on (0, 1) up to ``level``.

    Returns ``(nodes, complements, weights)`` where complements = 1 - nodes
    computed without cancellation.  Useful for vectorised inner integrals.
    """
    offs, ws = [np.array([0.5])], [np.array([0.25 * math.pi])]
    h = 2.0 ** (-level)
    for lev in range(level + 1):
        off, w, _ = _de_level(lev)
        offs.append(off)
        ws.append(w)
    off = np.concatenate(offs)
    w = np.concatenate(ws) * h
    nodes = np.concatenate([off, 1.0 - off[1:]])
    comps = np.concatenate([1.0 - off, off[1:]])
    weights = np.concatenate([w, w[1:]])
    return nodes, comps, weights


def _clean(vals, w):
    vals = np.asarray(vals, dtype=float)
    bad = ~np.isfinite(vals)
    if bad.any():
        # overflow at nodes next to an endpoint carries no weight in double precision
        if np.any(w[bad] > 1e-200):
            raise AccuracyError("integrand is not finite at an interior node")
        vals = np.where(bad, 0.0, vals)
    return vals


def _de_adaptive(left, right, centre, spec, what):
    """Drive the level sequence; ``left/right(off)`` return integrand*jacobian."""
    s_prev = None
    est = math.inf
    total = 0.0
    for level in range(spec.max_refinements + 1):
        off, w, h = _de_level(level)
        part = 0.0
        if off.size:
            part = float(np.dot(w, _clean(left(off), w)) + np.dot(w, _clean(right(off), w)))
        if level == 0:
            total = h * (0.25 * math.pi * float(centre()) + part)
        else:
            total = 0.5 * total + h * part
        if s_prev is not None:
            est = abs(total - s_prev)
            if level >= _MIN_LEVEL and est <= max(spec.abs_tol, spec.rel_tol * abs(total)):
                return total, est
        s_prev = total
    raise AccuracyError(f"{what}: no convergence after {spec.max_refinements} refinements "
                        f"(estimate {total!r}, error {est:.3g})", total, est)


def _finite_de(f, a, b, spec):
    length = b - a

    def left(off):
        return f(a + length * off) * length

    def right(off):
        return f(b - length * off) * length

    def centre():
        m = 0.5 * (a + b)
        if not a < m < b:
            return 0.0
        return f(np.array([m]))[0] * length

    if np.isfinite(length) and length > 0:
        return _de_adaptive(_drop_endpoints(left, a, b, length, True),
                            _drop_endpoints(right, a, b, length, False), centre, spec,
                            "tanh-sinh")
    raise DomainError("integration interval must be finite and non-empty")


def _drop_endpoints(g, a, b, length, is_left):
    # nodes that round onto an endpoint are removed rather than evaluated there
    def wrapped(off):
        x = a + length * off if is_left else b - length * off
        inside = (x > a) & (x < b)
        out = np.zeros_like(off)
        if inside.any():
            out[inside] = g(off[inside])
        return out

    return wrapped


def _semi_infinite_de(f, a, spec):
    # t = a + u / (1 - u) on u in (0, 1); offsets give 1 - u exactly near u -> 1
    def left(off):
        return f(a + off / (1.0 - off)) / (1.0 - off) ** 2

    def right(off):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            t = a + (1.0 - off) / off
            # two divisions keep f(t) / off^2 finite when off^2 underflows
            vals = (f(t) / off) / off
        return vals

    def centre():
        return f(np.array([a + 1.0]))[0] * 4.0

    return _de_adaptive(left, right, centre, spec, "semi-infinite tanh-sinh")


@lru_cache(maxsize=32)
def gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on (-1, 1)."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=64)
def gauss_jacobi(n: int, alpha: float, beta: float):
    """Gauss-Jacobi nodes/weights on (-1, 1) for weight (1-x)^alpha (1+x)^beta."""
    x, w = roots_jacobi(int(n), float(alpha), float(beta))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gauss_adaptive(f, a, b, spec):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    prev = None
    n = 8
    for _ in range(spec.max_refinements + 1):
        x, w = gauss_legendre(n)
        val = half * float(np.dot(w, f(mid + half * x)))
        if prev is not None:
            est = abs(val - prev)
            if est <= max(spec.abs_tol, spec.rel_tol * abs(val)):
                return val, est
        prev = val
        n *= 2
    raise AccuracyError("Gauss-Legendre: no convergence", val, est)


def integrate(f, a, b, spec: QuadSpec = DEFAULT):
    """Integrate a vectorised ``f`` over (a, b); returns ``(value, err_est)``.

    kind ``smooth`` uses Gauss-Legendre, ``endpoint_power`` tanh-sinh, and
    ``semi_infinite`` requires ``b = inf`` and maps the half line onto (0, 1).
    Principal values go through :func:`integrate_pv`.
    """
    a = float(a)
    b = float(b)
    if spec.kind == "principal_value":
        raise DomainError("principal-value integrals need the singular point; use integrate_pv")
    if spec.kind == "semi_infinite" or math.isinf(b):
        if not (math.isinf(b) and b > 0 and math.isfinite(a)):
            raise DomainError("semi-infinite integrals run over (a, +inf) with finite a")
        return _semi_infinite_de(f, a, spec)
    if not a < b:
        raise DomainError(f"need a < b, got a={a}, b={b}")
    if spec.kind == "smooth":
        return _gauss_adaptive(f, a, b, spec)
    return _finite_de(f, a, b, spec)


def integrate_pv(f, a, b, sing, order, spec: QuadSpec = DEFAULT):
    """Cauchy principal value of ``f`` over (a, b) around ``sing``.

    ``order`` is the singularity order of ``f`` at ``sing`` (f ~ |x-sing|^-order).
    The window |x - sing| < w, w = min(sing-a, b-sing)/2, is integrated with
    f(sing+u) + f(sing-u) paired so the odd part cancels; the two outer pieces
    are ordinary integrals.  Pairing leaves an integrable remainder only for
    order < 2.
    """
    a, b, sing = float(a), float(b), float(sing)
    if not (a < sing < b):
        raise DomainError("principal value needs a < sing < b")
    if order >= 2:
        raise DomainError(f"singularity of order {order} is not integrable as a principal value")
    w = 0.5 * min(sing - a, b - sing)
    inner_spec = spec.with_kind("endpoint_power")

    def paired(u):
        # snap to offsets with sing +- u exact, so both points are equidistant from sing;
        # offsets below one ulp of sing snap to 0 and carry no mass
        u = np.asarray(u, dtype=float)
        away = 1.0 if sing >= 0 else -1.0  # snap on the coarser side, away from zero
        u = np.where(u < 0.5 * abs(sing), np.abs((sing + away * u) - sing), u)
        ok = u > 0
        uu = np.where(ok, u, w)
        return np.where(ok, f(sing + uu) + f(sing - uu), 0.0)

    window, _ = integrate(paired, 0.0, w, inner_spec)
    left, _ = integrate(f, a, sing - w, inner_spec)
    right, _ = integrate(f, sing + w, b, inner_spec)
    return window + left + right


def boundary_sum_1d(g, with_normal=True, half_width=1.0):
    """Boundary "integral" over the two endpoints of (-half_width, half_width).

    With the outward normal this is g(+l) - g(-l), otherwise g(+l) + g(-l).
    """
    lam = float(half_width)
    gp, gm = float(g(lam)), float(g(-lam))
    return gp - gm if with_normal else gp + gm
