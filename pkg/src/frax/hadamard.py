"""Shape derivatives under the affine scaling family phi_t(x) = (1 + t) x.

For this family every domain-dependent quantity on the interval obeys an
exact scaling law, so t-derivatives are computed analytically and, as a
cross-check, by centred differences in t.  The boundary side of every
identity is the two-point sum with Y.nu = lam at both endpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import FracParams, constants_for
from .errors import DomainError, UnsupportedOrderError
from .fracoracle import boundary_ratios_dense, cached_operator, trace_ratios
from .green1d import IntervalDomain, boundary_ratios, green_arrays, robin, torsion
from .identities import ORACLE_TOL
from .quadrature import QuadSpec, boundary_sum_1d, integrate
from .report import make_report, timer

__all__ = [
    "ShapeFamily",
    "shape_derivative_solution",
    "hadamard_green",
    "hadamard_robin",
    "energy_shape_derivative",
]

FD_STEP = 1e-4
ORACLE_STEP = 1e-3


@dataclass(frozen=True)
class ShapeFamily:
    """Affine scalings Omega_t = (1 + t) Omega of the interval (-lam, lam)."""

    kind: str = "affine_scaling"
    half_width: float = 1.0

    def __post_init__(self):
        if self.kind != "affine_scaling":
            raise DomainError(f"unsupported shape family {self.kind!r}; only affine_scaling is implemented")
        if not self.half_width > 0:
            raise DomainError("half_width must be positive")

    @property
    def domain(self) -> IntervalDomain:
        return IntervalDomain(self.half_width)

    def Y(self, x):
        return np.asarray(x, dtype=float) * 1.0

    def phi(self, t):
        def mapping(x):
            return (1.0 + t) * np.asarray(x, dtype=float)
        return mapping

    def domain_at(self, t) -> IntervalDomain:
        if not t > -1.0:
            raise DomainError("scaling parameter must exceed -1")
        return IntervalDomain((1.0 + t) * self.half_width)

    def normal_velocity(self, sigma):
        """Y.nu at the endpoint sigma in {-lam, +lam}: equals lam at both."""
        return float(self.Y(sigma)) * math.copysign(1.0, sigma)

    def velocity_defect(self, xs, h=1e-6):
        """max |(phi_h - phi_-h)/(2h) - Y| on ``xs``."""
        xs = np.asarray(xs, dtype=float)
        fd = (self.phi(h)(xs) - self.phi(-h)(xs)) / (2 * h)
        return float(np.max(np.abs(fd - self.Y(xs))))


def _weighted_sum(fam, plus, minus):
    lam = fam.half_width
    vp, vm = fam.normal_velocity(lam), fam.normal_velocity(-lam)

    def g(sig):
        return plus * vp if sig == lam else minus * vm

    return boundary_sum_1d(g, with_normal=False, half_width=lam)


def _params(p, fam, **extra):
    out = {"s": p.s}
    out.update(extra)
    out["half_width"] = fam.half_width
    return out


def shape_derivative_solution(p: FracParams, x: float, fam: ShapeFamily = ShapeFamily(), method: str = "closed",
                              n: int = 400):
    """u'(x) = d_s sum (G(x,.)/delta^s)(u/delta^s) Y.nu for the torsion family.

    ``closed``: lhs = dv/dt - u0' Y with v(t) = u_t(phi_t(x)) from the closed
    family, tol 1e-8.  ``oracle``: lhs is the centred difference of dense
    torsion solutions on Omega_{+-1e-3} at fixed x, ratios from the dense
    solver, tol 5e-2.
    """
    with timer() as tm:
        dom = fam.domain
        dom.require_interior(x)
        s = p.s
        c = constants_for(FracParams(s))
        lam = fam.half_width
        if method == "closed":
            q = (lam - x) * (lam + x)
            dv = 2.0 * s * c.l_s * q**s
            _, du0, trace = torsion(p, x, dom)
            lhs = dv - du0 * float(fam.Y(x))
            if p.is_half:
                plus, minus = boundary_ratios_dense(p, x, dom, n)
                tol, notes = ORACLE_TOL, "exact scaling of the closed torsion family, dense boundary ratios"
            else:
                plus, minus = (float(v) for v in boundary_ratios(p, x, dom))
                tol, notes = 1e-8, "exact scaling of the closed torsion family"
        elif method == "oracle":
            vals = []
            for t in (ORACLE_STEP, -ORACLE_STEP):
                op = cached_operator(s, n, fam.domain_at(t).half_width)
                vals.append(float(op.evaluate(op.torsion(), x)))
            lhs = (vals[0] - vals[1]) / (2 * ORACLE_STEP)
            op0 = cached_operator(s, n, lam)
            trace = float(np.mean(trace_ratios(op0, op0.torsion())))
            plus, minus = boundary_ratios_dense(p, x, dom, n)
            tol, notes = 5e-2, f"dense torsion on Omega_t, t = +-{ORACLE_STEP:g}, n = {n}"
        else:
            raise DomainError(f"unknown method {method!r}")
        rhs = c.d_s * trace * _weighted_sum(fam, plus, minus)
    return make_report("repres-shape-deriv", _params(p, fam, x=x), lhs, rhs, tol, notes,
                       runtime_ms=tm["ms"])


def _green_t(p, x, y, fam, t):
    return float(green_arrays(p, x, y, fam.domain_at(t), derivs=False)[0])


def hadamard_green(p: FracParams, x: float, y: float, fam: ShapeFamily = ShapeFamily(), method: str = "scaling"):
    """dG_t(x, y)/dt at 0 = d_s sum (G(x,.)/delta^s)(G(y,.)/delta^s) Y.nu.

    lhs from the scaling law G_t(x,y) = (1+t)^(2s-1) G(x/(1+t), y/(1+t)), so
    d/dt = (2s-1) G - x dG/dx - y dG/dy; ``fd`` differences G_t in t instead.
    Gated only for s < 1/2; for s > 1/2 the report is exploratory.
    """
    with timer() as tm:
        if p.is_half:
            raise UnsupportedOrderError("closed-form Green function excludes s = 1/2")
        dom = fam.domain
        dom.require_interior(x, y)
        if x == y:
            raise DomainError("the Green variation needs x != y")
        s = p.s
        c = constants_for(FracParams(s))
        if method == "scaling":
            g, gx, gy, _ = green_arrays(p, x, y, dom)
            lhs = float((2 * s - 1) * g - x * gx - y * gy)
        elif method == "fd":
            lhs = (_green_t(p, x, y, fam, FD_STEP) - _green_t(p, x, y, fam, -FD_STEP)) / (2 * FD_STEP)
        else:
            raise DomainError(f"unknown method {method!r}")
        xp, xm = boundary_ratios(p, x, dom)
        yp, ym = boundary_ratios(p, y, dom)
        rhs = c.d_s * _weighted_sum(fam, float(xp * yp), float(xm * ym))
    gated = s < 0.5
    notes = "scaling-law derivative" if method == "scaling" else f"centred difference, t = +-{FD_STEP:g}"
    if not gated:
        notes += "; outside stated hypotheses (s > 1/2), exploratory"
    return make_report("var-green-bis", _params(p, fam, x=x, y=y), lhs, rhs, 1e-7, notes, gated=gated,
                       runtime_ms=tm["ms"])


def _robin_t(p, x, fam, t):
    return robin(p, float(fam.phi(t)(x)), fam.domain_at(t))[0]


def hadamard_robin(p: FracParams, x: float, fam: ShapeFamily = ShapeFamily(), method: str = "scaling"):
    """d/dt R_t(phi_t(x)) - R'(x) Y(x) = -d_s sum (G(x,.)/delta^s)^2 Y.nu.

    R_lam(z) = lam^(2s-1) R_1(z/lam) makes the t-derivative (2s-1) R(x); at
    s = 1/2 the logarithmic form gives -1/pi instead.  Ratios at s = 1/2 come
    from the dense solver (tol 5e-3), otherwise closed forms (tol 1e-6).
    """
    with timer() as tm:
        dom = fam.domain
        dom.require_interior(x)
        s = p.s
        c = constants_for(FracParams(s))
        oracle = p.is_half
        r, dr = robin(p, x, dom)
        if method == "scaling":
            dt = -1.0 / math.pi if s == 0.5 else (2 * s - 1) * r
        elif method == "fd":
            dt = (_robin_t(p, x, fam, FD_STEP) - _robin_t(p, x, fam, -FD_STEP)) / (2 * FD_STEP)
        else:
            raise DomainError(f"unknown method {method!r}")
        lhs = dt - dr * float(fam.Y(x))
        if oracle:
            plus, minus = boundary_ratios_dense(p, x, dom)
        else:
            plus, minus = (float(v) for v in boundary_ratios(p, x, dom))
        rhs = -c.d_s * _weighted_sum(fam, plus**2, minus**2)
    tol = ORACLE_TOL if oracle else 1e-6
    notes = "closed Robin function, dense boundary ratios" if oracle else "closed Robin function and ratios"
    return make_report("var-Robin-func", _params(p, fam, x=x), lhs, rhs, tol, notes, runtime_ms=tm["ms"])


_ENERGY_SPEC = QuadSpec(abs_tol=1e-15, rel_tol=1e-13, max_refinements=10)


def torsion_energy(p: FracParams, fam: ShapeFamily = ShapeFamily(), t: float = 0.0) -> float:
    """J(Omega_t) = int u_t over Omega_t by endpoint-power quadrature."""
    lam = fam.domain_at(t).half_width
    ls = constants_for(FracParams(p.s)).l_s

    def f(z):
        return ls * ((lam - z) * (lam + z)) ** p.s

    return integrate(f, -lam, lam, _ENERGY_SPEC)[0]


def energy_shape_derivative(p: FracParams, fam: ShapeFamily = ShapeFamily(), method: str = "scaling"):
    """dJ(Omega_t)/dt at 0 = d_s sum (u/delta^s)^2 Y.nu for the torsion energy.

    ``scaling``: J scales as (1+t)^(2s+1).  ``fd``: centred difference in t.
    """
    with timer() as tm:
        s = p.s
        c = constants_for(FracParams(s))
        if method == "scaling":
            lhs = (2 * s + 1) * torsion_energy(p, fam)
        elif method == "fd":
            lhs = (torsion_energy(p, fam, FD_STEP) - torsion_energy(p, fam, -FD_STEP)) / (2 * FD_STEP)
        else:
            raise DomainError(f"unknown method {method!r}")
        trace = torsion(p, 0.0, fam.domain)[2]
        rhs = c.d_s * _weighted_sum(fam, trace**2, trace**2)
        closed = 2 * math.pi * 4.0 ** (-s) / math.gamma(s + 0.5) ** 2 * fam.half_width ** (2 * s + 1)
    return make_report("energy-shape-deriv", _params(p, fam, closed=closed), lhs, rhs, 1e-9,
                       "both sides reduce to 2 pi 4^-s lam^(2s+1) / Gamma(s+1/2)^2", runtime_ms=tm["ms"])
