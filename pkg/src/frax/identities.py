"""Executable boundary-integral identities on the interval and in the plane.

Every ``check_*`` function returns an :class:`~frax.report.IdentityReport`
comparing two independently assembled sides.  Boundary integrals over the two
endpoints of the interval use :func:`~frax.quadrature.boundary_sum_1d`.
"""
from __future__ import annotations

import math

import numpy as np

from .constants import FracParams, constants_for
from .errors import DomainError, UnsupportedOrderError
from .fracoracle import (boundary_ratios_dense, cached_operator, fundamental_solution,
                         pointwise_frac_laplacian, solve_dirichlet, trace_ratios)
from .green1d import IntervalDomain, boundary_ratios, green_arrays, integrate_against, robin, torsion
from .quadrature import QuadSpec, boundary_sum_1d, integrate
from .report import make_report, timer

__all__ = [
    "Cutoff",
    "check_derivative_representation",
    "check_derivative_representation_general_f",
    "check_pohozaev_green",
    "check_robin_gradient",
    "check_cutoff_double_integral",
    "check_fundamental_normalization",
    "ORACLE_TOL",
]

ORACLE_TOL = 5e-3
_ROOT2 = math.sqrt(2.0)
_U_FLOOR = 1e-90
_VOL_SPEC = QuadSpec(abs_tol=1e-12, rel_tol=1e-10, max_refinements=10)
_INNER_SPEC = QuadSpec(abs_tol=1e-12, rel_tol=1e-10, max_refinements=9)
_OUTER_SPEC = QuadSpec(abs_tol=1e-10, rel_tol=1e-8, max_refinements=8)
# the normalisation check gates at 1e-3; the inner operator need not be tighter than 1e-8
_NORM_PW_SPEC = QuadSpec(abs_tol=1e-10, rel_tol=1e-8, max_refinements=9)


class Cutoff:
    """Smooth plateau: 1 on [-1, 1], 0 outside (-2, 2), exp(-1/r) blend between."""

    @staticmethod
    def _h(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(r > 0, np.exp(-1.0 / np.where(r > 0, r, 1.0)), 0.0)

    def __call__(self, t):
        a = np.abs(np.asarray(t, dtype=float))
        ha, hb = self._h(2.0 - a), self._h(a - 1.0)
        den = ha + hb
        return np.where(a <= 1.0, 1.0, np.where(a >= 2.0, 0.0, ha / np.where(den > 0, den, 1.0)))

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        a = np.abs(t)
        mid = (a > 1.0) & (a < 2.0)
        am = np.where(mid, a, 1.5)
        ha, hb = self._h(2.0 - am), self._h(am - 1.0)
        dha = -ha / (2.0 - am) ** 2
        dhb = hb / (am - 1.0) ** 2
        val = (dha * hb - ha * dhb) / (ha + hb) ** 2
        return np.where(mid, np.sign(t) * val, 0.0)

    def difference(self, t1, t2, dt):
        """rho(t1) - rho(t2) for t1, t2 >= 0, given dt = t1 - t2 computed exactly.

        With A = h(2-t), B = h(t-1) the difference is (A1 B2 - A2 B1)/((A1+B1)(A2+B2));
        inside the blend the numerator is -A1 B2 expm1(Q - P) with Q - P
        proportional to dt, so there is no cancellation as t1 -> t2.
        """
        t1, t2, dt = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (t1, t2, dt)))
        a1, b1 = self._h(2.0 - t1), self._h(t1 - 1.0)
        a2, b2 = self._h(2.0 - t2), self._h(t2 - 1.0)
        blend = (t1 > 1.0) & (t1 < 2.0) & (t2 > 1.0) & (t2 < 2.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            q_p = dt * (1.0 / ((2.0 - t1) * (2.0 - t2)) + 1.0 / ((t1 - 1.0) * (t2 - 1.0)))
            # the expm1 form only where cancellation is possible; elsewhere it may overflow
            near = blend & (np.abs(q_p) < 1.0)
            num = np.where(near, -a1 * b2 * np.expm1(np.where(near, q_p, 0.0)), a1 * b2 - a2 * b1)
        return num / ((a1 + b1) * (a2 + b2))


CUTOFF = Cutoff()


def _ratios(p, x, dom, oracle):
    if oracle:
        return boundary_ratios_dense(p, x, dom)
    plus, minus = boundary_ratios(p, x, dom)
    return float(plus), float(minus)


def _endpoint(plus, minus, lam):
    def g(sig):
        return plus if sig == lam else minus
    return g


def check_derivative_representation(p: FracParams, x: float, dom: IntervalDomain = IntervalDomain()):
    """u' = -d_s sum (u/delta^s)(G(x,.)/delta^s) nu for the torsion function.

    Closed-form ratios for s != 1/2 (tol 1e-8); dense-oracle ratios at s = 1/2.
    """
    with timer() as tm:
        dom.require_interior(x)
        c = constants_for(FracParams(p.s))
        oracle = p.is_half
        _, du, trace = torsion(p, x, dom)
        plus, minus = _ratios(p, x, dom, oracle)
        lam = dom.half_width
        rhs = -c.d_s * trace * boundary_sum_1d(_endpoint(plus, minus, lam), True, lam)
    tol = ORACLE_TOL if oracle else 1e-8
    notes = "oracle boundary ratios" if oracle else "closed-form boundary ratios"
    return make_report("dedu", {"s": p.s, "x": x, "half_width": dom.half_width}, du, rhs, tol,
                       notes, runtime_ms=tm["ms"])


def check_derivative_representation_general_f(p: FracParams, x: float, f, df=None, n: int = 400,
                                              dom: IntervalDomain = IntervalDomain(), step: float = 1e-3):
    """Derivative representation for a manufactured source f = f(y).

    lhs: centred difference of the dense-oracle solution.  rhs: volume term
    plus boundary term, with the volume term -int dG/dy f for 2s > 1 and
    +int G f' for 2s <= 1 (``df`` required there).  The opposite sign of the
    2s <= 1 volume term is evaluated too and recorded in the notes.
    """
    with timer() as tm:
        dom.require_interior(x)
        lam = dom.half_width
        s = p.s
        c = constants_for(FracParams(s))
        op = cached_operator(s, n, lam)
        u = solve_dirichlet(op, f(op.nodes))
        lhs = float((op.evaluate(u, x + step) - op.evaluate(u, x - step)) / (2 * step))
        if 2 * s > 1:
            branch = "2s>1"
            vol = -integrate_against(p, x, f, "dGdy", dom)
            vol_alt = None
        else:
            if df is None:
                raise DomainError("the 2s <= 1 branch needs the source derivative df")
            branch = "2s<=1"
            if p.s == 0.5:
                w = solve_dirichlet(op, df(op.nodes))
                vol = float(op.evaluate(w, x))
            else:
                vol = integrate_against(p, x, df, "value", dom)
            vol_alt = -vol
        if p.is_half:
            tr_plus, tr_minus = trace_ratios(op, u)
            r_plus, r_minus = boundary_ratios_dense(p, x, dom, n)
        else:
            r_plus, r_minus = boundary_ratios(p, x, dom)
            tr_plus = integrate(lambda y: boundary_ratios(p, y, dom)[0] * f(y), -lam, lam, _VOL_SPEC)[0]
            tr_minus = integrate(lambda y: boundary_ratios(p, y, dom)[1] * f(y), -lam, lam, _VOL_SPEC)[0]
        bnd = -c.d_s * (tr_plus * r_plus - tr_minus * r_minus)
        rhs = vol + bnd
        notes = f"branch {branch}; volume sign convention +int G f'" if vol_alt is not None else f"branch {branch}"
        if vol_alt is not None:
            notes += f"; opposite sign gives abs_err {abs(lhs - (vol_alt + bnd)):.3e}"
    params = {"s": s, "x": x, "n": n, "half_width": lam, "trace_plus": tr_plus, "trace_minus": tr_minus}
    return make_report("repres-partial-deriv", params, lhs, rhs, 5e-2, notes, runtime_ms=tm["ms"])


def check_pohozaev_green(p: FracParams, x: float, y: float, dom: IntervalDomain = IntervalDomain()):
    """dG/dx(x,y) + dG/dy(x,y) = -d_s sum (G(x,.)/delta^s)(G(y,.)/delta^s) nu.

    The first term is the derivative in the first argument, which by symmetry
    equals the derivative of z -> G(y, z) at z = x.
    """
    with timer() as tm:
        if p.is_half:
            raise UnsupportedOrderError("Pohozaev Green check uses the closed form, which excludes s = 1/2")
        dom.require_interior(x, y)
        if x == y:
            raise DomainError("the Green identity needs x != y")
        c = constants_for(FracParams(p.s))
        _, gx, gy, _ = green_arrays(p, x, y, dom)
        lhs = float(gx + gy)
        xp, xm = boundary_ratios(p, x, dom)
        yp, ym = boundary_ratios(p, y, dom)
        lam = dom.half_width
        rhs = -c.d_s * boundary_sum_1d(_endpoint(float(xp * yp), float(xm * ym), lam), True, lam)
    return make_report("partial-Green", {"s": p.s, "x": x, "y": y, "half_width": lam}, lhs, rhs, 1e-7,
                       runtime_ms=tm["ms"])


def check_robin_gradient(p: FracParams, x: float, dom: IntervalDomain = IntervalDomain()):
    """R'(x) = d_s sum (G(x,.)/delta^s)^2 nu; oracle ratios at s = 1/2 (tol 5e-3)."""
    with timer() as tm:
        dom.require_interior(x)
        c = constants_for(FracParams(p.s))
        oracle = p.is_half
        _, dr = robin(p, x, dom)
        plus, minus = _ratios(p, x, dom, oracle)
        lam = dom.half_width
        rhs = c.d_s * boundary_sum_1d(_endpoint(plus**2, minus**2, lam), True, lam)
    tol = ORACLE_TOL if oracle else 1e-6
    notes = ("logarithmic Robin function -(1/pi) log(2(1-x^2)), oracle boundary ratios"
             if oracle else "closed-form Robin function and ratios")
    return make_report("repres-gradient-Robin", {"s": p.s, "x": x, "half_width": lam}, dr, rhs, tol,
                       notes, runtime_ms=tm["ms"])


def _rho_sq(y):
    return CUTOFF(np.asarray(y, dtype=float) ** 2)


def _fund_difference(p, z, q):
    """F(z) - F(z (1 + q)) for q > -1 without cancellation as q -> 0 (N = 1)."""
    q = np.asarray(q, dtype=float)
    if p.dim == 1 and p.s == 0.5:
        return np.log1p(q) / math.pi
    alpha = 2.0 * p.s - 1.0
    b = constants_for(p).b_Ns
    return -b * abs(z) ** alpha * np.expm1(alpha * np.log1p(q))


def _nonzero_piece(lo, hi, z):
    """False when rho(y^2) = rho(z^2) identically on (lo, hi)."""
    both_plateau = max(abs(lo), abs(hi)) <= 1.0 and abs(z) <= 1.0
    both_outside = min(abs(lo), abs(hi)) >= _ROOT2 and lo * hi > 0 and abs(z) >= _ROOT2
    return not (both_plateau or both_outside)


def check_cutoff_double_integral(p: FracParams):
    """c_{N,s} double integral of (rho(y^2)-rho(z^2))(F(z)-F(y))/|z-y|^(1+2s) equals -2.

    F is the fundamental solution.  The integrand is even under (y,z) -> (-y,-z),
    so the outer integral runs over z > 0 and is doubled.  The inner integral
    is split at y = z, where the integrand is O(|y-z|^(1-2s)), and at
    0, +-1, +-sqrt(2).
    """
    if p.dim != 1:
        raise UnsupportedOrderError("the cutoff double integral is implemented for N = 1")
    with timer() as tm:
        s = p.s
        c = constants_for(p).c_Ns

        def fund(r):
            return fundamental_solution(p, np.abs(r))

        def inner(z):
            rz, fz = float(_rho_sq(z)), float(fund(z))

            def g_off(u, sign):
                # exact offset u = |y - z|, never crossing 0; nodes below _U_FLOOR carry no mass
                u = np.maximum(u, _U_FLOOR)
                y = z + sign * u
                drho = CUTOFF.difference(y * y, z * z, sign * u * (2.0 * z + sign * u))
                v = drho * _fund_difference(p, z, sign * u / z) * u ** (-1.0 - 2.0 * s)
                return np.where(u > _U_FLOOR, v, 0.0)

            def g(y):
                return (_rho_sq(y) - rz) * (fz - fund(y)) * np.abs(z - y) ** (-1.0 - 2.0 * s)

            cuts = [-_ROOT2, -1.0, 0.0, 1.0, _ROOT2]
            right = [c for c in cuts if c > z]
            left = [c for c in reversed(cuts) if c < z]
            total = 0.0
            for sign, side in ((1.0, right), (-1.0, left)):
                if side:
                    half = 0.5 * abs(side[0] - z)
                    total += integrate(lambda u: g_off(u, sign), 0.0, half, _INNER_SPEC)[0]
                    pts = [z + sign * half] + side
                    for a, b_ in zip(pts[:-1], pts[1:]):
                        lo, hi = min(a, b_), max(a, b_)
                        # slivers of a few ulp hold no mass and have no interior nodes
                        if hi - lo > 1e-13 and _nonzero_piece(lo, hi, z):
                            total += integrate(g, lo, hi, _INNER_SPEC)[0]
                    end = side[-1]
                else:
                    end = z
                if rz > 0.0:
                    # outside the plateau support only -rho(z^2)(F(z)-F(y)) survives
                    if side:
                        total += integrate(lambda t_: g(end + sign * t_), 0.0, math.inf,
                                           _INNER_SPEC.with_kind("semi_infinite"))[0]
                    else:
                        total += integrate(lambda u: g_off(u, sign), 0.0, math.inf,
                                           _INNER_SPEC.with_kind("semi_infinite"))[0]
            return total

        def outer(zs):
            # F(z) ~ z^(2s-1) is integrable at 0; nodes below _U_FLOOR would overflow
            return np.array([inner(float(z)) if z > _U_FLOOR else 0.0 for z in np.atleast_1d(zs)])

        val = 0.0
        for a, b in ((0.0, 1.0), (1.0, _ROOT2)):
            val += integrate(outer, a, b, _OUTER_SPEC)[0]
        val += integrate(lambda t: outer(_ROOT2 + t), 0.0, math.inf, _OUTER_SPEC.with_kind("semi_infinite"))[0]
        lhs = 2.0 * c * val
    return make_report("cutoff-double-integral", {"s": s, "dim": p.dim}, lhs, -2.0, 1e-3,
                       "diagonal split exactly at y = z; no excised band", runtime_ms=tm["ms"])


def check_fundamental_normalization(p: FracParams, b: float | None = None):
    """int F(z) (-Delta)^s[rho(|.|^2)](z) dz = rho(0) = 1 with F = b |z|^(2s-N).

    ``b`` overrides the fundamental-solution prefactor; the check is linear in b.
    """
    if p.dim not in (1, 2):
        raise UnsupportedOrderError("normalisation check supports N = 1, 2")
    with timer() as tm:
        s, n_dim = p.s, p.dim
        if b is None:
            def fund(r):
                return fundamental_solution(p, r)
            b_used = constants_for(p).b_Ns
        else:
            if n_dim == 1 and s == 0.5:
                raise UnsupportedOrderError("logarithmic kernel has no power prefactor to override")
            b_used = float(b)

            def fund(r):
                return b_used * np.asarray(r, dtype=float) ** (2 * s - n_dim)

        plateau = (-1.0, 1.0) if n_dim == 1 else (1.0,)

        def lap(r):
            return pointwise_frac_laplacian(p, _rho_sq, r, support=_ROOT2, breakpoints=plateau,
                                            spec=_NORM_PW_SPEC)

        measure = 2.0 if n_dim == 1 else 2.0 * math.pi

        def outer(rs):
            rs = np.atleast_1d(rs)
            jac = np.ones_like(rs) if n_dim == 1 else rs
            return np.array([lap(float(r)) for r in rs]) * fund(rs) * jac

        val = 0.0
        for a, b_ in ((0.0, 1.0), (1.0, _ROOT2)):
            val += integrate(outer, a, b_, _OUTER_SPEC)[0]
        val += integrate(lambda t: outer(_ROOT2 + t), 0.0, math.inf, _OUTER_SPEC.with_kind("semi_infinite"))[0]
        lhs = measure * val
    params = {"s": s, "dim": n_dim}
    if math.isfinite(b_used):
        params["b"] = b_used
    return make_report("fundamental-normalization", params, lhs, 1.0, 1e-3, runtime_ms=tm["ms"])
