"""Closed-form Green, regular-part, Robin and torsion functions on an interval.

Everything is evaluated on the unit interval (-1, 1) and transported to
(-lam, lam) by the scaling law G_lam(x, y) = lam^(2s-1) G(x/lam, y/lam).
The incomplete integral inside G is computed by quadrature: Gauss-Jacobi for
the t^(s-1) weight on (0, min(r, 1)) and composite Gauss-Legendre in log t
above 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import FracParams, constants_for
from .errors import DomainError, SingularityError, UnsupportedOrderError
from .quadrature import gauss_jacobi, gauss_legendre
from .report import IdentityReport, make_report, timer

__all__ = [
    "IntervalDomain",
    "GreenEval",
    "RobinProfile",
    "incomplete_integral",
    "tail_integral",
    "green_interval",
    "green_value",
    "green_arrays",
    "integrate_against",
    "boundary_ratios",
    "regular_part",
    "torsion",
    "robin",
    "robin_profile",
    "check_green_bounds",
]

_GJ_POINTS = 32
_GL_POINTS = 16
_PANEL = 2.0  # width of log-variable panels
_U_MIN = 1e-100
_SPLIT_R = 16.0  # s > 1/2: r0 beyond which the subtracted representation is used


@dataclass(frozen=True)
class IntervalDomain:
    """The interval (-half_width, half_width)."""

    half_width: float = 1.0

    def __post_init__(self):
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise DomainError("half_width must be a positive finite number")

    def delta(self, x):
        return self.half_width - np.abs(x)

    def require_interior(self, *pts):
        for x in pts:
            if not np.all(np.abs(np.asarray(x, dtype=float)) < self.half_width):
                raise DomainError(f"point(s) {x!r} not inside (-{self.half_width}, {self.half_width})")


@dataclass(frozen=True)
class GreenEval:
    value: float
    dGdx: float
    dGdy: float
    ratio_plus: float
    ratio_minus: float
    r0: float


@dataclass(frozen=True)
class RobinProfile:
    x: np.ndarray
    values: np.ndarray
    gradient: np.ndarray


def _require_green_order(p: FracParams):
    if p.dim != 1:
        raise UnsupportedOrderError("interval formulas need dim = 1")
    if p.is_half:
        raise UnsupportedOrderError(
            "closed-form Green function excludes s = 1/2; use fracoracle.dense_green for this order")


def incomplete_integral(s, r, expo=-0.5):
    """I(r) = int_0^r t^(s-1) (1+t)^expo dt, vectorised over r >= 0."""
    r = np.asarray(r, dtype=float)
    flat = np.atleast_1d(r).ravel()
    out = np.zeros_like(flat)
    x, w = gauss_jacobi(_GJ_POINTS, 0.0, s - 1.0)
    tau = 0.5 * (1.0 + x)
    r1 = np.minimum(flat, 1.0)
    # t = r1*tau ; t^(s-1) dt = r1^s 2^-s (1+x)^(s-1) dx
    out += r1**s * 2.0**(-s) * ((1.0 + np.outer(r1, tau)) ** expo @ w)
    big = flat > 1.0
    if big.any():
        ln_r = np.log(flat[big])
        panels = max(1, int(math.ceil(ln_r.max() / _PANEL)))
        gx, gw = gauss_legendre(_GL_POINTS)
        xi = (np.arange(panels)[:, None] + 0.5 * (1.0 + gx)[None, :]).ravel() / panels
        wi = np.tile(0.5 * gw, panels) / panels
        v = np.outer(ln_r, xi)
        # t = e^v: t^(s-1)(1+t)^expo dt = e^((s+expo) v) (1+e^-v)^expo dv
        integrand = np.exp((s + expo) * v) * (1.0 + np.exp(-v)) ** expo
        out[big] += ln_r * (integrand @ wi)
    out[flat == 0.0] = 0.0
    return out.reshape(r.shape) if r.ndim else float(out[0])


def tail_integral(s, r):
    """T(r) = int_r^inf t^(s-1) (1+t)^(-1/2) dt for s < 1/2, r > 0."""
    if not s < 0.5:
        raise UnsupportedOrderError("tail integral converges only for s < 1/2")
    r = np.asarray(r, dtype=float)
    flat = np.atleast_1d(r).ravel()
    x, w = gauss_jacobi(_GJ_POINTS, 0.0, -s - 0.5)
    tau = 0.5 * (1.0 + x)
    rr = np.maximum(flat, 1.0)
    # t = rr/tau: T(rr) = rr^s int_0^1 tau^(-s-1/2) (tau + rr)^(-1/2) dtau
    out = rr**s * 2.0**(s - 0.5) * ((np.add.outer(rr, tau)) ** -0.5 @ w)
    small = flat < 1.0
    if small.any():
        out[small] += incomplete_integral(s, 1.0) - incomplete_integral(s, flat[small])
    return out.reshape(r.shape) if r.ndim else float(out[0])


def _subtracted_tail(s, r):
    """T2(r) = int_r^inf t^(s-1) (t^-1/2 - (1+t)^-1/2) dt for r >= 1, 1/2 < s < 1."""
    x, w = gauss_jacobi(_GJ_POINTS, 0.0, 0.5 - s)
    tau = 0.5 * (1.0 + x)
    rr = r[:, None]
    # t = r/tau: T2 = r^(s-1/2) int_0^1 tau^(1/2-s) / ((r+tau) + sqrt(r (r+tau))) dtau
    with np.errstate(over="ignore"):
        den = (rr + tau) + np.sqrt(rr * (rr + tau))
    return r ** (s - 0.5) * 2.0 ** (s - 1.5) * ((1.0 / den) @ w)


def _unit_green(s, x, y, derivs=True, offset=None):
    """Value, d/dx, d/dy and r0 on (-1, 1); arrays broadcast.

    ``offset`` = y - x supplied exactly by the caller overrides the rounded
    difference, which matters within a few ulp of the pole.
    """
    kap = constants_for(FracParams(s)).kappa_s
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if offset is None:
        d = np.abs(x - y)
        sg = np.sign(x - y)
    else:
        offset = np.broadcast_to(np.asarray(offset, dtype=float), x.shape)
        d = np.abs(offset)
        sg = -np.sign(offset)
    ax = (1.0 - x) * (1.0 + x)
    ay = (1.0 - y) * (1.0 + y)
    r0 = ax * ay / d**2
    dr_dx = -2.0 * x * ay / d**2 - 2.0 * r0 * sg / d
    dr_dy = -2.0 * y * ax / d**2 + 2.0 * r0 * sg / d
    if s > 0.5:
        near = np.atleast_1d(r0 > _SPLIT_R)
    else:
        near = np.zeros(np.atleast_1d(r0).shape, dtype=bool)
    val = np.empty(near.shape)
    gx = np.empty(near.shape)
    gy = np.empty(near.shape)
    flat = [np.atleast_1d(a).ravel() for a in (d, ax, ay, r0, sg, dr_dx, dr_dy, x, y)]
    d_, ax_, ay_, r_, sg_, rx_, ry_, x_, y_ = flat
    near = near.ravel()
    far = ~near
    val, gx, gy = val.ravel(), gx.ravel(), gy.ravel()
    if far.any():
        dd, rr = d_[far], r_[far]
        big_i = incomplete_integral(s, rr)
        val[far] = kap * dd ** (2 * s - 1) * big_i
        if derivs:
            di = rr ** (s - 1) * (1.0 + rr) ** -0.5
            lead = (2 * s - 1) * dd ** (2 * s - 2) * big_i
            gx[far] = kap * (lead * sg_[far] + dd ** (2 * s - 1) * di * rx_[far])
            gy[far] = kap * (-lead * sg_[far] + dd ** (2 * s - 1) * di * ry_[far])
    if near.any():
        # G = F + kappa (ax ay)^(s-1/2)/(s-1/2) + kappa d^(2s-1) T2(r0): no cancellation near x = y
        b = constants_for(FracParams(s)).b_Ns
        dd, rr, pa, pb = d_[near], r_[near], ax_[near], ay_[near]
        t2 = _subtracted_tail(s, rr)
        val[near] = (b * dd ** (2 * s - 1) + kap * (pa * pb) ** (s - 0.5) / (s - 0.5)
                     + kap * dd ** (2 * s - 1) * t2)
        if derivs:
            sq, sq1 = np.sqrt(rr), np.sqrt(1.0 + rr)
            g2 = rr ** (s - 1) / (sq * sq1 * (sq + sq1))
            fl = (2 * s - 1) * dd ** (2 * s - 2) * (b + kap * t2)
            gx[near] = (fl * sg_[near] - 2.0 * kap * x_[near] * pb ** (s - 0.5) * pa ** (s - 1.5)
                        - kap * dd ** (2 * s - 1) * g2 * rx_[near])
            gy[near] = (-fl * sg_[near] - 2.0 * kap * y_[near] * pa ** (s - 0.5) * pb ** (s - 1.5)
                        - kap * dd ** (2 * s - 1) * g2 * ry_[near])
    shape = np.shape(r0)
    val = val.reshape(shape)
    if not derivs:
        return (val if shape else float(val)), None, None, r0
    gx, gy = gx.reshape(shape), gy.reshape(shape)
    if not shape:
        return float(val), float(gx), float(gy), r0
    return val, gx, gy, r0


def _unit_ratios(s, x):
    kap = constants_for(FracParams(s)).kappa_s
    x = np.asarray(x, dtype=float)
    pre = 2.0**s / s * kap
    plus = pre * (1.0 + x) ** s * (1.0 - x) ** (s - 1)
    minus = pre * (1.0 - x) ** s * (1.0 + x) ** (s - 1)
    return plus, minus


def green_arrays(p: FracParams, x, y, dom: IntervalDomain = IntervalDomain(), derivs=True, offset=None):
    """Vectorised Green function on ``dom``: (value, dGdx, dGdy, r0).

    No singularity check: entries with x == y come back non-finite.  An exact
    ``offset`` = y - x may be passed for points next to the pole.
    """
    _require_green_order(p)
    lam = dom.half_width
    s = p.s
    off = None if offset is None else np.asarray(offset, dtype=float) / lam
    with np.errstate(divide="ignore", invalid="ignore"):
        val, gx, gy, r0 = _unit_green(s, np.asarray(x) / lam, np.asarray(y) / lam, derivs, off)
    val = val * lam ** (2 * s - 1)
    if derivs:
        gx = gx * lam ** (2 * s - 2)
        gy = gy * lam ** (2 * s - 2)
    return val, gx, gy, r0


def green_value(p: FracParams, x, y, dom: IntervalDomain = IntervalDomain()):
    """Green function values only, vectorised."""
    return green_arrays(p, x, y, dom, derivs=False)[0]


def boundary_ratios(p: FracParams, x, dom: IntervalDomain = IntervalDomain()):
    """(G(x, .)/delta^s)(+lam) and (-lam), vectorised in x."""
    _require_green_order(p)
    lam = dom.half_width
    plus, minus = _unit_ratios(p.s, np.asarray(x, dtype=float) / lam)
    sc = lam ** (p.s - 1)
    return plus * sc, minus * sc


def integrate_against(p: FracParams, x: float, weight, kernel: str = "value",
                      dom: IntervalDomain = IntervalDomain(), spec=None) -> float:
    """int G(x, y) weight(y) dy (kernel "value") or int dG/dy(x, y) weight(y) dy ("dGdy").

    Both sides of the pole are integrated in the offset variable u = |y - x|,
    so the kernel sees the exact distance.
    """
    from .quadrature import QuadSpec, integrate

    spec = spec or QuadSpec(abs_tol=1e-13, rel_tol=1e-11, max_refinements=10)
    if kernel not in ("value", "dGdy"):
        raise DomainError("kernel must be 'value' or 'dGdy'")
    dom.require_interior(x)
    lam = dom.half_width
    idx = 0 if kernel == "value" else 2

    def side(sign):
        def g(u):
            # below _U_MIN r0 overflows; the integrable kernel has no mass there
            u = np.maximum(u, _U_MIN)
            y = x + sign * u
            k = green_arrays(p, x, y, dom, derivs=(idx == 2), offset=sign * u)[idx]
            return np.where(u > _U_MIN, k * weight(y), 0.0)
        return g

    right = integrate(side(1.0), 0.0, lam - x, spec)[0]
    left = integrate(side(-1.0), 0.0, lam + x, spec)[0]
    return right + left


def green_interval(p: FracParams, x: float, y: float, dom: IntervalDomain = IntervalDomain()) -> GreenEval:
    """Green function bundle at an interior pair x != y."""
    _require_green_order(p)
    dom.require_interior(x, y)
    if x == y:
        raise SingularityError("Green function is singular on the diagonal x = y")
    val, gx, gy, r0 = green_arrays(p, float(x), float(y), dom)
    plus, minus = boundary_ratios(p, float(x), dom)
    return GreenEval(float(val), float(gx), float(gy), float(plus), float(minus), float(r0))


def regular_part(p: FracParams, x, y, dom: IntervalDomain = IntervalDomain()):
    """H(x, y) = F(x, y) - G(x, y), vectorised, off the diagonal.

    For s < 1/2 the exact tail form kappa |x-y|^(2s-1) T(r0) avoids the
    cancellation of F - G; otherwise F - G is formed directly.
    """
    _require_green_order(p)
    lam = dom.half_width
    s = p.s
    xs = np.asarray(x, dtype=float) / lam
    ys = np.asarray(y, dtype=float) / lam
    d = np.abs(xs - ys)
    c = constants_for(p)
    if s < 0.5:
        r0 = (1 - xs) * (1 + xs) * (1 - ys) * (1 + ys) / d**2
        h = c.kappa_s * d ** (2 * s - 1) * tail_integral(s, r0)
    else:
        h = c.b_Ns * d ** (2 * s - 1) - _unit_green(s, xs, ys, derivs=False)[0]
    return h * lam ** (2 * s - 1)


def torsion(p: FracParams, x, dom: IntervalDomain = IntervalDomain(), t_scale: float = 0.0):
    """Torsion function of (-(1+t)lam, (1+t)lam): returns (u, du, endpoint ratio u/delta^s)."""
    s = p.s
    ls = constants_for(FracParams(s)).l_s
    L = (1.0 + t_scale) * dom.half_width
    x = np.asarray(x, dtype=float)
    q = (L - np.abs(x)) * (L + np.abs(x))
    inside = q > 0
    qq = np.where(inside, q, 1.0)
    u = np.where(inside, ls * qq**s, 0.0)
    du = np.where(inside, -2.0 * s * ls * x * qq ** (s - 1), 0.0)
    ratio = ls * (2.0 * L) ** s
    if x.ndim == 0:
        return float(u), float(du), float(ratio)
    return u, du, ratio


def _robin_closed(s, x, lam):
    x = np.asarray(x, dtype=float)
    q = (lam - x) * (lam + x)
    if abs(s - 0.5) < 1e-3:
        if s != 0.5:
            raise UnsupportedOrderError("logarithmic Robin form is exact only at s = 1/2")
        # R(z) = -(1/pi) log(2 (lam^2 - z^2)/lam); sign fixed by G = F - H with F = -(1/pi) log|.|
        return -np.log(2.0 * q / lam) / math.pi, 2.0 * x / (math.pi * q)
    kap = constants_for(FracParams(s)).kappa_s
    r = kap * q ** (2 * s - 1) / ((0.5 - s) * lam ** (2 * s - 1))
    dr = 4.0 * kap * x * q ** (2 * s - 2) / lam ** (2 * s - 1)
    return r, dr


def _riesz_regular_half(x, y, lam):
    # s = 1/2: H = F - G with the classical logarithmic Green function
    xs, ys = x / lam, y / lam
    root = np.sqrt((1 - xs) * (1 + xs) * (1 - ys) * (1 + ys))
    return -np.log(1.0 - xs * ys + root) / math.pi - math.log(lam) / math.pi


def _robin_limit_value(p, x, lam):
    """Diagonal limit of H(x, x +- h) by Richardson extrapolation."""
    h0 = 1e-2 * (lam - abs(x))
    if p.s == 0.5:
        def reg(y):
            return _riesz_regular_half(x, y, lam)
    else:
        def reg(y):
            return regular_part(p, x, y, IntervalDomain(lam))
    hs = h0 / np.array([1.0, 2.0, 4.0])
    e = 0.5 * (reg(x + hs) + reg(x - hs))
    r1 = (4 * e[1] - e[0]) / 3
    r2 = (4 * e[2] - e[1]) / 3
    return (16 * r2 - r1) / 15


def robin(p: FracParams, x: float, dom: IntervalDomain = IntervalDomain(), method: str = "closed"):
    """Robin function R(x) = H(x, x) and its derivative.

    ``closed`` evaluates kappa (1-x^2)^(2s-1)/(1/2-s) (logarithmic at s=1/2).
    ``limit`` extrapolates the diagonal of the regular part and
    differentiates by centred differences with step 1e-4 delta(x).
    """
    if p.dim != 1:
        raise UnsupportedOrderError("interval Robin function needs dim = 1")
    lam = dom.half_width
    if not abs(x) < lam:
        raise DomainError(f"x = {x!r} is not inside the domain")
    if method == "closed":
        r, dr = _robin_closed(p.s, float(x), lam)
        return float(r), float(dr)
    if method == "limit":
        if p.is_half and p.s != 0.5:
            raise UnsupportedOrderError("no regular-part formula this close to s = 1/2")
        eps = 1e-4 * (lam - abs(x))
        r = _robin_limit_value(p, float(x), lam)
        dr = (_robin_limit_value(p, x + eps, lam) - _robin_limit_value(p, x - eps, lam)) / (2 * eps)
        return float(r), float(dr)
    raise DomainError(f"unknown Robin method {method!r}")


def robin_profile(p: FracParams, xs, dom: IntervalDomain = IntervalDomain(), method="closed") -> RobinProfile:
    xs = np.asarray(xs, dtype=float)
    vals = np.array([robin(p, x, dom, method) for x in xs])
    return RobinProfile(xs, vals[:, 0], vals[:, 1])


def _default_bound_grid(dom):
    t = np.cos(np.pi * (np.arange(16) + 0.5) / 16) * dom.half_width
    xx, yy = np.meshgrid(t, t)
    mask = xx != yy
    return np.column_stack([xx[mask], yy[mask]])


def check_green_bounds(p: FracParams, dom: IntervalDomain = IntervalDomain(), grid=None,
                       margin: float = 1.25) -> IdentityReport:
    """Two-sided Green estimate and gradient estimate on a grid of pairs.

    The constants Lambda, C1, C2 are fitted on even-indexed pairs and the bounds
    validated on odd-indexed pairs.  The two-sided estimate needs N > 2s, so in
    1D it is only checked for s < 1/2; the gradient bound is checked for all s.
    The report's lhs is the excess of the worst normalised ratio over 1.
    """
    with timer() as tm:
        pairs = _default_bound_grid(dom) if grid is None else np.asarray(grid, dtype=float)
        x, y = pairs[:, 0], pairs[:, 1]
        dom.require_interior(x, y)
        if np.any(x == y):
            raise SingularityError("bound grid contains a diagonal pair")
        s = p.s
        g, _, gy, _ = green_arrays(p, x, y, dom)
        d = np.abs(x - y)
        dx, dy = dom.delta(x), dom.delta(y)
        grad_ratio = np.abs(gy) * np.minimum(d, dy) / (p.dim * g)
        worst = float(grad_ratio.max())
        params = {"s": s, "half_width": dom.half_width, "n_pairs": len(x),
                  "gradient_ratio": worst}
        notes = "gradient bound checked"
        if s < 0.5:
            near = d ** (2 * s - 1)
            far = dx**s * dy**s / d
            low = np.minimum(near, far)
            fit = np.arange(len(x)) % 2 == 0
            val = ~fit
            lam_c = margin * float(np.max(g[fit] / near[fit]))
            c2 = margin * float(np.max(g[fit] / (lam_c * far[fit])))
            c1 = float(np.min(g[fit] / (lam_c * low[fit]))) / margin
            ratios = np.concatenate([
                g[val] / (lam_c * near[val]),
                g[val] / (lam_c * c2 * far[val]),
                lam_c * c1 * low[val] / g[val],
            ])
            params.update({"Lambda": lam_c, "C1": c1, "C2": c2, "two_sided_ratio": float(ratios.max())})
            worst = max(worst, float(ratios.max()))
            notes = "two-sided and gradient bounds checked; constants fitted on half the pairs"
        else:
            notes = "two-sided estimate needs N > 2s; only the gradient bound is checked"
        params["worst_ratio"] = worst
        excess = max(0.0, worst - 1.0)
    return make_report("green-bounds", params, excess, 0.0, 0.0, notes, runtime_ms=tm["ms"])
