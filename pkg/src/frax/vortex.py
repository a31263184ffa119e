"""s-point vortices: Hamiltonian N-vortex flow in the plane and a single
vortex in the unit disk driven by the fractional Robin function.

Positions are stored as an (N, 2) array.  The plane flow is the exact
Hamiltonian flow gamma_i x_i' = grad_perp_i H with
H = 1/2 sum_{i != j} gamma_i gamma_j b_{2,s} |x_i - x_j|^(2s-2);
``flow="literal"`` instead uses the kernel (x_i - x_j)^perp / |x_i - x_j|^(3-2s)
without the (2s-2) factor, for comparison runs.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import FracParams, constants_for
from .errors import CollisionError, DomainError, StepSizeError

__all__ = [
    "VortexState",
    "InvariantSnapshot",
    "StepperConfig",
    "Trajectory",
    "invariants",
    "velocity_field",
    "step",
    "run_trajectory",
    "disk_robin",
    "disk_velocity",
    "disk_robin_gradient_boundary",
    "disk_robin_hessian",
    "single_vortex_in_disk",
    "angular_speed_disk",
]

FLOWS = ("hamiltonian", "literal")
METHODS = ("rk4", "implicit_midpoint")


def perp(v):
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


@dataclass(frozen=True)
class VortexState:
    t: float
    positions: np.ndarray
    strengths: tuple

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float).reshape(-1, 2)
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        gam = tuple(float(g) for g in self.strengths)
        if len(gam) != pos.shape[0]:
            raise DomainError("need one strength per vortex")
        if any(g == 0.0 or not math.isfinite(g) for g in gam):
            raise DomainError("vortex strengths must be finite and nonzero")
        object.__setattr__(self, "strengths", gam)

    @property
    def n(self):
        return self.positions.shape[0]

    def min_distance(self):
        if self.n < 2:
            return math.inf
        d = self.positions[:, None, :] - self.positions[None, :, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        return float(dist[~np.eye(self.n, dtype=bool)].min())

    def moved(self, t, positions):
        return VortexState(t, positions, self.strengths)


@dataclass(frozen=True)
class InvariantSnapshot:
    H: float
    M: tuple
    I: float


@dataclass(frozen=True)
class StepperConfig:
    method: str = "rk4"
    dt: float = 1e-3
    collision_radius: float = 1e-6
    max_steps: int = 10**7
    flow: str = "hamiltonian"
    fp_tol: float = 1e-12
    fp_max_iter: int = 100

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.flow not in FLOWS:
            raise DomainError(f"unknown flow {self.flow!r}; expected one of {FLOWS}")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if not self.collision_radius > 0:
            raise DomainError("collision_radius must be positive")
        if self.max_steps < 1:
            raise DomainError("max_steps must be at least 1")


def _plane_params(p: FracParams):
    if p.dim != 2:
        raise DomainError("vortex dynamics need dim = 2")
    return constants_for(p).b_Ns


def invariants(state: VortexState, p: FracParams) -> InvariantSnapshot:
    b = _plane_params(p)
    gam = np.asarray(state.strengths)
    x = state.positions
    h = 0.0
    if state.n > 1:
        d = x[:, None, :] - x[None, :, :]
        r = np.hypot(d[..., 0], d[..., 1])
        off = ~np.eye(state.n, dtype=bool)
        h = 0.5 * float(np.sum((np.outer(gam, gam) * b * np.where(off, r, 1.0) ** (2 * p.s - 2))[off]))
    m = gam @ x
    i = float(gam @ np.sum(x * x, axis=1))
    return InvariantSnapshot(h, (float(m[0]), float(m[1])), i)


def _velocities(x, gam, b, s, flow):
    n = x.shape[0]
    if n < 2:
        return np.zeros_like(x)
    d = x[:, None, :] - x[None, :, :]
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2
    np.fill_diagonal(r2, 1.0)
    if flow == "hamiltonian":
        w = b * (2 * s - 2) * r2 ** (s - 2.0)
    else:
        w = b * r2 ** (s - 1.5)
    np.fill_diagonal(w, 0.0)
    return perp(np.einsum("ij,j,ijk->ik", w, gam, d))


def velocity_field(state: VortexState, p: FracParams, flow: str = "hamiltonian") -> np.ndarray:
    """x_i' for every vortex, shape (N, 2)."""
    if flow not in FLOWS:
        raise DomainError(f"unknown flow {flow!r}")
    b = _plane_params(p)
    if state.n > 1 and state.min_distance() == 0.0:
        raise CollisionError("coincident vortices", state)
    return _velocities(state.positions, np.asarray(state.strengths), b, p.s, flow)


def _rk4(f, x, dt):
    k1 = f(x)
    k2 = f(x + 0.5 * dt * k1)
    k3 = f(x + 0.5 * dt * k2)
    k4 = f(x + dt * k3)
    return x + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint(f, x, dt, tol, max_iter):
    # x1 = x + dt f((x + x1)/2) by fixed-point iteration on the midpoint
    y = x + 0.5 * dt * f(x)
    for _ in range(max_iter):
        y_new = x + 0.5 * dt * f(y)
        if np.max(np.abs(y_new - y)) <= tol * max(1.0, float(np.max(np.abs(y_new)))):
            return 2.0 * y_new - x
        y = y_new
    raise StepSizeError(f"implicit midpoint did not converge in {max_iter} iterations at dt = {dt}")


def _advance(f, x, cfg, dt):
    if cfg.method == "rk4":
        return _rk4(f, x, dt)
    return _midpoint(f, x, dt, cfg.fp_tol, cfg.fp_max_iter)


def step(state: VortexState, cfg: StepperConfig, p: FracParams, dt: float | None = None) -> VortexState:
    """Advance the plane flow by one step (``dt`` overrides cfg.dt for a final partial step)."""
    b = _plane_params(p)
    dt = cfg.dt if dt is None else dt
    gam = np.asarray(state.strengths)
    if state.min_distance() < cfg.collision_radius:
        raise CollisionError("vortices within the collision radius", state)

    def f(x):
        return _velocities(x, gam, b, p.s, cfg.flow)

    new = state.moved(state.t + dt, _advance(f, state.positions, cfg, dt))
    if new.min_distance() < cfg.collision_radius:
        raise CollisionError("vortices within the collision radius", new)
    return new


@dataclass
class Trajectory:
    states: list
    snapshots: list
    termination: str = "horizon"
    extras: dict = field(default_factory=dict)

    @property
    def final(self) -> VortexState:
        return self.states[-1]

    def times(self):
        return np.array([st.t for st in self.states])

    def drift(self) -> dict:
        """Max relative drift of H, |M| and I along the trajectory.

        Quantities that vanish initially are measured in absolute terms.
        """
        h = np.array([sn.H for sn in self.snapshots])
        m = np.array([sn.M for sn in self.snapshots])
        i = np.array([sn.I for sn in self.snapshots])

        def rel(a, a0):
            scale = float(np.max(np.abs(a0)))
            err = np.max(np.abs(a - a0))
            return float(err / scale) if scale > 0 else float(err)

        return {"H": rel(h, h[0]), "M": rel(m, m[0]), "I": rel(i, i[0])}

    def rows(self):
        for st, sn in zip(self.states, self.snapshots):
            yield [st.t, *st.positions.ravel().tolist(), sn.H, sn.M[0], sn.M[1], sn.I]

    def header(self):
        n = self.states[0].n
        cols = ["t"]
        for k in range(1, n + 1):
            cols += [f"x{k}", f"y{k}"]
        return cols + ["H", "Mx", "My", "I"]

    def write_csv(self, path_or_file, every: int = 1):
        """CSV with columns t, x1, y1, ..., xN, yN, H, Mx, My, I; floats at 17 digits."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header())
            rows = list(self.rows())
            for k, row in enumerate(rows):
                if k % every == 0 or k == len(rows) - 1:
                    w.writerow([format(v, ".17g") for v in row])
        finally:
            if own:
                fh.close()


def _integrate(initial, cfg, horizon, stepper, snap):
    if not horizon > 0:
        raise DomainError("horizon must be positive")
    n_full = int(math.floor(horizon / cfg.dt + 1e-9))
    rest = horizon - n_full * cfg.dt
    plan = [cfg.dt] * n_full + ([rest] if rest > 1e-12 * cfg.dt else [])
    states, snaps = [initial], [snap(initial)]
    state = initial
    termination = "horizon"
    for k, dt in enumerate(plan):
        if k >= cfg.max_steps:
            termination = "max_steps"
            break
        try:
            state = stepper(state, dt)
        except CollisionError:
            termination = "collision"
            break
        states.append(state)
        snaps.append(snap(state))
    return Trajectory(states, snaps, termination)


def run_trajectory(initial: VortexState, cfg: StepperConfig, p: FracParams, horizon: float) -> Trajectory:
    """Integrate to ``horizon`` (last step shortened to land on it) or until collision."""
    _plane_params(p)
    if initial.min_distance() < cfg.collision_radius:
        raise CollisionError("initial vortices within the collision radius", initial)
    return _integrate(initial, cfg, horizon, lambda st, dt: step(st, cfg, p, dt), lambda st: invariants(st, p))


def _disk_kappa(s):
    return constants_for(FracParams(s, 2)).kappa_s


def disk_robin(p: FracParams, x):
    """Robin function of the unit disk, kappa (1 - |x|^2)^(2s-2) / (1 - s), from the ball Green function."""
    x = np.asarray(x, dtype=float)
    q = 1.0 - np.sum(x * x, axis=-1)
    if np.any(q <= 0):
        raise DomainError("point outside the unit disk")
    return _disk_kappa(p.s) * q ** (2 * p.s - 2) / (1.0 - p.s)


def _disk_grad(s, x):
    q = 1.0 - np.sum(x * x, axis=-1, keepdims=True)
    return 4.0 * _disk_kappa(s) * x * q ** (2 * s - 3)


def disk_velocity(p: FracParams, x):
    """x' = 1/2 grad_perp R(x)."""
    x = np.asarray(x, dtype=float)
    if np.any(np.sum(x * x, axis=-1) >= 1.0):
        raise DomainError("point outside the unit disk")
    return 0.5 * perp(_disk_grad(p.s, x))


def disk_robin_gradient_boundary(p: FracParams, x, n_theta: int = 512) -> np.ndarray:
    """d_s int_{|sigma|=1} (G(x, .)/delta^s)^2 nu dsigma with the trapezoid rule on the circle.

    The ball Green function gives G(x, y)/delta(y)^s -> (kappa/s) (2 (1-|x|^2))^s |x - sigma|^-2.
    """
    x = np.asarray(x, dtype=float)
    s = p.s
    q = 1.0 - float(x @ x)
    if q <= 0:
        raise DomainError("point outside the unit disk")
    th = 2.0 * math.pi * np.arange(n_theta) / n_theta
    sig = np.stack([np.cos(th), np.sin(th)], axis=1)
    dist2 = np.sum((sig - x) ** 2, axis=1)
    ratio = _disk_kappa(s) / s * (2.0 * q) ** s / dist2
    d_s = constants_for(FracParams(s)).d_s
    return d_s * (2.0 * math.pi / n_theta) * (ratio**2) @ sig


def disk_robin_hessian(p: FracParams, x, h: float = 1e-5):
    """Centred-difference Hessian of the disk Robin function and its eigenvalue signs."""
    x = np.asarray(x, dtype=float)
    hess = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        hess[:, j] = (_disk_grad(p.s, x + e) - _disk_grad(p.s, x - e)) / (2 * h)
    hess = 0.5 * (hess + hess.T)
    ev = np.linalg.eigvalsh(hess)
    return hess, tuple(int(np.sign(v)) for v in ev)


def angular_speed_disk(p: FracParams, r: float) -> float:
    """1/2 R'(r) / r for the radial disk Robin function."""
    return 2.0 * _disk_kappa(p.s) * (1.0 - r * r) ** (2 * p.s - 3)


def single_vortex_in_disk(initial, cfg: StepperConfig, p: FracParams, horizon: float) -> Trajectory:
    """One vortex in the unit disk; H = R(x)/2 and |x| are conserved.

    ``extras`` carries the measured mean angular speed.
    """
    if p.dim != 2:
        p = FracParams(p.s, 2)
    x0 = np.asarray(initial, dtype=float).reshape(1, 2)
    if not float(np.sum(x0 * x0)) < 1.0:
        raise DomainError("initial point must lie strictly inside the unit disk")
    start = VortexState(0.0, x0, (1.0,))

    def f(x):
        return disk_velocity(p, x)

    def stepper(st, dt):
        return st.moved(st.t + dt, _advance(f, st.positions, cfg, dt))

    def snap(st):
        xx = st.positions
        return InvariantSnapshot(0.5 * float(disk_robin(p, xx[0])), (float(xx[0, 0]), float(xx[0, 1])),
                                 float(np.sum(xx * xx)))

    traj = _integrate(start, cfg, horizon, stepper, snap)
    pos = np.array([st.positions[0] for st in traj.states])
    ang = np.unwrap(np.arctan2(pos[:, 1], pos[:, 0]))
    t = traj.times()
    traj.extras["radius"] = np.hypot(pos[:, 0], pos[:, 1])
    traj.extras["measured_angular_speed"] = float((ang[-1] - ang[0]) / (t[-1] - t[0])) if t[-1] > t[0] else 0.0
    return traj


def rotate(state: VortexState, theta: float) -> VortexState:
    c, s = math.cos(theta), math.sin(theta)
    rot = np.array([[c, -s], [s, c]])
    return replace(state, positions=state.positions @ rot.T)
