"""Semi-discrete coupled Schrodinger-KdV system and its diagnostics.

The method-of-lines system on a ghost-padded uniform grid:

    du/dt = i (Lap_h u - beta |u|^2 u - alpha g(v) u)
    dv/dt = -D3 v - lam D0 f(v) + gamma D0 (g'(v) |u|^2)

where f, g are the (possibly truncated) quadratic flux and coupling
potential, Lap_h the three-point second difference, D0 the centered first
difference and D3 the five-point third difference.  lam = 1 recovers the
plain quadratic flux d_x(v^2); lam = 1/2 the quasilinear form v d_x v.

The exact semi-discrete flow conserves the mass ||u||_2 and the discrete
energy below; the reference RK4 integrator inherits both up to O(dt^4)
drift.  The cross-invariant Q is conserved only at the continuous level
and is monitored, not conserved, here.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import (ComplexGridFn, RealGridFn, d_zero, d_cubed, laplacian_h,
                   inner, norm_p, dplus_norm_p)
from .truncation import TruncationFamily

__all__ = ["ModelParams", "State", "RunDiagnostics", "BlowUpError",
           "rhs", "rk4_step", "stability_budget", "integrate_semidiscrete",
           "mass", "q_invariant", "energy", "apriori_quantities"]

#: dt <= RK4_STABILITY_FACTOR * h^3 keeps the explicit reference integrator
#: inside the RK4 imaginary-axis stability interval for the third-difference
#: operator (spectral radius ~ 3/h^3, interval ~ 2.8; 0.4 is conservative).
RK4_STABILITY_FACTOR = 0.4


class BlowUpError(RuntimeError):
    """NaN/Inf detected while time stepping."""

    def __init__(self, t, dt, diagnostics=None):
        super().__init__(f"non-finite state at t={t} (dt={dt})")
        self.t = t
        self.dt = dt
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class ModelParams:
    """Model coefficients and the truncation family.

    alpha couples both equations, beta weighs the cubic Schrodinger term,
    gamma the long-wave forcing, lam the quasilinear flux (1 for the plain
    system, 1/2 for the quasilinear variant the exact waves solve).
    """
    alpha: float
    beta: float
    gamma: float
    lam: float = 1.0
    trunc: TruncationFamily = field(default_factory=TruncationFamily.off)

    def hypothesis_satisfied(self):
        """True when alpha*gamma > 0, the hypothesis behind the a priori
        bounds; the solver runs either way."""
        return self.alpha * self.gamma > 0


@dataclass(frozen=True)
class State:
    t: float
    u: ComplexGridFn
    v: RealGridFn

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValueError("u and v live on different grids")

    @property
    def grid(self):
        return self.u.grid


@dataclass
class RunDiagnostics:
    """Time series sampled along a run; all lists share one length."""
    times: list = field(default_factory=list)
    mass: list = field(default_factory=list)
    q_invariant: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    v_sup: list = field(default_factory=list)
    inner_iters_u: list = field(default_factory=list)
    inner_iters_v: list = field(default_factory=list)

    def record(self, state, params, iters_u=0, iters_v=0):
        self.times.append(state.t)
        self.mass.append(mass(state))
        self.q_invariant.append(q_invariant(state, params))
        self.energy.append(energy(state, params))
        self.v_sup.append(norm_p(state.v, np.inf))
        self.inner_iters_u.append(iters_u)
        self.inner_iters_v.append(iters_v)


def rhs(state, params):
    """Time derivatives of the semi-discrete system, ghost layers zeroed."""
    g = state.grid
    u = state.u.values
    v = state.v.values
    tr = params.trunc

    pot = params.trunc.coupling(v)
    dudt = 1j * (laplacian_h(u, g)
                 - params.beta * np.abs(u)**2 * u
                 - params.alpha * pot * u)

    forcing = tr.coupling_prime(v) * np.abs(u)**2
    dvdt = (-d_cubed(v, g)
            - params.lam * d_zero(tr.flux(v), g)
            + params.gamma * d_zero(forcing, g))
    return ComplexGridFn(g, dudt), RealGridFn(g, dvdt)


def stability_budget(grid, factor=RK4_STABILITY_FACTOR):
    """Largest dt the explicit RK4 integrator should use on this grid."""
    return factor * grid.h**3


def rk4_step(state, params, dt):
    """One classical fourth-order Runge-Kutta step of the coupled system."""
    g = state.grid

    def f(t, uv, vv):
        s = State(t, ComplexGridFn(g, uv), RealGridFn(g, vv))
        du, dv = rhs(s, params)
        return du.values, dv.values

    u0, v0 = state.u.values, state.v.values
    t = state.t
    k1u, k1v = f(t, u0, v0)
    k2u, k2v = f(t + dt / 2, u0 + dt / 2 * k1u, v0 + dt / 2 * k1v)
    k3u, k3v = f(t + dt / 2, u0 + dt / 2 * k2u, v0 + dt / 2 * k2v)
    k4u, k4v = f(t + dt, u0 + dt * k3u, v0 + dt * k3v)
    u1 = u0 + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u)
    v1 = v0 + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    if not (np.all(np.isfinite(u1.view(np.float64))) and np.all(np.isfinite(v1))):
        raise BlowUpError(state.t, dt)
    return State(state.t + dt, ComplexGridFn(g, u1), RealGridFn(g, v1))


def mass(state):
    """Conserved discrete L2 norm of the short-wave field."""
    return norm_p(state.u, 2)


def q_invariant(state, params):
    """Discrete cross-invariant alpha ||v||_2^2 + 2 gamma Im (u, D0 u).

    The centered difference stands in for d_x; it is the skew-symmetric
    choice matching the cancellation that conserves Q at the continuous
    level.  Discretely Q drifts, at a rate vanishing with h.
    """
    q = params.alpha * norm_p(state.v, 2)**2
    q += 2.0 * params.gamma * inner(state.u, d_zero(state.u)).imag
    return float(q)


def energy(state, params):
    """Discrete energy conserved by the exact semi-discrete flow.

    E = gamma ||D+ u||^2 + (alpha/2) ||D+ v||^2 + (beta gamma / 2) ||u||_4^4
        + alpha gamma sum h g(v) |u|^2 - alpha lam sum h F(v)

    The flux-potential term carries the quasilinear weight lam: the
    cancellation against the D0 f(v) flux in dE/dt requires the F
    coefficient to equal lam (lam = 1 gives the plain-system energy).
    """
    g = state.grid
    u = state.u.values
    v = state.v.values
    tr = params.trunc
    a = g.active
    e = params.gamma * dplus_norm_p(state.u, 2)**2
    e += 0.5 * params.alpha * dplus_norm_p(state.v, 2)**2
    e += 0.5 * params.beta * params.gamma * norm_p(state.u, 4)**4
    e += params.alpha * params.gamma * g.h * np.sum(
        tr.coupling(v[a]) * np.abs(u[a])**2)
    e -= params.alpha * params.lam * g.h * np.sum(
        tr.flux_antiderivative(v[a]))
    return float(e)


def apriori_quantities(u0, v0, params):
    """The three data-dependent scalars bounding the truncated dynamics.

    E0 majorizes |E(0)| uniformly in the truncation level, M0 is the
    conserved mass, Q0 the initial cross-invariant.  Returned as a dict
    with keys 'E0', 'M0', 'Q0'.
    """
    al, be, ga = abs(params.alpha), abs(params.beta), abs(params.gamma)
    e0 = ga * dplus_norm_p(u0, 2)**2
    e0 += 0.5 * al * dplus_norm_p(v0, 2)**2
    e0 += al * ga * norm_p(v0, 2) * norm_p(u0, 4)**2
    e0 += al / 3.0 * norm_p(v0, 3)**3
    e0 += 0.5 * be * ga * norm_p(u0, 4)**4
    st = State(0.0, u0, v0)
    return {"E0": float(e0), "M0": mass(st), "Q0": q_invariant(st, params)}


def integrate_semidiscrete(initial, params, dt, T, sample_every=1):
    """Drive rk4_step to the first time >= T, sampling diagnostics.

    Diagnostics are recorded at t = 0, every ``sample_every`` steps, and at
    the final time.  Raises BlowUpError (with the diagnostics collected so
    far attached) if the state goes non-finite, and ValueError when dt
    exceeds the stability budget of the grid.
    """
    if dt <= 0 or T <= 0 or sample_every < 1:
        raise ValueError("dt, T must be positive and sample_every >= 1")
    budget = stability_budget(initial.grid)
    if dt > budget:
        raise ValueError(
            f"dt={dt} exceeds the RK4 stability budget {budget:.3g} "
            f"(= {RK4_STABILITY_FACTOR} h^3); shrink dt or coarsen the grid")
    diags = RunDiagnostics()
    diags.record(initial, params)
    state = initial
    n_steps = int(np.ceil(T / dt - 1e-12))
    for n in range(1, n_steps + 1):
        try:
            state = rk4_step(state, params, dt)
        except BlowUpError as exc:
            raise BlowUpError(state.t, dt, diags) from exc
        state = State(initial.t + n * dt, state.u, state.v)
        if n % sample_every == 0 or n == n_steps:
            diags.record(state, params)
    return state, diags
