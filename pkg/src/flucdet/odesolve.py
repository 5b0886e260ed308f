"""Homogeneous solutions and amplitude-phase solutions of h'' = -g*Omega^2(t)*h.

All integrations use an adaptive high-order embedded Runge-Kutta pair with
dense output, so solutions can be evaluated anywhere on the interval.  The
first derivative is carried as a state component and therefore interpolates
with the same accuracy as the value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DegenerateOperatorError, IntegrationError, ShootingError
from .profiles import FrequencyProfile, Interval

DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-14

CANONICAL = "canonical"
CLASSICAL_PATH = "classical-path"


class Solution:
    """Scalar function with first derivative on [t_a, t_b]."""

    __slots__ = ("t_lo", "t_hi", "_val", "_der")

    def __init__(self, t_lo: float, t_hi: float,
                 val: Callable[[float], float], der: Callable[[float], float]):
        self.t_lo = t_lo
        self.t_hi = t_hi
        self._val = val
        self._der = der

    def _clip(self, t: float) -> float:
        slack = 1e-9 * (self.t_hi - self.t_lo)
        if t < self.t_lo - slack or t > self.t_hi + slack:
            raise ValueError(f"t = {t!r} outside solution domain [{self.t_lo}, {self.t_hi}]")
        return min(max(t, self.t_lo), self.t_hi)

    def value(self, t: float) -> float:
        return float(self._val(self._clip(t)))

    def derivative(self, t: float) -> float:
        return float(self._der(self._clip(t)))

    def __call__(self, t: float) -> float:
        return self.value(t)

    @classmethod
    def from_ode(cls, ode_sol, t_lo, t_hi, value_index=0, deriv_index=1):
        return cls(t_lo, t_hi,
                   lambda t: ode_sol(t)[value_index],
                   lambda t: ode_sol(t)[deriv_index])

    @classmethod
    def from_callables(cls, t_lo, t_hi, val, der):
        return cls(t_lo, t_hi, val, der)

    @classmethod
    def linear_combination(cls, a: float, s1: "Solution", b: float, s2: "Solution"):
        return cls(s1.t_lo, s1.t_hi,
                   lambda t: a * s1._val(t) + b * s2._val(t),
                   lambda t: a * s1._der(t) + b * s2._der(t))


def solve_homogeneous(profile: FrequencyProfile, g: float,
                      init: Sequence[float], direction: str = "forward",
                      rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> Solution:
    """Integrate h'' = -g*Omega^2(t)*h with initial data (h, h') at one endpoint.

    direction "forward" starts at t_a, "backward" at t_b.  Returns a dense
    solution valid on the whole interval.
    """
    iv = profile.interval
    gg = float(g)
    if not math.isfinite(gg):
        raise ValueError("coupling g must be finite")
    om = profile.omega_sq

    def rhs(t, y):
        return (y[1], -gg * float(om(t)) * y[0])

    if direction == "forward":
        t_span = (iv.t_a, iv.t_b)
    elif direction == "backward":
        t_span = (iv.t_b, iv.t_a)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")

    result = solve_ivp(rhs, t_span, [float(init[0]), float(init[1])],
                       method="DOP853", dense_output=True, rtol=rtol, atol=atol)
    if not result.success:
        t_fail = result.t[-1] if len(result.t) else t_span[0]
        raise IntegrationError(
            f"homogeneous integration failed near t = {t_fail}: {result.message}")
    return Solution.from_ode(result.sol, iv.t_a, iv.t_b)


@dataclass(frozen=True)
class HomogeneousBasis:
    """Pair of independent solutions (eta, xi) with endpoint data and Wronskian.

    The Wronskian convention is W = eta*xi' - eta'*xi, constant in t.
    """

    eta: Solution
    xi: Solution
    eta_a: float
    eta_b: float
    deta_a: float
    deta_b: float
    xi_a: float
    xi_b: float
    dxi_a: float
    dxi_b: float
    w: float
    g: float
    profile: FrequencyProfile

    @property
    def interval(self) -> Interval:
        return self.profile.interval


def make_basis(profile: FrequencyProfile, g: float = 1.0,
               convention: str = CANONICAL,
               rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL) -> HomogeneousBasis:
    """Construct a solution basis in one of two endpoint conventions.

    "canonical": xi has (value, slope) = (1, 0) at t_a and eta has (0, 1).
    "classical-path": eta vanishes at t_a and equals 1 at t_b, xi the reverse.
    The classical-path convention fails when a solution vanishes at both
    endpoints (the operator has a Dirichlet zero mode).
    """
    iv = profile.interval
    u = solve_homogeneous(profile, g, (1.0, 0.0), rtol=rtol, atol=atol)
    v = solve_homogeneous(profile, g, (0.0, 1.0), rtol=rtol, atol=atol)
    u_b, du_b = u.value(iv.t_b), u.derivative(iv.t_b)
    v_b, dv_b = v.value(iv.t_b), v.derivative(iv.t_b)

    if convention == CANONICAL:
        return HomogeneousBasis(
            eta=v, xi=u,
            eta_a=0.0, eta_b=v_b, deta_a=1.0, deta_b=dv_b,
            xi_a=1.0, xi_b=u_b, dxi_a=0.0, dxi_b=du_b,
            w=-1.0, g=g, profile=profile)

    if convention == CLASSICAL_PATH:
        scale = iv.span * max(1.0, abs(u_b))
        if abs(v_b) <= 1e-10 * scale:
            raise DegenerateOperatorError(
                "classical-path basis is degenerate: a solution vanishes at both "
                f"endpoints (endpoint value {v_b:.3e})")
        c = -u_b / v_b
        d = 1.0 / v_b
        xi_cp = Solution.linear_combination(1.0, u, c, v)
        eta_cp = Solution.linear_combination(d, v, 0.0, u)
        return HomogeneousBasis(
            eta=eta_cp, xi=xi_cp,
            eta_a=0.0, eta_b=d * v_b, deta_a=d, deta_b=d * dv_b,
            xi_a=1.0, xi_b=u_b + c * v_b, dxi_a=c, dxi_b=du_b + c * dv_b,
            w=-d, g=g, profile=profile)

    raise ValueError(f"unknown basis convention {convention!r}")


def mix_basis(basis: HomogeneousBasis, matrix) -> HomogeneousBasis:
    """Apply an invertible 2x2 mixing (eta, xi) -> (a*eta + b*xi, c*eta + d*xi)."""
    (a, b), (c, d) = matrix
    det = a * d - b * c
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(det) <= 1e-14 * scale * scale:
        raise ValueError("mixing matrix is singular")
    return HomogeneousBasis(
        eta=Solution.linear_combination(a, basis.eta, b, basis.xi),
        xi=Solution.linear_combination(c, basis.eta, d, basis.xi),
        eta_a=a * basis.eta_a + b * basis.xi_a,
        eta_b=a * basis.eta_b + b * basis.xi_b,
        deta_a=a * basis.deta_a + b * basis.dxi_a,
        deta_b=a * basis.deta_b + b * basis.dxi_b,
        xi_a=c * basis.eta_a + d * basis.xi_a,
        xi_b=c * basis.eta_b + d * basis.xi_b,
        dxi_a=c * basis.deta_a + d * basis.dxi_a,
        dxi_b=c * basis.deta_b + d * basis.dxi_b,
        w=det * basis.w, g=basis.g, profile=basis.profile)


def wronskian_drift(basis: HomogeneousBasis, num: int = 201) -> float:
    """Maximum deviation of eta*xi' - eta'*xi from the stored Wronskian."""
    worst = 0.0
    for t in basis.interval.grid(num):
        w_t = basis.eta.value(t) * basis.xi.derivative(t) \
            - basis.eta.derivative(t) * basis.xi.value(t)
        worst = max(worst, abs(w_t - basis.w))
    return worst


# ---------------------------------------------------------------------------
# amplitude-phase representation


@dataclass(frozen=True)
class ErmakovSolution:
    """Amplitude p(t) and phase q(t) with p'' + Omega^2 p = p^-3, omega0*q'*p^2 = 1.

    q is normalized to q(t_a) = 0.  For bc="periodic" the amplitude satisfies
    p(t_b) = p(t_a) and p'(t_b) = p'(t_a) to the shooting tolerance.
    """

    p: Solution
    q: Solution
    omega0: float
    p_a: float
    p_b: float
    dp_a: float
    dp_b: float
    q_b: float
    profile: FrequencyProfile
    periodic: bool
    evenness_residual: Optional[float] = None
    newton_iterations: int = 0

    @property
    def q_a(self) -> float:
        return 0.0

    @property
    def interval(self) -> Interval:
        return self.profile.interval


def _integrate_ermakov(profile, omega0, p0, dp0, rtol, atol):
    iv = profile.interval
    om = profile.omega_sq
    w0 = float(omega0)

    def rhs(t, y):
        p = y[0]
        return (y[1], 1.0 / p ** 3 - float(om(t)) * p, 1.0 / (w0 * p * p))

    def collapse(t, y):
        return y[0] - 1e-8
    collapse.terminal = True
    collapse.direction = -1

    result = solve_ivp(rhs, (iv.t_a, iv.t_b), [p0, dp0, 0.0],
                       method="DOP853", dense_output=True,
                       rtol=rtol, atol=atol, events=collapse)
    if result.status == 1:
        raise IntegrationError(
            f"amplitude solution collapsed to zero near t = {result.t_events[0][0]}")
    if not result.success:
        raise IntegrationError(
            f"amplitude-phase integration failed near t = {result.t[-1]}: {result.message}")
    return result.sol


def solve_ermakov(profile: FrequencyProfile, omega0: float, bc: str = "initial",
                  init=None, rtol: float = DEFAULT_RTOL, atol: float = DEFAULT_ATOL,
                  max_iter: int = 100, shooting_tol: float = 1e-8,
                  fd_delta: float = 1e-6) -> ErmakovSolution:
    """Solve the amplitude-phase system for the profile.

    bc="initial" starts from p(t_a) = Omega(t_a)^(-1/2) (or 1 if Omega^2(t_a)
    is not positive) with p'(t_a) = 0, or from the supplied init pair.
    bc="periodic" runs two-parameter Newton shooting on (p(t_a), p'(t_a)) to
    enforce matching endpoint amplitude and slope.
    """
    if not omega0 > 0.0:
        raise ValueError(f"omega0 must be positive, got {omega0}")
    iv = profile.interval

    if init is not None:
        p_start, dp_start = float(init[0]), float(init[1])
        if p_start <= 0.0:
            raise ValueError("initial amplitude must be positive")
    else:
        om_a = float(profile.omega_sq(iv.t_a))
        p_start = om_a ** (-0.25) if om_a > 0.0 else 1.0
        dp_start = 0.0

    if bc == "initial":
        sol = _integrate_ermakov(profile, omega0, p_start, dp_start, rtol, atol)
        iterations = 0
    elif bc == "periodic":
        z = np.array([p_start, dp_start])

        def residual(zz):
            s = _integrate_ermakov(profile, omega0, zz[0], zz[1], rtol, atol)
            end = s(iv.t_b)
            return np.array([end[0] - zz[0], end[1] - zz[1]])

        iterations = 0
        converged = False
        res = residual(z)
        for iterations in range(1, max_iter + 1):
            if np.max(np.abs(res)) <= shooting_tol * (1.0 + abs(z[0])):
                converged = True
                break
            jac = np.empty((2, 2))
            for j in range(2):
                z_pert = z.copy()
                z_pert[j] += fd_delta
                jac[:, j] = (residual(z_pert) - res) / fd_delta
            try:
                step = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError:
                raise ShootingError(
                    f"singular shooting Jacobian at iteration {iterations}") from None
            lam = 1.0
            while z[0] + lam * step[0] <= 1e-6 and lam > 1e-4:
                lam *= 0.5
            z = z + lam * step
            res = residual(z)
        if not converged and np.max(np.abs(res)) > shooting_tol * (1.0 + abs(z[0])):
            raise ShootingError(
                f"periodic amplitude shooting did not converge in {max_iter} "
                f"iterations (residual {np.max(np.abs(res)):.3e})")
        p_start, dp_start = float(z[0]), float(z[1])
        sol = _integrate_ermakov(profile, omega0, p_start, dp_start, rtol, atol)
    else:
        raise ValueError(f"bc must be 'initial' or 'periodic', got {bc!r}")

    p = Solution.from_ode(sol, iv.t_a, iv.t_b, value_index=0, deriv_index=1)
    q = Solution.from_callables(
        iv.t_a, iv.t_b,
        lambda t: sol(t)[2],
        lambda t: 1.0 / (float(omega0) * sol(t)[0] ** 2))
    end = sol(iv.t_b)

    evenness = None
    if bc == "periodic":
        taus = [0.5 * iv.span * k / 50 for k in range(51)]
        evenness = max(abs(p.value(iv.t_a + tau) - p.value(iv.t_b - tau)) for tau in taus)

    return ErmakovSolution(
        p=p, q=q, omega0=float(omega0),
        p_a=p_start, p_b=float(end[0]), dp_a=dp_start, dp_b=float(end[1]),
        q_b=float(end[2]), profile=profile, periodic=(bc == "periodic"),
        evenness_residual=evenness, newton_iterations=iterations)
