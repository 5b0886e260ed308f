"""Determinant ratios through the amplitude-phase (p, q) representation.

A positive amplitude p solving p'' + Omega^2 p = p^-3 together with the
phase q from omega0*q'*p^2 = 1 parametrizes a solution basis in closed form.
The determinant ratios then reduce to endpoint data of (p, q) alone, giving a
route independent of the endpoint-matrix path; the two must agree.

The combination omega0*q(t) is invariant under the choice of omega0 (q picks
up a compensating 1/omega0), so all ratios here are omega0 independent up to
integration error.
"""

from __future__ import annotations

import math

from .errors import DegenerateOperatorError
from .odesolve import ErmakovSolution, HomogeneousBasis, Solution

PQ_DEGENERACY_TOL = 1e-10
PERIODICITY_RESIDUAL_TOL = 1e-6


def _total_phase(sol: ErmakovSolution) -> float:
    """omega0 * (q_b - q_a) with q_a = 0 by normalization."""
    return sol.omega0 * sol.q_b


def basis_from_pq(sol: ErmakovSolution) -> HomogeneousBasis:
    """Closed-form basis with eta_a = xi_b = 0 and eta_b = xi_a = 1.

    xi(t) = p(t) p_b sin(omega0 (q_b - q(t))) / D and
    eta(t) = p(t) p_a sin(omega0 q(t)) / D with D = p_a p_b sin(omega0 q_b).
    Derivatives use the phase constraint omega0 q' = 1/p^2, so no numerical
    differentiation is involved.
    """
    w0 = sol.omega0
    p, q = sol.p, sol.q
    p_a, p_b = sol.p_a, sol.p_b
    phase = _total_phase(sol)
    sin_phase = math.sin(phase)
    if abs(sin_phase) <= PQ_DEGENERACY_TOL:
        raise DegenerateOperatorError(
            "amplitude-phase denominator sin(omega0 q_b) vanishes "
            f"({sin_phase:.3e}): the operator has a Dirichlet zero mode")
    d = p_a * p_b * sin_phase

    def xi_val(t):
        return p.value(t) * p_b * math.sin(w0 * (sol.q_b - q.value(t))) / d

    def xi_der(t):
        rest = w0 * (sol.q_b - q.value(t))
        return (p.derivative(t) * p_b * math.sin(rest)
                - (p_b / p.value(t)) * math.cos(rest)) / d

    def eta_val(t):
        return p.value(t) * p_a * math.sin(w0 * q.value(t)) / d

    def eta_der(t):
        run = w0 * q.value(t)
        return (p.derivative(t) * p_a * math.sin(run)
                + (p_a / p.value(t)) * math.cos(run)) / d

    iv = sol.interval
    xi = Solution.from_callables(iv.t_a, iv.t_b, xi_val, xi_der)
    eta = Solution.from_callables(iv.t_a, iv.t_b, eta_val, eta_der)

    cos_phase = math.cos(phase)
    dxi_a = (sol.dp_a * p_b * sin_phase - (p_b / p_a) * cos_phase) / d
    dxi_b = -1.0 / d
    deta_a = 1.0 / d
    deta_b = (sol.dp_b * p_a * sin_phase + (p_a / p_b) * cos_phase) / d

    return HomogeneousBasis(
        eta=eta, xi=xi,
        eta_a=0.0, eta_b=1.0, deta_a=deta_a, deta_b=deta_b,
        xi_a=1.0, xi_b=0.0, dxi_a=dxi_a, dxi_b=dxi_b,
        w=-1.0 / d, g=1.0, profile=sol.profile)


def det_ratio_dirichlet_pq(sol: ErmakovSolution) -> float:
    """Dirichlet determinant ratio p_a p_b sin(omega0 q_b) / (t_b - t_a)."""
    return sol.p_a * sol.p_b * math.sin(_total_phase(sol)) / sol.interval.span


def det_ratio_periodic_pq(sol: ErmakovSolution, anti: bool = False) -> float:
    """Wrapped-boundary ratio 4sin^2(omega0 q_b/2) / 4sin^2(omega0 T/2)
    (cosines for the antiperiodic case).

    Valid only for an amplitude satisfying the periodic endpoint conditions,
    which the formula's derivation assumes; a non-periodic solution is
    rejected.
    """
    res_p = abs(sol.p_b - sol.p_a)
    res_dp = abs(sol.dp_b - sol.dp_a)
    if (res_p > PERIODICITY_RESIDUAL_TOL * (1.0 + abs(sol.p_a))
            or res_dp > PERIODICITY_RESIDUAL_TOL * (1.0 + abs(sol.dp_a))):
        raise ValueError(
            "amplitude solution does not satisfy periodic endpoint "
            f"conditions (residuals {res_p:.3e}, {res_dp:.3e}); solve with "
            "bc='periodic'")
    half = 0.5 * _total_phase(sol)
    ref_half = 0.5 * sol.omega0 * sol.interval.span
    if anti:
        num = math.cos(half) ** 2
        den = math.cos(ref_half) ** 2
    else:
        num = math.sin(half) ** 2
        den = math.sin(ref_half) ** 2
    if abs(den) <= PQ_DEGENERACY_TOL:
        raise DegenerateOperatorError(
            "reference determinant vanishes for this omega0; "
            "choose a different omega0")
    return num / den
