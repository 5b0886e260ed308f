"""Green functions of -d^2/dt^2 - g*Omega^2(t) built from a solution basis.

Everything is assembled from the antisymmetric pair function

    f(t, t') = (eta(t)*xi(t') - xi(t)*eta(t')) / W,

which solves the homogeneous equation in each argument and has unit slope
discontinuity structure.  The Dirichlet kernel follows from endpoint products
of f, and the periodic and antiperiodic kernels differ from it by a separable
correction fixed by the monodromy-type endpoint determinant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from scipy.integrate import quad

from .errors import DegenerateOperatorError, VerificationError
from .odesolve import HomogeneousBasis

BC_DIRICHLET = "dirichlet"
BC_PERIODIC = "periodic"
BC_ANTIPERIODIC = "antiperiodic"
BOUNDARY_CONDITIONS = (BC_DIRICHLET, BC_PERIODIC, BC_ANTIPERIODIC)

ENDPOINT_DEGENERACY_TOL = 1e-10
BC_CHECK_TOL = 1e-7
_PROBE_FRACTIONS = (0.1, 0.3, 0.5, 0.7, 0.9)


class PairFunction:
    """The two-point combination f(t, t') and its partial derivatives."""

    def __init__(self, basis: HomogeneousBasis):
        scale = max(1.0, abs(basis.eta_b), abs(basis.xi_b),
                    abs(basis.deta_b), abs(basis.dxi_b))
        if abs(basis.w) <= 1e-12 * scale:
            raise ValueError(f"basis Wronskian {basis.w!r} is numerically zero")
        self.basis = basis
        self.w = basis.w

    def __call__(self, t: float, tp: float) -> float:
        b = self.basis
        return (b.eta.value(t) * b.xi.value(tp)
                - b.xi.value(t) * b.eta.value(tp)) / self.w

    def d1(self, t: float, tp: float) -> float:
        """Partial derivative in the first argument."""
        b = self.basis
        return (b.eta.derivative(t) * b.xi.value(tp)
                - b.xi.derivative(t) * b.eta.value(tp)) / self.w

    def d2(self, t: float, tp: float) -> float:
        """Partial derivative in the second argument."""
        b = self.basis
        return (b.eta.value(t) * b.xi.derivative(tp)
                - b.xi.value(t) * b.eta.derivative(tp)) / self.w

    # endpoint-anchored values computed from stored endpoint data, avoiding
    # interpolation error at the interval ends

    def from_a(self, t: float) -> float:
        """f(t, t_a)."""
        b = self.basis
        return (b.eta.value(t) * b.xi_a - b.xi.value(t) * b.eta_a) / self.w

    def d_from_a(self, t: float) -> float:
        """d/dt of f(t, t_a)."""
        b = self.basis
        return (b.eta.derivative(t) * b.xi_a - b.xi.derivative(t) * b.eta_a) / self.w

    def to_b(self, t: float) -> float:
        """f(t_b, t)."""
        b = self.basis
        return (b.eta_b * b.xi.value(t) - b.xi_b * b.eta.value(t)) / self.w

    def d_to_b(self, t: float) -> float:
        """d/dt of f(t_b, t)."""
        b = self.basis
        return (b.eta_b * b.xi.derivative(t) - b.xi_b * b.eta.derivative(t)) / self.w


def endpoint_det_dirichlet(basis: HomogeneousBasis) -> float:
    """det of [[eta_a, xi_a], [eta_b, xi_b]], the Dirichlet endpoint matrix."""
    return basis.eta_a * basis.xi_b - basis.xi_a * basis.eta_b


def endpoint_det_wrapped(basis: HomogeneousBasis, anti: bool = False) -> float:
    """det of the periodic (or antiperiodic) difference endpoint matrix."""
    s = -1.0 if anti else 1.0
    a11 = basis.eta_b - s * basis.eta_a
    a12 = basis.xi_b - s * basis.xi_a
    a21 = basis.deta_b - s * basis.deta_a
    a22 = basis.dxi_b - s * basis.dxi_a
    return a11 * a22 - a12 * a21


def _endpoint_scale(basis: HomogeneousBasis) -> float:
    m = max(abs(basis.eta_a), abs(basis.xi_a), abs(basis.eta_b), abs(basis.xi_b),
            abs(basis.deta_a), abs(basis.dxi_a), abs(basis.deta_b), abs(basis.dxi_b), 1.0)
    return m * m


@dataclass(frozen=True)
class EndpointMatrix:
    """2x2 endpoint matrix whose determinant feeds the determinant formulas."""

    entries: tuple
    kind: str
    det: float


def endpoint_matrix(basis: HomogeneousBasis, bc: str) -> EndpointMatrix:
    """Assemble the endpoint matrix for a boundary condition.

    Dirichlet uses boundary values of the two solutions; the wrapped
    conditions use differences of endpoint values and slopes.  For the
    Dirichlet case the determinant is cross-checked against the equivalent
    two-point evaluation f(t_a, t_b) * W.
    """
    if bc == BC_DIRICHLET:
        entries = ((basis.eta_a, basis.xi_a), (basis.eta_b, basis.xi_b))
        det = endpoint_det_dirichlet(basis)
        pair = PairFunction(basis)
        alt = pair(basis.interval.t_a, basis.interval.t_b) * basis.w
        if abs(det - alt) > 1e-10 * _endpoint_scale(basis):
            raise VerificationError(
                "endpoint determinant disagrees with the two-point evaluation: "
                f"{det!r} vs {alt!r}")
        return EndpointMatrix(entries=entries, kind=bc, det=det)
    if bc in (BC_PERIODIC, BC_ANTIPERIODIC):
        s = -1.0 if bc == BC_ANTIPERIODIC else 1.0
        entries = ((basis.eta_b - s * basis.eta_a, basis.xi_b - s * basis.xi_a),
                   (basis.deta_b - s * basis.deta_a, basis.dxi_b - s * basis.dxi_a))
        det = endpoint_det_wrapped(basis, anti=(bc == BC_ANTIPERIODIC))
        return EndpointMatrix(entries=entries, kind=bc, det=det)
    raise ValueError(f"unsupported boundary condition {bc!r}")


def f_function(basis: HomogeneousBasis, t: float, tp: float) -> float:
    """Evaluate f(t, t') = (eta(t) xi(t') - xi(t) eta(t')) / W."""
    return PairFunction(basis)(t, tp)


class GreenKernel:
    """Green function under one of the three supported boundary conditions.

    evaluate(t, tp) returns G(t, tp); on the diagonal the two branches are
    averaged.  evaluate_dt differentiates in the first argument, with the
    branch chosen by side ("auto", "upper" for t > tp, "lower" for t < tp).
    """

    def __init__(self, basis: HomogeneousBasis, bc: str, validate: bool = True):
        if bc not in BOUNDARY_CONDITIONS:
            raise ValueError(f"unsupported boundary condition {bc!r}")
        self.basis = basis
        self.bc = bc
        self.pair = PairFunction(basis)
        scale = _endpoint_scale(basis)

        det_d = endpoint_det_dirichlet(basis)
        if abs(det_d) <= ENDPOINT_DEGENERACY_TOL * scale:
            raise DegenerateOperatorError(
                "Dirichlet endpoint determinant vanishes "
                f"({det_d:.3e}); the Green function does not exist")
        self.f_ab = det_d / basis.w

        if bc == BC_DIRICHLET:
            self.delta = None
        else:
            anti = bc == BC_ANTIPERIODIC
            det_w = endpoint_det_wrapped(basis, anti=anti)
            if abs(det_w) <= ENDPOINT_DEGENERACY_TOL * scale:
                raise DegenerateOperatorError(
                    f"{bc} endpoint determinant vanishes ({det_w:.3e}); "
                    "the Green function does not exist")
            self.delta = det_w / basis.w

        if validate:
            self._validate_boundary_values()

    @property
    def denom(self) -> float:
        """Normalizing denominator: f(t_a, t_b) for Dirichlet, Delta otherwise."""
        return self.f_ab if self.delta is None else self.delta

    # -- evaluation ---------------------------------------------------------

    def _dirichlet_part(self, t: float, tp: float) -> float:
        p = self.pair
        if t > tp:
            return p.from_a(tp) * p.to_b(t) / self.f_ab
        if t < tp:
            return p.from_a(t) * p.to_b(tp) / self.f_ab
        return p.from_a(t) * p.to_b(t) / self.f_ab

    def _correction(self, t: float, tp: float) -> float:
        if self.bc == BC_DIRICHLET:
            return 0.0
        p = self.pair
        if self.bc == BC_PERIODIC:
            left = p.from_a(t) + p.to_b(t)
            right = p.from_a(tp) + p.to_b(tp)
            return -left * right / (self.delta * self.f_ab)
        left = p.from_a(t) - p.to_b(t)
        right = p.from_a(tp) - p.to_b(tp)
        return left * right / (self.delta * self.f_ab)

    def evaluate(self, t: float, tp: float) -> float:
        return self._dirichlet_part(t, tp) + self._correction(t, tp)

    __call__ = evaluate

    def diagonal(self, t: float) -> float:
        return self.evaluate(t, t)

    def evaluate_dt(self, t: float, tp: float, side: str = "auto") -> float:
        """Derivative of G with respect to the first argument."""
        p = self.pair
        if side == "auto":
            side = "upper" if t >= tp else "lower"
        if side == "upper":
            d_dir = p.from_a(tp) * p.d_to_b(t) / self.f_ab
        elif side == "lower":
            d_dir = p.d_from_a(t) * p.to_b(tp) / self.f_ab
        else:
            raise ValueError(f"side must be 'auto', 'upper' or 'lower', got {side!r}")
        if self.bc == BC_DIRICHLET:
            return d_dir
        if self.bc == BC_PERIODIC:
            d_left = p.d_from_a(t) + p.d_to_b(t)
            right = p.from_a(tp) + p.to_b(tp)
            return d_dir - d_left * right / (self.delta * self.f_ab)
        d_left = p.d_from_a(t) - p.d_to_b(t)
        right = p.from_a(tp) - p.to_b(tp)
        return d_dir + d_left * right / (self.delta * self.f_ab)

    def slope_jump(self, t: float) -> float:
        """Jump of the t-derivative across the diagonal; should equal -1."""
        return self.evaluate_dt(t, t, side="upper") - self.evaluate_dt(t, t, side="lower")

    def table(self, grid_size: int):
        """Values on a uniform grid: (grid, nested list of G(t_i, t_j))."""
        ts = self.basis.interval.grid(grid_size)
        return ts, [[self.evaluate(ti, tj) for tj in ts] for ti in ts]

    # -- construction-time checks -------------------------------------------

    def _validate_boundary_values(self) -> None:
        iv = self.basis.interval
        probes = [iv.t_a + fr * iv.span for fr in _PROBE_FRACTIONS]
        worst = 0.0
        for s in probes:
            scale = 1.0 + abs(self.evaluate(s, s))
            if self.bc == BC_DIRICHLET:
                res = max(abs(self.evaluate(iv.t_a, s)), abs(self.evaluate(iv.t_b, s)))
            elif self.bc == BC_PERIODIC:
                res = max(
                    abs(self.evaluate(iv.t_a, s) - self.evaluate(iv.t_b, s)),
                    abs(self.evaluate_dt(iv.t_a, s) - self.evaluate_dt(iv.t_b, s)))
            else:
                res = max(
                    abs(self.evaluate(iv.t_a, s) + self.evaluate(iv.t_b, s)),
                    abs(self.evaluate_dt(iv.t_a, s) + self.evaluate_dt(iv.t_b, s)))
            worst = max(worst, res / scale)
        if worst > BC_CHECK_TOL:
            raise VerificationError(
                f"{self.bc} Green function violates its boundary conditions "
                f"(residual {worst:.3e} > {BC_CHECK_TOL})")


def dirichlet_kernel(basis: HomogeneousBasis, validate: bool = True) -> GreenKernel:
    return GreenKernel(basis, BC_DIRICHLET, validate=validate)


def periodic_kernel(basis: HomogeneousBasis, anti: bool = False,
                    validate: bool = True) -> GreenKernel:
    return GreenKernel(basis, BC_ANTIPERIODIC if anti else BC_PERIODIC,
                       validate=validate)


def build_kernel(basis: HomogeneousBasis, bc: str, validate: bool = True) -> GreenKernel:
    return GreenKernel(basis, bc, validate=validate)


def trace_weighted_diagonal(kernel: GreenKernel, weight: Callable[[float], float],
                            epsabs: float = 1e-9, epsrel: float = 1e-9,
                            limit: int = 200) -> float:
    """Integral of weight(t) * G(t, t) over the interval.

    The diagonal of the kernel is smooth, so adaptive quadrature converges
    quickly.
    """
    iv = kernel.basis.interval
    value, _ = quad(lambda t: float(weight(t)) * kernel.diagonal(t),
                    iv.t_a, iv.t_b, epsabs=epsabs, epsrel=epsrel, limit=limit)
    return value


def dirichlet_trace_direct(basis: HomogeneousBasis) -> float:
    """Dirichlet trace of Omega^2 G assembled from the two-point function.

    Uses G(t, t) = f(t, t_a) f(t_b, t) / f(t_a, t_b) directly rather than
    going through the kernel object, which makes it a useful consistency
    check on the kernel assembly.
    """
    pair = PairFunction(basis)
    iv = basis.interval
    f_ab = pair(iv.t_a, iv.t_b)
    if abs(f_ab) <= ENDPOINT_DEGENERACY_TOL * _endpoint_scale(basis):
        raise DegenerateOperatorError(
            "Dirichlet endpoint determinant vanishes; the trace is undefined")
    omega_sq = basis.profile.omega_sq

    def integrand(t: float) -> float:
        return float(omega_sq(t)) * pair(t, iv.t_a) * pair(iv.t_b, t)

    value, _ = quad(integrand, iv.t_a, iv.t_b, epsabs=1e-9, epsrel=1e-9, limit=200)
    return value / f_ab


def trace_omega_sq(kernel: GreenKernel, check: bool = False) -> float:
    """Integral of Omega^2(t) * G(t, t) over the interval.

    With check=True the Dirichlet result is re-derived from the two-point
    function and the two assemblies must agree to 1e-8 relative.
    """
    value = trace_weighted_diagonal(kernel, kernel.basis.profile.omega_sq)
    if check and kernel.bc == BC_DIRICHLET:
        direct = dirichlet_trace_direct(kernel.basis)
        if abs(value - direct) > 1e-8 * (1.0 + abs(value)):
            raise VerificationError(
                "Dirichlet trace assemblies disagree: "
                f"kernel diagonal {value!r} vs two-point form {direct!r}")
    return value


def retarded_green(basis: HomogeneousBasis) -> Callable[[float, float], float]:
    """Retarded kernel R(t, t') = step(t - t') * f(t, t').

    Solves the same inhomogeneous equation as the boundary kernels but with
    causal support; R vanishes for t < t' and on the diagonal.
    """
    pair = PairFunction(basis)

    def retarded(t: float, tp: float) -> float:
        return pair(t, tp) if t > tp else 0.0

    return retarded
