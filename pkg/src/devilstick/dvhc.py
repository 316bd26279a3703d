"""Discrete constraint on the center-of-mass and the feedback that enforces it.

The position constraint ties the center-of-mass to the stick orientation at
impulse instants: h(k) = [alpha*tan(theta_k), beta]. Its discrete velocity
counterpart follows from the interleaved ballistic flights. The controller
solves for (delta, I, r) so that the position residual contracts by the
diagonal factor diag(lambda_x, lambda_y) at every impulse, exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (Degenerate, NoPositiveRoot, OffSchedule, RodExceeded,
                     SingularOrientation, WrongRotationSign)
from .model import (SCHEDULE_TOL, FullState, ImpulseCmd, JuggleSpec,
                    StickParams, parity_sign)

log = logging.getLogger(__name__)

TAN_SINGULARITY_TOL = 1e-9
OMEGA_EPS = 1e-9
IMPULSE_EPS = 1e-12


@dataclass(frozen=True)
class Residuals:
    """Position residual rho and velocity residual drho at an impulse instant."""

    rho: np.ndarray
    drho: np.ndarray


def phi(theta: float, spec: JuggleSpec) -> np.ndarray:
    """Constrained center-of-mass location [alpha*tan(theta), beta]."""
    if abs(math.remainder(theta - math.pi / 2, math.pi)) < TAN_SINGULARITY_TOL:
        raise SingularOrientation(f"theta={theta} is at a tangent singularity")
    return np.array([spec.alpha * math.tan(theta), spec.beta])


def phi_increment(theta: float, k: int, spec: JuggleSpec) -> np.ndarray:
    """Constraint-map increment phi(theta_{k+1}) - phi(theta_k) across one
    flight; its vertical component vanishes for the constant-height map.
    """
    return phi(spec.theta_after(k), spec) - phi(theta, spec)


def psi(theta: float, omega: float, k: int, spec: JuggleSpec,
        params: StickParams) -> np.ndarray:
    """Constrained velocity at impulse k.

    Derived by requiring the constraint to hold at both ends of the previous
    flight; depends only on (theta, omega) and the parity of k.
    """
    if abs(omega) < OMEGA_EPS:
        raise Degenerate(f"angular rate {omega} too small for velocity constraint")
    sign = parity_sign(k)  # feasible rotation: omega < 0 odd, > 0 even
    if math.copysign(1.0, omega) != sign:
        raise WrongRotationSign(
            f"omega={omega} has the wrong sign for k={k} "
            f"(expected {'negative' if sign < 0 else 'positive'})")
    theta_next = spec.theta_after(k)
    vx = (sign * omega / spec.delta_theta) * spec.alpha * (
        math.tan(theta) - math.tan(theta_next))
    vy = -sign * params.g * spec.delta_theta / (2.0 * omega)
    return np.array([vx, vy])


def residuals(s: FullState, k: int, spec: JuggleSpec,
              params: StickParams) -> Residuals:
    """Measure both constraint residuals at a scheduled impulse instant."""
    theta_sched = spec.theta_at(k)
    if abs(s.theta - theta_sched) > SCHEDULE_TOL:
        raise OffSchedule(
            f"theta={s.theta} does not match scheduled {theta_sched} at k={k}")
    return Residuals(rho=s.h - phi(s.theta, spec),
                     drho=s.v - psi(s.theta, s.omega, k, spec, params))


def _positive_roots(a: float, b: float, c: float) -> list[float]:
    """Real positive roots of a*x**2 + b*x + c, via the cancellation-safe form."""
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0 else -0.5 * sq
    roots = []
    if a != 0:
        roots.append(q / a)
    if q != 0:
        roots.append(c / q)
    return sorted({r for r in roots if r > 0})


def check_rod(r: float, params: StickParams, policy: str) -> None:
    """Enforce the rod bound |r| < ell/2: raise under strict, log under warn."""
    if abs(r) < params.ell / 2:
        return
    msg = f"impulse offset r={r:.6g} outside the stick (+-{params.ell / 2:.6g})"
    if policy == "strict":
        raise RodExceeded(msg)
    log.warning(msg)


def _nominal_delta(theta: float, omega: float, k: int, spec: JuggleSpec,
                   params: StickParams) -> float:
    """Zero-residual time of flight used to disambiguate quadratic roots."""
    tan_ratio = 1.0 - math.tan(spec.theta_after(k)) / math.tan(theta)
    return (parity_sign(k) * 2.0 * omega * spec.alpha
            / (params.g * spec.delta_theta) * tan_ratio)


def dvhc_control(s: FullState, k: int, spec: JuggleSpec, params: StickParams,
                 r_policy: str = "strict") -> ImpulseCmd:
    """Inputs that contract the position residual by diag(lambda) this step.

    Eliminating the impulse from the two position-update components leaves a
    quadratic in the time of flight; its positive root fixes delta, then the
    impulse follows from the horizontal component and the offset from the
    scheduled rotation requirement. The returned command satisfies
    rho_{k+1} = lambda * rho_k and drho_{k+1} = (lambda - 1) * rho_k / delta_k
    exactly.
    """
    res = residuals(s, k, spec, params)
    theta = s.theta
    eta = phi_increment(theta, k, spec)
    cot = 1.0 / math.tan(theta)
    # quadratic a*delta^2 + b*delta + c = 0; note v = drho + psi
    a = 0.5 * params.g
    b = -(s.v[0] * cot + s.v[1])
    c = (eta[0] * cot + eta[1]
         + (spec.lambda_x - 1.0) * res.rho[0] * cot
         + (spec.lambda_y - 1.0) * res.rho[1])
    roots = _positive_roots(a, b, c)
    if not roots:
        raise NoPositiveRoot(
            f"no positive time-of-flight root at k={k} (a={a}, b={b}, c={c})")
    d_nom = _nominal_delta(theta, s.omega, k, spec, params)
    delta = min(roots, key=lambda r: (abs(r - d_nom), r))
    impulse = -params.m * ((spec.lambda_x - 1.0) * res.rho[0] + eta[0]
                           - s.v[0] * delta) / (delta * math.sin(theta))
    if abs(impulse) < IMPULSE_EPS:
        raise Degenerate(f"impulse magnitude {impulse} too small to place")
    offset = (-parity_sign(k) * params.inertia * spec.delta_theta
              / (impulse * delta) - params.inertia * s.omega / impulse)
    check_rod(offset, params, r_policy)
    return ImpulseCmd(I=impulse, r=offset, delta=delta)


def steady_inputs(omega: float, k: int, spec: JuggleSpec,
                  params: StickParams, r_policy: str = "strict") -> ImpulseCmd:
    """Closed-form inputs on the constraint manifold (both residuals zero)."""
    theta = spec.theta_at(k)
    sign = parity_sign(k)
    if math.copysign(1.0, omega) != sign:
        raise WrongRotationSign(f"omega={omega} has the wrong sign for k={k}")
    tan_ratio = 1.0 - math.tan(spec.theta_after(k)) / math.tan(theta)
    if abs(tan_ratio) < 1e-12:
        raise Degenerate("tangent-ratio factor vanishes")
    dth = spec.delta_theta
    delta = sign * 2.0 * omega * spec.alpha / (params.g * dth) * tan_ratio
    impulse = (sign * params.m / math.cos(theta)) * (
        omega * spec.alpha / dth * tan_ratio + params.g * dth / (2.0 * omega))
    offset = (-sign * params.inertia * dth * math.cos(theta)
              / (params.m * spec.alpha * tan_ratio))
    if delta <= 0:
        raise NoPositiveRoot(f"steady time of flight {delta} not positive")
    check_rod(offset, params, r_policy)
    return ImpulseCmd(I=impulse, r=offset, delta=delta)


def quadratic_coeffs(s: FullState, k: int, spec: JuggleSpec,
                     params: StickParams) -> tuple[float, float, float]:
    """(a, b, c) of the time-of-flight quadratic, for root verification."""
    res = residuals(s, k, spec, params)
    eta = phi_increment(s.theta, k, spec)
    cot = 1.0 / math.tan(s.theta)
    return (0.5 * params.g,
            -(s.v[0] * cot + s.v[1]),
            eta[0] * cot + eta[1]
            + (spec.lambda_x - 1.0) * res.rho[0] * cot
            + (spec.lambda_y - 1.0) * res.rho[1])


def on_constraint_state(omega: float, k: int, spec: JuggleSpec,
                        params: StickParams) -> FullState:
    """State with both residuals exactly zero at impulse k."""
    theta = spec.theta_at(k)
    return FullState(h=phi(theta, spec), v=psi(theta, omega, k, spec, params),
                     theta=theta, omega=omega)
