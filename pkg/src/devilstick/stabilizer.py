"""Orbit stabilization through the impulse-controlled return map.

The section is the set of states at the odd scheduled orientation with
negative angular rate, coordinatized by z = [hx, hy, vx, vy, omega]. One
return = two impulses: the given (I, r) at the odd instant, the nominal
constraint-enforcing inputs at the even one. Because that nominal feedback
also acts inside the loop, the return map linearized about the orbit's fixed
point contracts the residual directions by lambda**2, and corrections u on
top of the odd-instant inputs steer the remaining directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dvhc import dvhc_control, psi
from .dynamics import hybrid_step, time_of_flight
from .dzd import OrbitSpec, steady_impulse
from .errors import (FDInconsistent, NotOnSection, NotStabilizing,
                     RiccatiDiverged)
from .model import SCHEDULE_TOL, FullState, ImpulseCmd, JuggleSpec

RICCATI_TOL = 1e-12
RICCATI_MAX_ITER = 100_000
SPECTRAL_MARGIN = 1e-9


@dataclass(frozen=True, eq=False)
class LinearizedMap:
    """First-order model e(j+1) = A e(j) + B u(j) about the fixed point."""

    A: np.ndarray
    B: np.ndarray
    z_star: np.ndarray
    u_star: np.ndarray
    scheme: str
    step: float


@dataclass(frozen=True, eq=False)
class FeedbackGain:
    """Stabilizing gain for u = K e, withheld when ||e|| <= deadband."""

    K: np.ndarray
    deadband: float = 1e-3


def to_section(s: FullState, spec: JuggleSpec) -> np.ndarray:
    """Section coordinates [hx, hy, vx, vy, omega] of a pre-impulse state."""
    if abs(s.theta - spec.theta_odd) > SCHEDULE_TOL:
        raise NotOnSection(f"theta={s.theta} is not the odd orientation")
    if s.omega >= 0:
        raise NotOnSection(f"omega={s.omega} must be negative on the section")
    return np.array([s.h[0], s.h[1], s.v[0], s.v[1], s.omega])


def from_section(z: np.ndarray, spec: JuggleSpec) -> FullState:
    """Inverse of to_section; exact round trip."""
    z = np.asarray(z, dtype=float)
    return FullState(h=z[:2], v=z[2:4], theta=spec.theta_odd, omega=z[4])


def poincare_map(z: np.ndarray, impulse: float, offset: float,
                 orbit: OrbitSpec) -> np.ndarray:
    """One section return: the given inputs at the odd instant, the nominal
    constraint-enforcing inputs at the even one. Infeasible inputs raise.
    """
    spec, params = orbit.spec, orbit.params
    s = from_section(z, spec)
    delta = time_of_flight(s.omega, impulse, offset, 1, spec, params)
    s = hybrid_step(s, ImpulseCmd(I=impulse, r=offset, delta=delta), params)
    # the flight lands on the scheduled orientation by construction; pin it
    # to remove float roundoff before re-measuring residuals
    s = FullState(h=s.h, v=s.v, theta=spec.theta_even, omega=s.omega)
    cmd = dvhc_control(s, 2, spec, params)
    s = hybrid_step(s, cmd, params)
    s = FullState(h=s.h, v=s.v, theta=spec.theta_odd, omega=s.omega)
    return to_section(s, spec)


def fixed_point(orbit: OrbitSpec) -> tuple[np.ndarray, float, float]:
    """Section state and inputs that the return map leaves unchanged."""
    spec, params = orbit.spec, orbit.params
    theta = spec.theta_odd
    h_star = np.array([spec.alpha * math.tan(theta), spec.beta])
    v_star = psi(theta, orbit.omega_star, 1, spec, params)
    z_star = np.array([h_star[0], h_star[1], v_star[0], v_star[1],
                       orbit.omega_star])
    return z_star, steady_impulse(orbit, 1), orbit.r_star


def _closed_loop_return(z: np.ndarray, u: np.ndarray,
                        orbit: OrbitSpec) -> np.ndarray:
    """Return map with the nominal controller in the loop and the correction
    u added to the odd-instant inputs; this is the map the linearization and
    the closed-loop episodes both use.
    """
    s = from_section(z, orbit.spec)
    cmd = dvhc_control(s, 1, orbit.spec, orbit.params)
    return poincare_map(z, cmd.I + u[0], cmd.r + u[1], orbit)


def _fd_jacobians(orbit: OrbitSpec, z_star: np.ndarray, steps_z: np.ndarray,
                  steps_u: np.ndarray, scheme: str) -> tuple[np.ndarray, np.ndarray]:
    A = np.zeros((5, 5))
    B = np.zeros((5, 2))
    u0 = np.zeros(2)
    if scheme == "central":
        for i in range(5):
            zp, zm = z_star.copy(), z_star.copy()
            zp[i] += steps_z[i]
            zm[i] -= steps_z[i]
            A[:, i] = (_closed_loop_return(zp, u0, orbit)
                       - _closed_loop_return(zm, u0, orbit)) / (2 * steps_z[i])
        for i in range(2):
            up, um = u0.copy(), u0.copy()
            up[i] += steps_u[i]
            um[i] -= steps_u[i]
            B[:, i] = (_closed_loop_return(z_star, up, orbit)
                       - _closed_loop_return(z_star, um, orbit)) / (2 * steps_u[i])
    elif scheme == "forward":
        base = _closed_loop_return(z_star, u0, orbit)
        for i in range(5):
            zp = z_star.copy()
            zp[i] += steps_z[i]
            A[:, i] = (_closed_loop_return(zp, u0, orbit) - base) / steps_z[i]
        for i in range(2):
            up = u0.copy()
            up[i] += steps_u[i]
            B[:, i] = (_closed_loop_return(z_star, up, orbit) - base) / steps_u[i]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return A, B


def linearize(orbit: OrbitSpec, step_scale: float = 1e-6,
              scheme: str = "central") -> LinearizedMap:
    """Finite-difference Jacobians of the closed-loop return map.

    scheme="central" (default) estimates the limit derivative with
    per-coordinate steps step_scale * max(1, |x_i|) and validates it by step
    halving. scheme="forward" takes one-sided secants with the absolute step
    step_scale; use it to measure the response to finite-size perturbations
    (the halving check does not apply there and is skipped).
    """
    z_star, I_star, r_star = fixed_point(orbit)
    u_star = np.array([I_star, r_star])
    if scheme == "central":
        steps_z = step_scale * np.maximum(1.0, np.abs(z_star))
        steps_u = step_scale * np.maximum(1.0, np.abs(u_star))
    else:
        steps_z = np.full(5, step_scale)
        steps_u = np.full(2, step_scale)
    A, B = _fd_jacobians(orbit, z_star, steps_z, steps_u, scheme)
    if scheme == "central":
        A2, B2 = _fd_jacobians(orbit, z_star, steps_z / 2, steps_u / 2, scheme)
        for name, M, M2 in (("A", A, A2), ("B", B, B2)):
            tol = np.maximum(1e-4, 1e-3 * np.abs(M))
            if np.any(np.abs(M - M2) > tol):
                worst = np.unravel_index(np.argmax(np.abs(M - M2) - tol), M.shape)
                i, j = (int(v) for v in worst)
                raise FDInconsistent(
                    f"{name}[{i},{j}] fails step-halving: "
                    f"|{M[worst]:.6g} - {M2[worst]:.6g}| > {tol[worst]:.2g}")
        A, B = A2, B2
    return LinearizedMap(A=A, B=B, z_star=z_star, u_star=u_star,
                         scheme=scheme, step=step_scale)


def controllability(A: np.ndarray, B: np.ndarray) -> tuple[int, bool]:
    """Rank of [B, AB, ..., A^(n-1) B] by singular values; full rank means
    every section direction is steerable through the odd-instant inputs.
    """
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    ctrb = np.hstack(blocks)
    sv = np.linalg.svd(ctrb, compute_uv=False)
    thresh = sv[0] * n * np.finfo(float).eps * 1e3 if sv[0] > 0 else np.inf
    rank = int(np.sum(sv > thresh))
    return rank, rank == n


def dlqr(A: np.ndarray, B: np.ndarray, Q: np.ndarray, R: np.ndarray,
         deadband: float = 1e-3) -> FeedbackGain:
    """Discrete LQR gain by Riccati fixed-point iteration.

    The minus sign is folded into K, so u = K e is the stabilizing feedback
    and all eigenvalues of A + B K lie strictly inside the unit circle.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    if np.any(np.linalg.eigvalsh(0.5 * (R + R.T)) <= 0):
        raise ValueError("R must be positive definite")
    P = Q.copy()
    for _ in range(RICCATI_MAX_ITER):
        BtP = B.T @ P
        K = -np.linalg.solve(R + BtP @ B, BtP @ A)
        P_next = Q + A.T @ P @ (A + B @ K)
        if np.max(np.abs(P_next)) > 1e100:
            raise RiccatiDiverged("cost-to-go iteration blew up")
        if np.max(np.abs(P_next - P)) < RICCATI_TOL:
            P = P_next
            break
        P = P_next
    else:
        raise RiccatiDiverged(
            f"no fixed point within {RICCATI_MAX_ITER} iterations")
    K = -np.linalg.solve(R + B.T @ P @ B, B.T @ P @ A)
    radius = np.max(np.abs(np.linalg.eigvals(A + B @ K)))
    if radius >= 1.0 - SPECTRAL_MARGIN:
        raise NotStabilizing(f"closed-loop spectral radius {radius:.6f} >= 1")
    return FeedbackGain(K=K, deadband=deadband)


def dare_residual(A: np.ndarray, B: np.ndarray, Q: np.ndarray,
                  R: np.ndarray, P: np.ndarray) -> float:
    """Max-norm defect of P in the discrete algebraic Riccati equation."""
    BtP = B.T @ P
    back = Q + A.T @ P @ A - A.T @ P @ B @ np.linalg.solve(R + BtP @ B, BtP @ A)
    return float(np.max(np.abs(P - back)))


def riccati_solution(A: np.ndarray, B: np.ndarray, Q: np.ndarray,
                     R: np.ndarray) -> np.ndarray:
    """Converged cost-to-go matrix from the same iteration dlqr uses."""
    P = np.asarray(Q, dtype=float).copy()
    for _ in range(RICCATI_MAX_ITER):
        BtP = B.T @ P
        K = -np.linalg.solve(R + BtP @ B, BtP @ A)
        P_next = Q + A.T @ P @ (A + B @ K)
        if np.max(np.abs(P_next)) > 1e100:
            raise RiccatiDiverged("cost-to-go iteration blew up")
        if np.max(np.abs(P_next - P)) < RICCATI_TOL:
            return P_next
        P = P_next
    raise RiccatiDiverged(f"no fixed point within {RICCATI_MAX_ITER} iterations")


def feedback(z: np.ndarray, lin: LinearizedMap, gain: FeedbackGain) -> np.ndarray:
    """Correction u = K (z - z_star), or zero inside the deadband."""
    e = np.asarray(z, dtype=float) - lin.z_star
    if np.linalg.norm(e) <= gain.deadband:
        return np.zeros(2)
    return gain.K @ e
