"""Hybrid plant dynamics: impulsive velocity jumps and ballistic flight.

The flight phase is exactly integrable, so everything here is closed form.
No ODE solver and no event detection: the time of flight between scheduled
orientations follows algebraically from the post-impulse angular rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import Degenerate, Infeasible
from .model import FullState, ImpulseCmd, JuggleSpec, StickParams, parity_sign

RATE_EPS = 1e-12  # post-impulse angular rate below this is rejected


@dataclass(frozen=True)
class FlightSample:
    """State at time t since the start of a flight."""

    t: float
    state: FullState


def impulsive_update(s: FullState, impulse: float, offset: float,
                     params: StickParams) -> FullState:
    """Apply an impulse normal to the stick at distance offset from the
    center-of-mass. Positions and orientation are unchanged; velocities jump.
    """
    if not (math.isfinite(impulse) and math.isfinite(offset)):
        raise ValueError("impulse and offset must be finite")
    n = np.array([-math.sin(s.theta), math.cos(s.theta)])
    return FullState(
        h=s.h,
        v=s.v + (impulse / params.m) * n,
        theta=s.theta,
        omega=s.omega + impulse * offset / params.inertia,
    )


def flight(s_plus: FullState, delta: float, params: StickParams) -> FullState:
    """Ballistic coast for time delta: horizontal velocity and angular rate
    are constant, vertical motion is uniformly accelerated.
    """
    if delta < 0:
        raise ValueError(f"flight time must be >= 0, got {delta}")
    g = params.g
    return FullState(
        h=s_plus.h + s_plus.v * delta + np.array([0.0, -0.5 * g * delta**2]),
        v=s_plus.v + np.array([0.0, -g * delta]),
        theta=s_plus.theta + s_plus.omega * delta,
        omega=s_plus.omega,
    )


def hybrid_step(s: FullState, cmd: ImpulseCmd, params: StickParams) -> FullState:
    """One impulsive actuation followed by its flight."""
    if cmd.delta <= 0:
        raise Infeasible(f"time of flight must be > 0, got {cmd.delta}")
    return flight(impulsive_update(s, cmd.I, cmd.r, params), cmd.delta, params)


def time_of_flight(omega: float, impulse: float, offset: float, k: int,
                   spec: JuggleSpec, params: StickParams) -> float:
    """Time for the post-impulse rotation to sweep from the scheduled
    orientation at k to the one at k + 1.

    delta = (-1)**(k+1) * delta_theta / (omega + I*r/J). Raises Degenerate
    when the post-impulse rate nearly vanishes and Infeasible when the stick
    rotates away from the next scheduled orientation.
    """
    omega_plus = omega + impulse * offset / params.inertia
    if abs(omega_plus) < RATE_EPS:
        raise Degenerate(f"post-impulse angular rate {omega_plus} is degenerate")
    delta = -parity_sign(k) * spec.delta_theta / omega_plus
    if delta <= 0:
        raise Infeasible(
            f"impulse at k={k} rotates the stick away from the next "
            f"scheduled orientation (delta={delta:.4g})")
    return delta


def sample_flight(s_plus: FullState, delta: float, dt: float,
                  params: StickParams) -> list[FlightSample]:
    """Sample a flight at t = 0, dt, 2*dt, ..., delta (endpoint exact)."""
    if dt <= 0:
        raise ValueError(f"sample spacing must be > 0, got {dt}")
    ts = [i * dt for i in range(int(math.floor(delta / dt)) + 1)]
    if not ts or ts[-1] < delta - 1e-15 * max(1.0, delta):
        ts.append(delta)
    else:
        ts[-1] = delta
    return [FlightSample(t=t, state=flight(s_plus, t, params)) for t in ts]


def mechanical_energy(s: FullState, params: StickParams) -> float:
    """Gravitational plus kinetic energy; conserved during flight."""
    return (params.m * params.g * s.h[1]
            + 0.5 * params.m * float(s.v @ s.v)
            + 0.5 * params.inertia * s.omega**2)
