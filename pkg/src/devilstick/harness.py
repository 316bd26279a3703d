"""Closed-loop episode execution with per-impulse logging.

An episode applies the constraint-enforcing controller at every impulse and,
when enabled, adds the orbit-stabilizing correction at odd instants. Errors
raised by the controller or plant terminate the episode gracefully with a
typed reason so that sweeps over infeasible regions stay runnable.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import stabilizer as stab
from .dvhc import check_rod, dvhc_control, phi, psi, residuals
from .dynamics import (FlightSample, flight, impulsive_update, sample_flight,
                       time_of_flight)
from .dzd import OrbitSpec
from .errors import JugglingError, OffSchedule
from .model import (SCHEDULE_TOL, FullState, ImpulseCmd, JuggleSpec,
                    StickParams)


@dataclass(frozen=True)
class EpisodeConfig:
    """Knobs for one episode run."""

    k_max: int = 20
    stabilize: bool = False
    deadband: float = 1e-3
    r_policy: str = "strict"
    flight_dt: float | None = None     # sample flights at this spacing if set
    q_diag: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    r_diag: tuple[float, ...] = (1.0, 1.0)
    fd_scheme: str = "central"
    fd_step: float = 1e-6

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise ValueError(f"k_max must be >= 1, got {self.k_max}")


@dataclass(frozen=True, eq=False)
class ImpulseRecord:
    """Everything logged at one impulse instant (pre-impulse state)."""

    k: int
    theta: float
    omega: float
    rho: np.ndarray
    drho: np.ndarray
    delta: float
    I: float
    r: float
    u: np.ndarray              # stabilizer correction; zeros when inactive


@dataclass(frozen=True, eq=False)
class FlightTrace:
    """Sampled trajectory of the flight that follows impulse k."""

    k: int
    t0: float                  # episode time at the impulse
    samples: list[FlightSample]


@dataclass(eq=False)
class EpisodeLog:
    spec: JuggleSpec
    params: StickParams
    records: list[ImpulseRecord] = field(default_factory=list)
    flights: list[FlightTrace] = field(default_factory=list)
    sim_duration: float = 0.0  # first impulse to last impulse
    wall_time: float = 0.0
    termination: str = "completed"
    orbit: OrbitSpec | None = None

    @property
    def completed(self) -> bool:
        return self.termination == "completed"


@dataclass(eq=False)
class EpisodeMetrics:
    n_impulses: int
    rho_ratios: np.ndarray          # (n-1, 2) componentwise rho_{k+1}/rho_k
    rho_contraction_dev: float      # max |rho_{k+1} - lambda*rho_k|
    omega_two_step_ratios: np.ndarray
    terminal_error: float | None
    elapsed: float
    completed: bool
    termination: str


def run_episode(s0: FullState, target: JuggleSpec | OrbitSpec,
                params: StickParams, cfg: EpisodeConfig) -> EpisodeLog:
    """Run up to cfg.k_max impulses from s0 (which must sit at the odd
    scheduled orientation, k = 1). Identical inputs produce bitwise
    identical logs.
    """
    t_start = time.perf_counter()
    if isinstance(target, OrbitSpec):
        orbit: OrbitSpec | None = target
        spec = target.spec
    else:
        orbit, spec = None, target
    if cfg.stabilize and orbit is None:
        raise ValueError("stabilize=True requires an OrbitSpec target")
    if abs(s0.theta - spec.theta_odd) > SCHEDULE_TOL:
        raise OffSchedule(
            f"episodes start at the odd orientation; got theta={s0.theta}")

    log = EpisodeLog(spec=spec, params=params, orbit=orbit)
    lin = gain = None
    if cfg.stabilize:
        try:
            lin = stab.linearize(orbit, step_scale=cfg.fd_step,
                                 scheme=cfg.fd_scheme)
            gain = stab.dlqr(lin.A, lin.B, np.diag(cfg.q_diag),
                             np.diag(cfg.r_diag), deadband=cfg.deadband)
        except JugglingError as exc:
            log.termination = f"{type(exc).__name__}: {exc}"
            log.wall_time = time.perf_counter() - t_start
            return log

    s = s0
    t = 0.0
    for k in range(1, cfg.k_max + 1):
        try:
            res = residuals(s, k, spec, params)
            cmd = dvhc_control(s, k, spec, params, r_policy=cfg.r_policy)
            u = np.zeros(2)
            if cfg.stabilize and k % 2 == 1:
                z = stab.to_section(s, spec)
                u = stab.feedback(z, lin, gain)
                if u.any():
                    impulse, offset = cmd.I + u[0], cmd.r + u[1]
                    delta = time_of_flight(s.omega, impulse, offset, k,
                                           spec, params)
                    check_rod(offset, params, cfg.r_policy)
                    cmd = ImpulseCmd(I=impulse, r=offset, delta=delta)
            log.records.append(ImpulseRecord(
                k=k, theta=s.theta, omega=s.omega, rho=res.rho, drho=res.drho,
                delta=cmd.delta, I=cmd.I, r=cmd.r, u=u))
            if k < cfg.k_max:
                s_plus = impulsive_update(s, cmd.I, cmd.r, params)
                if cfg.flight_dt is not None:
                    log.flights.append(FlightTrace(
                        k=k, t0=t,
                        samples=sample_flight(s_plus, cmd.delta,
                                              cfg.flight_dt, params)))
                s = flight(s_plus, cmd.delta, params)
                # the commanded delta lands exactly on the schedule; pin the
                # orientation so float roundoff cannot accumulate across k
                s = FullState(h=s.h, v=s.v, theta=spec.theta_at(k + 1),
                              omega=s.omega)
                t += cmd.delta
        except JugglingError as exc:
            log.termination = f"{type(exc).__name__}: {exc}"
            break
    log.sim_duration = t
    log.wall_time = time.perf_counter() - t_start
    return log


def section_state_of(record: ImpulseRecord, spec: JuggleSpec,
                     params: StickParams) -> np.ndarray:
    """Section coordinates of a logged odd-instant record."""
    h = phi(record.theta, spec) + record.rho
    v = psi(record.theta, record.omega, record.k, spec, params) + record.drho
    return np.array([h[0], h[1], v[0], v[1], record.omega])


def metrics(log: EpisodeLog) -> EpisodeMetrics:
    """Convergence summary of an episode log."""
    if not log.records:
        raise ValueError("empty episode log")
    n = len(log.records)
    rho = np.array([rec.rho for rec in log.records])
    ratios = np.full((n - 1, 2), np.nan)
    for i in range(n - 1):
        for j in range(2):
            if abs(rho[i, j]) > 1e-300:
                ratios[i, j] = rho[i + 1, j] / rho[i, j]
    lam = np.array([log.spec.lambda_x, log.spec.lambda_y])
    dev = max((float(np.max(np.abs(rho[i + 1] - lam * rho[i])))
               for i in range(n - 1)), default=0.0)
    omega = np.array([rec.omega for rec in log.records])
    two_step = np.abs(omega[2:] / omega[:-2]) if n >= 3 else np.empty(0)
    terminal_error = None
    if log.orbit is not None:
        z_star, _, _ = stab.fixed_point(log.orbit)
        last_odd = next((r for r in reversed(log.records) if r.k % 2 == 1),
                        None)
        if last_odd is not None:
            z = section_state_of(last_odd, log.spec, log.params)
            terminal_error = float(np.linalg.norm(z - z_star))
    return EpisodeMetrics(
        n_impulses=n,
        rho_ratios=ratios,
        rho_contraction_dev=dev,
        omega_two_step_ratios=two_step,
        terminal_error=terminal_error,
        elapsed=log.sim_duration,
        completed=log.completed,
        termination=log.termination,
    )
