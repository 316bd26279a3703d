#!/usr/bin/env python3
"""Tabulate the 2-periodic orbit family over a range of odd-instant rates.

Every omega* < 0 yields a distinct orbit on a symmetric schedule; the
impulse application offset is the same for all of them. Also demonstrates
the geometric rate growth that rules out periodic juggling on an asymmetric
schedule.
"""

from __future__ import annotations

import math

import numpy as np

from devilstick import (JuggleSpec, StickParams, design_orbit, dzd_step,
                        growth_factor, symmetric_omega_star)
from devilstick.dzd import DzdState

PARAMS = StickParams(m=0.1, ell=0.5)
SPEC = JuggleSpec(theta_odd=math.pi / 6, theta_even=5 * math.pi / 6,
                  alpha=0.6131, beta=3.0)


def sweep() -> None:
    omega_sym = symmetric_omega_star(SPEC, PARAMS)
    print(f"rate-symmetric motion at omega* = {omega_sym:.4f}\n")
    print(f"{'omega*':>9} {'omega_even':>11} {'delta_odd':>10} "
          f"{'delta_even':>11} {'|I|':>8} {'r':>8}")
    for omega_star in np.linspace(-1.0, -6.0, 11):
        orbit = design_orbit(SPEC, omega_star, PARAMS)
        print(f"{omega_star:>9.3f} {orbit.omega_even:>11.4f} "
              f"{orbit.delta_odd:>10.4f} {orbit.delta_even:>11.4f} "
              f"{orbit.I_mag:>8.4f} {orbit.r_star:>8.4f}")


def asymmetric_divergence() -> None:
    spec = JuggleSpec(theta_odd=math.pi / 6, theta_even=2 * math.pi / 3,
                      alpha=0.6131, beta=3.0)
    factor = growth_factor(spec)
    print(f"\nasymmetric schedule (pi/6, 2pi/3): growth factor {factor:.4f}")
    s = DzdState(theta=spec.theta_odd, omega=-3.0, k=1)
    print(f"{'k':>3} {'theta':>8} {'omega':>12}")
    for _ in range(8):
        print(f"{s.k:>3} {s.theta:>8.4f} {s.omega:>12.4f}")
        s = dzd_step(s, spec, PARAMS)


if __name__ == "__main__":
    sweep()
    asymmetric_divergence()
