import numpy as np
import pytest

from devilstick import (EpisodeConfig, FullState, OffSchedule,
                        StickParams, metrics, on_constraint_state,
                        run_episode)
from devilstick.dzd import growth_factor

from refvals import (DELTA_EVEN, DELTA_ODD, DURATION_2P, DURATION_SYM,
                     IMPULSE_2P, IMPULSE_SYM, OFFSET, OMEGA_EVEN, OMEGA_ODD,
                     OMEGA_STAR_SYM)


@pytest.fixture(scope="module")
def log_2p(ic_state, spec, params):
    return run_episode(ic_state, spec, params, EpisodeConfig(k_max=20))


@pytest.fixture(scope="module")
def log_sym(ic_state, orbit_sym, params):
    cfg = EpisodeConfig(k_max=20, stabilize=True, deadband=1e-3,
                        r_diag=(2.0, 2.0), fd_scheme="forward", fd_step=2e-3)
    return run_episode(ic_state, orbit_sym, params, cfg)


def test_two_periodic_episode_converges(log_2p):
    assert log_2p.completed
    assert len(log_2p.records) == 20
    tail = log_2p.records[-4:]
    for rec in tail:
        if rec.k % 2 == 1:
            assert rec.omega == pytest.approx(OMEGA_ODD, abs=1e-3)
            assert rec.delta == pytest.approx(DELTA_ODD, abs=1e-3)
            assert rec.I == pytest.approx(+IMPULSE_2P, abs=1e-3)
        else:
            assert rec.omega == pytest.approx(OMEGA_EVEN, abs=1e-3)
            assert rec.delta == pytest.approx(DELTA_EVEN, abs=1e-3)
            assert rec.I == pytest.approx(-IMPULSE_2P, abs=1e-3)
        assert rec.r == pytest.approx(OFFSET, abs=1e-3)
    assert log_2p.sim_duration == pytest.approx(DURATION_2P, abs=0.05)


def test_two_periodic_contraction_every_step(log_2p, spec):
    lam = np.array([spec.lambda_x, spec.lambda_y])
    for prev, nxt in zip(log_2p.records, log_2p.records[1:]):
        assert nxt.rho == pytest.approx(lam * prev.rho, abs=1e-9)
        assert nxt.drho == pytest.approx((lam - 1.0) * prev.rho / prev.delta,
                                         abs=1e-9)


def test_schedule_is_exact(log_2p, spec):
    for rec in log_2p.records:
        expected = spec.theta_odd if rec.k % 2 else spec.theta_even
        assert rec.theta == expected


def test_no_feedback_when_disabled(log_2p):
    for rec in log_2p.records:
        assert not rec.u.any()


def test_episode_is_deterministic(ic_state, spec, params):
    cfg = EpisodeConfig(k_max=12, flight_dt=0.05)
    a = run_episode(ic_state, spec, params, cfg)
    b = run_episode(ic_state, spec, params, cfg)
    for ra, rb in zip(a.records, b.records):
        assert ra.theta == rb.theta and ra.omega == rb.omega
        assert np.array_equal(ra.rho, rb.rho)
        assert np.array_equal(ra.drho, rb.drho)
        assert (ra.delta, ra.I, ra.r) == (rb.delta, rb.I, rb.r)
    for fa, fb in zip(a.flights, b.flights):
        assert fa.t0 == fb.t0
        for sa, sb in zip(fa.samples, fb.samples):
            assert np.array_equal(sa.state.as_array(), sb.state.as_array())
    assert a.sim_duration == b.sim_duration


def test_on_orbit_start_stays_on_orbit(orbit_sym, spec, params):
    s0 = on_constraint_state(orbit_sym.omega_star, 1, spec, params)
    cfg = EpisodeConfig(k_max=12, stabilize=True, r_diag=(2.0, 2.0))
    log = run_episode(s0, orbit_sym, params, cfg)
    assert log.completed
    for rec in log.records:
        assert np.max(np.abs(rec.rho)) < 1e-9
        assert not rec.u.any()
    assert metrics(log).terminal_error < 1e-9


def test_stabilized_episode_converges(log_sym):
    assert log_sym.completed
    tail = log_sym.records[-4:]
    for rec in tail:
        if rec.k % 2 == 1:
            assert rec.omega == pytest.approx(OMEGA_STAR_SYM, abs=1e-3)
            assert rec.I == pytest.approx(+IMPULSE_SYM, abs=1e-3)
        else:
            assert rec.I == pytest.approx(-IMPULSE_SYM, abs=1e-3)
        assert rec.delta == pytest.approx(0.5, abs=1e-3)
        assert rec.r == pytest.approx(OFFSET, abs=1e-3)
    assert log_sym.sim_duration == pytest.approx(DURATION_SYM, abs=0.05)


def test_stabilizer_goes_inactive_and_stays(log_sym):
    odd = [rec for rec in log_sym.records if rec.k % 2 == 1]
    active = [rec.u.any() for rec in odd]
    assert active[0], "feedback should engage from the perturbed start"
    assert not active[-1], "feedback should disengage near the orbit"
    first_inactive = active.index(False)
    assert not any(active[first_inactive:])


def test_flight_sampling(ic_state, spec, params):
    cfg = EpisodeConfig(k_max=5, flight_dt=0.05)
    log = run_episode(ic_state, spec, params, cfg)
    assert len(log.flights) == 4
    for trace, rec in zip(log.flights, log.records):
        assert trace.k == rec.k
        assert trace.samples[-1].t == rec.delta
    expected = [0.0]
    for rec in log.records[:3]:
        expected.append(expected[-1] + rec.delta)
    assert [trace.t0 for trace in log.flights] == expected


def test_single_impulse_episode(ic_state, spec, params):
    log = run_episode(ic_state, spec, params, EpisodeConfig(k_max=1))
    assert len(log.records) == 1
    assert log.sim_duration == 0.0
    assert log.completed


def test_error_terminates_as_data(spec, params):
    from devilstick.dvhc import phi
    bad = FullState(h=phi(spec.theta_odd, spec) + np.array([0.0, -10.0]),
                    v=np.array([0.0, -5.0]), theta=spec.theta_odd, omega=-5.7)
    log = run_episode(bad, spec, params, EpisodeConfig(k_max=10))
    assert not log.completed
    assert log.termination.startswith("NoPositiveRoot")
    assert log.records == []


def test_rod_violation_terminates(ic_state, spec, params):
    tiny = StickParams(m=params.m, ell=0.05, J=params.inertia)
    log = run_episode(ic_state, spec, tiny, EpisodeConfig(k_max=10))
    assert not log.completed
    assert log.termination.startswith("RodExceeded")


def test_start_off_schedule_rejected(spec, params):
    s0 = FullState(h=np.array([0.7, 2.5]), v=np.zeros(2),
                   theta=spec.theta_odd + 1e-3, omega=-5.7)
    with pytest.raises(OffSchedule):
        run_episode(s0, spec, params, EpisodeConfig())


def test_metrics_two_periodic(log_2p):
    m = metrics(log_2p)
    assert m.n_impulses == 20
    finite = m.rho_ratios[np.isfinite(m.rho_ratios)]
    assert finite == pytest.approx(0.5 * np.ones_like(finite), abs=1e-6)
    assert m.rho_contraction_dev < 1e-9
    assert m.completed


def test_metrics_asymmetric_growth(asym_spec, params):
    s0 = on_constraint_state(-3.0, 1, asym_spec, params)
    log = run_episode(s0, asym_spec, params, EpisodeConfig(k_max=9))
    assert log.completed
    m = metrics(log)
    odd_ratios = m.omega_two_step_ratios[0::2]
    factor = growth_factor(asym_spec)
    assert odd_ratios == pytest.approx(factor * np.ones_like(odd_ratios),
                                       rel=1e-6)


def test_metrics_empty_log_rejected(spec, params):
    from devilstick.harness import EpisodeLog
    with pytest.raises(ValueError):
        metrics(EpisodeLog(spec=spec, params=params))


def test_stabilize_requires_orbit(ic_state, spec, params):
    with pytest.raises(ValueError):
        run_episode(ic_state, spec, params, EpisodeConfig(stabilize=True))


def test_stabilizer_setup_failure_is_data(ic_state, orbit_sym, params):
    # a coarse central step fails the halving gate during gain synthesis;
    # the episode must report it instead of raising
    cfg = EpisodeConfig(k_max=10, stabilize=True, fd_scheme="central",
                        fd_step=1e-3)
    log = run_episode(ic_state, orbit_sym, params, cfg)
    assert not log.completed
    assert log.termination.startswith("FDInconsistent")
    assert log.records == []
