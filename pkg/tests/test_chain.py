"""Chain timing closed forms and the event-driven Monte Carlo."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubus.chain import (
    ChainParams,
    EventRecord,
    connection_redundancy,
    final_fidelity,
    mc_distribute,
    memory_space,
    pc_from_efficiencies,
    schedule,
    t_tot,
    t_tot_geometric,
)


def params(**kw):
    base = dict(L0_km=75.0, L_km=1200.0, f_hz=40e3, P_g=5e-5, P_c=0.5)
    base.update(kw)
    return ChainParams(**base)


def test_redundancy_rounds_up_with_guard():
    assert connection_redundancy(1.0) == 1
    assert connection_redundancy(0.5) == 2
    assert connection_redundancy(0.3) == 4
    # 1/(1/3) floats to 3.0000000000000004; the guard keeps it at 3.
    assert connection_redundancy(1.0 / 3.0) == 3


def test_chain_params_validation():
    with pytest.raises(ValueError):
        params(L_km=1000.0)
    with pytest.raises(ValueError):
        params(P_c=0.0)
    with pytest.raises(ValueError):
        params(tau0_s=-1.0)
    assert params(L_km=75.0).n_levels == 0
    assert params().n_levels == 4


@given(
    n=st.integers(0, 6),
    pc=st.floats(0.05, 1.0),
    f=st.floats(1e3, 1e8),
    pg=st.floats(1e-6, 1.0),
    tau0=st.floats(0.0, 1e-2),
)
@settings(max_examples=80)
def test_sum_and_geometric_forms_agree(n, pc, f, pg, tau0):
    p = ChainParams(L0_km=75.0, L_km=75.0 * 2**n, f_hz=f, P_g=pg, P_c=pc, tau0_s=tau0)
    a = t_tot(p)
    b = t_tot_geometric(p)
    assert abs(a - b) <= 1e-12 * max(abs(a), abs(b))


FROZEN_TABLE = (
    (1330.0, 240.6, 2),
    (40e3, 8.012, 60),
    (1e6, 0.332, 1500),
    (1e7, 0.044, 15000),
    (1e8, 0.0152, 150000),
)


@pytest.mark.parametrize("f,t_ref,m_ref", FROZEN_TABLE)
def test_frozen_operating_table(f, t_ref, m_ref):
    p = params(f_hz=f)
    assert t_tot(p) == pytest.approx(t_ref, rel=5e-3)
    assert memory_space(p, "rate-limited") == m_ref


def test_memory_space_override_boundary():
    # L0 f / c = 0.49875 at 1.33 kHz: a single pair in flight each way.
    assert memory_space(params(f_hz=1330.0)) == 2
    # Past the half-slot boundary the 4-slot pipeline formula kicks in.
    assert memory_space(params(f_hz=1400.0)) == 4
    assert memory_space(params(f_hz=40e3)) == 60


def test_memory_space_deadtime_mode():
    p = params(tauD_s=1e-5)
    want = 4 * math.ceil(75.0 / (2e5 * 1e-5) - 1e-9)
    assert memory_space(p, "deadtime-limited") == want
    with pytest.raises(ValueError):
        memory_space(params(), "deadtime-limited")
    with pytest.raises(ValueError):
        memory_space(params(), "spooky")


def test_final_fidelity_values_and_domain():
    assert final_fidelity(0.9995, 1200.0, 75.0) == pytest.approx(0.9995**16, rel=1e-15)
    assert abs(final_fidelity(0.9995, 1200.0, 75.0) - 0.9920) < 1e-4
    assert final_fidelity(1.0, 600.0, 75.0) == 1.0
    with pytest.raises(ValueError):
        final_fidelity(0.9995, 100.0, 75.0)
    with pytest.raises(ValueError):
        final_fidelity(1.5, 150.0, 75.0)


def test_pc_from_efficiencies():
    assert pc_from_efficiencies(1.0, 1.0) == 1.0
    assert pc_from_efficiencies(0.84, 0.84) == pytest.approx(0.84**4, rel=1e-15)
    with pytest.raises(ValueError):
        pc_from_efficiencies(1.2, 0.5)


def test_schedule_bundle():
    s = schedule(params())
    assert s.n_levels == 4
    assert s.links_required == 16
    assert s.t_tot_s == pytest.approx(8.012, rel=1e-3)
    assert s.M_E == 60
    assert s.F_final == pytest.approx(0.9995**16)


def test_mc_single_segment_deterministic_point():
    p = params(L_km=75.0, P_g=1.0, P_c=1.0)
    res = mc_distribute(p, seed=3, trials=16)
    exact = 1 / 40e3 + 2 * 75.0 / 2e5
    assert res.completed == 16
    assert all(t == pytest.approx(exact, rel=1e-15) for t in res.completion_times)


def test_mc_single_segment_mean_matches_geometric_attempts():
    p = params(L_km=75.0, P_g=0.01, f_hz=1e4, P_c=1.0)
    trials = 400
    res = mc_distribute(p, seed=8, trials=trials)
    tau = 1e-4
    want = tau / 0.01 + 2 * 75.0 / 2e5
    sigma = tau * math.sqrt(1 - 0.01) / 0.01 / math.sqrt(trials)
    assert res.completed == trials
    assert abs(res.mean_time_s - want) < 4 * sigma


def test_mc_determinism_and_bookkeeping():
    p = params()
    a = mc_distribute(p, seed=42, trials=60)
    b = mc_distribute(p, seed=42, trials=60)
    assert a.completion_times == b.completion_times
    assert a.histogram == b.histogram
    assert a.completed + a.failures == 60
    assert sum(count for _, _, count in a.histogram) == a.completed
    assert len(a.failures_by_level) == p.n_levels + 1
    assert sum(a.failures_by_level) == a.failures
    c = mc_distribute(p, seed=43, trials=60)
    assert c.completion_times != a.completion_times


def test_mc_mean_respects_physical_bounds():
    p = params()
    res = mc_distribute(p, seed=12345, trials=200)
    floor = p.L_km / p.c_km_s
    assert res.completed >= 50
    assert floor <= res.mean_time_s <= 1.1 * t_tot(p)
    assert min(res.completion_times) >= floor


def test_mc_event_log_causality_in_detail_mode():
    # High generation probability keeps the attempt volume small enough
    # for full per-attempt logging.
    p = params(L_km=300.0, P_g=0.9, P_c=0.9, f_hz=1e4)
    res = mc_distribute(p, seed=5, trials=3)
    events = list(res.events)
    assert events
    kinds = {e.kind for e in events}
    assert {"attempt", "link-success", "swap", "classical-msg", "memory-store"} <= kinds
    times = [e.time_s for e in events]
    assert times == sorted(times)
    first_link = min(e.time_s for e in events if e.kind == "link-success")
    for e in events:
        if e.kind == "swap":
            assert e.time_s >= first_link
    # Swap announcements travel one hop per spanned segment.
    hop = p.L0_km / p.c_km_s
    swap_times = sorted(e.time_s for e in events if e.kind == "swap")
    msg_times = sorted(e.time_s for e in events if e.kind == "classical-msg" and "swap" in e.info)
    assert msg_times[0] >= swap_times[0] + hop - 1e-12


def test_mc_failures_counted_per_level():
    p = params(L_km=300.0, P_g=0.5, P_c=0.05, f_hz=1e4)
    res = mc_distribute(p, seed=10, trials=80)
    assert res.failures > 0
    assert res.failures == sum(res.failures_by_level)
    assert math.isnan(res.mean_time_s) or res.completed > 0


def test_event_record_rejects_unknown_kind():
    with pytest.raises(ValueError):
        EventRecord(0.0, 0, "teleport")


def test_mc_rejects_bad_trials():
    with pytest.raises(ValueError):
        mc_distribute(params(), seed=1, trials=0)
