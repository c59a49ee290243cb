"""Timing, memory, and fidelity of a doubling repeater chain.

A chain of 2^n segments generates elementary pairs at rate f with
per-attempt probability P_g, then connects them pairwise over n swap
levels, each swap succeeding with probability P_c.  The closed forms
below give the average distribution time, the memory provisioning, and
the connected fidelity; mc_distribute replays the same strategy as a
seeded discrete-event simulation so the closed-form upper bound can be
checked against an empirical mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EVENT_KINDS = (
    "attempt",
    "link-success",
    "swap",
    "classical-msg",
    "memory-store",
    "memory-release",
)

# Attempt-level events are logged only when the expected volume stays
# below this; otherwise the sample log keeps link/swap/message records.
_ATTEMPT_LOG_LIMIT = 10_000.0


@dataclass(frozen=True)
class ChainParams:
    L0_km: float
    L_km: float
    f_hz: float
    P_g: float
    P_c: float
    tau0_s: float = 0.0
    tauD_s: float | None = None
    c_km_s: float = 2.0e5
    eta_D: float = 0.84
    eta_M: float = 0.84

    def __post_init__(self) -> None:
        for name in ("L0_km", "L_km", "f_hz", "c_km_s"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("P_g", "P_c"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} must be in (0, 1], got {value}")
        if self.tau0_s < 0.0:
            raise ValueError("tau0_s must be >= 0")
        if self.tauD_s is not None and self.tauD_s <= 0.0:
            raise ValueError("tauD_s must be positive when given")
        if not 0.0 <= self.eta_D <= 1.0 or not 0.0 <= self.eta_M <= 1.0:
            raise ValueError("efficiencies must be in [0, 1]")
        ratio = self.L_km / self.L0_km
        n = round(math.log2(ratio))
        if n < 0 or abs(ratio - 2.0**n) > 1e-9 * ratio:
            raise ValueError(f"L/L0 = {ratio} is not a power of 2")

    @property
    def n_levels(self) -> int:
        return round(math.log2(self.L_km / self.L0_km))

    @property
    def segments(self) -> int:
        return 2**self.n_levels


def connection_redundancy(P_c: float) -> int:
    """ceil(1/P_c) with a guard against float slop in the reciprocal."""
    return math.ceil(1.0 / P_c - 1e-9)


@dataclass(frozen=True)
class ScheduleResult:
    t_tot_s: float
    M_E: int
    F_final: float
    n_levels: int
    links_required: int


def t_tot(p: ChainParams) -> float:
    """Average distribution time, written as the level-by-level sum.

    T0 r^n + sum_k 2^{k-1} L0/c + sum_k r^{n-k} tau0 + L0/c with
    T0 = L0/c + tau/P_g, tau = 1/f, r = ceil(1/P_c), n = log2(L/L0).
    """
    n = p.n_levels
    r = connection_redundancy(p.P_c)
    hop = p.L0_km / p.c_km_s
    t0 = hop + (1.0 / p.f_hz) / p.P_g
    total = t0 * r**n
    for k in range(1, n + 1):
        total += 2 ** (k - 1) * hop
    for k in range(0, n):
        total += r ** (n - k) * p.tau0_s
    return total + hop


def t_tot_geometric(p: ChainParams) -> float:
    """The same quantity with both sums collapsed.

    T0 r^n + (r^{n+1} - r)/(r - 1) tau0 + L/c; the tau0 factor degrades
    to n tau0 when r = 1.
    """
    n = p.n_levels
    r = connection_redundancy(p.P_c)
    t0 = p.L0_km / p.c_km_s + (1.0 / p.f_hz) / p.P_g
    if r == 1:
        swap_wait = n * p.tau0_s
    else:
        swap_wait = (r ** (n + 1) - r) / (r - 1) * p.tau0_s
    return t0 * r**n + swap_wait + p.L_km / p.c_km_s


def memory_space(p: ChainParams, mode: str = "rate-limited") -> int:
    """Memory modes needed to keep the attempt pipeline fed.

    rate-limited: 4 ceil(L0 f / c), except at (or below) the minimal
    useful rate f = c/(2 L0), where one round trip holds only a single
    pair in flight each way and 2 modes suffice.  deadtime-limited:
    4 ceil(L0 / (c tauD)).
    """
    if mode == "rate-limited":
        x = p.L0_km * p.f_hz / p.c_km_s
        if x <= 0.5 * (1.0 + 1e-6):
            return 2
        return 4 * math.ceil(x - 1e-9)
    if mode == "deadtime-limited":
        if p.tauD_s is None:
            raise ValueError("deadtime-limited mode requires tauD_s")
        return 4 * math.ceil(p.L0_km / (p.c_km_s * p.tauD_s) - 1e-9)
    raise ValueError(f"unknown mode {mode!r}")


def final_fidelity(fidelity: float, L_km: float, L0_km: float) -> float:
    """Connected-pair fidelity F^(L/L0)."""
    if not 0.0 < fidelity <= 1.0:
        raise ValueError(f"fidelity must be in (0, 1], got {fidelity}")
    ratio = L_km / L0_km
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(ratio, 1.0):
        raise ValueError(f"L/L0 = {ratio} is not a positive integer")
    return fidelity**n


def pc_from_efficiencies(eta_D: float, eta_M: float) -> float:
    """Connection probability eta_D^2 eta_M^2 of the swap measurement."""
    for name, value in (("eta_D", eta_D), ("eta_M", eta_M)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {value}")
    return (eta_D * eta_M) ** 2


def schedule(p: ChainParams, link_fidelity: float = 0.9995) -> ScheduleResult:
    """Bundle the closed-form answers for one parameter point."""
    return ScheduleResult(
        t_tot_s=t_tot(p),
        M_E=memory_space(p, "rate-limited"),
        F_final=final_fidelity(link_fidelity, p.L_km, p.L0_km),
        n_levels=p.n_levels,
        links_required=connection_redundancy(p.P_c) ** p.n_levels,
    )


@dataclass(frozen=True)
class EventRecord:
    time_s: float
    station: int
    kind: str
    info: str = ""

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class EventLog:
    records: tuple[EventRecord, ...]

    def __post_init__(self) -> None:
        times = [r.time_s for r in self.records]
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("event log times must be nondecreasing")

    def __iter__(self):
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)


@dataclass(frozen=True)
class McResult:
    mean_time_s: float
    histogram: tuple[tuple[float, float, int], ...]
    events: EventLog
    trials: int
    completed: int
    failures: int
    failures_by_level: tuple[int, ...]
    completion_times: tuple[float, ...]


@dataclass
class _Pair:
    """An entangled pair spanning [left, right], with per-end knowledge times."""

    left: int
    right: int
    t_left: float
    t_right: float


def _run_trial(p: ChainParams, rng: np.random.Generator, collect) -> tuple[float | None, int]:
    """One seeded trial; returns (completion time or None, level reached).

    ``collect`` is an event-sink callable or None; passing None keeps the
    hot path free of bookkeeping.
    """
    n = p.n_levels
    segs = p.segments
    r = connection_redundancy(p.P_c)
    slots = r**n
    tau = 1.0 / p.f_hz
    hop = p.L0_km / p.c_km_s

    # Attempt counts per (segment, slot); slot j succeeds on the
    # cumulative attempt number, its bus pulse departing at that slot's
    # end and heralding at the right station one hop later.
    attempts = rng.geometric(p.P_g, size=(segs, slots))
    detect = np.cumsum(attempts, axis=1) * tau + hop

    pools: list[list[_Pair]] = []
    for s in range(segs):
        pool = [
            _Pair(s, s + 1, float(t) + hop, float(t)) for t in detect[s]
        ]
        pools.append(pool)
        if collect is not None:
            collect_segment_events(collect, p, s, attempts[s], detect[s])

    level_reached = 0
    station_free: dict[int, float] = {}
    for k in range(1, n + 1):
        half = 2 ** (k - 1)
        merged: list[list[_Pair]] = []
        for g in range(segs >> k):
            mid = g * 2**k + half
            left_pool = sorted(pools[2 * g], key=lambda q: (q.t_right, q.t_left))
            right_pool = sorted(pools[2 * g + 1], key=lambda q: (q.t_left, q.t_right))
            survivors: list[_Pair] = []
            for lp, rp in zip(left_pool, right_pool):
                ready = max(lp.t_right, rp.t_left)
                start = max(ready, station_free.get(mid, 0.0))
                finish = start + p.tau0_s
                station_free[mid] = finish
                ok = bool(rng.random() < p.P_c)
                if collect is not None:
                    collect(finish, mid, "swap",
                            f"level={k} success={'yes' if ok else 'no'}")
                    collect(finish, mid, "memory-release",
                            f"consumed inner qubits level={k}")
                    collect(finish + half * hop, lp.left, "classical-msg",
                            f"swap result level={k} from station {mid}")
                    collect(finish + half * hop, rp.right, "classical-msg",
                            f"swap result level={k} from station {mid}")
                    if not ok:
                        collect(finish + half * hop, lp.left, "memory-release",
                                f"swap failed level={k}")
                        collect(finish + half * hop, rp.right, "memory-release",
                                f"swap failed level={k}")
                if ok:
                    survivors.append(
                        _Pair(
                            lp.left,
                            rp.right,
                            finish + half * hop,
                            finish + half * hop,
                        )
                    )
            merged.append(survivors)
        pools = merged
        if any(pool for pool in pools):
            level_reached = k
        else:
            return None, level_reached
    final = pools[0]
    if not final:
        return None, level_reached
    completion = min(max(q.t_left, q.t_right) for q in final)
    return completion, n


def collect_segment_events(collect, p: ChainParams, seg: int, attempts, detect) -> None:
    """Emit the per-segment records for the sampled event log."""
    tau = 1.0 / p.f_hz
    hop = p.L0_km / p.c_km_s
    total_attempts = float(np.sum(attempts))
    log_attempts = total_attempts <= _ATTEMPT_LOG_LIMIT and 1.0 / p.P_g <= _ATTEMPT_LOG_LIMIT
    cap = memory_space(p, "rate-limited") / 2
    cum = 0
    for slot, (count, t_det) in enumerate(zip(attempts, detect)):
        if log_attempts:
            for a in range(cum + 1, cum + int(count) + 1):
                t_launch = (a - 1) * tau
                # Attempts launched within the last round trip still hold
                # their memory slot; the provisioned cap can only bind if
                # memory_space were overridden below the pipeline depth.
                in_flight = min(a, int(2 * hop / tau) + 1)
                blocked = in_flight > cap
                tag = " blocked" if blocked else ""
                collect(t_launch, seg, "memory-store", f"segment={seg} attempt={a}")
                collect(t_launch, seg, "attempt", f"segment={seg} attempt={a}{tag}")
                if a < cum + int(count):
                    collect(a * tau + 2 * hop, seg, "memory-release",
                            f"segment={seg} attempt={a} unheralded")
        cum += int(count)
        collect(float(t_det), seg + 1, "link-success", f"segment={seg} slot={slot}")
        collect(float(t_det), seg + 1, "memory-store", f"segment={seg} slot={slot} confirmed")
        collect(float(t_det) + hop, seg, "classical-msg", f"link herald segment={seg} slot={slot}")
        collect(float(t_det) + hop, seg, "memory-store", f"segment={seg} slot={slot} confirmed")


def mc_distribute(p: ChainParams, seed: int, trials: int) -> McResult:
    """Replay the generate-then-swap strategy over seeded trials.

    Each trial provisions ceil(1/P_c)^n link slots per segment, fills
    them from a pipelined attempt stream, and swaps greedily by
    earliest-ready time, paying classical latency at every level.  The
    mean is taken over trials whose lineage survives all levels; dead
    trials are counted per level instead of being retried.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(trials)
    times: list[float] = []
    failures_by_level = [0] * (p.n_levels + 1)
    sink: list[EventRecord] = []
    for index, child in enumerate(children):
        rng = np.random.default_rng(child)
        if index == 0:
            def collect(t, station, kind, info=""):
                sink.append(EventRecord(float(t), int(station), kind, info))
        else:
            collect = None
        completion, level = _run_trial(p, rng, collect)
        if completion is None:
            failures_by_level[min(level + 1, p.n_levels)] += 1
        else:
            times.append(completion)

    sink.sort(key=lambda r: (r.time_s, r.station, r.kind, r.info))
    events = EventLog(tuple(sink))
    completed = len(times)
    mean = float(np.mean(times)) if times else float("nan")
    return McResult(
        mean_time_s=mean,
        histogram=_histogram(times),
        events=events,
        trials=trials,
        completed=completed,
        failures=trials - completed,
        failures_by_level=tuple(failures_by_level),
        completion_times=tuple(times),
    )


def _histogram(times: list[float], bins: int = 12) -> tuple[tuple[float, float, int], ...]:
    if not times:
        return ()
    lo, hi = min(times), max(times)
    if hi == lo:
        return ((lo, hi, len(times)),)
    counts, edges = np.histogram(np.array(times), bins=bins, range=(lo, hi))
    return tuple(
        (float(edges[i]), float(edges[i + 1]), int(counts[i])) for i in range(len(counts))
    )
