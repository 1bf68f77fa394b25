"""Shared test utilities.

``reference_run`` replays a trace by composing the public per-access APIs
(one call per access, object layer, non-incremental hot counting). It is an
independent route to the same semantics as ``pagelog.sim.run`` and is used
to cross-check the integrated engine on small scenarios, and to expose
per-walk outcomes (e.g. which pages were dropped) that the engine does not
report.
"""

from __future__ import annotations

from types import SimpleNamespace

from pagelog.estimator import EstimatorParams
from pagelog.handler import CumulativeLog, FullEvent, batch_duration_ns, handle_full
from pagelog.mmu import Tlb, TlbConfig
from pagelog.tracker import Outcome, Tracker, TrackerStats, TrackingConfig, TrackingMode
from pagelog.trace import Trace

VM = 0


def reference_run(trace: Trace, tracking: TrackingConfig, tlb_config: TlbConfig,
                  params: EstimatorParams):
    mode = tracking.mode
    synchronous = mode is TrackingMode.PML
    log = CumulativeLog(owner_vm=VM)
    logs = {VM: log}
    vcpus = sorted({int(v) for v in trace.vcpu.tolist()}) if len(trace) else [0]
    tlbs = {v: Tlb(tlb_config) for v in vcpus}
    trackers = {v: Tracker(tracking) for v in vcpus}
    by_key = {(VM, v): trackers[v] for v in vcpus}

    mu = params.mu_ns
    tau = params.tau
    next_obs = mu
    observations = []
    pending: list[FullEvent] = []
    batch = None
    busy_until = 0
    walks = 0
    dropped_pages: set[int] = set()
    outcomes: list[Outcome] = []

    def hot_count():
        return sum(1 for c in log.counts.values() if c >= tau)

    def fire(now):
        nonlocal batch, busy_until, next_obs
        while True:
            ct = busy_until if batch is not None else None
            if (ct is None or ct >= now) and next_obs >= now:
                return
            if ct is not None and ct <= next_obs:
                handle_full(batch, logs, by_key)
                batch = None
                if pending:
                    nb = pending[:]
                    pending.clear()
                    batch = nb
                    busy_until = ct + batch_duration_ns(nb, by_key)
            else:
                if synchronous:
                    for v in vcpus:
                        res = trackers[v].drain_residual()
                        if res:
                            log.add_snapshot(res)
                observations.append((next_obs, hot_count(), len(log.counts)))
                next_obs += mu

    for access in trace:
        fire(access.t)
        walk = tlbs[access.vcpu].lookup(access)
        if walk is None:
            continue
        walks += 1
        tracker = trackers[access.vcpu]
        outcome = tracker.observe(walk, access.t)
        outcomes.append(outcome)
        if outcome is Outcome.DROPPED:
            dropped_pages.add(access.gppn)
        elif outcome is Outcome.FULL:
            snap = tracker.take_full_snapshot()
            if synchronous:
                log.add_snapshot(snap)
            else:
                pending.append(FullEvent(VM, access.vcpu, snap, access.t))
                if batch is None:
                    batch = pending[:]
                    pending.clear()
                    busy_until = access.t + batch_duration_ns(batch, by_key)

    end_t = int(trace.t[-1]) if len(trace) else 0
    fire(end_t + 1)
    while batch is not None:
        handle_full(batch, logs, by_key)
        batch = None
        if pending:
            batch = pending[:]
            pending.clear()
    for v in vcpus:
        res = trackers[v].drain_residual()
        if res:
            log.add_snapshot(res)
    if len(trace):
        observations.append((end_t, hot_count(), len(log.counts)))

    stats = TrackerStats()
    for v in vcpus:
        stats = stats.merged(trackers[v].stats())
    return SimpleNamespace(
        walks=walks,
        stats=stats,
        log=log,
        observations=observations,
        dropped_pages=dropped_pages,
        outcomes=outcomes,
    )
