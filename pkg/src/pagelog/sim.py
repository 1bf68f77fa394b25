"""Deterministic virtual-time simulation binding trace, TLB, tracker and handler.

One run replays a trace through per-vCPU TLBs; every walk feeds that vCPU's
logging hardware; full buffers flow to the handler; the per-VM cumulative
log is observed every ``mu`` of virtual time to build the estimation series.

Event ordering is fixed: within one virtual instant, VM accesses are
processed first, then due handler completions, then estimator observations.
Virtual time comes exclusively from trace timestamps and configured costs;
no wall clock is consulted anywhere, so identical scenarios produce
identical reports.

Write-only (PML) full events are handled synchronously: the VM is stalled,
the buffer content lands in the cumulative log at the same instant, and the
stall is charged to the VM's effective runtime. All-access (PAML) full
events start an asynchronous handler invocation; the transfer becomes
visible when the invocation's virtual duration elapses, and walks arriving
in between are dropped and counted.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .estimator import (
    EstimatorParams,
    WssEstimate,
    estimate_from_series,
    estimate_oracle,
    estimate_vmware,
)
from .handler import CumulativeLog, FullEvent, batch_duration_ns, handle_full
from .mmu import Tlb, TlbConfig
from .tracker import (
    OBS_FULL,
    Tracker,
    TrackerStats,
    TrackingConfig,
    TrackingMode,
)
from .trace import Pattern, Trace, WorkloadSpec, generate, read_trace_file

ESTIMATOR_PRL = "prl"
ESTIMATOR_PML = "pml"
ESTIMATOR_VMWARE = "vmware"
ESTIMATOR_ORACLE = "oracle"
ALL_ESTIMATORS = (ESTIMATOR_PRL, ESTIMATOR_PML, ESTIMATOR_VMWARE, ESTIMATOR_ORACLE)

_VM_ID = 0  # single simulated VM per scenario


@dataclass(frozen=True)
class Scenario:
    """Everything one reproducible run needs."""

    workload: Optional[WorkloadSpec] = None
    trace_path: Optional[str] = None
    tracking: TrackingConfig = TrackingConfig()
    tlb: TlbConfig = TlbConfig()
    estimator: EstimatorParams = EstimatorParams()
    estimators_enabled: frozenset = frozenset({ESTIMATOR_ORACLE})
    seed: int = 0
    vm_pages: Optional[int] = None
    vmware_sample_size: int = 100
    vmware_period_s: float = 30.0
    name: str = "scenario"

    def validate(self) -> None:
        if (self.workload is None) == (self.trace_path is None):
            raise ValidationError("workload: exactly one of workload and trace_path is required")
        if self.workload is not None:
            self.workload.validate()
        self.tracking.validate()
        self.tlb.validate()
        self.estimator.validate()
        unknown = set(self.estimators_enabled) - set(ALL_ESTIMATORS)
        if unknown:
            raise ValidationError(f"estimators: unknown estimator(s) {sorted(unknown)}")
        mode = self.tracking.mode
        if ESTIMATOR_PRL in self.estimators_enabled and mode is not TrackingMode.PAML:
            raise ValidationError("estimators: prl requires tracking mode paml")
        if ESTIMATOR_PML in self.estimators_enabled and mode is not TrackingMode.PML:
            raise ValidationError("estimators: pml requires tracking mode pml")
        if self.vm_pages is not None and self.vm_pages < 1:
            raise ValidationError("vm_pages: must be >= 1")


@dataclass(frozen=True)
class ObsPoint:
    """One estimator observation: a snapshot of the cumulative log's counters."""

    t_ns: int
    hot_pages: int
    distinct_pages: int


@dataclass
class SimReport:
    """Per-run statistics and estimates."""

    scenario_name: str
    mode: str
    trace_len: int
    span_ns: int
    walks: int
    stats: TrackerStats
    ground_truth_wss_pages: Optional[int]
    allocated_pages: int
    log_total: int
    log_distinct: int
    handler_busy_ns: int
    observations: list = field(default_factory=list)
    estimates: dict = field(default_factory=dict)

    @property
    def vm_stall_ns(self) -> int:
        return self.stats.vm_stall_ns

    @property
    def vm_effective_runtime_ns(self) -> int:
        return self.span_ns + self.stats.vm_stall_ns

    @property
    def overhead_percent(self) -> float:
        if self.span_ns == 0:
            return 0.0
        return self.stats.vm_stall_ns / self.span_ns * 100.0

    @property
    def pvm_utilization_percent(self) -> float:
        if self.span_ns == 0:
            return 0.0
        return self.handler_busy_ns / self.span_ns * 100.0

    @property
    def missed_fraction(self) -> float:
        if self.walks == 0:
            return 0.0
        return self.stats.missed_gpas / self.walks

    def to_json_dict(self) -> dict:
        return {
            "scenario": self.scenario_name,
            "mode": self.mode,
            "trace_len": self.trace_len,
            "span_ns": self.span_ns,
            "walks": self.walks,
            "full_events": self.stats.full_events,
            "missed_gpas": self.stats.missed_gpas,
            "logged": self.stats.logged,
            "vm_stall_ns": self.stats.vm_stall_ns,
            "vm_effective_runtime_ns": self.vm_effective_runtime_ns,
            "overhead_percent": self.overhead_percent,
            "handler_busy_ns": self.handler_busy_ns,
            "pvm_utilization_percent": self.pvm_utilization_percent,
            "ground_truth_wss_pages": self.ground_truth_wss_pages,
            "allocated_pages": self.allocated_pages,
            "log_total": self.log_total,
            "log_distinct": self.log_distinct,
            "observations": [
                {"t_ns": o.t_ns, "hot_pages": o.hot_pages, "distinct_pages": o.distinct_pages}
                for o in self.observations
            ],
            "estimates": {
                name: {
                    "wss_pages": est.wss_pages,
                    "m_bytes": est.m_bytes,
                    "converged": est.converged,
                    "converged_index": est.converged_index,
                    "observations": list(est.observations),
                }
                for name, est in self.estimates.items()
            },
        }

    def csv_rows(self) -> list:
        """Flat key,value rows for the report CSV."""
        rows = [
            ("scenario", self.scenario_name),
            ("mode", self.mode),
            ("trace_len", str(self.trace_len)),
            ("span_ns", str(self.span_ns)),
            ("walks", str(self.walks)),
            ("full_events", str(self.stats.full_events)),
            ("missed_gpas", str(self.stats.missed_gpas)),
            ("logged", str(self.stats.logged)),
            ("vm_stall_ns", str(self.stats.vm_stall_ns)),
            ("vm_effective_runtime_ns", str(self.vm_effective_runtime_ns)),
            ("overhead_percent", f"{self.overhead_percent:.9f}"),
            ("handler_busy_ns", str(self.handler_busy_ns)),
            ("pvm_utilization_percent", f"{self.pvm_utilization_percent:.9f}"),
            (
                "ground_truth_wss_pages",
                "" if self.ground_truth_wss_pages is None else str(self.ground_truth_wss_pages),
            ),
            ("allocated_pages", str(self.allocated_pages)),
            ("log_total", str(self.log_total)),
            ("log_distinct", str(self.log_distinct)),
        ]
        for name in ALL_ESTIMATORS:
            if name in self.estimates:
                est = self.estimates[name]
                rows.append((f"wss_{name}_pages", str(est.wss_pages)))
                rows.append((f"wss_{name}_m_bytes", str(est.m_bytes)))
                rows.append((f"wss_{name}_converged", str(est.converged).lower()))
        return rows

    def summary_text(self) -> str:
        lines = [
            f"scenario {self.scenario_name}: mode={self.mode} accesses={self.trace_len} "
            f"span={self.span_ns} ns walks={self.walks}",
            f"  tracker: logged={self.stats.logged} full_events={self.stats.full_events} "
            f"missed={self.stats.missed_gpas} stall={self.stats.vm_stall_ns} ns "
            f"overhead={self.overhead_percent:.4f}%",
            f"  log: total={self.log_total} distinct={self.log_distinct} "
            f"ground_truth={self.ground_truth_wss_pages}",
        ]
        for name in ALL_ESTIMATORS:
            if name in self.estimates:
                est = self.estimates[name]
                flag = "converged" if est.converged else "not converged"
                lines.append(f"  {name}: wss={est.wss_pages} pages ({est.m_bytes} bytes, {flag})")
        return "\n".join(lines)


class _EngineOutput:
    __slots__ = ("walks", "stats", "log", "observations", "handler_busy_ns")

    def __init__(self, walks, stats, log, observations, handler_busy_ns):
        self.walks = walks
        self.stats = stats
        self.log = log
        self.observations = observations
        self.handler_busy_ns = handler_busy_ns


def _simulate(trace: Trace, tracking: TrackingConfig, tlb_config: TlbConfig,
              params: EstimatorParams) -> _EngineOutput:
    """Replay the trace through the hardware model; the core event loop."""
    mode = tracking.mode
    synchronous = mode is TrackingMode.PML
    log = CumulativeLog(owner_vm=_VM_ID, hot_threshold=params.tau)
    logs = {_VM_ID: log}

    vcpu_ids = sorted({int(v) for v in set(trace.vcpu.tolist())}) if len(trace) else [0]
    tlbs = {v: Tlb(tlb_config) for v in vcpu_ids}
    trackers = {v: Tracker(tracking) for v in vcpu_ids}
    handler_trackers = {(_VM_ID, v): trackers[v] for v in vcpu_ids}
    single = len(vcpu_ids) == 1

    mu = params.mu_ns
    next_obs = mu
    observations: list[ObsPoint] = []

    pending: list[FullEvent] = []
    batch: Optional[list] = None
    busy_until = 0
    handler_busy_ns = 0
    walks = 0

    INF = (1 << 62)

    def fire_due(now: int) -> None:
        """Apply handler completions and observations strictly before ``now``."""
        nonlocal batch, busy_until, next_obs, handler_busy_ns
        while True:
            ct = busy_until if batch is not None else INF
            if ct >= now and next_obs >= now:
                return
            if ct <= next_obs:
                handle_full(batch, logs, handler_trackers)
                batch = None
                if pending:
                    new_batch = pending[:]
                    pending.clear()
                    dur = batch_duration_ns(new_batch, handler_trackers)
                    handler_busy_ns += dur
                    batch = new_batch
                    busy_until = ct + dur
            else:
                if synchronous:
                    # Synchronous-mode collection reads the hardware buffer on
                    # demand (flush-on-query), so partially filled buffers are
                    # visible to the estimator, not only full ones.
                    for v in vcpu_ids:
                        residual = trackers[v].drain_residual()
                        if residual:
                            log.add_snapshot(residual)
                observations.append(ObsPoint(next_obs, log.hot_count, log.distinct_count))
                next_obs += mu

    n = len(trace)
    chunk = 1 << 19
    t_arr = trace.t
    g_arr = trace.gppn
    w_arr = trace.is_write
    v_arr = trace.vcpu

    if single:
        tlb = tlbs[vcpu_ids[0]]
        tracker = trackers[vcpu_ids[0]]
        lookup = tlb.lookup_raw
        observe = tracker.observe_raw
        take_snapshot = tracker.take_full_snapshot
        add_snapshot = log.add_snapshot
        vcpu0 = vcpu_ids[0]
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            ts = t_arr[lo:hi].tolist()
            gs = g_arr[lo:hi].tolist()
            ws = w_arr[lo:hi].tolist()
            for i in range(hi - lo):
                t = ts[i]
                if (batch is not None and busy_until < t) or next_obs < t:
                    fire_due(t)
                g = gs[i]
                code = lookup(g, ws[i])
                if code:
                    walks += 1
                    if observe(g, code == 2) == OBS_FULL:
                        snap = take_snapshot()
                        if synchronous:
                            add_snapshot(snap)
                        else:
                            pending.append(FullEvent(_VM_ID, vcpu0, snap, t))
                            if batch is None:
                                batch = pending[:]
                                pending.clear()
                                dur = batch_duration_ns(batch, handler_trackers)
                                handler_busy_ns += dur
                                busy_until = t + dur
    else:
        for lo in range(0, n, chunk):
            hi = min(lo + chunk, n)
            ts = t_arr[lo:hi].tolist()
            gs = g_arr[lo:hi].tolist()
            ws = w_arr[lo:hi].tolist()
            vs = v_arr[lo:hi].tolist()
            for i in range(hi - lo):
                t = ts[i]
                if (batch is not None and busy_until < t) or next_obs < t:
                    fire_due(t)
                g = gs[i]
                v = vs[i]
                code = tlbs[v].lookup_raw(g, ws[i])
                if code:
                    walks += 1
                    tracker = trackers[v]
                    if tracker.observe_raw(g, code == 2) == OBS_FULL:
                        snap = tracker.take_full_snapshot()
                        if synchronous:
                            log.add_snapshot(snap)
                        else:
                            pending.append(FullEvent(_VM_ID, v, snap, t))
                            if batch is None:
                                batch = pending[:]
                                pending.clear()
                                dur = batch_duration_ns(batch, handler_trackers)
                                handler_busy_ns += dur
                                busy_until = t + dur

    end_t = int(t_arr[-1]) if n else 0
    fire_due(end_t + 1)

    # Flush handler work scheduled beyond the end of the trace, then fold in
    # whatever is still sitting in partially filled buffers.
    while batch is not None:
        handle_full(batch, logs, handler_trackers)
        batch = None
        if pending:
            batch = pending[:]
            pending.clear()
            handler_busy_ns += batch_duration_ns(batch, handler_trackers)
    for v in vcpu_ids:
        residual = trackers[v].drain_residual()
        if residual:
            log.add_snapshot(residual)
    if n:
        # Closing observation: the estimation process reads the fully drained
        # log once the workload ends, so traces shorter than a buffer round
        # (or an observation interval) still yield their final counts.
        observations.append(ObsPoint(end_t, log.hot_count, log.distinct_count))

    stats = TrackerStats()
    for v in vcpu_ids:
        stats = stats.merged(trackers[v].stats())
    return _EngineOutput(walks, stats, log, observations, handler_busy_ns)


def _obtain_trace(scenario: Scenario) -> Trace:
    if scenario.workload is not None:
        return generate(scenario.workload)
    return read_trace_file(scenario.trace_path)


def _allocated_pages(scenario: Scenario, trace: Trace) -> int:
    if scenario.vm_pages is not None:
        return scenario.vm_pages
    if scenario.workload is not None:
        return scenario.workload.n_pages
    return trace.max_gppn + 1 if len(trace) else 1


def run(scenario: Scenario, trace: Optional[Trace] = None) -> SimReport:
    """Execute one scenario and assemble its report.

    ``trace`` may be passed to reuse an already materialised workload (the
    paired comparison does); it must match what the scenario would produce.
    """
    scenario.validate()
    if trace is None:
        trace = _obtain_trace(scenario)
    allocated = _allocated_pages(scenario, trace)
    if len(trace) and trace.max_gppn >= allocated:
        raise ValidationError(
            f"vm_pages: trace references page {trace.max_gppn} outside the "
            f"{allocated}-page allocation"
        )

    mode = scenario.tracking.mode
    params = scenario.estimator
    enabled = scenario.estimators_enabled

    if mode is TrackingMode.OFF:
        out = _EngineOutput(0, TrackerStats(), CumulativeLog(_VM_ID, params.tau), [], 0)
    else:
        out = _simulate(trace, scenario.tracking, scenario.tlb, params)

    estimates: dict[str, WssEstimate] = {}
    native: Optional[WssEstimate] = None
    if ESTIMATOR_PRL in enabled:
        native = estimate_from_series((o.hot_pages for o in out.observations), params)
        estimates[ESTIMATOR_PRL] = native
    if ESTIMATOR_PML in enabled:
        native = estimate_from_series((o.distinct_pages for o in out.observations), params)
        estimates[ESTIMATOR_PML] = native
    if ESTIMATOR_ORACLE in enabled:
        estimates[ESTIMATOR_ORACLE] = estimate_oracle(trace, params)
    if ESTIMATOR_VMWARE in enabled:
        if native is not None and native.converged:
            until = out.observations[native.converged_index].t_ns
        else:
            until = int(trace.t[-1]) if len(trace) else 0
        estimates[ESTIMATOR_VMWARE] = estimate_vmware(
            trace,
            allocated,
            params,
            sample_size=scenario.vmware_sample_size,
            period_s=scenario.vmware_period_s,
            seed=scenario.seed,
            until_ns=until,
        )

    return SimReport(
        scenario_name=scenario.name,
        mode=mode.value,
        trace_len=len(trace),
        span_ns=trace.span_ns,
        walks=out.walks,
        stats=out.stats,
        ground_truth_wss_pages=trace.ground_truth_wss_pages,
        allocated_pages=allocated,
        log_total=out.log.total,
        log_distinct=out.log.distinct_count,
        handler_busy_ns=out.handler_busy_ns,
        observations=out.observations,
        estimates=estimates,
    )


@dataclass(frozen=True)
class PairedRow:
    estimator: str
    wss_pages: int
    error_pages: int
    full_events: int
    missed_gpas: int
    overhead_percent: float


@dataclass
class PairedComparison:
    """All four estimators run against the identical trace."""

    scenario_name: str
    rows: list
    reports: dict
    ground_truth_wss_pages: Optional[int]

    def csv_lines(self, with_scenario: bool = False) -> list:
        header = "estimator,wss_pages,error_pages,full_events,missed_gpas,overhead_percent"
        if with_scenario:
            header = "scenario," + header
        lines = [header]
        for r in self.rows:
            line = (
                f"{r.estimator},{r.wss_pages},{r.error_pages},"
                f"{r.full_events},{r.missed_gpas},{r.overhead_percent:.9f}"
            )
            if with_scenario:
                line = f"{self.scenario_name},{line}"
            lines.append(line)
        return lines


def run_paired(scenario: Scenario, trace: Optional[Trace] = None) -> PairedComparison:
    """Run the all-access, write-only, sampling and oracle estimators on one trace."""
    scenario.validate()
    if trace is None:
        trace = _obtain_trace(scenario)

    paml_scenario = dataclasses.replace(
        scenario,
        tracking=dataclasses.replace(scenario.tracking, mode=TrackingMode.PAML),
        estimators_enabled=frozenset({ESTIMATOR_PRL, ESTIMATOR_VMWARE, ESTIMATOR_ORACLE}),
    )
    pml_scenario = dataclasses.replace(
        scenario,
        tracking=dataclasses.replace(scenario.tracking, mode=TrackingMode.PML),
        estimators_enabled=frozenset({ESTIMATOR_PML, ESTIMATOR_ORACLE}),
    )
    paml_report = run(paml_scenario, trace=trace)
    pml_report = run(pml_scenario, trace=trace)

    oracle = paml_report.estimates[ESTIMATOR_ORACLE]
    rows = []

    def row(name, est, report, counted):
        stats = report.stats if counted else TrackerStats()
        overhead = report.overhead_percent if counted else 0.0
        rows.append(
            PairedRow(
                estimator=name,
                wss_pages=est.wss_pages,
                error_pages=abs(est.wss_pages - oracle.wss_pages),
                full_events=stats.full_events,
                missed_gpas=stats.missed_gpas,
                overhead_percent=overhead,
            )
        )

    row(ESTIMATOR_PRL, paml_report.estimates[ESTIMATOR_PRL], paml_report, True)
    row(ESTIMATOR_PML, pml_report.estimates[ESTIMATOR_PML], pml_report, True)
    row(ESTIMATOR_VMWARE, paml_report.estimates[ESTIMATOR_VMWARE], paml_report, False)
    row(ESTIMATOR_ORACLE, oracle, paml_report, False)

    return PairedComparison(
        scenario_name=scenario.name,
        rows=rows,
        reports={"paml": paml_report, "pml": pml_report},
        ground_truth_wss_pages=trace.ground_truth_wss_pages,
    )


# ---------------------------------------------------------------------------
# Scenario files: flat key = value text
# ---------------------------------------------------------------------------

_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def _parse_bool(key: str, value: str) -> bool:
    try:
        return _BOOL_VALUES[value.strip().lower()]
    except KeyError:
        raise ValidationError(f"{key}: expected a boolean, got {value!r}") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValidationError(f"{key}: expected an integer, got {value!r}") from None


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValidationError(f"{key}: expected a number, got {value!r}") from None


def parse_scenario_text(text: str, name: str = "scenario", base_dir: Optional[Path] = None) -> Scenario:
    """Parse the flat ``key = value`` scenario format.

    Unknown keys are rejected so that typos fail loudly. ``workload.trace``
    paths are resolved against ``base_dir`` when given.
    """
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"scenario line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        key = key.strip().lower()
        value = value.strip()
        if key in kv:
            raise ValidationError(f"scenario line {lineno}: duplicate key {key!r}")
        kv[key] = value

    def pop(key, default=None):
        return kv.pop(key, default)

    seed = _parse_int("seed", pop("seed", "0"))

    workload = None
    trace_path = pop("workload.trace")
    if trace_path is not None:
        if base_dir is not None:
            trace_path = str((base_dir / trace_path).resolve())
        for k in list(kv):
            if k.startswith("workload."):
                raise ValidationError(f"{k}: not allowed together with workload.trace")
    else:
        if "workload.pattern" not in kv or "workload.n_pages" not in kv:
            raise ValidationError("workload.pattern: required (with workload.n_pages) unless workload.trace is set")
        hot = pop("workload.hot_pages")
        workload = WorkloadSpec(
            n_pages=_parse_int("workload.n_pages", pop("workload.n_pages")),
            pattern=Pattern.parse(pop("workload.pattern")),
            d_iters=_parse_int("workload.d_iters", pop("workload.d_iters", "1")),
            wi=_parse_int("workload.wi", pop("workload.wi", "50")),
            hot_pages=_parse_int("workload.hot_pages", hot) if hot is not None else None,
            cold_prefix=_parse_bool("workload.cold_prefix", pop("workload.cold_prefix", "false")),
            seed=_parse_int("workload.seed", pop("workload.seed", str(seed))),
            inter_access_gap_ns=_parse_int(
                "workload.inter_access_gap_ns", pop("workload.inter_access_gap_ns", "100")
            ),
        )

    tracking = TrackingConfig(
        mode=TrackingMode.parse(pop("tracking.mode", "paml")),
        buffer_entries=_parse_int("tracking.buffer_entries", pop("tracking.buffer_entries", "512")),
        vmexit_cost_ns=_parse_int("tracking.vmexit_cost_ns", pop("tracking.vmexit_cost_ns", "4000")),
        handler_latency_per_entry_ns=_parse_int(
            "tracking.handler_latency_per_entry_ns",
            pop("tracking.handler_latency_per_entry_ns", "20"),
        ),
    )
    tlb = TlbConfig(
        entries=_parse_int("tlb.entries", pop("tlb.entries", "64")),
        ways=_parse_int("tlb.ways", pop("tlb.ways", "4")),
        replacement=pop("tlb.replacement", "lru").strip().lower(),
    )
    est = EstimatorParams(
        tau=_parse_int("estimator.tau", pop("estimator.tau", "50")),
        mu_s=_parse_float("estimator.mu_s", pop("estimator.mu_s", "30")),
        omega_s=_parse_float("estimator.omega_s", pop("estimator.omega_s", "120")),
        page_size=_parse_int("estimator.page_size", pop("estimator.page_size", "4096")),
        epsilon_bytes=_parse_int("estimator.epsilon_bytes", pop("estimator.epsilon_bytes", "0")),
    )

    estimators_value = pop("estimators")
    if estimators_value is None:
        native = ESTIMATOR_PML if tracking.mode is TrackingMode.PML else ESTIMATOR_PRL
        enabled = {ESTIMATOR_ORACLE}
        if tracking.mode is not TrackingMode.OFF:
            enabled.add(native)
    else:
        enabled = {e.strip().lower() for e in estimators_value.split(",") if e.strip()}

    vm_pages_value = pop("vm_pages")
    scenario = Scenario(
        workload=workload,
        trace_path=trace_path,
        tracking=tracking,
        tlb=tlb,
        estimator=est,
        estimators_enabled=frozenset(enabled),
        seed=seed,
        vm_pages=_parse_int("vm_pages", vm_pages_value) if vm_pages_value is not None else None,
        vmware_sample_size=_parse_int("vmware.sample_size", pop("vmware.sample_size", "100")),
        vmware_period_s=_parse_float("vmware.period_s", pop("vmware.period_s", "30")),
        name=name,
    )
    if kv:
        raise ValidationError(f"unknown scenario key(s): {', '.join(sorted(kv))}")
    scenario.validate()
    return scenario


def load_scenario(path) -> Scenario:
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    return parse_scenario_text(text, name=p.stem, base_dir=p.parent)


def report_to_json(report: SimReport) -> str:
    return json.dumps(report.to_json_dict(), indent=2, sort_keys=True)


__all__ = [
    "ESTIMATOR_PRL",
    "ESTIMATOR_PML",
    "ESTIMATOR_VMWARE",
    "ESTIMATOR_ORACLE",
    "ALL_ESTIMATORS",
    "Scenario",
    "ObsPoint",
    "SimReport",
    "PairedRow",
    "PairedComparison",
    "run",
    "run_paired",
    "parse_scenario_text",
    "load_scenario",
    "report_to_json",
]
