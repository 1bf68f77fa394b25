"""Working-set-size estimation algorithms.

All estimators share one convergence rule: the cumulative log is observed
every ``mu`` seconds of virtual time, the i-th observation yields a
distinct-page count ``dist[i]``, and the loop ends at the first
``i >= omega/mu`` with ``dist[i] - dist[i - omega/mu] == 0`` (the count has
been stable for the whole ``omega`` window). ``dist`` is non-decreasing by
construction since pages only ever accumulate log entries.

Estimators:

* :func:`estimate_prl`    -- counts pages logged at least ``tau`` times
  (all-access logging required; identifies hot pages).
* :func:`estimate_pml`    -- counts distinct logged pages; write-only
  logging records a page once, so ``tau`` cannot apply.
* :func:`estimate_vmware` -- the sampling baseline: each period, 100 random
  pages have their present bit invalidated and the faulting fraction scales
  to the allocation size.
* :func:`estimate_oracle` -- offline ground truth straight from the trace,
  no TLB filtering and no buffer losses.
* :func:`estimate_epsilon` -- the multiplicative-shrink probe for the guest
  kernel footprint added by Eq.-style totals (``m_bytes``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Tuple

import numpy as np

from .errors import PredicateContractError, ValidationError
from .trace import PAGE_SIZE, Trace

DEFAULT_TAU = 50
DEFAULT_MU_S = 30.0
DEFAULT_OMEGA_S = 120.0
DEFAULT_VMWARE_SAMPLE_SIZE = 100
DEFAULT_VMWARE_PERIOD_S = 30.0

_NS_PER_S = 1_000_000_000


@dataclass(frozen=True)
class EstimatorParams:
    """Knobs of the estimation loop.

    ``tau``: minimum log count for a page to be considered hot.
    ``mu_s``: observation interval, virtual seconds.
    ``omega_s``: stability window, virtual seconds; must be a multiple of ``mu_s``.
    """

    tau: int = DEFAULT_TAU
    mu_s: float = DEFAULT_MU_S
    omega_s: float = DEFAULT_OMEGA_S
    page_size: int = PAGE_SIZE
    epsilon_bytes: int = 0

    def validate(self) -> None:
        if self.tau < 1:
            raise ValidationError("tau: must be >= 1")
        if self.mu_s <= 0:
            raise ValidationError("mu_s: must be > 0")
        if self.omega_s <= 0:
            raise ValidationError("omega_s: must be > 0")
        if self.page_size < 1:
            raise ValidationError("page_size: must be >= 1")
        if self.epsilon_bytes < 0:
            raise ValidationError("epsilon_bytes: must be >= 0")
        if self.omega_ns % self.mu_ns != 0:
            raise ValidationError("omega_s: must be an integer multiple of mu_s")

    @property
    def mu_ns(self) -> int:
        return round(self.mu_s * _NS_PER_S)

    @property
    def omega_ns(self) -> int:
        return round(self.omega_s * _NS_PER_S)

    @property
    def window(self) -> int:
        """Stability window expressed in observations (omega / mu)."""
        return self.omega_ns // self.mu_ns


@dataclass
class EstimatorState:
    """Observation history of one estimation run."""

    dist: list[int]
    converged: bool
    converged_index: Optional[int] = None


@dataclass(frozen=True)
class WssEstimate:
    """Result of one estimator: hot-page count plus the Eq.-style byte total."""

    wss_pages: int
    m_bytes: int
    observations: Tuple[int, ...]
    converged: bool
    converged_index: Optional[int] = None


def _m_bytes(wss_pages: int, params: EstimatorParams) -> int:
    return wss_pages * params.page_size + params.epsilon_bytes


def run_convergence(dist_values: Iterable[int], params: EstimatorParams) -> EstimatorState:
    """Consume observations until the stability rule fires or input ends.

    Stops pulling from ``dist_values`` as soon as the loop converges, like
    the live estimation process would. Raises if the series decreases,
    since distinct-page counts over a cumulative log are monotone.
    """
    params.validate()
    k = params.window
    dist: list[int] = []
    for value in dist_values:
        if dist and value < dist[-1]:
            raise ValidationError(
                f"dist: observation {len(dist)} decreased ({value} < {dist[-1]})"
            )
        dist.append(value)
        i = len(dist) - 1
        if i >= k and dist[i] - dist[i - k] == 0:
            return EstimatorState(dist=dist, converged=True, converged_index=i)
    return EstimatorState(dist=dist, converged=False, converged_index=None)


def estimate_from_series(dist_values: Iterable[int], params: EstimatorParams) -> WssEstimate:
    """Build the estimate for a precomputed observation series."""
    state = run_convergence(dist_values, params)
    if state.converged:
        wss = state.dist[state.converged_index]
    else:
        wss = state.dist[-1] if state.dist else 0
    return WssEstimate(
        wss_pages=wss,
        m_bytes=_m_bytes(wss, params),
        observations=tuple(state.dist),
        converged=state.converged,
        converged_index=state.converged_index,
    )


def estimate_prl(
    log_samples: Iterable[Mapping[int, int]], params: EstimatorParams
) -> WssEstimate:
    """Hot-page estimate over periodic views of an all-access cumulative log.

    ``log_samples`` yields the log's page->count mapping once per ``mu`` of
    virtual time; sampling stops at convergence.
    """
    tau = params.tau
    return estimate_from_series(
        (sum(1 for c in sample.values() if c >= tau) for sample in log_samples), params
    )


def estimate_pml(
    log_samples: Iterable[Mapping[int, int]], params: EstimatorParams
) -> WssEstimate:
    """Distinct-page estimate over periodic views of a write-only log.

    Write-only logging records each page once per dirty transition, so hot
    pages cannot be told from cold ones; the count threshold is not applied.
    """
    return estimate_from_series((len(sample) for sample in log_samples), params)


def estimate_oracle(trace: Trace, params: EstimatorParams) -> WssEstimate:
    """Ground truth from the raw trace: pages referenced at least tau times."""
    params.validate()
    if len(trace) == 0:
        wss = 0
    else:
        _, counts = np.unique(trace.gppn, return_counts=True)
        wss = int((counts >= params.tau).sum())
    return WssEstimate(
        wss_pages=wss,
        m_bytes=_m_bytes(wss, params),
        observations=(wss,),
        converged=True,
        converged_index=None,
    )


def estimate_vmware(
    trace: Trace,
    allocated_pages: int,
    params: EstimatorParams,
    sample_size: int = DEFAULT_VMWARE_SAMPLE_SIZE,
    period_s: float = DEFAULT_VMWARE_PERIOD_S,
    seed: int = 0,
    until_ns: Optional[int] = None,
) -> WssEstimate:
    """Sampling baseline over a trace feed.

    Each period a fresh sample of ``sample_size`` pages is drawn uniformly
    without replacement from the allocation; pages touched during their
    period count as faulted, and the faulted fraction scales to
    ``allocated_pages``. The reported value is the estimate of the last
    period completed by ``until_ns`` (the caller passes the comparison
    estimator's convergence instant); with no completed period, the open
    period is evaluated at that instant.
    """
    params.validate()
    if allocated_pages < 1:
        raise ValidationError("allocated_pages: must be >= 1")
    if sample_size < 1:
        raise ValidationError("sample_size: must be >= 1")
    if sample_size > allocated_pages:
        raise ValidationError("sample_size: must not exceed allocated pages")
    if period_s <= 0:
        raise ValidationError("period_s: must be > 0")
    period_ns = round(period_s * _NS_PER_S)
    if until_ns is None:
        until_ns = int(trace.t[-1]) if len(trace) else 0

    rng = np.random.default_rng(seed)
    t = trace.t
    g = trace.gppn
    per_period: list[int] = []
    k = 0
    while (k + 1) * period_ns <= until_ns:
        start = k * period_ns
        end = start + period_ns
        sample = rng.choice(allocated_pages, size=sample_size, replace=False)
        lo = int(np.searchsorted(t, start, side="left"))
        hi = int(np.searchsorted(t, end, side="left"))
        faulted = int(np.isin(sample, g[lo:hi]).sum())
        per_period.append(round(faulted / sample_size * allocated_pages))
        k += 1
    if per_period:
        wss = per_period[-1]
    else:
        sample = rng.choice(allocated_pages, size=sample_size, replace=False)
        lo = int(np.searchsorted(t, k * period_ns, side="left"))
        hi = int(np.searchsorted(t, until_ns, side="right"))
        faulted = int(np.isin(sample, g[lo:hi]).sum()) if hi > lo else 0
        wss = round(faulted / sample_size * allocated_pages)
        per_period.append(wss)
    return WssEstimate(
        wss_pages=wss,
        m_bytes=_m_bytes(wss, params),
        observations=tuple(per_period),
        converged=True,
        converged_index=None,
    )


def estimate_epsilon(
    boots_ok: Callable[[float], bool],
    start_bytes: float = 2 * 1024**3,
    max_iterations: int = 500,
) -> float:
    """Find the minimal-but-bootable memory size by 5% shrink steps.

    Repeatedly shrinks a candidate size to 95% of the current value and
    probes ``boots_ok``; the last size that still booted is returned. The
    probe must be monotone (true above some threshold, false below). The
    returned value is verified against the probe; an inconsistent answer
    raises :class:`PredicateContractError`, as does exceeding
    ``max_iterations`` shrink steps without a failure.
    """
    if start_bytes <= 0:
        raise ValidationError("start_bytes: must be > 0")
    if max_iterations < 1:
        raise ValidationError("max_iterations: must be >= 1")
    epsilon = float(start_bytes)
    epsilon_verified = False
    for _ in range(max_iterations):
        cur_mem = 0.95 * epsilon
        if not boots_ok(cur_mem):
            if not epsilon_verified and not boots_ok(epsilon):
                raise PredicateContractError(
                    "boots_ok: failed at the start size; predicate is not "
                    "monotone-true above any reachable threshold"
                )
            return epsilon
        epsilon = cur_mem
        epsilon_verified = True
    raise PredicateContractError(
        f"boots_ok: never failed within {max_iterations} shrink steps"
    )


__all__ = [
    "DEFAULT_TAU",
    "DEFAULT_MU_S",
    "DEFAULT_OMEGA_S",
    "DEFAULT_VMWARE_SAMPLE_SIZE",
    "DEFAULT_VMWARE_PERIOD_S",
    "EstimatorParams",
    "EstimatorState",
    "WssEstimate",
    "run_convergence",
    "estimate_from_series",
    "estimate_prl",
    "estimate_pml",
    "estimate_oracle",
    "estimate_vmware",
    "estimate_epsilon",
]
