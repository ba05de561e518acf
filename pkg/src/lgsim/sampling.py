"""Outcome-level views of a schedule: exact enumeration and Monte Carlo.

The enumeration path walks the binary tree of measurement records on
unnormalized 2x2 density matrices, applying Lueders projectors directly.  It
shares no state-update code with the transfer-matrix correlator engine, so
the two can check each other; it is exponential in the number of events and
refuses schedules with more than 20 included measurements.

The Monte Carlo path samples one outcome record per shot.  Conditional
states of this protocol are always fully determined by their Bloch vector,
and a projective two-outcome measurement collapses onto ``+/- q``, so a shot
is a short recurrence: evolve the Bloch vector through the gap (affine map
taken from the propagator's transfer matrix), compute ``p(+1) = (1+q.r)/2``,
compare against a uniform draw, collapse.  Shots are embarrassingly
parallel.

Randomness is counter based: shot block ``j`` of a run with seed ``s`` draws
its uniforms from a Philox generator keyed ``(s, j)``, with a fixed block
size of 2**16 shots.  The stream for any shot therefore depends only on
``(seed, shot index)``, never on how the work is executed, and identical
``(schedule, mask, shots, seed)`` inputs give bit-identical records on both
the accelerated and fallback kernel paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .dynamics import lindblad_propagator
from .protocol import ExperimentSchedule

__all__ = [
    "BLOCK_SHOTS",
    "OutcomeTrajectory",
    "TrajectoryRecords",
    "EstimateWithError",
    "AdroitnessEstimate",
    "enumerate_outcomes",
    "enumerated_correlator",
    "enumerated_joint",
    "sample_trajectories",
    "estimate_correlator",
    "estimate_joint_distribution",
    "estimate_adroitness",
]

BLOCK_SHOTS = 1 << 16
_PRUNE_TOL = 1e-14
_MAX_ENUM_EVENTS = 20
_PROB_TOL = 1e-10


@dataclass(frozen=True)
class OutcomeTrajectory:
    """One complete measurement record and its exact probability."""

    outcomes: tuple[int, ...]
    probability: float

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.outcomes):
            raise ValueError(f"outcomes must be +1/-1, got {self.outcomes}")
        if not (0.0 <= self.probability <= 1.0 + 1e-12):
            raise ValueError(f"probability out of range: {self.probability}")


@dataclass(frozen=True, eq=False)
class TrajectoryRecords:
    """Sampled outcome records for the included events of one schedule.

    ``outcomes[s, k]`` is the +1/-1 result of the k-th included event in shot
    ``s``; ``tags`` and ``times`` describe the included events in order.
    """

    outcomes: np.ndarray
    tags: tuple[str, ...]
    times: tuple[float, ...]
    mask: tuple[bool, ...]
    seed: int

    def __post_init__(self):
        arr = np.asarray(self.outcomes, dtype=np.int8)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError(f"outcomes must be a (shots, events) array, got {arr.shape}")
        if arr.shape[1] != len(self.tags) or len(self.tags) != len(self.times):
            raise ValueError("tags/times must match the outcome columns")
        if not np.all(np.abs(arr) == 1):
            raise ValueError("outcomes must be +1/-1")
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)
        object.__setattr__(self, "tags", tuple(self.tags))
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "mask", tuple(bool(b) for b in self.mask))

    @property
    def shots(self) -> int:
        return self.outcomes.shape[0]

    def tag_index(self, tag: str) -> int:
        hits = [k for k, t in enumerate(self.tags) if t == tag]
        if len(hits) != 1:
            raise ValueError(f"records have {len(hits)} columns tagged {tag!r}, need exactly 1")
        return hits[0]

    def column(self, tag: str) -> np.ndarray:
        return self.outcomes[:, self.tag_index(tag)]


@dataclass(frozen=True)
class EstimateWithError:
    """Sample mean with its standard error (sample std / sqrt(samples))."""

    mean: float
    standard_error: float
    samples: int

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not (self.standard_error >= 0.0 and math.isfinite(self.standard_error)):
            raise ValueError(f"standard error must be >= 0, got {self.standard_error}")


@dataclass(frozen=True, eq=False)
class AdroitnessEstimate:
    """Monte Carlo estimate of one experiment's adroitness.

    ``epsilon`` is the L1 distance between the estimated joint tables with
    and without the probe.  Note the absolute values make this estimator
    biased upward when the true cell differences are near zero, so criterion
    decisions should use the exact battery; this estimate is a cross-check.
    ``cell_standard_errors`` are per-cell binomial SEs of the difference.
    """

    epsilon: float
    p_with: np.ndarray
    p_without: np.ndarray
    cell_standard_errors: np.ndarray
    samples_with: int
    samples_without: int


def _resolve_mask(schedule: ExperimentSchedule, mask: Sequence[bool] | None) -> list[int]:
    if mask is None:
        return list(range(len(schedule.events)))
    mask = list(mask)
    if len(mask) != len(schedule.events):
        raise ValueError(
            f"mask length {len(mask)} does not match event count {len(schedule.events)}"
        )
    included = [k for k, keep in enumerate(mask) if keep]
    if not included:
        raise ValueError("mask excludes every event")
    return included


def enumerate_outcomes(
    schedule: ExperimentSchedule, mask: Sequence[bool] | None = None
) -> list[OutcomeTrajectory]:
    """All outcome records of the included events with exact probabilities.

    Branches are explored depth first with the +1 outcome first, so the
    result order is fixed.  Subtrees whose probability falls below 1e-14 are
    pruned.  The surviving probabilities must sum to 1 within 1e-10 or a
    ``ValueError`` is raised.  Schedules with more than 20 included events
    are refused (the tree would have over 2**20 leaves).
    """
    included = _resolve_mask(schedule, mask)
    if len(included) > _MAX_ENUM_EVENTS:
        raise ValueError(
            f"enumeration over {len(included)} events is refused (limit {_MAX_ENUM_EVENTS})"
        )
    spec = schedule.dynamics
    results: list[OutcomeTrajectory] = []

    def walk(pos: int, t: float, rho: np.ndarray, history: tuple[int, ...]) -> None:
        if pos == len(included):
            results.append(OutcomeTrajectory(history, float(np.real(np.trace(rho)))))
            return
        ev = schedule.events[included[pos]]
        if ev.time > t:
            rho = lindblad_propagator(spec, ev.time - t)(rho)
        for s in (1, -1):
            proj = ev.observable.projector(s)
            branch = proj @ rho @ proj
            if float(np.real(np.trace(branch))) < _PRUNE_TOL:
                continue
            walk(pos + 1, ev.time, branch, history + (s,))

    walk(0, 0.0, schedule.initial_state.matrix, ())
    total = sum(tr.probability for tr in results)
    if abs(total - 1.0) > _PROB_TOL:
        raise ValueError(f"enumerated probabilities sum to {total!r}, expected 1")
    return results


def enumerated_correlator(
    trajectories: Sequence[OutcomeTrajectory], a: int, b: int
) -> float:
    """``<s_a s_b>`` over enumerated records (positions index the outcome tuple)."""
    return float(sum(t.probability * t.outcomes[a] * t.outcomes[b] for t in trajectories))


def enumerated_joint(trajectories: Sequence[OutcomeTrajectory], a: int, b: int) -> np.ndarray:
    """Joint table ``P[i, j]`` of positions ``a`` and ``b`` (0 = +1, 1 = -1)."""
    table = np.zeros((2, 2))
    for t in trajectories:
        table[(1 - t.outcomes[a]) // 2, (1 - t.outcomes[b]) // 2] += t.probability
    return table


def _philox_uniforms(seed: int, block: int, shots: int, events: int) -> np.ndarray:
    key = np.array([seed, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random((shots, events))


def sample_trajectories(
    schedule: ExperimentSchedule,
    shots: int,
    seed: int,
    mask: Sequence[bool] | None = None,
) -> TrajectoryRecords:
    """Draw ``shots`` outcome records of the included events.

    Every included observable must be traceless (have a measurement axis).
    Excluded events are removed from the run entirely, matching the exact
    engine's primed semantics: one propagator bridges each removed stretch.
    """
    if shots != int(shots) or shots < 1:
        raise ValueError(f"shots must be a positive integer, got {shots}")
    shots = int(shots)
    if seed != int(seed) or not (0 <= int(seed) < 2**64):
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed}")
    seed = int(seed)
    included = _resolve_mask(schedule, mask)
    spec = schedule.dynamics

    k = len(included)
    lin = np.empty((k, 3, 3))
    aff = np.empty((k, 3))
    axes = np.empty((k, 3))
    t = 0.0
    for col, idx in enumerate(included):
        ev = schedule.events[idx]
        ptm = np.eye(4) if ev.time == t else lindblad_propagator(spec, ev.time - t).ptm
        t = ev.time
        # normalized conditional states have Pauli coefficients (1/2, r/2),
        # so on Bloch vectors the propagator acts as r -> ptm[1:,0] + M r
        lin[col] = ptm[1:, 1:]
        aff[col] = ptm[1:, 0]
        axes[col] = ev.observable.bloch_axis
    r0 = schedule.initial_state.bloch_vector

    out = np.empty((shots, k), dtype=np.int8)
    for block, start in enumerate(range(0, shots, BLOCK_SHOTS)):
        size = min(BLOCK_SHOTS, shots - start)
        u = _philox_uniforms(seed, block, size, k)
        _kernels.sample_paths(u, lin, aff, axes, r0, out[start : start + size])

    full_mask = [False] * len(schedule.events)
    for idx in included:
        full_mask[idx] = True
    return TrajectoryRecords(
        outcomes=out,
        tags=tuple(schedule.events[i].tag for i in included),
        times=tuple(schedule.events[i].time for i in included),
        mask=tuple(full_mask),
        seed=seed,
    )


def estimate_correlator(
    records: TrajectoryRecords, first: str = "Q1", second: str = "Q2"
) -> EstimateWithError:
    """Sample correlator of two tagged columns.

    The standard error is the sample standard deviation (ddof=1) of the per-
    shot products divided by sqrt(shots); a single shot gets SE 0.  Constant
    products (all shots agree) also give SE 0.
    """
    prod = records.column(first).astype(np.float64) * records.column(second)
    n = prod.shape[0]
    se = float(prod.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return EstimateWithError(mean=float(prod.mean()), standard_error=se, samples=n)


def estimate_joint_distribution(
    records: TrajectoryRecords, first: str = "Q1", second: str = "Q3"
) -> np.ndarray:
    """Estimated joint table ``P[i, j]`` of two tagged columns (0 = +1, 1 = -1)."""
    a = records.column(first)
    b = records.column(second)
    table = np.empty((2, 2))
    for i, sa in enumerate((1, -1)):
        for j, sb in enumerate((1, -1)):
            table[i, j] = np.count_nonzero((a == sa) & (b == sb))
    return table / records.shots


def estimate_adroitness(
    with_probe: TrajectoryRecords, without_probe: TrajectoryRecords
) -> AdroitnessEstimate:
    """Adroitness estimate from two sampled runs of the same experiment."""
    pw = estimate_joint_distribution(with_probe, "Q1", "Q3")
    pn = estimate_joint_distribution(without_probe, "Q1", "Q3")
    sw = with_probe.shots
    sn = without_probe.shots
    se = np.sqrt(pw * (1.0 - pw) / sw + pn * (1.0 - pn) / sn)
    return AdroitnessEstimate(
        epsilon=float(np.abs(pw - pn).sum()),
        p_with=pw,
        p_without=pn,
        cell_standard_errors=se,
        samples_with=sw,
        samples_without=sn,
    )
