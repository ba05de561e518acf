"""Measurement schedules, exact correlators, and the adroitness battery.

A schedule is a list of timed two-outcome measurements on one driven qubit.
Correlators are evaluated in the transfer-matrix picture without ever
enumerating outcome histories: for an involution ``Q`` the outcome-weighted
post-measurement state is ``sum_s s P_s rho P_s = {Q, rho}/2``, so a
two-point correlator is

    <Q_a Q_b> = Tr[Q_b * C({Q_a, rho_a}/2)]

where ``rho_a`` is the input state evolved to ``t_a`` through the
unconditioned measurement channels of every *included* event before ``a``,
and ``C`` carries the propagators and the included measurement channels
between ``a`` and ``b``.  Excluded stretches of time are covered by a single
propagator over the whole gap.

The boxed protocol interleaves a block of alternating measurements between
the first and second correlator slots; its Leggett-Garg quantity is

    lg = 1 + <Q1 Q2> + <Q2 Q3> + <Q1 Q3>'

with the primed correlator taken *without* the second measurement while the
block stays in place.  With ideal dynamics this reduces to
``1 + cos^(2n+2)(theta) + 2 cos(theta)``, which goes negative past an onset
angle once ``n >= 1``.

The adroitness battery quantifies measurement back-action on statistics: for
a three-event schedule whose middle event is tagged as the probe,

    epsilon = sum_{s1,s3} | P(s1,s3 | probe kept) - P(s1,s3 | probe removed) |

and the battery sums this over four probe placements.  Under dephasing noise
the battery's total feeds the softened bound ``lg >= -eps_total``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import LindbladSpec, lindblad_propagator
from .qubit import ATOL, DensityOperator, Observable, pauli, sigma_theta

__all__ = [
    "EVENT_TAGS",
    "MeasurementEvent",
    "ExperimentSchedule",
    "CorrelatorSet",
    "AdroitnessReport",
    "Verdict",
    "build_protocol_schedule",
    "classic_lg",
    "correlator_exact",
    "lg_quantity",
    "joint_distribution",
    "adroitness_experiments",
    "epsilon_adroitness",
    "epsilon_total",
    "adroitness_report",
    "violation_verdict",
]

EVENT_TAGS = ("Q1", "Q2", "Q3", "boxed", "probe")

_PROB_TOL = 1e-10  # joint distributions must sum to 1 this tightly


@dataclass(frozen=True, eq=False)
class MeasurementEvent:
    """One projective measurement at an absolute time."""

    time: float
    observable: Observable
    tag: str

    def __post_init__(self):
        t = float(self.time)
        if not (t >= 0.0 and math.isfinite(t)):
            raise ValueError(f"event time must be nonnegative and finite, got {self.time}")
        object.__setattr__(self, "time", t)
        if not isinstance(self.observable, Observable):
            raise ValueError("observable must be an Observable")
        if self.tag not in EVENT_TAGS:
            raise ValueError(f"tag must be one of {EVENT_TAGS}, got {self.tag!r}")


@dataclass(frozen=True, eq=False)
class ExperimentSchedule:
    """Timed measurements, the dynamics between them, and the input state."""

    events: tuple[MeasurementEvent, ...]
    dynamics: LindbladSpec
    initial_state: DensityOperator

    def __post_init__(self):
        events = tuple(self.events)
        if not events:
            raise ValueError("schedule needs at least one event")
        for a, b in zip(events, events[1:]):
            if not (b.time > a.time):
                raise ValueError(
                    f"event times must be strictly increasing, got {a.time} then {b.time}"
                )
        if not isinstance(self.dynamics, LindbladSpec):
            raise ValueError("dynamics must be a LindbladSpec")
        if not isinstance(self.initial_state, DensityOperator):
            raise ValueError("initial_state must be a DensityOperator")
        object.__setattr__(self, "events", events)

    def index_of(self, tag: str) -> int:
        """Index of the unique event with this tag (ValueError otherwise)."""
        hits = [k for k, ev in enumerate(self.events) if ev.tag == tag]
        if len(hits) != 1:
            raise ValueError(f"schedule has {len(hits)} events tagged {tag!r}, need exactly 1")
        return hits[0]


class Verdict(str, enum.Enum):
    """Classification of one evaluated configuration.

    ``VIOLATES_STRICT`` means lg < -eps_total (broken even after granting the
    measured back-action as slack); ``VIOLATES_LENIENT`` means lg < 0 but not
    below -eps_total; ``NO_VIOLATION`` means lg >= 0.
    """

    VIOLATES_STRICT = "violates_strict"
    VIOLATES_LENIENT = "violates_lenient"
    NO_VIOLATION = "no_violation"


def violation_verdict(lg: float, eps_total: float) -> Verdict:
    """Classify a Leggett-Garg value against both readings of the bound."""
    if not math.isfinite(lg):
        raise ValueError(f"lg must be finite, got {lg}")
    if not (eps_total >= 0.0 and math.isfinite(eps_total)):
        raise ValueError(f"eps_total must be nonnegative and finite, got {eps_total}")
    if lg < -eps_total:
        return Verdict.VIOLATES_STRICT
    if lg < 0.0:
        return Verdict.VIOLATES_LENIENT
    return Verdict.NO_VIOLATION


@dataclass(frozen=True)
class CorrelatorSet:
    """The three protocol correlators; ``lg_quantity`` derives from them."""

    c12: float
    c23: float
    c13_prime: float

    def __post_init__(self):
        for name in ("c12", "c23", "c13_prime"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            if abs(v) > 1.0 + 1e-9:
                raise ValueError(f"{name} must lie in [-1, 1], got {v}")
            object.__setattr__(self, name, v)

    @property
    def lg_quantity(self) -> float:
        return 1.0 + self.c12 + self.c23 + self.c13_prime


@dataclass(frozen=True)
class AdroitnessReport:
    """Per-experiment adroitness of one battery evaluation.

    ``entries`` pairs experiment ids ("a".."d") with their epsilon values in
    battery order; ``epsilon_total`` is their sum.
    """

    theta: float
    tau: float
    gamma: float
    omega: float
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        for eid, eps in self.entries:
            if not (0.0 <= eps <= 2.0 + 1e-9):
                raise ValueError(
                    f"epsilon for experiment {eid!r} must lie in [0, 2], got {eps}"
                )

    @property
    def epsilon_total(self) -> float:
        return float(sum(eps for _, eps in self.entries))


# ---------------------------------------------------------------------------
# schedule builders


def build_protocol_schedule(
    theta: float,
    n: int,
    tau: float,
    dynamics: LindbladSpec,
    initial_state: DensityOperator | None = None,
) -> ExperimentSchedule:
    """The boxed three-correlator schedule.

    Events sit at ``tau, 2*tau, ..., (2n+4)*tau``: ``sigma_theta`` first,
    then the box (alternating sz / sigma_theta, ``2n+1`` events starting and
    ending with sz), ``sigma_theta`` again, and finally sz.  ``n = 0`` is
    accepted and gives the single-event box; that configuration is a control,
    its Leggett-Garg quantity is ``(1 + cos(theta))^2 >= 0`` under ideal
    dynamics, so no violation is possible there.
    """
    if n != int(n) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n}")
    n = int(n)
    tau = float(tau)
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValueError(f"tau must be positive and finite, got {tau}")
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")

    qt = sigma_theta(theta)
    qz = pauli("z")
    events = [MeasurementEvent(tau, qt, "Q1")]
    for k in range(2 * n + 1):
        obs = qz if k % 2 == 0 else qt
        events.append(MeasurementEvent((k + 2) * tau, obs, "boxed"))
    events.append(MeasurementEvent((2 * n + 3) * tau, qt, "Q2"))
    events.append(MeasurementEvent((2 * n + 4) * tau, qz, "Q3"))
    rho0 = initial_state if initial_state is not None else DensityOperator.maximally_mixed()
    return ExperimentSchedule(tuple(events), dynamics, rho0)


def adroitness_experiments(
    theta: float, tau: float, dynamics: LindbladSpec
) -> tuple[ExperimentSchedule, ...]:
    """The four-experiment probe battery at times ``tau, 2*tau, 3*tau``.

    Each schedule has a first measurement, a probe, and a third measurement;
    the four combinations place sz and ``sigma_theta`` so that every probe
    basis appears against every outer-pair arrangement:

        a: sigma_theta, sigma_theta, sz
        b: sigma_theta, sz,          sz
        c: sz,          sz,          sigma_theta
        d: sz,          sigma_theta, sigma_theta
    """
    tau = float(tau)
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValueError(f"tau must be positive and finite, got {tau}")
    qt = sigma_theta(float(theta))
    qz = pauli("z")
    combos = ((qt, qt, qz), (qt, qz, qz), (qz, qz, qt), (qz, qt, qt))
    rho0 = DensityOperator.maximally_mixed()
    out = []
    for first, probe, third in combos:
        events = (
            MeasurementEvent(tau, first, "Q1"),
            MeasurementEvent(2.0 * tau, probe, "probe"),
            MeasurementEvent(3.0 * tau, third, "Q3"),
        )
        out.append(ExperimentSchedule(events, dynamics, rho0))
    return tuple(out)


# ---------------------------------------------------------------------------
# exact evaluation on Pauli coefficients


def _ptm(spec: LindbladSpec, dt: float) -> np.ndarray | None:
    return None if dt == 0.0 else lindblad_propagator(spec, dt).ptm


def _half_anticommutator(q: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Coefficients of ``{Q, X}/2`` from coefficient vectors."""
    out = np.empty(4)
    out[0] = q[0] * x[0] + q[1] * x[1] + q[2] * x[2] + q[3] * x[3]
    out[1:] = q[0] * x[1:] + x[0] * q[1:]
    return out


def _measured(q: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply the unconditioned measurement channel of an involution."""
    if abs(abs(q[0]) - 1.0) <= ATOL:
        return x
    out = x.copy()
    proj = q[1] * x[1] + q[2] * x[2] + q[3] * x[3]
    out[1] = proj * q[1]
    out[2] = proj * q[2]
    out[3] = proj * q[3]
    return out


def _included_indices(schedule: ExperimentSchedule, i: int, j: int, include_intermediate: bool):
    if include_intermediate:
        return set(range(j + 1))
    return {i, j}


def correlator_exact(
    schedule: ExperimentSchedule,
    first: str = "Q1",
    second: str = "Q2",
    include_intermediate: bool = True,
) -> float:
    """Two-point correlator ``<Q_first Q_second>`` for tagged events.

    With ``include_intermediate=False`` every other event is removed from the
    run entirely (no measurement channel), and each removed stretch of time
    is covered by one propagator; this is the primed-correlator semantics.
    """
    i = schedule.index_of(first)
    j = schedule.index_of(second)
    if i >= j:
        raise ValueError(f"{first!r} must come before {second!r} in the schedule")
    included = _included_indices(schedule, i, j, include_intermediate)
    spec = schedule.dynamics

    x = schedule.initial_state.coefficients.copy()
    t = 0.0
    y = None
    for k, ev in enumerate(schedule.events[: j + 1]):
        if k not in included:
            continue
        g = _ptm(spec, ev.time - t)
        t = ev.time
        if g is not None:
            x = g @ x
            if y is not None:
                y = g @ y
        q = ev.observable.coefficients
        if k == i:
            y = _half_anticommutator(q, x)
        elif k == j:
            return float(2.0 * (q @ y))
        else:
            x = _measured(q, x)
            if y is not None:
                y = _measured(q, y)
    raise AssertionError("unreachable: second event is always visited")


def lg_quantity(schedule: ExperimentSchedule) -> CorrelatorSet:
    """All three protocol correlators of a Q1/Q2/Q3 schedule in one pass.

    ``c12`` and ``c23`` keep every event in place; ``c13_prime`` keeps only
    Q1 and Q3, bridging the gap with a single propagator.  Equal to three
    ``correlator_exact`` calls, just cheaper on long boxes.
    """
    i1 = schedule.index_of("Q1")
    i2 = schedule.index_of("Q2")
    i3 = schedule.index_of("Q3")
    if not (i1 < i2 < i3):
        raise ValueError("schedule must order Q1 before Q2 before Q3")
    spec = schedule.dynamics
    events = schedule.events

    x = schedule.initial_state.coefficients.copy()
    t = 0.0
    y = z = None
    c12 = c23 = None
    for k, ev in enumerate(events[: i3 + 1]):
        g = _ptm(spec, ev.time - t)
        t = ev.time
        if g is not None:
            x = g @ x
            if y is not None:
                y = g @ y
            if z is not None:
                z = g @ z
        q = ev.observable.coefficients
        if k == i1:
            y = _half_anticommutator(q, x)
            x = _measured(q, x)
        elif k == i2:
            c12 = float(2.0 * (q @ y))
            y = None
            z = _half_anticommutator(q, x)
            x = _measured(q, x)
        elif k == i3:
            c23 = float(2.0 * (q @ z))
        else:
            x = _measured(q, x)
            if y is not None:
                y = _measured(q, y)
            if z is not None:
                z = _measured(q, z)

    w = schedule.initial_state.coefficients.copy()
    g = _ptm(spec, events[i1].time)
    if g is not None:
        w = g @ w
    w = _half_anticommutator(events[i1].observable.coefficients, w)
    w = _ptm(spec, events[i3].time - events[i1].time) @ w
    c13 = float(2.0 * (events[i3].observable.coefficients @ w))
    return CorrelatorSet(c12=c12, c23=c23, c13_prime=c13)


def joint_distribution(
    schedule: ExperimentSchedule,
    first: str = "Q1",
    second: str = "Q3",
    include_intermediate: bool = True,
) -> np.ndarray:
    """Joint outcome distribution ``P[i, j]`` of two tagged events.

    Index 0 means outcome +1, index 1 means outcome -1.  Intermediate events
    act through their unconditioned channels when included and are removed
    entirely otherwise.  Both tagged observables must be traceless (a
    trivial ``+/- I`` event has a single outcome and no joint table).

    Raises ``ValueError`` if the resulting table fails to sum to 1 within
    1e-10, which would indicate a non-CPTP propagator upstream.
    """
    i = schedule.index_of(first)
    j = schedule.index_of(second)
    if i >= j:
        raise ValueError(f"{first!r} must come before {second!r} in the schedule")
    included = _included_indices(schedule, i, j, include_intermediate)
    spec = schedule.dynamics

    x = schedule.initial_state.coefficients.copy()
    t = 0.0
    for k, ev in enumerate(schedule.events[:i]):
        if k not in included:
            continue
        g = _ptm(spec, ev.time - t)
        t = ev.time
        if g is not None:
            x = g @ x
        x = _measured(ev.observable.coefficients, x)
    g = _ptm(spec, schedule.events[i].time - t)
    if g is not None:
        x = g @ x

    q1 = schedule.events[i].observable.bloch_axis
    q2 = schedule.events[j].observable.bloch_axis
    table = np.empty((2, 2))
    for row, s1 in enumerate((1.0, -1.0)):
        amp = x[0] + s1 * (q1 @ x[1:])
        w = np.empty(4)
        w[0] = 0.5 * amp
        w[1:] = 0.5 * s1 * amp * q1
        t_branch = schedule.events[i].time
        for k in range(i + 1, j):
            if k not in included:
                continue
            ev = schedule.events[k]
            g = _ptm(spec, ev.time - t_branch)
            t_branch = ev.time
            if g is not None:
                w = g @ w
            w = _measured(ev.observable.coefficients, w)
        g = _ptm(spec, schedule.events[j].time - t_branch)
        if g is not None:
            w = g @ w
        for col, s3 in enumerate((1.0, -1.0)):
            table[row, col] = w[0] + s3 * (q2 @ w[1:])

    total = table.sum()
    if abs(total - 1.0) > _PROB_TOL:
        raise ValueError(f"joint distribution sums to {total!r}, expected 1")
    return table


def epsilon_adroitness(schedule: ExperimentSchedule) -> float:
    """Back-action of the probe on the outer pair's joint statistics.

    L1 distance between the two-outcome joint distributions with the probe's
    channel kept versus the probe removed from the run.
    """
    schedule.index_of("probe")
    with_probe = joint_distribution(schedule, "Q1", "Q3", include_intermediate=True)
    without = joint_distribution(schedule, "Q1", "Q3", include_intermediate=False)
    return float(np.abs(with_probe - without).sum())


def epsilon_total(theta: float, tau: float, dynamics: LindbladSpec) -> float:
    """Summed adroitness over the four-experiment battery."""
    return float(
        sum(epsilon_adroitness(s) for s in adroitness_experiments(theta, tau, dynamics))
    )


def adroitness_report(theta: float, tau: float, dynamics: LindbladSpec) -> AdroitnessReport:
    """Battery evaluation with per-experiment resolution."""
    ids = ("a", "b", "c", "d")
    entries = tuple(
        (eid, epsilon_adroitness(s))
        for eid, s in zip(ids, adroitness_experiments(theta, tau, dynamics))
    )
    return AdroitnessReport(
        theta=float(theta),
        tau=float(tau),
        gamma=dynamics.gamma,
        omega=dynamics.hamiltonian.omega,
        entries=entries,
    )


def classic_lg(omega: float = 1.0) -> CorrelatorSet:
    """The textbook three-time test: sz at 0, tau, 2*tau with tau = 3*pi/(4*omega).

    Uses the half-convention drive (``H = omega sx / 2``) so each gap rotates
    the Bloch sphere by 3*pi/4; the result is ``lg = 1 - sqrt(2)``, the
    maximal qubit violation.  No box and no probes are involved, so the
    lenient reading of the bound is the applicable one.
    """
    spec = LindbladSpec.closed(omega, half=True)
    tau = 3.0 * math.pi / (4.0 * spec.hamiltonian.omega)
    qz = pauli("z")
    events = (
        MeasurementEvent(0.0, qz, "Q1"),
        MeasurementEvent(tau, qz, "Q2"),
        MeasurementEvent(2.0 * tau, qz, "Q3"),
    )
    schedule = ExperimentSchedule(events, spec, DensityOperator.maximally_mixed())
    return lg_quantity(schedule)
