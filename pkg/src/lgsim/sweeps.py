"""Grid evaluation over protocol parameters, violation windows, noise cutoffs.

Everything here runs on the kernel layer, so a 10^4-point theta grid is one
call, and a gamma bisection is a few dozen of them.  Row order of sweep
output is a pure function of the requested grids (n outermost, then gamma,
then theta); worker threads only parallelise the per-(n, gamma) curve
evaluations and never reorder rows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _kernels
from .dynamics import HamiltonianSpec, LindbladSpec, lindblad_propagator
from .protocol import Verdict, violation_verdict

__all__ = [
    "SWEEP_COLUMNS",
    "CurveArrays",
    "SweepRecord",
    "ViolationWindow",
    "lg_curve",
    "sweep_records",
    "violation_window",
    "gamma_cutoff",
]

SWEEP_COLUMNS = (
    "theta",
    "gamma",
    "n",
    "c12",
    "c23",
    "c13_prime",
    "lg_quantity",
    "eps_total",
    "verdict",
)

_CRITERIA = ("lenient", "strict")


class CurveArrays(NamedTuple):
    """Vectorized protocol evaluation over one theta grid."""

    c12: np.ndarray
    c23: np.ndarray
    c13_prime: np.ndarray
    lg: np.ndarray
    eps_total: np.ndarray


@dataclass(frozen=True)
class SweepRecord:
    """One fully evaluated grid point.

    ``lg_quantity`` must equal ``1 + c12 + c23 + c13_prime`` within 1e-12 and
    ``verdict`` must match ``violation_verdict(lg_quantity, eps_total)``;
    both are revalidated on construction so a corrupted table cannot be
    parsed back silently.
    """

    theta: float
    gamma: float
    n: int
    c12: float
    c23: float
    c13_prime: float
    lg_quantity: float
    eps_total: float
    verdict: Verdict

    def __post_init__(self):
        for name in ("theta", "gamma", "c12", "c23", "c13_prime", "lg_quantity", "eps_total"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "verdict", Verdict(self.verdict))
        expected = 1.0 + self.c12 + self.c23 + self.c13_prime
        if abs(self.lg_quantity - expected) > 1e-12:
            raise ValueError(
                f"lg_quantity {self.lg_quantity!r} inconsistent with correlators "
                f"(expected {expected!r})"
            )
        if not (self.eps_total >= 0.0 and math.isfinite(self.eps_total)):
            raise ValueError(f"eps_total must be nonnegative, got {self.eps_total}")
        if self.verdict is not violation_verdict(self.lg_quantity, self.eps_total):
            raise ValueError(
                f"verdict {self.verdict.value} inconsistent with lg={self.lg_quantity!r}, "
                f"eps_total={self.eps_total!r}"
            )


@dataclass(frozen=True)
class ViolationWindow:
    """Contiguous theta interval where the chosen criterion is violated.

    ``lo``/``hi`` are bisection midpoints; the brackets record the interval
    each edge is known to lie in.
    """

    lo: float
    hi: float
    lo_bracket: tuple[float, float]
    hi_bracket: tuple[float, float]
    criterion: str

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _check_criterion(criterion: str) -> str:
    if criterion not in _CRITERIA:
        raise ValueError(f"criterion must be one of {_CRITERIA}, got {criterion!r}")
    return criterion


def lg_curve(thetas, n: int, gamma: float, tau: float, omega: float = 1.0) -> CurveArrays:
    """Correlators, lg, and battery total for every theta in one kernel pass."""
    spec = LindbladSpec(HamiltonianSpec(omega), gamma)
    if not (tau > 0.0 and math.isfinite(tau)):
        raise ValueError(f"tau must be positive and finite, got {tau}")
    gap = lindblad_propagator(spec, float(tau)).ptm
    gap2 = lindblad_propagator(spec, 2.0 * float(tau)).ptm
    gap13 = lindblad_propagator(spec, (2 * int(n) + 3) * float(tau)).ptm
    c12, c23, c13p = _kernels.protocol_lg(thetas, n, gap, gap13)
    eps = _kernels.battery_eps(thetas, gap, gap2).sum(axis=1)
    lg = 1.0 + c12 + c23 + c13p
    return CurveArrays(c12=c12, c23=c23, c13_prime=c13p, lg=lg, eps_total=eps)


def sweep_records(
    thetas,
    gammas: Sequence[float],
    ns: Iterable[int],
    tau: float,
    omega: float = 1.0,
    workers: int = 1,
) -> list[SweepRecord]:
    """Evaluate the full (n, gamma, theta) grid into validated records."""
    thetas = np.asarray(thetas, dtype=float)
    gammas = [float(g) for g in gammas]
    ns = [int(n) for n in ns]
    if workers != int(workers) or workers < 1:
        raise ValueError(f"workers must be a positive integer, got {workers}")
    workers = int(workers)

    tasks = [(n, g) for n in ns for g in gammas]
    if workers == 1 or len(tasks) == 1:
        curves = {key: lg_curve(thetas, key[0], key[1], tau, omega) for key in tasks}
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                key: pool.submit(lg_curve, thetas, key[0], key[1], tau, omega)
                for key in tasks
            }
            curves = {key: fut.result() for key, fut in futures.items()}

    records = []
    for n in ns:
        for g in gammas:
            cur = curves[(n, g)]
            for i, theta in enumerate(thetas):
                lg = float(cur.lg[i])
                eps = float(cur.eps_total[i])
                records.append(
                    SweepRecord(
                        theta=float(theta),
                        gamma=g,
                        n=n,
                        c12=float(cur.c12[i]),
                        c23=float(cur.c23[i]),
                        c13_prime=float(cur.c13_prime[i]),
                        lg_quantity=lg,
                        eps_total=eps,
                        verdict=violation_verdict(lg, eps),
                    )
                )
    return records


def _margin_curve(thetas, n, gamma, tau, omega, criterion) -> np.ndarray:
    cur = lg_curve(thetas, n, gamma, tau, omega)
    if criterion == "strict":
        return cur.lg + cur.eps_total
    return cur.lg


def _margin_scalar(theta, n, gamma, tau, omega, criterion) -> float:
    return float(_margin_curve(np.array([theta]), n, gamma, tau, omega, criterion)[0])


def violation_window(
    n: int,
    gamma: float,
    tau: float,
    omega: float = 1.0,
    criterion: str = "lenient",
    coarse_points: int = 10001,
    refine: float = math.pi * 1e-6,
) -> ViolationWindow | None:
    """Locate the theta window in [0, pi] where the criterion is violated.

    A coarse grid finds the sign structure, then each edge is bisected until
    its bracket is narrower than ``refine``.  Returns None when no grid point
    violates.  The lenient criterion tests ``lg < 0``, the strict one
    ``lg < -eps_total``.
    """
    criterion = _check_criterion(criterion)
    if coarse_points < 3:
        raise ValueError(f"coarse_points must be at least 3, got {coarse_points}")
    grid = np.linspace(0.0, math.pi, int(coarse_points))
    margin = _margin_curve(grid, n, gamma, tau, omega, criterion)
    neg = margin < 0.0
    if not bool(neg.any()):
        return None
    first = int(np.argmax(neg))
    last = int(len(grid) - 1 - np.argmax(neg[::-1]))
    if first == 0:
        raise ValueError("violation extends to theta=0; no onset to bracket")

    def bisect(lo: float, hi: float) -> tuple[float, tuple[float, float]]:
        # invariant: margin(lo) >= 0 > margin(hi)
        while hi - lo > refine:
            mid = lo + 0.5 * (hi - lo)
            if _margin_scalar(mid, n, gamma, tau, omega, criterion) < 0.0:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi), (lo, hi)

    lo_edge, lo_bracket = bisect(float(grid[first - 1]), float(grid[first]))
    if last == len(grid) - 1:
        hi_edge, hi_bracket = float(grid[-1]), (float(grid[-1]), float(grid[-1]))
    else:
        # mirrored bisection: violating on the left, clean on the right
        lo, hi = float(grid[last]), float(grid[last + 1])
        while hi - lo > refine:
            mid = lo + 0.5 * (hi - lo)
            if _margin_scalar(mid, n, gamma, tau, omega, criterion) < 0.0:
                lo = mid
            else:
                hi = mid
        hi_edge, hi_bracket = 0.5 * (lo + hi), (lo, hi)
    return ViolationWindow(
        lo=lo_edge, hi=hi_edge, lo_bracket=lo_bracket, hi_bracket=hi_bracket, criterion=criterion
    )


def gamma_cutoff(
    n: int,
    tau: float,
    omega: float = 1.0,
    criterion: str = "lenient",
    gamma_hi: float = 0.05,
    tol: float = 1e-9,
    theta_points: int = 2001,
) -> float:
    """Smallest dephasing rate that closes the violation window.

    Bisects on the worst-case (minimum over theta) criterion margin.  Raises
    ``ValueError`` if there is no violation at gamma=0 (nothing to close) or
    if the window survives past gamma=1.
    """
    criterion = _check_criterion(criterion)
    grid = np.linspace(0.0, math.pi, int(theta_points))

    def worst(gamma: float) -> float:
        return float(_margin_curve(grid, n, gamma, tau, omega, criterion).min())

    if worst(0.0) >= 0.0:
        raise ValueError(f"no violation at gamma=0 for n={n}; cutoff undefined")
    lo = 0.0
    hi = float(gamma_hi)
    while worst(hi) < 0.0:
        hi *= 2.0
        if hi > 1.0:
            raise ValueError("violation window persists past gamma=1; no cutoff found")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if worst(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
