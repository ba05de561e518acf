"""Grid sweeps, violation windows, and noise cutoffs."""

import math

import numpy as np
import pytest

from lgsim.dynamics import HamiltonianSpec, LindbladSpec
from lgsim.protocol import Verdict, build_protocol_schedule, epsilon_total, lg_quantity
from lgsim.sweeps import (
    SWEEP_COLUMNS,
    SweepRecord,
    gamma_cutoff,
    lg_curve,
    sweep_records,
    violation_window,
)


def test_curve_matches_exact_engine():
    thetas = np.linspace(0.1, 3.0, 23)
    curve = lg_curve(thetas, n=1, gamma=0.002, tau=math.pi)
    spec = LindbladSpec(HamiltonianSpec(1.0), 0.002)
    for k, theta in enumerate(thetas):
        cs = lg_quantity(build_protocol_schedule(float(theta), 1, math.pi, spec))
        assert curve.c12[k] == pytest.approx(cs.c12, abs=1e-12)
        assert curve.c23[k] == pytest.approx(cs.c23, abs=1e-12)
        assert curve.c13_prime[k] == pytest.approx(cs.c13_prime, abs=1e-12)
        assert curve.lg[k] == pytest.approx(cs.lg_quantity, abs=1e-12)
        assert curve.eps_total[k] == pytest.approx(
            epsilon_total(float(theta), math.pi, spec), abs=1e-12
        )


def test_curve_argument_validation():
    with pytest.raises(ValueError, match="tau must be positive"):
        lg_curve(np.array([0.5]), 1, 0.0, 0.0)
    with pytest.raises(ValueError, match="one dimensional"):
        lg_curve(np.ones((2, 2)), 1, 0.0, math.pi)


def test_sweep_row_order_and_columns():
    thetas = np.array([0.2, 1.4])
    rows = sweep_records(thetas, gammas=[0.0, 0.005], ns=[0, 1], tau=math.pi, omega=1.0)
    assert len(rows) == 8
    key = [(r.n, r.gamma, r.theta) for r in rows]
    assert key == sorted(key)
    assert set(SWEEP_COLUMNS) == {
        "theta",
        "gamma",
        "n",
        "c12",
        "c23",
        "c13_prime",
        "lg_quantity",
        "eps_total",
        "verdict",
    }


def test_parallel_sweep_matches_serial():
    thetas = np.linspace(0.1, 3.0, 9)
    kwargs = dict(gammas=[0.0, 0.004, 0.009], ns=[1, 2], tau=math.pi, omega=1.0)
    serial = sweep_records(thetas, **kwargs)
    parallel = sweep_records(thetas, workers=3, **kwargs)
    assert serial == parallel


def test_sweep_worker_validation():
    with pytest.raises(ValueError, match="workers"):
        sweep_records(np.array([0.5]), [0.0], [1], math.pi, 1.0, workers=0)


def test_sweep_record_validation():
    ok = dict(
        theta=0.5,
        gamma=0.0,
        n=1,
        c12=0.2,
        c23=-0.6,
        c13_prime=-0.7,
        lg_quantity=-0.1,
        eps_total=0.0,
        verdict=Verdict.VIOLATES_STRICT,
    )
    SweepRecord(**ok)
    with pytest.raises(ValueError, match="inconsistent with correlators"):
        SweepRecord(**{**ok, "lg_quantity": -0.2})
    with pytest.raises(ValueError, match="verdict"):
        SweepRecord(**{**ok, "verdict": Verdict.NO_VIOLATION})
    with pytest.raises(ValueError, match="eps_total"):
        SweepRecord(**{**ok, "eps_total": -1.0, "verdict": Verdict.VIOLATES_LENIENT})


def test_verdicts_in_swept_rows_are_consistent():
    rows = sweep_records(np.linspace(0.05, 3.1, 31), [0.0, 0.01], [1], math.pi, 1.0)
    for r in rows:
        if r.verdict is Verdict.VIOLATES_STRICT:
            assert r.lg_quantity < -r.eps_total
        elif r.verdict is Verdict.VIOLATES_LENIENT:
            assert -r.eps_total <= r.lg_quantity < 0.0
        else:
            assert r.lg_quantity >= 0.0


# ---------------------------------------------------------------------------
# violation window


def test_ideal_onset_for_one_boxed_measurement():
    win = violation_window(n=1, gamma=0.0, tau=math.pi, omega=1.0)
    assert win.criterion == "lenient"
    assert win.lo / math.pi == pytest.approx(0.682973047, abs=1e-6)
    # the ideal violation only closes at theta = pi itself, where the
    # quantity touches zero; the bisected edge lands within the refinement
    # tolerance of pi and its bracket reaches the endpoint
    assert win.hi == pytest.approx(math.pi, abs=5e-6)
    assert win.hi_bracket[1] == math.pi
    assert win.lo_bracket[0] <= win.lo <= win.lo_bracket[1]
    assert win.width == pytest.approx(win.hi - win.lo)


def test_window_absent_for_the_control():
    # n = 0 never violates: the quantity is a perfect square
    assert violation_window(n=0, gamma=0.0, tau=math.pi, omega=1.0) is None


def test_window_none_when_noise_washes_it_out():
    assert violation_window(n=1, gamma=0.05, tau=math.pi, omega=1.0) is None


def test_window_shrinks_with_noise():
    widths = []
    for gamma in (0.0, 0.004, 0.008):
        win = violation_window(n=1, gamma=gamma, tau=math.pi, omega=1.0)
        assert win is not None
        widths.append(win.width)
    assert widths[0] > widths[1] > widths[2]


def test_strict_window_is_narrower():
    lenient = violation_window(n=1, gamma=0.004, tau=math.pi, omega=1.0)
    strict = violation_window(n=1, gamma=0.004, tau=math.pi, omega=1.0, criterion="strict")
    assert strict.lo >= lenient.lo
    assert strict.width < lenient.width


def test_window_validation():
    with pytest.raises(ValueError, match="criterion must be one of"):
        violation_window(1, 0.0, math.pi, 1.0, criterion="both")
    with pytest.raises(ValueError, match="coarse_points"):
        violation_window(1, 0.0, math.pi, 1.0, coarse_points=2)


# ---------------------------------------------------------------------------
# gamma cutoff


def test_gamma_cutoffs_pin_reference_values():
    lenient = gamma_cutoff(n=1, tau=math.pi, omega=1.0, criterion="lenient")
    strict = gamma_cutoff(n=1, tau=math.pi, omega=1.0, criterion="strict")
    assert lenient == pytest.approx(0.011193710193037987, abs=1e-6)
    assert strict == pytest.approx(0.009349830076098442, abs=1e-6)
    assert strict < lenient


def test_gamma_cutoff_brackets_the_window_collapse():
    cut = gamma_cutoff(n=1, tau=math.pi, omega=1.0, criterion="lenient")
    assert violation_window(1, cut * 0.98, math.pi, 1.0) is not None
    assert violation_window(1, cut * 1.02, math.pi, 1.0) is None


def test_gamma_cutoff_undefined_for_the_control():
    with pytest.raises(ValueError, match="no violation at gamma=0"):
        gamma_cutoff(n=0, tau=math.pi, omega=1.0, criterion="lenient")
