"""Command-line front end.

Commands
--------
fig2        violation curves over theta at gamma=0, one block per n
fig3        theta x gamma surface at fixed n, with both noise cutoffs
adroitness  the four-experiment probe battery, exact and optionally sampled
classic     the textbook three-time point of comparison
sweep       free-form (n, gamma, theta) grid

Grids are given as ``start:stop:steps`` (inclusive linspace), n as a comma
list.  A config file (``--config``) holds ``key=value`` lines with the same
keys as the long flags; flags override the file, the file overrides built-in
defaults.  The resolved configuration is echoed into the output as comment
lines so every table is self-describing.  CSV output puts comments on ``#``
lines; JSONL output puts them in a leading ``{"meta": ...}`` object.  Floats
are rendered with %.17g, so parsing a table back reproduces the records
bit for bit (``read_table`` / ``records_from_rows``).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import HamiltonianSpec, LindbladSpec
from .protocol import adroitness_experiments, adroitness_report, classic_lg
from .sampling import estimate_adroitness, sample_trajectories
from .sweeps import SWEEP_COLUMNS, SweepRecord, gamma_cutoff, sweep_records, violation_window

__all__ = [
    "ConfigError",
    "SweepConfig",
    "main",
    "read_table",
    "records_from_rows",
]

_PI_TEXT = "3.141592653589793"

_COMMANDS = ("fig2", "fig3", "adroitness", "classic", "sweep")

_BASE_DEFAULTS = {
    "omega": "1",
    "m": "1",
    "criterion": "lenient",
    "shots": "0",
    "seed": "7",
    "format": "csv",
    "out": "",
    "workers": "1",
}

_GRID_DEFAULTS = {
    "fig2": {"theta": f"0:{_PI_TEXT}:201", "gamma": "0:0:1", "n": "1,2,5,10"},
    "fig3": {"theta": f"0:{_PI_TEXT}:201", "gamma": "0:0.02:21", "n": "1"},
    "adroitness": {"theta": f"0:{_PI_TEXT}:9", "gamma": "0:0.004:3", "n": "1"},
    "classic": {"theta": f"0:{_PI_TEXT}:201", "gamma": "0:0:1", "n": "1"},
    "sweep": {"theta": f"0:{_PI_TEXT}:201", "gamma": "0:0:1", "n": "1"},
}

# keys whose resolved values each command actually consumes (echoed in output)
_USED_KEYS = {
    "fig2": ("theta", "gamma", "n", "omega", "m", "criterion", "workers", "format", "out"),
    "fig3": ("theta", "gamma", "n", "omega", "m", "criterion", "workers", "format", "out"),
    "adroitness": ("theta", "gamma", "omega", "m", "shots", "seed", "format", "out"),
    "classic": ("omega", "format", "out"),
    "sweep": ("theta", "gamma", "n", "omega", "m", "workers", "format", "out"),
}

_ALL_KEYS = ("theta", "gamma", "n") + tuple(_BASE_DEFAULTS)


class ConfigError(Exception):
    """Invalid configuration; rendered as one stderr line with exit code 2."""


def _f17(v: float) -> str:
    return format(float(v), ".17g")


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{where}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{where}: must be finite, got {text!r}")
    return v


def _parse_int(text: str, where: str, minimum: int | None = None) -> int:
    try:
        v = int(text, 10)
    except ValueError:
        raise ConfigError(f"{where}: not an integer: {text!r}") from None
    if minimum is not None and v < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {v}")
    return v


def _parse_range(text: str, where: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{where}: expected start:stop:steps, got {text!r}")
    start = _parse_float(parts[0], where)
    stop = _parse_float(parts[1], where)
    steps = _parse_int(parts[2], where, minimum=1)
    if start > stop:
        raise ConfigError(f"{where}: range start must not exceed stop, got {text!r}")
    if steps == 1 and start != stop:
        raise ConfigError(f"{where}: a single-step range needs start == stop, got {text!r}")
    return tuple(float(v) for v in np.linspace(start, stop, steps))


def _parse_n_list(text: str, where: str) -> tuple[int, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"{where}: need at least one n")
    return tuple(_parse_int(s, where, minimum=0) for s in items)


def _parse_choice(text: str, where: str, choices: tuple[str, ...]) -> str:
    if text not in choices:
        raise ConfigError(f"{where}: must be one of {', '.join(choices)}, got {text!r}")
    return text


@dataclass(frozen=True)
class SweepConfig:
    """Fully resolved and validated configuration for one command run."""

    command: str
    thetas: tuple[float, ...]
    gammas: tuple[float, ...]
    ns: tuple[int, ...]
    omega: float
    m: int
    criterion: str
    shots: int
    seed: int
    format: str
    out: str
    workers: int
    echo: tuple[tuple[str, str], ...]

    @property
    def tau(self) -> float:
        """Measurement spacing: half a drive period times m."""
        return math.pi * self.m / self.omega

    @property
    def dynamics(self) -> LindbladSpec:
        return LindbladSpec(HamiltonianSpec(self.omega), 0.0)


def _read_config_file(path: str) -> dict[str, tuple[str, str]]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path}: {exc}") from None
    out: dict[str, tuple[str, str]] = {}
    for ln, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, val = s.partition("=")
        key = key.strip()
        val = val.strip()
        if not sep or not key:
            raise ConfigError(f"config line {ln}: expected key=value, got {s!r}")
        if key not in _ALL_KEYS:
            raise ConfigError(f"config line {ln}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"config line {ln}: duplicate key {key!r}")
        out[key] = (val, f"config line {ln} ({key})")
    return out


def resolve_config(command: str, args: argparse.Namespace) -> SweepConfig:
    merged: dict[str, tuple[str, str]] = {}
    for key, val in {**_BASE_DEFAULTS, **_GRID_DEFAULTS[command]}.items():
        merged[key] = (val, f"default {key}")
    if getattr(args, "config", None):
        merged.update(_read_config_file(args.config))
    for key in _ALL_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = (str(flag), f"--{key}")

    forced_note = None
    if command == "fig2" and merged["gamma"][0] != "0:0:1":
        forced_note = f"gamma={merged['gamma'][0]} ignored: fig2 fixes gamma=0"
        merged["gamma"] = ("0:0:1", "forced by fig2")

    def get(key: str) -> tuple[str, str]:
        return merged[key]

    thetas = _parse_range(*get("theta"))
    gammas = _parse_range(*get("gamma"))
    ns = _parse_n_list(*get("n"))
    omega_text, omega_where = get("omega")
    omega = _parse_float(omega_text, omega_where)
    if omega <= 0:
        raise ConfigError(f"{omega_where}: omega must be positive, got {omega_text}")
    m = _parse_int(*get("m"), minimum=1)
    criterion = _parse_choice(*get("criterion"), choices=("lenient", "strict"))
    shots = _parse_int(*get("shots"), minimum=0)
    seed = _parse_int(*get("seed"), minimum=0)
    if seed >= 2**64:
        raise ConfigError(f"{get('seed')[1]}: seed must be below 2**64")
    fmt = _parse_choice(*get("format"), choices=("csv", "jsonl"))
    out = get("out")[0]
    workers = _parse_int(*get("workers"), minimum=1)
    for g in gammas:
        if g < 0:
            raise ConfigError(f"{get('gamma')[1]}: gamma must be nonnegative, got {g}")
    if command == "fig3" and len(ns) != 1:
        raise ConfigError(f"{get('n')[1]}: fig3 evaluates exactly one n, got {len(ns)}")

    echo = [(k, merged[k][0]) for k in _USED_KEYS[command]]
    if forced_note is not None:
        echo.append(("note", forced_note))
    return SweepConfig(
        command=command,
        thetas=thetas,
        gammas=gammas,
        ns=ns,
        omega=omega,
        m=m,
        criterion=criterion,
        shots=shots,
        seed=seed,
        format=fmt,
        out=out,
        workers=workers,
        echo=tuple(echo),
    )


# ---------------------------------------------------------------------------
# command bodies: each returns (columns, rows, summary_lines)


def _sweep_row(r: SweepRecord) -> dict[str, object]:
    return {
        "theta": r.theta,
        "gamma": r.gamma,
        "n": r.n,
        "c12": r.c12,
        "c23": r.c23,
        "c13_prime": r.c13_prime,
        "lg_quantity": r.lg_quantity,
        "eps_total": r.eps_total,
        "verdict": r.verdict.value,
    }


def _cmd_fig2(cfg: SweepConfig):
    recs = sweep_records(
        cfg.thetas, [0.0], cfg.ns, tau=cfg.tau, omega=cfg.omega, workers=cfg.workers
    )
    summary = []
    for n in cfg.ns:
        w = violation_window(n, 0.0, cfg.tau, cfg.omega, criterion=cfg.criterion)
        if w is None:
            summary.append(f"onset[n={n}] none (criterion={cfg.criterion})")
        else:
            summary.append(
                f"onset[n={n}] theta/pi={w.lo / math.pi:.9f} "
                f"width/pi={w.width / math.pi:.9f} (criterion={cfg.criterion})"
            )
    return SWEEP_COLUMNS, [_sweep_row(r) for r in recs], summary


def _cmd_fig3(cfg: SweepConfig):
    recs = sweep_records(
        cfg.thetas, cfg.gammas, cfg.ns, tau=cfg.tau, omega=cfg.omega, workers=cfg.workers
    )
    summary = []
    for crit in ("lenient", "strict"):
        try:
            cut = gamma_cutoff(cfg.ns[0], cfg.tau, cfg.omega, criterion=crit)
            summary.append(f"gamma_cutoff[{crit}]={cut:.9g}")
        except ValueError as exc:
            summary.append(f"gamma_cutoff[{crit}] undefined: {exc}")
    return SWEEP_COLUMNS, [_sweep_row(r) for r in recs], summary


_ADROIT_COLUMNS = (
    "experiment",
    "theta",
    "gamma",
    "tau",
    "omega",
    "epsilon",
    "epsilon_mc",
    "epsilon_mc_se",
)


def _cell_seed(base: int, cell: int, side: int) -> int:
    ss = np.random.SeedSequence(entropy=base, spawn_key=(cell, side))
    return int(ss.generate_state(1, np.uint64)[0])


def _cmd_adroitness(cfg: SweepConfig):
    rows = []
    cell = 0
    for gamma in cfg.gammas:
        spec = LindbladSpec(HamiltonianSpec(cfg.omega), gamma)
        for theta in cfg.thetas:
            report = adroitness_report(theta, cfg.tau, spec)
            schedules = adroitness_experiments(theta, cfg.tau, spec) if cfg.shots else None
            mc_eps = []
            mc_se = []
            for k, (eid, eps) in enumerate(report.entries):
                row = {
                    "experiment": eid,
                    "theta": theta,
                    "gamma": gamma,
                    "tau": cfg.tau,
                    "omega": cfg.omega,
                    "epsilon": eps,
                    "epsilon_mc": None,
                    "epsilon_mc_se": None,
                }
                if cfg.shots:
                    sched = schedules[k]
                    keep = sample_trajectories(
                        sched, cfg.shots, _cell_seed(cfg.seed, cell + k, 0)
                    )
                    drop = sample_trajectories(
                        sched,
                        cfg.shots,
                        _cell_seed(cfg.seed, cell + k, 1),
                        mask=(True, False, True),
                    )
                    est = estimate_adroitness(keep, drop)
                    se = float(np.sqrt((est.cell_standard_errors**2).sum()))
                    row["epsilon_mc"] = est.epsilon
                    row["epsilon_mc_se"] = se
                    mc_eps.append(est.epsilon)
                    mc_se.append(se)
                rows.append(row)
            total_row = {
                "experiment": "total",
                "theta": theta,
                "gamma": gamma,
                "tau": cfg.tau,
                "omega": cfg.omega,
                "epsilon": report.epsilon_total,
                "epsilon_mc": sum(mc_eps) if mc_eps else None,
                "epsilon_mc_se": float(np.sqrt(np.sum(np.square(mc_se)))) if mc_se else None,
            }
            rows.append(total_row)
            cell += 4
    summary = []
    if cfg.shots:
        summary.append(
            "epsilon_mc is biased upward near zero (absolute differences of "
            "noisy cells); the exact column is the reference"
        )
    return _ADROIT_COLUMNS, rows, summary


_CLASSIC_COLUMNS = ("c12", "c23", "c13_prime", "lg_quantity", "verdict")


def _cmd_classic(cfg: SweepConfig):
    cs = classic_lg(cfg.omega)
    row = {
        "c12": cs.c12,
        "c23": cs.c23,
        "c13_prime": cs.c13_prime,
        "lg_quantity": cs.lg_quantity,
        "verdict": "violates_lenient" if cs.lg_quantity < 0 else "no_violation",
    }
    summary = [
        "no probe battery exists at this timing, so only the lenient reading applies",
        f"ideal value is 1-sqrt(2) = {_f17(1.0 - math.sqrt(2.0))}",
    ]
    return _CLASSIC_COLUMNS, [row], summary


def _cmd_sweep(cfg: SweepConfig):
    recs = sweep_records(
        cfg.thetas, cfg.gammas, cfg.ns, tau=cfg.tau, omega=cfg.omega, workers=cfg.workers
    )
    return SWEEP_COLUMNS, [_sweep_row(r) for r in recs], []


_COMMAND_BODIES = {
    "fig2": _cmd_fig2,
    "fig3": _cmd_fig3,
    "adroitness": _cmd_adroitness,
    "classic": _cmd_classic,
    "sweep": _cmd_sweep,
}


# ---------------------------------------------------------------------------
# table serialisation


def _cell_text(v: object) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return _f17(v)


def _render_csv(command, columns, rows, echo, summary) -> str:
    lines = [f"# lgsim {command}"]
    lines += [f"# config {k}={v}" for k, v in echo]
    lines += [f"# {s}" for s in summary]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_cell_text(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def _render_jsonl(command, columns, rows, echo, summary) -> str:
    meta = {"meta": {"command": command, "config": dict(echo), "summary": list(summary)}}
    lines = [json.dumps(meta, sort_keys=True)]
    for row in rows:
        out = {}
        for c in columns:
            v = row[c]
            if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
                out[c] = int(v)
            elif isinstance(v, float):
                out[c] = float(v)
            else:
                out[c] = v
        lines.append(json.dumps(out))
    return "\n".join(lines) + "\n"


def _emit(cfg: SweepConfig, columns, rows, summary) -> None:
    render = _render_csv if cfg.format == "csv" else _render_jsonl
    text = render(cfg.command, columns, rows, cfg.echo, summary)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def read_table(path) -> tuple[dict, list[dict]]:
    """Parse a table written by any command back into (meta, rows).

    ``meta`` holds ``command``, ``config`` (dict) and ``summary`` (list).
    Row values come back as floats/ints/strings for JSONL and as strings for
    CSV (empty cells become None in both).  Numeric strings parse exactly
    because tables are written with %.17g.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty table")
    meta = {"command": None, "config": {}, "summary": []}
    rows: list[dict] = []
    if lines[0].lstrip().startswith("{"):
        for ln in lines:
            obj = json.loads(ln)
            if "meta" in obj:
                meta.update(obj["meta"])
            else:
                rows.append({k: (None if v == "" else v) for k, v in obj.items()})
        return meta, rows
    header: list[str] | None = None
    for ln in lines:
        if ln.startswith("#"):
            body = ln[1:].strip()
            if body.startswith("lgsim "):
                meta["command"] = body[len("lgsim ") :]
            elif body.startswith("config "):
                key, _, val = body[len("config ") :].partition("=")
                meta["config"][key] = val
            else:
                meta["summary"].append(body)
        elif header is None:
            header = ln.split(",")
        else:
            cells = ln.split(",")
            if len(cells) != len(header):
                raise ValueError(f"{path}: row has {len(cells)} cells, header has {len(header)}")
            rows.append({k: (None if c == "" else c) for k, c in zip(header, cells)})
    if header is None:
        raise ValueError(f"{path}: no header line found")
    return meta, rows


def records_from_rows(rows: list[dict]) -> list[SweepRecord]:
    """Rebuild validated sweep records from parsed rows (exact round trip)."""
    out = []
    for row in rows:
        out.append(
            SweepRecord(
                theta=float(row["theta"]),
                gamma=float(row["gamma"]),
                n=int(row["n"]),
                c12=float(row["c12"]),
                c23=float(row["c23"]),
                c13_prime=float(row["c13_prime"]),
                lg_quantity=float(row["lg_quantity"]),
                eps_total=float(row["eps_total"]),
                verdict=row["verdict"],
            )
        )
    return out


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lgsim",
        description="Leggett-Garg protocol tables: violation curves, noise cutoffs, "
        "probe back-action.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theta", help="theta grid as start:stop:steps (radians)")
    common.add_argument("--gamma", help="gamma grid as start:stop:steps")
    common.add_argument("--n", help="comma list of box sizes, e.g. 1,2,5")
    common.add_argument("--omega", help="drive amplitude (positive)")
    common.add_argument("--m", help="spacing multiplier: tau = pi*m/omega")
    common.add_argument("--criterion", help="lenient (lg >= 0) or strict (lg >= -eps_total)")
    common.add_argument("--shots", help="Monte Carlo shots per estimate (0 = exact only)")
    common.add_argument("--seed", help="base RNG seed (64-bit)")
    common.add_argument("--format", help="csv or jsonl")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--workers", help="threads for grid evaluation")
    common.add_argument("--config", help="key=value file; flags override it")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "fig2": "violation curves over theta at gamma=0, one block per n",
        "fig3": "theta x gamma sweep at fixed n plus both noise cutoffs",
        "adroitness": "probe battery epsilons, exact and optionally sampled",
        "classic": "textbook three-time test (lg = 1 - sqrt(2))",
        "sweep": "free-form (n, gamma, theta) grid",
    }
    for name in _COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args.command, args)
        columns, rows, summary = _COMMAND_BODIES[args.command](cfg)
        _emit(cfg, columns, rows, summary)
    except (ConfigError, ValueError) as exc:
        print(f"lgsim: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
