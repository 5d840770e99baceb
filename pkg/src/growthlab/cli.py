"""Command-line driver: function catalog, structured configuration, and
report emission.

Subcommands: ``diagnose`` (constant estimators plus relation audit),
``prox`` (proximal point trajectory plus rate audit), ``tracking``
(elliptic tracking instance: solve, curvature estimate, perturbation
sweep), ``catalog`` (list the built-in test functions).

Settings resolve as defaults < config file (``key = value`` lines, ``#``
comments) < command-line flags.  Every output file embeds the fully
resolved configuration and seed, so a run can be reproduced bit-identically
from any of its outputs.  Exit codes: 0 success, 2 an audited relation
failed, 1 usage or solver error (in which case no report file is written).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import tracking as trk
from .catalog import CATALOG, get_entry
from .core import BallRegion, ExponentPair, FunctionOracle, GrowthLabError
from .diagnostics import run_diagnostics
from .minimize import SolverConfig
from .prox import ProxConfig, audit_rates, run_prox

__all__ = ["RunConfig", "main", "cmd_diagnose", "cmd_prox", "cmd_tracking", "cmd_catalog"]

# (type, default) per key; None defaults mean "required or auto-derived".
_SCHEMAS: Dict[str, Dict[str, Tuple[str, object]]] = {
    "diagnose": {
        "fn": ("str", "power"),
        "p": ("float", 2.0),
        "bound": ("float", 1.0),
        "delta": ("float", 10.0),
        "grid_points": ("int", 0),
        "multistart": ("int", 8),
        "tilt_norms": ("floats", (0.5, 1.0, 2.0, 4.0)),
        "directions": ("int", 0),
        "tau": ("float", 1.10),
        "seed": ("int", 0),
        "out": ("str", "growthlab-out"),
    },
    "prox": {
        "fn": ("str", "power"),
        "p": ("float", 2.0),
        "bound": ("float", 1.0),
        "epsilon": ("float", 0.5),
        "x0": ("floats", (1.0,)),
        "iterations": ("int", 10),
        "delta": ("float", 10.0),
        "grid_points": ("int", 0),
        "multistart": ("int", 8),
        "seed": ("int", 0),
        "out": ("str", "growthlab-out"),
    },
    "tracking": {
        "n": ("int", 32),
        "alpha": ("float", 0.0),
        "beta": ("float", 8.0),
        "amplitude": ("float", 0.6),
        "tol": ("float", 1e-8),
        "max_iters": ("int", 5000),
        "ssc_delta": ("float", 0.1),
        "ssc_samples": ("int", 16),
        "eta_norms": ("floats", (1e-3, 1e-2, 1e-1)),
        "etas_per_norm": ("int", 8),
        "consistency_factor": ("float", 4.0),
        "seed": ("int", 0),
        "out": ("str", "growthlab-out"),
    },
    "catalog": {},
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one subcommand invocation."""

    subcommand: str
    values: Dict[str, object]

    @property
    def seed(self) -> int:
        return int(self.values.get("seed", 0))

    @property
    def out_dir(self) -> Path:
        return Path(str(self.values.get("out", "growthlab-out")))

    def flat(self) -> Dict[str, object]:
        """JSON-ready view of the resolved configuration."""
        out: Dict[str, object] = {"subcommand": self.subcommand}
        for key in sorted(self.values):
            val = self.values[key]
            out[key] = list(val) if isinstance(val, tuple) else val
        return out


def _parse_value(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "floats":
        return tuple(float(tok) for tok in raw.split(",") if tok.strip())
    return raw


def _read_config_file(path: str) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = line.partition("=")
        entries[key.strip()] = raw.strip()
    return entries


def resolve_config(subcommand: str, args: argparse.Namespace) -> RunConfig:
    schema = _SCHEMAS[subcommand]
    values: Dict[str, object] = {key: default for key, (_, default) in schema.items()}
    if getattr(args, "config", None):
        for key, raw in _read_config_file(args.config).items():
            if key not in schema:
                raise ValueError(f"unknown config key {key!r} for '{subcommand}'")
            values[key] = _parse_value(schema[key][0], raw)
    for key, (kind, _) in schema.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            values[key] = _parse_value(kind, flag_val) if isinstance(flag_val, str) else flag_val
    return RunConfig(subcommand, values)


def _jsonify(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _json_bytes(payload: dict) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True, default=_jsonify) + "\n").encode()


def _config_comment_lines(config: RunConfig) -> List[str]:
    lines = [f"subcommand={config.subcommand}"]
    for key, val in sorted(config.values.items()):
        if isinstance(val, tuple):
            val = ",".join(repr(v) for v in val)
        lines.append(f"{key}={val}")
    return lines


def _csv_bytes(config: RunConfig, header: Sequence[str], rows: Sequence[Sequence[str]]) -> bytes:
    lines = [f"# {line}" for line in _config_comment_lines(config)]
    lines.append(",".join(header))
    lines.extend(",".join(row) for row in rows)
    return ("\n".join(lines) + "\n").encode()


def _matrix_bytes(config: RunConfig, values: np.ndarray) -> bytes:
    lines = [f"# {line}" for line in _config_comment_lines(config)]
    for row in np.asarray(values, dtype=float):
        lines.append(" ".join(repr(float(v)) for v in row))
    return ("\n".join(lines) + "\n").encode()


def _write_outputs(config: RunConfig, files: Dict[str, bytes]) -> None:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    for name, payload in files.items():
        (out / name).write_bytes(payload)


def _build_oracle(config: RunConfig) -> FunctionOracle:
    entry = get_entry(str(config.values["fn"]))
    kwargs = {}
    if "p" in entry.default_params:
        kwargs["p"] = float(config.values["p"])
    if "bound" in entry.default_params:
        kwargs["bound"] = float(config.values["bound"])
    return entry.make(**kwargs)


def _solver_config(config: RunConfig, dim: int) -> SolverConfig:
    pts = int(config.values["grid_points"])
    if pts == 0:
        pts = 2001 if dim == 1 else (101 if dim == 2 else 31)
    return SolverConfig(
        grid_points_per_axis=pts,
        multistart_count=int(config.values["multistart"]),
    )


def cmd_diagnose(config: RunConfig) -> int:
    entry = get_entry(str(config.values["fn"]))
    oracle = _build_oracle(config)
    pq = ExponentPair.from_p(float(config.values["p"]))
    region = BallRegion(np.zeros(entry.dimension), float(config.values["delta"]))
    cfg = _solver_config(config, entry.dimension)
    directions = int(config.values["directions"])
    if directions == 0:
        directions = 2 if entry.dimension == 1 else 8
    config = RunConfig(
        config.subcommand,
        {**config.values, "grid_points": cfg.grid_points_per_axis, "directions": directions},
    )

    report = run_diagnostics(
        oracle,
        region,
        pq,
        cfg,
        tilt_norms=tuple(config.values["tilt_norms"]),
        directions_per_norm=directions,
        seed=config.seed,
        tau=float(config.values["tau"]),
    )

    payload = {"config": config.flat(), "function": oracle.descriptor}
    payload.update(report.to_json_dict())
    header, rows = report.csv_rows()
    manifest = {"config": config.flat(), "outputs": ["diagnose_report.json", "diagnose_report.csv"]}
    _write_outputs(
        config,
        {
            "diagnose_report.json": _json_bytes(payload),
            "diagnose_report.csv": _csv_bytes(config, header, rows),
            "manifest.json": _json_bytes(manifest),
        },
    )

    for note in report.audit.degenerate:
        print(f"warning: degenerate estimate: {note}")
    print(
        f"{oracle.descriptor}: gamma_hat={report.growth.gamma_hat!r} "
        f"kappa_hat={report.tilt.kappa_hat!r} mu_hat={report.loja.mu_hat!r} "
        f"audit={'pass' if report.audit.all_pass else 'FAIL'}"
    )
    return 0 if report.audit.all_pass else 2


def cmd_prox(config: RunConfig) -> int:
    oracle = _build_oracle(config)
    pq = ExponentPair.from_p(float(config.values["p"]))
    x0 = np.asarray(tuple(config.values["x0"]), dtype=float)
    region = BallRegion(np.zeros(x0.size), float(config.values["delta"]))
    epsilon = float(config.values["epsilon"])
    solver = _solver_config(config, x0.size)
    prox_cfg = ProxConfig(
        epsilon=epsilon,
        exponents=pq,
        iterations=int(config.values["iterations"]),
        region=region,
        solver=solver,
    )
    config = RunConfig(
        config.subcommand,
        {**config.values, "grid_points": solver.grid_points_per_axis},
    )

    constants = oracle.known_constants or {}
    gamma_ref = constants.get("gamma")
    if gamma_ref is not None and gamma_ref > 0.0 and epsilon >= gamma_ref:
        # Refuse before doing any work: the rate bounds would be vacuous.
        print(
            f"error: epsilon={epsilon} must lie strictly below the growth "
            f"modulus gamma={gamma_ref} of '{oracle.descriptor}'",
            file=sys.stderr,
        )
        return 1

    traj = run_prox(oracle, x0, prox_cfg)
    audit = None
    if gamma_ref is not None and gamma_ref > 0.0:
        xbar = oracle.known_minimizer
        audit = audit_rates(traj, gamma_ref, xbar, oracle(xbar), pq, epsilon)

    header = ["k"] + [f"x{i}" for i in range(x0.size)] + [
        "f_value", "bound_x", "bound_f", "margin_x", "margin_f",
    ]
    rows = []
    for k, (point, value) in enumerate(zip(traj.points, traj.values)):
        row = [str(k)] + [repr(float(c)) for c in point] + [repr(value)]
        if audit is not None:
            rec = audit.records[k]
            row += [repr(rec.bound_distance), repr(rec.bound_gap),
                    repr(rec.margin_distance), repr(rec.margin_gap)]
        else:
            row += ["", "", "", ""]
        rows.append(row)

    manifest = {
        "config": config.flat(),
        "outputs": ["prox_trajectory.csv"],
        "audit": None if audit is None else {"passed": audit.passed, "rho": audit.rho},
    }
    _write_outputs(
        config,
        {
            "prox_trajectory.csv": _csv_bytes(config, header, rows),
            "manifest.json": _json_bytes(manifest),
        },
    )

    if audit is None:
        print(f"{oracle.descriptor}: trajectory written, no growth reference for a rate audit")
        return 0
    print(f"{oracle.descriptor}: rate audit {'pass' if audit.passed else 'FAIL'} (rho={audit.rho!r})")
    return 0 if audit.passed else 2


def cmd_tracking(config: RunConfig) -> int:
    grid = trk.Grid2D(int(config.values["n"]))
    alpha = float(config.values["alpha"])
    beta = float(config.values["beta"])
    y_d = float(config.values["amplitude"]) * trk.default_target(grid)
    descent = trk.DescentConfig(
        tol=float(config.values["tol"]), max_iters=int(config.values["max_iters"])
    )

    result = trk.solve_tracking(y_d, grid, alpha, beta, descent)
    ssc = trk.ssc_estimate(
        result.control,
        y_d,
        grid,
        alpha,
        beta,
        delta=float(config.values["ssc_delta"]),
        sample_count=int(config.values["ssc_samples"]),
        seed=config.seed,
    )
    sweep = trk.perturbation_sweep(
        result,
        y_d,
        grid,
        alpha,
        beta,
        eta_norms=tuple(config.values["eta_norms"]),
        etas_per_norm=int(config.values["etas_per_norm"]),
        cfg=descent,
        seed=config.seed,
    )

    ratios = sweep.ratios()
    factor = float(config.values["consistency_factor"])
    consistent = True
    if ssc > 0.0:
        # every sample with a positive perturbation size must produce a
        # finite ratio, and the ratios must cluster around their median
        expected = [s for s in sweep.samples if s.eta_norm > 0.0]
        if len(ratios) < len(expected) or not ratios:
            consistent = False
        else:
            med = float(np.median(ratios))
            consistent = med > 0.0 and all(
                med / factor <= r <= med * factor for r in ratios
            )

    header = ["eta_norm", "index", "ratio", "converged", "iterations", "error"]
    rows = [
        [repr(s.eta_norm), str(s.index), repr(s.ratio), str(s.converged),
         str(s.iterations), s.error.replace(",", ";")]
        for s in sweep.samples
    ]
    manifest = {
        "config": config.flat(),
        "grid": {"n": grid.n, "h": grid.h},
        "box": {"alpha": alpha, "beta": beta},
        "solve": {
            "objective": result.objective_value,
            "first_order_residual": result.first_order_residual,
            "iterations": result.iterations,
            "converged": result.converged,
        },
        "ssc_estimate": ssc,
        "sweep": {"kappa_hat": sweep.kappa_hat, "label": sweep.label,
                  "consistent": consistent},
        "outputs": ["control.txt", "state.txt", "adjoint.txt", "target.txt", "sweep.csv"],
    }
    _write_outputs(
        config,
        {
            "control.txt": _matrix_bytes(config, result.control),
            "state.txt": _matrix_bytes(config, result.state),
            "adjoint.txt": _matrix_bytes(config, result.adjoint),
            "target.txt": _matrix_bytes(config, y_d),
            "sweep.csv": _csv_bytes(config, header, rows),
            "manifest.json": _json_bytes(manifest),
        },
    )

    print(
        f"tracking n={grid.n}: J={result.objective_value!r} "
        f"residual={result.first_order_residual!r} ssc={ssc!r} "
        f"kappa_hat={sweep.kappa_hat!r} consistency={'pass' if consistent else 'FAIL'}"
    )
    return 0 if consistent else 2


def cmd_catalog(config: RunConfig) -> int:
    for entry in sorted(CATALOG.values(), key=lambda e: e.id):
        params = " ".join(f"{k}={v}" for k, v in sorted(entry.default_params.items()))
        oracle = entry.make()
        constants = dict(oracle.known_constants or {})
        known = " ".join(f"{k}={v}" for k, v in sorted(constants.items()))
        print(f"{entry.id}  dim={entry.dimension}  [{params}]  {entry.summary}  ({known})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growthlab",
        description="Growth-condition diagnostics, proximal point rates, and elliptic tracking runs.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in _SCHEMAS.items():
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="key=value settings file")
        for key in schema:
            cmd.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
    return parser


_HANDLERS = {
    "diagnose": cmd_diagnose,
    "prox": cmd_prox,
    "tracking": cmd_tracking,
    "catalog": cmd_catalog,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args.subcommand, args)
        return _HANDLERS[args.subcommand](config)
    except (GrowthLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
