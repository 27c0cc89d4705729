"""Command-line front end: ``gaussclone <command> [flags]``.

Exit codes: 0 success, 2 configuration error, 3 numeric budget failure.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import cloning, detection, fidelity
from . import gaussian as gc
from .errors import BudgetError, GaussCloneError, ParseError

FORMAT_TAG = "gaussclone v1"
DEFAULT_SEED = 20061
DEFAULT_R_GRID = "0:1.5:0.05"
DEFAULT_ALPHA_GRID = "0:3:0.1"

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET = 0, 2, 3


class ConfigError(GaussCloneError):
    pass


# -- parsing helpers --------------------------------------------------------------


def parse_complex(token: str) -> complex:
    try:
        return complex(token.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise ParseError(token, "expected a real or complex number") from None


def parse_float(token: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(token, "expected a real number") from None
    if not np.isfinite(value):
        raise ParseError(token, "value must be finite")
    return value


def parse_state(spec: str) -> gc.GaussianState:
    """Parse ``vacuum``, ``coherent:A``, ``squeezed:A,R`` or ``thermal_sq:N,S``."""
    kind, _, args = spec.partition(":")
    parts = [p for p in args.split(",")] if args else []
    if kind == "vacuum" and not parts:
        return gc.vacuum()
    if kind == "coherent" and len(parts) == 1:
        return gc.coherent(parse_complex(parts[0]))
    if kind == "squeezed" and len(parts) == 2:
        return gc.squeezed_coherent(parse_complex(parts[0]), parse_float(parts[1]))
    if kind == "thermal_sq" and len(parts) == 2:
        return gc.squeezed_thermal(parse_float(parts[0]), parse_float(parts[1]))
    raise ParseError(spec, "expected vacuum | coherent:A | squeezed:A,R | thermal_sq:N,S")


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` (stop included) or a comma-separated list."""
    if ":" in text:
        fields = text.split(":")
        if len(fields) != 3:
            raise ParseError(text, "grid range must be start:stop:step")
        start, stop, step = (parse_float(f) for f in fields)
        if step <= 0:
            raise ParseError(text, "grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        grid = np.round(start + step * np.arange(n), 12)
    else:
        grid = np.array([parse_float(t) for t in text.split(",") if t])
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ParseError(text, "grid must be non-empty and strictly increasing")
    return grid


def parse_list(text: str) -> list[float]:
    values = [parse_float(t) for t in text.split(",") if t]
    if not values:
        raise ParseError(text, "empty list")
    return values


def parse_gain(token: str, tau1: float) -> float:
    if token == "auto1":
        return cloning.gain_select(1, tau1)
    if token == "auto2":
        return cloning.gain_select(2, tau1)
    return parse_float(token)


# -- output -----------------------------------------------------------------------


def _num(x: float) -> str:
    return format(float(x), ".17g")


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def render_table(columns: list[str], rows: list[list[float]], config: dict, fmt: str) -> str:
    digest = config_hash(config)
    if fmt == "json":
        doc = {
            "format": FORMAT_TAG,
            "config_hash": digest,
            "config": config,
            "columns": columns,
            "rows": [[float(v) for v in row] for row in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# {FORMAT_TAG}; config-hash={digest}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    """Write ``text`` to ``out`` atomically (or to stdout)."""
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gaussclone-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- commands ---------------------------------------------------------------------


def cmd_fig2(args) -> str:
    r_grid = parse_grid(args.r_grid)
    rows = []
    for r in r_grid:
        f_opt, f_vac = fidelity.squeezed_cloning_fidelities(r, args.eta)
        rows.append([r, f_opt, f_vac])
    config = {"command": "fig2", "eta": args.eta, "r_grid": r_grid.tolist()}
    return render_table(["r", "f_opt_ancilla", "f_vacuum_ancilla"], rows, config, args.format)


def cmd_fig3(args) -> str:
    r_grid = parse_grid(args.r_grid)
    etas = parse_list(args.etas)
    rows = [[r] + [fidelity.enhancement(r, eta) for eta in etas] for r in r_grid]
    config = {"command": "fig3", "etas": etas, "r_grid": r_grid.tolist()}
    columns = ["r"] + [f"g_{eta:g}" for eta in etas]
    return render_table(columns, rows, config, args.format)


def _error_table(command, alphas, settings, label, args) -> str:
    """Shared body of fig4/fig5; ``settings`` is a list of ``(eta, epsilon)``."""
    columns = ["alpha"]
    curves = []
    for k, (eta, eps) in enumerate(settings):
        value = eta if label == "eta" else eps
        columns += [f"h_e_{label}{value:g}", f"abs_error_{label}{value:g}"]
        curves.append(
            detection.error_curve(
                alphas, eta, eps, args.method, args.budget, seed=args.seed + k, tol=args.tol
            )
        )
    rows = []
    for i, alpha in enumerate(alphas):
        row = [alpha]
        for curve in curves:
            row += [curve[i][1], curve[i][2]]
        rows.append(row)
    config = {
        "command": command,
        "alpha_grid": [float(a) for a in alphas],
        "settings": [list(s) for s in settings],
        "method": args.method,
        "budget": args.budget,
        "seed": args.seed,
        "tol": args.tol,
    }
    return render_table(columns, rows, config, args.format)


def cmd_fig4(args) -> str:
    alphas = parse_grid(args.alpha_grid)
    settings = [(eta, args.epsilon) for eta in parse_list(args.etas)]
    return _error_table("fig4", alphas, settings, "eta", args)


def cmd_fig5(args) -> str:
    alphas = parse_grid(args.alpha_grid)
    settings = [(args.eta, eps) for eps in parse_list(args.epsilons)]
    return _error_table("fig5", alphas, settings, "eps", args)


def _state_json(state: gc.GaussianState) -> dict:
    return state.to_dict()


def cmd_clone(args) -> str:
    rho1, rho2 = parse_state(args.rho1), parse_state(args.rho2)
    ancilla = parse_state(args.ancilla)
    gain = parse_gain(args.g, args.tau1)
    cfg = cloning.ClonerConfig(
        tau1=args.tau1,
        tau2=args.tau2,
        gain=gain,
        meas=gc.GaussianMeasurement.double_homodyne(args.eta),
        ancilla=ancilla,
    )
    report = {
        "format": FORMAT_TAG,
        "inputs": {"rho1": args.rho1, "rho2": args.rho2, "ancilla": args.ancilla},
        "tau1": args.tau1,
        "tau2": args.tau2,
        "gain": gain,
        "eta": args.eta,
    }
    if args.single_shot is not None:
        z = parse_complex(args.single_shot)
        result, density = cloning.run_single_shot(rho1, rho2, cfg, z)
        report["single_shot"] = {"z": [z.real, z.imag], "density": density}
    else:
        result = cloning.run_averaged(rho1, rho2, cfg)
    clones = [result.clone1, result.clone2]
    if args.flip:
        clones = [cloning.phase_flip(c) for c in clones]
    report["phase_flipped"] = bool(args.flip)
    report["f1"], report["f2"] = result.f1, result.f2
    report["clone1"] = _state_json(clones[0])
    report["clone2"] = _state_json(clones[1])
    report["fidelity"] = {
        f"clone{h + 1}_rho{k + 1}": fidelity.gaussian_fidelity(rho, clone).fidelity
        for h, clone in enumerate(clones)
        for k, rho in enumerate((rho1, rho2))
    }
    report["config_hash"] = config_hash({k: v for k, v in report.items() if k != "fidelity"})
    return json.dumps(report, indent=2) + "\n"


def cmd_optimize_ancilla(args) -> str:
    rho = parse_state(args.input)
    sigma_m = gc.GaussianMeasurement.double_homodyne(args.eta).cov
    s_bar = fidelity.optimal_ancilla_squeezing(rho.cov, sigma_m)
    s_num, f_num = fidelity.maximize_fidelity_numeric(rho.cov, sigma_m)
    f_opt = fidelity.symmetric_cloning_fidelity(rho.cov, gc.squeezed_thermal(0.0, s_bar).cov, sigma_m)
    f_vac = fidelity.symmetric_cloning_fidelity(rho.cov, gc.vacuum().cov, sigma_m)
    report = {
        "format": FORMAT_TAG,
        "input": args.input,
        "eta": args.eta,
        "s_bar": s_bar,
        "s_numeric": s_num,
        "f_opt_ancilla": f_opt,
        "f_numeric": f_num,
        "f_vacuum_ancilla": f_vac,
        "f_gain": (f_opt - f_vac) / f_vac,
    }
    report["config_hash"] = config_hash({"input": args.input, "eta": args.eta})
    return json.dumps(report, indent=2) + "\n"


# -- argument parser --------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, formats=("csv", "json")) -> None:
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=formats, default=formats[0])


def _add_comm(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-grid", default=DEFAULT_ALPHA_GRID, help="start:stop:step or list")
    p.add_argument("--method", choices=["quad", "mc"], default="quad")
    p.add_argument("--budget", type=int, default=None, help="quadrature order or MC samples")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--tol", type=float, default=None, help="fail if the error estimate exceeds this")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussclone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig2", help="cloning fidelity of squeezed inputs vs r")
    p.add_argument("--r-grid", default=DEFAULT_R_GRID)
    p.add_argument("--eta", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_fig2)

    p = sub.add_parser("fig3", help="relative fidelity gain G(r, eta)")
    p.add_argument("--r-grid", default=DEFAULT_R_GRID)
    p.add_argument("--etas", default="1.0,0.75,0.5")
    _add_common(p)
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("fig4", help="average error probability vs alpha for several eta")
    p.add_argument("--etas", default="1.0,0.75,0.5")
    p.add_argument("--epsilon", type=float, default=1.0)
    _add_comm(p)
    _add_common(p)
    p.set_defaults(func=cmd_fig4)

    p = sub.add_parser("fig5", help="average error probability vs alpha for several epsilon")
    p.add_argument("--eta", type=float, default=0.75)
    p.add_argument("--epsilons", default="1.0,0.75,0.5")
    _add_comm(p)
    _add_common(p)
    p.set_defaults(func=cmd_fig5)

    p = sub.add_parser("clone", help="run the cloner on two input states")
    p.add_argument("rho1")
    p.add_argument("rho2")
    p.add_argument("--ancilla", default="vacuum")
    p.add_argument("--tau1", type=float, default=0.5)
    p.add_argument("--tau2", type=float, default=0.5)
    p.add_argument("--g", default="1", help="gain: real, auto1 or auto2")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--single-shot", metavar="Z", default=None, help="condition on outcome Z")
    p.add_argument("--flip", action="store_true", help="apply the pi phase flip to the clones")
    _add_common(p, formats=("json",))
    p.set_defaults(func=cmd_clone)

    p = sub.add_parser("optimize-ancilla", help="optimal squeezed-vacuum ancilla for an input")
    p.add_argument("input")
    p.add_argument("--eta", type=float, default=1.0)
    _add_common(p, formats=("json",))
    p.set_defaults(func=cmd_optimize_ancilla)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "method", None) is not None:
        args.method = {"quad": detection.QUADRATURE, "mc": detection.MONTE_CARLO}[args.method]
    try:
        text = args.func(args)
        emit(text, args.out)
    except BudgetError as exc:
        print(f"gaussclone: budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GaussCloneError, OSError) as exc:
        print(f"gaussclone: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
