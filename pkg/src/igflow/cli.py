"""Command-line front end: simulate flows, verify invariants, derive plot data.

Exit codes: 0 success, 1 failed verification checks, 2 configuration errors,
3 integration failures.  Output files are written to a temporary and renamed
into place, so failures never leave partial files.  Numbers serialize with 17
significant digits, making outputs byte-identical for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import discrete as dsc
from . import models, verify
from .errors import ConfigError, DomainError, IgflowError, IntegrationError
from .gradient import integrate_gradient_flow
from .hamilton import HamiltonSystem, hamiltonian, integrate_hamilton
from .integrate import IntegratorConfig
from .state import PhaseState

TOLERANCES_ENV = "IGFLOW_TOLERANCES"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".igflow-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], rows: list[list[float]]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    return "\n".join(lines) + "\n"


def _parse_floats(text: str, flag: str) -> np.ndarray:
    """Vector flags accept a JSON array ('[0.2, 0.8]') or a comma list ('0.2,0.8')."""
    text = text.strip()
    try:
        if text.startswith("["):
            values = np.array(json.loads(text), dtype=float)
        else:
            values = np.array([float(x) for x in text.split(",")], dtype=float)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{flag}: expected a JSON array or comma-separated numbers, got {text!r}") from exc
    if values.ndim != 1 or values.size == 0:
        raise ConfigError(f"{flag}: expected a nonempty vector, got {text!r}")
    return values


def _parse_span(text: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ConfigError(f"--span expects 'start:end', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"--span expects numbers, got {text!r}") from exc
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigError(f"--span must be finite, got {text!r}")
    return lo, hi


def _integrator_config(args) -> IntegratorConfig:
    return IntegratorConfig(
        method=args.method, step=args.step, output_step=args.output_step
    )


def _discrete_endpoints(args) -> dsc.FlowEndpoints:
    if args.levels is not None:
        # canonical-ensemble association: relax p(beta=beta0) toward uniform
        levels = _parse_floats(args.levels, "--levels")
        n = levels.size
        return dsc.FlowEndpoints(
            q0=dsc.canonical_distribution(levels, args.beta0), q2=np.full(n, 1.0 / n)
        )
    if args.q0 is None or args.q2 is None:
        raise ConfigError("simulate discrete requires --q0 and --q2 (or --levels)")
    return dsc.FlowEndpoints(q0=_parse_floats(args.q0, "--q0"), q2=_parse_floats(args.q2, "--q2"))


def _cmd_simulate(args) -> int:
    cfg = _integrator_config(args)
    if args.kind == "discrete":
        ends = _discrete_endpoints(args)
        samples = dsc.integrate_discrete_flow(ends, _parse_span(args.span), cfg)
        n = ends.size
        header = ["t"] + [f"q{i + 1}" for i in range(n)] + ["D"]
        rows = [[t, *q, dsc.kl_divergence(q, ends.q2)] for t, q in samples]
        _write_atomic(args.out, _csv(header, rows))
        return 0

    if args.model is None:
        raise ConfigError(f"simulate {args.kind} requires --model")
    if args.q0 is None:
        raise ConfigError(f"simulate {args.kind} requires --q0")
    model = models.load_model(args.model)
    q0 = _parse_floats(args.q0, "--q0")
    span = _parse_span(args.span)
    if args.kind == "hamilton":
        if args.p0 is not None:
            state0 = PhaseState(q=q0, p=_parse_floats(args.p0, "--p0"))
        else:
            state0 = model.state(q0)
        traj = integrate_hamilton(HamiltonSystem.from_model(model), state0, span, cfg)
    else:
        traj = integrate_gradient_flow(model, q0, span, cfg)
    n = model.dim
    header = [traj.parameter_kind] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)]
    rows = [
        [traj.params[k], *traj.qs[k], *traj.ps[k]] for k in range(len(traj))
    ]
    _write_atomic(args.out, _csv(header, rows))
    return 0


def _load_tolerances(args) -> dict | None:
    path = os.environ.get(TOLERANCES_ENV) or args.tolerances
    if not path:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read tolerances file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in tolerances file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("tolerances file must hold a JSON object of name -> tolerance")
    return data


def _cmd_verify(args) -> int:
    model = models.load_model(args.model) if args.model else None
    report = verify.run_suite(suite=args.suite, model=model, tolerances=_load_tolerances(args))
    payload = report.to_json_dict()
    payload["config"]["model_config"] = args.model or "builtin ideal defaults"
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_atomic(args.out, text)
    sys.stdout.write(text)
    return 0 if report.all_passed else 1


_QUANTITIES = ("s", "T", "P", "H", "D", "eikonal")


def _read_trajectory_csv(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read trajectory file {path}: {exc}") from exc
    if not lines:
        raise ConfigError(f"trajectory file {path} is empty")
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]], dtype=float)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise ConfigError(f"trajectory file {path} is malformed")
    return header, data


def _cmd_export_plotdata(args) -> int:
    header, data = _read_trajectory_csv(args.traj)
    quantities = [q for q in args.quantities.split(",") if q] if args.quantities else []
    for q in quantities:
        if q not in _QUANTITIES:
            raise ConfigError(f"unknown quantity {q!r}; expected one of {_QUANTITIES}")

    kind = header[0]
    q_cols = [i for i, name in enumerate(header) if name.startswith("q")]
    p_cols = [i for i, name in enumerate(header) if name.startswith("p")]
    model = models.load_model(args.model) if args.model else None
    system = HamiltonSystem.from_model(model) if model else None

    need_model = {"s", "T", "P", "H", "eikonal"}
    if need_model & set(quantities) and model is None:
        raise ConfigError("quantities s, T, P, H, eikonal require --model")
    if ("T" in quantities or "P" in quantities or "H" in quantities or "eikonal" in quantities) and not p_cols:
        raise ConfigError("this trajectory file has no momentum columns")
    q2 = _parse_floats(args.q2, "--q2") if args.q2 else None
    if "D" in quantities and q2 is None:
        raise ConfigError("quantity D requires --q2")

    rows = []
    for row in data:
        out = list(row)
        qvec = row[q_cols] if q_cols else None
        pvec = row[p_cols] if p_cols else None
        for name in quantities:
            if name == "s":
                out.append(model.entropy(qvec))
            elif name == "T":
                out.append(1.0 / pvec[0])
            elif name == "P":
                out.append(pvec[1] / pvec[0])
            elif name == "H":
                out.append(hamiltonian(system, PhaseState(q=qvec, p=pvec)))
            elif name == "eikonal":
                quad = float(pvec @ model.metric_at(qvec).g_inv @ pvec)
                out.append(quad - system.E**2)
            else:  # D
                qs = qvec / np.sum(qvec)
                out.append(dsc.kl_divergence(qs, q2))
        rows.append(out)
    _write_atomic(args.out, _csv(header + quantities, rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igflow",
        description="Simulate thermodynamic Hamilton/gradient flows and verify their invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate a flow and write a CSV trajectory")
    sim.add_argument("kind", choices=["hamilton", "gradient", "discrete"])
    sim.add_argument("--model", help="model configuration JSON (hamilton/gradient)")
    sim.add_argument("--q0", help="initial coordinates (comma list or JSON array)")
    sim.add_argument("--p0", help="initial momenta (hamilton; default on-shell)")
    sim.add_argument("--q2", help="target distribution (discrete)")
    sim.add_argument("--levels", help="energy levels (discrete; flows canonical(beta0) -> uniform)")
    sim.add_argument("--beta0", type=float, default=1.0, help="initial coldness with --levels")
    sim.add_argument("--span", required=True, help="parameter span start:end")
    sim.add_argument("--step", type=float, help="fixed integration step")
    sim.add_argument("--output-step", type=float, dest="output_step", help="sampling step")
    sim.add_argument("--method", choices=["rk4", "rk45"], default="rk4")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.set_defaults(func=_cmd_simulate)

    ver = sub.add_parser("verify", help="run the invariant suite and emit a JSON report")
    ver.add_argument("--model", help="model configuration JSON")
    ver.add_argument("--suite", choices=list(verify._SUITES), default="all")
    ver.add_argument(
        "--tolerances",
        help=f"JSON file of check-name -> tolerance overrides (env {TOLERANCES_ENV} takes precedence)",
    )
    ver.add_argument("--out", help="also write the report JSON here")
    ver.set_defaults(func=_cmd_verify)

    exp = sub.add_parser("export-plotdata", help="append derived columns to a trajectory CSV")
    exp.add_argument("--traj", required=True, help="trajectory CSV from simulate")
    exp.add_argument("--quantities", default="", help=f"comma list from {_QUANTITIES}")
    exp.add_argument("--model", help="model configuration JSON (for s, T, P, H, eikonal)")
    exp.add_argument("--q2", help="target distribution (for D)")
    exp.add_argument("--out", required=True, help="output CSV path")
    exp.set_defaults(func=_cmd_export_plotdata)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"igflow: error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"igflow: integration failed: {exc}", file=sys.stderr)
        return 3
    except IgflowError as exc:
        print(f"igflow: error: {exc}", file=sys.stderr)
        return 2


def entrypoint():  # console-script shim
    raise SystemExit(main())
