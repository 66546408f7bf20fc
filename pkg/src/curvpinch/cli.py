"""Command line entry point: verify, pinch, sharpness, constants, models.

Exit codes: 0 success, 1 a mathematical check failed, 2 usage or config error.
Option precedence is command-line flag, then config file, then built-in default.
The config file is JSON; its path comes from ``--config`` or the
``CURVPINCH_CONFIG`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

from . import __version__
from . import inequalities as ineq
from . import models, sharpness, suite
from .report import dumps_canonical, rows_to_csv
from .tensor_core import PreconditionError

CONFIG_ENV = "CURVPINCH_CONFIG"
SCHEMA_VERSION = "1.0.0"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "verify": {"dims": [4, 5, 6, 7, 8, 9, 10], "samples": 1000, "identity_samples": None, "seed": 0,
               "ineq": None, "workers": 1},
    "pinch": {"model": None, "theorem": None},
    "sharpness": {"ineq": ["okumura"], "dims": [4], "restarts": 64, "iters": 500, "step_size": 0.05,
                  "fd_step": 1e-5, "tolerance": 1e-9, "seed": 0, "workers": 1},
    "constants": {"dims": list(range(4, 13))},
    "models": {"model": None},
}
COMMON_DEFAULTS = {"format": "json", "out": None}
CSV_COMMANDS = ("pinch", "constants", "models")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int = 0
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# argument parsing


def parse_dims(text: str) -> list[int]:
    """'4,5,6' or '4-10' or a mix such as '4-6,9'."""
    dims: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            dims.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad dimension list {text!r}") from None
    if not dims:
        raise argparse.ArgumentTypeError("empty dimension list")
    return dims


def _csv_list(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"))
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--config", metavar="PATH")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="curvpinch", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="run every inequality and identity suite")
    v.add_argument("--dims", type=parse_dims)
    v.add_argument("--samples", type=int)
    v.add_argument("--identity-samples", dest="identity_samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--ineq", type=_csv_list, help="comma list of suite ids (default: all)")
    v.add_argument("--workers", type=int)

    pn = sub.add_parser("pinch", parents=[common], help="evaluate pinching theorems on a catalog model")
    pn.add_argument("--model")
    pn.add_argument("--theorem", choices=models.THEOREM_IDS)

    s = sub.add_parser("sharpness", parents=[common], help="search for the largest inequality ratio")
    s.add_argument("--ineq", type=_csv_list)
    s.add_argument("--dims", type=parse_dims)
    s.add_argument("--restarts", type=int)
    s.add_argument("--iters", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)

    sub.add_parser("constants", parents=[common], help="table of C(n), A(n) and derived constants").add_argument(
        "--dims", type=parse_dims
    )

    m = sub.add_parser("models", parents=[common], help="catalog invariants and integral-formula checks")
    m.add_argument("--model")
    return p


def load_config(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def resolve(command: str, args: argparse.Namespace, config: dict) -> dict:
    """Merge flag > config > default. Config keys may sit at the top level or under the command name."""
    defaults = {**COMMON_DEFAULTS, **DEFAULTS[command]}
    scoped = {**{k: v for k, v in config.items() if not isinstance(v, dict)}, **config.get(command, {})}
    unknown = set(scoped) - set(defaults)
    if unknown:
        raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    params = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        params[key] = flag if flag is not None else scoped.get(key, default)
    if isinstance(params.get("dims"), str):
        params["dims"] = parse_dims(params["dims"])
    if isinstance(params.get("ineq"), str):
        params["ineq"] = _csv_list(params["ineq"])
    return params


# ---------------------------------------------------------------------------
# commands; each returns (exit code, payload, csv rows or None)


def _positive(params, *keys):
    for key in keys:
        if params.get(key) is not None and int(params[key]) < 1:
            raise UsageError(f"--{key.replace('_', '-')} must be >= 1")


def cmd_verify(params: dict):
    _positive(params, "samples", "identity_samples", "workers")
    dims = params["dims"]
    if not set(dims) <= set(range(4, 11)):
        raise UsageError("verify dims must lie in 4..10")
    chosen = params["ineq"]
    if chosen:
        bad = set(chosen) - set(suite.ALL_SUITES)
        if bad:
            raise UsageError(f"unknown suites {sorted(bad)}; choose from {list(suite.ALL_SUITES)}")
    rows = suite.run_all(
        dims=dims,
        samples=params["samples"],
        seed=params["seed"],
        identity_samples=params["identity_samples"],
        suites=chosen,
        workers=params["workers"],
    )
    grouped: dict[str, list] = {}
    for row in rows:
        grouped.setdefault(row["id"], []).append(row)
    violations = suite.count_violations(rows)
    payload = {"suites": grouped, "total_violations": violations}
    return (EXIT_VIOLATION if violations else EXIT_OK), payload, None


def _model(name):
    if not name:
        raise UsageError("--model is required")
    try:
        return models.catalog(name)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None


def cmd_pinch(params: dict):
    m = _model(params["model"])
    if params["theorem"]:
        try:
            verdicts = [models.evaluate(m, params["theorem"])]
        except PreconditionError as exc:
            raise UsageError(f"{params['theorem']} does not apply to {m.name}: {exc}") from None
        skipped = []
    else:
        verdicts, skipped = [], []
        for tid in models.THEOREM_IDS:
            try:
                verdicts.append(models.evaluate(m, tid))
            except PreconditionError as exc:
                skipped.append({"theorem": tid, "reason": str(exc)})
    rows = [v.to_dict() for v in verdicts]
    return EXIT_OK, {"model": m.name, "verdicts": rows, "not_applicable": skipped}, rows


def cmd_sharpness(params: dict):
    _positive(params, "restarts", "iters", "workers")
    results, violations = [], []
    for ineq_id in params["ineq"]:
        for n in params["dims"]:
            try:
                cfg = sharpness.SearchConfig(
                    ineq_id, n, restarts=params["restarts"], max_iters=params["iters"],
                    step_size=params["step_size"], fd_step=params["fd_step"], seed=params["seed"],
                    tolerance=params["tolerance"], workers=params["workers"],
                )
            except PreconditionError as exc:
                raise UsageError(str(exc)) from None
            try:
                results.append(sharpness.maximize_ratio(cfg).to_dict())
            except sharpness.InequalityViolation as exc:
                violations.append({"id": exc.inequality_id, "dim": exc.dim, "ratio": exc.ratio,
                                   "witness": exc.witness})
    payload = {"results": results, "violations": violations}
    return (EXIT_VIOLATION if violations else EXIT_OK), payload, None


def cmd_constants(params: dict):
    if min(params["dims"]) < 4:
        raise UsageError("constants are defined for n >= 4")
    rows = ineq.ConstantsTable.build(params["dims"]).rows()
    return EXIT_OK, {"constants": rows}, rows


def _model_row(m: models.ModelGeometry) -> dict:
    row = {"model": m.name, "dim": m.dim, "scalar": m.scalar, "weyl_sq": m.weyl_sq, "ric0_sq": m.ric0_sq,
           "volume": m.volume, "euler_char": m.euler_char, "einstein": m.einstein, "lambda": m.lam}
    checks = []
    if m.einstein and m.scalar > 0:
        row["yamabe"] = models.yamabe_einstein(m)
        checks.append(models.lambda_identity_check(m))
    if m.dim == 4:
        checks += [models.gauss_bonnet_4d(m), models.sigma2_gursky(m), models.gauss_bonnet_rewrite(m)]
    row["checks"] = {c.inequality_id: c.passed for c in checks}
    row["all_pass"] = all(c.passed for c in checks)
    row["_reports"] = [c.to_dict() for c in checks]
    return row


def cmd_models(params: dict):
    names = [params["model"]] if params["model"] else list(models.CATALOG_NAMES)
    rows = [_model_row(_model(name)) for name in names]
    ok = all(r["all_pass"] for r in rows)
    payload = {"models": [{k: v for k, v in r.items() if k != "_reports"} | {"reports": r["_reports"]} for r in rows]}
    csv_rows = [{**r, "checks": ";".join(f"{k}={v}" for k, v in r["checks"].items())} for r in rows]
    return (EXIT_OK if ok else EXIT_VIOLATION), payload, csv_rows


COMMANDS = {
    "verify": cmd_verify,
    "pinch": cmd_pinch,
    "sharpness": cmd_sharpness,
    "constants": cmd_constants,
    "models": cmd_models,
}


# ---------------------------------------------------------------------------
# output


def _text(command: str, payload: dict) -> str:
    lines = []
    if command == "verify":
        for sid, rows in payload["suites"].items():
            for r in rows:
                key = "max_ratio" if r["kind"] == "inequality" else "max_deviation"
                status = "ok" if r["violations"] == 0 else f"FAIL ({r['violations']})"
                lines.append(f"{sid:28s} n={r['dim']:<3d} {key}={r[key]:.6g} samples={r['samples']} {status}")
        lines.append(f"total violations: {payload['total_violations']}")
    elif command == "pinch":
        for v in payload["verdicts"]:
            lines.append(
                f"{v['theorem']:13s} {v['model']}: lhs={v['lhs']:.10g} rhs={v['rhs']:.10g} "
                f"ratio={v['ratio']:.10g} holds={v['holds']}" + (" (degenerate)" if v["degenerate"] else "")
            )
        for s in payload["not_applicable"]:
            lines.append(f"{s['theorem']:13s} not applicable: {s['reason']}")
    elif command == "sharpness":
        for r in payload["results"]:
            lines.append(
                f"{r['inequality_id']:12s} n={r['dim']:<3d} best_ratio={r['best_ratio']:.12f} "
                f"iters={r['iters_used']} converged={r['converged']} (empirical)"
            )
        for v in payload["violations"]:
            lines.append(f"VIOLATION {v['id']} n={v['dim']} ratio={v['ratio']:.17g}")
    elif command == "constants":
        for r in payload["constants"]:
            lines.append(
                f"n={r['n']:<3d} C={r['C']:.17g} [{r['C_symbolic']}]  A={r['A']:.17g} [{r['A_symbolic']}]  "
                f"derive_A={r['derive_A']:.17g} agree={r['agreement']}  pinchein={r['pinchein_coeff']:.6g} "
                f"below_A={r['pinchein_below_A']}"
            )
    else:
        for r in payload["models"]:
            checks = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in r["checks"].items())
            lines.append(
                f"{r['model']:6s} n={r['dim']} R={r['scalar']:.10g} |W|^2={r['weyl_sq']:.10g} "
                f"V={r['volume']:.10g} chi={r['euler_char']} {checks}"
            )
    return "\n".join(lines) + "\n"


def render(command: str, fmt: str, manifest: RunManifest, payload: dict, csv_rows) -> str:
    if fmt == "json":
        return dumps_canonical({"schema_version": SCHEMA_VERSION, "manifest": manifest, **payload}) + "\n"
    if fmt == "csv":
        if csv_rows is None:
            raise UsageError(f"csv output is available for {', '.join(CSV_COMMANDS)} only")
        if not csv_rows:
            return ""
        columns = [k for k in csv_rows[0] if not k.startswith("_")]
        return rows_to_csv(csv_rows, columns)
    return _text(command, payload)


def run(argv=None) -> tuple[int, str]:
    """Parse, execute and render; returns (exit code, rendered output)."""
    args = build_parser().parse_args(argv)
    config = load_config(args.config)
    params = resolve(args.command, args, config)
    if params["format"] not in ("text", "json", "csv"):
        raise UsageError(f"unknown format {params['format']!r}")
    if params["format"] == "csv" and args.command not in CSV_COMMANDS:
        raise UsageError(f"csv output is available for {', '.join(CSV_COMMANDS)} only")
    code, payload, csv_rows = COMMANDS[args.command](params)
    shown = {k: v for k, v in params.items() if k not in ("format", "out")}
    manifest = RunManifest(args.command, shown, seed=int(params.get("seed") or 0))
    text = render(args.command, params["format"], manifest, payload, csv_rows)
    if params["out"]:
        with open(params["out"], "w") as fh:
            fh.write(text)
    return code, text


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO if ("-v" in argv or "--verbose" in argv) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        code, text = run(argv)
    except UsageError as exc:
        print(f"curvpinch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"curvpinch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
