"""Command-line front end.

Every subcommand builds a report (metadata plus a list of rows) and writes
it as JSON or CSV.  Exit codes: 0 success, 1 verification verdict failed,
2 parse/input error, 3 degenerate system, 4 hypothesis violation,
5 numeric failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .construction import (DEFAULT_THETA, DEFAULT_WEIGHTS, block_depth, build_penalty,
                           build_roof, build_tau, convergence_sweep, theorem_surrogate_check)
from .errors import InputError, ThermoflowError
from .serialize import (VERIFY_COLUMNS, load_potential, load_roof, load_spec,
                        markov_measure_to_dict, roof_to_dict, spec_to_dict,
                        suspension_measure_to_dict, to_csv, to_json, verification_rows)
from .subshift import compile, dyck_count
from .suspension import Roof, flow_mmes, flow_topological_entropy
from .thermo import (Potential, equilibrium_states, integrate, markov_entropy, pressure,
                     pressure_enclosure, variational_check)

DEFAULTS = {
    "format": "json", "seed": 0, "theta": DEFAULT_THETA,
    "weights": list(DEFAULT_WEIGHTS), "kind": "indicator", "weight": 10.0,
    "trials": 100, "n": 12, "tol_gap": 1e-3, "tol_mass": 1e-3, "roof_constant": 1.0,
}


def _weights(text: str) -> list[float]:
    try:
        ws = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}") from None
    return [int(w) if w.is_integer() else w for w in ws]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values; flags override it")
    common.add_argument("--spec", help="SFT spec JSON (the ambient shift X)")
    common.add_argument("--subsystem", help="SFT spec JSON of the target subshift Y")
    common.add_argument("--depth", type=int, help="block depth / penalty window k")
    common.add_argument("--theta", type=float, help="geometric penalty decay in (0, 1)")
    common.add_argument("--weights", type=_weights, help="comma-separated penalty weights N")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="random seed for sampling")
    common.add_argument("--format", choices=["csv", "json"])

    p = argparse.ArgumentParser(prog="thermoflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"thermoflow {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("entropy", parents=[common], help="topological entropy of an SFT")
    sp = sub.add_parser("pressure", parents=[common], help="pressure and enclosure")
    sp.add_argument("--potential", help="potential JSON (default: zero potential)")
    sp = sub.add_parser("equilibrium", parents=[common], help="equilibrium states")
    sp.add_argument("--potential", help="potential JSON (default: zero potential)")
    sp.add_argument("--trials", type=int, help="random measures for the variational check")
    sp = sub.add_parser("flow", parents=[common], help="flow entropy and flow MMEs")
    sp.add_argument("--roof", help="roof JSON")
    sp.add_argument("--roof-constant", type=float, help="constant roof value")
    sp = sub.add_parser("construct-roof", parents=[common], help="build rho = P(tau) - tau")
    sp.add_argument("--kind", choices=["indicator", "geometric"])
    sp.add_argument("--weight", type=float, help="penalty weight N")
    sp = sub.add_parser("verify", parents=[common], help="convergence sweep in N")
    sp.add_argument("--kind", choices=["indicator", "geometric"])
    sp.add_argument("--tol-gap", type=float)
    sp.add_argument("--tol-mass", type=float)
    sp = sub.add_parser("dyck-count", parents=[common], help="Dyck word counts")
    sp.add_argument("--n", type=int, help="largest word length")
    return p


def resolve_config(args: argparse.Namespace) -> dict:
    """Flags override the config file, which overrides the defaults."""
    from_file = {}
    if args.config:
        try:
            from_file = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {args.config}: {exc}") from None
        from_file = {k.replace("-", "_"): v for k, v in from_file.items()}
    cfg = {"command": args.command}
    keys = set(vars(args)) | set(from_file) | set(DEFAULTS)
    for key in sorted(keys - {"command", "config"}):
        flag = getattr(args, key, None)
        cfg[key] = flag if flag is not None else from_file.get(key, DEFAULTS.get(key))
    for key in ("theta", "tol_gap", "tol_mass"):
        if cfg.get(key) is not None and not cfg[key] > 0:
            raise InputError(f"{key} must be positive")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _require(cfg: dict, key: str) -> str:
    if not cfg.get(key):
        raise InputError(f"--{key.replace('_', '-')} is required for {cfg['command']}")
    return cfg[key]


def _system(spec, cfg, min_depth: int = 1):
    k = cfg.get("depth") or max(1, spec.memory - 1, min_depth)
    return compile(spec, k)


def _potential(cfg, spec):
    if cfg.get("potential"):
        return load_potential(cfg["potential"], spec)
    return Potential.zero(spec)


def cmd_entropy(cfg: dict) -> tuple[dict, list[dict]]:
    spec = load_spec(_require(cfg, "spec"))
    b = _system(spec, cfg)
    res = pressure(b, Potential.zero(spec))
    row = {"label": spec.label, "h_top": res.value, "perron_root": res.perron_root,
           "depth": b.depth, "states": b.size, "component_size": len(res.component),
           "iterations": res.iterations}
    return {}, [row]


def cmd_pressure(cfg: dict) -> tuple[dict, list[dict]]:
    spec = load_spec(_require(cfg, "spec"))
    phi = _potential(cfg, spec)
    b = _system(spec, cfg, phi.depth - 1)
    res = pressure(b, phi)
    enc = pressure_enclosure(b, phi)
    return {}, [{"pressure": res.value, "perron_root": res.perron_root,
                 "enclosure_lo": enc.lower, "enclosure_hi": enc.upper,
                 "component_size": len(res.component), "iterations": res.iterations}]


def cmd_equilibrium(cfg: dict) -> tuple[dict, list[dict]]:
    spec = load_spec(_require(cfg, "spec"))
    phi = _potential(cfg, spec)
    b = _system(spec, cfg, phi.depth - 1)
    P = pressure(b, phi).value
    check = variational_check(b, phi, int(cfg["trials"]), seed=int(cfg["seed"]))
    rows = []
    for i, m in enumerate(equilibrium_states(b, phi)):
        d = markov_measure_to_dict(m)
        rows.append({"index": i, "pressure": P, "entropy": markov_entropy(m),
                     "integral": integrate(m, phi), "stationary": d["stationary"],
                     "trans": [x for row in d["trans"] for x in row]})
    meta = {"states": [list(w) for w in b.states],
            "variational_max_excess": check.max_excess,
            "variational_equilibrium_gap": check.equilibrium_gap,
            "variational_passed": check.passed}
    return meta, rows


def cmd_flow(cfg: dict) -> tuple[dict, list[dict]]:
    spec = load_spec(_require(cfg, "spec"))
    if cfg.get("roof"):
        roof = load_roof(cfg["roof"], spec)
    else:
        roof = Roof.constant_roof(spec, float(cfg["roof_constant"]))
    b = _system(spec, cfg, roof.depth - 1)
    c = flow_topological_entropy(b, roof)
    rows = []
    for i, sm in enumerate(flow_mmes(b, roof)):
        d = suspension_measure_to_dict(sm)
        rows.append({"index": i, "c_star": c, "normalizer": sm.normalizer,
                     "flow_entropy": sm.flow_entropy,
                     "base_entropy": markov_entropy(sm.base_measure),
                     "stationary": d["stationary"]})
    return {"states": [list(w) for w in b.states]}, rows


def cmd_construct(cfg: dict) -> tuple[dict, list[dict]]:
    X = load_spec(_require(cfg, "spec"))
    Y = load_spec(_require(cfg, "subsystem"))
    k = cfg.get("depth") or max(1, Y.memory)
    xi = build_penalty(X, Y, k, cfg["kind"], float(cfg["theta"]))
    tau = build_tau(xi, float(cfg["weight"]))
    b = compile(X, block_depth(X, Y, window=k))
    roof = build_roof(b, tau)
    norm = pressure(b, roof.base.scaled(-1.0)).value
    rows = [{"word": list(w), "xi": xi.underlying(w), "tau": tau(w), "roof": roof(w)}
            for w in tau.values]
    meta = {"P_tau": roof.constant, "normalization": norm, "window": k,
            "roof": roof_to_dict(roof)}
    return meta, rows


def cmd_verify(cfg: dict) -> tuple[dict, list[dict]]:
    X = load_spec(_require(cfg, "spec"))
    Y = load_spec(_require(cfg, "subsystem"))
    report = convergence_sweep(X, Y, cfg.get("depth"), cfg["kind"], cfg["weights"],
                               float(cfg["theta"]))
    verdict = theorem_surrogate_check(report, float(cfg["tol_gap"]), float(cfg["tol_mass"]))
    meta = {"X": spec_to_dict(X)["label"], "Y": spec_to_dict(Y)["label"],
            "h_top_Y": report.h_top_Y, "n_mme_Y": report.n_mme_Y,
            "window": report.window, "flags": report.flags,
            "verdict": "pass" if verdict.passed else "fail",
            "failures": list(verdict.failures), "note": report.note}
    return meta, verification_rows(report)


def cmd_dyck(cfg: dict) -> tuple[dict, list[dict]]:
    n = int(cfg["n"])
    if n < 1:
        raise InputError("--n must be at least 1")
    rows, prev = [], 1
    for m in range(1, n + 1):
        c = dyck_count(m)
        rows.append({"n": m, "count": c, "ratio": c / prev, "growth": math.log(c) / m})
        prev = c
    return {"log3": math.log(3)}, rows


COMMANDS = {
    "entropy": cmd_entropy, "pressure": cmd_pressure, "equilibrium": cmd_equilibrium,
    "flow": cmd_flow, "construct-roof": cmd_construct, "verify": cmd_verify,
    "dyck-count": cmd_dyck,
}
COLUMNS = {"verify": VERIFY_COLUMNS}


def render(cfg: dict, meta: dict, rows: list[dict]) -> str:
    header = {"tool": "thermoflow", "version": __version__, "command": cfg["command"],
              "config_hash": config_hash(cfg), "seed": cfg["seed"]}
    if cfg["format"] == "csv":
        flat = {**header, **{k: v for k, v in meta.items() if not isinstance(v, dict)}}
        return to_csv(rows, COLUMNS.get(cfg["command"]), flat)
    return to_json({**header, "config": cfg, **meta, "rows": rows})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        meta, rows = COMMANDS[cfg["command"]](cfg)
        text = render(cfg, meta, rows)
    except ThermoflowError as exc:
        print(f"thermoflow {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg["command"] == "verify" and meta["verdict"] != "pass":
        return 1
    return 0
