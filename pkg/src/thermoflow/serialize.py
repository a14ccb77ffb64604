"""JSON and CSV formats for specs, potentials, roofs and reports."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Any, Iterable

from .construction import VerificationReport
from .errors import InputError
from .subshift import SftSpec, as_word
from .suspension import Roof, SuspensionMeasure
from .thermo import MarkovMeasure, Potential

SIG_DIGITS = 12
VERIFY_COLUMNS = ("N", "P_N", "gap", "penalty_mass", "flow_entropy_liftY", "c_star",
                  "enclosure_lo", "enclosure_hi", "flags")


def fmt(x: float) -> str:
    return format(float(x), f".{SIG_DIGITS}g")


def rounded(x: float) -> float:
    return float(fmt(x))


def _read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def spec_from_dict(d: dict) -> SftSpec:
    try:
        return SftSpec(int(d["alphabet_size"]), tuple(as_word(w) for w in d.get("forbidden", [])),
                       str(d.get("label", "")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad spec: {exc!r}") from None


def spec_to_dict(s: SftSpec) -> dict:
    return {"alphabet_size": s.alphabet_size,
            "forbidden": [list(w) for w in s.forbidden_words],
            "label": s.label}


def load_spec(path) -> SftSpec:
    return spec_from_dict(_read_json(path))


def potential_from_dict(d: dict, spec: SftSpec | None = None) -> Potential:
    try:
        values = {as_word(e["word"]): float(e["value"]) for e in d["values"]}
        phi = Potential(int(d["depth"]), values, float(d.get("residual_bound", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad potential: {exc!r}") from None
    if spec is not None:
        phi.validate(spec)
    return phi


def potential_to_dict(phi: Potential) -> dict:
    return {"depth": phi.depth,
            "values": [{"word": list(w), "value": rounded(x)} for w, x in phi.values.items()],
            "residual_bound": rounded(phi.residual_bound)}


def load_potential(path, spec: SftSpec | None = None) -> Potential:
    return potential_from_dict(_read_json(path), spec)


def roof_from_dict(d: dict, spec: SftSpec | None = None) -> Roof:
    return Roof(potential_from_dict(d, spec), float(d.get("constant", 0.0)))


def roof_to_dict(roof: Roof) -> dict:
    return {**potential_to_dict(roof.base), "constant": rounded(roof.constant)}


def load_roof(path, spec: SftSpec | None = None) -> Roof:
    return roof_from_dict(_read_json(path), spec)


def markov_measure_to_dict(m: MarkovMeasure) -> dict:
    return {"states": [list(w) for w in m.system.states],
            "trans": [[rounded(x) for x in row] for row in m.trans],
            "stationary": [rounded(x) for x in m.stationary]}


def suspension_measure_to_dict(sm: SuspensionMeasure) -> dict:
    return {**markov_measure_to_dict(sm.base_measure),
            "normalizer": rounded(sm.normalizer),
            "flow_entropy": rounded(sm.flow_entropy)}


def _row_flags(rec) -> str:
    bad = []
    if abs(rec.normalization) > 1e-9:
        bad.append("normalization")
    if abs(rec.c_star - 1.0) > 1e-8:
        bad.append("c_star")
    if rec.gap < -1e-10:
        bad.append("negative_gap")
    return ";".join(bad) or "ok"


def verification_rows(r: VerificationReport) -> list[dict]:
    return [{
        "N": rec.N,
        "P_N": rounded(rec.pressure),
        "gap": rounded(rec.gap),
        "penalty_mass": rounded(rec.penalty_mass),
        "flow_entropy_liftY": [rounded(h) for h in rec.flow_entropy_lift_Y],
        "c_star": rounded(rec.c_star),
        "enclosure_lo": rounded(rec.enclosure.lower),
        "enclosure_hi": rounded(rec.enclosure.upper),
        "flags": _row_flags(rec),
    } for rec in r.records]


def verification_to_dict(r: VerificationReport) -> dict:
    return {"X": spec_to_dict(r.X), "Y": spec_to_dict(r.Y), "kind": r.kind,
            "window": r.window, "theta": r.theta, "h_top_Y": rounded(r.h_top_Y),
            "n_mme_Y": r.n_mme_Y, "flags": dict(r.flags), "passed": r.passed,
            "first_failure": r.first_failure, "note": r.note,
            "records": verification_rows(r)}


def _cell(v: Any) -> str:
    if isinstance(v, float):
        return fmt(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def to_csv(rows: Iterable[dict], columns: Iterable[str] | None = None,
           meta: dict | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}={_cell(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def _round_floats(obj: Any) -> Any:
    if isinstance(obj, float):
        return rounded(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(_round_floats(obj), indent=2, sort_keys=True) + "\n"
