"""JSON interchange: exact integers only, sorted keys, stable layout."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .cobordism import CobordismFan, FactorizationTrace
from .cones import Cone, Fan
from .torific import MonomialIdeal, TorificationResult


class FormatError(ValueError):
    """Malformed input document."""


def _ints(x: Any, what: str) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in x):
        raise FormatError(f"{what} must be a list of integers, got {x!r}")
    return tuple(x)


def cone_to_json(c: Cone) -> list[list[int]]:
    return [list(r) for r in c.rays]


def fan_to_json(f: Fan) -> dict:
    rays, cones = f.index_form()
    return {"rank": f.rank, "rays": [list(r) for r in rays], "maximal_cones": [list(c) for c in cones]}


def fan_from_json(doc: Any) -> Fan:
    """Read ``{"rank", "rays", "maximal_cones"}``; cones are lists of ray indices.

    ``"cones"`` is accepted in place of ``"maximal_cones"``.
    """
    if not isinstance(doc, dict):
        raise FormatError("fan document must be an object")
    if "maximal_cones" not in doc and "cones" in doc:
        doc = {**doc, "maximal_cones": doc["cones"]}
    for key in ("rays", "maximal_cones"):
        if key not in doc:
            raise FormatError(f"fan document lacks {key!r}")
    rays = [_ints(r, "ray") for r in doc["rays"]]
    rank = doc.get("rank", len(rays[0]) if rays else None)
    if not isinstance(rank, int) or rank <= 0:
        raise FormatError("fan rank must be a positive integer")
    if any(len(r) != rank for r in rays):
        raise FormatError("ray of the wrong length")
    cones = []
    for idx in doc["maximal_cones"]:
        idx = _ints(idx, "cone")
        if any(i < 0 or i >= len(rays) for i in idx):
            raise FormatError(f"cone {list(idx)} refers to a missing ray")
        if not idx:
            continue
        cones.append(Cone.from_rays([rays[i] for i in idx], rank))
    return Fan.from_cones(cones, rank)


def ideal_to_json(I: MonomialIdeal) -> dict:
    rays = sorted(I.sigma.rays)
    return {
        "ambient_cone": [rays.index(r) for r in I.sigma.rays],
        "rays": [list(r) for r in rays],
        "basis": [list(v) for v in I.basis],
        "exponents": [list(e) for e in I.exponents],
        "generators": [list(m) for m in I.generators],
    }


def torification_to_json(r: TorificationResult) -> dict:
    doc = r.to_json()
    doc["fan"] = fan_to_json(r.fan)
    doc["ideals"] = {str(k): ideal_to_json(v) for k, v in sorted(r.ideals.items())}
    doc["product"] = ideal_to_json(r.product)
    doc["quotient_pairs"] = [
        {"cone": cone_to_json(p.cone), "lower": fan_to_json(p.lower), "upper": fan_to_json(p.upper)}
        for p in r.quotient_pairs
    ]
    doc["heart_certificates"] = [
        {"cone": cone_to_json(c), "split": list(js), "det": d} for c, js, d in r.heart.certificates
    ]
    if r.quasielementary.witness is not None:
        w = r.quasielementary.witness
        doc["stacked_witness"] = {"lower": cone_to_json(w.lower), "upper": cone_to_json(w.upper), "point": list(w.point)}
    return doc


def cobordism_to_json(cb: CobordismFan) -> dict:
    return {
        "a": list(cb.act.a),
        "fan": fan_to_json(cb.fan),
        "provenance": cb.provenance,
        "stages": [fan_to_json(f) for f in cb.stages],
        "hints": [{"cone": cone_to_json(c), "level": k} for c, k in cb.hints],
    }


def cobordism_from_json(doc: Any) -> CobordismFan:
    from .action import OneParamAction

    if not isinstance(doc, dict) or "fan" not in doc or "a" not in doc:
        raise FormatError("cobordism document needs 'fan' and 'a'")
    fan = fan_from_json(doc["fan"])
    a = _ints(doc["a"], "a")
    if len(a) != fan.rank:
        raise FormatError("a has the wrong length")
    if not any(a):
        raise FormatError("a must be nonzero")
    stages = tuple(fan_from_json(f) for f in doc.get("stages", []))
    hints = tuple(
        (Cone.from_rays([_ints(r, "ray") for r in h["cone"]], fan.rank), int(h["level"])) for h in doc.get("hints", [])
    )
    return CobordismFan(fan, OneParamAction(a), doc.get("provenance", "user"), stages, hints)


def trace_to_json(t: FactorizationTrace) -> dict:
    steps = []
    for s in t.steps:
        step = {
            "level": s.level,
            "bubbles": [cone_to_json(c) for c in s.bubbles],
            "removed": [cone_to_json(c) for c in s.removed],
            "added": [cone_to_json(c) for c in s.added],
        }
        if s.torifications:
            step["torifications"] = [torification_to_json(r) for r in s.torifications]
        steps.append(step)
    return {
        "stages": [fan_to_json(f) for f in t.stages],
        "quotients": [fan_to_json(f) for f in t.quotients],
        "steps": steps,
    }


def _reject_floats(x: Any) -> None:
    if isinstance(x, float):
        raise FormatError("floats are not allowed in output")
    if isinstance(x, dict):
        for v in x.values():
            _reject_floats(v)
    elif isinstance(x, (list, tuple)):
        for v in x:
            _reject_floats(v)


def dumps(doc: Any) -> str:
    _reject_floats(doc)
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror}") from exc


def write(path: str | Path, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
