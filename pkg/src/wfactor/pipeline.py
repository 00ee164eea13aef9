"""End-to-end commands shared by the CLI, the scripts and the tests."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import io
from .action import OneParamAction, boundary, project_fan, quotient_semigroup
from .cobordism import (
    CobordismError,
    CobordismFan,
    FactorizationTrace,
    bubbles,
    collapse,
    is_collapsible,
    precedes,
    standard_cobordism,
    validate_cobordism,
)
from .cones import Cone, Fan, resolve_fan, star_subdivision
from .lattice import as_vec, hilbert_basis
from .torific import alpha_torific_generators, torify

FIXTURE_ENV = "WFACTOR_FIXTURES"


class TheoremCheckFailed(RuntimeError):
    """A check that holds for every valid input by theory has failed."""

    def __init__(self, message: str, defects: list[str] | None = None):
        super().__init__(message)
        self.defects = defects or [message]


@dataclass
class RunConfig:
    command: str = "factor"
    fan: Path | None = None
    centers: Path | None = None
    a: tuple[int, ...] | None = None
    characters: tuple[int, ...] | None = None
    degree_cap: int | None = None
    torify: bool = False
    out: Path | None = None
    seed: int = 0
    trials: int = 200
    fixtures: Path | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def fixture_dir(self) -> Path:
        if self.fixtures is not None:
            return Path(self.fixtures)
        env = os.environ.get(FIXTURE_ENV)
        if env:
            return Path(env)
        return Path(__file__).resolve().parents[2] / "tests" / "fixtures"


def centers_from_json(doc: Any) -> list[tuple[int, ...]]:
    if isinstance(doc, dict):
        doc = doc.get("centers")
    if not isinstance(doc, list):
        raise io.FormatError("centers must be a list of integer vectors")
    return [io._ints(c, "center") for c in doc]


def factor(sigma: Fan, centers: list[tuple[int, ...]], with_torify: bool = False) -> tuple[CobordismFan, FactorizationTrace]:
    """Standard cobordism of the centers, validated and collapsed."""
    cb = standard_cobordism(sigma, centers)
    report = validate_cobordism(cb)
    if not report.ok:
        raise TheoremCheckFailed("cobordism failed validation", [c.name for c in report.checks if not c.ok])
    try:
        trace = collapse(cb, torify_groups=with_torify)
    except CobordismError as exc:
        raise TheoremCheckFailed(f"collapse of a standard cobordism failed: {exc}") from exc
    expected = tuple(reversed(cb.stages))
    if trace.quotients != expected:
        raise TheoremCheckFailed("collapse does not retrace the subdivisions")
    defects = [d for s in trace.steps for r in s.torifications for d in r.defects]
    if defects:
        raise TheoremCheckFailed("torification of a collapse group failed", defects)
    return cb, trace


def factor_document(sigma: Fan, centers: list[tuple[int, ...]], with_torify: bool = False) -> dict:
    cb, trace = factor(sigma, centers, with_torify)
    doc = io.trace_to_json(trace)
    doc["input"] = {"fan": io.fan_to_json(sigma), "centers": [list(c) for c in centers]}
    doc["cobordism"] = io.cobordism_to_json(cb)
    return doc


# ---------------------------------------------------------------------------
# fixtures


def _cone(doc) -> Cone:
    return Cone.from_rays([tuple(r) for r in doc])


def _fx_torify(inp: dict) -> dict:
    sigma = _cone(inp["sigma"])
    r = torify(sigma, OneParamAction(inp["a"]), inp.get("characters"))
    return {
        "product_expansion": sorted(list(e) for e in r.expansion),
        "product_minimal": sorted(list(e) for e in r.product.exponents),
        "ideals": {str(k): sorted(list(e) for e in v.exponents) for k, v in sorted(r.ideals.items())},
        "fan": sorted(sorted(list(x) for x in c.rays) for c in r.fan.cones),
        "dtor": sorted(list(x) for x in r.dtor),
        "heart_normals": sorted([ch.j, list(ch.normal)] for ch in r.heart.checks),
        "quasielementary": r.quasielementary.ok,
        "defects": r.defects,
    }


def _fx_alpha(inp: dict) -> dict:
    I = alpha_torific_generators(_cone(inp["sigma"]), OneParamAction(inp["a"]), inp["alpha"])
    return {"exponents": sorted(list(e) for e in I.exponents)}


def _fx_boundary(inp: dict) -> dict:
    act = OneParamAction(inp["a"])
    fan = Fan.from_cones([_cone(c) for c in inp["cones"]])
    out = {}
    for side in ("lower", "upper"):
        b = boundary(fan, act, side).fan
        out[side] = sorted(sorted(list(x) for x in c.rays) for c in b.cones)
        out[side + "_quotient"] = io.fan_to_json(project_fan(b, act)) if not b.is_empty else None
    return out


def _fx_factor(inp: dict) -> dict:
    sigma = Fan.from_cones([_cone(c) for c in inp["fan"]])
    cb, trace = factor(sigma, [tuple(c) for c in inp["centers"]])
    return {
        "bubbles": [sorted(list(x) for x in b.cone.rays) for b in bubbles(cb)],
        "quotients": [io.fan_to_json(w) for w in trace.quotients],
    }


def _fx_collapsible(inp: dict) -> dict:
    fan = Fan.from_cones([_cone(c) for c in inp["cones"]])
    cb = CobordismFan(fan, OneParamAction(inp["a"]))
    bs = sorted(bubbles(cb), key=lambda b: sorted(b.cone.rays))
    v = is_collapsible(cb)
    return {
        "collapsible": v.ok,
        "precedes": [[precedes(b1, b2, cb) for b2 in bs] for b1 in bs],
        "bubbles": [sorted(list(x) for x in b.cone.rays) for b in bs],
    }


def _fx_hilbert(inp: dict) -> dict:
    return {"basis": sorted(list(v) for v in hilbert_basis(_cone(inp["cone"])))}


def _fx_quotient_semigroup(inp: dict) -> dict:
    return {"generators": sorted(list(v) for v in quotient_semigroup(_cone(inp["cone"]), OneParamAction(inp["a"])))}


def _fx_resolve(inp: dict) -> dict:
    fan = Fan.from_cones([_cone(c) for c in inp["cones"]])
    return {"fan": io.fan_to_json(resolve_fan(fan))}


def _fx_star(inp: dict) -> dict:
    fan = Fan.from_cones([_cone(c) for c in inp["cones"]])
    return {"fan": io.fan_to_json(star_subdivision(fan, as_vec(inp["rho"])))}


FIXTURE_OPS: dict[str, Callable[[dict], dict]] = {
    "torify": _fx_torify,
    "alpha_torific_generators": _fx_alpha,
    "boundary": _fx_boundary,
    "factor": _fx_factor,
    "collapsible": _fx_collapsible,
    "hilbert_basis": _fx_hilbert,
    "quotient_semigroup": _fx_quotient_semigroup,
    "resolve_fan": _fx_resolve,
    "star_subdivision": _fx_star,
}


@dataclass(frozen=True)
class FixtureOutcome:
    name: str
    provenance: str
    ok: bool
    diff: str = ""


def _diff(expected: Any, got: Any, path: str = "$") -> str:
    if isinstance(expected, dict) and isinstance(got, dict):
        for k in sorted(set(expected) | set(got)):
            if k not in got:
                return f"{path}.{k}: missing in output"
            if k not in expected:
                return f"{path}.{k}: unexpected in output"
            d = _diff(expected[k], got[k], f"{path}.{k}")
            if d:
                return d
        return ""
    if expected != got:
        return f"{path}: expected {io.dumps(expected).strip()} got {io.dumps(got).strip()}"
    return ""


def replay_fixture(doc: dict) -> FixtureOutcome:
    name = doc.get("name", "?")
    op = FIXTURE_OPS.get(doc.get("op"))
    if op is None:
        return FixtureOutcome(name, doc.get("provenance", "?"), False, f"unknown op {doc.get('op')!r}")
    got = op(doc["inputs"])
    # round-trip through JSON so tuples and lists compare alike
    got = json.loads(io.dumps(got))
    d = _diff(doc["expected"], got)
    return FixtureOutcome(name, doc.get("provenance", "?"), not d, d)


def verify_fixtures(directory: Path) -> list[FixtureOutcome]:
    out = []
    for path in sorted(Path(directory).glob("*.json")):
        doc = io.load(path)
        try:
            out.append(replay_fixture(doc))
        except Exception as exc:  # a crash is reported as a mismatch, not raised
            out.append(FixtureOutcome(doc.get("name", path.stem), doc.get("provenance", "?"), False, f"{type(exc).__name__}: {exc}"))
    return out
