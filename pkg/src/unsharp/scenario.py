"""Scenario documents: JSON in, validated library objects out.

Format reference
----------------
A scenario is a JSON object::

    {
      "dimension": 2,
      "objects": {
        "rho": {"kind": "state", "payload": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]},
        "E":   {"kind": "effect", "payload": [[0.5, 0], [0, 0.5]]},
        "Z":   {"kind": "pvm", "payload": {"observable": [[1, 0], [0, -1]]}},
        "A":   {"kind": "povm", "payload": {"unsharp_spin": {"direction": [1, 0, 0], "eta": 0.9}}},
        "K":   {"kind": "kernel", "payload": {"weights": [[0.9, 0.1], [0.1, 0.9]]}}
      },
      "command": {"name": "prob", "args": {"state": "rho", "effect": "E"}, "params": {}}
    }

Matrices are row-major nested lists. A complex entry is ``[re, im]``; a bare
number is read as real. Every object has the scenario's ``dimension``
unless it sets its own ``"dimension"`` (a two-qubit state in a ``chsh``
scenario, for instance).

Object kinds and payloads:

``state``, ``effect``, ``observable``
    a matrix.
``pvm``, ``povm``
    ``{"elements": [matrix, ...], "labels": [...], "values": [...]}`` with
    labels and values optional; or ``{"observable": matrix}`` (pvm, spectral
    measure); or ``{"spin": [x, y, z]}`` (pvm); or
    ``{"unsharp_spin": {"direction": [x, y, z], "eta": e}}`` (povm).
``kernel``
    ``{"weights": [[...], ...], "labels": [...], "values": [...]}``; column
    ``j`` is the output distribution for input outcome ``j``.

Dilation outputs live on ``C^d (x) C^n``; index ``a * n + i`` is system
level ``a`` with ancilla level ``i`` (system-major).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ScenarioError, ValidationError
from .observables import (
    GeneralizedMeasure,
    OutcomeSpace,
    ProjectiveMeasure,
    StochasticKernel,
    pvm_from_observable,
    sharp_spin,
    unsharp_spin,
)
from .operator_core import DEFAULT_GROUP_TOL, DEFAULT_TOL, as_matrix, hermitian_part
from .states_effects import DensityOperator, Effect

KINDS = ("state", "effect", "observable", "pvm", "povm", "kernel")
MEASURE_KINDS = ("pvm", "povm")

# argument name -> accepted kinds; a tuple value marks a list argument
COMMANDS: dict[str, dict[str, tuple]] = {
    "validate": {},
    "prob": {"state": ("state",), "effect": ("effect",)},
    "classify": {"effect": ("effect",)},
    "smear": {"measure": MEASURE_KINDS, "kernel": ("kernel",)},
    "coexist": {"a": MEASURE_KINDS, "b": MEASURE_KINDS},
    "dilate": {"povm": MEASURE_KINDS},
    "uncertainty": {"state": ("state",), "a": ("observable",), "b": ("observable",)},
    "chsh": {
        "state": ("state",),
        "a0": ("observable",),
        "a1": ("observable",),
        "b0": ("observable",),
        "b1": ("observable",),
    },
    "simulate": {"state": ("state",), "measure": MEASURE_KINDS},
    "sequence": {"state": ("state",), "measures": [MEASURE_KINDS]},
}
OPTIONAL_ARGS = {"classify": {"state": ("state",)}}


@dataclass(frozen=True, eq=False)
class ScenarioObject:
    name: str
    kind: str
    value: object
    dimension: int


@dataclass(frozen=True)
class Command:
    name: str
    args: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Scenario:
    dimension: int
    objects: dict[str, ScenarioObject]
    command: Command

    def get(self, name: str) -> object:
        return self.objects[name].value


def decode_matrix(raw, name: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Nested row-major lists of numbers or ``[re, im]`` pairs to a complex array."""
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) for r in raw):
        raise ScenarioError(f"{name}: matrix must be a nonempty list of rows")
    out = []
    for r in raw:
        row = []
        for x in r:
            if isinstance(x, bool):
                raise ScenarioError(f"{name}: boolean matrix entry")
            if isinstance(x, (int, float)):
                row.append(complex(x))
            elif isinstance(x, list) and len(x) == 2 and all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
            ):
                row.append(complex(x[0], x[1]))
            else:
                raise ScenarioError(f"{name}: bad matrix entry {x!r}; expected number or [re, im]")
        out.append(row)
    if len({len(r) for r in out}) != 1:
        raise ScenarioError(f"{name}: ragged matrix")
    M = np.array(out, dtype=complex)
    if rows is not None and M.shape[0] != rows or cols is not None and M.shape[1] != cols:
        raise DimensionError(f"{name}: shape {M.shape}, expected ({rows}, {cols})")
    return M


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _reals(raw, name):
    if not isinstance(raw, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise ScenarioError(f"{name}: expected a list of numbers")
    return [float(v) for v in raw]


def _build(name, kind, payload, d, tol, group_tol):
    where = f"object {name!r}"
    if kind in ("state", "effect", "observable"):
        M = decode_matrix(payload, where, d, d)
        if kind == "state":
            return DensityOperator(M, tol)
        if kind == "effect":
            return Effect(M, tol)
        dev = float(np.max(np.abs(M - M.conj().T)))
        if dev > tol:
            raise ValidationError("observable is not Hermitian", invariant="hermitian", deviation=dev)
        return hermitian_part(as_matrix(M))
    if kind == "kernel":
        if not isinstance(payload, dict) or "weights" not in payload:
            raise ScenarioError(f"{where}: kernel payload needs 'weights'")
        W = payload["weights"]
        if not isinstance(W, list) or not all(isinstance(r, list) for r in W):
            raise ScenarioError(f"{where}: weights must be a list of rows")
        W = [_reals(r, where) for r in W]
        if len({len(r) for r in W}) != 1:
            raise ScenarioError(f"{where}: ragged weights")
        labels = payload.get("labels")
        values = payload.get("values")
        return StochasticKernel(
            np.array(W),
            None if labels is None else tuple(labels),
            None if values is None else tuple(_reals(values, where)),
        )
    # pvm / povm
    if not isinstance(payload, dict):
        raise ScenarioError(f"{where}: {kind} payload must be an object")
    cls = ProjectiveMeasure if kind == "pvm" else GeneralizedMeasure
    if "elements" in payload:
        elems = payload["elements"]
        if not isinstance(elems, list) or not elems:
            raise ScenarioError(f"{where}: 'elements' must be a nonempty list")
        mats = tuple(decode_matrix(e, f"{where} element {k}", d, d) for k, e in enumerate(elems))
        labels = payload.get("labels")
        values = payload.get("values")
        values = None if values is None else _reals(values, where)
        if labels is None:
            outcomes = OutcomeSpace.from_values(values) if values is not None else OutcomeSpace.indexed(len(mats))
        else:
            outcomes = OutcomeSpace(tuple(labels), values)
        return cls(outcomes, mats, tol)
    if kind == "pvm" and "observable" in payload:
        return pvm_from_observable(decode_matrix(payload["observable"], where, d, d), group_tol, tol)
    if kind == "pvm" and "spin" in payload:
        _require_qubit(where, d)
        return sharp_spin(_reals(payload["spin"], where), tol)
    if kind == "povm" and "unsharp_spin" in payload:
        _require_qubit(where, d)
        opts = payload["unsharp_spin"]
        if not isinstance(opts, dict) or "direction" not in opts or "eta" not in opts:
            raise ScenarioError(f"{where}: unsharp_spin needs 'direction' and 'eta'")
        return unsharp_spin(_reals(opts["direction"], where), float(opts["eta"]), tol)
    raise ScenarioError(f"{where}: unrecognised {kind} payload keys {sorted(payload)}")


def _require_qubit(where, d):
    if d != 2:
        raise DimensionError(f"{where}: spin constructors need dimension 2, got {d}")


def _wrap(name, exc):
    """Re-raise a library error with the object's name in front."""
    msg = f"object {name!r}: {exc}" if not str(exc).startswith("object ") else str(exc)
    if isinstance(exc, ValidationError):
        return ValidationError(msg, invariant=exc.invariant, deviation=exc.deviation, failures=exc.failures)
    return type(exc)(msg)


def load_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"syntax error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    return doc


def parse_scenario(text_or_doc, tol: float = DEFAULT_TOL, group_tol: float = DEFAULT_GROUP_TOL) -> Scenario:
    """Parse and validate a scenario (JSON text or an already-decoded dict)."""
    doc = load_document(text_or_doc) if isinstance(text_or_doc, str) else text_or_doc
    for key in ("dimension", "objects", "command"):
        if key not in doc:
            raise ScenarioError(f"missing top-level key {key!r}")
    d = doc["dimension"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ScenarioError("dimension must be a positive integer")
    raw_objects = doc["objects"]
    if not isinstance(raw_objects, dict):
        raise ScenarioError("objects must be a JSON object")
    cmd = doc["command"]
    if isinstance(cmd, str):
        cmd = {"name": cmd}
    if not isinstance(cmd, dict) or "name" not in cmd:
        raise ScenarioError("command must be an object with a 'name'")
    name = cmd["name"]
    if name not in COMMANDS:
        raise ScenarioError(f"unknown command {name!r}; expected one of {sorted(COMMANDS)}")
    args = cmd.get("args", {})
    params = cmd.get("params", {})
    if not isinstance(args, dict) or not isinstance(params, dict):
        raise ScenarioError("command args and params must be objects")

    objects = {}
    for oname, entry in raw_objects.items():
        if not isinstance(entry, dict) or "kind" not in entry or "payload" not in entry:
            raise ScenarioError(f"object {oname!r} needs 'kind' and 'payload'")
        kind = entry["kind"]
        if kind not in KINDS:
            raise ScenarioError(f"object {oname!r}: unknown kind {kind!r}")
        od = entry.get("dimension", d)
        if not isinstance(od, int) or isinstance(od, bool) or od < 1:
            raise ScenarioError(f"object {oname!r}: dimension must be a positive integer")
        try:
            value = _build(oname, kind, entry["payload"], od, tol, group_tol)
        except ScenarioError as exc:
            raise ScenarioError(str(exc) if str(exc).startswith("object ") else f"object {oname!r}: {exc}") from exc
        except (ValidationError, DimensionError) as exc:
            raise _wrap(oname, exc) from exc
        objects[oname] = ScenarioObject(oname, kind, value, od)

    if not objects:
        raise ValidationError("no objects", invariant="nonempty objects")
    signature = dict(COMMANDS[name])
    optional = OPTIONAL_ARGS.get(name, {})
    for arg in args:
        if arg not in signature and arg not in optional:
            raise ValidationError(f"command {name!r} takes no argument {arg!r}", invariant="signature")
    for arg, kinds in {**signature, **{k: v for k, v in optional.items() if k in args}}.items():
        if arg not in args:
            raise ValidationError(f"command {name!r} missing argument {arg!r}", invariant="signature")
        refs = args[arg]
        if isinstance(kinds, list):
            if not isinstance(refs, list) or not refs:
                raise ValidationError(f"argument {arg!r} must be a nonempty list of names", invariant="signature")
            kinds = kinds[0]
        else:
            refs = [refs]
        for ref in refs:
            if not isinstance(ref, str) or ref not in objects:
                raise ValidationError(f"argument {arg!r}: unknown object {ref!r}", invariant="reference")
            if objects[ref].kind not in kinds:
                raise ValidationError(
                    f"argument {arg!r}: object {ref!r} is a {objects[ref].kind}, expected {' or '.join(kinds)}",
                    invariant="kind",
                )
    return Scenario(d, objects, Command(name, dict(args), dict(params)))


def _encode_object(obj: ScenarioObject) -> dict:
    v = obj.value
    if obj.kind in ("state", "effect"):
        payload = encode_matrix(v.matrix)
    elif obj.kind == "observable":
        payload = encode_matrix(v)
    elif obj.kind == "kernel":
        payload = {"weights": v.weights.tolist()}
        if v.labels is not None:
            payload["labels"] = list(v.labels)
        if v.values is not None:
            payload["values"] = list(v.values)
    else:
        payload = {"elements": [encode_matrix(F) for F in v.effects], "labels": list(v.labels)}
        if v.outcomes.values is not None:
            payload["values"] = list(v.outcomes.values)
    out = {"kind": obj.kind, "payload": payload}
    return out


def serialize_scenario(scenario: Scenario) -> dict:
    """Canonical document for ``scenario``; measures are written out element by element."""
    objects = {}
    for name, obj in scenario.objects.items():
        enc = _encode_object(obj)
        if obj.dimension != scenario.dimension:
            enc["dimension"] = obj.dimension
        objects[name] = enc
    cmd = scenario.command
    return {
        "dimension": scenario.dimension,
        "objects": objects,
        "command": {"name": cmd.name, "args": dict(cmd.args), "params": dict(cmd.params)},
    }
