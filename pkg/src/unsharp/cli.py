"""Command-line front end.

    unsharp SCENARIO.json [--tolerance T] [--group-tol G] [--seed S]
                          [--samples N] [--format json|text] [--workers W]

Reads the scenario (``-`` for stdin), runs its command and writes a report
to stdout. Exit codes: 0 ok, 1 invalid input or runtime error, 2 no joint
observable found (``coexist``), 3 unparseable scenario.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .coexistence import SearchBudget, coexist_binary_povms
from .errors import ScenarioError, UnsharpError, ValidationError
from .naimark import alternate_dilation, dilate, spanning_states, verify_dilation
from .observables import chsh_value, expectation_variance, robertson_check, smear
from .operator_core import DEFAULT_GROUP_TOL, DEFAULT_TOL
from .scenario import Scenario, encode_matrix, parse_scenario
from .simulator import EnsembleConfig, run_sequences, sample_outcomes
from .states_effects import born_probability, classify, complement, is_real_in_state, is_regular, is_sharp

EXIT = {"ok": 0, "invalid": 1, "error": 1, "infeasible": 2}
PARSE_EXIT = 3


@dataclass
class Options:
    tolerance: float = DEFAULT_TOL
    group_tol: float = DEFAULT_GROUP_TOL
    seed: int | None = None
    samples: int | None = None
    format: str = "text"
    workers: int | None = None

    def resolved(self, params: dict) -> "Options":
        """Fill unset seed/samples from scenario params, then from defaults."""
        seed = self.seed if self.seed is not None else int(params.get("seed", 0))
        samples = self.samples if self.samples is not None else int(params.get("samples", 10000))
        return Options(self.tolerance, self.group_tol, seed, samples, self.format, self.workers)

    def as_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "group_tol": self.group_tol,
            "seed": self.seed,
            "samples": self.samples,
            "format": self.format,
        }


@dataclass
class Report:
    status: str
    command: str | None
    payload: dict | None = None
    diagnostics: list[str] = field(default_factory=list)
    options: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT[self.status]

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "command": self.command,
            "payload": self.payload,
            "diagnostics": list(self.diagnostics),
            "options": self.options,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"status: {self.status}", f"command: {self.command}"]
        if self.payload is not None:
            lines += _text_lines(self.payload, 0)
        lines += [f"diagnostic: {d}" for d in self.diagnostics]
        lines.append("options: " + ", ".join(f"{k}={v}" for k, v in self.options.items()))
        return "\n".join(lines)


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return str(x).lower() if isinstance(x, bool) else "null"
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _is_encoded_matrix(v) -> bool:
    return (
        isinstance(v, list) and v and all(isinstance(r, list) and r for r in v)
        and all(
            isinstance(z, list) and len(z) == 2 and all(isinstance(x, (int, float)) for x in z)
            for r in v
            for z in r
        )
    )


def _matrix_text(M, indent) -> list[str]:
    pad = " " * indent
    rows = []
    for r in M:
        cells = []
        for re_, im in r:
            z = complex(float(f"{re_:.12g}"), float(f"{im:.12g}"))
            cells.append(_fmt(z.real) if z.imag == 0 else f"{z.real:.12g}{z.imag:+.12g}j")
        rows.append(pad + "[" + ", ".join(cells) + "]")
    return rows


def _text_lines(obj, indent) -> list[str]:
    pad = " " * indent
    out = []
    for k, v in obj.items():
        if _is_encoded_matrix(v):
            out.append(f"{pad}{k}:")
            out += _matrix_text(v, indent + 2)
        elif isinstance(v, dict):
            out.append(f"{pad}{k}:")
            out += _text_lines(v, indent + 2)
        elif isinstance(v, list) and v and all(_is_encoded_matrix(m) for m in v):
            out.append(f"{pad}{k}:")
            for i, m in enumerate(v):
                out.append(f"{pad}  [{i}]")
                out += _matrix_text(m, indent + 4)
        elif isinstance(v, list) and v and all(isinstance(m, dict) for m in v):
            out.append(f"{pad}{k}:")
            for i, m in enumerate(v):
                out.append(f"{pad}  [{i}]")
                out += _text_lines(m, indent + 4)
        elif isinstance(v, list):
            out.append(f"{pad}{k}: [" + ", ".join(_fmt(x) for x in v) + "]")
        else:
            out.append(f"{pad}{k}: {_fmt(v)}")
    return out


def _measure_payload(M) -> dict:
    out = {"labels": list(M.labels), "effects": [encode_matrix(F) for F in M.effects]}
    if M.outcomes.values is not None:
        out["values"] = list(M.outcomes.values)
    return out


def _cmd_validate(sc: Scenario, opt: Options):
    summary = {}
    for name, obj in sc.objects.items():
        info = {"kind": obj.kind, "dimension": obj.dimension, "valid": True}
        if obj.kind == "effect":
            info["class"] = str(classify(obj.value, opt.tolerance))
        elif obj.kind in ("pvm", "povm"):
            info["outcomes"] = list(obj.value.labels)
        elif obj.kind == "kernel":
            info["shape"] = list(obj.value.shape)
        summary[name] = info
    return "ok", {"objects": summary}, []


def _cmd_prob(sc, opt):
    a = sc.command.args
    return "ok", {"w": born_probability(sc.get(a["state"]), sc.get(a["effect"]), opt.tolerance)}, []


def _cmd_classify(sc, opt):
    a = sc.command.args
    E = sc.get(a["effect"])
    payload = {
        "class": str(classify(E, opt.tolerance)),
        "sharp": is_sharp(E, opt.tolerance),
        "regular": is_regular(E, opt.tolerance),
        "complement": encode_matrix(complement(E).matrix),
    }
    if "state" in a:
        rho = sc.get(a["state"])
        payload["w"] = born_probability(rho, E, opt.tolerance)
        payload["real"] = is_real_in_state(E, rho, opt.tolerance)
    return "ok", payload, []


def _cmd_smear(sc, opt):
    a = sc.command.args
    return "ok", _measure_payload(smear(sc.get(a["measure"]), sc.get(a["kernel"]), opt.tolerance)), []


def _cmd_coexist(sc, opt):
    a = sc.command.args
    A, B = sc.get(a["a"]), sc.get(a["b"])
    p = sc.command.params
    budget = SearchBudget(
        depth=int(p.get("depth", 6)),
        starts=int(p.get("starts", 20)),
        seed=opt.seed,
    )
    res = coexist_binary_povms(A, B, budget, opt.tolerance)
    payload = {
        "found": res.found,
        "residual": res.residual,
        "method": res.method,
        "evaluations": res.evaluations,
        "G": encode_matrix(res.G),
        "constraint_min_eigenvalues": [float(w[0]) for w in res.constraint_eigenvalues(A.effects[0], B.effects[0])],
    }
    if res.found:
        payload["joint"] = _measure_payload(res.joint)
        return "ok", payload, []
    return "infeasible", payload, [
        f"no joint observable found within budget (best margin {res.residual:.6g}); this is not a proof of non-coexistence"
    ]


def _cmd_dilate(sc, opt):
    a = sc.command.args
    povm = sc.get(a["povm"])
    seed = sc.command.params.get("variant_seed")
    D = dilate(povm) if seed is None else alternate_dilation(povm, int(seed))
    payload = {
        "variant": "standard" if seed is None else f"alternate(seed={int(seed)})",
        "ancilla_dim": D.ancilla_dim,
        "index_order": "system-major: extended index = system_index * ancilla_dim + ancilla_index",
        "isometry": encode_matrix(D.isometry),
        "extended_projectors": [encode_matrix(P) for P in D.extended_pvm.projectors],
        "labels": list(D.extended_pvm.labels),
        "isometry_defect": D.isometry_defect(),
        "max_deviation": verify_dilation(povm, D, spanning_states(povm.dim)),
    }
    return "ok", payload, []


def _cmd_uncertainty(sc, opt):
    a = sc.command.args
    rho, A, B = sc.get(a["state"]), sc.get(a["a"]), sc.get(a["b"])
    ma, da = expectation_variance(rho, A, opt.tolerance)
    mb, db = expectation_variance(rho, B, opt.tolerance)
    lhs, rhs, holds = robertson_check(rho, A, B, opt.tolerance)
    payload = {"mean_a": ma, "delta_a": da, "mean_b": mb, "delta_b": db, "lhs": lhs, "rhs": rhs, "holds": holds}
    return "ok", payload, []


def _cmd_chsh(sc, opt):
    a = sc.command.args
    value = chsh_value(*(sc.get(a[k]) for k in ("state", "a0", "a1", "b0", "b1")), tol=opt.tolerance)
    payload = {"value": value, "local_bound": 2.0, "tsirelson_bound": float(2 * np.sqrt(2))}
    diags = ["local bound exceeded"] if value > 2 + opt.tolerance else []
    return "ok", payload, diags


def _cmd_simulate(sc, opt):
    a = sc.command.args
    cfg = EnsembleConfig(sc.get(a["state"]), sc.get(a["measure"]), opt.samples, opt.seed)
    return "ok", sample_outcomes(cfg).as_dict(), []


def _cmd_sequence(sc, opt):
    a = sc.command.args
    measures = [sc.get(m) for m in a["measures"]]
    stats = run_sequences(sc.get(a["state"]), measures, opt.samples, opt.seed, opt.workers)
    payload = {
        "trajectories": opt.samples,
        "terminated": stats.terminated,
        "steps": [dict(r.as_dict(), measure=name) for r, name in zip(stats.records, a["measures"])],
    }
    return "ok", payload, []


HANDLERS = {
    "validate": _cmd_validate,
    "prob": _cmd_prob,
    "classify": _cmd_classify,
    "smear": _cmd_smear,
    "coexist": _cmd_coexist,
    "dilate": _cmd_dilate,
    "uncertainty": _cmd_uncertainty,
    "chsh": _cmd_chsh,
    "simulate": _cmd_simulate,
    "sequence": _cmd_sequence,
}


def run(scenario: Scenario, options: Options | None = None) -> tuple[Report, int]:
    options = (options or Options()).resolved(scenario.command.params)
    name = scenario.command.name
    try:
        status, payload, diags = HANDLERS[name](scenario, options)
    except ValidationError as exc:
        report = Report("invalid", name, None, [str(exc)], options.as_dict())
    except UnsharpError as exc:
        report = Report("error", name, None, [f"{type(exc).__name__}: {exc}"], options.as_dict())
    else:
        report = Report(status, name, payload, diags, options.as_dict())
    return report, report.exit_code


def run_text(text: str, options: Options | None = None) -> tuple[Report, int]:
    """Parse and run a scenario document, mapping parse failures to reports."""
    options = options or Options()
    try:
        scenario = parse_scenario(text, options.tolerance, options.group_tol)
    except ScenarioError as exc:
        return Report("error", None, None, [str(exc)], options.resolved({}).as_dict()), PARSE_EXIT
    except UnsharpError as exc:
        return Report("invalid", None, None, [str(exc)], options.resolved({}).as_dict()), EXIT["invalid"]
    return run(scenario, options)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="unsharp", description="Run an unsharp-measurement scenario file.")
    p.add_argument("scenario", help="scenario JSON path, or - for stdin")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL, help="validation tolerance (default 1e-9)")
    p.add_argument("--group-tol", type=float, default=DEFAULT_GROUP_TOL, help="eigenvalue grouping gap (default 1e-8)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: scenario params, else 0)")
    p.add_argument(
        "--samples", type=int, default=None, help="ensemble size / trajectories (default: scenario params, else 10000)"
    )
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--workers", type=int, default=None, help="threads for trajectory batches")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = Options(args.tolerance, args.group_tol, args.seed, args.samples, args.format, args.workers)
    try:
        if args.scenario == "-":
            text = sys.stdin.read()
        else:
            with open(args.scenario, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"cannot read scenario: {exc}", file=sys.stderr)
        return PARSE_EXIT
    report, code = run_text(text, opts)
    for d in report.diagnostics:
        print(d, file=sys.stderr)
    print(report.to_json() if opts.format == "json" else report.to_text())
    return code


if __name__ == "__main__":
    sys.exit(main())
