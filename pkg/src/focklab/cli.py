"""Batch front end: scenario configs in, deterministic reports and CSV out.

A scenario is a JSON object naming the weight parameter, a sequence (literal
or generator shorthand), a task and task parameters.  Reports are emitted
with sorted keys and a fixed float format so that identical scenarios give
byte-identical files; matrix and trend data go to CSV side files.

Exit codes: 0 success/pass, 2 config or schema violation, 3 task-level
failure (criterion fail, precondition refusal), 1 internal error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import completion as completion_mod
from . import debranges as debranges_mod
from . import density as density_mod
from . import frames as frames_mod
from .criterion import CriterionError, check_riesz_f2
from .genfun import GenFun
from .kernel import moments_cached, needed_terms
from .numerics import LogComplex
from .sequences import PointSeq, from_json_dict, reference_gamma, to_json_dict
from .weights import Weight

TASKS = ("check", "density", "frames", "interpolate", "debranges", "complete", "thin", "gallery")

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["alpha", "task"],
    "additionalProperties": False,
    "properties": {
        "alpha": {"type": "number", "exclusiveMinimum": 0},
        "task": {"enum": list(TASKS)},
        "sequence": {
            "type": "object",
            "oneOf": [
                {
                    "required": ["generator"],
                    "properties": {
                        "generator": {"enum": ["reference", "two_sided", "gamma2",
                                               "critical_shift", "constant_shift",
                                               "avdonin_blocks"]},
                        "params": {"type": "object"},
                    },
                    "additionalProperties": False,
                },
                {
                    "required": ["points"],
                    "properties": {
                        "alpha": {"type": "number"},
                        "points": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "required": ["t"],
                                "properties": {"t": {"type": "number"},
                                               "theta": {"type": "number"}},
                                "additionalProperties": False,
                            },
                        },
                    },
                    "additionalProperties": False,
                },
            ],
        },
        "params": {"type": "object"},
        "out": {"type": "string"},
    },
}


class TaskFailure(RuntimeError):
    """Task ran but its verdict or precondition failed (exit code 3)."""


# ----------------------------------------------------------------------------
# Deterministic serialization

def _canon(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return '"nan"'
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return "%.12e" % v
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple, np.ndarray)):
        items = value.tolist() if isinstance(value, np.ndarray) else value
        return "[" + ",".join(_canon(v) for v in items) + "]"
    if isinstance(value, dict):
        items = sorted((str(k), v) for k, v in value.items())
        return "{" + ",".join(json.dumps(k) + ":" + _canon(v) for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(value)}")


def dump_canonical(obj) -> str:
    return _canon(obj) + "\n"


def emit_report(result: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_canonical(result))


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow(["%.12e" % v if isinstance(v, float) else v for v in row])


# ----------------------------------------------------------------------------
# Task handlers; each returns (result_dict, csv_map)

def _build_sequence(cfg: dict) -> PointSeq:
    if "sequence" not in cfg:
        raise TaskFailure("this task needs a sequence")
    return from_json_dict(cfg["sequence"], default_alpha=cfg["alpha"])


def _table_for(alpha: float, seq: PointSeq, extra_t: float = 0.0):
    t_hi = float(seq.t[-1]) if len(seq) else 1.0
    return moments_cached(alpha, needed_terms(alpha, 2.0 * t_hi + extra_t))


def _task_check(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    rep = check_riesz_f2(seq, cfg["alpha"], int(params.get("N_max", 64)))
    result = rep.to_json_dict()
    if not rep.passed:
        raise TaskFailure(f"criterion verdict {rep.verdict}", result)
    return result, {}


def _task_gallery(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    return {"sequence": to_json_dict(seq, cfg["alpha"]), "n_points": len(seq)}, {}


def _task_density(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    logR = params.get("logR_list", [4.0, 8.0, 16.0])
    offsets = params.get("r_offsets")
    if offsets is None:
        offsets = density_mod.default_offsets(seq, max(logR), int(params.get("n_offsets", 33)))
    rep = density_mod.densities(seq, logR, offsets)
    result = rep.to_json_dict()
    result["disk_density"] = density_mod.disk_density(seq, logR)
    csv_map = {"counts.csv": (["logR/offset"] + [str(o) for o in rep.r_offsets],
                              [[L] + list(row) for L, row in zip(rep.logR_list, rep.counts)])}
    return result, csv_map


def _task_frames(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    sizes = [int(s) for s in params.get("sizes", [8, 16, 32, 64])]
    tab = _table_for(cfg["alpha"], seq.head(max(sizes)))
    rows = frames_mod.riesz_trend(tab, seq, sizes)
    result = {"trend": [{"size": r.size, "lambda_min": r.lambda_min,
                         "lambda_max": r.lambda_max, "cond": r.cond} for r in rows]}
    csv_map = {"trend.csv": (["size", "lambda_min", "lambda_max", "cond"],
                             [[r.size, r.lambda_min, r.lambda_max, r.cond] for r in rows])}
    return result, csv_map


def _task_interpolate(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    alpha = cfg["alpha"]
    p = params.get("p", 2)
    if p == 2:
        n_ref = max(3 * len(seq), len(seq) + 8)
        reference = reference_gamma(alpha, n_ref - 1)
        tab = moments_cached(alpha, needed_terms(alpha, 2.0 * float(reference.t[-1])))
        audit = frames_mod.f2_norm_control_audit(tab, reference, seq,
                                                 trials=int(params.get("trials", 5)))
        result = {"p": 2, "worst_norm_ratio": audit.worst_ratio, "ratios": list(audit.ratios),
                  "seed": audit.seed}
    else:
        tab = _table_for(alpha, seq, extra_t=2.0)
        w = Weight(alpha)
        values = [LogComplex(w.phi(pt), 0.0) for pt in seq.points]
        grid = [pt.rotated(0.37) for pt in seq.points]
        res = frames_mod.interpolate_finfty(tab, seq, values, grid,
                                            gate_N=int(params.get("gate_N", 16)),
                                            drop=int(params.get("drop", 0)))
        result = {"p": "inf", "sup_weighted": res.sup_weighted, "gate": res.gate.to_json_dict()}
    return result, {}


def _task_debranges(cfg, params, out_dir):
    alpha = cfg["alpha"]
    m_max = int(params.get("m_max", 8))
    n_zeros = int(params.get("n_zeros", math.ceil(2 * alpha * ((m_max + 1) / (2 * alpha) + 16)) + 8))
    zeros = reference_gamma(alpha, n_zeros, angles=-math.pi / 2.0)
    g = GenFun(zeros, alpha)
    tab = moments_cached(alpha, needed_terms(alpha, 2.0 * float(zeros.t[-1])))
    audits = debranges_mod.debranges_line_audit(tab, g, m_max=m_max,
                                                rays=tuple(params.get("rays", debranges_mod.RAYS)))
    result = {"audits": [{"ray": a.ray, "m": a.m, "log_quad": a.log_quad,
                          "log_exact": a.log_exact, "ratio": a.ratio} for a in audits]}
    csv_map = {"line_audit.csv": (["ray", "m", "log_quad", "log_exact", "ratio"],
                                  [[a.ray, a.m, a.log_quad, a.log_exact, a.ratio] for a in audits])}
    return result, csv_map


def _completion_params(cfg, params) -> completion_mod.CompletionParams:
    return completion_mod.CompletionParams(
        M=int(params.get("M", 4)),
        N=int(params.get("N", 16)),
        eta=float(params.get("eta", 0.05)),
        alpha=cfg["alpha"],
        n_groups=(int(params["n_groups"]) if "n_groups" in params else None),
    )


def _task_complete(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    cp = _completion_params(cfg, params)
    res = completion_mod.complete_to_ci(seq, cfg["alpha"], cp)
    check_N = int(params.get("check_N", 4 * cp.N * cp.M))
    rep = res.recheck(check_N)
    result = {
        "n_added": len(res.added), "n_groups": res.n_groups,
        "group_sums_t": list(res.group_sums_t), "min_drho": res.min_drho,
        "recheck": rep.to_json_dict(),
        "augmented": to_json_dict(res.augmented, cfg["alpha"]),
    }
    csv_map = {"walk_trace.csv": (["group", "step", "slot", "from", "to", "sum_u"],
                                  [list(r) for r in res.trace])}
    if not rep.passed:
        raise TaskFailure(f"completion output fails the criterion: {rep.verdict}", result)
    return result, csv_map


def _task_thin(cfg, params, out_dir):
    seq = _build_sequence(cfg)
    cp = _completion_params(cfg, params)
    res = completion_mod.thin_to_ci(seq, cfg["alpha"], cp)
    check_N = int(params.get("check_N", 4 * cp.N * cp.M))
    rep = res.recheck(check_N)
    result = {
        "n_removed": len(res.removed), "n_groups": res.n_groups,
        "group_sums_t": list(res.group_sums_t), "min_drho": res.min_drho,
        "recheck": rep.to_json_dict(),
        "kept": to_json_dict(res.kept, cfg["alpha"]),
    }
    csv_map = {"walk_trace.csv": (["group", "annulus", "available", "kept", "carry_u"],
                                  [list(r) for r in res.trace])}
    if not rep.passed:
        raise TaskFailure(f"thinning output fails the criterion: {rep.verdict}", result)
    return result, csv_map


_HANDLERS = {
    "check": _task_check,
    "gallery": _task_gallery,
    "density": _task_density,
    "frames": _task_frames,
    "interpolate": _task_interpolate,
    "debranges": _task_debranges,
    "complete": _task_complete,
    "thin": _task_thin,
}


# ----------------------------------------------------------------------------
# Entry point

def run(config_path: str, out_dir: str | None = None, seed: int | None = None,
        quiet: bool = False) -> int:
    path = Path(config_path)
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"focklab: bad config: {exc}", file=sys.stderr)
        return 2
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        print(f"focklab: schema violation: {exc.message}", file=sys.stderr)
        return 2

    out = Path(out_dir) if out_dir else path.parent / (path.stem + "_out")
    config_hash = hashlib.sha256(dump_canonical(cfg).encode()).hexdigest()
    envelope = {
        "task": cfg["task"],
        "alpha": cfg["alpha"],
        "config_hash": config_hash,
        "seed": f"0x{(seed if seed is not None else frames_mod.DEFAULT_SEED):x}",
        "version": __version__,
        "status": "ok",
    }
    code = 0
    try:
        result, csv_map = _HANDLERS[cfg["task"]](cfg, cfg.get("params", {}), out)
        envelope["result"] = result
    except TaskFailure as exc:
        envelope["status"] = "fail"
        envelope["error"] = str(exc.args[0])
        if len(exc.args) > 1:
            envelope["result"] = exc.args[1]
        csv_map = {}
        code = 3
    except (CriterionError, completion_mod.CompletionError, density_mod.DensityError,
            frames_mod.FramesError, debranges_mod.DeBrangesError, ValueError) as exc:
        envelope["status"] = "fail"
        envelope["error"] = str(exc)
        csv_map = {}
        code = 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"focklab: internal error: {exc!r}", file=sys.stderr)
        return 1

    emit_report(envelope, out / "report.json")
    for name, (header, rows) in csv_map.items():
        _write_csv(out / name, header, rows)
    if not quiet:
        summary = envelope.get("error", "ok")
        print(f"focklab {cfg['task']}: {envelope['status']} ({summary}) -> {out / 'report.json'}")
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="focklab",
                                 description="scenario runner for the weighted-space laboratory")
    sub = ap.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="execute a scenario config")
    runp.add_argument("config")
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--seed", default=None, help="hex seed for random test families")
    runp.add_argument("--quiet", action="store_true")
    sub.add_parser("schema", help="print the config schema")
    args = ap.parse_args(argv)
    if args.command == "schema":
        print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
        return 0
    seed = int(args.seed, 16) if args.seed else None
    return run(args.config, args.out, seed, args.quiet)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
