"""Command-line interface emitting deterministic JSON/CSV reports.

Byte stability rules: fixed key and sort orders, floats printed with 12
significant digits, complex values as {"re": ..., "im": ...} objects (or
paired *_re/*_im CSV columns), no timestamps, and every defaulted option
echoed back in the output metadata.

Exit codes: 0 success, 1 input or validation problem, 2 defective state
matrix, 3 numerical failure during analysis.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import DefectiveMatrix, ModalEnergyError, NonFinite
from .model import (
    Disturbance,
    StateSpaceModel,
    build_swing_system,
    load_model,
    load_swing,
    model_to_dict,
    validate_model,
)
from .spectral import DEFAULT_DECOMPOSE_TOL, decompose, participation_matrix, residual_norms
from .energy import (
    EnergyKind,
    MethodKind,
    energy_report,
    normality_index,
    sharp_commutator,
    weight_for,
)
from .simulate import TimeGrid, energy_timeseries

CSV_HEADER = (
    "t,method,kind,mode,energy_re,energy_im,power_re,power_im,"
    "sum_re,sum_im,total_energy,total_power"
)
DEFAULT_CHECK_TOL = 1e-9


class _UsageError(Exception):
    pass


class _InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which this tool reserves
    # for defective matrices; surface usage problems as exit 1 instead.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# deterministic formatting

def _fmt_float(v: float) -> str:
    return format(float(v), ".12g")


def _jsonable(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


def _is_scalar(value) -> bool:
    return not isinstance(value, (dict, list))


def _json_text(value, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, str):
        import json as _json

        return _json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        if all(_is_scalar(v) for v in value.values()):
            body = ", ".join(f'"{k}": {_json_text(v)}' for k, v in value.items())
            return "{" + body + "}"
        parts = [f'{inner}"{k}": {_json_text(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(_is_scalar(v) for v in value):
            return "[" + ", ".join(_json_text(v) for v in value) + "]"
        parts = [inner + _json_text(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _json_doc(doc: dict) -> str:
    return _json_text(_jsonable(doc)) + "\n"


def _meta_lines(config: dict) -> list:
    lines = []
    for key in sorted(config):
        v = config[key]
        if v is None:
            v = "null"
        elif isinstance(v, float):
            v = _fmt_float(v)
        lines.append(f"# {key}={v}")
    return lines


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# --------------------------------------------------------------------------
# shared option plumbing

def _resolve_tol(flag_value, default: float) -> float:
    if flag_value is not None:
        return float(flag_value)
    env = os.environ.get("MODAL_TOL")
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise _UsageError(f"MODAL_TOL={env!r} is not a number") from None
    return default


def _parse_x0(text: str) -> np.ndarray:
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise _InputError(f"--x0 {text!r} is not a comma-separated float list") from None
    return Disturbance(np.array(values)).x0


def _load_model_arg(path: str) -> StateSpaceModel:
    try:
        return load_model(path)
    except (ModalEnergyError, OSError) as exc:
        raise _InputError(str(exc)) from exc


def _methods_arg(name: str) -> tuple:
    if name == "all":
        return tuple(MethodKind)
    return (MethodKind(name),)


def _complex_cols(z: complex) -> list:
    return [_fmt_float(z.real), _fmt_float(z.imag)]


def _energy_rows(t: float, report, kind: EnergyKind) -> list:
    """CSV rows for one report: one per mode, then the mode=ALL summary."""
    rows = []
    esum = report.energy_sum
    if report.method is MethodKind.MOVING_FRAME:
        psum = complex(report.total_power)
    else:
        psum = complex(np.sum(report.per_mode_power))
    base = [_fmt_float(t), report.method.value, kind.value]
    tail = _complex_cols(esum) + [
        _fmt_float(report.total_energy),
        _fmt_float(report.total_power),
    ]
    for i in range(report.per_mode_energy.size):
        rows.append(
            ",".join(
                base
                + [str(i)]
                + _complex_cols(complex(report.per_mode_energy[i]))
                + _complex_cols(complex(report.per_mode_power[i]))
                + tail
            )
        )
    rows.append(
        ",".join(base + ["ALL"] + _complex_cols(esum) + _complex_cols(psum) + tail)
    )
    return rows


def _report_doc(report, basis) -> dict:
    if report.method is MethodKind.MOVING_FRAME:
        psum = complex(report.total_power)
    else:
        psum = complex(np.sum(report.per_mode_power))
    paired = []
    for group in basis.pairs:
        paired.append(
            {
                "modes": list(group),
                "eigenvalue": complex(basis.lambdas[group[0]]),
                "energy": complex(np.sum(report.per_mode_energy[list(group)])),
                "power": complex(np.sum(report.per_mode_power[list(group)])),
            }
        )
    return {
        "method": report.method.value,
        "kind": report.kind.value,
        "per_mode_energy": list(report.per_mode_energy),
        "per_mode_power": list(report.per_mode_power),
        "paired": paired,
        "energy_sum": report.energy_sum,
        "power_sum": psum,
        "total_energy": report.total_energy,
        "total_power": report.total_power,
        "missing_energy": report.missing_energy,
        "mapping_residuals": list(report.mapping_residuals),
        "sum_error_pct": report.sum_error_pct,
    }


# --------------------------------------------------------------------------
# commands

def _cmd_decompose(args) -> int:
    if args.format == "csv":
        raise _InputError("decompose reports are JSON only")
    model = _load_model_arg(args.model)
    tol = _resolve_tol(args.tol, DEFAULT_DECOMPOSE_TOL)
    basis = decompose(model.A, tol=tol)
    doc = {
        "command": "decompose",
        "config": {
            "model": args.model,
            "tol": tol,
            "out": args.out,
            "format": "json",
        },
        "n": model.n,
        "labels": list(model.labels) if model.labels is not None else None,
        "eigenvalues": list(basis.lambdas),
        "pairs": [list(group) for group in basis.pairs],
        "degenerate_clusters": [list(c) for c in basis.degenerate_clusters],
        "V": [list(row) for row in basis.V],
        "U": [list(row) for row in basis.U],
        "participation": [list(row) for row in participation_matrix(basis)],
        "residuals": residual_norms(basis, model.A),
    }
    _emit(_json_doc(doc), args.out)
    return 0


def _cmd_normality(args) -> int:
    model = _load_model_arg(args.model)
    kind = EnergyKind(args.kind)
    W = weight_for(model, kind)
    index = normality_index(model.A, W)
    comm = float(np.linalg.norm(sharp_commutator(model.A, W), "fro"))
    sys.stdout.write(f"normality_index = {_fmt_float(index)}\n")
    sys.stdout.write(f"commutator_norm = {_fmt_float(comm)}\n")
    if args.out is not None:
        doc = {
            "command": "normality",
            "config": {"model": args.model, "kind": kind.value, "out": args.out},
            "normality_index": index,
            "commutator_norm": comm,
        }
        _emit(_json_doc(doc), args.out)
    return 0


def _cmd_energy(args) -> int:
    model = _load_model_arg(args.model)
    x0 = _parse_x0(args.x0)
    tol = _resolve_tol(args.tol, DEFAULT_DECOMPOSE_TOL)
    kind = EnergyKind(args.kind)
    methods = _methods_arg(args.method)
    basis = decompose(model.A, tol=tol)
    reports = [energy_report(model, basis, x0, m, kind) for m in methods]
    config = {
        "command": "energy",
        "model": args.model,
        "x0": args.x0,
        "method": args.method,
        "kind": kind.value,
        "t_dist": args.t_dist,
        "tol": tol,
        "format": args.format,
        "out": args.out,
    }
    if args.format == "csv":
        lines = _meta_lines(config) + [CSV_HEADER]
        for report in reports:
            lines.extend(_energy_rows(args.t_dist, report, kind))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        doc = {
            "command": "energy",
            "config": config,
            "eigenvalues": list(basis.lambdas),
            "reports": [_report_doc(r, basis) for r in reports],
        }
        _emit(_json_doc(doc), args.out)
    return 0


def _cmd_simulate(args) -> int:
    model = _load_model_arg(args.model)
    x0 = _parse_x0(args.x0)
    tol = _resolve_tol(args.tol, DEFAULT_DECOMPOSE_TOL)
    kind = EnergyKind(args.kind)
    methods = _methods_arg(args.method)
    try:
        grid = TimeGrid(t0=0.0, t_dist=args.t_dist, t_end=args.t_end, dt=args.dt)
    except ModalEnergyError as exc:
        raise _InputError(str(exc)) from exc
    basis = decompose(model.A, tol=tol)
    table = energy_timeseries(model, basis, x0, grid, methods=methods, kind=kind)
    config = {
        "command": "simulate",
        "model": args.model,
        "x0": args.x0,
        "method": args.method,
        "kind": kind.value,
        "t0": grid.t0,
        "t_dist": grid.t_dist,
        "t_end": grid.t_end,
        "dt": grid.dt,
        "tol": tol,
        "format": args.format,
        "out": args.out,
    }
    if args.format == "csv":
        lines = _meta_lines(config) + [CSV_HEADER]
        times = table.times
        for k in range(times.size):
            tcol = _fmt_float(times[k])
            for method in table.methods:
                E = table.energies[method][k]
                S = table.powers[method][k]
                esum = complex(table.energy_sums[method][k])
                psum = complex(table.power_sums[method][k])
                base = [tcol, method.value, kind.value]
                tail = _complex_cols(esum) + [
                    _fmt_float(table.total_energy[k]),
                    _fmt_float(table.total_power[k]),
                ]
                for i in range(E.size):
                    lines.append(
                        ",".join(
                            base
                            + [str(i)]
                            + _complex_cols(complex(E[i]))
                            + _complex_cols(complex(S[i]))
                            + tail
                        )
                    )
                lines.append(
                    ",".join(
                        base + ["ALL"] + _complex_cols(esum) + _complex_cols(psum) + tail
                    )
                )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        methods_doc = {}
        for method in table.methods:
            methods_doc[method.value] = {
                "energies": [list(row) for row in table.energies[method]],
                "powers": [list(row) for row in table.powers[method]],
                "energy_sum": list(table.energy_sums[method]),
                "power_sum": list(table.power_sums[method]),
            }
        doc = {
            "command": "simulate",
            "config": config,
            "times": list(table.times),
            "eigenvalues": list(basis.lambdas),
            "methods": methods_doc,
            "total_energy": list(table.total_energy),
            "total_power": list(table.total_power),
        }
        _emit(_json_doc(doc), args.out)
    return 0


def _check_cells(report, basis, tol: float) -> dict:
    e = report.per_mode_energy
    s = report.per_mode_power
    scale_e = max(1.0, float(np.max(np.abs(e))) if e.size else 0.0)
    scale_s = max(1.0, float(np.max(np.abs(s))) if s.size else 0.0)
    if report.method is MethodKind.MOVING_FRAME:
        # restriction behaviour: does power/energy align with any 2*lambda?
        if report.total_energy > 0:
            ratio = report.total_power / report.total_energy
            gap = float(np.min(np.abs(ratio - 2.0 * basis.lambdas)))
            mapping_residual = gap
            mapping = gap <= tol * max(1.0, abs(ratio))
        else:
            mapping_residual = 0.0
            mapping = True
    else:
        mapping_residual = float(np.max(report.mapping_residuals)) if e.size else 0.0
        mapping = mapping_residual <= tol * scale_s
    imag_max = float(np.max(np.abs(e.imag))) if e.size else 0.0
    real_ok = imag_max <= tol * scale_e
    sum_error = abs(report.energy_sum.real - report.total_energy)
    sum_imag = abs(report.energy_sum.imag)
    sum_ok = (
        sum_error <= tol * max(report.total_energy, 1.0)
        and sum_imag <= tol * scale_e
    )
    return {
        "mapping": bool(mapping),
        "real": bool(real_ok),
        "sum": bool(sum_ok),
        "mapping_residual": mapping_residual,
        "imag_max": imag_max,
        "sum_error": float(sum_error),
        "sum_imag": float(sum_imag),
    }


def _cmd_check(args) -> int:
    model = _load_model_arg(args.model)
    x0 = _parse_x0(args.x0)
    tol = _resolve_tol(args.tol, DEFAULT_CHECK_TOL)
    kind = EnergyKind(args.kind)
    basis = decompose(model.A)
    W = weight_for(model, kind)
    index = normality_index(model.A, W)
    cells = {}
    for method in MethodKind:
        report = energy_report(model, basis, x0, method, kind)
        cells[method.value] = _check_cells(report, basis, tol)
    lines = [f"{'method':<12}{'mapping':<9}{'real':<7}sum"]
    for method in MethodKind:
        c = cells[method.value]
        lines.append(
            f"{method.value:<12}"
            f"{'yes' if c['mapping'] else 'no':<9}"
            f"{'yes' if c['real'] else 'no':<7}"
            f"{'yes' if c['sum'] else 'no'}"
        )
    lines.append(f"normality_index = {_fmt_float(index)}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out is not None:
        doc = {
            "command": "check",
            "config": {
                "model": args.model,
                "x0": args.x0,
                "kind": kind.value,
                "tol": tol,
                "out": args.out,
            },
            "normality_index": index,
            "cells": cells,
        }
        _emit(_json_doc(doc), args.out)
    return 0


def _cmd_swing(args) -> int:
    try:
        params = load_swing(args.swing)
    except (ModalEnergyError, OSError) as exc:
        raise _InputError(str(exc)) from exc
    model = build_swing_system(params)
    doc = model_to_dict(model)
    _emit(_json_doc(doc), args.out)
    print(f"# swing={args.swing} out={args.out or 'stdout'}", file=sys.stderr)
    return 0


# --------------------------------------------------------------------------
# parser

def build_parser() -> _Parser:
    parser = _Parser(
        prog="modalenergy",
        description="Modal energy analysis for linear state-space systems.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    def add_common(p, x0=False, grid=False, fmt=None, tol_help=None):
        p.add_argument("--model", required=True, help="model JSON file")
        if x0:
            p.add_argument("--x0", required=True, help="comma-separated floats")
            p.add_argument(
                "--kind",
                choices=[k.value for k in EnergyKind],
                default=EnergyKind.NORMALIZED.value,
                help="energy weight: normalized (P=I) or physical (model P)",
            )
            p.add_argument(
                "--method",
                choices=["all"] + [m.value for m in MethodKind],
                default="all",
                help="energy definition to evaluate",
            )
        if grid:
            p.add_argument("--t-dist", type=float, default=0.0, help="disturbance time [s]")
            p.add_argument("--t-end", type=float, required=True, help="final time [s]")
            p.add_argument("--dt", type=float, required=True, help="sample step [s]")
        p.add_argument(
            "--tol",
            type=float,
            default=None,
            help=tol_help or "numerical tolerance (default from MODAL_TOL or built-in)",
        )
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        if fmt:
            p.add_argument("--format", choices=["json", "csv"], default=fmt)

    p = sub.add_parser("decompose", help="eigendecomposition report (JSON)")
    add_common(p, fmt="json", tol_help="defectiveness tolerance on |u^T v|")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("normality", help="departure-from-normality index")
    p.add_argument("--model", required=True)
    p.add_argument(
        "--kind",
        choices=[k.value for k in EnergyKind],
        default=EnergyKind.NORMALIZED.value,
    )
    p.add_argument("--out", default=None, help="optional JSON mirror")
    p.set_defaults(func=_cmd_normality)

    p = sub.add_parser("energy", help="modal energies at one state")
    add_common(p, x0=True, fmt="csv")
    p.add_argument("--t-dist", type=float, default=0.0, help="time stamp for the row")
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("simulate", help="energy time series after a step disturbance")
    add_common(p, x0=True, grid=True, fmt="csv")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("check", help="which physical requirements each method meets")
    add_common(p, x0=True, tol_help="pass/fail threshold for the property table")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("swing", help="convert swing parameters to a model file")
    p.add_argument("--swing", required=True, help="swing JSON file")
    p.add_argument("--out", default=None, help="model JSON file (default: stdout)")
    p.set_defaults(func=_cmd_swing)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DefectiveMatrix as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NonFinite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ModalEnergyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
