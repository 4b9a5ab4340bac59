"""Batch front door: argument parsing, orchestration, report emission.

Subcommands:
  mask-signal     mask a count signal read from a text file
  mask-microfile  extract counts from a CSV, mask them, rewrite the file
  wrm             dump the reconstruction matrix for a length/level/wavelet
  verify          check total preservation and detail proportionality

All options can also come from a JSON config file (--config); explicit flags
win.  Exit codes: 0 success, 1 usage or configuration problem, 2 goals
infeasible or a verification failure, 3 malformed data.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

import numpy as np

from .errors import ConfigurationError, DataError, MaskingError, ShapeError
from .masking import GoalSpec, MaskingConfig, MaskingResult, build_constraints, mask_signal
from .microdata import (
    SelectionSpec,
    apply_plan,
    extract_quantity_signal,
    load_csv,
    plan_resynthesis,
    write_csv,
)
from .wavelet import as_signal, decompose, make_filter, read_signal, write_signal
from .wrm import build_wrm

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MASKING = 2
EXIT_DATA = 3


def _sig12(value) -> float:
    """Collapse to 12 significant digits so reports are cross-platform stable."""
    return float(f"{float(value):.12g}")


def _vec(values) -> list[float]:
    return [_sig12(v) for v in np.asarray(values, dtype=np.float64)]


def _parse_wavelet(text: str) -> tuple[str, int]:
    name = text.strip()
    if ":" in name:
        family, _, tail = name.partition(":")
        try:
            return family, int(tail)
        except ValueError:
            raise ConfigurationError(f"bad wavelet order in {text!r}") from None
    if name.lower() == "haar":
        return "haar", 1
    raise ConfigurationError(f"wavelet must look like daubechies:2, got {text!r}")


def _parse_offset(value) -> float | None:
    """None means automatic; otherwise a fixed non-negative shift."""
    if value is None or (isinstance(value, str) and value.strip().lower() == "auto"):
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(f"offset must be 'auto' or a number, got {value!r}") from None


def _parse_override(value) -> tuple[float, ...] | None:
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p.strip()]
    else:
        parts = list(value)
    try:
        return tuple(float(p) for p in parts)
    except (TypeError, ValueError):
        raise ConfigurationError(f"override coefficients must be numbers, got {value!r}") from None


def _load_goal_entries(source) -> list:
    """Goal entries from a JSON file path, or passed through when inline."""
    if isinstance(source, list):
        return source
    try:
        with open(source, encoding="utf-8") as handle:
            entries = json.load(handle)
    except FileNotFoundError:
        raise ConfigurationError(f"goal file not found: {source}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{source}: invalid JSON ({exc})") from None
    if not isinstance(entries, list):
        raise DataError(f"{source}: expected a JSON list of goal entries")
    return entries


def _require(eff: dict, key: str, flag: str):
    value = eff.get(key)
    if value is None:
        raise ConfigurationError(f"missing required option {flag}")
    return value


def _get(eff: dict, key: str, default):
    """Default only when the option is absent; falsy values are real values."""
    value = eff.get(key)
    return default if value is None else value


def _delimiter(eff: dict) -> str:
    value = str(_get(eff, "delimiter", ","))
    if len(value) != 1:
        raise ConfigurationError(f"delimiter must be a single character, got {value!r}")
    return value


def _masking_config(eff: dict, goals: GoalSpec) -> MaskingConfig:
    family, order = _parse_wavelet(_get(eff, "wavelet", "daubechies:2"))
    offset = _parse_offset(eff.get("offset"))
    repair = not bool(eff.get("no_repair"))
    if eff.get("repro"):
        # Bit-repeatable preset: no sum repair, and the shift must be pinned.
        repair = False
        if offset is None:
            raise ConfigurationError("--repro needs a numeric --offset")
    return MaskingConfig(
        goals=goals,
        family=family,
        order=order,
        level=int(_get(eff, "level", 2)),
        fixed_offset=offset,
        override_coeffs=_parse_override(eff.get("override_coeffs")),
        sum_repair=repair,
        rng_seed=int(_get(eff, "seed", 0)),
    )


def _goal_echo(entries: list) -> list:
    echo = []
    for entry in entries:
        item = {"index": int(entry["index"]), "goal": str(entry["goal"]).lower()}
        if entry.get("min") is not None:
            item["min"] = _sig12(entry["min"])
        if entry.get("max") is not None:
            item["max"] = _sig12(entry["max"])
        echo.append(item)
    return echo


def _report_payload(result: MaskingResult, config: MaskingConfig, goal_entries: list) -> dict:
    dec = result.decomposition
    base_approx = result.wrm.apply(dec.approx)
    lp = build_constraints(result.wrm, base_approx, config.goals)
    checks = []
    for check in result.goal_report or ():
        item = {
            "index": check.index,
            "goal": check.kind,
            "achieved": _sig12(check.achieved),
            "satisfied": bool(check.satisfied),
        }
        if check.threshold is not None:
            item["threshold"] = _sig12(check.threshold)
        if check.lower is not None:
            item["min"] = _sig12(check.lower)
        if check.upper is not None:
            item["max"] = _sig12(check.upper)
        checks.append(item)
    original = float(result.q.sum())
    scaled = float(result.q_scaled.sum())
    rounded = int(result.q_tilde.sum()) if result.q_tilde is not None else None
    return {
        "wavelet": dec.filters.name,
        "level": dec.level,
        "options": {
            "offset": "auto" if config.fixed_offset is None else _sig12(config.fixed_offset),
            "sum_repair": config.sum_repair,
            "seed": config.rng_seed,
            "override": config.override_coeffs is not None,
        },
        "q": _vec(result.q),
        "a_k": _vec(dec.approx),
        "details": [_vec(band) for band in dec.details],
        "A_k": _vec(base_approx),
        "goals": _goal_echo(goal_entries),
        "lp_rows": [
            {"coeffs": _vec(row.coeffs), "relation": row.relation, "rhs": _sig12(row.rhs)}
            for row in lp.rows
        ],
        "a_k_hat": _vec(result.new_coeffs),
        "A_k_hat": _vec(result.new_approx),
        "q_hat": _vec(result.q_hat),
        "offset": _sig12(result.offset),
        "q_hathat": _vec(result.q_shifted),
        "c": _sig12(result.scale),
        "q_scaled": _vec(result.q_scaled),
        "q_tilde": None if result.q_tilde is None else [int(v) for v in result.q_tilde],
        "goal_satisfaction": checks,
        "sum_check": {
            "original_total": _sig12(original),
            "scaled_total": _sig12(scaled),
            "scaled_relative_error": _sig12(abs(scaled - original) / original) if original else 0.0,
            "rounded_total": rounded,
            "rounded_matches": rounded == int(round(original)) if rounded is not None else None,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _write_report(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")


def _selection(eff: dict) -> SelectionSpec:
    pairs = eff.get("vital")
    if not pairs:
        raise ConfigurationError("missing required option --vital ATTR=VALUE")
    if isinstance(pairs, dict):
        pairs = [f"{k}={v}" for k, v in pairs.items()]
    attrs, values = [], []
    for pair in pairs:
        name, sep, value = str(pair).partition("=")
        if not sep or not name:
            raise ConfigurationError(f"--vital expects ATTR=VALUE, got {pair!r}")
        attrs.append(name)
        values.append(value)
    parameter = _require(eff, "parameter_attribute", "--parameter-attribute")
    raw_values = _require(eff, "parameter_values", "--parameter-values")
    if isinstance(raw_values, str):
        raw_values = [v.strip() for v in raw_values.split(",") if v.strip()]
    return SelectionSpec(
        vital_attributes=tuple(attrs),
        vital_combination=tuple(values),
        parameter_attribute=str(parameter),
        parameter_values=tuple(str(v) for v in raw_values),
    )


def _cmd_mask_signal(eff: dict) -> int:
    q = read_signal(_require(eff, "input", "--input"))
    entries = _load_goal_entries(_require(eff, "goals", "--goals"))
    config = _masking_config(eff, GoalSpec.from_entries(entries))
    result = mask_signal(q, config)
    write_signal(_require(eff, "output", "--output"), result.q_tilde)
    if eff.get("scaled_output"):
        write_signal(eff["scaled_output"], result.q_scaled)
    if eff.get("report"):
        payload = _report_payload(result, config, entries)
        payload["command"] = "mask-signal"
        _write_report(eff["report"], payload)
    return EXIT_OK


def _cmd_mask_microfile(eff: dict) -> int:
    delimiter = _delimiter(eff)
    table = load_csv(_require(eff, "input", "--input"), delimiter=delimiter)
    spec = _selection(eff)
    q = extract_quantity_signal(table, spec)
    entries = _load_goal_entries(_require(eff, "goals", "--goals"))
    config = _masking_config(eff, GoalSpec.from_entries(entries))
    if not config.sum_repair:
        raise ConfigurationError("mask-microfile needs sum repair on: record totals must match exactly")
    result = mask_signal(q, config)
    plan = plan_resynthesis(table, spec, q, result.q_tilde, seed=config.rng_seed)
    masked = apply_plan(table, plan)
    write_csv(masked, _require(eff, "output", "--output"), delimiter=delimiter)
    if eff.get("report"):
        payload = _report_payload(result, config, entries)
        payload["command"] = "mask-microfile"
        payload["microfile"] = {
            "records": len(table),
            "vital": dict(zip(spec.vital_attributes, spec.vital_combination)),
            "parameter_attribute": spec.parameter_attribute,
            "parameter_values": list(spec.parameter_values),
            "moves": len(plan.moves),
            "seed": plan.seed,
        }
        _write_report(eff["report"], payload)
    return EXIT_OK


def _cmd_wrm(eff: dict) -> int:
    length = int(_require(eff, "length", "--length"))
    level = int(_get(eff, "level", 2))
    family, order = _parse_wavelet(_get(eff, "wavelet", "daubechies:2"))
    matrix = build_wrm(length, level, make_filter(family, order))
    lines = [",".join(repr(float(v)) for v in row) for row in matrix.entries]
    text = "\n".join(lines) + "\n"
    if eff.get("output"):
        with open(eff["output"], "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _proportionality(d_orig: np.ndarray, d_masked: np.ndarray) -> tuple[float, float]:
    """Least-squares ratio and the worst relative deviation from it."""
    denom = float(d_orig @ d_orig)
    if denom == 0.0:
        deviation = float(np.max(np.abs(d_masked))) if d_masked.size else 0.0
        return 0.0, deviation
    ratio = float(d_masked @ d_orig) / denom
    residual = float(np.max(np.abs(d_masked - ratio * d_orig)))
    scale = max(1.0, float(np.max(np.abs(ratio * d_orig))))
    return ratio, residual / scale


def _cmd_verify(eff: dict) -> int:
    family, order = _parse_wavelet(_get(eff, "wavelet", "daubechies:2"))
    filters = make_filter(family, order)
    level = int(_get(eff, "level", 2))
    tol = float(_get(eff, "tol", 1e-6))

    original_path = _require(eff, "original", "--original")
    masked_path = _require(eff, "masked", "--masked")
    if eff.get("parameter_attribute") or eff.get("vital"):
        spec = _selection(eff)
        delimiter = _delimiter(eff)
        original = extract_quantity_signal(load_csv(original_path, delimiter=delimiter), spec)
        masked = extract_quantity_signal(load_csv(masked_path, delimiter=delimiter), spec)
    else:
        original = read_signal(original_path)
        masked = read_signal(masked_path)
    original = as_signal(original)
    masked = as_signal(masked)
    if original.size != masked.size:
        raise DataError(f"signal lengths differ: {original.size} vs {masked.size}")

    total = float(original.sum())
    drift = abs(float(masked.sum()) - total) / total if total else abs(float(masked.sum()))
    sum_ok = drift <= tol

    d_orig = np.concatenate(decompose(original, filters, level).details)
    d_masked = np.concatenate(decompose(masked, filters, level).details)
    ratio, deviation = _proportionality(d_orig, d_masked)
    detail_ok = deviation <= tol

    print(f"sum-preservation: {'pass' if sum_ok else 'FAIL'} "
          f"(original {total:g}, masked {float(masked.sum()):g}, relative drift {drift:.3g})")
    print(f"detail-proportionality: {'pass' if detail_ok else 'FAIL'} "
          f"(ratio {ratio:.12g}, max relative deviation {deviation:.3g})")
    return EXIT_OK if sum_ok and detail_ok else EXIT_MASKING


class _Parser(argparse.ArgumentParser):
    """Routes usage mistakes through the exit-code-1 path instead of argparse's 2."""

    def error(self, message):
        raise ConfigurationError(message)


def _add_masking_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--goals", help="JSON goal file: [{index, goal, min?, max?}]")
    sub.add_argument("--offset", help="non-negativity shift: 'auto' or a number")
    sub.add_argument("--no-repair", dest="no_repair", action="store_const", const=True,
                     help="skip the +-1 adjustments that restore the exact total")
    sub.add_argument("--override-coeffs", dest="override_coeffs",
                     help="comma-separated replacement coefficients, bypasses the LP")
    sub.add_argument("--repro", action="store_const", const=True,
                     help="repeatable preset: requires numeric --offset, disables repair")
    sub.add_argument("--seed", type=int, help="seed for record selection (microfile rewrite)")
    sub.add_argument("--report", help="write a JSON report of every stage here")


def _add_selection_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--vital", action="append", metavar="ATTR=VALUE",
                     help="vital attribute equality filter, repeatable")
    sub.add_argument("--parameter-attribute", dest="parameter_attribute",
                     help="attribute whose per-value counts form the signal")
    sub.add_argument("--parameter-values", dest="parameter_values",
                     help="comma-separated parameter values, in signal order")
    sub.add_argument("--delimiter", help="CSV delimiter (default ',')")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="wavemask",
        description="Mask count signals by rewriting their wavelet approximation.",
    )
    parser.add_argument("--config", help="JSON file of option defaults; flags win")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--wavelet", help="filter pair, e.g. daubechies:2 or haar")
    common.add_argument("--level", type=int, help="decomposition depth k")

    commands = parser.add_subparsers(dest="command", required=True)

    ms = commands.add_parser("mask-signal", parents=[common], help="mask a signal file")
    ms.add_argument("--input", help="signal file: one number per line, '#' comments")
    ms.add_argument("--output", help="where to write the masked integer signal")
    ms.add_argument("--scaled-output", dest="scaled_output",
                    help="also write the pre-rounding masked signal here")
    _add_masking_options(ms)

    mm = commands.add_parser("mask-microfile", parents=[common],
                             help="mask counts extracted from a CSV and rewrite it")
    mm.add_argument("--input", help="CSV microfile")
    mm.add_argument("--output", help="where to write the rewritten CSV")
    _add_selection_options(mm)
    _add_masking_options(mm)

    wm = commands.add_parser("wrm", parents=[common],
                             help="dump the reconstruction matrix as CSV")
    wm.add_argument("--length", type=int, help="signal length m")
    wm.add_argument("--output", help="CSV destination (default stdout)")

    vf = commands.add_parser("verify", parents=[common],
                             help="check total preservation and detail proportionality")
    vf.add_argument("--original", help="original signal file (or CSV with selection flags)")
    vf.add_argument("--masked", help="masked signal file (or CSV)")
    vf.add_argument("--tol", type=float, help="relative tolerance (default 1e-6)")
    _add_selection_options(vf)
    return parser


_HANDLERS = {
    "mask-signal": _cmd_mask_signal,
    "mask-microfile": _cmd_mask_microfile,
    "wrm": _cmd_wrm,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        defaults: dict = {}
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as handle:
                    defaults = json.load(handle)
            except FileNotFoundError:
                raise ConfigurationError(f"config file not found: {args.config}") from None
            except json.JSONDecodeError as exc:
                raise ConfigurationError(f"{args.config}: invalid JSON ({exc})") from None
            if not isinstance(defaults, dict):
                raise ConfigurationError(f"{args.config}: expected a JSON object")
        given = {k: v for k, v in vars(args).items() if v is not None and k != "config"}
        eff = {**defaults, **given}
        handler = _HANDLERS[args.command]
        try:
            return handler(eff)
        except FileNotFoundError as exc:
            raise ConfigurationError(f"input not found: {exc.filename or exc}") from None
    except (ConfigurationError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MaskingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MASKING
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
