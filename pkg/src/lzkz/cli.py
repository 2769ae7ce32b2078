"""Command-line front end.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from lzkz import kz, sweep
from lzkz.model import QubitParams
from lzkz.propagator import PropagationError
from lzkz.pulse import Waveform, make_double_passage
from lzkz.sweep import ConfigError

# dotted schema paths exposed as --flags, with their value types
OVERRIDES = {
    "qubit.delta": float,
    "qubit.gamma_phi": float,
    "pulse.amplitude": float,
    "pulse.ramp_time": float,
    "pulse.hold_time": float,
    "pulse.convention": str,
    "pulse.eps0": float,
    "pulse.eps_end": float,
    "pulse.filter_tau": float,
    "pulse.sample_dt": float,
    "pulse.window_factor": float,
    "readout.v_scale": float,
    "readout.offset": float,
    "readout.noise_sigma": float,
    "tol": float,
    "seed": int,
    "workers": int,
    "alpha": float,
}


class UsageError(Exception):
    pass


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="SweepConfig JSON file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--render", action="store_true", help="also write an SVG figure")
    p.add_argument(
        "--axis",
        action="append",
        default=[],
        metavar="NAME:MIN:MAX:COUNT[:log]",
        help="replace the axis NAME (repeatable)",
    )
    for path, typ in OVERRIDES.items():
        p.add_argument(f"--{path}", dest=path, type=str, default=None, metavar=typ.__name__.upper())


def _parse_axis(text: str) -> dict:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"bad --axis {text!r}; expected NAME:MIN:MAX:COUNT[:log]")
    try:
        ax = {"name": parts[0], "min": float(parts[1]), "max": float(parts[2]), "count": int(parts[3])}
    except ValueError as exc:
        raise UsageError(f"bad --axis {text!r}: {exc}") from exc
    if len(parts) == 5:
        ax["spacing"] = parts[4]
    return ax


def _convert(path, raw):
    if raw.lower() in ("null", "none"):
        return None
    try:
        return OVERRIDES[path](raw)
    except ValueError as exc:
        raise UsageError(f"--{path}: cannot parse {raw!r}") from exc


def build_config(args, kind: str) -> sweep.SweepConfig:
    if args.config is not None:
        try:
            d = json.loads(args.config.read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise UsageError("config must be a JSON object")
    else:
        base = sweep.default_map_config() if kind == "lzs_map" else sweep.default_kz_config()
        d = base.to_dict()
    if d.get("kind", kind) != kind:
        raise ConfigError(f"config kind {d.get('kind')!r} does not match subcommand (expected {kind!r})")
    d.setdefault("kind", kind)
    for path in OVERRIDES:
        raw = getattr(args, path)
        if raw is None:
            continue
        value = _convert(path, raw)
        if "." in path:
            section, key = path.split(".")
            if d.get(section) is None:
                d[section] = {}
            d[section][key] = value
        else:
            d[path] = value
    axes = list(d.get("axes") or [])
    for text in args.axis:
        ax = _parse_axis(text)
        axes = [a for a in axes if a.get("name") != ax["name"]] + [ax]
    if args.axis:
        if kind == "lzs_map":
            axes.sort(key=lambda a: ["eps_lz0", "nu"].index(a["name"]) if a.get("name") in ("eps_lz0", "nu") else 9)
        elif kind == "kz_curve":
            axes = axes[-1:]
        d["axes"] = axes
    return sweep.config_from_dict(d)


def _write(result, args, stem: str) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    path = sweep.export(result, args.out / f"{stem}.{args.format}", args.format)
    print(path)
    return path


def cmd_map(args) -> int:
    cfg = build_config(args, "lzs_map")
    result = sweep.run_lzs_map(cfg)
    _write(result, args, "lzs_map")
    if args.render:
        from lzkz.plotting import render_map

        print(render_map(result, args.out / "lzs_map.svg"))
    return 0


def cmd_kz_curve(args) -> int:
    cfg = build_config(args, "kz_curve")
    result = sweep.run_kz_curve(cfg)
    _write(result, args, "kz_curve")
    if args.render:
        from lzkz.plotting import render_kz_curve

        print(render_kz_curve(result, args.out / "kz_curve.svg", alpha=cfg.alpha))
    return 0


def _finite_or_none(v):
    return None if v is None or (isinstance(v, float) and not math.isfinite(v)) else v


def cmd_single(args) -> int:
    if args.breakpoints:
        try:
            bps = [tuple(float(v) for v in item.split(":")) for item in args.breakpoints.split(",")]
            w = Waveform(tuple(bps))
        except ValueError as exc:
            raise UsageError(f"bad --breakpoints: {exc}") from exc
        if args.filter_tau:
            w = Waveform(w.breakpoints, args.filter_tau)
    else:
        missing = [f for f in ("eps0", "eps_end", "ramp_time") if getattr(args, f) is None]
        if missing:
            raise UsageError("missing required flags: " + ", ".join("--" + m.replace("_", "-") for m in missing))
        try:
            w = make_double_passage(args.eps0, args.eps_end, args.ramp_time, args.hold_time)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.filter_tau:
            w = Waveform(w.breakpoints, args.filter_tau)
    try:
        q = QubitParams(args.delta, args.gamma_phi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    row = sweep.single_shot(w, q, args.tol, args.alpha)
    nus = [row.get("nu_cross_1"), row.get("nu_cross_2")]
    out = {
        "p_excited": row["p_excited_numeric"],
        "p_paper_formula": row.get("p_paper_formula"),
        "p_transfer_matrix": row.get("p_transfer_matrix"),
        "phi": row.get("phi"),
        "nu_crossings": [v for v in nus if v is not None and math.isfinite(v)],
        "p_lz": row.get("p_lz"),
        "p_excited_lindblad": row.get("p_excited_lindblad"),
        "steps": row["steps"],
    }
    print(json.dumps({k: _finite_or_none(v) for k, v in out.items()}, indent=2))
    return 0


def cmd_fit_alpha(args) -> int:
    result = sweep.load(args.input)
    x = result.column("x")
    name = "rho_numeric" if "rho_numeric" in result.columns else "rho"
    rho = result.column(name)
    ok = np.isfinite(x) & np.isfinite(rho) & (rho > 0)
    if "flag" in result.columns:
        ok &= result.column("flag") == 0
    alpha, resid = kz.fit_alpha(np.column_stack([x[ok], rho[ok]]))
    print(json.dumps({"alpha_hat": alpha, "rms_log_residual": resid, "points": int(ok.sum())}))
    return 0


def cmd_validate(args) -> int:
    from lzkz.validate import run_checks

    results = run_checks(args.tol)
    width = max(len(n) for n, _, _ in results)
    for name, ok, detail in results:
        print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lzkz", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", help="one double-passage run, JSON on stdout")
    p.add_argument("--delta", type=float, default=10.3, help="tunnel coupling (ueV)")
    p.add_argument("--gamma-phi", type=float, default=0.0, help="dephasing rate (1/ns)")
    p.add_argument("--eps0", type=float)
    p.add_argument("--eps-end", type=float)
    p.add_argument("--ramp-time", type=float)
    p.add_argument("--hold-time", type=float, default=0.0)
    p.add_argument("--breakpoints", help="explicit waveform 't:eps,t:eps,...' instead of a trapezoid")
    p.add_argument("--filter-tau", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(func=cmd_single)

    p = sub.add_parser("map", help="interference map over (eps_lz0, nu)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("kz-curve", help="defect density against quench ratio")
    _add_config_flags(p)
    p.set_defaults(func=cmd_kz_curve)

    p = sub.add_parser("fit-alpha", help="fit alpha to a CSV/JSON table with x and rho columns")
    p.add_argument("input", type=Path)
    p.set_defaults(func=cmd_fit_alpha)

    p = sub.add_parser("validate", help="run the embedded oracle checks")
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"lzkz: error: {exc}", file=sys.stderr)
        return 2
    except (PropagationError, OSError, ValueError, ArithmeticError) as exc:
        print(f"lzkz: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
