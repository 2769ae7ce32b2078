"""Parameter sweeps: interference maps, Kibble-Zurek curves, readout model, export.

Every grid point is an independent task. Results land in a table addressed
by grid index, so neither worker count nor completion order can change a
single output value. Readout noise for point ``i`` is drawn from a
generator seeded with ``(seed, i)``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from lzkz import analytic, kz
from lzkz.model import QubitParams
from lzkz.propagator import (
    TOL_RANGE,
    DensityMatrix,
    prepare_ground,
    propagate_lindblad,
    propagate_unitary,
)
from lzkz.pulse import Waveform, asymptotic_sweep, crossing_report, make_double_passage

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
KINDS = ("lzs_map", "kz_curve", "single_shot")
CONVENTIONS = ("fixed_amplitude", "fixed_width")
WORKERS_ENV = "LZKZ_WORKERS"
CSV_DIGITS = 12


class ConfigError(ValueError):
    """Invalid or inconsistent sweep configuration."""


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError(f"axis {self.name!r}: count must be >= 1")
        if not self.min < self.max:
            raise ConfigError(f"axis {self.name!r}: need min < max")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"axis {self.name!r}: spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.min <= 0:
            raise ConfigError(f"axis {self.name!r}: log spacing needs min > 0")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([float(self.min)])
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class PulseSpec:
    """Pulse template.

    For maps, ``eps_lz0`` shifts the whole trapezoid and ``nu`` sets the
    ramp: with ``fixed_amplitude`` the depth ``amplitude`` is kept and the
    ramp time is ``amplitude / nu``; with ``fixed_width`` the ramp time is
    kept and the depth becomes ``nu * ramp_time``. Single shots use
    ``eps0``/``eps_end``/``ramp_time`` directly.
    """

    amplitude: float = 800.0
    ramp_time: float | None = None
    hold_time: float = 2.0
    convention: str = "fixed_amplitude"
    eps0: float | None = None
    eps_end: float | None = None
    filter_tau: float = 0.0
    sample_dt: float | None = None
    window_factor: float = 50.0

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ConfigError(f"pulse.convention must be one of {CONVENTIONS}")
        if self.convention == "fixed_width" and not (self.ramp_time and self.ramp_time > 0):
            raise ConfigError("fixed_width convention needs pulse.ramp_time > 0")
        if self.amplitude <= 0 or self.hold_time < 0 or self.filter_tau < 0 or self.window_factor <= 0:
            raise ConfigError("pulse amplitude/window_factor must be > 0, hold_time/filter_tau >= 0")


@dataclass(frozen=True)
class ReadoutSpec:
    v_scale: float = 1.0
    offset: float = 0.0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if not 0 < self.v_scale <= 1:
            raise ConfigError("readout.v_scale must lie in (0, 1]")
        if self.noise_sigma < 0:
            raise ConfigError("readout.noise_sigma must be >= 0")


@dataclass(frozen=True)
class SweepConfig:
    kind: str
    qubit: QubitParams = field(default_factory=lambda: QubitParams(10.3))
    pulse: PulseSpec = field(default_factory=PulseSpec)
    axes: tuple[Axis, ...] = ()
    tol: float = 1e-8
    readout: ReadoutSpec | None = None
    seed: int = 0
    workers: int | None = None
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        lo, hi = TOL_RANGE
        if not lo <= self.tol <= hi:
            raise ConfigError(f"tol must lie in [{lo:g}, {hi:g}]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.alpha <= 0:
            raise ConfigError("alpha must be positive")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        names = [a.name for a in self.axes]
        if self.kind == "lzs_map" and sorted(names) != ["eps_lz0", "nu"]:
            raise ConfigError("lzs_map needs exactly the axes 'eps_lz0' and 'nu'")
        if self.kind == "kz_curve" and (len(names) != 1 or names[0] not in ("nu", "x")):
            raise ConfigError("kz_curve needs a single axis named 'nu' or 'x'")
        if self.kind == "single_shot":
            if names:
                raise ConfigError("single_shot takes no axes")
            pl = self.pulse
            if pl.eps0 is None or pl.eps_end is None or pl.ramp_time is None:
                raise ConfigError("single_shot needs pulse.eps0, pulse.eps_end and pulse.ramp_time")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.count for a in self.axes)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": self.kind,
            "qubit": {"delta": self.qubit.delta, "gamma_phi": self.qubit.gamma_phi},
            "pulse": asdict(self.pulse),
            "axes": [asdict(a) for a in self.axes],
            "tol": self.tol,
            "readout": None if self.readout is None else asdict(self.readout),
            "seed": self.seed,
            "workers": self.workers,
            "alpha": self.alpha,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        return config_from_dict(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SweepConfig":
        return config_from_dict(json.loads(text))


_TOP_KEYS = {"schema_version", "kind", "qubit", "pulse", "axes", "tol", "readout", "seed", "workers", "alpha"}
_QUBIT_KEYS = {"delta", "gamma_phi"}
_PULSE_KEYS = set(PulseSpec.__dataclass_fields__)
_READOUT_KEYS = set(ReadoutSpec.__dataclass_fields__)
_AXIS_KEYS = set(Axis.__dataclass_fields__)


def unknown_keys(d: dict) -> list[str]:
    """Dotted paths of keys the schema does not know."""
    bad = [k for k in d if k not in _TOP_KEYS]
    for section, allowed in (("qubit", _QUBIT_KEYS), ("pulse", _PULSE_KEYS), ("readout", _READOUT_KEYS)):
        sub = d.get(section)
        if isinstance(sub, dict):
            bad += [f"{section}.{k}" for k in sub if k not in allowed]
    for i, ax in enumerate(d.get("axes") or []):
        if isinstance(ax, dict):
            bad += [f"axes.{i}.{k}" for k in ax if k not in _AXIS_KEYS]
    return bad


def config_from_dict(d: dict) -> SweepConfig:
    bad = unknown_keys(d)
    if bad:
        raise ConfigError(f"unknown config keys: {', '.join(bad)}")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    if "kind" not in d:
        raise ConfigError("missing required key: kind")
    try:
        qubit = QubitParams(**(d.get("qubit") or {"delta": 10.3}))
        readout = d.get("readout")
        return SweepConfig(
            kind=d["kind"],
            qubit=qubit,
            pulse=PulseSpec(**(d.get("pulse") or {})),
            axes=tuple(Axis(**a) for a in d.get("axes") or ()),
            tol=float(d.get("tol", 1e-8)),
            readout=None if readout is None else ReadoutSpec(**readout),
            seed=int(d.get("seed", 0)),
            workers=d.get("workers"),
            alpha=float(d.get("alpha", 1.0)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


@dataclass
class SweepResult:
    columns: list[str]
    rows: np.ndarray
    metadata: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, len(self.columns))

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.columns.index(name)]

    def to_csv(self) -> str:
        return to_csv(self)

    def equals(self, other: "SweepResult") -> bool:
        return (
            self.columns == other.columns
            and self.rows.shape == other.rows.shape
            and bool(np.array_equal(self.rows, other.rows, equal_nan=True))
            and self.summary == other.summary
        )


# -- readout ---------------------------------------------------------------


def point_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for grid point ``index``; independent of scheduling."""
    return np.random.default_rng([int(seed), int(index)])


def simulate_readout(p, cal: ReadoutSpec, rng: np.random.Generator):
    """Detector signal ``offset + v_scale * p + N(0, noise_sigma)``."""
    p_arr = np.asarray(p, dtype=float)
    noise = rng.normal(0.0, cal.noise_sigma, size=p_arr.shape) if cal.noise_sigma > 0 else 0.0
    out = cal.offset + cal.v_scale * p_arr + noise
    return float(out) if np.ndim(out) == 0 else out


def extract_p_lz(phi, signal, cal: ReadoutSpec, method: str = "fit", branch: str = analytic.NEAR_ADIABATIC) -> float:
    """Recover P_LZ from a fringe sampled along the phase axis.

    ``method="fit"`` takes the fringe amplitude from a least-squares fit of
    ``a + b cos(phi) + c sin(phi)``; ``method="peak_to_peak"`` uses
    ``(max - min) / 2``. Either way ``V = 2A / v_scale`` is inverted on
    ``branch``.
    """
    phi = np.asarray(phi, dtype=float)
    s = np.asarray(signal, dtype=float)
    if phi.shape != s.shape or s.ndim != 1:
        raise ValueError("phi and signal must be 1-d arrays of equal length")
    if len(s) < 8:
        raise ValueError("need at least 8 points along the phase axis")
    if np.ptp(phi) < 2 * math.pi * (1 - 1e-9):
        raise ValueError("points must span at least one fringe period")
    if method == "peak_to_peak":
        amp = 0.5 * float(np.ptp(s))
    elif method == "fit":
        design = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
        coef, *_ = np.linalg.lstsq(design, s, rcond=None)
        amp = math.hypot(coef[1], coef[2])
    else:
        raise ValueError(f"unknown method {method!r}")
    v = 2.0 * amp / cal.v_scale
    if v > 0.5:
        raise ValueError(f"visibility {v:.6g} exceeds 1/2: inconsistent calibration")
    return analytic.invert_visibility(v, branch)


# -- per-point work ----------------------------------------------------------

MAP_COLUMNS = [
    "index",
    "eps_lz0",
    "nu",
    "nu_cross_1",
    "nu_cross_2",
    "p_lz",
    "delta_param",
    "phi",
    "p_excited_numeric",
    "p_paper_formula",
    "p_transfer_matrix",
    "x",
    "rho_theory",
    "steps",
    "flag",
]
KZ_COLUMNS = [
    "index",
    "nu",
    "nu_cross",
    "x",
    "x_alpha",
    "p_lz",
    "rho_numeric",
    "rho_theory",
    "steps",
    "flag",
]


def map_waveform(cfg: SweepConfig, eps0: float, nu: float) -> Waveform:
    pl = cfg.pulse
    if pl.convention == "fixed_amplitude":
        depth, ramp = pl.amplitude, pl.amplitude / nu
    else:
        depth, ramp = nu * pl.ramp_time, pl.ramp_time
    w = make_double_passage(eps0, eps0 - depth, ramp, pl.hold_time)
    return _with_filter(w, pl)


def _with_filter(w: Waveform, pl: PulseSpec) -> Waveform:
    if pl.filter_tau > 0:
        return Waveform(w.breakpoints, pl.filter_tau, pl.sample_dt)
    return w


def single_waveform(cfg: SweepConfig) -> Waveform:
    pl = cfg.pulse
    return _with_filter(make_double_passage(pl.eps0, pl.eps_end, pl.ramp_time, pl.hold_time), pl)


def single_shot(w: Waveform, q: QubitParams, tol: float = 1e-8, alpha: float = 1.0) -> dict:
    """Propagate one waveform from the ground state and collect every observable.

    Phase, closed-form predictions and the KZ mapping are only filled in
    when the waveform crosses the anti-crossing exactly twice.
    """
    row = {}
    rep = crossing_report(w)
    rates = [c.nu for c in rep.transversal]
    row["nu_cross_1"] = rates[0] if rates else math.nan
    row["nu_cross_2"] = rates[1] if len(rates) > 1 else math.nan
    psi0 = prepare_ground(float(w(w.t_start)), q)
    res = propagate_unitary(w, q, psi0, tol)
    row["p_excited_numeric"] = res.p_excited
    row["steps"] = res.steps_taken
    if q.gamma_phi > 0:
        row["p_excited_lindblad"] = propagate_lindblad(w, q, DensityMatrix.from_pure(psi0), tol).p_excited
    if len(rates) == 2 and len(rep) == 2:
        nu_c = 0.5 * (rates[0] + rates[1])
        p_lz = analytic.lz_probability(q.delta, nu_c)
        dp = analytic.adiabaticity(q.delta, nu_c)
        phi = analytic.stuckelberg_phase(w, q)
        row.update(p_lz=p_lz, delta_param=dp, phi=phi)
        row["p_paper_formula"] = analytic.double_passage_paper(p_lz, phi) if p_lz <= 0.5 else math.nan
        row["p_transfer_matrix"] = analytic.double_passage_transfer_matrix(p_lz, phi, dp)
        x = kz.map_lz_to_quench_ratio(q.delta, nu_c)
        row.update(x=x, rho_theory=kz.defect_density(alpha * x))
    return row


def _map_point(cfg: SweepConfig, index: int, eps0: float, nu: float) -> dict:
    w = map_waveform(cfg, eps0, nu)
    return {"eps_lz0": eps0, "nu": nu, **single_shot(w, cfg.qubit, cfg.tol, cfg.alpha)}


def _kz_point(cfg: SweepConfig, index: int, nu: float) -> dict:
    q = cfg.qubit
    w = _with_filter(asymptotic_sweep(q.delta, nu, cfg.pulse.window_factor), cfg.pulse)
    rep = crossing_report(w)
    nu_c = rep.transversal[0].nu if rep.transversal else nu
    res = propagate_unitary(w, q, prepare_ground(float(w(w.t_start)), q), cfg.tol)
    x = kz.map_lz_to_quench_ratio(q.delta, nu_c)
    return {
        "nu": nu,
        "nu_cross": nu_c,
        "x": x,
        "x_alpha": cfg.alpha * x,
        "p_lz": analytic.lz_probability(q.delta, nu_c),
        "rho_numeric": res.p_excited,
        "rho_theory": kz.defect_density(cfg.alpha * x),
        "steps": res.steps_taken,
    }


def resolve_workers(hint: int | None) -> int:
    if hint:
        return int(hint)
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_grid(cfg: SweepConfig, columns: list[str], tasks: list[tuple], work, workers: int | None):
    """Evaluate ``work(cfg, index, *args)`` for every task into an index-addressed table."""
    table = np.full((len(tasks), len(columns)), np.nan)
    flags = {}

    def one(i):
        args = tasks[i]
        try:
            row = work(cfg, i, *args)
            flag = 0
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            flags[i] = f"{type(exc).__name__}: {exc}"
            row = {}
            flag = 1
        if cfg.readout is not None:
            p = row.get("p_excited_numeric", row.get("rho_numeric", math.nan))
            row["detector_signal"] = simulate_readout(p, cfg.readout, point_rng(cfg.seed, i))
        row["index"] = i
        row["flag"] = flag
        for j, name in enumerate(columns):
            if name in row:
                table[i, j] = row[name]

    n_workers = max(1, min(resolve_workers(workers), len(tasks)))
    if n_workers == 1:
        for i in range(len(tasks)):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(one, range(len(tasks))))
    for i in sorted(flags):
        log.warning("grid point %d flagged: %s", i, flags[i])
    return table, {str(i): flags[i] for i in sorted(flags)}


def _metadata(cfg: SweepConfig, started: float, flags: dict) -> dict:
    from lzkz import __version__

    return {
        "config": cfg.to_dict(),
        "code_version": __version__,
        "wall_time_s": time.perf_counter() - started,
        "flags": flags,
    }


def _extra_columns(cfg: SweepConfig, base: list[str]) -> list[str]:
    cols = list(base)
    if cfg.qubit.gamma_phi > 0 and "p_excited_numeric" in cols:
        cols.insert(cols.index("p_excited_numeric") + 1, "p_excited_lindblad")
    if cfg.readout is not None:
        cols.insert(cols.index("steps"), "detector_signal")
    return cols


def run_lzs_map(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Double-passage population on the (eps_lz0, nu) grid, one row per point."""
    if cfg.kind != "lzs_map":
        raise ConfigError(f"run_lzs_map needs kind 'lzs_map', got {cfg.kind!r}")
    started = time.perf_counter()
    grids = [a.values() for a in cfg.axes]
    names = [a.name for a in cfg.axes]
    tasks = []
    for i in range(len(grids[0])):
        for j in range(len(grids[1])):
            point = {names[0]: grids[0][i], names[1]: grids[1][j]}
            tasks.append((float(point["eps_lz0"]), float(point["nu"])))
    cols = _extra_columns(cfg, MAP_COLUMNS)
    table, flags = _run_grid(cfg, cols, tasks, _map_point, workers or cfg.workers)
    return SweepResult(cols, table, _metadata(cfg, started, flags))


def run_single(cfg: SweepConfig) -> SweepResult:
    if cfg.kind != "single_shot":
        raise ConfigError(f"run_single needs kind 'single_shot', got {cfg.kind!r}")
    started = time.perf_counter()
    pl = cfg.pulse

    def work(c, i):
        return {"eps_lz0": pl.eps0, **single_shot(single_waveform(c), c.qubit, c.tol, c.alpha)}

    cols = _extra_columns(cfg, MAP_COLUMNS)
    table, flags = _run_grid(cfg, cols, [()], work, 1)
    return SweepResult(cols, table, _metadata(cfg, started, flags))


def run_kz_curve(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Single-passage defect density along nu (or x) with an alpha fit over the curve."""
    if cfg.kind != "kz_curve":
        raise ConfigError(f"run_kz_curve needs kind 'kz_curve', got {cfg.kind!r}")
    started = time.perf_counter()
    ax = cfg.axes[0]
    vals = ax.values()
    if ax.name == "x":
        nus = [kz.nu_for_quench_ratio(cfg.qubit.delta, float(x)) for x in vals]
    else:
        nus = [float(v) for v in vals]
    cols = _extra_columns(cfg, KZ_COLUMNS)
    table, flags = _run_grid(cfg, cols, [(nu,) for nu in nus], _kz_point, workers or cfg.workers)
    result = SweepResult(cols, table, _metadata(cfg, started, flags))
    ok = (result.column("flag") == 0) & (result.column("rho_numeric") > 0)
    pts = np.column_stack([result.column("x")[ok], result.column("rho_numeric")[ok]])
    if len(pts) >= 5 and np.ptp(pts[:, 0]) > 0:
        alpha_hat, resid = kz.fit_alpha(pts)
        result.summary = {"alpha_hat": alpha_hat, "rms_log_residual": resid}
    return result


def run(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    if cfg.kind == "lzs_map":
        return run_lzs_map(cfg, workers)
    if cfg.kind == "kz_curve":
        return run_kz_curve(cfg, workers)
    return run_single(cfg)


# -- fringe analysis ---------------------------------------------------------


def _wrap(a):
    return (a + math.pi) % (2 * math.pi) - math.pi


def fringe_extrema(phi, p, half_window: int = 2) -> list[tuple[float, str]]:
    """Refined extremum phases of a sampled fringe.

    Interior grid extrema are refined by fitting ``a + b cos + c sin`` in
    phi over ``2 * half_window + 1`` neighbours and taking the nearest
    extremum of the fit. Returns ``(phi_extremum, "max" | "min")``.
    """
    phi = np.asarray(phi, dtype=float)
    p = np.asarray(p, dtype=float)
    out = []
    for k in range(1, len(p) - 1):
        if p[k] > p[k - 1] and p[k] > p[k + 1]:
            kind = "max"
        elif p[k] < p[k - 1] and p[k] < p[k + 1]:
            kind = "min"
        else:
            continue
        lo, hi = max(0, k - half_window), min(len(p), k + half_window + 1)
        design = np.column_stack([np.ones(hi - lo), np.cos(phi[lo:hi]), np.sin(phi[lo:hi])])
        coef, *_ = np.linalg.lstsq(design, p[lo:hi], rcond=None)
        theta = math.atan2(coef[2], coef[1])
        target = theta if kind == "max" else theta + math.pi
        out.append((phi[k] + _wrap(target - phi[k]), kind))
    return out


def compare_fringes(result: SweepResult, delta_range=(0.05, 1.0)) -> list[dict]:
    """Offsets of numeric fringe extrema from transfer-matrix extrema.

    For each nu row with adiabaticity inside ``delta_range``, returns one
    record per extremum with ``offset`` in units of the local fringe period.
    """
    nus = result.column("nu")
    records = []
    for nu in np.unique(nus):
        sel = (nus == nu) & (result.column("flag") == 0)
        if sel.sum() < 3:
            continue
        dp = result.column("delta_param")[sel]
        if not (delta_range[0] <= np.median(dp) <= delta_range[1]):
            continue
        order = np.argsort(result.column("eps_lz0")[sel])
        phi = result.column("phi")[sel][order]
        p = result.column("p_excited_numeric")[sel][order]
        dps = dp[order]
        for phi_x, kind in fringe_extrema(phi, p):
            stokes = analytic.stokes_phase(float(np.median(dps)))
            # transfer-matrix maxima: phi + 2 phi_S = pi (mod 2 pi); minima: = 0
            target = math.pi if kind == "max" else 0.0
            off = _wrap(phi_x + 2 * stokes - target) / (2 * math.pi)
            records.append({"nu": float(nu), "delta_param": float(np.median(dps)), "phi": phi_x, "kind": kind, "offset": off})
    return records


def map_slice(result: SweepResult, nu_index: int, value: str = "p_excited_numeric"):
    """``(phi, value)`` along the eps_lz0 axis at the ``nu_index``-th distinct nu."""
    nus = np.unique(result.column("nu"))
    sel = result.column("nu") == nus[nu_index]
    order = np.argsort(result.column("eps_lz0")[sel])
    return result.column("phi")[sel][order], result.column(value)[sel][order]


# -- export ------------------------------------------------------------------


def _fmt(v: float) -> str:
    return f"{v:.{CSV_DIGITS}g}"


def to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    buf.write(",".join(result.columns) + "\n")
    for row in result.rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    if result.summary:
        buf.write("#fit," + ",".join(f"{k}={_fmt(v)}" for k, v in sorted(result.summary.items())) + "\n")
    return buf.getvalue()


def from_csv(text: str) -> SweepResult:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty CSV")
    columns = next(csv.reader([lines[0]]))
    rows, summary = [], {}
    for line in lines[1:]:
        if line.startswith("#fit,"):
            for item in line[5:].split(","):
                k, v = item.split("=", 1)
                summary[k] = float(v)
        elif line and not line.startswith("#"):
            rows.append([float(v) for v in line.split(",")])
    return SweepResult(columns, np.array(rows).reshape(-1, len(columns)), {}, summary)


def _json_value(v):
    return None if isinstance(v, float) and math.isnan(v) else v


def to_json(result: SweepResult) -> str:
    payload = {
        "metadata": {**result.metadata, "fit": result.summary or None},
        "columns": result.columns,
        "rows": [[_json_value(float(_fmt(v))) for v in row] for row in result.rows],
    }
    return json.dumps(payload, indent=1)


def from_json(text: str) -> SweepResult:
    d = json.loads(text)
    rows = [[math.nan if v is None else v for v in row] for row in d["rows"]]
    meta = dict(d.get("metadata") or {})
    summary = meta.pop("fit", None) or {}
    return SweepResult(d["columns"], np.array(rows, dtype=float).reshape(-1, len(d["columns"])), meta, summary)


def export(result: SweepResult, path, fmt: str | None = None) -> Path:
    """Write ``result`` as CSV or JSON (inferred from the suffix if ``fmt`` is None)."""
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".").lower()
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = to_json(result)
    else:
        raise ValueError(f"unknown export format {fmt!r} for {path}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {fmt} export to {path}: {exc.strerror or exc}") from exc
    return path


def load(path) -> SweepResult:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return from_json(text) if path.suffix.lower() == ".json" else from_csv(text)


# -- repo defaults -----------------------------------------------------------


def default_map_config(**overrides) -> SweepConfig:
    """64 x 32 coherent map spanning adiabaticity 0.05 .. 1 at delta = 10.3 ueV.

    Amplitude 800 ueV and a 2 ns hold give about 10 fringes along eps_lz0
    in the slowest row; these ranges are repo choices, not measured ones.
    """
    d = {
        "kind": "lzs_map",
        "qubit": {"delta": 10.3, "gamma_phi": 0.0},
        "pulse": {"amplitude": 800.0, "hold_time": 2.0},
        "axes": [
            {"name": "eps_lz0", "min": 400.0, "max": 406.0, "count": 64},
            {"name": "nu", "min": 161.2, "max": 3223.6, "count": 32, "spacing": "log"},
        ],
        "tol": 1e-7,
    }
    d.update(overrides)
    return config_from_dict(d)


def default_kz_config(**overrides) -> SweepConfig:
    d = {
        "kind": "kz_curve",
        "qubit": {"delta": 10.3, "gamma_phi": 0.0},
        "axes": [{"name": "x", "min": 0.05, "max": 1.5, "count": 20, "spacing": "log"}],
        "tol": 1e-8,
    }
    d.update(overrides)
    return config_from_dict(d)
