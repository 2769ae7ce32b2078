"""Piecewise-linear detuning waveforms, RC filtering and crossing analysis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.signal import lfilter

from lzkz.model import HBAR


@dataclass(frozen=True)
class Waveform:
    """Detuning schedule eps(t) given by breakpoints ``(t_ns, eps_ueV)``.

    Linear between breakpoints, constant outside. When ``filter_tau > 0``
    the programmed trace is passed through a single-pole RC filter sampled
    every ``sample_dt`` and every evaluation refers to the filtered trace.
    """

    breakpoints: tuple[tuple[float, float], ...]
    filter_tau: float = 0.0
    sample_dt: float | None = None

    def __post_init__(self):
        bps = tuple((float(t), float(e)) for t, e in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        if len(bps) < 2:
            raise ValueError("a waveform needs at least two breakpoints")
        ts = [t for t, _ in bps]
        if any(not math.isfinite(v) for bp in bps for v in bp):
            raise ValueError("breakpoints must be finite")
        if any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
            raise ValueError("breakpoint times must be strictly increasing")
        if self.filter_tau < 0:
            raise ValueError("filter_tau must be >= 0")
        if self.filter_tau > 0:
            if self.sample_dt is None:
                object.__setattr__(self, "sample_dt", self.filter_tau / 100.0)
            _check_filter_step(self.filter_tau, self.sample_dt)
        elif self.sample_dt is not None and self.sample_dt <= 0:
            raise ValueError("sample_dt must be positive")

    @property
    def filtered(self) -> bool:
        return self.filter_tau > 0

    @property
    def t_start(self) -> float:
        return self.breakpoints[0][0]

    @property
    def t_end(self) -> float:
        return self.breakpoints[-1][0]

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    @cached_property
    def knots(self) -> tuple[np.ndarray, np.ndarray]:
        """Times and values of the effective (possibly filtered) trace."""
        ts = np.array([t for t, _ in self.breakpoints])
        es = np.array([e for _, e in self.breakpoints])
        if self.filtered:
            ts, es = _rc_filter(ts, es, self.filter_tau, self.sample_dt)
        ts.setflags(write=False)
        es.setflags(write=False)
        return ts, es

    def __call__(self, t):
        ts, es = self.knots
        return np.interp(t, ts, es) if np.ndim(t) else float(np.interp(t, ts, es))

    def reversed(self) -> "Waveform":
        """Time-reversed copy, t -> t_start + t_end - t."""
        t0, t1 = self.t_start, self.t_end
        bps = tuple((t0 + t1 - t, e) for t, e in reversed(self.breakpoints))
        if self.filtered:
            ts, es = self.knots
            return Waveform(tuple(zip(t0 + t1 - ts[::-1], es[::-1])))
        return Waveform(bps)

    def to_dict(self) -> dict:
        return {
            "breakpoints": [[t, e] for t, e in self.breakpoints],
            "filter_tau": self.filter_tau,
            "sample_dt": self.sample_dt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Waveform":
        extra = set(d) - {"breakpoints", "filter_tau", "sample_dt"}
        if extra:
            raise ValueError(f"unknown waveform keys: {sorted(extra)}")
        return cls(
            tuple(tuple(bp) for bp in d["breakpoints"]),
            float(d.get("filter_tau", 0.0) or 0.0),
            d.get("sample_dt"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Waveform":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Crossing:
    t: float
    nu: float
    tangential: bool = False


@dataclass(frozen=True)
class CrossingReport:
    crossings: tuple[Crossing, ...] = field(default_factory=tuple)

    def __len__(self):
        return len(self.crossings)

    def __iter__(self):
        return iter(self.crossings)

    def __getitem__(self, i):
        return self.crossings[i]

    @property
    def transversal(self) -> tuple[Crossing, ...]:
        return tuple(c for c in self.crossings if not c.tangential)


def evaluate(w: Waveform, t):
    return w(t)


def make_double_passage(eps0: float, eps_end: float, ramp_time: float, hold_time: float = 0.0) -> Waveform:
    """Trapezoid eps0 -> eps_end -> (hold) -> eps0 crossing the anti-crossing twice."""
    if eps0 * eps_end >= 0:
        raise ValueError(f"eps0 and eps_end must have opposite signs, got {eps0!r}, {eps_end!r}")
    if eps0 <= 0:
        raise ValueError("the double passage starts at positive detuning")
    if ramp_time <= 0 or hold_time < 0:
        raise ValueError("ramp_time must be > 0 and hold_time >= 0")
    bps = [(0.0, eps0), (ramp_time, eps_end)]
    if hold_time > 0:
        bps.append((ramp_time + hold_time, eps_end))
    bps.append((2 * ramp_time + hold_time, eps0))
    return Waveform(tuple(bps))


def asymptotic_sweep(delta: float, nu: float, window_factor: float = 50.0) -> Waveform:
    """Single linear passage from +E to -E, E = window_factor * max(delta, sqrt(hbar nu))."""
    if delta <= 0 or nu <= 0:
        raise ValueError("delta and nu must be positive")
    e = window_factor * max(delta, math.sqrt(HBAR * nu))
    return Waveform(((0.0, e), (2 * e / nu, -e)))


def _check_filter_step(tau_rc, dt):
    if not tau_rc > 0:
        raise ValueError("tau_rc must be positive")
    if dt is None or not dt > 0:
        raise ValueError("dt must be positive")
    if dt > tau_rc / 10 * (1 + 1e-12):
        raise ValueError(f"filter undersampled: dt={dt!r} > tau_rc/10={tau_rc / 10!r}")


def _rc_filter(ts, xs, tau_rc, dt):
    span = ts[-1] - ts[0]
    n = max(1, math.ceil(span / dt - 1e-9))
    grid = ts[0] + np.arange(n + 1) * (span / n)
    grid[-1] = ts[-1]
    x = np.interp(grid, ts, xs)
    decay = math.exp(-(span / n) / tau_rc)
    # y[k+1] = x[k+1] + (y[k] - x[k+1]) * decay, as a first-order IIR
    y = np.empty_like(x)
    y[0] = x[0]
    y[1:], _ = lfilter([1.0 - decay], [1.0, -decay], x[1:], zi=[decay * x[0]])
    return grid, y


def apply_lowpass(w: Waveform, tau_rc: float, dt: float) -> Waveform:
    """Single-pole RC response of ``w`` as a dense breakpoint waveform.

    Exact exponential update on a uniform grid of step ``<= dt`` starting
    from ``y(t0) = x(t0)``.
    """
    _check_filter_step(tau_rc, dt)
    ts, es = w.knots
    grid, y = _rc_filter(np.asarray(ts), np.asarray(es), tau_rc, dt)
    return Waveform(tuple(zip(grid.tolist(), y.tolist())))


def crossing_report(w: Waveform) -> CrossingReport:
    """Locate every zero of eps(t) and the sweep rate |d eps/dt| there.

    Zeros strictly inside a segment are solved analytically on that linear
    piece. Zeros landing on a breakpoint count as crossings only if the
    sign actually changes; otherwise they are reported tangential with
    ``nu = 0``.
    """
    ts, es = w.knots
    out = []
    n = len(ts)

    def rate(tc, k):
        if w.filtered:
            h = w.sample_dt
            return abs(float(w(tc + h)) - float(w(tc - h))) / (2 * h)
        return abs((es[k + 1] - es[k]) / (ts[k + 1] - ts[k]))

    k = 0
    while k < n:
        e = es[k]
        if e == 0.0:
            # run of exact zeros starting at k
            j = k
            while j + 1 < n and es[j + 1] == 0.0:
                j += 1
            left = es[k - 1] if k > 0 else 0.0
            right = es[j + 1] if j + 1 < n else 0.0
            if j == k and left * right < 0:
                if w.filtered:
                    nu = rate(ts[k], k)
                else:
                    s0 = abs((es[k] - es[k - 1]) / (ts[k] - ts[k - 1]))
                    s1 = abs((es[k + 1] - es[k]) / (ts[k + 1] - ts[k]))
                    nu = 0.5 * (s0 + s1)
                out.append(Crossing(float(ts[k]), float(nu)))
            else:
                out.append(Crossing(float(ts[k]), 0.0, tangential=True))
            k = j + 1
            continue
        if k + 1 < n and e * es[k + 1] < 0:
            t0, t1, e1 = ts[k], ts[k + 1], es[k + 1]
            frac = e / (e - e1)
            tc = t0 + frac * (t1 - t0)
            out.append(Crossing(float(tc), float(rate(tc, k))))
        k += 1
    return CrossingReport(tuple(out))
