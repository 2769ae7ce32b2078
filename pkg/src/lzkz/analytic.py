"""Closed-form Landau-Zener and Stueckelberg theory."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import loggamma

from lzkz.model import HBAR, QubitParams
from lzkz.pulse import Waveform, crossing_report

NEAR_ADIABATIC = "near_adiabatic"
NEAR_SUDDEN = "near_sudden"


@dataclass(frozen=True)
class LZPoint:
    delta: float
    nu: float

    def __post_init__(self):
        if not (self.delta > 0 and self.nu > 0):
            raise ValueError("delta and nu must be positive")

    @property
    def delta_param(self) -> float:
        """Adiabaticity delta^2 / (hbar nu)."""
        return self.delta**2 / (HBAR * self.nu)

    @property
    def p_lz(self) -> float:
        return math.exp(-2 * math.pi * self.delta_param)


def adiabaticity(delta: float, nu: float) -> float:
    return delta**2 / (HBAR * nu)


def lz_probability(delta: float, nu: float) -> float:
    """Single-passage transition probability exp(-2 pi delta^2 / hbar nu)."""
    if not (delta > 0 and nu > 0):
        raise ValueError("delta and nu must be positive")
    return math.exp(-2 * math.pi * delta**2 / (HBAR * nu))


def _gap_integral_segment(t0, t1, e0, e1, delta):
    # closed form of int sqrt(eps^2 + (2 delta)^2) dt along a linear piece
    c = 2.0 * delta
    if e1 == e0:
        return math.hypot(e0, c) * (t1 - t0)

    def prim(e):
        return 0.5 * (e * math.hypot(e, c) + c * c * math.asinh(e / c))

    return (prim(e1) - prim(e0)) * (t1 - t0) / (e1 - e0)


def _phase_pieces(w: Waveform, params: QubitParams):
    rep = crossing_report(w)
    cross = rep.transversal
    if len(cross) != 2 or len(rep) != 2:
        raise ValueError(f"Stueckelberg phase needs exactly two crossings, found {len(rep)}")
    t1, t2 = cross[0].t, cross[1].t
    ts, es = w.knots
    inner = (ts > t1) & (ts < t2)
    knots_t = np.concatenate(([t1], ts[inner], [t2]))
    knots_e = np.concatenate(([0.0], es[inner], [0.0]))
    return knots_t, knots_e


def stuckelberg_phase(w: Waveform, params: QubitParams, rtol: float = 1e-9) -> float:
    """Dynamical phase (1/hbar) int E_gap dt accumulated between the two crossings.

    Integrated with adaptive quadrature on every linear piece of the trace.
    """
    knots_t, knots_e = _phase_pieces(w, params)
    c = 2.0 * params.delta
    total = 0.0
    for t0, t1, e0, e1 in zip(knots_t[:-1], knots_t[1:], knots_e[:-1], knots_e[1:]):
        if t1 <= t0:
            continue
        slope = (e1 - e0) / (t1 - t0)
        val, _ = quad(lambda t: math.hypot(e0 + slope * (t - t0), c), t0, t1, epsabs=0.0, epsrel=rtol * 1e-1, limit=200)
        total += val
    return total / HBAR


def stuckelberg_phase_closed_form(w: Waveform, params: QubitParams) -> float:
    """Same integral as :func:`stuckelberg_phase`, via the hyperbolic antiderivative."""
    knots_t, knots_e = _phase_pieces(w, params)
    total = 0.0
    for t0, t1, e0, e1 in zip(knots_t[:-1], knots_t[1:], knots_e[:-1], knots_e[1:]):
        if t1 > t0:
            total += _gap_integral_segment(t0, t1, e0, e1, params.delta)
    return total / HBAR


def double_passage_paper(p_lz: float, phi: float) -> float:
    """Excited population 2 P (1 - 2P) (1 + cos phi) after two passages."""
    if not 0.0 <= p_lz <= 0.5:
        raise ValueError(f"p_lz must lie in [0, 1/2] for this formula, got {p_lz!r}")
    return 2.0 * p_lz * (1.0 - 2.0 * p_lz) * (1.0 + math.cos(phi))


def stokes_phase(delta_param: float) -> float:
    """pi/4 + arg Gamma(1 - i d) + d (ln d - 1); tends to pi/4 as d -> 0."""
    if delta_param < 0:
        raise ValueError("adiabaticity must be >= 0")
    if delta_param == 0:
        return math.pi / 4
    d = delta_param
    return math.pi / 4 + float(loggamma(1 - 1j * d).imag) + d * (math.log(d) - 1.0)


def double_passage_transfer_matrix(p_lz: float, phi: float, delta_param: float) -> float:
    """Adiabatic-impulse result 4 P (1 - P) sin^2(phi/2 + phi_S)."""
    if not 0.0 < p_lz < 1.0:
        raise ValueError(f"p_lz must lie in (0, 1), got {p_lz!r}")
    return 4.0 * p_lz * (1.0 - p_lz) * math.sin(0.5 * phi + stokes_phase(delta_param)) ** 2


def visibility(p_lz: float) -> float:
    if not 0.0 <= p_lz <= 0.5:
        raise ValueError(f"p_lz must lie in [0, 1/2], got {p_lz!r}")
    return 4.0 * p_lz * (1.0 - 2.0 * p_lz)


def invert_visibility(v: float, branch: str = NEAR_ADIABATIC) -> float:
    """Solve 4 p (1 - 2p) = v on the requested side of p = 1/4."""
    if not 0.0 <= v <= 0.5:
        raise ValueError(f"visibility must lie in [0, 1/2], got {v!r}")
    root = math.sqrt(1.0 - 2.0 * v)
    if branch == NEAR_ADIABATIC:
        # (1 - root)/4 written without cancellation
        return 0.5 * v / (1.0 + root)
    if branch == NEAR_SUDDEN:
        return 0.25 * (1.0 + root)
    raise ValueError(f"unknown branch {branch!r}")
