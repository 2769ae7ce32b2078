"""Kibble-Zurek side of the Landau-Zener analogy."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.optimize import bisect

from lzkz.model import HBAR

IMPULSE = "impulse"
ADIABATIC = "adiabatic"

ALPHA_BOUNDS = (0.01, 100.0)


@dataclass(frozen=True)
class KZQuench:
    """Relaxation prefactor ``tau0`` (ns), quench time ``tau_q`` (ns), scale ``alpha``."""

    tau0: float
    tau_q: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (self.tau0 > 0 and self.tau_q > 0 and self.alpha > 0):
            raise ValueError("tau0, tau_q and alpha must all be positive")

    @property
    def quench_ratio(self) -> float:
        return self.tau_q / self.tau0


@dataclass(frozen=True)
class KZLZMap:
    """One point of the analogy: quench ratio and both defect densities."""

    x: float
    rho_numeric: float
    rho_theory: float

    def __post_init__(self):
        if not self.x > 0:
            raise ValueError("x must be positive")
        for v in (self.rho_numeric, self.rho_theory):
            if not 0.0 <= v <= 1.0:
                raise ValueError("densities must lie in [0, 1]")


def defect_density(x):
    """2 / (x^2 + x sqrt(x^2 + 4) + 2), normalized to 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("quench ratio must be >= 0")
    out = 2.0 / (x * x + x * np.sqrt(x * x + 4.0) + 2.0)
    return float(out) if out.ndim == 0 else out


def relaxation_time(q: KZQuench, t: float) -> float:
    """tau0 / eps_KZ with eps_KZ = |t| / tau_q; infinite at the critical point."""
    if t == 0:
        raise ZeroDivisionError("relaxation time diverges at the critical point t = 0")
    return q.tau0 * q.tau_q / abs(t)


def freeze_out_kz(q: KZQuench) -> float:
    return math.sqrt(q.tau0 * q.tau_q / q.alpha)


def freeze_out_lz(delta: float, nu: float, alpha: float = 1.0) -> float:
    """Root of hbar / E_gap(nu t) = alpha t by bisection on [0, hbar / (2 alpha delta)]."""
    if not (delta > 0 and nu > 0 and alpha > 0):
        raise ValueError("delta, nu and alpha must be positive")

    def f(t):
        return HBAR / math.hypot(nu * t, 2.0 * delta) - alpha * t

    hi = HBAR / (2.0 * alpha * delta)
    # slow sweeps put the root within rounding of hi, where f(hi) may come out >= 0
    if f(hi) >= 0.0:
        return hi
    return bisect(f, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=2000)


def freeze_out_lz_closed_form(delta: float, nu: float, alpha: float = 1.0) -> float:
    """Positive root of alpha^2 t^2 (nu^2 t^2 + 4 delta^2) = hbar^2."""
    a = alpha * alpha * nu * nu
    b = 4.0 * alpha * alpha * delta * delta
    c = HBAR * HBAR
    u = 2.0 * c / (b + math.sqrt(b * b + 4.0 * a * c))
    return math.sqrt(u)


def classify_regime(t: float, t_hat: float) -> str:
    if not t_hat > 0:
        raise ValueError("t_hat must be positive")
    return IMPULSE if abs(t) < t_hat else ADIABATIC


def map_lz_to_quench_ratio(delta: float, nu: float) -> float:
    """x = 4 delta^2 / (hbar nu); the LZ exponent equals (pi/2) x."""
    if not (delta > 0 and nu > 0):
        raise ValueError("delta and nu must be positive")
    return 4.0 * delta * delta / (HBAR * nu)


def nu_for_quench_ratio(delta: float, x: float) -> float:
    if not (delta > 0 and x > 0):
        raise ValueError("delta and x must be positive")
    return 4.0 * delta * delta / (HBAR * x)


def kz_prediction_for_lz(delta: float, nu: float, alpha: float = 1.0) -> float:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return defect_density(alpha * map_lz_to_quench_ratio(delta, nu))


def _log_residuals(alpha, x, log_rho):
    return log_rho - np.log(defect_density(alpha * x))


def fit_alpha(points, bounds=ALPHA_BOUNDS, tol: float = 1e-12) -> tuple[float, float]:
    """Least-squares fit of ``alpha`` in log space (bounded scalar minimisation).

    ``points`` is a sequence of ``(x, rho)``. The search runs over
    ``log(alpha)`` inside ``bounds``. Returns ``(alpha_hat, rms_log_residual)``.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 5:
        raise ValueError("fit_alpha needs at least 5 (x, rho) points")
    x, rho = pts[:, 0], pts[:, 1]
    if np.any(x <= 0) or np.any(rho <= 0) or np.any(rho > 1):
        raise ValueError("need x > 0 and rho in (0, 1]")
    if np.ptp(x) == 0:
        raise ValueError("degenerate input: all x are equal")
    log_rho = np.log(rho)

    def cost(u):
        r = _log_residuals(math.exp(u), x, log_rho)
        return float(r @ r)

    res = optimize.minimize_scalar(
        cost, bounds=(math.log(bounds[0]), math.log(bounds[1])), method="bounded", options={"xatol": tol}
    )
    u = float(res.x)
    alpha = math.exp(u)
    rms = math.sqrt(cost(u) / len(x))
    return alpha, rms
