"""Embedded self-test: a handful of oracle checks run by ``lzkz validate``."""

from __future__ import annotations

import math

import numpy as np

from lzkz import analytic, kz
from lzkz.model import HBAR, QubitParams
from lzkz.propagator import DensityMatrix, prepare_ground, propagate_lindblad, propagate_unitary
from lzkz.pulse import asymptotic_sweep, make_double_passage

DELTA = 10.3


def check_lz_formula(tol):
    q = QubitParams(DELTA)
    worst = 0.0
    for r in (0.5, 2.0, 10.0, 50.0):
        nu = r * DELTA**2 / HBAR
        w = asymptotic_sweep(DELTA, nu)
        p = propagate_unitary(w, q, prepare_ground(float(w(0.0)), q), tol).p_excited
        worst = max(worst, abs(p - analytic.lz_probability(DELTA, nu)))
    return worst <= 1e-4, f"max |p - P_LZ| = {worst:.2e}"


def check_unitarity(tol):
    q = QubitParams(DELTA)
    w = make_double_passage(300.0, -300.0, 0.5, 0.7)
    res = propagate_unitary(w, q, prepare_ground(300.0, q), tol)
    drift = abs(abs(res.final_state.c_l) ** 2 + abs(res.final_state.c_r) ** 2 - 1)
    return drift <= 1e-12, f"norm drift = {drift:.1e}"


def check_lindblad(tol):
    q = QubitParams(DELTA, gamma_phi=0.5)
    w = make_double_passage(300.0, -300.0, 0.5, 0.7)
    rho = propagate_lindblad(w, q, DensityMatrix.from_pure(prepare_ground(300.0, q)), tol).final_state
    tr = abs(rho.trace - 1)
    ev = rho.min_eigenvalue
    return tr <= 1e-10 and ev >= -1e-10, f"trace error = {tr:.1e}, min eigenvalue = {ev:.1e}"


def check_visibility(tol):
    worst = 0.0
    for p in np.linspace(0.0, 0.5, 101)[:-1]:
        branch = analytic.NEAR_ADIABATIC if p <= 0.25 else analytic.NEAR_SUDDEN
        worst = max(worst, abs(analytic.invert_visibility(analytic.visibility(p), branch) - p))
    return worst <= 1e-12, f"max round-trip error = {worst:.1e}"


def check_double_passage_envelope(tol):
    worst = 0.0
    for p in np.linspace(0.0, 0.5, 51):
        worst = max(worst, abs(analytic.double_passage_paper(p, 0.0) - analytic.visibility(p)))
        worst = max(worst, abs(analytic.double_passage_paper(p, math.pi)))
    return worst <= 1e-12, f"max envelope error = {worst:.1e}"


def check_defect_identity(tol):
    x = np.geomspace(1e-4, 1e4, 200)
    err = np.abs(kz.defect_density(x) * (x * x + x * np.sqrt(x * x + 4) + 2) - 2).max()
    return err <= 1e-12, f"max |rho * P(x) - 2| = {err:.1e}"


def check_freeze_out(tol):
    worst = 0.0
    for nu in (10.0, 1461.3, 1e5):
        t = kz.freeze_out_lz(DELTA, nu)
        worst = max(worst, abs(t / kz.freeze_out_lz_closed_form(DELTA, nu) - 1))
    return worst <= 1e-10, f"max relative deviation = {worst:.1e}"


CHECKS = {
    "lz_formula_match": check_lz_formula,
    "unitarity": check_unitarity,
    "lindblad_trace_positivity": check_lindblad,
    "visibility_round_trip": check_visibility,
    "double_passage_envelope": check_double_passage_envelope,
    "defect_density_identity": check_defect_identity,
    "freeze_out_roots": check_freeze_out,
}


def run_checks(tol: float = 1e-8) -> list[tuple[str, bool, str]]:
    out = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn(tol)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
