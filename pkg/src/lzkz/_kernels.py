"""Compiled time-stepping loops for the two-level propagators.

Both kernels walk a piecewise-linear detuning trace segment by segment and
never step across a knot, so H(t) is linear inside every step. A step is a
single exact SU(2) exponential of the Hamiltonian at the step midpoint,
optionally with the commutator correction that makes it the fourth-order
Magnus step for linear H (a sigma_y term of size h^3 nu delta / 12 hbar^2).

Step size is adapted by step doubling with local error budget
``tol * h / T`` (error per unit time), so the error summed over the whole
span stays of order ``tol``.

Return codes: 0 ok, 1 step cap exceeded, 2 step size underflow.
"""

import math

import numpy as np
from numba import njit

_SAFETY = 0.9
_MAX_GROW = 4.0
_MIN_SHRINK = 0.2
# error estimates below this are rounding noise in the unitary products
_ROUNDOFF_FLOOR = 4e-15


@njit(cache=True, nogil=True)
def _step_matrix(eps_mid, slope, delta, h, hbar, magnus):
    # U = exp(-i (vx sx + vy sy + vz sz))
    vz = 0.5 * eps_mid * h / hbar
    vx = delta * h / hbar
    vy = 0.0
    if magnus:
        vy = h * h * h * 0.5 * slope * delta / (6.0 * hbar * hbar)
    r = math.sqrt(vx * vx + vy * vy + vz * vz)
    c = math.cos(r)
    s = math.sin(r) / r if r > 0.0 else 1.0
    u00 = complex(c, -s * vz)
    u11 = complex(c, s * vz)
    u01 = complex(-s * vy, -s * vx)
    u10 = complex(s * vy, -s * vx)
    return u00, u01, u10, u11


@njit(cache=True, nogil=True)
def _psi_step(eps_mid, slope, delta, h, hbar, magnus, x0, x1):
    u00, u01, u10, u11 = _step_matrix(eps_mid, slope, delta, h, hbar, magnus)
    return u00 * x0 + u01 * x1, u10 * x0 + u11 * x1


@njit(cache=True, nogil=True)
def _initial_step(ts, es, delta, hbar):
    emax = 0.0
    for k in range(ts.shape[0]):
        emax = max(emax, abs(es[k]))
    return 0.1 * hbar / math.sqrt(0.25 * emax * emax + delta * delta)


@njit(cache=True, nogil=True)
def unitary_kernel(ts, es, delta, hbar, psi0, tol, max_steps, magnus):
    x0 = psi0[0]
    x1 = psi0[1]
    span = ts[-1] - ts[0]
    expo = 1.0 / 4.0 if magnus else 1.0 / 2.0
    steps = 0
    max_err = 0.0
    status = 0
    h = _initial_step(ts, es, delta, hbar)
    for k in range(ts.shape[0] - 1):
        seg = ts[k + 1] - ts[k]
        slope = (es[k + 1] - es[k]) / seg
        e_start = es[k]
        t_rel = 0.0
        while t_rel < seg:
            if steps >= max_steps:
                status = 1
                break
            last = False
            h_full = h
            if h >= (seg - t_rel) * (1.0 - 1e-12):
                h = seg - t_rel
                last = True
            hh = 0.5 * h
            f0, f1 = _psi_step(e_start + slope * (t_rel + hh), slope, delta, h, hbar, magnus, x0, x1)
            g0, g1 = _psi_step(e_start + slope * (t_rel + 0.5 * hh), slope, delta, hh, hbar, magnus, x0, x1)
            g0, g1 = _psi_step(e_start + slope * (t_rel + 1.5 * hh), slope, delta, hh, hbar, magnus, g0, g1)
            steps += 1
            err = math.sqrt(abs(f0 - g0) ** 2 + abs(f1 - g1) ** 2)
            budget = max(tol * h / span, _ROUNDOFF_FLOOR)
            if err <= budget:
                x0 = g0
                x1 = g1
                if err > max_err:
                    max_err = err
                t_rel = seg if last else t_rel + h
                fac = _MAX_GROW if err == 0.0 else min(_MAX_GROW, _SAFETY * (budget / err) ** expo)
                h_next = h * max(1.0, fac)
                # a step truncated at a knot does not shrink the next one
                h = max(h_next, h_full) if last else h_next
            else:
                h = h * max(_MIN_SHRINK, _SAFETY * (budget / err) ** expo)
                if h < 1e-15 * span:
                    status = 2
                    break
        if status != 0:
            break
    out = np.empty(2, dtype=np.complex128)
    out[0] = x0
    out[1] = x1
    return out, steps, max_err, status


@njit(cache=True, nogil=True)
def _rho_step(eps_mid, slope, delta, h, hbar, magnus, gamma, tr, z, c01):
    # Strang splitting: half dephasing, unitary, half dephasing, dephasing
    # over time t scaling coherences by exp(-2 gamma t). The state is
    # (z = rho00 - rho11, c01 = rho01) at fixed trace ``tr``, so the trace
    # is carried exactly instead of accumulating rounding over many steps.
    d = math.exp(-gamma * h)
    c01 = c01 * d
    r00 = 0.5 * (tr + z)
    r11 = 0.5 * (tr - z)
    r10 = c01.conjugate()
    u00, u01, u10, u11 = _step_matrix(eps_mid, slope, delta, h, hbar, magnus)
    m00 = u00 * r00 + u01 * r10
    m01 = u00 * c01 + u01 * r11
    m10 = u10 * r00 + u11 * r10
    m11 = u10 * c01 + u11 * r11
    # times U^dagger
    n00 = m00 * u00.conjugate() + m01 * u01.conjugate()
    n01 = m00 * u10.conjugate() + m01 * u11.conjugate()
    n11 = m10 * u10.conjugate() + m11 * u11.conjugate()
    return n00.real - n11.real, n01 * d


@njit(cache=True, nogil=True)
def lindblad_kernel(ts, es, delta, hbar, gamma, rho0, tol, max_steps, magnus):
    tr = rho0[0, 0].real + rho0[1, 1].real
    z = rho0[0, 0].real - rho0[1, 1].real
    c01 = rho0[0, 1]
    span = ts[-1] - ts[0]
    # Strang splitting is second order whatever the unitary factor is
    expo = 1.0 / 4.0 if (magnus and gamma == 0.0) else 1.0 / 2.0
    steps = 0
    max_err = 0.0
    status = 0
    h = _initial_step(ts, es, delta, hbar)
    if gamma > 0:
        h = min(h, 0.1 / gamma)
    for k in range(ts.shape[0] - 1):
        seg = ts[k + 1] - ts[k]
        slope = (es[k + 1] - es[k]) / seg
        e_start = es[k]
        t_rel = 0.0
        while t_rel < seg:
            if steps >= max_steps:
                status = 1
                break
            last = False
            h_full = h
            if h >= (seg - t_rel) * (1.0 - 1e-12):
                h = seg - t_rel
                last = True
            hh = 0.5 * h
            fz, fc = _rho_step(e_start + slope * (t_rel + hh), slope, delta, h, hbar, magnus, gamma, tr, z, c01)
            gz, gc = _rho_step(e_start + slope * (t_rel + 0.5 * hh), slope, delta, hh, hbar, magnus, gamma, tr, z, c01)
            gz, gc = _rho_step(e_start + slope * (t_rel + 1.5 * hh), slope, delta, hh, hbar, magnus, gamma, tr, gz, gc)
            steps += 1
            # Frobenius distance of the two density matrices
            err = math.sqrt(0.5 * (fz - gz) ** 2 + 2.0 * abs(fc - gc) ** 2)
            budget = max(tol * h / span, _ROUNDOFF_FLOOR)
            if err <= budget:
                z = gz
                c01 = gc
                if err > max_err:
                    max_err = err
                t_rel = seg if last else t_rel + h
                fac = _MAX_GROW if err == 0.0 else min(_MAX_GROW, _SAFETY * (budget / err) ** expo)
                h_next = h * max(1.0, fac)
                h = max(h_next, h_full) if last else h_next
            else:
                h = h * max(_MIN_SHRINK, _SAFETY * (budget / err) ** expo)
                if h < 1e-15 * span:
                    status = 2
                    break
        if status != 0:
            break
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = 0.5 * (tr + z)
    out[0, 1] = c01
    out[1, 0] = c01.conjugate()
    out[1, 1] = 0.5 * (tr - z)
    return out, steps, max_err, status
