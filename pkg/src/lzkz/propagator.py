"""Exact numerical time evolution of the driven qubit.

``propagate_unitary`` solves the Schroedinger equation and
``propagate_lindblad`` the master equation with sigma_z dephasing. Both are
the reference against which every closed-form result in the package is
checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lzkz import _kernels
from lzkz.model import HBAR, PureState, QubitParams, adiabatic_basis
from lzkz.pulse import Waveform

DEFAULT_MAX_STEPS = 10**8
TOL_RANGE = (1e-12, 1e-4)
# magnus4: midpoint exponential plus its commutator correction (4th order)
# midpoint: plain midpoint exponential (2nd order)
SCHEMES = ("magnus4", "midpoint")


class PropagationError(RuntimeError):
    """Raised when the adaptive integrator gives up on a waveform."""


class DensityMatrix:
    """2x2 density matrix in the (|L>, |R>) basis."""

    def __init__(self, matrix, check: bool = True):
        m = np.array(matrix, dtype=complex).reshape(2, 2)
        m.setflags(write=False)
        self.matrix = m
        if check:
            if not np.allclose(m, m.conj().T, atol=1e-10, rtol=0):
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m).real - 1.0) > 1e-10:
                raise ValueError(f"density matrix trace {np.trace(m).real!r} != 1")
            if self.min_eigenvalue < -1e-10:
                raise ValueError("density matrix is not positive semidefinite")

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        v = psi.vector
        return cls(np.outer(v, v.conj()))

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def expectation(self, psi: PureState) -> float:
        v = psi.vector
        return float((v.conj() @ self.matrix @ v).real)

    def __repr__(self):
        return f"DensityMatrix({self.matrix.tolist()!r})"


@dataclass(frozen=True)
class PropagationResult:
    final_state: PureState | DensityMatrix
    p_excited: float
    steps_taken: int
    max_step_error_estimate: float


def prepare_ground(eps0: float, params: QubitParams) -> PureState:
    return adiabatic_basis(eps0, params)[0]


def _check_tol(tol):
    lo, hi = TOL_RANGE
    if not lo <= tol <= hi:
        raise ValueError(f"tol must lie in [{lo:g}, {hi:g}], got {tol!r}")


def _magnus(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    return scheme == "magnus4"


def _raise_status(status, steps, w):
    if status == 1:
        raise PropagationError(
            f"step cap reached after {steps} steps over {w.duration:g} ns; waveform too demanding for tol"
        )
    if status == 2:
        raise PropagationError(f"step size underflow after {steps} steps")


def propagate_unitary(
    w: Waveform,
    params: QubitParams,
    psi0: PureState,
    tol: float = 1e-8,
    max_steps: int = DEFAULT_MAX_STEPS,
    scheme: str = "magnus4",
) -> PropagationResult:
    """Evolve ``psi0`` through ``w`` and report the final excited population.

    The excited state is the upper adiabatic level at the final detuning.
    """
    _check_tol(tol)
    ts, es = w.knots
    psi, steps, max_err, status = _kernels.unitary_kernel(
        np.ascontiguousarray(ts, dtype=float),
        np.ascontiguousarray(es, dtype=float),
        float(params.delta),
        HBAR,
        psi0.vector,
        float(tol),
        int(max_steps),
        _magnus(scheme),
    )
    _raise_status(status, steps, w)
    final = PureState(complex(psi[0]), complex(psi[1])) if abs(np.vdot(psi, psi) - 1) <= 1e-10 else None
    if final is None:
        raise PropagationError(f"norm drifted to {np.vdot(psi, psi).real!r}")
    excited = adiabatic_basis(float(es[-1]), params)[1]
    p = min(1.0, max(0.0, abs(excited.overlap(final)) ** 2))
    return PropagationResult(final, p, int(steps), float(max_err))


def propagate_lindblad(
    w: Waveform,
    params: QubitParams,
    rho0: DensityMatrix | PureState,
    tol: float = 1e-8,
    max_steps: int = DEFAULT_MAX_STEPS,
    scheme: str = "magnus4",
) -> PropagationResult:
    """Master-equation evolution with pure dephasing at rate ``params.gamma_phi``."""
    _check_tol(tol)
    if isinstance(rho0, PureState):
        rho0 = DensityMatrix.from_pure(rho0)
    ts, es = w.knots
    rho, steps, max_err, status = _kernels.lindblad_kernel(
        np.ascontiguousarray(ts, dtype=float),
        np.ascontiguousarray(es, dtype=float),
        float(params.delta),
        HBAR,
        float(params.gamma_phi),
        np.ascontiguousarray(rho0.matrix),
        float(tol),
        int(max_steps),
        _magnus(scheme),
    )
    _raise_status(status, steps, w)
    final = DensityMatrix(rho, check=False)
    excited = adiabatic_basis(float(es[-1]), params)[1]
    p = min(1.0, max(0.0, final.expectation(excited)))
    return PropagationResult(final, p, int(steps), float(max_err))
