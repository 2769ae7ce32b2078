"""Charge-qubit Hamiltonian, spectrum and adiabatic basis.

Conventions used throughout the package:

* basis order is (|L>, |R>) with |L> the sigma_z = +1 state;
* energies in ueV, times in ns, sweep rates in ueV/ns;
* ``HBAR`` converts between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBAR = 0.6582119514  # ueV * ns


@dataclass(frozen=True)
class QubitParams:
    """Tunnel coupling ``delta`` (ueV) and pure dephasing rate ``gamma_phi`` (1/ns)."""

    delta: float
    gamma_phi: float = 0.0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"tunnel coupling must be positive, got delta={self.delta!r}")
        if not (self.gamma_phi >= 0 and math.isfinite(self.gamma_phi)):
            raise ValueError(f"dephasing rate must be >= 0, got gamma_phi={self.gamma_phi!r}")


@dataclass(frozen=True)
class Hamiltonian2:
    """Traceless real 2x2 Hamiltonian ``half_detuning * sz + coupling * sx``."""

    half_detuning: float
    coupling: float

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.half_detuning, self.coupling
        return np.array([[a, b], [b, -a]], dtype=float)

    def eigvals(self) -> tuple[float, float]:
        r = math.hypot(self.half_detuning, self.coupling)
        return -r, r

    def apply(self, state: "PureState") -> np.ndarray:
        return self.matrix @ state.vector


@dataclass(frozen=True)
class PureState:
    """Amplitudes ``(c_L, c_R)``."""

    c_l: complex
    c_r: complex

    def __post_init__(self):
        norm = abs(self.c_l) ** 2 + abs(self.c_r) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")

    @classmethod
    def from_vector(cls, v) -> "PureState":
        return cls(complex(v[0]), complex(v[1]))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_l, self.c_r], dtype=complex)

    def overlap(self, other: "PureState") -> complex:
        """<self|other>."""
        return self.c_l.conjugate() * other.c_l + self.c_r.conjugate() * other.c_r

    def conj(self) -> "PureState":
        return PureState(self.c_l.conjugate(), self.c_r.conjugate())


def build_hamiltonian(eps: float, params: QubitParams) -> Hamiltonian2:
    return Hamiltonian2(0.5 * eps, params.delta)


def energy_gap(eps, params: QubitParams):
    """Level splitting sqrt(eps^2 + 4 delta^2); accepts scalars or arrays."""
    return np.hypot(eps, 2.0 * params.delta) if isinstance(eps, np.ndarray) else math.hypot(eps, 2.0 * params.delta)


def _eigvec(a: float, b: float, sign: int) -> tuple[float, float]:
    # Eigenvector of [[a, b], [b, -a]] for eigenvalue sign*r, b != 0.
    # Uses the numerically stable column depending on the sign of a.
    r = math.hypot(a, b)
    lam = sign * r
    if (lam - a) * (lam + a) == 0.0 and b == 0.0:
        raise ValueError("degenerate Hamiltonian")
    # (a - lam) x + b y = 0  ->  (x, y) ~ (b, lam - a)
    # b x + (-a - lam) y = 0 ->  (x, y) ~ (a + lam, b)
    if abs(lam - a) < abs(a + lam):
        x, y = a + lam, b
    else:
        x, y = b, lam - a
    n = math.hypot(x, y)
    x, y = x / n, y / n
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return x, y


def adiabatic_basis(eps: float, params: QubitParams) -> tuple[PureState, PureState]:
    """Return ``(ground, excited)`` eigenvectors at detuning ``eps``.

    The first nonzero amplitude of each vector is made real and positive.
    """
    a, b = 0.5 * eps, params.delta
    g = _eigvec(a, b, -1)
    e = _eigvec(a, b, +1)
    return PureState(complex(g[0]), complex(g[1])), PureState(complex(e[0]), complex(e[1]))
