import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lzkz import HBAR, QubitParams, adiabatic_basis, build_hamiltonian, energy_gap

eps_st = st.floats(-1e4, 1e4, allow_nan=False)
delta_st = st.floats(1e-3, 1e3)


def test_qubit_params_validation():
    with pytest.raises(ValueError):
        QubitParams(0.0)
    with pytest.raises(ValueError):
        QubitParams(-1.0)
    with pytest.raises(ValueError):
        QubitParams(1.0, gamma_phi=-0.1)
    assert QubitParams(10.3).gamma_phi == 0.0


def test_hbar_units():
    assert HBAR == 0.6582119514


def test_hamiltonian_at_anticrossing(qubit):
    np.testing.assert_array_equal(build_hamiltonian(0.0, qubit).matrix, [[0, 10.3], [10.3, 0]])


def test_hamiltonian_structure():
    h = build_hamiltonian(5.0, QubitParams(2.0)).matrix
    assert np.trace(h) == 0
    assert h[0, 1] == h[1, 0] == 2.0
    assert h[0, 0] == 2.5


def test_hamiltonian_eigenvalues():
    ev = np.linalg.eigvalsh(build_hamiltonian(3.0, QubitParams(2.0)).matrix)
    np.testing.assert_allclose(ev, [-2.5, 2.5], rtol=1e-14)


def test_energy_gap_values(qubit):
    assert energy_gap(0.0, qubit) == pytest.approx(20.6)
    assert energy_gap(3.0, QubitParams(2.0)) == pytest.approx(5.0)
    assert energy_gap(1e8, qubit) == pytest.approx(1e8, rel=1e-12)
    np.testing.assert_allclose(energy_gap(np.array([0.0, 3.0]), QubitParams(2.0)), [4.0, 5.0])


def test_basis_at_anticrossing(qubit):
    g, e = adiabatic_basis(0.0, qubit)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(g.vector, [s, -s], atol=1e-15)
    np.testing.assert_allclose(e.vector, [s, s], atol=1e-15)


def test_basis_far_detuned(qubit):
    # |L> is the sigma_z = +1 state, so at large positive detuning it is excited
    g, e = adiabatic_basis(1e6, qubit)
    assert abs(g.c_r) == pytest.approx(1.0, abs=1e-9)
    assert abs(e.c_l) == pytest.approx(1.0, abs=1e-9)


@given(eps_st, delta_st)
def test_basis_is_eigenbasis(eps, delta):
    q = QubitParams(delta)
    h = build_hamiltonian(eps, q).matrix
    gap = energy_gap(eps, q)
    g, e = adiabatic_basis(eps, q)
    np.testing.assert_allclose(h @ g.vector, -0.5 * gap * g.vector, atol=1e-12 * gap)
    np.testing.assert_allclose(h @ e.vector, 0.5 * gap * e.vector, atol=1e-12 * gap)
    assert abs(g.overlap(e)) < 1e-12
    assert abs(abs(g.overlap(g)) - 1) < 1e-12


@given(eps_st, delta_st)
def test_phase_convention(eps, delta):
    q = QubitParams(delta)
    for v in adiabatic_basis(eps, q):
        first = v.c_l if v.c_l != 0 else v.c_r
        assert first.real > 0 and first.imag == 0
    assert adiabatic_basis(eps, q) == adiabatic_basis(eps, q)


@given(eps_st, delta_st)
def test_gap_symmetric_and_bounded(eps, delta):
    q = QubitParams(delta)
    assert energy_gap(eps, q) == energy_gap(-eps, q)
    assert energy_gap(eps, q) >= 2 * delta
