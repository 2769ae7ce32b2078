import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lzkz import (
    HBAR,
    KZQuench,
    classify_regime,
    defect_density,
    fit_alpha,
    freeze_out_kz,
    freeze_out_lz,
    kz_prediction_for_lz,
    lz_probability,
    map_lz_to_quench_ratio,
    relaxation_time,
)
from lzkz.kz import ADIABATIC, IMPULSE, KZLZMap, freeze_out_lz_closed_form

DELTA = 10.3


def test_quench_validation():
    for args in [(0, 1, 1), (1, 0, 1), (1, 1, 0), (-1, 1, 1)]:
        with pytest.raises(ValueError):
            KZQuench(*args)


def test_defect_density_values():
    assert defect_density(0.0) == 1.0
    assert defect_density(2.0) == pytest.approx(2 / (6 + 4 * math.sqrt(2)), rel=1e-15)
    assert defect_density(2.0) == pytest.approx(0.17157, abs=1e-5)
    assert defect_density(1e4) * 1e8 == pytest.approx(1.0, rel=1e-3)
    with pytest.raises(ValueError):
        defect_density(-0.1)


@given(st.floats(0, 1e6))
def test_defect_density_identity(x):
    rho = defect_density(x)
    assert 0 < rho <= 1
    assert rho * (x * x + x * math.sqrt(x * x + 4) + 2) == pytest.approx(2.0, rel=1e-13)


def test_relaxation_time():
    assert relaxation_time(KZQuench(1, 4), 2) == 2.0
    assert relaxation_time(KZQuench(1, 4), -2) == 2.0
    assert relaxation_time(KZQuench(3, 4), 2) == 3 * relaxation_time(KZQuench(1, 4), 2)
    with pytest.raises(ZeroDivisionError):
        relaxation_time(KZQuench(1, 4), 0)


def test_freeze_out_kz_values():
    assert freeze_out_kz(KZQuench(1, 4, 1)) == 2.0
    assert freeze_out_kz(KZQuench(1, 1, 4)) == 0.5
    assert freeze_out_kz(KZQuench(1, 16, 1)) == 2 * freeze_out_kz(KZQuench(1, 4, 1))


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-2, 1e2))
def test_freeze_out_kz_balances(tau0, tau_q, alpha):
    q = KZQuench(tau0, tau_q, alpha)
    t = freeze_out_kz(q)
    assert relaxation_time(q, t) == pytest.approx(alpha * t, rel=1e-10)


def test_freeze_out_lz_limits():
    assert freeze_out_lz(DELTA, 1e-9, 1.0) == pytest.approx(HBAR / (2 * DELTA), rel=1e-9)
    t = freeze_out_lz(DELTA, 1461.3, 1.0)
    assert t == pytest.approx(freeze_out_lz_closed_form(DELTA, 1461.3, 1.0), rel=1e-12)
    assert freeze_out_lz(DELTA, 1461.3, 2.0) < t
    assert freeze_out_lz(2 * DELTA, 1461.3, 1.0) < t


@settings(max_examples=200)
@given(st.floats(0.1, 100), st.floats(1e-2, 1e6), st.floats(1e-2, 1e2))
def test_freeze_out_lz_residual(delta, nu, alpha):
    t = freeze_out_lz(delta, nu, alpha)
    lhs = HBAR / math.hypot(nu * t, 2 * delta)
    assert abs(lhs - alpha * t) <= 1e-10 * alpha * t
    assert t == pytest.approx(freeze_out_lz_closed_form(delta, nu, alpha), rel=1e-10)


def test_classify_regime():
    assert classify_regime(0.0, 1.0) == IMPULSE
    assert classify_regime(-2.0, 1.0) == ADIABATIC
    assert classify_regime(1.0, 1.0) == ADIABATIC
    assert classify_regime(-0.999, 1.0) == IMPULSE
    with pytest.raises(ValueError):
        classify_regime(0.0, 0.0)


def test_quench_ratio_mapping():
    x = map_lz_to_quench_ratio(DELTA, 1461.3)
    assert x == pytest.approx(4 * DELTA**2 / (HBAR * 1461.3))
    assert x == pytest.approx(0.4413, abs=2e-4)
    assert map_lz_to_quench_ratio(DELTA, 730.65) == pytest.approx(2 * x)
    assert lz_probability(DELTA, 1461.3) == pytest.approx(math.exp(-math.pi / 2 * x), rel=1e-14)


def test_kz_prediction():
    assert kz_prediction_for_lz(DELTA, 1e15) == pytest.approx(1.0, abs=1e-9)
    # 2 / (x^2 + x sqrt(x^2+4) + 2) at x = 0.44119...
    assert kz_prediction_for_lz(DELTA, 1461.3) == pytest.approx(0.64552, abs=1e-5)
    nus = np.geomspace(10, 1e5, 50)
    vals = [kz_prediction_for_lz(DELTA, nu) for nu in nus]
    assert np.all(np.diff(vals) > 0)


def test_kzlz_map_record():
    KZLZMap(0.3, 0.6, 0.7)
    with pytest.raises(ValueError):
        KZLZMap(0.0, 0.6, 0.7)
    with pytest.raises(ValueError):
        KZLZMap(0.3, 1.2, 0.7)


@pytest.mark.parametrize("alpha0", [0.05, 0.7, 1.0, 3.3, 40.0])
def test_fit_alpha_recovers_exact(alpha0):
    x = np.geomspace(0.05, 1.5, 12)
    alpha, resid = fit_alpha(zip(x, defect_density(alpha0 * x)))
    assert alpha == pytest.approx(alpha0, rel=1e-6)
    assert resid < 1e-7


def test_fit_alpha_rescaling():
    x = np.geomspace(0.05, 1.5, 12)
    rho = np.exp(-math.pi / 2 * x)
    a1, r1 = fit_alpha(zip(x, rho))
    a2, r2 = fit_alpha(zip(3 * x, rho))
    assert a2 == pytest.approx(a1 / 3, rel=1e-6)
    assert r2 == pytest.approx(r1, rel=1e-6)


def test_fit_alpha_rejects_bad_input():
    with pytest.raises(ValueError):
        fit_alpha([(1, 0.5)] * 4)
    with pytest.raises(ValueError):
        fit_alpha([(1, 0.5)] * 6)
    with pytest.raises(ValueError):
        fit_alpha([(1, 0.5), (2, 0.0), (3, 0.2), (4, 0.1), (5, 0.1)])
