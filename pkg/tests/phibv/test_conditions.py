import numpy as np
import pytest

from phibv.conditions import (
    check_A0,
    check_A1,
    check_growth,
    check_VA1,
    jensen_defect,
    log_holder_modulus,
    modulus_at,
    mollify_modular_check,
    sample_points,
)
from phibv.data_model.fields import CoefficientField
from phibv.data_model.report import Verdict
from phibv.errors import DomainError, ShapeError
from phibv.families.autonomous import Autonomous, TabulatedConvex
from phibv.families.double_phase import DoublePhase
from phibv.families.linear import Linear
from phibv.families.power import NormalizedVarExp, PowerVarExp


def test_sample_points(symmetricDomain, square):
    points = sample_points(symmetricDomain, 16, np.array([0.003, 5.0]))
    assert 0.003 in points
    assert 5.0 not in points
    assert len(points) == 17
    assert sample_points(square, 300).shape == (256, 2)


def test_strong_log_holder_log_type(symmetricDomain):
    report = log_holder_modulus(CoefficientField.logType(1.0), symmetricDomain, strong=True)
    assert report.verdict == Verdict.NOT_VANISHING
    assert not report.holds
    assert report.constant == pytest.approx(1.0, rel=0.05)
    assert report.table[-1][0] == 2.0**-60
    assert report.witness["y"] == 0.0


def test_strong_log_holder_power_type(symmetricDomain):
    report = log_holder_modulus(CoefficientField.powerType(1.0), symmetricDomain, strong=True)
    assert report.verdict == Verdict.VANISHING
    assert report.constant < 1e-2
    values = np.array([w for _, w in report.table])
    assert np.all(np.diff(values) <= 1e-15)


def test_strong_log_holder_vacuous(symmetricDomain):
    report = log_holder_modulus(CoefficientField.const(2.0), symmetricDomain, strong=True)
    assert report.verdict == Verdict.VACUOUS
    assert report.holds
    assert modulus_at(report, 0.1) == 0.0


def test_log_holder_plain(symmetricDomain):
    report = log_holder_modulus(CoefficientField.logType(1.0), symmetricDomain)
    assert report.holds
    assert 0.0 < report.constant < np.inf
    constant = log_holder_modulus(CoefficientField.const(1.5), symmetricDomain)
    assert constant.constant == 0.0


def test_A0(unitDomain):
    assert check_A0(Linear(unitDomain), unitDomain).constant == 1.0
    report = check_A0(DoublePhase(CoefficientField.const(1.0), unitDomain), unitDomain)
    assert report.verdict == Verdict.HOLDS
    # β + β² = 1
    assert report.constant == pytest.approx((np.sqrt(5.0) - 1.0) / 2.0, rel=1e-6)


def test_growth(symmetricDomain):
    phi = PowerVarExp(CoefficientField.powerType(1.0), symmetricDomain)
    report = check_growth(phi, symmetricDomain, 1.0, 2.0)
    assert report.holds
    assert report.resolution["p"] == 1.0

    report = check_growth(Autonomous(1.0, 3.0), symmetricDomain, 1.0, 2.0)
    assert not report.holds
    assert report.witness["L_q"] > 100.0

    with pytest.raises(ValueError):
        check_growth(phi, symmetricDomain, 0.5, None)


def test_growth_declared_metadata(symmetricDomain):
    report = check_growth(Autonomous(2.0, 1.5), symmetricDomain)
    assert report.holds
    assert report.resolution["q"] == 1.5


def test_A1(symmetricDomain):
    assert check_A1(Linear(symmetricDomain), symmetricDomain).constant == 1.0
    logType = NormalizedVarExp(CoefficientField.logType(1.0), symmetricDomain)
    report = check_A1(logType, symmetricDomain, maxPoints=24)
    assert report.holds
    assert 0.0 < report.constant <= 1.0


def test_VA1_autonomous(unitDomain):
    report = check_VA1(Autonomous(1.0, 2.0, unitDomain), unitDomain, levels=12)
    assert report.verdict == Verdict.VANISHING
    assert report.constant == 0.0
    assert len(report.table) == 12


def test_VA1_log_type(symmetricDomain):
    phi = NormalizedVarExp(CoefficientField.logType(1.0), symmetricDomain)
    report = check_VA1(phi, symmetricDomain, maxPoints=16, levels=30)
    assert report.verdict == Verdict.NOT_VANISHING
    assert report.constant > 0.1
    radii = [r for r, _ in report.table]
    assert radii == sorted(radii, reverse=True)
    assert modulus_at(report, 1e-300) == report.table[-1][1]


def test_VA1_restricted(unitDomain):
    phi = DoublePhase(CoefficientField.interval(0.5, 1.0, 1.0, 0.0), unitDomain)
    report = check_VA1(phi, unitDomain, restricted=True, levels=8)
    assert report.condition == "VA1_restricted"
    assert report.resolution["restricted"]


def test_VA1_at_given_sites(symmetricDomain):
    phi = NormalizedVarExp(CoefficientField.logType(1.0), symmetricDomain)
    report = check_VA1(phi, symmetricDomain, restricted=True, levels=30, points=np.array([0.0]))
    assert report.verdict == Verdict.NOT_VANISHING
    assert report.resolution["points"] == 1
    assert report.witness["y"] == 0.0

    away = check_VA1(phi, symmetricDomain, restricted=True, levels=30, points=np.array([0.3]))
    assert away.verdict == Verdict.VACUOUS


def test_jensen_defect():
    phi = Autonomous(1.0, 2.0)
    points = np.array([0.1, 0.2])
    # E f² − (E f)²
    assert jensen_defect(phi, 0.15, 0.05, points, [1.0, 3.0], [0.5, 0.5]) == pytest.approx(1.0)
    assert jensen_defect(Linear(), 0.15, 0.05, points, [1.0, 3.0], [0.5, 0.5]) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        jensen_defect(phi, 0.15, 0.05, points, [1.0, 3.0], [0.5, 0.4])
    with pytest.raises(DomainError):
        jensen_defect(phi, 0.0, 0.05, points, [1.0, 3.0], [0.5, 0.5])


def test_mollify_modular_check(unitDomain, square):
    phi = Autonomous(1.0, 2.0, unitDomain)
    f = np.cos(3.0 * unitDomain.centers)
    lhs, rhs = mollify_modular_check(phi, unitDomain, f, 0.05)
    assert lhs <= rhs * (1.0 + 1e-3)
    assert lhs == pytest.approx(rhs, rel=0.2)
    with pytest.raises(ShapeError):
        mollify_modular_check(phi, square, np.zeros(square.shape), 0.05)
    with pytest.raises(ValueError):
        mollify_modular_check(phi, unitDomain, f, 0.0)


def test_A0_scaled_linear(unitDomain):
    report = check_A0(Autonomous(1000.0, 1.0, unitDomain), unitDomain)
    assert report.holds
    # 1000·β = 1
    assert report.constant == pytest.approx(1e-3, rel=1e-6)


def test_A0_degenerate_profile(unitDomain):
    report = check_A0(TabulatedConvex([2.0], [0.0], unitDomain), unitDomain)
    assert report.verdict == Verdict.FAILS
    assert report.constant is None
    assert report.witness["phi_inv_beta"] == 0.0
    assert report.resolution["dyadic_steps"] == 61

    # flat up to t = 2, so only β ≤ 1/3 reaches φ(1/β) = 1
    report = check_A0(TabulatedConvex([2.0, 3.0], [0.0, 1.0], unitDomain), unitDomain)
    assert report.holds
    assert report.constant == pytest.approx(1.0 / 3.0, rel=1e-6)


def test_growth_of_double_phase(unitDomain):
    phi = DoublePhase(CoefficientField.const(1.0), unitDomain)
    report = check_growth(phi, unitDomain, 1.0, 2.0)
    assert report.holds
    assert report.constant == pytest.approx(1.0)

    # (t + t²)/t^1.5 grows without bound
    report = check_growth(phi, unitDomain, 1.0, 1.5)
    assert not report.holds
    assert report.witness["L_q"] > report.witness["L_q_narrow"]


def test_growth_of_linear_above_one(unitDomain):
    report = check_growth(Linear(unitDomain), unitDomain, 1.01, None)
    assert report.verdict == Verdict.FAILS
    # t^-0.01 over twelve decades
    assert report.witness["L_p"] == pytest.approx(10.0**0.12, rel=1e-6)


def test_jensen_defect_with_strong_modulus(symmetricDomain):
    field = CoefficientField.powerType(1.0)
    phi = PowerVarExp(field, symmetricDomain)
    table = log_holder_modulus(field, symmetricDomain, strong=True)
    omega = modulus_at(table, 0.1)
    assert omega > 0.0
    points = np.linspace(-0.1, 0.1, 21)
    weights = np.full(21, 1.0 / 21)
    ones = np.ones(21)
    defect = jensen_defect(phi, 0.0, 0.1, points, ones, weights, omega)
    # φ(x, 1) = 1, so the defect is at least ω
    assert defect >= omega - 1e-12
    assert jensen_defect(phi, 0.0, 0.1, points, ones, weights) >= -1e-12


def test_mollify_zero(symmetricDomain):
    phi = PowerVarExp(CoefficientField.powerType(1.0), symmetricDomain)
    zero = np.zeros(symmetricDomain.shape)
    assert mollify_modular_check(phi, symmetricDomain, zero, 0.1, 0.25) == (0.0, 0.25)


@pytest.mark.parametrize("delta", [0.1, 0.01])
def test_mollify_step(delta, symmetricDomain):
    field = CoefficientField.powerType(1.0)
    phi = PowerVarExp(field, symmetricDomain)
    omega = modulus_at(log_holder_modulus(field, symmetricDomain, strong=True), delta)
    f = (symmetricDomain.centers > 0.0).astype(float)
    lhs, rhs = mollify_modular_check(phi, symmetricDomain, f, delta, omega)
    assert 0.0 < lhs <= rhs + 1e-9
    assert rhs == pytest.approx(1.0 + omega)
