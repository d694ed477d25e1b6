import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phibv.data_model.bv import BVFunction
from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.errors import ShapeError
from phibv.families.autonomous import Autonomous
from phibv.families.double_phase import DoublePhase
from phibv.families.linear import Linear
from phibv.families.power import NormalizedVarExp
from phibv.modular import (
    CLOSED_FORM_UNVERIFIED,
    ac_modular,
    fidelity,
    modular_exact,
    modular_fidelity,
    modular_luxemburg,
    total_variation,
)


def test_heaviside_weights(heaviside, logType, powerType):
    for phi in [logType, powerType, Linear(heaviside.domain)]:
        report = modular_exact(phi, heaviside)
        assert report.ac_part == 0.0
        assert report.singular_part == 1.0
        assert report.total == 1.0
        assert report.atoms[0].weight == 1.0


def test_closed_form_warning_at_log_type_atom(heaviside, logType, powerType):
    # p(x) − 1 ~ 1/log(1/|x|) leaves (VA1) non-vanishing at the jump
    report = modular_exact(logType, heaviside)
    assert report.total == 1.0
    assert report.warnings == [CLOSED_FORM_UNVERIFIED]
    assert report.toDict()["warnings"] == [CLOSED_FORM_UNVERIFIED]

    assert modular_exact(powerType, heaviside).warnings == []
    assert modular_exact(Linear(heaviside.domain), heaviside).warnings == []
    smooth = BVFunction.fromCallable(heaviside.domain, lambda x: x, lambda x: np.ones_like(x))
    assert modular_exact(logType, smooth).warnings == []


def test_atom_where_recession_is_infinite(symmetricDomain):
    phi = DoublePhase(CoefficientField.interval(0.5, 1.0, 1e-5, 0.0), symmetricDomain)
    assert modular_exact(phi, BVFunction.heaviside(symmetricDomain, -0.5)).total == 1.0
    report = modular_exact(phi, BVFunction.heaviside(symmetricDomain, 0.75))
    assert report.total.isInfinite
    assert report.atoms[0].weight.isInfinite


def test_zero_jump_has_no_weight(symmetricDomain):
    # 0·∞ = 0
    phi = Autonomous(1.0, 2.0, symmetricDomain)
    u = BVFunction.heaviside(symmetricDomain, 0.5, 0.0)
    assert modular_exact(phi, u).total == 0.0


def test_smooth_modular(unitDomain):
    u = BVFunction.fromCallable(unitDomain, lambda x: x, lambda x: np.ones_like(x))
    assert modular_exact(Autonomous(1.0, 2.0, unitDomain), u).total == pytest.approx(1.0)
    assert ac_modular(Autonomous(3.0, 2.0), u) == pytest.approx(3.0)
    assert total_variation(u) == pytest.approx(1.0)
    assert modular_luxemburg(Autonomous(1.0, 2.0), u) == pytest.approx(1.0, rel=1e-9)


def test_linear_luxemburg_is_total_variation(unitDomain, randomBV):
    rng = np.random.default_rng(0)
    for _ in range(5):
        u = randomBV(unitDomain, rng)
        assert modular_luxemburg(Linear(unitDomain), u) == pytest.approx(
            total_variation(u), rel=1e-9
        )


def test_luxemburg_edge_cases(unitDomain):
    zero = BVFunction.fromSamples(unitDomain, np.zeros(unitDomain.shape))
    assert modular_luxemburg(Linear(), zero) == 0.0
    phi = DoublePhase(CoefficientField.const(1.0))
    assert modular_luxemburg(phi, BVFunction.heaviside(unitDomain, 0.5)) == np.inf


def test_fidelity(unitDomain):
    u = BVFunction.heaviside(unitDomain, 0.5)
    f = np.zeros(unitDomain.shape)
    assert fidelity(u, f) == pytest.approx(0.5)
    report = modular_fidelity(Linear(unitDomain), u, f)
    assert report.fidelity == pytest.approx(0.5)
    assert report.total == pytest.approx(1.5)
    with pytest.raises(ShapeError):
        fidelity(u, np.zeros(3))


def test_modular_2d(square):
    samples = np.zeros(square.shape)
    samples[:, 8:] = 1.0
    u = BVFunction.fromSamples(square, samples, [(1, i, 7, 1.0) for i in range(16)])
    phi = NormalizedVarExp(CoefficientField.powerType(1.0, [0.5, 0.5], dimension=2), square)
    report = modular_exact(phi, u)
    assert report.ac_part == 0.0
    assert len(report.atoms) == 16
    # no edge midpoint hits the centre where p = 1
    assert report.total.isInfinite


@given(st.floats(0.01, 100.0), st.floats(0.0, 1.0))
def test_semimodular_axioms(lam, theta):
    domain = Domain.interval(-1.0, 1.0, 40)
    phi = NormalizedVarExp(CoefficientField.powerType(1.0), domain)
    u = BVFunction.fromCallable(
        domain, lambda x: np.sin(3 * x), lambda x: 3 * np.cos(3 * x), [(0.0, 0.7)]
    )
    v = BVFunction.fromCallable(domain, lambda x: x * x, lambda x: 2 * x, [(0.0, -0.3)])

    def rho(w):
        return float(modular_exact(phi, w).total)

    # even, convex, and λ ↦ ρ(λu) increasing
    assert rho(u.scaled(-1.0)) == pytest.approx(rho(u))
    mixed = u.linearCombination(v, theta, 1.0 - theta)
    assert rho(mixed) <= theta * rho(u) + (1 - theta) * rho(v) + 1e-9
    small, large = sorted([lam, 1.0])
    assert rho(u.scaled(small)) <= rho(u.scaled(large)) + 1e-12


def test_atom_weights_by_removal(familySuite, randomBV):
    domain = Domain.interval(0.0, 1.0, 128)
    rng = np.random.default_rng(21)
    for phi in familySuite(domain):
        u = randomBV(domain, rng, 3)
        report = modular_exact(phi, u)
        for index, (atom, line) in enumerate(zip(u.atoms, report.atoms)):
            reduced = modular_exact(phi, u.withoutAtom(index))
            if line.weight.isInfinite or reduced.total.isInfinite:
                continue
            assert len(reduced.atoms) == len(report.atoms) - 1
            assert reduced.ac_part == report.ac_part
            assert float(report.total) - float(reduced.total) == pytest.approx(
                float(line.weight) * abs(atom.jump), rel=1e-12, abs=1e-12
            )
