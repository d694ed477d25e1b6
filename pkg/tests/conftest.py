# noqa
import configparser

import numpy as np
import pytest
from hypothesis import settings

from phibv.configuration import _default_config
from phibv.data_model.bv import BVFunction
from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.families.autonomous import Autonomous
from phibv.families.clr import CLR
from phibv.families.double_phase import DoublePhase
from phibv.families.linear import Linear
from phibv.families.power import NormalizedVarExp, PowerVarExp

settings.register_profile("no_db", database=None, deadline=None)
settings.load_profile("no_db")


@pytest.fixture()
def defaultConfig():
    defaultConfig = configparser.ConfigParser(allow_no_value=True)
    defaultConfig.read_dict(_default_config)
    return defaultConfig


@pytest.fixture()
def symmetricDomain():
    return Domain.interval(-1.0, 1.0, 200)


@pytest.fixture()
def unitDomain():
    return Domain.interval(0.0, 1.0, 64)


@pytest.fixture()
def square():
    return Domain.rectangle((0.0, 1.0), (0.0, 1.0), 16, 16)


@pytest.fixture()
def logType(symmetricDomain):
    return NormalizedVarExp(CoefficientField.logType(1.0), symmetricDomain)


@pytest.fixture()
def powerType(symmetricDomain):
    return NormalizedVarExp(CoefficientField.powerType(1.0), symmetricDomain)


@pytest.fixture()
def heaviside(symmetricDomain):
    return BVFunction.heaviside(symmetricDomain, 0.0)


def closed_form_families(domain: Domain):
    """One member per family with finite recession somewhere in the domain."""
    lo, hi = domain.extent[0]
    mid = 0.5 * (lo + hi)
    return [
        Linear(domain),
        PowerVarExp(CoefficientField.powerType(1.0, mid), domain),
        NormalizedVarExp(CoefficientField.powerType(2.0, mid), domain),
        CLR(CoefficientField.powerType(1.0, mid, 2.0), domain),
        DoublePhase(CoefficientField.interval(mid, hi, 1.0, 0.0), domain),
        Autonomous(1.0, 2.0, domain),
        Autonomous(2.0, 1.0, domain),
    ]


def random_bv(domain: Domain, rng: np.random.Generator, maxAtoms: int = 3) -> BVFunction:
    """Sine mixture under a sin² envelope plus up to ``maxAtoms`` jumps on interior nodes.

    The envelope makes the smooth part flat at the boundary.
    """
    x = domain.centers
    lo, hi = domain.extent[0]
    length = hi - lo
    coef = rng.normal(size=3)
    freq = rng.uniform(0.5, 3.0, size=3)
    z = (x - lo) / length
    mixture = sum(c * np.sin(k * np.pi * z) for c, k in zip(coef, freq))
    dmixture = sum(c * k * np.pi / length * np.cos(k * np.pi * z) for c, k in zip(coef, freq))
    envelope = np.sin(np.pi * z) ** 2
    denvelope = np.pi / length * np.sin(2.0 * np.pi * z)

    nodes = domain.nodes[1:-1]
    count = int(rng.integers(0, maxAtoms + 1))
    positions = rng.choice(nodes, size=count, replace=False)
    jumps = rng.uniform(0.2, 1.5, size=count) * rng.choice([-1.0, 1.0], size=count)
    values = envelope * mixture + sum(s * (x > p) for p, s in zip(positions, jumps))
    return BVFunction(
        domain,
        values + np.zeros_like(x),
        denvelope * mixture + envelope * dmixture,
        BVFunction.makeAtoms(domain, zip(positions, jumps)),
    )


@pytest.fixture()
def randomBV():
    return random_bv


@pytest.fixture()
def familySuite():
    return closed_form_families
