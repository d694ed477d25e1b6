import numpy as np
import pytest

from phibv.data_model.domain import Domain
from phibv.errors import DomainError


def test_interval():
    domain = Domain.interval(-1.0, 1.0, 4)
    assert domain.dimension == 1
    assert domain.n == 4
    assert domain.h == 0.5
    assert domain.cellMeasure == 0.5
    assert domain.volume == 2.0
    assert np.allclose(domain.centers, [-0.75, -0.25, 0.25, 0.75])
    assert np.allclose(domain.nodes, [-1.0, -0.5, 0.0, 0.5, 1.0])


def test_rectangle():
    domain = Domain.rectangle((0.0, 1.0), (0.0, 2.0), 4, 8)
    assert domain.dimension == 2
    assert domain.shape == (4, 8)
    assert domain.n == 32
    assert domain.spacing == (0.25, 0.25)
    assert domain.centers.shape == (4, 8, 2)
    assert np.allclose(domain.centers[0, 0], [0.125, 0.125])
    assert domain.contains(np.array([0.5, 1.5]))
    assert not domain.contains(np.array([1.5, 0.5]))


@pytest.mark.parametrize(
    "extent, shape",
    [
        (((1.0, 0.0),), (4,)),
        (((0.0, 1.0),), (1,)),
        (((0.0, np.inf),), (4,)),
        (((0.0, 1.0), (0.0, 1.0), (0.0, 1.0)), (2, 2, 2)),
    ],
)
def test_invalid_domain(extent, shape):
    with pytest.raises(DomainError):
        Domain(extent, shape)


def test_from_centers():
    domain = Domain.fromCenters(np.array([0.0, 0.5, 1.0]))
    assert domain.extent == ((-0.25, 1.25),)
    assert domain.n == 3
    with pytest.raises(DomainError):
        Domain.fromCenters(np.array([0.0, 0.5, 1.5]))


def test_snap_node():
    domain = Domain.interval(-1.0, 1.0, 200)
    assert domain.snapNode(0.0) == 100
    with pytest.raises(DomainError):
        domain.snapNode(0.003)
    with pytest.raises(DomainError):
        domain.snapNode(-1.0)


def test_check_contains():
    domain = Domain.interval(0.0, 1.0, 8)
    domain.checkContains(np.array([0.0, 0.5, 1.0]))
    with pytest.raises(DomainError):
        domain.checkContains(1.5)


@pytest.mark.parametrize(
    "domain",
    [Domain.interval(-2.0, 3.0, 10), Domain.rectangle((0.0, 1.0), (-1.0, 1.0), 3, 5)],
)
def test_domain_dict(domain):
    assert Domain.fromDict(domain.toDict()) == domain


def test_domain_dict_short_form():
    assert Domain.fromDict({"extent": [0, 1], "n": 16}) == Domain.interval(0.0, 1.0, 16)
