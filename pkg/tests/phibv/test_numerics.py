import os
from unittest import mock

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from phibv.data_model.domain import Domain
from phibv.mollifier import NORMALIZATION, cdf, cell_weights, convolve_restricted, eta, eta_delta
from phibv.quadrature import gauss_legendre, graded_integral, panel_integrals
from phibv.util import best_index, get_thread_count, parallel_map


def test_gauss_legendre_exact_for_polynomials():
    nodes, weights = gauss_legendre(8)
    assert np.sum(weights) == pytest.approx(2.0)
    assert np.sum(weights * nodes**14) == pytest.approx(2.0 / 15.0)


def test_panel_integrals():
    values = panel_integrals(lambda x: x * x, [0.0, 1.0], [1.0, 2.0], 4)
    assert np.allclose(values, [1.0 / 3.0, 7.0 / 3.0])
    assert np.isinf(panel_integrals(lambda x: np.full_like(x, np.inf), [0.0], [1.0], 4)[0])


def test_graded_integral_with_kinks():
    value = graded_integral(np.abs, -1.0, 2.0, breakpoints=[0.0])
    assert value == pytest.approx(2.5, rel=1e-12)
    assert graded_integral(np.abs, 1.0, 1.0) == 0.0


def test_graded_integral_integrable_singularity():
    value = graded_integral(lambda x: np.abs(x) ** -0.5, -1.0, 1.0, singular=[0.0])
    assert value == pytest.approx(4.0, rel=1e-6)


def test_graded_integral_divergent_singularity():
    assert np.isinf(graded_integral(lambda x: 1.0 / np.abs(x), 0.0, 1.0, singular=[0.0]))


def test_mollifier_mass():
    assert NORMALIZATION == pytest.approx(2.2522836, rel=1e-6)
    z = np.linspace(-1.0, 1.0, 20001)
    assert trapezoid(eta(z), z) == pytest.approx(1.0, rel=1e-6)
    assert eta(1.0) == 0.0
    assert eta_delta(0.0, 0.5) == pytest.approx(2.0 * eta(0.0))
    assert cdf(-2.0) == 0.0
    assert cdf(0.0) == pytest.approx(0.5)
    assert cdf(2.0) == 1.0


def test_cell_weights_partition_of_unity():
    domain = Domain.interval(0.0, 1.0, 32)
    edges = domain.nodes
    weights = cell_weights(domain.centers, edges[:-1], edges[1:], 0.05)
    interior = (domain.centers > 0.05) & (domain.centers < 0.95)
    assert np.allclose(np.sum(weights, axis=1)[interior], 1.0)
    assert np.all(np.sum(weights, axis=1) <= 1.0 + 1e-12)


def test_convolution_preserves_constants_and_lines():
    domain = Domain.interval(0.0, 1.0, 64)
    x = domain.centers
    interior = (x > 0.1) & (x < 0.9)
    assert np.allclose(convolve_restricted(domain, np.ones(64), 0.1)[interior], 1.0)
    smoothed = convolve_restricted(domain, x, 0.1)
    assert np.allclose(smoothed[interior], x[interior], atol=1e-6)


@given(st.floats(1e-3, 0.5))
def test_convolution_is_averaging(delta):
    domain = Domain.interval(0.0, 1.0, 32)
    samples = np.sin(7.0 * domain.centers)
    smoothed = convolve_restricted(domain, samples, delta)
    assert np.max(np.abs(smoothed)) <= np.max(np.abs(samples)) + 1e-12


def test_get_thread_count():
    assert get_thread_count(3) == 3
    assert get_thread_count() >= 1
    with mock.patch.dict(os.environ, {"PHIBV_THREADS": "2"}):
        assert get_thread_count(8) == 2
    with mock.patch.dict(os.environ, {"PHIBV_THREADS": "many"}):
        assert get_thread_count(4) == 4


def test_parallel_map_keeps_order():
    assert parallel_map(lambda k: k * k, range(20), threads=4) == [k * k for k in range(20)]
    assert parallel_map(lambda k: k, [], threads=4) == []


def test_best_index():
    assert best_index([1.0, np.nan, 3.0, 3.0]) == (2, 3.0)
    assert best_index([-np.inf, -1.0]) == (1, -1.0)
