"""Standard mollifier on the line."""

import numpy as np
from scipy.integrate import cumulative_trapezoid, quad

_TABLE_POINTS = 8193


def _bump(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    inside = np.abs(z) < 1.0
    zi = np.where(inside, z, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - zi * zi)), 0.0)


NORMALIZATION = 1.0 / quad(lambda z: float(_bump(z)), -1.0, 1.0, epsabs=1e-14)[0]
"""C with C·∫exp(−1/(1 − z²)) dz = 1, about 2.2522836."""

_z = np.linspace(-1.0, 1.0, _TABLE_POINTS)
_cdf = cumulative_trapezoid(NORMALIZATION * _bump(_z), _z, initial=0.0)
_cdf /= _cdf[-1]


def eta(z) -> np.ndarray:
    """η(z) = C exp(−1/(1 − z²)) on (−1, 1), zero elsewhere."""
    return NORMALIZATION * _bump(z)


def eta_delta(x, delta: float) -> np.ndarray:
    """Scaled kernel η_δ(x) = η(x/δ)/δ."""
    return eta(np.asarray(x, dtype=float) / delta) / delta


def cdf(z) -> np.ndarray:
    """∫_{−∞}^z η, 0 below −1 and 1 above 1."""
    return np.interp(np.asarray(z, dtype=float), _z, _cdf, left=0.0, right=1.0)


def cell_weights(points, lo, hi, delta: float) -> np.ndarray:
    """Exact kernel mass of cells [lo_j, hi_j] seen from each point.

    Returns the matrix ``∫_{lo_j}^{hi_j} η_δ(x_i − y) dy``, the weights of the
    convolution restricted to the union of the cells.
    """
    x = np.asarray(points, dtype=float)[:, None]
    lo = np.asarray(lo, dtype=float)[None, :]
    hi = np.asarray(hi, dtype=float)[None, :]
    return cdf((x - lo) / delta) - cdf((x - hi) / delta)


def convolve_restricted(domain, samples, delta: float, points=None) -> np.ndarray:
    """(f∗η_δ)(x) with the integral restricted to the 1D domain.

    ``samples`` are cell averages on ``domain``; ``points`` default to the
    cell centres.
    """
    edges = domain.nodes
    points = domain.centers if points is None else points
    weights = cell_weights(points, edges[:-1], edges[1:], delta)
    return weights @ np.asarray(samples, dtype=float)
