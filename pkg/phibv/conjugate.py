"""Numerical Legendre transforms and recession limits."""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from phibv.configuration import config
from phibv.families.base import PhiFunction

log = logging.getLogger("phibv")

_CHUNK = 256
_TAIL_RTOL = 1e-6
_RATIO_RTOL = 1e-6
_RECESSION_CAP = 1e9


def _flatPoints(phi: PhiFunction, x, shape) -> np.ndarray:
    """Broadcast points to ``shape`` and flatten to (N,) or (N, 2)."""
    x = np.asarray(x, dtype=float)
    if phi.dimension == 1:
        return np.broadcast_to(x, shape).reshape(-1)
    return np.broadcast_to(x, tuple(shape) + (2,)).reshape(-1, 2)


def _column(phi: PhiFunction, xf: np.ndarray) -> np.ndarray:
    return xf[:, None] if phi.dimension == 1 else xf[:, None, :]


def _legendre(
    phi: PhiFunction,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    xf: np.ndarray,
    y: np.ndarray,
    grid: np.ndarray,
    refine: bool,
) -> np.ndarray:
    """sup over the grid of y·τ − fn(x, τ), refined between grid neighbours."""
    out = np.empty(y.size)
    for start in range(0, y.size, _CHUNK):
        stop = min(start + _CHUNK, y.size)
        xc = _column(phi, xf[start:stop])
        g = grid if grid.ndim == 1 else grid[start:stop]
        with np.errstate(invalid="ignore", over="ignore"):
            objective = y[start:stop, None] * g - fn(xc, g)
        objective = np.where(np.isnan(objective), -np.inf, objective)
        k = np.argmax(objective, axis=1)
        best = objective[np.arange(stop - start), k]
        if refine:
            for i in range(stop - start):
                row = g if g.ndim == 1 else g[i]
                if not np.isfinite(best[i]) or k[i] == 0 or k[i] == row.size - 1:
                    continue
                xi = xc[i]

                def negative(tau, xi=xi, yi=y[start + i]):
                    value = float(yi * tau - fn(xi, np.asarray([tau]))[0])
                    return -value if np.isfinite(value) else 1e300

                res = minimize_scalar(
                    negative,
                    bounds=(row[k[i] - 1], row[k[i] + 1]),
                    method="bounded",
                    options={"xatol": 1e-12 * row[k[i] + 1]},
                )
                best[i] = max(best[i], -res.fun)
        out[start:stop] = best
    return np.maximum(out, 0.0)


def conjugate_numeric(
    phi: PhiFunction,
    x,
    s,
    points: Optional[int] = None,
    tmin: Optional[float] = None,
    tmax: Optional[float] = None,
    refine: bool = True,
) -> np.ndarray:
    """Numerical conjugate φ*(x, s) = sup_t (st − φ(x, t)).

    The sup runs over ``{0}`` and a geometric grid in ``[tmin, tmax]``, then
    one bounded scalar refinement around the grid argmax. Arguments beyond
    the slope φ(x, tmax)/tmax reached at the end of the grid give ∞.

    Parameters
    ----------
    phi : PhiFunction
        Convex Φ-function.
    x : array_like
        Points.
    s : array_like
        Nonnegative arguments, broadcast against ``x``.
    points, tmin, tmax : optional
        Grid size and range, defaults from the ``numerics`` config section.
    refine : bool
        Run the scalar refinement.

    Returns
    -------
    np.ndarray
        Conjugate values in [0, ∞].
    """
    points = points or config.getint("numerics", "legendre_points")
    tmin = tmin or config.getfloat("numerics", "legendre_tmin")
    tmax = tmax or config.getfloat("numerics", "legendre_tmax")
    s = np.asarray(s, dtype=float)
    shape = np.broadcast_shapes(phi.pointShape(x), s.shape)
    xf = _flatPoints(phi, x, shape)
    sf = np.broadcast_to(s, shape).reshape(-1)

    grid = np.concatenate([[0.0], np.geomspace(tmin, tmax, points)])
    values = _legendre(phi, phi.evaluate, xf, sf, grid, refine)

    slopeMax = phi.evaluate(xf, np.full(sf.shape, tmax)) / tmax
    values = np.where(sf > slopeMax * (1.0 + _TAIL_RTOL), np.inf, values)
    return values.reshape(shape)


def recession_numeric(
    phi: PhiFunction, x, kmin: Optional[int] = None, kmax: Optional[int] = None
) -> np.ndarray:
    """Recession function φ'_∞(x) from the quotients φ(x, 2^k)/2^k.

    For convex φ the quotient increases in k, so the last probe is a lower
    bound. The result is ∞ if the last probe exceeds 1e9 or the last two
    probes still differ by more than a relative 1e-6.
    """
    kmin = kmin if kmin is not None else config.getint("numerics", "recession_kmin")
    kmax = kmax if kmax is not None else config.getint("numerics", "recession_kmax")
    shape = phi.pointShape(x)
    xf = _flatPoints(phi, x, shape)
    T = np.power(2.0, np.arange(kmin, kmax + 1))
    with np.errstate(over="ignore", invalid="ignore"):
        quotients = phi.evaluate(_column(phi, xf), T) / T
    last, previous = quotients[:, -1], quotients[:, -2]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(previous > 0, last / previous, np.where(last > 0, np.inf, 1.0))
    infinite = ~np.isfinite(last) | (last > _RECESSION_CAP) | (ratio > 1.0 + _RATIO_RTOL)
    return np.where(infinite, np.inf, last).reshape(shape)


def biconjugate(
    phi: PhiFunction,
    x,
    t,
    points: Optional[int] = None,
    smin: Optional[float] = None,
    smax: Optional[float] = None,
) -> np.ndarray:
    """Double conjugate φ**(x, t) = sup_s (st − φ*(x, s)).

    The s-grid ends at the recession value where that is finite, and at
    ``smax`` otherwise. For convex lower semicontinuous φ the result matches
    φ up to grid resolution.
    """
    points = points or config.getint("numerics", "legendre_points")
    smin = smin or config.getfloat("numerics", "legendre_tmin")
    smax = smax or config.getfloat("numerics", "legendre_tmax")
    t = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(phi.pointShape(x), t.shape)
    xf = _flatPoints(phi, x, shape)
    tf = np.broadcast_to(t, shape).reshape(-1)

    top = np.where(np.isfinite(phi.recession(xf)), phi.recession(xf), smax)
    unit = np.concatenate([[0.0], np.geomspace(smin / smax, 1.0, points)])
    grid = top[:, None] * unit
    values = _legendre(phi, phi.conjugate, xf, tf, grid, refine=True)
    return values.reshape(shape)
