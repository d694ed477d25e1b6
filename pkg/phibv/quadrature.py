"""Composite Gauss–Legendre quadrature with dyadic grading toward singular points."""

import functools
import logging
from typing import Callable, Iterable, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from phibv.configuration import config

log = logging.getLogger("phibv")

Integrand = Callable[[np.ndarray], np.ndarray]


@functools.lru_cache(maxsize=16)
def gauss_legendre(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [−1, 1]."""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_integrals(fn: Integrand, lo, hi, order: int) -> np.ndarray:
    """Integrals of ``fn`` over the panels [lo_k, hi_k], ∞ if any node is ∞."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    nodes, weights = gauss_legendre(order)
    half = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo)[:, None] + half[:, None] * nodes
    values = np.asarray(fn(x), dtype=float)
    with np.errstate(invalid="ignore"):
        integrals = half * np.sum(values * weights, axis=1)
    return np.where(np.any(np.isinf(values), axis=1), np.inf, integrals)


def _graded_side(
    fn: Integrand, centre: float, length: float, sign: float, order: int, floor: float
) -> float:
    """∫ over (centre, centre + sign·length) on dyadic panels toward ``centre``.

    Panels stop at ``floor``; the rest is extrapolated as a geometric series
    with the ratio of the last two panel integrals. A ratio of at least one
    means the dyadic series diverges and the integral is ∞.
    """
    floorAbs = max(floor, 4.0 * np.finfo(float).eps * max(abs(centre), 1.0))
    levels = max(int(np.ceil(np.log2(length / floorAbs))), 2)
    outer = length * np.power(2.0, -np.arange(levels))
    inner = outer / 2.0
    a = centre + sign * inner
    b = centre + sign * outer
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    integrals = panel_integrals(fn, lo, hi, order)
    if np.any(np.isinf(integrals)):
        return np.inf
    total = float(np.sum(integrals))
    last, previous = integrals[-1], integrals[-2]
    if last == 0.0:
        return total
    ratio = last / previous if previous != 0.0 else np.inf
    if not 0.0 <= ratio < 1.0:
        log.debug(f"Dyadic series toward {centre} diverges (ratio {ratio})")
        return np.inf
    return total + last * ratio / (1.0 - ratio)


def graded_integral(
    fn: Integrand,
    a: float,
    b: float,
    breakpoints: Iterable[float] = (),
    singular: Iterable[float] = (),
    order: Optional[int] = None,
    floor: Optional[float] = None,
) -> float:
    """Integrate a vectorized integrand over [a, b].

    Parameters
    ----------
    fn : Callable
        Integrand, evaluated on arrays of points.
    a, b : float
        Integration bounds.
    breakpoints : Iterable[float]
        Kinks of the integrand; pieces between them are smooth.
    singular : Iterable[float]
        Points where the integrand may blow up. Adjacent pieces are graded
        dyadically toward them down to ``floor``.
    order : Optional[int]
        Gauss–Legendre order, default ``[numerics] quad_order``.
    floor : Optional[float]
        Grading floor, default ``[numerics] quad_floor``.

    Returns
    -------
    float
        Integral value, possibly ∞.
    """
    order = order or config.getint("numerics", "quad_order")
    floor = floor or config.getfloat("numerics", "quad_floor")
    if b <= a:
        return 0.0
    singular = np.asarray([s for s in singular if a <= s <= b], dtype=float)
    cuts = np.unique(
        np.concatenate(
            [[a, b], [p for p in breakpoints if a < p < b], singular]
        ).astype(float)
    )

    regularLo, regularHi = [], []
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        singularLo = bool(np.any(singular == lo))
        singularHi = bool(np.any(singular == hi))
        if singularLo and singularHi:
            mid = 0.5 * (lo + hi)
            total += _graded_side(fn, lo, mid - lo, 1.0, order, floor)
            total += _graded_side(fn, hi, hi - mid, -1.0, order, floor)
        elif singularLo:
            total += _graded_side(fn, lo, hi - lo, 1.0, order, floor)
        elif singularHi:
            total += _graded_side(fn, hi, hi - lo, -1.0, order, floor)
        else:
            regularLo.append(lo)
            regularHi.append(hi)
        if np.isinf(total):
            return np.inf
    if regularLo:
        total += float(np.sum(panel_integrals(fn, regularLo, regularHi, order)))
    return total
