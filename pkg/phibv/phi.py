"""Pointwise Φ-function operations with argument checks."""

import logging
from typing import Union

import numpy as np

from phibv.data_model.extreal import ExtReal
from phibv.families.base import PhiFunction

log = logging.getLogger("phibv")

Result = Union[ExtReal, np.ndarray]


def _wrap(values: np.ndarray) -> Result:
    values = np.asarray(values, dtype=float)
    if values.ndim == 0:
        return ExtReal(max(float(values), 0.0))
    return values


def _check(phi: PhiFunction, x, t, name: str, positive: bool = False):
    if phi.domain is not None:
        phi.domain.checkContains(x)
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0) or (positive and np.any(t <= 0)):
        bound = "> 0" if positive else ">= 0"
        log.error(f"Invalid argument {name} = {t}")
        raise ValueError(f"Argument {name} must be {bound}, got {t}.")


def eval_phi(phi: PhiFunction, x, t) -> Result:
    """Return φ(x, t).

    Raises
    ------
    DomainError
        ``x`` outside the bound domain.
    ValueError
        Negative ``t``.
    """
    _check(phi, x, t, "t")
    t = np.asarray(t, dtype=float)
    values = np.where(t == 0, 0.0, phi.evaluate(x, t))
    return _wrap(values)


def left_derivative(phi: PhiFunction, x, t) -> Result:
    """Return the left derivative φ'(x, t) for t > 0."""
    _check(phi, x, t, "t", positive=True)
    return _wrap(phi.derivative(x, t))


def conjugate_eval(phi: PhiFunction, x, s) -> Result:
    """Return φ*(x, s).

    Families flagged with ``closedConjugate`` use their closed form, all
    others the numerical Legendre transform.
    """
    _check(phi, x, s, "s")
    if phi.closedConjugate:
        return _wrap(phi.conjugate(x, s))
    from phibv.conjugate import conjugate_numeric

    log.debug(f"No closed conjugate for {phi.id}, using the Legendre transform")
    return _wrap(conjugate_numeric(phi, x, s))


def recession(phi: PhiFunction, x) -> Result:
    """Return φ'_∞(x)."""
    if phi.domain is not None:
        phi.domain.checkContains(x)
    return _wrap(phi.recession(x))


def young_gap(phi: PhiFunction, x, t) -> Union[float, np.ndarray]:
    """Return φ(x, t) + φ*(x, φ'(x, t)) − t φ'(x, t).

    The gap vanishes up to tolerance by Young's equality. Points where
    φ'(x, t) = ∞ give ∞.
    """
    _check(phi, x, t, "t", positive=True)
    t = np.asarray(t, dtype=float)
    slope = phi.derivative(x, t)
    finite = np.isfinite(slope)
    safeSlope = np.where(finite, slope, 0.0)
    with np.errstate(invalid="ignore"):
        gap = phi.evaluate(x, t) + phi.conjugate(x, safeSlope) - t * safeSlope
    gap = np.where(finite, gap, np.inf)
    return float(gap) if gap.ndim == 0 else gap
