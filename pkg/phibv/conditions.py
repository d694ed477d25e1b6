"""Estimators for the regularity conditions of Φ-functions.

The conditions are pointwise statements over all of Ω and all t ≥ 0. The
estimators sample finitely many points, radii and arguments, so verdicts hold
at the reported probe resolution only.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from phibv.configuration import config
from phibv.data_model.domain import Domain
from phibv.data_model.fields import CoefficientField
from phibv.data_model.report import ConditionReport, Verdict
from phibv.errors import DomainError, ShapeError
from phibv.families.base import PhiFunction
from phibv.mollifier import convolve_restricted

log = logging.getLogger("phibv")


def _subsample(points: np.ndarray, maxPoints: int) -> np.ndarray:
    if len(points) <= maxPoints:
        return points
    index = np.unique(np.round(np.linspace(0, len(points) - 1, maxPoints)).astype(int))
    return points[index]


def sample_points(
    domain: Domain, maxPoints: int = 64, singular: Optional[np.ndarray] = None
) -> np.ndarray:
    """Probe points: grid nodes (1D) or centres (2D), thinned, plus singular points."""
    if domain.dimension == 1:
        points = _subsample(domain.nodes, maxPoints)
        if singular is not None and len(singular):
            inside = singular[domain.contains(singular)]
            points = np.unique(np.concatenate([points, inside]))
        return points
    return _subsample(domain.centers.reshape(-1, 2), maxPoints)


def _column(phi: PhiFunction, x: np.ndarray) -> np.ndarray:
    return x[:, None] if phi.dimension == 1 else x[:, None, :]


def _distance(x: np.ndarray, y: np.ndarray, dimension: int) -> np.ndarray:
    diff = x - y
    if dimension == 1:
        return np.abs(diff)
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _bisect(passes, good: float, bad: float, iterations: int = 50) -> float:
    """Largest passing value between ``good`` (passes) and ``bad`` (fails)."""
    for _ in range(iterations):
        mid = 0.5 * (good + bad)
        if passes(mid):
            good = mid
        else:
            bad = mid
    return good


def check_A0(phi: PhiFunction, domain: Domain, maxPoints: int = 256) -> ConditionReport:
    """Estimate the largest β ∈ (0, 1] with φ(x, β) ≤ 1 ≤ φ(x, 1/β).

    β is searched on the dyadic grid 2^-j and refined by bisection between
    the first passing grid value and its failing neighbour.
    """
    x = sample_points(domain, maxPoints, phi.singularPoints)
    tol = config.getfloat("numerics", "tol")

    def violations(beta: float) -> np.ndarray:
        low = phi.evaluate(x, np.full(len(x), beta)) > 1.0 + tol
        high = phi.evaluate(x, np.full(len(x), 1.0 / beta)) < 1.0 - tol
        return low | high

    def passes(beta: float) -> bool:
        return not np.any(violations(beta))

    resolution = {"points": int(len(x)), "dyadic_steps": 61}
    for j in range(61):
        beta = 2.0**-j
        if passes(beta):
            if j > 0:
                beta = _bisect(passes, beta, 2.0 ** (1 - j))
            log.info(f"(A0) holds with beta = {beta}")
            return ConditionReport("A0", True, Verdict.HOLDS, beta, {}, [], resolution)

    bad = int(np.argmax(violations(2.0**-60)))
    witness = {
        "x": x[bad].tolist() if phi.dimension > 1 else float(x[bad]),
        "beta": 2.0**-60,
        "phi_beta": float(phi.evaluate(x[bad], 2.0**-60)),
        "phi_inv_beta": float(phi.evaluate(x[bad], 2.0**60)),
    }
    log.info("(A0) fails for all dyadic beta >= 2^-60")
    return ConditionReport("A0", False, Verdict.FAILS, None, witness, [], resolution)


def _almostIncreasing(ratio: np.ndarray) -> Tuple[float, Tuple[int, int]]:
    """Smallest L with r(s) ≤ L r(t) for s ≤ t, along axis 1, and its argmax."""
    runningMax = np.maximum.accumulate(ratio, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        quotient = np.where(
            runningMax == 0.0, 1.0, np.where(ratio > 0, runningMax / ratio, np.inf)
        )
    quotient = np.where(np.isnan(quotient), np.inf, quotient)
    flat = int(np.argmax(quotient))
    return float(quotient.flat[flat]), np.unravel_index(flat, quotient.shape)  # type: ignore


def check_growth(
    phi: PhiFunction,
    domain: Domain,
    p: Optional[float] = None,
    q: Optional[float] = None,
    maxPoints: int = 64,
) -> ConditionReport:
    """Estimate the constants of (aInc)_p and (aDec)_q.

    The constants are measured on the nested t-grids [1e-3, 1e3] and
    [1e-6, 1e6]. A side holds if the wide constant stays below
    ``[numerics] growth_cap`` and does not grow from the narrow to the wide
    grid beyond the relative limit tolerance. Omitted exponents default to the
    declared growth metadata; sides without exponent are skipped.
    """
    p = p if p is not None else phi.growth.p_inc
    q = q if q is not None else phi.growth.q_dec
    if (p is not None and p < 1) or (q is not None and q < 1):
        raise ValueError(f"Growth exponents must be >= 1, got p={p}, q={q}.")
    cap = config.getfloat("numerics", "growth_cap")
    limitTol = config.getfloat("numerics", "limit_tol")
    x = sample_points(domain, maxPoints, phi.singularPoints)
    tWide = np.geomspace(1e-6, 1e6, 481)
    narrow = slice(120, 361)
    with np.errstate(over="ignore"):
        values = phi.evaluate(_column(phi, x), tWide)

    holds = True
    witness = {}
    constants = []
    for name, exponent, reverse in [("p", p, False), ("q", q, True)]:
        if exponent is None:
            continue
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = values / np.power(tWide, exponent)
        narrowRatio = ratio[:, narrow]
        if reverse:
            # almost decreasing is almost increasing in reversed t
            ratio, narrowRatio = ratio[:, ::-1], narrowRatio[:, ::-1]
        lWide, (i, k) = _almostIncreasing(ratio)
        lNarrow, _ = _almostIncreasing(narrowRatio)
        sideHolds = lWide <= cap and lWide <= lNarrow * (1.0 + limitTol)
        holds &= sideHolds
        constants.append(lWide)
        tIndex = len(tWide) - 1 - k if reverse else k
        witness[f"L_{name}"] = lWide
        witness[f"L_{name}_narrow"] = lNarrow
        witness[f"x_{name}"] = x[i].tolist() if phi.dimension > 1 else float(x[i])
        witness[f"t_{name}"] = float(tWide[tIndex])
        log.debug(f"Growth {name}={exponent}: L narrow {lNarrow}, L wide {lWide}")

    return ConditionReport(
        "growth",
        bool(holds),
        Verdict.HOLDS if holds else Verdict.FAILS,
        max(constants) if constants else None,
        witness,
        [],
        {"points": int(len(x)), "t_range": [1e-6, 1e6], "t_points": len(tWide), "p": p, "q": q},
    )


def _unitSet(field: CoefficientField, domain: Domain) -> np.ndarray:
    """Probe points of {p = 1}: singular centres and boundary nodes of the set."""
    if domain.dimension == 1:
        nodes = domain.nodes
        isOne = field(nodes) == 1.0
        neighbour = np.zeros_like(isOne)
        neighbour[:-1] |= ~isOne[1:]
        neighbour[1:] |= ~isOne[:-1]
        points = nodes[isOne & (neighbour | (nodes == nodes[0]) | (nodes == nodes[-1]))]
        sing = field.singularPoints
        sing = sing[domain.contains(sing)]
        sing = sing[field(sing) == 1.0]
        return np.unique(np.concatenate([points, sing]))
    centres = domain.centers.reshape(-1, 2)
    return centres[field(centres) == 1.0]


def log_holder_modulus(
    field: CoefficientField,
    domain: Domain,
    strong: bool = False,
    maxPoints: int = 512,
    finestLevel: int = 60,
) -> ConditionReport:
    """Log-Hölder modulus of an exponent field.

    Plain mode returns sup |1/p(x) − 1/p(y)|·log(e + 1/|x − y|) over pairs of
    probe points. Strong mode tabulates, on dyadic radii r = 2^-k,
    sup |1 − 1/p(x)|·log(1/|x − y|) over y ∈ {p = 1} and |x − y| ∈ (r/2, r];
    the verdict is vanishing if the value at the finest radius is below the
    limit tolerance, and vacuous if {p = 1} is empty.
    """
    limitTol = config.getfloat("numerics", "limit_tol")
    if not strong:
        x = sample_points(domain, maxPoints, field.singularPoints)
        p = field(x)
        inv = 1.0 / p
        diff = np.abs(inv[:, None] - inv[None, :])
        dist = _distance(x[:, None], x[None, :], domain.dimension)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(dist > 0, diff * np.log(np.e + 1.0 / dist), 0.0)
        i, j = np.unravel_index(int(np.argmax(values)), values.shape)
        modulus = float(values[i, j])
        witness = {
            "x": x[i].tolist() if domain.dimension > 1 else float(x[i]),
            "y": x[j].tolist() if domain.dimension > 1 else float(x[j]),
        }
        holds = bool(np.isfinite(modulus))
        return ConditionReport(
            "log_holder",
            holds,
            Verdict.HOLDS if holds else Verdict.FAILS,
            modulus,
            witness,
            [],
            {"points": int(len(x))},
        )

    ones = _unitSet(field, domain)
    resolution = {"unit_points": int(len(ones)), "finest_radius": 2.0**-finestLevel}
    if len(ones) == 0:
        log.info("Strong log-Hölder check is vacuous: {p = 1} is empty")
        return ConditionReport(
            "strong_log_holder", True, Verdict.VACUOUS, None, {}, [], resolution
        )

    fractions = np.power(2.0, -np.arange(8) / 8.0)
    if domain.dimension == 1:
        directions = np.array([-1.0, 1.0])
    else:
        directions = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
    table = []
    worst = {}
    for k in range(1, finestLevel + 1):
        r = 2.0**-k
        offsets = r * fractions
        if domain.dimension == 1:
            x = ones[:, None, None] + directions[None, :, None] * offsets[None, None, :]
            x = np.clip(x, *domain.extent[0])
            y = np.broadcast_to(ones[:, None, None], x.shape)
        else:
            x = (
                ones[:, None, None, :]
                + directions[None, :, None, :] * offsets[None, None, :, None]
            )
            for axis in range(2):
                x[..., axis] = np.clip(x[..., axis], *domain.extent[axis])
            y = np.broadcast_to(ones[:, None, None, :], x.shape)
        dist = _distance(x, y, domain.dimension)
        p = field(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(
                dist > 0, np.abs(1.0 - 1.0 / p) * np.maximum(-np.log(dist), 0.0), 0.0
            )
        flat = int(np.argmax(values))
        table.append((r, float(values.flat[flat])))
        if k == finestLevel:
            index = np.unravel_index(flat, values.shape)
            worst = {
                "y": np.asarray(y[index]).tolist(),
                "x": np.asarray(x[index]).tolist(),
            }

    finest = table[-1][1]
    vanishing = finest < limitTol
    log.info(f"Strong log-Hölder modulus at finest radius: {finest}")
    return ConditionReport(
        "strong_log_holder",
        bool(vanishing),
        Verdict.VANISHING if vanishing else Verdict.NOT_VANISHING,
        finest,
        worst,
        table,
        resolution,
    )


def _pairMask(phiY: np.ndarray, dist: np.ndarray, K: float, dimension: int):
    with np.errstate(divide="ignore"):
        bound = K / np.power(dist, dimension)
    return phiY <= bound[..., None]


def check_A1(
    phi: PhiFunction, domain: Domain, K: float = 1.0, maxPoints: int = 48
) -> ConditionReport:
    """Estimate the largest β ∈ (0, 1] with φ(x, βt) ≤ φ(y, t) + 1 whenever φ(y, t) ≤ K/|x − y|ⁿ.

    Pairs of probe points and a geometric t-grid on [1e-6, 1e12] are checked
    for dyadic β, refined by bisection.
    """
    x = sample_points(domain, maxPoints, phi.singularPoints)
    t = np.geomspace(1e-6, 1e12, 361)
    phiT = phi.evaluate(_column(phi, x), t)
    dist = _distance(x[:, None], x[None, :], domain.dimension)
    mask = _pairMask(phiT[None, :, :], dist, K, domain.dimension)
    mask &= (dist > 0)[..., None]
    tol = config.getfloat("numerics", "tol")

    def excess(beta: float) -> np.ndarray:
        lhs = phi.evaluate(_column(phi, x), beta * t)[:, None, :]
        return np.where(mask, lhs - phiT[None, :, :] - 1.0, -np.inf)

    def passes(beta: float) -> bool:
        return bool(np.all(excess(beta) <= tol))

    resolution = {"points": int(len(x)), "t_range": [1e-6, 1e12], "K": K}
    for j in range(41):
        beta = 2.0**-j
        if passes(beta):
            witness = {}
            if j > 0:
                values = excess(2.0 ** (1 - j))
                i, k, m = np.unravel_index(int(np.argmax(values)), values.shape)
                witness = {
                    "x": np.asarray(x[i]).tolist(),
                    "y": np.asarray(x[k]).tolist(),
                    "t": float(t[m]),
                    "beta_failing": 2.0 ** (1 - j),
                }
                beta = _bisect(passes, beta, 2.0 ** (1 - j), 40)
            log.info(f"(A1) holds with beta = {beta}")
            return ConditionReport("A1", True, Verdict.HOLDS, beta, witness, [], resolution)
    values = excess(2.0**-40)
    i, k, m = np.unravel_index(int(np.argmax(values)), values.shape)
    witness = {
        "x": np.asarray(x[i]).tolist(),
        "y": np.asarray(x[k]).tolist(),
        "t": float(t[m]),
        "beta_failing": 2.0**-40,
    }
    return ConditionReport("A1", False, Verdict.FAILS, None, witness, [], resolution)


def check_VA1(
    phi: PhiFunction,
    domain: Domain,
    K: float = 1.0,
    restricted: bool = False,
    maxPoints: int = 48,
    levels: int = 40,
    points: Optional[np.ndarray] = None,
) -> ConditionReport:
    """Tabulate the vanishing continuity modulus ω(r).

    For each dyadic radius r = diam·2^-k, ω(r) is the smallest ω ≥ 0 with
    φ(x, t/(1 + ω)) ≤ φ(y, t) + ω for probe pairs with |x − y| ≤ r and probe
    arguments with φ(y, t) ≤ K/|x − y|ⁿ. Pairs are probe points y and their
    axis neighbours at distance r. The restricted variant keeps only pairs
    where φ'_∞(x) or φ'_∞(y) is finite. The verdict is vanishing if ω at the
    finest radius is below the limit tolerance. ``points`` replaces the sampled
    points y for a check local to given sites.
    """
    limitTol = config.getfloat("numerics", "limit_tol")
    if points is None:
        y0 = sample_points(domain, maxPoints, phi.singularPoints)
    else:
        y0 = np.asarray(points, dtype=float)
    diam = max(hi - lo for lo, hi in domain.extent)
    radii = diam * np.power(2.0, -np.arange(1, levels + 1))
    if domain.dimension == 1:
        directions = np.array([-1.0, 1.0])
        x = y0[None, :, None] + radii[:, None, None] * directions[None, None, :]
        x = np.clip(x, *domain.extent[0]).reshape(levels, -1)
        y = np.broadcast_to(y0[None, :, None], (levels, len(y0), 2)).reshape(levels, -1)
    else:
        directions = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, -1.0], [0.0, 1.0]])
        x = (
            y0[None, :, None, :]
            + radii[:, None, None, None] * directions[None, None, :, :]
        )
        for axis in range(2):
            x[..., axis] = np.clip(x[..., axis], *domain.extent[axis])
        x = x.reshape(levels, -1, 2)
        y = np.broadcast_to(y0[None, :, None, :], (levels, len(y0), 4, 2)).reshape(
            levels, -1, 2
        )

    level = np.repeat(np.arange(levels), x.shape[1])
    xf = x.reshape(-1) if domain.dimension == 1 else x.reshape(-1, 2)
    yf = y.reshape(-1) if domain.dimension == 1 else y.reshape(-1, 2)
    dist = _distance(xf, yf, domain.dimension)
    keep = dist > 0
    if restricted:
        keep &= np.isfinite(phi.recession(xf)) | np.isfinite(phi.recession(yf))
    xf, yf, dist, level = xf[keep], yf[keep], dist[keep], level[keep]

    resolution = {
        "points": int(len(y0)),
        "levels": levels,
        "finest_radius": float(radii[-1]),
        "t_range": [1e-6, 1e15],
        "K": K,
        "restricted": restricted,
    }
    if len(xf) == 0:
        log.info("(VA1) check has no admissible pairs")
        return ConditionReport(
            "VA1_restricted" if restricted else "VA1",
            True,
            Verdict.VACUOUS,
            None,
            {},
            [],
            resolution,
        )

    t = np.geomspace(1e-6, 1e15, 421)
    phiY = phi.evaluate(_column(phi, yf), t)
    mask = _pairMask(phiY, dist, K, domain.dimension)

    def satisfied(omega: np.ndarray) -> np.ndarray:
        lhs = phi.evaluate(_column(phi, xf), t[None, :] / (1.0 + omega[:, None]))
        return np.all(~mask | (lhs <= phiY + omega[:, None] * (1.0 + 1e-12)), axis=1)

    lo = np.zeros(len(xf))
    hi = np.ones(len(xf))
    ok = satisfied(lo)
    hiOk = satisfied(hi)
    for _ in range(60):
        if np.all(hiOk | ok):
            break
        hi = np.where(hiOk | ok, hi, 2.0 * hi)
        hiOk = satisfied(hi)
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        midOk = satisfied(mid)
        hi = np.where(midOk, mid, hi)
        lo = np.where(midOk, lo, mid)
    omega = np.where(ok, 0.0, np.where(hiOk | ok, hi, np.inf))

    annulus = np.zeros(levels)
    np.maximum.at(annulus, level, omega)
    table = np.maximum.accumulate(annulus[::-1])[::-1]
    finest = float(table[-1])
    worstPair = int(np.argmax(np.where(level == level.max(), omega, -1.0)))
    witness = {
        "x": np.asarray(xf[worstPair]).tolist(),
        "y": np.asarray(yf[worstPair]).tolist(),
        "omega": float(omega[worstPair]),
    }
    vanishing = finest < limitTol
    name = "VA1_restricted" if restricted else "VA1"
    log.info(f"({name}) modulus at finest radius: {finest}")
    return ConditionReport(
        name,
        bool(vanishing),
        Verdict.VANISHING if vanishing else Verdict.NOT_VANISHING,
        finest,
        witness,
        [(float(r), float(w)) for r, w in zip(radii, table)],
        resolution,
    )


def modulus_at(report: ConditionReport, radius: float) -> float:
    """ω(radius) read off a modulus table: value of the smallest tabulated r ≥ radius."""
    if not report.table:
        return 0.0 if report.verdict == Verdict.VACUOUS else float(report.constant or 0.0)
    candidates = [w for r, w in report.table if r >= radius]
    return float(candidates[-1]) if candidates else float(report.table[0][1])


def jensen_defect(
    phi: PhiFunction,
    center,
    radius: float,
    points,
    f,
    mu,
    omega: float = 0.0,
) -> float:
    """Return ∫φ(x, |f|) dμ + ω − inf_{x∈B} φ(x, ∫|f| dμ/(1 + ω)).

    The infimum over the ball runs over a dense sample of B_r(center) together
    with the support of μ.

    Raises
    ------
    DomainError
        Support points outside the ball.
    ValueError
        Weights negative or not summing to one.
    """
    points = np.asarray(points, dtype=float)
    center = np.asarray(center, dtype=float)
    f = np.abs(np.asarray(f, dtype=float))
    mu = np.asarray(mu, dtype=float)
    if np.any(mu < 0) or abs(float(np.sum(mu)) - 1.0) > 1e-9:
        log.error(f"Invalid probability weights, sum {np.sum(mu)}")
        raise ValueError("Weights must be non negative and sum to 1.")
    if np.any(_distance(points, center, phi.dimension) > radius * (1.0 + 1e-12)):
        log.error("Jensen support points outside the ball")
        raise DomainError("Support points must lie in the ball.")

    rhs = float(np.sum(mu * phi.evaluate(points, f))) + omega
    mean = float(np.sum(mu * f)) / (1.0 + omega)
    if phi.dimension == 1:
        ball = np.concatenate([np.linspace(center - radius, center + radius, 513), points])
        if phi.domain is not None:
            ball = ball[phi.domain.contains(ball)]
    else:
        axis = np.linspace(-radius, radius, 65)
        yy, xx = np.meshgrid(axis, axis, indexing="ij")
        offsets = np.stack([yy, xx], axis=-1).reshape(-1, 2)
        offsets = offsets[np.sum(offsets * offsets, axis=1) <= radius * radius]
        ball = np.concatenate([center + offsets, points.reshape(-1, 2)])
        if phi.domain is not None:
            ball = ball[phi.domain.contains(ball)]
    lhs = float(np.min(phi.evaluate(ball, np.full(len(ball), mean))))
    return rhs - lhs


def mollify_modular_check(
    phi: PhiFunction, domain: Domain, f, delta: float, omega: float = 0.0
) -> Tuple[float, float]:
    """Both sides of ρ_φ(f∗η_δ/(1 + ω)) ≤ ρ_φ(f) + ω on a 1D grid.

    The convolution is restricted to Ω and uses the exact kernel mass of each
    cell.

    Returns
    -------
    Tuple[float, float]
        ``(lhs, rhs)``.
    """
    if domain.dimension != 1:
        raise ShapeError("Mollified modular check is one-dimensional.")
    f = np.asarray(f, dtype=float)
    if f.shape != domain.shape:
        log.error(f"Samples of shape {f.shape} on domain {domain.shape}")
        raise ShapeError(f"Samples have shape {f.shape}, domain expects {domain.shape}.")
    if delta <= 0:
        raise ValueError(f"Mollifier width must be positive, got {delta}.")
    x = domain.centers
    smoothed = convolve_restricted(domain, f, delta)
    lhs = float(np.sum(phi.evaluate(x, np.abs(smoothed) / (1.0 + omega)))) * domain.h
    rhs = float(np.sum(phi.evaluate(x, np.abs(f)))) * domain.h + omega
    return lhs, rhs
