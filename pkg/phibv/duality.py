"""Direct evaluation of the dual modular and the dual norm.

The dual modular of u is sup_w ∫ w dDu − ∫ φ*(x, |w|) dx over compactly
supported fields w. The searches here realize it from below over two test
field families: piecewise linear nodal fields improved by coordinate ascent,
and trapezoid bumps placed on the atoms of u.
"""

import dataclasses
import logging
from configparser import ConfigParser
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from phibv.configuration import config
from phibv.data_model.bv import BVFunction
from phibv.data_model.domain import Domain
from phibv.data_model.report import ConditionReport, Verdict, encode_value
from phibv.data_model.testfield import CompositeField, NodalField, TestField, TrapezoidBump
from phibv.errors import DomainError
from phibv.families.base import PhiFunction
from phibv.modular import modular_exact, modular_luxemburg
from phibv.mollifier import convolve_restricted
from phibv.quadrature import gauss_legendre, graded_integral
from phibv.util import best_index, parallel_map

log = logging.getLogger("phibv")

_STEPS = np.array([0.0, -1.0, -0.5, 0.5, 1.0])
_PENALTY = 1e300


@dataclasses.dataclass(frozen=True)
class StrategyConfig:
    """Search settings of the dual estimators, see the ``[duality]`` config section."""

    family: str = "both"
    resolution: int = 0
    delta_min: float = 1e-30
    delta_max: float = 0.3
    m_min: float = 0.1
    m_max: float = 100.0
    m_points: int = 25
    delta_points: int = 20
    refine_iters: int = 100
    iters: int = 4
    seed: int = 0
    smoothing: float = 0.0
    threads: int = 0
    bisect_iters: int = 60
    equivalence_iters: int = 30
    est_slack: float = 0.1

    @classmethod
    def fromConfig(cls, conf: Optional[ConfigParser] = None) -> "StrategyConfig":
        """Read the ``[duality]`` section and the thread count."""
        conf = conf if conf is not None else config
        kwargs: Dict[str, Any] = {}
        for field in dataclasses.fields(cls):
            if field.name == "threads":
                kwargs["threads"] = conf.getint("numerics", "threads")
            elif field.type in ("str", str):
                kwargs[field.name] = conf.get("duality", field.name)
            elif field.type in ("int", int):
                kwargs[field.name] = conf.getint("duality", field.name)
            else:
                kwargs[field.name] = conf.getfloat("duality", field.name)
        return cls(**kwargs)

    def update(self, strategyDict: Dict[str, Any]) -> "StrategyConfig":
        """Return a copy with the entries of a strategy JSON object applied.

        Raises
        ------
        ValueError
            Unknown key or invalid family.
        """
        names = {f.name: f for f in dataclasses.fields(self)}
        changes = {}
        for key, value in strategyDict.items():
            if key not in names:
                log.error(f"Unknown strategy option {key}")
                raise ValueError(f"Unknown strategy option '{key}'.")
            kind = names[key].type
            changes[key] = (
                str(value) if kind in ("str", str) else int(value) if kind in ("int", int) else float(value)
            )
        updated = dataclasses.replace(self, **changes)
        if updated.family not in ("nodal", "bump", "both"):
            raise ValueError(f"Unknown search family '{updated.family}'.")
        return updated

    def coarse(self) -> "StrategyConfig":
        """Cheaper settings for nested searches."""
        return dataclasses.replace(
            self,
            m_points=min(self.m_points, 9),
            delta_points=min(self.delta_points, 8),
            refine_iters=min(self.refine_iters, 30),
            iters=min(self.iters, 2),
        )

    def toDict(self) -> Dict[str, Any]:
        """Serialize settings."""
        return dataclasses.asdict(self)


@dataclasses.dataclass
class DualEstimate:
    """Best dual objective found, a lower bound of the supremum."""

    value: float
    optimizer: TestField
    iterations: int = 0
    evaluations: int = 0
    capReached: bool = False
    gap_vs_exact: Optional[float] = None

    def toDict(self) -> Dict[str, Any]:
        """Serialize estimate."""
        return encode_value(
            {
                "value": self.value,
                "optimizer": self.optimizer.toDict(),
                "iterations": self.iterations,
                "evaluations": self.evaluations,
                "cap_reached": self.capReached,
                "gap_vs_exact": self.gap_vs_exact,
            }
        )


def _checkLine(u: BVFunction):
    if u.domain.dimension != 1:
        log.error("Dual estimators need a 1D BV function")
        raise DomainError("Dual estimators are one-dimensional.")


def dual_pairing(u: BVFunction, w: TestField) -> float:
    """∫ w dDu = Σ_cells ∇ᵃu·∫_cell w + Σ_i sᵢ w(xᵢ).

    Positive jumps pair with positive w, so a unit step at x₀ gives w(x₀).
    """
    _checkLine(u)
    nodes = u.domain.nodes
    acPart = float(np.sum(u.gradient * w.integrate(nodes[:-1], nodes[1:])))
    if not u.atoms:
        return acPart
    return acPart + float(np.sum(u.atomJumps * w(u.atomPositions)))


def conjugate_modular(phi: PhiFunction, w: TestField) -> float:
    """ρ_{φ*}(|w|) = ∫ φ*(x, |w(x)|) dx over the support of w.

    Pieces between the kinks of w are integrated by Gauss–Legendre; pieces
    touching a singular point of φ are graded toward it, see
    :func:`phibv.quadrature.graded_integral`. φ* = ∞ on a null set, such as
    a single kink, does not make the integral infinite.
    """
    if w.maxAbs == 0.0:
        return 0.0
    xs, _ = w.knots
    a, b = w.support
    singular = phi.singularPoints

    def integrand(x):
        return phi.conjugate(x, np.abs(w(x)))

    return graded_integral(integrand, a, b, xs, singular)


def dual_objective(phi: PhiFunction, u: BVFunction, w: TestField) -> float:
    """∫ w dDu − ρ_{φ*}(|w|), −∞ for inadmissible w."""
    conj = conjugate_modular(phi, w)
    if np.isinf(conj):
        return -np.inf
    return dual_pairing(u, w) - conj


class _NodalSearch:
    """Coordinate ascent over nodal values with red-black sweeps.

    Nodes of equal parity touch disjoint cells, so each color is updated in
    one vectorized step from the local change of the objective.
    """

    def __init__(self, phi: PhiFunction, u: BVFunction, strategy: StrategyConfig):
        self.phi = phi
        self.u = u
        self.strategy = strategy
        n = u.domain.n
        lo, hi = u.domain.extent[0]
        resolution = strategy.resolution or n
        if resolution % n:
            log.warning(f"Search resolution {resolution} is no multiple of {n}; using {n}")
            resolution = n
        self.grid = Domain.interval(lo, hi, resolution)
        self.h = self.grid.h
        cellIndex = np.clip(
            np.floor((self.grid.centers - lo) / u.domain.h).astype(int), 0, n - 1
        )
        self.g = u.gradient[cellIndex]
        self.nodeJump = np.zeros(resolution + 1)
        for x, s in zip(u.atomPositions, u.atomJumps):
            self.nodeJump[int(round((x - lo) / self.h))] += s

        xi, weights = gauss_legendre(config.getint("numerics", "quad_order"))
        self.t = 0.5 * (xi + 1.0)
        self.weights = 0.5 * self.h * weights
        self.xq = self.grid.nodes[:-1, None] + self.h * self.t[None, :]
        nodes = self.grid.nodes
        recNode = phi.recession(nodes)
        recCell = phi.recession(self.grid.centers)
        self.envelope = np.minimum(
            recNode,
            np.minimum(
                np.concatenate([[np.inf], recCell]), np.concatenate([recCell, [np.inf]])
            ),
        )
        self.evaluations = 0

    def cellConjugate(self, cells: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """∫ φ*(x, |w|) over cells where w runs linearly from a to b."""
        w = a[..., None] + (b - a)[..., None] * self.t
        x = self.xq[cells]
        if w.ndim > x.ndim:
            x = x[:, None, :]
        values = self.phi.conjugate(x, np.abs(w))
        self.evaluations += values.size
        with np.errstate(invalid="ignore"):
            out = np.sum(values * self.weights, axis=-1)
        return np.where(np.any(np.isinf(values), axis=-1), np.inf, out)

    def objective(self, v: np.ndarray) -> float:
        cells = np.arange(self.grid.n)
        conj = float(np.sum(self.cellConjugate(cells, v[:-1], v[1:])))
        if np.isinf(conj):
            return -np.inf
        pairing = float(np.sum(self.g * 0.5 * self.h * (v[:-1] + v[1:])))
        return pairing + float(np.sum(self.nodeJump * v)) - conj

    def warmStart(self) -> np.ndarray:
        """Young equality start φ'(x, |∇ᵃu|) sign ∇ᵃu, averaged to nodes."""
        centres = self.grid.centers
        target = self.phi.derivative(centres, np.abs(self.g)) * np.sign(self.g)
        target = np.where(self.g == 0.0, 0.0, target)
        if self.strategy.smoothing > 0:
            v = convolve_restricted(self.grid, target, self.strategy.smoothing, self.grid.nodes)
        else:
            v = np.zeros(self.grid.n + 1)
            v[1:-1] = 0.5 * (target[:-1] + target[1:])
        v = np.clip(v, -self.envelope, self.envelope)
        v[0] = 0.0
        v[-1] = 0.0
        return v

    def run(self) -> Tuple[np.ndarray, int, bool]:
        """Ascend from the warm start; returns nodal values, sweeps, cap flag."""
        v = self.warmStart()
        current = self.objective(v)
        if not np.isfinite(current):
            log.debug("Warm start is inadmissible, restarting from zero")
            v = np.zeros_like(v)
            current = 0.0
        finite = self.envelope[np.isfinite(self.envelope)]
        scale = 0.5 * max(float(np.max(np.abs(v))), float(np.max(finite)) if finite.size else 1.0, 1e-3)
        tol = config.getfloat("numerics", "tol")
        interior = np.arange(1, self.grid.n)
        sweeps = 8 * self.strategy.iters
        lastGain = np.inf
        for sweep in range(sweeps):
            before = current
            for parity in (0, 1):
                k = interior[interior % 2 == parity]
                if k.size == 0:
                    continue
                candidates = v[k, None] + scale * _STEPS[None, :]
                candidates = np.clip(candidates, -self.envelope[k, None], self.envelope[k, None])
                left = self.cellConjugate(k - 1, np.broadcast_to(v[k - 1, None], candidates.shape), candidates)
                right = self.cellConjugate(k, candidates, np.broadcast_to(v[k + 1, None], candidates.shape))
                linear = (0.5 * self.h * (self.g[k - 1] + self.g[k]) + self.nodeJump[k])[:, None]
                with np.errstate(invalid="ignore"):
                    local = linear * candidates - left - right
                local = np.where(np.isnan(local), -np.inf, local)
                choice = np.argmax(local, axis=1)
                v[k] = candidates[np.arange(k.size), choice]
            current = self.objective(v)
            lastGain = current - before
            log.debug(f"Nodal sweep {sweep}: objective {current}, step {scale}")
            scale *= 0.5
        capReached = bool(lastGain > tol * max(1.0, abs(current)))
        if capReached:
            log.warning("Nodal ascent still improving at its sweep cap")
        return v, sweeps, capReached


def _bumpLimits(u: BVFunction, index: int, strategy: StrategyConfig) -> Tuple[float, float]:
    """Admissible half widths of a bump on atom ``index``."""
    lo, hi = u.domain.extent[0]
    x = float(u.atomPositions[index])
    others = np.delete(u.atomPositions, index)
    deltaMax = min(strategy.delta_max, x - lo, hi - x)
    if others.size:
        deltaMax = min(deltaMax, 0.5 * float(np.min(np.abs(others - x))))
    deltaMin = max(strategy.delta_min, 64.0 * np.finfo(float).eps * max(abs(x), 1.0))
    return deltaMin, deltaMax


def _bumpSearch(
    phi: PhiFunction,
    u: BVFunction,
    base: Optional[TestField],
    index: int,
    strategy: StrategyConfig,
) -> Tuple[Optional[TrapezoidBump], float, int]:
    """Best trapezoid on one atom, by coarse grid then Nelder–Mead.

    Candidates are scored by the change of the dual objective they cause on
    top of ``base``, integrated over the bump window only.
    """
    x0 = float(u.atomPositions[index])
    deltaMin, deltaMax = _bumpLimits(u, index, strategy)
    if deltaMax <= deltaMin:
        log.warning(f"No room for a bump on the atom at {x0}")
        return None, 0.0, 0
    nodes = u.domain.nodes
    singular = phi.singularPoints
    baseKnots = base.knots[0] if base is not None else np.empty(0)

    def baseValue(x):
        return base(x) if base is not None else np.zeros_like(x)

    def windowConjugate(field: Callable, a: float, b: float, knots: np.ndarray) -> float:
        inside = baseKnots[(baseKnots > a) & (baseKnots < b)]
        return graded_integral(
            lambda x: phi.conjugate(x, np.abs(field(x))),
            a,
            b,
            np.concatenate([knots, inside]),
            singular,
        )

    def gain(params: Tuple[float, float, float]) -> float:
        height, delta, plateau = params
        try:
            bump = TrapezoidBump(x0, plateau, delta, height)
        except ValueError:
            return -np.inf
        a, b = bump.support
        with_bump = windowConjugate(lambda x: baseValue(x) + bump(x), a, b, bump.knots[0])
        if np.isinf(with_bump):
            return -np.inf
        without = windowConjugate(baseValue, a, b, bump.knots[0]) if base is not None else 0.0
        pairing = float(np.sum(u.gradient * bump.integrate(nodes[:-1], nodes[1:])))
        pairing += float(np.sum(u.atomJumps * bump(u.atomPositions)))
        return pairing - (with_bump - without)

    heights = np.geomspace(strategy.m_min, strategy.m_max, strategy.m_points)
    recession = float(phi.recession(np.asarray(x0)))
    if np.isfinite(recession) and recession > 0:
        heights = np.unique(np.concatenate([heights, [recession * (1.0 - 1e-9)]]))
    deltas = np.geomspace(deltaMin, deltaMax, strategy.delta_points)
    grid = [
        (sign * m, d, 0.5 * d) for sign in (1.0, -1.0) for m in heights for d in deltas
    ]
    scores = parallel_map(gain, grid, strategy.threads or None)
    evaluations = len(grid)
    order = np.argsort(-np.nan_to_num(np.asarray(scores), nan=-np.inf), kind="stable")
    bestIndex, bestScore = best_index(scores)
    best = grid[bestIndex]
    if not np.isfinite(bestScore):
        return None, 0.0, evaluations

    starts = [best]
    top = [int(i) for i in order[:5] if np.isfinite(scores[int(i)]) and int(i) != bestIndex]
    if top:
        rng = np.random.default_rng(strategy.seed)
        starts.append(grid[top[int(rng.integers(len(top)))]])

    logMin, logMax = np.log(deltaMin), np.log(deltaMax)
    for start in starts:
        sign = np.sign(start[0])

        def decode(theta: np.ndarray) -> Tuple[float, float, float]:
            delta = float(np.exp(np.clip(theta[1], logMin, logMax)))
            ratio = 1.0 / (1.0 + np.exp(-theta[2]))
            return sign * float(np.exp(theta[0])), delta, ratio * delta

        def negative(theta: np.ndarray) -> float:
            value = gain(decode(theta))
            return -value if np.isfinite(value) else _PENALTY

        theta0 = np.array([np.log(abs(start[0])), np.log(start[1]), 0.0])
        result = minimize(
            negative,
            theta0,
            method="Nelder-Mead",
            options={"maxiter": strategy.refine_iters, "xatol": 1e-8, "fatol": 1e-12},
        )
        evaluations += int(result.nfev)
        if -result.fun > bestScore:
            bestScore = float(-result.fun)
            best = decode(result.x)
    height, delta, plateau = best
    log.debug(f"Bump on atom at {x0}: M={height}, delta={delta}, gain {bestScore}")
    return TrapezoidBump(x0, plateau, delta, height), bestScore, evaluations


def dual_sup(
    phi: PhiFunction, u: BVFunction, strategy: Optional[StrategyConfig] = None
) -> DualEstimate:
    """Lower estimate of the dual modular ρ_{V,φ}(u).

    Runs the nodal ascent and the per-atom bump search as selected by
    ``strategy.family`` and keeps the best candidate, the zero field
    included. The reported value is the dual objective of the returned field.
    """
    _checkLine(u)
    strategy = strategy or StrategyConfig.fromConfig()
    search = _NodalSearch(phi, u, strategy)
    zero = NodalField(search.grid, np.zeros(search.grid.n + 1))
    candidates: List[TestField] = [zero]
    iterations = 0
    capReached = False
    evaluations = 0
    nodalValues = None

    if strategy.family in ("nodal", "both"):
        nodalValues, iterations, capReached = search.run()
        candidates.append(NodalField(search.grid, nodalValues))

    if strategy.family in ("bump", "both") and u.atoms:
        base: Optional[TestField] = None
        if nodalValues is not None:
            baseValues = nodalValues.copy()
            baseValues[search.nodeJump != 0.0] = 0.0
            base = NodalField(search.grid, baseValues)
            if base.maxAbs == 0.0:
                base = None
        bumps = []
        for index in range(len(u.atoms)):
            bump, gain, count = _bumpSearch(phi, u, base, index, strategy)
            evaluations += count
            if bump is not None and gain > 0:
                bumps.append(bump)
        if bumps:
            candidates.append(CompositeField(([base] if base is not None else []) + bumps))

    values = [dual_objective(phi, u, w) for w in candidates]
    evaluations += len(values) + search.evaluations
    index, value = best_index(values)
    exact = float(modular_exact(phi, u).total)
    log.info(f"Dual modular estimate {value} (closed form {exact})")
    return DualEstimate(
        value,
        candidates[index],
        iterations,
        evaluations,
        capReached,
        exact - value,
    )


def luxemburg(modular: Callable[[float], float], iterations: int = 60) -> float:
    """inf{λ > 0 : modular(λ) ≤ 1} for a modular decreasing in λ.

    The bracket is found by doubling and halving, then bisected. The upper
    end of the final bracket is returned; ∞ if no probed λ is feasible and 0
    if every probed λ is.
    """
    hi = 1.0
    for _ in range(400):
        if modular(hi) <= 1.0:
            break
        hi *= 2.0
    else:
        log.warning("Modular exceeds 1 at every probed scale")
        return np.inf
    lo = hi
    for _ in range(400):
        lo = 0.5 * lo
        if modular(lo) > 1.0:
            break
        hi = lo
    else:
        return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if modular(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def luxemburg_norm(
    phi: PhiFunction,
    g,
    domain: Domain,
    conjugate: bool = False,
    iterations: Optional[int] = None,
) -> float:
    """Luxemburg norm of centre samples, with respect to φ or to φ*.

    The modular is the midpoint sum Σ φ(x_c, |g_c|/λ)·cell measure.
    """
    iterations = iterations or config.getint("duality", "bisect_iters")
    g = np.abs(np.asarray(g, dtype=float))
    if not np.any(g):
        return 0.0
    fn = phi.conjugate if conjugate else phi.evaluate
    x = domain.centers

    def modular(lam: float) -> float:
        return float(np.sum(fn(x, g / lam))) * domain.cellMeasure

    return luxemburg(modular, iterations)


def field_norm(phi: PhiFunction, w: TestField, iterations: int = 60) -> float:
    """‖w‖_{φ*}, the Luxemburg norm of a test field."""
    if w.maxAbs == 0.0:
        return 0.0
    return luxemburg(lambda lam: conjugate_modular(phi, w.scaled(1.0 / lam)), iterations)


def dual_norm_V(
    phi: PhiFunction, u: BVFunction, strategy: Optional[StrategyConfig] = None
) -> DualEstimate:
    """Lower estimate of V_φ(u) = sup{∫ w dDu : ‖w‖_{φ*} ≤ 1}.

    Every candidate is normalized by its Luxemburg norm, so its value is the
    ratio of pairing and norm. Candidates are Young-equality shapes at
    several scales of the gradient, the dual modular optimizer, and blends of
    the AC shape with the atom bumps.
    """
    _checkLine(u)
    strategy = strategy or StrategyConfig.fromConfig()
    if u.values.size and not np.any(u.gradient) and not u.atoms:
        search = _NodalSearch(phi, u, strategy)
        return DualEstimate(0.0, NodalField(search.grid, np.zeros(search.grid.n + 1)))

    search = _NodalSearch(phi, u, strategy)
    shapes: List[TestField] = []
    lamG = luxemburg_norm(phi, u.gradientMagnitude, u.domain, iterations=strategy.bisect_iters)
    acShape: Optional[TestField] = None
    if 0.0 < lamG < np.inf:
        gOriginal = search.g
        for c in (0.25, 0.5, 1.0, 2.0, 4.0):
            search.g = gOriginal / (c * lamG)
            warm = search.warmStart()
            if np.any(warm):
                shape = NodalField(search.grid, warm)
                shapes.append(shape)
                if c == 1.0:
                    acShape = shape
        search.g = gOriginal

    best = dual_sup(phi, u, strategy)
    if best.optimizer.maxAbs > 0:
        shapes.append(best.optimizer)

    if u.atoms and isinstance(best.optimizer, CompositeField):
        bumps = [f for f in best.optimizer.fields if isinstance(f, TrapezoidBump)]
        if bumps:
            bumpField = CompositeField(bumps)
            bumpNorm = field_norm(phi, bumpField, strategy.bisect_iters)
            if acShape is not None and 0 < bumpNorm < np.inf:
                acNorm = field_norm(phi, acShape, strategy.bisect_iters)
                if 0 < acNorm < np.inf:
                    for theta in np.linspace(0.0, 1.0, 11):
                        shapes.append(
                            CompositeField(
                                [acShape.scaled(theta / acNorm), bumpField.scaled((1 - theta) / bumpNorm)]
                            )
                        )
            shapes.append(bumpField)

    def ratio(w: TestField) -> Tuple[float, TestField]:
        norm = field_norm(phi, w, strategy.bisect_iters)
        if not 0 < norm < np.inf:
            return -np.inf, w
        normalized = w.scaled(1.0 / norm)
        return dual_pairing(u, normalized), normalized

    results = parallel_map(ratio, shapes, strategy.threads or None)
    index, value = best_index([r[0] for r in results])
    value = max(value, 0.0)
    log.info(f"Dual norm estimate {value}")
    return DualEstimate(
        value,
        results[index][1] if np.isfinite(results[index][0]) else best.optimizer.scaled(0.0),
        best.iterations,
        best.evaluations + len(shapes),
        best.capReached,
    )


@dataclasses.dataclass
class EquivalenceReport:
    """Measured sides of ‖u‖ ≤ V_φ(u) ≤ 2‖u‖ for the dual modular norm."""

    modular_norm: float
    dual_norm: float
    closed_form_norm: float
    lower_ratio: float
    upper_ratio: float
    slack: float
    holds: bool

    def toDict(self) -> Dict[str, Any]:
        """Serialize report."""
        return encode_value(dataclasses.asdict(self))


def equivalence_check(
    phi: PhiFunction, u: BVFunction, strategy: Optional[StrategyConfig] = None
) -> EquivalenceReport:
    """Compare the Luxemburg norm of the estimated dual modular with V_φ(u).

    The norm bisects on λ where each probe is a coarse dual modular search of
    u/λ. Both sides are one-sided estimates, so the sandwich is confirmed up to
    the relative slack ``est_slack``.
    """
    strategy = strategy or StrategyConfig.fromConfig()
    coarse = strategy.coarse()
    dualNorm = dual_norm_V(phi, u, strategy).value
    if dualNorm == 0.0 and not u.atoms and not np.any(u.gradient):
        return EquivalenceReport(0.0, 0.0, 0.0, 1.0, 1.0, strategy.est_slack, True)

    modularNorm = luxemburg(
        lambda lam: dual_sup(phi, u.scaled(1.0 / lam), coarse).value,
        strategy.equivalence_iters,
    )
    closedForm = modular_luxemburg(phi, u, strategy.equivalence_iters)
    slack = strategy.est_slack
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = modularNorm / dualNorm if dualNorm > 0 else np.inf
        upper = dualNorm / modularNorm if modularNorm > 0 else np.inf
    holds = bool(lower <= 1.0 + slack and upper <= 2.0 * (1.0 + slack))
    if not holds:
        log.warning(f"Equivalence sandwich violated: ratios {lower}, {upper}")
    return EquivalenceReport(modularNorm, dualNorm, closedForm, lower, upper, slack, holds)


def bound_check(
    phi: PhiFunction, w: TestField, domain: Optional[Domain] = None
) -> ConditionReport:
    """Check |w| ≤ φ'_∞ for an admissible test field.

    Fields with ρ_{φ*}(|w|) = ∞ are reported as inadmissible. Otherwise
    |w(x)| ≤ φ'_∞(x)·(1 + tol) is checked at the grid nodes and at the kinks
    of w.
    """
    tol = config.getfloat("numerics", "tol")
    conj = conjugate_modular(phi, w)
    domain = domain or phi.domain
    if np.isinf(conj):
        log.info("Test field is inadmissible: conjugate modular is infinite")
        return ConditionReport(
            "bound", False, Verdict.INADMISSIBLE, None, {"admissible": False}, [], {}
        )
    points = w.breakpoints
    if domain is not None:
        points = np.unique(np.concatenate([points, domain.nodes]))
    values = np.abs(w(points))
    recession = phi.recession(points)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(values > 0, values / recession, 0.0)
    worst = int(np.argmax(ratio))
    holds = bool(np.all(values <= recession * (1.0 + tol)))
    return ConditionReport(
        "bound",
        holds,
        Verdict.HOLDS if holds else Verdict.FAILS,
        float(ratio[worst]),
        {
            "admissible": True,
            "x": float(points[worst]),
            "w": float(values[worst]),
            "recession": float(recession[worst]),
            "conjugate_modular": conj,
        },
        [],
        {"points": int(points.size)},
    )
