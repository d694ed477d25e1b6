"""Regularized energies F_p, their minimization and the Γ-convergence harness.

F_p(u) = ∫ φ(x, |∇u|)^p + |u − f|² dx is discretized with forward
differences on the grid edges and approximated for p → 1⁺ by warm-started
minimizations, whose limit is compared with the closed-form modular.
"""

import dataclasses
import logging
from configparser import ConfigParser
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from phibv.configuration import config
from phibv.data_model.bv import BVFunction, atomize
from phibv.data_model.domain import Domain
from phibv.data_model.extreal import ext_product
from phibv.data_model.report import ModularReport, encode_value
from phibv.errors import DomainError, ShapeError
from phibv.families.base import PhiFunction
from phibv.modular import modular_exact, modular_fidelity
from phibv.mollifier import cell_weights, eta_delta
from phibv.quadrature import graded_integral

log = logging.getLogger("phibv")

_ARMIJO = 1e-4
_MAX_HALVINGS = 60
_MAX_SWEEP_K = 12
_MAX_IMAGE_SIDE = 128
NOT_IN_BV_PHI = "limit not in BV^φ"
BELOW_LOWER_BOUND = "energy below atomized modular"


@dataclasses.dataclass(frozen=True)
class SolverOptions:
    """Solver settings, see the ``[solver]`` config section."""

    max_iter: int = 100000
    energy_tol: float = 1e-9
    window: int = 50
    eps_scale: float = 1e-6
    jump_factor: float = 5.0
    jump_floor: float = 0.05
    rof_tol: float = 1e-10
    rof_max_iter: int = 200000

    @classmethod
    def fromConfig(cls, conf: Optional[ConfigParser] = None) -> "SolverOptions":
        """Read the ``[solver]`` section."""
        conf = conf if conf is not None else config
        kwargs = {}
        for field in dataclasses.fields(cls):
            getter = conf.getint if field.type in (int, "int") else conf.getfloat
            kwargs[field.name] = getter("solver", field.name)
        return cls(**kwargs)


def _differenceOperator(domain: Domain) -> Tuple[sparse.csr_matrix, np.ndarray, np.ndarray]:
    """Forward difference matrix, the edge points where differences live and their spacing.

    1D differences sit on the interior nodes; 2D stacks the differences along
    y (rows of horizontal edges) on top of those along x.
    """
    if domain.dimension == 1:
        n = domain.n
        diff = sparse.diags([-1.0, 1.0], [0, 1], shape=(n - 1, n)) / domain.h
        return diff.tocsr(), domain.nodes[1:-1], np.full(n - 1, domain.h)
    ny, nx = domain.shape
    hy, hx = domain.spacing
    diffY = sparse.kron(sparse.diags([-1.0, 1.0], [0, 1], shape=(ny - 1, ny)), sparse.identity(nx))
    diffX = sparse.kron(sparse.identity(ny), sparse.diags([-1.0, 1.0], [0, 1], shape=(nx - 1, nx)))
    yEdge, xCentre = np.meshgrid(domain.axisNodes(0)[1:-1], domain.axisCenters(1), indexing="ij")
    yCentre, xEdge = np.meshgrid(domain.axisCenters(0), domain.axisNodes(1)[1:-1], indexing="ij")
    points = np.concatenate(
        [
            np.stack([yEdge.ravel(), xCentre.ravel()], axis=-1),
            np.stack([yCentre.ravel(), xEdge.ravel()], axis=-1),
        ]
    )
    spacing = np.concatenate([np.full(diffY.shape[0], hy), np.full(diffX.shape[0], hx)])
    return sparse.vstack([diffY / hy, diffX / hx]).tocsr(), points, spacing


def _smoothAbs(g: np.ndarray, epsilon: float) -> np.ndarray:
    """|g|_ε = sqrt(g² + ε²) − ε, zero at zero."""
    return np.sqrt(g * g + epsilon * epsilon) - epsilon


def _power(values: np.ndarray, p: float) -> np.ndarray:
    """values^p as exp(p·log values) with 0^p = 0."""
    positive = values > 0
    with np.errstate(over="ignore"):
        return np.where(positive, np.exp(p * np.log(np.where(positive, values, 1.0))), 0.0)


@dataclasses.dataclass
class EnergySpec:
    """Discrete F_p on the grid of the fidelity target ``f``.

    ``epsilon`` defaults to ``eps_scale``·range(f)/h.
    """

    phi: PhiFunction
    p: float
    f: np.ndarray
    domain: Domain
    epsilon: Optional[float] = None
    options: SolverOptions = dataclasses.field(default_factory=SolverOptions.fromConfig)

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        if self.f.shape != self.domain.shape:
            log.error(f"Fidelity target of shape {self.f.shape} on grid {self.domain.shape}")
            raise ShapeError(f"Target has shape {self.f.shape}, grid is {self.domain.shape}.")
        if not self.p >= 1.0:
            log.error(f"Invalid energy exponent {self.p}")
            raise ValueError(f"Energy exponent must be at least 1, got {self.p}.")
        if self.epsilon is None:
            spread = float(np.ptp(self.f)) if self.f.size else 0.0
            self.epsilon = self.options.eps_scale * (spread or 1.0) / self.domain.h
        if self.epsilon < 0:
            raise ValueError(f"Smoothing must be non negative, got {self.epsilon}.")
        self.difference, self.edgePoints, self.edgeSpacing = _differenceOperator(self.domain)

    def withP(self, p: float) -> "EnergySpec":
        """Same energy at another exponent."""
        return dataclasses.replace(self, p=p)


def energy_Fp(spec: EnergySpec, u) -> float:
    """Σ_edges φ(x_e, |∇u|_ε)^p·cell measure + Σ_cells (u − f)²·cell measure.

    Raises
    ------
    ShapeError
        ``u`` is not on the grid of ``spec``.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != spec.domain.shape:
        log.error(f"Iterate of shape {u.shape} on grid {spec.domain.shape}")
        raise ShapeError(f"Iterate has shape {u.shape}, grid is {spec.domain.shape}.")
    g = spec.difference @ u.ravel()
    phiValues = spec.phi.evaluate(spec.edgePoints, _smoothAbs(g, spec.epsilon))
    measure = spec.domain.cellMeasure
    return (
        float(np.sum(_power(phiValues, spec.p))) * measure
        + float(np.sum((u - spec.f) ** 2)) * measure
    )


def energy_lower_bound(spec: EnergySpec, u, threshold: float) -> float:
    """ρ^f of the atomized ``u`` on the edges of F_p.

    Edge differences above ``threshold`` are atoms weighted with φ'_∞ at the
    edge, the others form the AC part. Both use the smoothed |·|_ε of
    :func:`energy_Fp`, so ``energy_Fp(spec, u) ≥ bound − (p − 1)·edge measure``
    whenever the discrete jumps satisfy φ(x, |s|/h)·h ≥ φ'_∞(x)·|s|, as for
    linear recession.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != spec.domain.shape:
        raise ShapeError(f"Iterate has shape {u.shape}, grid is {spec.domain.shape}.")
    g = spec.difference @ u.ravel()
    magnitude = _smoothAbs(g, spec.epsilon)
    atomic = np.abs(g) * spec.edgeSpacing > threshold
    measure = spec.domain.cellMeasure
    acPart = float(np.sum(spec.phi.evaluate(spec.edgePoints[~atomic], magnitude[~atomic]))) * measure
    singular = 0.0
    if np.any(atomic):
        weights = np.asarray(spec.phi.recession(spec.edgePoints[atomic]), dtype=float)
        singular = float(np.sum(ext_product(weights, magnitude[atomic] * measure)))
    return acPart + singular + float(np.sum((u - spec.f) ** 2)) * measure


def young_slack(spec: EnergySpec) -> float:
    """(p − 1)·edge measure, from φ^p ≥ φ − (p − 1) for φ ≥ 0."""
    return (spec.p - 1.0) * spec.edgeSpacing.size * spec.domain.cellMeasure


def _derivatives(spec: EnergySpec, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Energy gradient and the lagged diffusivities of the edge terms."""
    g = spec.difference @ u
    root = np.sqrt(g * g + spec.epsilon * spec.epsilon)
    magnitude = root - spec.epsilon
    phiValues = spec.phi.evaluate(spec.edgePoints, magnitude)
    slope = spec.p * _power(phiValues, spec.p - 1.0) * spec.phi.derivative(spec.edgePoints, magnitude)
    with np.errstate(divide="ignore", invalid="ignore"):
        weights = np.where(root > 0, slope / root, 0.0)
    measure = spec.domain.cellMeasure
    gradient = measure * (spec.difference.T @ (weights * g)) + 2.0 * measure * (u - spec.f.ravel())
    return gradient, weights


@dataclasses.dataclass
class MinimizeResult:
    """Minimizer of F_p with its accepted-step energy trace."""

    u: np.ndarray
    energy: float
    trace: List[float]
    iterations: int
    capReached: bool


def minimize_Fp(spec: EnergySpec, u0=None) -> MinimizeResult:
    """Minimize F_p by preconditioned descent with Armijo backtracking.

    The direction solves (DᵀWD + 2I)·d = −∇F_p with W the lagged
    diffusivities, both scaled by the cell measure. Iteration stops when the
    energy decreased by less than ``energy_tol`` (relative) over the last
    ``window`` steps, or at ``max_iter``; the cap is flagged, not raised.

    Raises
    ------
    ValueError
        p ≤ 1.
    """
    if not spec.p > 1.0:
        log.error(f"Minimization needs p > 1, got {spec.p}")
        raise ValueError(f"Minimization needs p > 1, got {spec.p}.")
    options = spec.options
    shape = spec.domain.shape
    u = np.array(spec.f if u0 is None else u0, dtype=float)
    if u.shape != shape:
        raise ShapeError(f"Start has shape {u.shape}, grid is {shape}.")
    u = u.ravel()
    measure = spec.domain.cellMeasure
    identity = sparse.identity(u.size, format="csr")
    energy = energy_Fp(spec, u.reshape(shape))
    trace = [energy]
    converged = False
    iterations = 0
    while iterations < options.max_iter:
        iterations += 1
        gradient, weights = _derivatives(spec, u)
        system = measure * (spec.difference.T @ sparse.diags(weights) @ spec.difference) + 2.0 * measure * identity
        direction = -spsolve(system.tocsc(), gradient)
        slope = float(gradient @ direction)
        if not slope < 0.0:
            converged = True
            break
        step = 1.0
        for _ in range(_MAX_HALVINGS):
            trial = u + step * direction
            trialEnergy = energy_Fp(spec, trial.reshape(shape))
            if trialEnergy <= energy + _ARMIJO * step * slope:
                break
            step *= 0.5
        else:
            log.debug("Line search stalled, iterate is stationary to machine precision")
            converged = True
            break
        u = trial
        energy = trialEnergy
        trace.append(energy)
        if len(trace) > options.window:
            decrease = trace[-options.window - 1] - energy
            if decrease <= options.energy_tol * max(abs(energy), np.finfo(float).tiny):
                converged = True
                break
        if iterations % 1000 == 0:
            log.debug(f"F_p iteration {iterations}: energy {energy}")
    if not converged:
        log.warning(f"F_p minimization reached its cap of {options.max_iter} iterations")
    log.info(f"F_p with p={spec.p}: energy {energy} after {iterations} iterations")
    return MinimizeResult(u.reshape(shape), energy, trace, iterations, not converged)


def _transposeDiff(q: np.ndarray) -> np.ndarray:
    out = np.zeros(q.size + 1)
    out[:-1] -= q
    out[1:] += q
    return out


def rof_reference(
    f,
    domain: Optional[Domain] = None,
    tol: Optional[float] = None,
    maxIter: Optional[int] = None,
) -> np.ndarray:
    """Discrete ROF minimizer of Σ|u_{i+1} − u_i| + h·Σ(u_i − f_i)².

    Solved as ½‖u − f‖² + λ‖Du‖₁ with λ = 1/(2h) by accelerated projected
    gradient on the dual variable p ∈ [−1, 1]^{n−1}, where u = f − λDᵀp.
    ``domain`` defaults to n cells over the ``[domain]`` extent.
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 1:
        log.error(f"ROF reference needs a 1D signal, got shape {f.shape}")
        raise DomainError("The ROF reference is one-dimensional.")
    if domain is None:
        domain = Domain.interval(
            config.getfloat("domain", "extent_lo"), config.getfloat("domain", "extent_hi"), f.size
        )
    if domain.shape != f.shape:
        raise ShapeError(f"Signal has shape {f.shape}, grid is {domain.shape}.")
    options = SolverOptions.fromConfig()
    tol = tol or options.rof_tol
    maxIter = maxIter or options.rof_max_iter
    lam = 1.0 / (2.0 * domain.h)
    dual = np.zeros(f.size - 1)
    momentum = dual.copy()
    t = 1.0
    u = f.copy()
    for iteration in range(maxIter):
        uMomentum = f - lam * _transposeDiff(momentum)
        dualNew = np.clip(momentum + np.diff(uMomentum) / (4.0 * lam), -1.0, 1.0)
        tNew = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        momentum = dualNew + (t - 1.0) / tNew * (dualNew - dual)
        dual, t = dualNew, tNew
        uNew = f - lam * _transposeDiff(dual)
        change = float(np.max(np.abs(uNew - u))) if u.size else 0.0
        u = uNew
        if change < tol:
            log.debug(f"ROF reference converged after {iteration + 1} iterations")
            break
    else:
        log.warning(f"ROF reference reached its cap of {maxIter} iterations")
    return u


def rof_energy(u, f, domain: Domain) -> float:
    """Σ|u_{i+1} − u_i| + h·Σ(u_i − f_i)²."""
    u = np.asarray(u, dtype=float)
    f = np.asarray(f, dtype=float)
    return float(np.sum(np.abs(np.diff(u)))) + domain.h * float(np.sum((u - f) ** 2))


def jump_threshold(u, f, options: Optional[SolverOptions] = None) -> float:
    """θ = max(jump_factor·median|Δu|, jump_floor·range(f))."""
    options = options or SolverOptions.fromConfig()
    u = np.asarray(u, dtype=float)
    diffs = np.concatenate([np.abs(np.diff(u, axis=axis)).ravel() for axis in range(u.ndim)])
    median = float(np.median(diffs)) if diffs.size else 0.0
    return max(options.jump_factor * median, options.jump_floor * float(np.ptp(f)))


@dataclasses.dataclass
class SweepResult:
    """Minimizers of F_{p_k} for p_k = 1 + 2^{-k} and their limit candidate."""

    schedule: np.ndarray
    energies: List[float]
    iterations: List[int]
    minimizers: List[np.ndarray]
    lowerBounds: List[float]
    threshold: float
    limit: BVFunction
    limitModular: ModularReport
    gap: float
    relativeGap: float
    sensitivity: Dict[str, float]
    flags: List[str]

    def toDict(self) -> Dict[str, Any]:
        """Report body of a sweep."""
        return encode_value(
            {
                "schedule": self.schedule,
                "energies": self.energies,
                "iterations": self.iterations,
                "lower_bounds": self.lowerBounds,
                "threshold": self.threshold,
                "gap": self.gap,
                "relative_gap": self.relativeGap,
                "limit_modular": self.limitModular.toDict(),
                "jump_atoms": [
                    {"x": np.asarray(a.position).tolist(), "jump": a.jump, "key": a.key}
                    for a in self.limit.atoms
                ],
                "sensitivity": self.sensitivity,
                "flags": self.flags,
            }
        )


def gamma_sweep(
    phi: PhiFunction,
    f,
    domain: Domain,
    kmax: int = 8,
    options: Optional[SolverOptions] = None,
) -> SweepResult:
    """Minimize F_{p_k}, p_k = 1 + 2^{-k} for k = 1..kmax, warm started.

    Every E_k must stay above :func:`energy_lower_bound` of its iterate up to
    :func:`young_slack` and ``[numerics] tol``, otherwise the sweep is flagged.
    The last minimizer is atomized with :func:`jump_threshold` and its
    closed-form modular with fidelity ρ^f is compared with the last energy.
    An infinite ρ^f is flagged as a limit outside BV^φ.
    """
    if not 1 <= kmax <= _MAX_SWEEP_K:
        log.error(f"Invalid sweep length {kmax}")
        raise ValueError(f"Sweep length must be in [1, {_MAX_SWEEP_K}], got {kmax}.")
    if domain.dimension == 2 and max(domain.shape) > _MAX_IMAGE_SIDE:
        log.error(f"Image of shape {domain.shape} too large for a sweep")
        raise ShapeError(f"Sweeps support images up to {_MAX_IMAGE_SIDE}x{_MAX_IMAGE_SIDE}.")
    options = options or SolverOptions.fromConfig()
    tol = config.getfloat("numerics", "tol")
    f = np.asarray(f, dtype=float)
    schedule = 1.0 + np.power(2.0, -np.arange(1, kmax + 1, dtype=float))
    spec = EnergySpec(phi, float(schedule[0]), f, domain, options=options)
    u = f
    energies: List[float] = []
    iterations: List[int] = []
    minimizers: List[np.ndarray] = []
    lowerBounds: List[float] = []
    flags: List[str] = []
    for k, p in enumerate(schedule, start=1):
        current = spec.withP(float(p))
        result = minimize_Fp(current, u)
        u = result.u
        energies.append(result.energy)
        iterations.append(result.iterations)
        minimizers.append(u)
        if result.capReached and "iteration cap reached" not in flags:
            flags.append("iteration cap reached")
        bound = energy_lower_bound(current, u, jump_threshold(u, f, options))
        lowerBounds.append(bound)
        slack = young_slack(current) + tol * max(1.0, abs(bound))
        if np.isfinite(bound) and result.energy + slack < bound and BELOW_LOWER_BOUND not in flags:
            log.warning(f"Sweep energy {result.energy} at p={p} is below the atomized modular {bound}")
            flags.append(BELOW_LOWER_BOUND)
        log.debug(f"Sweep k={k}: p={p}, energy {result.energy}, atomized modular {bound}")

    if any(b > a * (1.0 + 1e-9) + 1e-12 for a, b in zip(energies, energies[1:])):
        log.warning("Sweep energies increase along the schedule")
        flags.append("energies increasing")

    threshold = jump_threshold(u, f, options)
    limit = atomize(domain, u, threshold)
    limitModular = modular_fidelity(phi, limit, f)
    target = float(limitModular.total)
    sensitivity = {
        "double": float(modular_fidelity(phi, atomize(domain, u, 2.0 * threshold), f).total),
        "half": float(modular_fidelity(phi, atomize(domain, u, 0.5 * threshold), f).total),
    }
    if np.isinf(target):
        log.warning("Limit candidate has an atom where the recession function is infinite")
        flags.append(NOT_IN_BV_PHI)
        gap, relativeGap = -np.inf, np.inf
    else:
        gap = energies[-1] - target
        relativeGap = abs(gap) / target if target > 0 else (0.0 if gap == 0 else np.inf)
    log.info(f"Sweep finished: E_K={energies[-1]}, limit modular {target}, gap {gap}")
    return SweepResult(
        schedule,
        energies,
        iterations,
        minimizers,
        lowerBounds,
        threshold,
        limit,
        limitModular,
        gap,
        relativeGap,
        sensitivity,
        flags,
    )


@dataclasses.dataclass
class SmoothingTrace:
    """ρ_φ(|∇u_δ|) along a schedule of mollifier widths."""

    deltas: np.ndarray
    values: List[float]
    target: float
    shrunk: bool

    def toDict(self) -> Dict[str, Any]:
        """Report body of an approximation trace."""
        return encode_value(
            {
                "deltas": self.deltas,
                "values": self.values,
                "target": self.target,
                "shrunk": self.shrunk,
            }
        )


def _smoothedModular(phi: PhiFunction, u: BVFunction, delta: float) -> float:
    """∫_Ω φ(x, |(Du ⌊Ω)∗η_δ|) dx."""
    domain = u.domain
    lo, hi = domain.extent[0]
    nodes = domain.nodes
    positions = u.atomPositions
    jumps = u.atomJumps

    def gradient(x: np.ndarray) -> np.ndarray:
        flat = np.ravel(x)
        out = cell_weights(flat, nodes[:-1], nodes[1:], delta) @ u.gradient
        if positions.size:
            out = out + eta_delta(flat[:, None] - positions[None, :], delta) @ jumps
        return out.reshape(np.shape(x))

    offsets = delta * np.linspace(-1.0, 1.0, 17)
    breakpoints = np.concatenate([nodes, (positions[:, None] + offsets[None, :]).ravel()])
    breakpoints = breakpoints[(breakpoints > lo) & (breakpoints < hi)]
    return graded_integral(
        lambda x: phi.evaluate(x, np.abs(gradient(x))), lo, hi, breakpoints, phi.singularPoints
    )


def smooth_approximation(
    phi: PhiFunction, u: BVFunction, deltas: Optional[Sequence[float]] = None
) -> SmoothingTrace:
    """Modular of the mollified gradient for shrinking widths δ.

    The derivative measure of u, restricted to Ω, is convolved with η_δ, so
    the AC part contributes Σ_c ∇ᵃu_c·∫_cell η_δ(x − y) dy and every atom
    sᵢη_δ(x − xᵢ). Widths larger than half the distance of an atom to the
    boundary are shrunk to that value.
    """
    if u.domain.dimension != 1:
        log.error("Smooth approximation needs a 1D BV function")
        raise DomainError("Smooth approximation is one-dimensional.")
    deltas = np.asarray(
        np.geomspace(1e-1, 1e-12, 12) if deltas is None else deltas, dtype=float
    )
    if np.any(deltas <= 0):
        raise ValueError("Mollifier widths must be positive.")
    lo, hi = u.domain.extent[0]
    limit = np.inf
    if u.atoms:
        positions = u.atomPositions
        limit = 0.5 * float(np.min(np.minimum(positions - lo, hi - positions)))
    effective = np.minimum(deltas, limit)
    shrunk = bool(np.any(effective < deltas))
    if shrunk:
        log.warning(f"Mollifier widths above {limit} shrunk to keep atoms away from the boundary")
    values = [_smoothedModular(phi, u, float(delta)) for delta in effective]
    target = float(modular_exact(phi, u).total)
    log.info(f"Smoothed modulars {values[-1] if values else None} (closed form {target})")
    return SmoothingTrace(effective, values, target, shrunk)
