"""Decomposed BV functions: absolutely continuous gradient plus atoms."""

import dataclasses
import logging
from typing import Any, Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from phibv.data_model.domain import Domain
from phibv.errors import DomainError, ShapeError

log = logging.getLogger("phibv")


@dataclasses.dataclass(frozen=True)
class Atom:
    """Point mass of the singular part.

    In 1D ``key`` is the interior node index. In 2D it is ``(axis, i, j)``: the
    edge between cell ``(i, j)`` and its successor along ``axis``. ``position``
    is the node or the edge midpoint, ``measure`` the edge length (1 in 1D).
    """

    key: Any
    position: Any
    jump: float
    measure: float = 1.0

    @property
    def mass(self) -> float:
        """|s|·measure."""
        return abs(self.jump) * self.measure

    def withJump(self, jump: float) -> "Atom":
        """Copy with another jump."""
        return dataclasses.replace(self, jump=float(jump))


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _centreGradient(edgeDiff: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Centre values of edge difference quotients, one-sided at the border."""
    e = np.moveaxis(edgeDiff, axis, 0) / h
    g = np.empty((e.shape[0] + 1,) + e.shape[1:])
    g[0] = e[0]
    g[-1] = e[-1]
    g[1:-1] = 0.5 * (e[:-1] + e[1:])
    return np.moveaxis(g, 0, axis)


class BVFunction:
    """Grid samples of u with the realized split Du = ∇ᵃu dx + Σ sᵢ δ_{xᵢ}.

    Parameters
    ----------
    domain : Domain
        1D or 2D grid.
    values : np.ndarray
        Samples of u at the cell centres.
    gradient : np.ndarray
        ∇ᵃu at the cell centres, shape ``(n,)`` in 1D and ``(2, ny, nx)`` in 2D.
    atoms : Sequence[Atom]
        Singular part, pairwise distinct keys.
    """

    def __init__(
        self,
        domain: Domain,
        values: np.ndarray,
        gradient: np.ndarray,
        atoms: Sequence[Atom] = (),
    ):
        values = _frozen(values)
        gradient = _frozen(gradient)
        gradientShape = domain.shape if domain.dimension == 1 else (2,) + domain.shape
        if values.shape != domain.shape or gradient.shape != gradientShape:
            log.error(f"BV samples {values.shape}/{gradient.shape} on grid {domain.shape}")
            raise ShapeError(
                f"Values {values.shape} and gradient {gradient.shape} do not match grid {domain.shape}."
            )
        keys = [atom.key for atom in atoms]
        if len(set(keys)) != len(keys):
            log.error("Duplicate atom locations")
            raise DomainError("Atom locations must be pairwise distinct.")
        self._domain = domain
        self._values = values
        self._gradient = gradient
        self._atoms: Tuple[Atom, ...] = tuple(atoms)

    @property
    def domain(self) -> Domain:
        """Grid of the samples."""
        return self._domain

    @property
    def values(self) -> np.ndarray:
        """Samples of u at the cell centres."""
        return self._values

    @property
    def gradient(self) -> np.ndarray:
        """∇ᵃu at the cell centres."""
        return self._gradient

    @property
    def gradientMagnitude(self) -> np.ndarray:
        """|∇ᵃu| at the cell centres."""
        if self._domain.dimension == 1:
            return np.abs(self._gradient)
        return np.sqrt(np.sum(self._gradient * self._gradient, axis=0))

    @property
    def atoms(self) -> Tuple[Atom, ...]:
        """Atoms of the singular part."""
        return self._atoms

    @property
    def atomPositions(self) -> np.ndarray:
        """Positions, shape ``(m,)`` in 1D and ``(m, 2)`` in 2D."""
        if self._domain.dimension == 1:
            return np.array([a.position for a in self._atoms], dtype=float)
        return np.array([a.position for a in self._atoms], dtype=float).reshape(-1, 2)

    @property
    def atomJumps(self) -> np.ndarray:
        """Signed jumps."""
        return np.array([a.jump for a in self._atoms], dtype=float)

    @property
    def atomMeasures(self) -> np.ndarray:
        """Node weight (1) or edge length per atom."""
        return np.array([a.measure for a in self._atoms], dtype=float)

    @staticmethod
    def makeAtoms(domain: Domain, atoms: Iterable) -> List[Atom]:
        """Snap atom descriptions to the grid.

        1D atoms are ``(x, jump)`` pairs and must sit on interior nodes. 2D
        atoms are ``(axis, i, j, jump)`` edge descriptions.

        Raises
        ------
        DomainError
            Atom off the grid, outside the domain or duplicated.
        """
        out: List[Atom] = []
        for atom in atoms:
            if isinstance(atom, Atom):
                out.append(atom)
            elif domain.dimension == 1:
                x, jump = atom
                k = domain.snapNode(x)
                out.append(Atom(k, float(domain.nodes[k]), float(jump)))
            else:
                axis, i, j, jump = atom
                out.append(_edgeAtom(domain, int(axis), int(i), int(j), float(jump)))
        return out

    @classmethod
    def fromSamples(
        cls, domain: Domain, values, atoms: Iterable = ()
    ) -> "BVFunction":
        """Build from centre samples and the jumps they contain.

        The AC gradient is the difference quotient of the samples with the atom
        jumps removed from the differences across their nodes or edges.
        """
        values = np.asarray(values, dtype=float)
        if values.shape != domain.shape:
            log.error(f"Samples of shape {values.shape} on grid {domain.shape}")
            raise ShapeError(f"Samples have shape {values.shape}, grid is {domain.shape}.")
        atomList = cls.makeAtoms(domain, atoms)
        if domain.dimension == 1:
            diff = np.diff(values)
            for atom in atomList:
                diff[atom.key - 1] -= atom.jump
            gradient = _centreGradient(diff, domain.spacing[0], 0)
        else:
            components = []
            for axis in range(2):
                diff = np.diff(values, axis=axis)
                for atom in atomList:
                    if atom.key[0] == axis:
                        diff[atom.key[1], atom.key[2]] -= atom.jump
                components.append(_centreGradient(diff, domain.spacing[axis], axis))
            gradient = np.stack(components)
        return cls(domain, values, gradient, atomList)

    @classmethod
    def fromCallable(
        cls,
        domain: Domain,
        u: Callable[[np.ndarray], np.ndarray],
        du: Callable[[np.ndarray], np.ndarray],
        atoms: Iterable = (),
    ) -> "BVFunction":
        """Build from u and its AC derivative evaluated at the cell centres (1D)."""
        if domain.dimension != 1:
            raise DomainError("Callable BV functions are one-dimensional.")
        x = domain.centers
        values = np.broadcast_to(np.asarray(u(x), dtype=float), x.shape)
        gradient = np.broadcast_to(np.asarray(du(x), dtype=float), x.shape)
        return cls(domain, values, gradient, cls.makeAtoms(domain, atoms))

    @classmethod
    def heaviside(cls, domain: Domain, x0: float = 0.0, height: float = 1.0) -> "BVFunction":
        """Step of ``height`` at the node ``x0``."""
        return cls.fromCallable(
            domain,
            lambda x: height * (x > x0),
            lambda x: np.zeros_like(x),
            [(x0, height)],
        )

    def scaled(self, lam: float) -> "BVFunction":
        """Return λu."""
        return BVFunction(
            self._domain,
            lam * self._values,
            lam * self._gradient,
            [a.withJump(lam * a.jump) for a in self._atoms],
        )

    def linearCombination(self, other: "BVFunction", a: float, b: float) -> "BVFunction":
        """Return a·self + b·other, merging atoms at equal locations."""
        if other.domain != self._domain:
            raise ShapeError("BV functions live on different grids.")
        merged: Dict[Any, Atom] = {}
        for atom, factor in [(x, a) for x in self._atoms] + [(x, b) for x in other.atoms]:
            if atom.key in merged:
                merged[atom.key] = merged[atom.key].withJump(
                    merged[atom.key].jump + factor * atom.jump
                )
            else:
                merged[atom.key] = atom.withJump(factor * atom.jump)
        return BVFunction(
            self._domain,
            a * self._values + b * other.values,
            a * self._gradient + b * other.gradient,
            [atom for atom in merged.values() if atom.jump != 0.0],
        )

    def withoutAtom(self, index: int) -> "BVFunction":
        """Drop one atom from the singular part, AC part unchanged."""
        atoms = list(self._atoms)
        atoms.pop(index)
        return BVFunction(self._domain, self._values, self._gradient, atoms)

    def toDict(self) -> Dict[str, Any]:
        """Serialize samples and atoms."""
        return {
            "domain": self._domain.toDict(),
            "values": self._values.tolist(),
            "atoms": [
                {"x": np.asarray(a.position).tolist(), "jump": a.jump, "key": a.key}
                for a in self._atoms
            ],
        }


def _edgeAtom(domain: Domain, axis: int, i: int, j: int, jump: float) -> Atom:
    ny, nx = domain.shape
    (ylo, _), (xlo, _) = domain.extent
    hy, hx = domain.spacing
    if axis == 0 and 0 <= i < ny - 1 and 0 <= j < nx:
        return Atom((0, i, j), (ylo + (i + 1) * hy, xlo + (j + 0.5) * hx), jump, hx)
    if axis == 1 and 0 <= i < ny and 0 <= j < nx - 1:
        return Atom((1, i, j), (ylo + (i + 0.5) * hy, xlo + (j + 1) * hx), jump, hy)
    log.error(f"Edge ({axis}, {i}, {j}) is not an interior grid edge")
    raise DomainError(f"Edge ({axis}, {i}, {j}) is not an interior grid edge.")


def atomize(domain: Domain, samples, threshold: float) -> BVFunction:
    """Split samples into an AC part and atoms.

    Consecutive differences larger than ``threshold`` in absolute value become
    atoms carrying the full difference, on the separating node (1D) or edge
    (2D).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.shape != domain.shape:
        raise ShapeError(f"Samples have shape {samples.shape}, grid is {domain.shape}.")
    atoms: List[Any] = []
    if domain.dimension == 1:
        diff = np.diff(samples)
        for k in np.flatnonzero(np.abs(diff) > threshold):
            atoms.append((domain.nodes[k + 1], diff[k]))
    else:
        for axis in range(2):
            diff = np.diff(samples, axis=axis)
            for i, j in zip(*np.nonzero(np.abs(diff) > threshold)):
                atoms.append((axis, int(i), int(j), float(diff[i, j])))
    log.debug(f"Atomized {len(atoms)} jumps above {threshold}")
    return BVFunction.fromSamples(domain, samples, atoms)
