"""Operator algebra on product spaces of one or two multilevel atoms.

Basis ordering is site-1-major: for two sites with ``d2`` levels on the
second site, the product state ``|i1 i2>`` sits at index ``i1 * d2 + i2``.
Sites are addressed with 0-based indices (site 0 is atom 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.sparse as sp

MAX_DIM = 10_000

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-9


class SpaceMismatchError(ValueError):
    pass


class LevelError(ValueError):
    pass


class Level(str, Enum):
    G0 = "g0"
    G1 = "g1"
    R = "r"
    P1 = "p1"
    P2 = "p2"
    ALPHA = "alpha"
    A_SHORT = "a_short"

    def __str__(self) -> str:
        return self.value


LevelLike = Union[Level, str]


def as_level(label: LevelLike) -> Level:
    try:
        return Level(label)
    except ValueError:
        raise LevelError(f"unknown level label {label!r}") from None


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered per-site level lists; one or two sites."""

    sites: tuple[tuple[Level, ...], ...]

    def __post_init__(self):
        sites = tuple(tuple(as_level(x) for x in site) for site in self.sites)
        object.__setattr__(self, "sites", sites)
        if not 1 <= len(sites) <= 2:
            raise ValueError("a space holds one or two sites")
        for site in sites:
            if not site:
                raise ValueError("empty site")
            if len(set(site)) != len(site):
                raise ValueError(f"repeated level in site {site}")
            if len(sites) > 1 and Level.A_SHORT in site:
                raise LevelError("a_short is only allowed in single-atom spaces")
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if self.dim > MAX_DIM:
            raise ValueError(f"dimension {self.dim} exceeds {MAX_DIM}")

    @classmethod
    def single(cls, levels: Iterable[LevelLike]) -> "HilbertSpace":
        return cls((tuple(levels),))

    @classmethod
    def pair(cls, levels: Iterable[LevelLike]) -> "HilbertSpace":
        levels = tuple(levels)
        return cls((levels, levels))

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.sites)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def site_space(self, site: int) -> "HilbertSpace":
        return HilbertSpace((self.sites[site],))

    def has_level(self, level: LevelLike, site: int | None = None) -> bool:
        level = as_level(level)
        sites = self.sites if site is None else (self.sites[site],)
        return all(level in s for s in sites)

    def level_index(self, site: int, level: LevelLike) -> int:
        level = as_level(level)
        try:
            return self.sites[site].index(level)
        except ValueError:
            raise LevelError(f"level {level} not present at site {site}") from None

    def index(self, labels: Sequence[LevelLike]) -> int:
        if isinstance(labels, (str, Level)):
            labels = (labels,)
        if len(labels) != self.n_sites:
            raise LevelError(f"expected {self.n_sites} labels, got {len(labels)}")
        idx = 0
        for site, lab in enumerate(labels):
            idx = idx * self.dims[site] + self.level_index(site, lab)
        return idx

    def labels(self, index: int) -> tuple[Level, ...]:
        if not 0 <= index < self.dim:
            raise IndexError(index)
        out = []
        for site in reversed(range(self.n_sites)):
            index, i = divmod(index, self.dims[site])
            out.append(self.sites[site][i])
        return tuple(reversed(out))

    def basis(self, *labels: LevelLike) -> "StateVector":
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(labels)] = 1.0
        return StateVector(self, v)

    def superpose(self, terms: dict[tuple, complex]) -> "StateVector":
        """Normalized superposition of labelled basis states."""
        v = np.zeros(self.dim, dtype=complex)
        for labels, amp in terms.items():
            v[self.index(labels)] += amp
        n = np.linalg.norm(v)
        if n == 0:
            raise ValueError("zero vector")
        return StateVector(self, v / n)


def _frozen(a):
    if sp.issparse(a):
        return a
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Operator:
    space: HilbertSpace
    matrix: np.ndarray | sp.spmatrix

    def __post_init__(self):
        m = self.matrix
        if sp.issparse(m):
            m = sp.csr_matrix(m, dtype=complex)
            m.eliminate_zeros()
        object.__setattr__(self, "matrix", _frozen(m))
        if self.matrix.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError(
                f"matrix shape {self.matrix.shape} does not match dim {self.space.dim}")

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    @property
    def storage(self) -> str:
        return "sparse" if self.is_sparse else "dense"

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.array(self.matrix)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def _check(self, other: "Operator"):
        if other.space != self.space:
            raise SpaceMismatchError("operators live on different spaces")

    def __add__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check(other)
        return Operator(self.space, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return self * -1

    def __matmul__(self, other):
        if isinstance(other, Operator):
            self._check(other)
            return Operator(self.space, self.matrix @ other.matrix)
        if isinstance(other, StateVector):
            if other.space != self.space:
                raise SpaceMismatchError("state and operator live on different spaces")
            return self.matrix @ other.vector
        return NotImplemented

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        d = self.matrix - self.matrix.conj().T
        d = abs(d).max() if sp.issparse(d) else np.abs(d).max(initial=0.0)
        return bool(d <= tol)


@dataclass(frozen=True, eq=False)
class StateVector:
    space: HilbertSpace
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if v.shape != (self.space.dim,):
            raise SpaceMismatchError(f"vector length {v.size} != dim {self.space.dim}")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm {np.linalg.norm(v):.12g})")
        object.__setattr__(self, "vector", _frozen(v))

    def dm(self) -> "DensityMatrix":
        return DensityMatrix(self.space, np.outer(self.vector, self.vector.conj()))

    def projector(self) -> Operator:
        return Operator(self.space, np.outer(self.vector, self.vector.conj()))

    def overlap(self, other: "StateVector") -> complex:
        if other.space != self.space:
            raise SpaceMismatchError("states live on different spaces")
        return complex(np.vdot(self.vector, other.vector))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise SpaceMismatchError(f"shape {m.shape} does not match dim {self.space.dim}")
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {np.trace(m).real:.12g} != 1")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def mixture(cls, states: Sequence[StateVector], weights: Sequence[float] | None = None):
        if not states:
            raise ValueError("empty mixture")
        space = states[0].space
        if weights is None:
            weights = [1.0 / len(states)] * len(states)
        m = sum(w * np.outer(s.vector, s.vector.conj()) for s, w in zip(states, weights))
        return cls(space, m)


def identity(space: HilbertSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def tensor_product(a: Operator, b: Operator) -> Operator:
    """Kronecker product, site-1-major: ``a`` acts on the leading site."""
    sites = a.space.sites + b.space.sites
    dim = a.space.dim * b.space.dim
    if dim > MAX_DIM:
        raise ValueError(f"product dimension {dim} exceeds {MAX_DIM}")
    space = HilbertSpace(sites)
    if a.is_sparse or b.is_sparse:
        m = sp.kron(a.matrix, b.matrix, format="csr")
    else:
        m = np.kron(a.matrix, b.matrix)
    return Operator(space, m)


def _embed(space: HilbertSpace, site: int, local: np.ndarray) -> np.ndarray:
    if space.n_sites == 1:
        return local
    eyes = [np.eye(d) for d in space.dims]
    eyes[site] = local
    return np.kron(eyes[0], eyes[1])


def transition_operator(space: HilbertSpace, site: int, from_: LevelLike,
                        to: LevelLike) -> Operator:
    """``|to><from|`` on ``site``, identity on the other site."""
    if not 0 <= site < space.n_sites:
        raise IndexError(f"site {site} out of range")
    d = space.dims[site]
    local = np.zeros((d, d))
    local[space.level_index(site, to), space.level_index(site, from_)] = 1.0
    return Operator(space, _embed(space, site, local))


def projector(space: HilbertSpace, site: int, level: LevelLike) -> Operator:
    return transition_operator(space, site, level, level)


def ketbra(space: HilbertSpace, ket: Sequence[LevelLike], bra: Sequence[LevelLike]) -> Operator:
    """Matrix unit between two labelled product basis states."""
    m = np.zeros((space.dim, space.dim))
    m[space.index(ket), space.index(bra)] = 1.0
    return Operator(space, m)


def outer(a: StateVector, b: StateVector) -> Operator:
    if a.space != b.space:
        raise SpaceMismatchError("states live on different spaces")
    return Operator(a.space, np.outer(a.vector, b.vector.conj()))


def expectation(rho: DensityMatrix, op: Operator) -> complex:
    """Tr(rho O)."""
    if rho.space != op.space:
        raise SpaceMismatchError("density matrix and operator live on different spaces")
    m = op.matrix
    if sp.issparse(m):
        return complex((m.multiply(rho.matrix.T)).sum())
    return complex(np.einsum("ij,ji->", rho.matrix, m))
