"""Scalar read-outs: populations, fidelities, excitation probability, rate fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import DensityMatrix, HilbertSpace, LevelError, Operator, SpaceMismatchError, StateVector

U_CZ = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def gate_fidelity_unitary(U: np.ndarray, U_target: np.ndarray = U_CZ) -> float:
    """(1/16) |Tr(U^dag U_target)|^2."""
    U = np.asarray(U)
    U_target = np.asarray(U_target)
    if U.shape != (4, 4) or U_target.shape != (4, 4):
        raise ValueError("expects 4x4 matrices")
    return float(abs(np.trace(U.conj().T @ U_target)) ** 2 / 16.0)


def choi_of_unitary(U: np.ndarray) -> np.ndarray:
    """Choi matrix ``|U>><<U|`` with ``|U>> = sum_a |a> (x) U|a>``."""
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    v = np.zeros(d * d, dtype=complex)
    for a in range(d):
        v[a * d:(a + 1) * d] = U[:, a]
    return np.outer(v, v.conj())


def gate_fidelity_process(choi: np.ndarray, U_target: np.ndarray = U_CZ,
                          tol: float = 1e-9) -> float:
    """Tr[chi_ideal chi] / (Tr chi_ideal)^2; equals the unitary formula for unitary maps."""
    choi = np.asarray(choi, dtype=complex)
    if np.abs(choi - choi.conj().T).max() > tol:
        raise ValueError("Choi matrix is not Hermitian")
    ideal = choi_of_unitary(U_target)
    return float(np.real(np.trace(ideal @ choi)) / np.real(np.trace(ideal)) ** 2)


def apply_choi(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Output of the channel encoded by ``choi`` for input ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    blocks = np.asarray(choi).reshape(d, d, d, d)  # a, i, b, j
    return np.einsum("ab,aibj->ij", rho, blocks)


def gate_fidelity_state(choi: np.ndarray, psi_in: np.ndarray | None = None,
                        U_target: np.ndarray = U_CZ) -> float:
    """<phi| E(|psi><psi|) |phi> with ``phi = U_target psi``.

    ``psi_in`` defaults to the uniform superposition of the four basis states.
    """
    if psi_in is None:
        psi_in = np.full(4, 0.5, dtype=complex)
    psi_in = np.asarray(psi_in, dtype=complex)
    out = apply_choi(choi, np.outer(psi_in, psi_in.conj()))
    phi = U_target @ psi_in
    return float(np.real(phi.conj() @ out @ phi))


def _array(x):
    if isinstance(x, (StateVector,)):
        return x.vector
    if isinstance(x, (DensityMatrix, Operator)):
        return x.matrix
    return np.asarray(x)


def population(state, target: StateVector) -> float:
    """<psi|rho|psi> for a density matrix, |<psi|phi>|^2 for a vector."""
    space = getattr(state, "space", None)
    if space is not None and space != target.space:
        raise SpaceMismatchError("state and target live on different spaces")
    x = _array(state)
    v = target.vector
    if x.shape[0] != v.shape[0]:
        raise SpaceMismatchError("state and target have different dimensions")
    if x.ndim == 1:
        return float(abs(np.vdot(v, x)) ** 2)
    return float(np.real(v.conj() @ x @ v))


def _non_rydberg_indices(space: HilbertSpace) -> list[int]:
    keep = ("g0", "g1", "alpha")
    if space.n_sites != 2 or not all(space.has_level(x) for x in ("g0", "g1")):
        raise LevelError("excitation probability needs a two-atom space with g0 and g1")
    return [i for i in range(space.dim) if all(str(l) in keep for l in space.labels(i))]


def non_rydberg_population(rho, space: HilbertSpace) -> float:
    x = _array(rho)
    idx = _non_rydberg_indices(space)
    if x.ndim == 1:
        return float(np.sum(np.abs(x[idx]) ** 2))
    return float(np.real(np.trace(x[np.ix_(idx, idx)])))


def excitation_probability(rho, space: HilbertSpace | None = None) -> float:
    """Population outside the {0, 1, alpha} (x) {0, 1, alpha} block."""
    space = space or getattr(rho, "space", None)
    if space is None:
        raise ValueError("space required for a raw array")
    x = _array(rho)
    total = float(np.real(np.trace(x))) if x.ndim == 2 else float(np.vdot(x, x).real)
    return total - non_rydberg_population(x, space)


class ExponentialFit(NamedTuple):
    rate: float
    amplitude: float
    residual: float


def fit_exponential_rate(t, y, skip_before: float | None = None) -> ExponentialFit:
    """Least-squares slope of ``ln y`` against ``t``; ``rate`` is the decay rate."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if skip_before is not None:
        keep = t >= skip_before
        t, y = t[keep], y[keep]
    if t.size < 8:
        raise ValueError("need at least 8 samples")
    if np.any(y <= 0):
        raise ValueError("samples must be positive")
    slope, intercept = np.polyfit(t, np.log(y), 1)
    resid = np.log(y) - (slope * t + intercept)
    return ExponentialFit(float(-slope), float(np.exp(intercept)), float(np.sqrt(np.mean(resid**2))))


@dataclass(frozen=True, eq=False)
class ObservableSpec:
    """Named scalar read-out evaluated on a raw state vector or density matrix.

    ``kind`` is one of ``population``, ``fidelity`` (alias of population for a
    pure target), ``projector``, ``excitation`` or ``operator``.
    """

    name: str
    kind: str
    target: StateVector | Operator | HilbertSpace

    KINDS = ("population", "fidelity", "projector", "excitation", "operator")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown observable kind {self.kind!r}")

    def __call__(self, x: np.ndarray) -> float:
        if self.kind in ("population", "fidelity"):
            return population(x, self.target)
        if self.kind == "excitation":
            return excitation_probability(x, self.target)
        m = self.target.toarray()
        if x.ndim == 1:
            return float(np.real(np.vdot(x, m @ x)))
        return float(np.real(np.einsum("ij,ji->", x, m)))


def populations_of(space: HilbertSpace, named: dict[str, StateVector]) -> list[ObservableSpec]:
    return [ObservableSpec(name, "population", st) for name, st in named.items()]
