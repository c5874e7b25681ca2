"""Schrodinger and Lindblad propagation for drive-decomposed generators.

Every generator is stored as ``G(t) = sum_w exp(i w t) G_w`` with the static
matrices ``G_w`` assembled once. Inside the integration loop only the scalar
phases are evaluated; for sparse superoperators they are blended into the
value array of one fixed CSR pattern.

When all drive frequencies are integer multiples of a fundamental ``w0`` the
generator has period ``T = 2 pi / w0``. The fixed-step RK4 path then builds
the RK4 map over one period (``T / h`` steps) once and applies its powers to
reach whole periods, finishing each sample with ordinary RK4 steps. In exact
arithmetic this is the same sequence of RK4 steps, only regrouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .core import DensityMatrix, HilbertSpace, SpaceMismatchError, StateVector
from .model import DecayChannel, DriveCoefficient, HamiltonianSpec

COMPUTATIONAL = (("g0", "g0"), ("g0", "g1"), ("g1", "g0"), ("g1", "g1"))


class NumericalError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    """Integrator settings.

    ``method`` is ``"rk4"`` (fixed step) or ``"rk45"`` (adaptive
    Dormand-Prince pair). For RK4 the step defaults to
    ``min(2 pi / (w_max * period_divisor), t_span / min_steps)``.
    """

    method: str = "rk4"
    h: float | None = None
    rtol: float = 1e-8
    atol: float = 1e-10
    period_divisor: int = 20
    min_steps: int = 1000
    stroboscopic: bool = True
    drift_tol: float = 1e-8
    monitor_positivity: bool = False
    positivity_every: int = 10
    positivity_tol: float = 1e-7

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.h is not None and self.h <= 0:
            raise ValueError("step h must be > 0")
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be > 0")
        if self.period_divisor < 1 or self.min_steps < 1:
            raise ValueError("divisors must be >= 1")


@dataclass
class Trajectory:
    times: np.ndarray
    records: dict[str, np.ndarray] = field(default_factory=dict)
    states: list[np.ndarray] | None = None
    space: HilbertSpace | None = None

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or np.any(np.diff(self.times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        for name, vals in self.records.items():
            if len(vals) != len(self.times):
                raise ValueError(f"record {name!r} does not match the grid")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.records[name]

    def final(self, name: str) -> float:
        return float(self.records[name][-1])

    def at(self, name: str, t: float) -> float:
        i = int(np.argmin(np.abs(self.times - t)))
        return float(self.records[name][i])


def _freq_period(freqs: Sequence[float], tol: float = 1e-9) -> float | None:
    nonzero = sorted({abs(w) for w in freqs if abs(w) > 0})
    if not nonzero:
        return None
    w0 = nonzero[0]
    for w in nonzero[1:]:
        q = w / w0
        if abs(q - round(q)) > tol * q:
            return None
    return 2.0 * math.pi / w0


class _Generator:
    """Linear right-hand side ``dX/dt = G(t) X``."""

    def __init__(self, comps: Mapping[float, object], scale: float):
        self.freqs = np.array(sorted(comps), dtype=float)
        mats = [comps[w] for w in self.freqs]
        self.n = mats[0].shape[0]
        self.scale = float(scale)
        self.sparse = any(sp.issparse(m) for m in mats)
        if self.sparse:
            coos = [sp.coo_matrix(m) for m in mats]
            keys = [c.row.astype(np.int64) * self.n + c.col for c in coos]
            allkeys = np.unique(np.concatenate(keys)) if keys else np.zeros(0, np.int64)
            table = np.zeros((len(mats), allkeys.size), dtype=complex)
            for k, (c, kk) in enumerate(zip(coos, keys)):
                np.add.at(table[k], np.searchsorted(allkeys, kk), c.data)
            rows = allkeys // self.n
            self._indices = (allkeys % self.n).astype(np.int32)
            self._indptr = np.searchsorted(rows, np.arange(self.n + 1)).astype(np.int32)
            self._table = table
        else:
            self._stack = np.array([np.asarray(m, dtype=complex) for m in mats])
        self._static = bool(np.all(self.freqs == 0))
        self._cache_static = None

    @property
    def period(self) -> float | None:
        return _freq_period(self.freqs)

    @property
    def omega_max(self) -> float:
        return float(np.max(np.abs(self.freqs), initial=0.0)) + self.scale

    def at(self, t: float):
        if self._static and self._cache_static is not None:
            return self._cache_static
        c = np.exp(1j * self.freqs * t)
        if self.sparse:
            data = c @ self._table
            m = sp.csr_matrix((data, self._indices, self._indptr), shape=(self.n, self.n))
            m.has_sorted_indices = True
        else:
            m = np.tensordot(c, self._stack, axes=1)
        if self._static:
            self._cache_static = m
        return m

    def apply(self, t: float, X: np.ndarray) -> np.ndarray:
        return self.at(t) @ X


def _rk4_step(gen: _Generator, t: float, X: np.ndarray, h: float) -> np.ndarray:
    a = gen.at(t)
    b = gen.at(t + 0.5 * h)
    c = gen.at(t + h)
    k1 = a @ X
    k2 = b @ (X + (0.5 * h) * k1)
    k3 = b @ (X + (0.5 * h) * k2)
    k4 = c @ (X + h * k3)
    return X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _rk4_span(gen, t0, X, dt, h):
    if dt <= 0:
        return X
    n = max(1, int(math.ceil(dt / h - 1e-9)))
    hh = dt / n
    for k in range(n):
        X = _rk4_step(gen, t0 + k * hh, X, hh)
    return X


def _step_size(gen: _Generator, t_span: float, cfg: IntegratorConfig) -> float:
    if cfg.h is not None:
        return cfg.h
    cands = []
    if gen.omega_max > 0:
        cands.append(2.0 * math.pi / (gen.omega_max * cfg.period_divisor))
    if t_span > 0:
        cands.append(t_span / cfg.min_steps)
    return min(cands) if cands else 1.0


class _PeriodMap:
    """RK4 map over one period and cached integer powers of it."""

    def __init__(self, gen: _Generator, period: float, h_target: float):
        self.gen = gen
        self.period = period
        self.n_sub = max(4, int(math.ceil(period / h_target - 1e-9)))
        self.h = period / self.n_sub
        X = np.eye(gen.n, dtype=complex)
        for k in range(self.n_sub):
            X = _rk4_step(gen, k * self.h, X, self.h)
        self.P = X
        self._powers: dict[int, np.ndarray] = {}
        self._last_m: int | None = None

    def _power(self, m: int) -> np.ndarray:
        if m in self._powers:
            return self._powers[m]
        if m - 1 in self._powers:
            out = self.P @ self._powers[m - 1]
        else:
            out, base, e = None, self.P, m
            while e:
                if e & 1:
                    out = base if out is None else base @ out
                e >>= 1
                if e:
                    base = base @ base
        if len(self._powers) >= 3:
            self._powers.pop(next(iter(self._powers)))
        self._powers[m] = out
        return out

    def advance(self, X: np.ndarray, m: int) -> np.ndarray:
        if m <= 0:
            return X
        cols = X.shape[1] if X.ndim == 2 else 1
        squarings = 2 * max(1, m.bit_length())
        # A repeated jump (uniform sample grid) pays for its power once.
        repeat, self._last_m = m == self._last_m, m
        if m in self._powers or m - 1 in self._powers or repeat:
            return self._power(m) @ X
        if m * cols <= squarings * self.gen.n:
            for _ in range(m):
                X = self.P @ X
            return X
        return self._power(m) @ X

    def remainder(self, X: np.ndarray, r: float) -> np.ndarray:
        return _rk4_span(self.gen, 0.0, X, r, self.h)


def _propagate(gen: _Generator, X0: np.ndarray, times: np.ndarray, cfg: IntegratorConfig,
               on_sample: Callable[[int, float, np.ndarray], None] | None = None):
    """Yield the state at every requested time (initial state is at t = 0)."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return []
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be nonnegative and strictly increasing")
    t_span = float(times[-1])
    out = []

    if cfg.method == "rk45":
        shape = X0.shape

        def rhs(t, y):
            return gen.apply(t, y.reshape(shape)).ravel()

        if t_span == 0:
            res_y = np.repeat(X0.ravel()[:, None], times.size, axis=1)
        else:
            res = solve_ivp(rhs, (0.0, t_span), X0.ravel().astype(complex), method="RK45",
                            t_eval=times, rtol=cfg.rtol, atol=cfg.atol)
            if not res.success:
                raise NumericalError(f"adaptive integration failed: {res.message}")
            res_y = res.y
        for j, t in enumerate(times):
            X = res_y[:, j].reshape(shape)
            if on_sample:
                on_sample(j, t, X)
            out.append(X)
        return out

    h = _step_size(gen, t_span, cfg)
    period = gen.period
    if period is None and gen._static:
        period = h * 64
    if period is not None:
        h = period / max(1, int(math.ceil(period / h - 1e-9)))
    if cfg.stroboscopic and period is not None and t_span > 2 * period:
        pm = _PeriodMap(gen, period, h)
        anchor_n, A = 0, X0
        for j, t in enumerate(times):
            n = int(t // period)
            r = t - n * period
            if r > period * (1 - 1e-12):
                n, r = n + 1, 0.0
            if r < period * 1e-12:
                r = 0.0
            A = pm.advance(A, n - anchor_n)
            anchor_n = n
            X = pm.remainder(A, r) if r > 0 else A
            if on_sample:
                on_sample(j, t, X)
            out.append(X)
        return out

    X, t_prev = X0, 0.0
    for j, t in enumerate(times):
        X = _rk4_span(gen, t_prev, X, t - t_prev, h)
        t_prev = t
        if on_sample:
            on_sample(j, t, X)
        out.append(X)
    return out


# -- generators -----------------------------------------------------------------

def schrodinger_generator(H: HamiltonianSpec) -> _Generator:
    comps = {w: -1j * m for w, m in H.components().items()}
    return _Generator(comps, H.norm_bound())


def _liouville_h(Hw: np.ndarray) -> sp.csr_matrix:
    n = Hw.shape[0]
    eye = sp.identity(n, format="csr", dtype=complex)
    m = sp.csr_matrix(Hw)
    return (-1j) * (sp.kron(m, eye, format="csr") - sp.kron(eye, m.T, format="csr"))


def dissipator(c: np.ndarray | sp.spmatrix, rate: float = 1.0) -> sp.csr_matrix:
    """Row-major superoperator of ``c rho c^dag - {c^dag c, rho}/2``."""
    c = sp.csr_matrix(c, dtype=complex)
    n = c.shape[0]
    eye = sp.identity(n, format="csr", dtype=complex)
    cdc = (c.conj().T @ c).tocsr()
    out = (sp.kron(c, c.conj(), format="csr") - 0.5 * sp.kron(cdc, eye, format="csr")
           - 0.5 * sp.kron(eye, cdc.T, format="csr"))
    return rate * out


@dataclass(frozen=True, eq=False)
class Superoperator:
    """``L(t) = sum_k c_k(t) L_k`` acting on row-major vectorized density matrices."""

    space: HilbertSpace
    terms: tuple[tuple[sp.csr_matrix, DriveCoefficient], ...]
    scale: float = 0.0

    def at(self, t: float) -> sp.csr_matrix:
        out = None
        for m, c in self.terms:
            v = m * c(t)
            out = v if out is None else out + v
        return out.tocsr()

    def apply(self, t: float, rho: np.ndarray) -> np.ndarray:
        n = self.space.dim
        return (self.at(t) @ np.asarray(rho).reshape(-1)).reshape(n, n)

    def generator(self) -> _Generator:
        comps: dict[float, sp.csr_matrix] = {}
        for m, c in self.terms:
            w = round(c.angular_frequency, 9)
            v = m * c.phasor
            comps[w] = v if w not in comps else comps[w] + v
        return _Generator(comps, self.scale)


def build_superoperator(H: HamiltonianSpec, channels: Sequence[DecayChannel] = ()) -> Superoperator:
    for ch in channels:
        if ch.op.space != H.space:
            raise SpaceMismatchError(f"channel {ch.label!r} lives on a different space")
    comps = H.components()
    terms = []
    static = _liouville_h(comps.get(0.0, np.zeros((H.space.dim,) * 2)))
    for ch in channels:
        if ch.rate > 0:
            static = static + dissipator(ch.op.matrix if ch.op.is_sparse else ch.op.toarray(),
                                         ch.rate)
    terms.append((static.tocsr(), DriveCoefficient(1.0, 0.0)))
    for w, Hw in comps.items():
        if w != 0.0:
            terms.append((_liouville_h(Hw), DriveCoefficient(1.0, w)))
    return Superoperator(H.space, tuple(terms), H.norm_bound())


def lindblad_rhs(H: HamiltonianSpec, channels: Sequence[DecayChannel], t: float,
                 rho: np.ndarray) -> np.ndarray:
    """Direct commutator-plus-dissipator evaluation of d rho / dt."""
    Ht = H.evaluate(t)
    out = -1j * (Ht @ rho - rho @ Ht)
    for ch in channels:
        c = ch.op.toarray()
        cd = c.conj().T
        out = out + ch.rate * (c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c))
    return out


# -- evolution --------------------------------------------------------------------

def _observe(observables):
    if observables is None:
        return {}
    if isinstance(observables, Mapping):
        return dict(observables)
    out = {}
    for ob in observables:
        if ob.name in out:
            raise ValueError(f"duplicate observable name {ob.name!r}")
        out[ob.name] = ob
    return out


def evolve_schrodinger(H: HamiltonianSpec, psi0: StateVector, times, cfg: IntegratorConfig | None = None,
                       observables=None, store_states: bool = False) -> Trajectory:
    """Propagate ``psi0`` (given at t = 0) and sample observables on ``times``."""
    cfg = cfg or IntegratorConfig()
    if psi0.space != H.space:
        raise SpaceMismatchError("initial state and Hamiltonian live on different spaces")
    obs = _observe(observables)
    times = np.asarray(times, dtype=float)
    rec = {name: np.zeros(times.size) for name in obs}
    rec["norm"] = np.zeros(times.size)
    states = [] if store_states else None

    def sample(j, t, X):
        psi = X[:, 0]
        nrm = float(np.linalg.norm(psi))
        if abs(nrm - 1.0) > cfg.drift_tol:
            raise NumericalError(f"norm drift {nrm - 1.0:.3g} at t = {t:.6g} us")
        rec["norm"][j] = nrm
        for name, fn in obs.items():
            rec[name][j] = float(np.real(fn(psi)))
        if states is not None:
            states.append(psi.copy())

    _propagate(schrodinger_generator(H), psi0.vector.reshape(-1, 1).astype(complex), times, cfg, sample)
    return Trajectory(times, rec, states, H.space)


def evolve_lindblad(H: HamiltonianSpec, channels: Sequence[DecayChannel], rho0: DensityMatrix,
                    times, cfg: IntegratorConfig | None = None, observables=None,
                    store_states: bool = False) -> Trajectory:
    """Propagate ``rho0`` (given at t = 0) under the master equation."""
    cfg = cfg or IntegratorConfig()
    if rho0.space != H.space:
        raise SpaceMismatchError("initial state and Hamiltonian live on different spaces")
    obs = _observe(observables)
    times = np.asarray(times, dtype=float)
    n = H.space.dim
    rec = {name: np.zeros(times.size) for name in obs}
    rec["trace"] = np.zeros(times.size)
    states = [] if store_states else None
    gen = build_superoperator(H, channels).generator()

    def sample(j, t, X):
        rho = X.reshape(n, n)
        rho = 0.5 * (rho + rho.conj().T)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > cfg.drift_tol:
            raise NumericalError(f"trace drift {tr - 1.0:.3g} at t = {t:.6g} us")
        if cfg.monitor_positivity and j % cfg.positivity_every == 0:
            lo = float(np.linalg.eigvalsh(rho)[0])
            if lo < -cfg.positivity_tol:
                raise NumericalError(f"negative eigenvalue {lo:.3g} at t = {t:.6g} us")
        rec["trace"][j] = tr
        for name, fn in obs.items():
            rec[name][j] = float(np.real(fn(rho)))
        if states is not None:
            states.append(rho.copy())

    _propagate(gen, rho0.matrix.reshape(-1, 1).astype(complex), times, cfg, sample)
    return Trajectory(times, rec, states, H.space)


def computational_indices(space: HilbertSpace) -> list[int]:
    if space.n_sites != 2:
        raise SpaceMismatchError("gate extraction needs a two-atom space")
    return [space.index(lab) for lab in COMPUTATIONAL]


def compute_propagator(H: HamiltonianSpec, t: float, cfg: IntegratorConfig | None = None,
                       columns: Sequence[int] | None = None) -> np.ndarray:
    """Columns of the Schrodinger propagator ``U(t, 0)`` (all by default)."""
    cfg = cfg or IntegratorConfig()
    n = H.space.dim
    cols = list(range(n)) if columns is None else list(columns)
    X0 = np.eye(n, dtype=complex)[:, cols]
    (X,) = _propagate(schrodinger_generator(H), X0, np.array([t]), cfg)
    if not np.all(np.isfinite(X)):
        raise NumericalError("propagation produced non-finite values")
    return X


def compute_gate_unitary(H: HamiltonianSpec, t_g: float, cfg: IntegratorConfig | None = None
                         ) -> np.ndarray:
    """4x4 block of ``U(t_g)`` on {|00>, |01>, |10>, |11>}; not re-unitarized."""
    idx = computational_indices(H.space)
    X = compute_propagator(H, t_g, cfg, idx)
    return X[idx, :]


def compute_process_choi(H: HamiltonianSpec, channels: Sequence[DecayChannel], t_g: float,
                         cfg: IntegratorConfig | None = None) -> np.ndarray:
    """Choi matrix ``sum_ab |a><b| (x) E(|a><b|)`` restricted to the qubit block.

    Rows and columns are indexed ``a * 4 + i`` with ``a`` the input and ``i``
    the output computational basis state. Population leaving the block makes
    the map trace-decreasing.
    """
    cfg = cfg or IntegratorConfig()
    idx = computational_indices(H.space)
    n = H.space.dim
    cols = [a * n + b for a in idx for b in idx]
    X0 = np.zeros((n * n, 16), dtype=complex)
    X0[cols, np.arange(16)] = 1.0
    gen = build_superoperator(H, channels).generator()
    if t_g == 0:
        X = X0
    else:
        (X,) = _propagate(gen, X0, np.array([t_g]), cfg)
    if not np.all(np.isfinite(X)):
        raise NumericalError("propagation produced non-finite values")
    choi = np.zeros((16, 16), dtype=complex)
    sub = np.ix_(idx, idx)
    for ai in range(4):
        for bi in range(4):
            out = X[:, ai * 4 + bi].reshape(n, n)[sub]
            choi[ai * 4:(ai + 1) * 4, bi * 4:(bi + 1) * 4] = out
    asym = float(np.abs(choi - choi.conj().T).max())
    if asym > 1e-9:
        raise NumericalError(f"Choi matrix lost Hermiticity ({asym:.3g})")
    return 0.5 * (choi + choi.conj().T)
