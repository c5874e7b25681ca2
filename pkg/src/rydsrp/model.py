"""Hamiltonians, decay channels and analytic helper quantities.

Units: angular frequencies and Rabi couplings in rad/us, so a value quoted
as ``X/2pi = y MHz`` is stored as ``2*pi*y``. Plain rates (decay rates,
``gamma_flat``, the pump rate ``Omega_p``) are stored in 1/us with no
``2*pi``. Lifetimes are in ms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Iterable

import numpy as np

from .core import (
    HilbertSpace,
    Level,
    LevelError,
    Operator,
    StateVector,
    ketbra,
    outer,
    transition_operator,
)

TWO_PI = 2.0 * math.pi

G0, G1, R, P1, P2, ALPHA, A_SHORT = (
    Level.G0, Level.G1, Level.R, Level.P1, Level.P2, Level.ALPHA, Level.A_SHORT)

RYDBERG_LEVELS = (R, P1, P2)


def mhz(value: float) -> float:
    """Convert ``X/2pi`` in MHz to rad/us."""
    return TWO_PI * value


@dataclass(frozen=True)
class PhysicalParams:
    """Every scalar of the model in one validated record.

    Defaults are the blockade-freezing parameter set: Omega/2pi = 0.02 MHz,
    Omega_s/2pi = 1 MHz, J/2pi = 50 MHz and Delta = sqrt(2) J.
    ``Delta=None`` means sqrt(2)*J; ``Omega_B``/``Omega_R`` default to
    ``Omega_s``; ``U_vdw`` defaults to ``J``.
    """

    Omega: float = mhz(0.02)
    Omega_s: float = mhz(1.0)
    Omega_B: float | None = None
    Omega_R: float | None = None
    Omega_w: float = 0.0
    Omega_p: float = 0.0
    Omega_b: float = 0.0
    Delta: float | None = None
    J: float = mhz(50.0)
    delta_defect: float = 0.0
    U_vdw: float | None = None
    C3: float = mhz(2390.0)
    R: float | None = None
    Gamma: float = 1.0 / 0.02569
    tau_r: float = 0.2
    tau_p1: float = 0.48
    tau_p2: float = 0.13
    lam: float = 1.0
    gamma_split: float = 0.5
    gamma_flat: float = 0.1
    natural_frac0: float = 0.5
    natural_frac1: float | None = None
    decay_levels: tuple[str, ...] = ("r",)
    stark_comp_single: float | None = None
    stark_comp_pair: float = 0.0

    def __post_init__(self):
        for name in ("Omega", "Omega_s", "Omega_w", "Omega_p", "Omega_b", "Gamma",
                     "gamma_flat", "C3"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("Omega_B", "Omega_R", "U_vdw"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("tau_r", "tau_p1", "tau_p2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("lam", "gamma_split", "natural_frac0"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.natural_frac1 is not None:
            if self.natural_frac1 < 0:
                raise ValueError("natural_frac1 must be >= 0")
            if self.natural_frac0 + self.natural_frac1 > 1.0 + 1e-12:
                raise ValueError("branching fractions exceed the total rate")
        if self.R is not None and self.R <= 0:
            raise ValueError("R must be > 0")
        object.__setattr__(self, "decay_levels",
                           tuple(str(Level(x)) for x in self.decay_levels))
        for lev in self.decay_levels:
            if Level(lev) not in RYDBERG_LEVELS:
                raise ValueError(f"decay level {lev} is not a Rydberg level")

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    @property
    def Delta_eff(self) -> float:
        return math.sqrt(2.0) * self.J if self.Delta is None else self.Delta

    @property
    def Omega_B_eff(self) -> float:
        return self.Omega_s if self.Omega_B is None else self.Omega_B

    @property
    def Omega_R_eff(self) -> float:
        return self.Omega_s if self.Omega_R is None else self.Omega_R

    @property
    def U_vdw_eff(self) -> float:
        return self.J if self.U_vdw is None else self.U_vdw

    @property
    def natural_frac1_eff(self) -> float:
        if self.natural_frac1 is None:
            return 1.0 - self.natural_frac0
        return self.natural_frac1

    def gamma(self, level: str | Level) -> float:
        """Natural decay rate 1/tau in 1/us."""
        tau = {R: self.tau_r, P1: self.tau_p1, P2: self.tau_p2}[Level(level)]
        return 1.0 / (tau * 1000.0)

    @property
    def engineered_total(self) -> float:
        return 4.0 * self.Omega_p**2 / self.Gamma

    @property
    def recycling_total(self) -> float:
        return 4.0 * self.Omega_b**2 / self.Gamma

    def resolved(self) -> dict[str, object]:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out.update(Delta=self.Delta_eff, Omega_B=self.Omega_B_eff,
                   Omega_R=self.Omega_R_eff, U_vdw=self.U_vdw_eff,
                   natural_frac1=self.natural_frac1_eff)
        return out


@dataclass(frozen=True)
class DriveCoefficient:
    amplitude: complex = 1.0
    angular_frequency: float = 0.0
    phase: float = 0.0

    def __call__(self, t):
        return self.amplitude * np.exp(1j * (self.angular_frequency * t + self.phase))

    @property
    def phasor(self) -> complex:
        """Complex prefactor of ``exp(i w t)``."""
        return complex(self.amplitude * np.exp(1j * self.phase))


@dataclass(frozen=True, eq=False)
class DriveTerm:
    """``c(t) O + conj(c(t)) O^dag`` when ``hermitian_closure``, else ``c(t) O``."""

    op: Operator
    coeff: DriveCoefficient
    hermitian_closure: bool = True


def _freq_key(w: float) -> float:
    return round(float(w), 9)


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    space: HilbertSpace
    terms: tuple[DriveTerm, ...]
    variant: "ModelVariant | None" = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.op.space != self.space:
                raise ValueError("term lives on a different space")
            if not term.hermitian_closure:
                if term.coeff.angular_frequency != 0 or abs(term.coeff.phasor.imag) > 0:
                    raise ValueError("an unclosed term needs a real static coefficient")
                if not term.op.is_hermitian():
                    raise ValueError("an unclosed term needs a Hermitian operator")

    def components(self) -> dict[float, np.ndarray]:
        """Frequency decomposition ``H(t) = sum_w exp(i w t) H_w``."""
        out: dict[float, np.ndarray] = {}

        def add(w, m):
            key = _freq_key(w)
            if key in out:
                out[key] = out[key] + m
            else:
                out[key] = np.array(m, dtype=complex)

        for term in self.terms:
            op = term.op.toarray()
            c = term.coeff.phasor
            w = term.coeff.angular_frequency
            add(w, c * op)
            if term.hermitian_closure:
                add(-w, np.conj(c) * op.conj().T)
        if not out:
            out[0.0] = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        return out

    def evaluate(self, t: float) -> np.ndarray:
        return sum(np.exp(1j * w * t) * m for w, m in self.components().items())

    @property
    def frequencies(self) -> list[float]:
        return sorted(self.components())

    def norm_bound(self) -> float:
        return float(sum(np.linalg.norm(m, 2) for m in self.components().values()))

    def map_terms(self, fn) -> "HamiltonianSpec":
        return HamiltonianSpec(self.space, tuple(fn(t) for t in self.terms), self.variant)


@dataclass(frozen=True, eq=False)
class DecayChannel:
    op: Operator
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"negative decay rate for {self.label!r}")


class ModelVariant(str, Enum):
    FULL_SRP = "full_srp"
    FULL_WITH_DEFECT = "full_with_defect"
    INTERMEDIATE_EFFECTIVE = "intermediate_effective"
    EFFECTIVE_SRP = "effective_srp"
    VDW_COMPARISON = "vdw_comparison"
    ANTIBLOCKADE = "antiblockade"
    GROUND_BLOCKADE_EFFECTIVE = "ground_blockade_effective"
    GROUND_BLOCKADE_SUBSPACE = "ground_blockade_subspace"
    LEAKAGE_SRP = "leakage_srp"
    EFFECTIVE_DISSIPATIVE = "effective_dissipative"
    FULL_DISSIPATIVE = "full_dissipative"
    RECYCLING_FULL = "recycling_full"
    ENGINEERED_DECAY_SINGLE = "engineered_decay_single"
    ENGINEERED_DECAY_EFFECTIVE = "engineered_decay_effective"

    def __str__(self) -> str:
        return self.value


_FIVE = (G0, G1, R, P1, P2)
_SIX = _FIVE + (ALPHA,)
_THREE = (G0, G1, R)

_LEVEL_SETS = {
    ModelVariant.FULL_SRP: (_FIVE, 2),
    ModelVariant.FULL_WITH_DEFECT: (_FIVE, 2),
    ModelVariant.INTERMEDIATE_EFFECTIVE: (_FIVE, 2),
    ModelVariant.EFFECTIVE_SRP: (_THREE, 2),
    ModelVariant.VDW_COMPARISON: (_THREE, 2),
    ModelVariant.ANTIBLOCKADE: (_FIVE, 2),
    ModelVariant.GROUND_BLOCKADE_EFFECTIVE: (_THREE, 2),
    ModelVariant.GROUND_BLOCKADE_SUBSPACE: ((G0, G1), 2),
    ModelVariant.LEAKAGE_SRP: (_SIX, 2),
    ModelVariant.EFFECTIVE_DISSIPATIVE: (_THREE, 2),
    ModelVariant.FULL_DISSIPATIVE: (_SIX, 2),
    ModelVariant.RECYCLING_FULL: (_SIX, 2),
    ModelVariant.ENGINEERED_DECAY_SINGLE: ((G0, G1, R, A_SHORT), 1),
    ModelVariant.ENGINEERED_DECAY_EFFECTIVE: (_THREE, 1),
}

DISSIPATIVE_VARIANTS = frozenset({
    ModelVariant.LEAKAGE_SRP,
    ModelVariant.EFFECTIVE_DISSIPATIVE,
    ModelVariant.FULL_DISSIPATIVE,
    ModelVariant.RECYCLING_FULL,
    ModelVariant.ENGINEERED_DECAY_SINGLE,
    ModelVariant.ENGINEERED_DECAY_EFFECTIVE,
})


def variant_space(variant: ModelVariant | str) -> HilbertSpace:
    levels, n = _LEVEL_SETS[ModelVariant(variant)]
    return HilbertSpace.pair(levels) if n == 2 else HilbertSpace.single(levels)


def _static(op: Operator, amp: complex) -> DriveTerm:
    return DriveTerm(op, DriveCoefficient(amp))


def exchange_operator(space: HilbertSpace) -> Operator:
    """``|rr>(<p'p''| + <p''p'|) + H.c.`` (unit strength)."""
    a = ketbra(space, (R, R), (P1, P2)) + ketbra(space, (R, R), (P2, P1))
    return a + a.dag()


def _exchange_terms(space, p: PhysicalParams) -> list[DriveTerm]:
    return [_static(ketbra(space, (R, R), (P1, P2)), p.J),
            _static(ketbra(space, (R, R), (P2, P1)), p.J)]


def _srp_terms(space, p: PhysicalParams) -> list[DriveTerm]:
    delta = p.Delta_eff
    terms = []
    for n in range(2):
        terms.append(_static(transition_operator(space, n, R, G1), p.Omega))
        to0 = transition_operator(space, n, R, G0)
        terms.append(DriveTerm(to0, DriveCoefficient(p.Omega_R_eff, -delta, 0.0)))
        terms.append(DriveTerm(to0, DriveCoefficient(p.Omega_B_eff, delta, n * math.pi)))
    return terms + _exchange_terms(space, p)


def _weak_ground_terms(space, p: PhysicalParams) -> list[DriveTerm]:
    if p.Omega_w == 0:
        return []
    return [_static(transition_operator(space, n, G1, G0), p.Omega_w) for n in range(2)]


def _pumping_terms(space, p: PhysicalParams) -> list[DriveTerm]:
    return [_static(ketbra(space, (G1, G1), (R, G1)), p.Omega),
            _static(ketbra(space, (G1, G1), (G1, R)), p.Omega)]


def _diag(space, labels, value) -> DriveTerm:
    return DriveTerm(ketbra(space, labels, labels), DriveCoefficient(value), False)


def build_hamiltonian(variant: ModelVariant | str, p: PhysicalParams) -> HamiltonianSpec:
    variant = ModelVariant(variant)
    space = variant_space(variant)
    V = ModelVariant
    if variant in (V.FULL_SRP, V.FULL_WITH_DEFECT):
        terms = _srp_terms(space, p)
        if variant is V.FULL_WITH_DEFECT and p.delta_defect != 0:
            terms += [_diag(space, (P1, P2), p.delta_defect),
                      _diag(space, (P2, P1), p.delta_defect)]
    elif variant is V.INTERMEDIATE_EFFECTIVE:
        st = dressed_basis(space)
        k = space.basis
        a = p.Omega / math.sqrt(2.0)
        terms = [
            _static(ketbra(space, (G1, G1), (R, G1)), p.Omega),
            _static(ketbra(space, (G1, G1), (G1, R)), p.Omega),
            _static(outer(k(G0, G1), st["T0"]) - outer(k(G0, G1), st["S0"]), a),
            _static(outer(k(G1, G0), st["T0"]) + outer(k(G1, G0), st["S0"]), a),
            _static(outer(st["T0"], st["E-"]), p.Omega_s),
            _static(outer(st["S0"], st["E+"]), -p.Omega_s),
        ]
    elif variant is V.EFFECTIVE_SRP:
        terms = _pumping_terms(space, p)
    elif variant is V.VDW_COMPARISON:
        terms = []
        for n in range(2):
            terms.append(_static(transition_operator(space, n, R, G1), p.Omega))
            terms.append(DriveTerm(transition_operator(space, n, R, G0),
                                   DriveCoefficient(p.Omega_s, p.Delta_eff, 0.0)))
        terms.append(_diag(space, (R, R), p.U_vdw_eff))
    elif variant is V.ANTIBLOCKADE:
        delta = p.Delta_eff
        terms = [DriveTerm(transition_operator(space, n, R, G1),
                           DriveCoefficient(p.Omega_s, -delta, 0.0)) for n in range(2)]
        terms += _exchange_terms(space, p)
        comp1 = antiblockade_single_shift(p)
        if comp1:
            terms += [DriveTerm(transition_operator(space, n, G1, G1),
                                DriveCoefficient(comp1), False) for n in range(2)]
        if p.stark_comp_pair:
            terms.append(_diag(space, (G1, G1), p.stark_comp_pair))
    elif variant is V.GROUND_BLOCKADE_EFFECTIVE or variant is V.EFFECTIVE_DISSIPATIVE:
        terms = _weak_ground_terms(space, p) + _pumping_terms(space, p)
    elif variant is V.GROUND_BLOCKADE_SUBSPACE:
        terms = [_static(ketbra(space, (G0, G0), (G0, G1)), p.Omega_w),
                 _static(ketbra(space, (G0, G0), (G1, G0)), p.Omega_w)]
    elif variant in (V.LEAKAGE_SRP, V.FULL_DISSIPATIVE, V.RECYCLING_FULL):
        terms = _weak_ground_terms(space, p) + _srp_terms(space, p)
    elif variant is V.ENGINEERED_DECAY_SINGLE:
        terms = [_static(transition_operator(space, 0, A_SHORT, R), p.Omega_p)]
    elif variant is V.ENGINEERED_DECAY_EFFECTIVE:
        terms = []
    else:  # pragma: no cover
        raise ValueError(f"unhandled variant {variant}")
    return HamiltonianSpec(space, tuple(terms), variant)


def antiblockade_single_shift(p: PhysicalParams) -> float:
    """Static shift on each |1> cancelling the off-resonant light shift."""
    if p.stark_comp_single is not None:
        return p.stark_comp_single
    return p.Omega_s**2 / p.Delta_eff


def engineered_rates(Omega_p: float, Gamma: float) -> tuple[float, float]:
    """Effective decay rates of |r> into (|0>, |1>) via a short-lived level."""
    if Gamma <= 0:
        raise ValueError("Gamma must be > 0")
    total = 4.0 * Omega_p**2 / Gamma
    return 0.6 * total, 0.4 * total


def _channel(space, n, src, dst, rate, tag) -> DecayChannel:
    return DecayChannel(transition_operator(space, n, src, dst), rate, f"{tag}:{src}->{dst}@{n + 1}")


def build_decay_channels(variant: ModelVariant | str, p: PhysicalParams) -> list[DecayChannel]:
    variant = ModelVariant(variant)
    if variant not in DISSIPATIVE_VARIANTS:
        raise ValueError(f"variant {variant} has no decay channels")
    space = variant_space(variant)
    V = ModelVariant
    out: list[DecayChannel] = []
    if variant is V.ENGINEERED_DECAY_SINGLE:
        return [_channel(space, 0, A_SHORT, G0, 3.0 * p.Gamma / 5.0, "short"),
                _channel(space, 0, A_SHORT, G1, 2.0 * p.Gamma / 5.0, "short")]
    if variant is V.ENGINEERED_DECAY_EFFECTIVE:
        g0, g1 = engineered_rates(p.Omega_p, p.Gamma)
        return [_channel(space, 0, R, G0, g0, "eng"), _channel(space, 0, R, G1, g1, "eng")]
    for n in range(2):
        if variant is V.EFFECTIVE_DISSIPATIVE:
            out += [_channel(space, n, R, G0, p.gamma_flat / 2.0, "flat"),
                    _channel(space, n, R, G1, p.gamma_flat / 2.0, "flat")]
        elif variant is V.LEAKAGE_SRP:
            for m in p.decay_levels:
                g = p.gamma(m)
                out += [_channel(space, n, m, G0, p.gamma_split * p.lam * g, "nat"),
                        _channel(space, n, m, G1, (1.0 - p.gamma_split) * p.lam * g, "nat"),
                        _channel(space, n, m, ALPHA, (1.0 - p.lam) * g, "nat")]
        else:
            g0, g1 = engineered_rates(p.Omega_p, p.Gamma)
            out += [_channel(space, n, R, G0, g0, "eng"), _channel(space, n, R, G1, g1, "eng")]
            f0, f1 = p.natural_frac0, p.natural_frac1_eff
            if f0 + f1 > 1.0 + 1e-12:
                raise ValueError("branching fractions exceed the total rate")
            for m in RYDBERG_LEVELS:
                g = p.gamma(m)
                out += [_channel(space, n, m, G0, f0 * g, "nat"),
                        _channel(space, n, m, G1, f1 * g, "nat")]
                rest = max(0.0, 1.0 - f0 - f1) * g
                if rest > 0:
                    out.append(_channel(space, n, m, ALPHA, rest, "nat"))
            if variant is V.RECYCLING_FULL:
                gb = p.recycling_total
                out += [_channel(space, n, ALPHA, G0, gb / 2.0, "pump"),
                        _channel(space, n, ALPHA, G1, gb / 3.0, "pump"),
                        _channel(space, n, ALPHA, ALPHA, gb / 6.0, "pump")]
    return out


def dipole_coupling_from_distance(C3: float, R: float) -> float:
    """J = C3 / R^3."""
    if R <= 0:
        raise ValueError("R must be > 0")
    return C3 / R**3


def distance_from_dipole_coupling(C3: float, J: float) -> float:
    if J <= 0:
        raise ValueError("J must be > 0")
    return (C3 / J) ** (1.0 / 3.0)


def foster_deviation(J: float, delta: float) -> tuple[float, float]:
    """Shift of the upper exchange eigenvalue caused by a Forster defect.

    Returns the exact value and its small ``delta/J`` expansion.
    """
    if J == 0:
        raise ValueError("J must be nonzero")
    if J < 0 or delta < 0:
        raise ValueError("expects J > 0 and delta >= 0")
    exact = abs(math.sqrt(2.0) * J - (delta + math.sqrt(8.0 * J**2 + delta**2)) / 2.0)
    approx = delta / 2.0 + math.sqrt(2.0) * delta**2 / (16.0 * J)
    return exact, approx


def defect_block_eigenvalues(J: float, delta: float) -> tuple[float, float]:
    root = math.sqrt(8.0 * J**2 + delta**2)
    return (delta - root) / 2.0, (delta + root) / 2.0


_DRESSED_NEEDS = {
    "T0": (G0, R), "S0": (G0, R), "E+": (R, P1, P2), "E-": (R, P1, P2),
    "alpha+": (G0, R, P1, P2), "alpha-": (G0, R, P1, P2),
    "beta+": (G0, R, P1, P2), "beta-": (G0, R, P1, P2),
    "Psi+": (G0, G1), "Psi-": (G0, G1), "bright": (G1, R),
}


def dressed_basis(space: HilbertSpace, names: Iterable[str] | None = None
                  ) -> dict[str, StateVector]:
    """Named superpositions used throughout the analysis.

    With ``names=None`` every state the space can represent is returned.
    """
    if space.n_sites != 2:
        raise LevelError("dressed states need a two-atom space")
    if names is None:
        names = [n for n, req in _DRESSED_NEEDS.items()
                 if all(space.has_level(x) for x in req)]
        if not names:
            raise LevelError("space holds none of the dressed-state levels")
    else:
        names = list(names)
        for n in names:
            if n not in _DRESSED_NEEDS:
                raise KeyError(n)
            missing = [str(x) for x in _DRESSED_NEEDS[n] if not space.has_level(x)]
            if missing:
                raise LevelError(f"{n} needs levels {missing}")

    def vec(terms):
        v = np.zeros(space.dim, dtype=complex)
        for labels, amp in terms.items():
            v[space.index(labels)] += amp
        return v

    s2 = math.sqrt(2.0)
    raw = {}
    if space.has_level(G0) and space.has_level(R):
        raw["T0"] = vec({(R, G0): 1 / s2, (G0, R): 1 / s2})
        raw["S0"] = vec({(R, G0): 1 / s2, (G0, R): -1 / s2})
    if all(space.has_level(x) for x in (R, P1, P2)):
        raw["E+"] = vec({(R, R): s2 / 2, (P1, P2): 0.5, (P2, P1): 0.5})
        raw["E-"] = vec({(R, R): s2 / 2, (P1, P2): -0.5, (P2, P1): -0.5})
    if "T0" in raw and "E+" in raw:
        T0, S0, Ep, Em = raw["T0"], raw["S0"], raw["E+"], raw["E-"]
        raw["alpha+"] = 0.5 * ((T0 - S0) + (Ep + Em))
        raw["alpha-"] = 0.5 * ((T0 - S0) - (Ep + Em))
        raw["beta+"] = 0.5 * ((T0 + S0) - (Ep - Em))
        raw["beta-"] = 0.5 * ((T0 + S0) + (Ep - Em))
    if space.has_level(G0) and space.has_level(G1):
        raw["Psi+"] = vec({(G0, G1): 1 / s2, (G1, G0): 1 / s2})
        raw["Psi-"] = vec({(G0, G1): 1 / s2, (G1, G0): -1 / s2})
    if space.has_level(G1) and space.has_level(R):
        raw["bright"] = vec({(R, G1): 1 / s2, (G1, R): 1 / s2})
    return {n: StateVector(space, raw[n]) for n in names}


@dataclass(frozen=True)
class SRPConditionReport:
    residual: float
    detuning_ratio: float
    drive_ratio: float
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.warnings


def _ratio(a: float, b: float) -> float:
    return math.inf if b == 0 else a / b


def srp_condition_report(p: PhysicalParams, min_ratio: float = 10.0) -> SRPConditionReport:
    """Check Delta = sqrt(2) J and the hierarchy Delta >> Omega_s >> Omega."""
    target = math.sqrt(2.0) * p.J
    residual = abs(p.Delta_eff - target)
    r1 = _ratio(abs(p.Delta_eff), p.Omega_s)
    r2 = _ratio(p.Omega_s, p.Omega)
    warnings = []
    if residual > 1e-9 * max(abs(target), 1.0):
        warnings.append(f"WARN detuning misses sqrt(2)J by {residual:.6g} rad/us")
    if r1 < min_ratio:
        warnings.append(f"WARN Delta/Omega_s = {r1:.4g} < {min_ratio:g}")
    if r2 < min_ratio:
        warnings.append(f"WARN Omega_s/Omega = {r2:.4g} < {min_ratio:g}")
    return SRPConditionReport(residual, r1, r2, tuple(warnings))
