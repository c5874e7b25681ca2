"""Selective Rydberg pumping in a two-atom system: models, dynamics and experiments."""

from .core import (
    DensityMatrix,
    HilbertSpace,
    Level,
    LevelError,
    Operator,
    SpaceMismatchError,
    StateVector,
    expectation,
    identity,
    ketbra,
    outer,
    projector,
    tensor_product,
    transition_operator,
)
from .dynamics import (
    IntegratorConfig,
    NumericalError,
    Superoperator,
    Trajectory,
    build_superoperator,
    compute_gate_unitary,
    compute_process_choi,
    compute_propagator,
    evolve_lindblad,
    evolve_schrodinger,
    lindblad_rhs,
)
from .model import (
    DecayChannel,
    HamiltonianSpec,
    ModelVariant,
    PhysicalParams,
    build_decay_channels,
    build_hamiltonian,
    dressed_basis,
    mhz,
    srp_condition_report,
)
from .observables import (
    U_CZ,
    ObservableSpec,
    excitation_probability,
    fit_exponential_rate,
    gate_fidelity_process,
    gate_fidelity_state,
    gate_fidelity_unitary,
    population,
)
from .scenarios import (
    Report,
    SweepSpec,
    list_scenarios,
    run_scenario,
    run_sweep,
)

__version__ = "0.1.0"
