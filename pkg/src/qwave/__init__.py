"""Quantum circuits for the 1-D wave equation with Dirichlet boundaries.

Library layout:

- :mod:`qwave.circuit` -- hierarchical circuit IR, inversion, flattening,
  gate counting, JSON serialization
- :mod:`qwave.gates` -- logic/arithmetic constructors (OR, multi-controlled
  X, equality, QFT, constant adders, comparator)
- :mod:`qwave.oracles` -- the query-model oracles of the two 1-sparse terms
- :mod:`qwave.sparsesim` -- exact 1-sparse evolution, Suzuki schedules,
  repetition bounds, Trotter assembly
- :mod:`qwave.wavesolver` -- discretisation matrices and the end-to-end solve
- :mod:`qwave.statevector` -- dense verification engine
- :mod:`qwave.transpiler` -- {U1, U2, U3, CNOT} lowering and pulse timing
- :mod:`qwave.qprof` -- call-graph profiler with gprof-format output
- :mod:`qwave.cli` -- command line, classical references, sweeps, fits
"""

from .circuit import (
    Call,
    Circuit,
    CircuitBuilder,
    CircuitError,
    Gate,
    flatten,
    gate_count,
    invert,
)
from .oracles import OracleSpec, OracleTriple, build_oracle_triple, classical_m_v_s
from .sparsesim import (
    ProductFormulaPlan,
    SparseTerm,
    repetitions,
    simulate_1sparse,
    suzuki_coefficients,
    trotter_simulate,
)
from .transpiler import TimingModel, estimate_time, transpile
from .wavesolver import Discretisation, WaveProblem, WaveSolution, solve

__all__ = [
    "Call",
    "Circuit",
    "CircuitBuilder",
    "CircuitError",
    "Gate",
    "flatten",
    "gate_count",
    "invert",
    "OracleSpec",
    "OracleTriple",
    "build_oracle_triple",
    "classical_m_v_s",
    "ProductFormulaPlan",
    "SparseTerm",
    "repetitions",
    "simulate_1sparse",
    "suzuki_coefficients",
    "trotter_simulate",
    "TimingModel",
    "estimate_time",
    "transpile",
    "Discretisation",
    "WaveProblem",
    "WaveSolution",
    "solve",
]

__version__ = "0.1.0"
