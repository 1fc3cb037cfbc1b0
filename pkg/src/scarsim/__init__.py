"""Quantum many-body scars in blockade-constrained spin chains.

Submodules: ``hilbert`` (constrained bases and counting), ``symmetry``
(momentum and inversion sectors), ``operators`` (Hamiltonian, scar algebra,
observables), ``states`` (unit-cell, product, algebra and MPS states),
``spectrum`` (sector diagonalisation, towers), ``dynamics`` (quenches,
revivals), ``semiclassical`` (variational orbits), ``rydberg`` (array
emulation) and ``cli``.
"""
from .hilbert import BlockadeConstraint, Boundary, ConstrainedBasis, count_dimension, enumerate_basis, quantum_dimension
from .operators import build_algebra, build_hamiltonian, build_observable
from .states import StateVector, build_initial_state, build_k_state, build_product_state

__version__ = "0.1.0"

__all__ = [
    "BlockadeConstraint",
    "Boundary",
    "ConstrainedBasis",
    "StateVector",
    "__version__",
    "build_algebra",
    "build_hamiltonian",
    "build_initial_state",
    "build_k_state",
    "build_observable",
    "build_product_state",
    "count_dimension",
    "enumerate_basis",
    "quantum_dimension",
]
