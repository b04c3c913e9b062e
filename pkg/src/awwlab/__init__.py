"""Numerical laboratory for a slowly driven d-level atom coupled to a bosonic field.

Modules, roughly from the bottom up:

- bath: spectral weights, correlation functions and their transforms
- atom: slow Hamiltonian paths, eigenframes, geometric phases
- exact: mode discretization and full single-excitation propagation
- reduced: memory-kernel dynamics and the effective non-Hermitian generator
- spectral: perturbed eigenvalues, Riesz projections, adiabatic factorization
- asymptotics: closed-form leading-order answers and the regime taxonomy
- emission: observable averages of the emitted excitation and limit laws
- harness / config / cli: scenarios, sweeps, CSV reporting, command line
"""

from . import (asymptotics, atom, bath, config, emission, errors, exact,
               harness, reduced, spectral)
from .atom import AtomPath, EigenFrame, eigenframe, validate_coupling
from .bath import BathSpec, TestObservable, reference_bath
from .errors import AwwlabError
from .exact import ModeGrid, Trajectory, discretize_bath, propagate_exact
from .harness import Scenario, builtin_scenario

__version__ = "0.1.0"
