"""Fast maximum-likelihood quantum state tomography."""

from .likelihood import Frequencies, Likelihood
from .measurements import POM, ProductPOM, pauli6_register, product_pom, tetrahedron_register
from .solvers import SolverConfig, SolverResult, solve

__version__ = "0.1.0"
