"""pdlab: empirical statistics of large prime factors of arithmetic sequences.

Compares prime-factor spectra of well-distributed arithmetic sequences
(integers, shifted primes, irreducible polynomial values, Thue-Morse zeros)
against the Poisson-Dirichlet limit process, via exact oracles and seeded
Monte Carlo.
"""

from pdlab.errors import PdlabError, ResourceBudgetError, ValidationError

__version__ = "0.1.0"

__all__ = ["PdlabError", "ValidationError", "ResourceBudgetError", "__version__"]
