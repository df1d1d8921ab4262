"""
Fermionic operator-ordering ambiguities in entanglement between an inertial
observer and an accelerated one.

Modules
-------
fock_algebra      fermionic Fock spaces whose basis depends on an operator ordering
rindler_states    Unruh vacua and excitations expanded in Rindler modes
entanglement      partial trace, partial transpose, negativity, entropy
ordering_survey   negativity behaviour classes over many orderings
cli               command-line front end
"""

from .errors import DegenerateSpecError, DomainError, EnumerationRefused, NumericalValidityError

__version__ = "0.1.0"

__all__ = [
    "DegenerateSpecError",
    "DomainError",
    "EnumerationRefused",
    "NumericalValidityError",
]
