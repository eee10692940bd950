"""Algebra of Markovian semigroup generators as explicit superoperator matrices.

Density matrices are vectorised row by row, so ``vec(L @ rho @ R) ==
odot(L, R) @ vec(rho)`` with ``odot(L, R) = kron(L, R.T)``.
"""

from .algebra import *  # noqa: F401,F403
from .algebra import __all__ as _algebra_all
from .bch import *  # noqa: F401,F403
from .bch import __all__ as _bch_all
from .errors import DimensionError, DomainError, LindbladAlgebraError, ShapeError, SingularMatrixError
from .generators import *  # noqa: F401,F403
from .generators import __all__ as _generators_all
from .linalg import *  # noqa: F401,F403
from .linalg import __all__ as _linalg_all
from .projection import *  # noqa: F401,F403
from .projection import __all__ as _projection_all

__version__ = "0.1.0"

__all__ = [
    "LindbladAlgebraError",
    "DimensionError",
    "ShapeError",
    "SingularMatrixError",
    "DomainError",
    *_linalg_all,
    *_generators_all,
    *_algebra_all,
    *_bch_all,
    *_projection_all,
]
